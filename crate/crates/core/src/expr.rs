//! Scoring-expression DSL for constructive TSP heuristics.
//!
//! An [`Expr`] scores one candidate node from the features of the current
//! construction state. Every operator is total: evaluation of a finite
//! feature vector always yields a finite number.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MAX_DEPTH: usize = 8;

/// Denominators below this magnitude make `div_safe` return its numerator.
pub const DIV_EPS: f64 = 1e-9;

/// Per-candidate features of the TSP construction template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureId {
    DistToCurrent,
    DistToDestination,
    MeanDistToUnvisited,
    MinDistToUnvisited,
    RemainingCount,
    DistCurrentToDestination,
}

impl FeatureId {
    pub const ALL: [FeatureId; 6] = [
        FeatureId::DistToCurrent,
        FeatureId::DistToDestination,
        FeatureId::MeanDistToUnvisited,
        FeatureId::MinDistToUnvisited,
        FeatureId::RemainingCount,
        FeatureId::DistCurrentToDestination,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::DistToCurrent => "dist_to_current",
            FeatureId::DistToDestination => "dist_to_destination",
            FeatureId::MeanDistToUnvisited => "mean_dist_to_unvisited",
            FeatureId::MinDistToUnvisited => "min_dist_to_unvisited",
            FeatureId::RemainingCount => "remaining_count",
            FeatureId::DistCurrentToDestination => "dist_current_to_destination",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryOp {
    Neg,
    Abs,
    SqrtSafe,
    Log1pSafe,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Neg, UnaryOp::Abs, UnaryOp::SqrtSafe, UnaryOp::Log1pSafe];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Abs => "abs",
            UnaryOp::SqrtSafe => "sqrt_safe",
            UnaryOp::Log1pSafe => "log1p_safe",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Neg => -x,
            UnaryOp::Abs => x.abs(),
            UnaryOp::SqrtSafe => x.abs().sqrt(),
            UnaryOp::Log1pSafe => x.abs().ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    DivSafe,
    Min,
    Max,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 6] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::DivSafe,
        BinaryOp::Min,
        BinaryOp::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::DivSafe => "div_safe",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::DivSafe => {
                if b.abs() < DIV_EPS {
                    a
                } else {
                    a / b
                }
            }
            BinaryOp::Min => a.min(b),
            BinaryOp::Max => a.max(b),
        }
    }
}

/// Saturates overflow so intermediate values stay finite.
#[inline]
fn saturate(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    Feature(FeatureId),
    Unary { op: UnaryOp, child: Box<Expr> },
    Binary { op: BinaryOp, left: Box<Expr>, right: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("feature `{}` missing or not finite", .0.name())]
    MissingFeature(FeatureId),
}

/// Lookup of feature values during evaluation.
pub trait FeatureSource {
    fn feature(&self, id: FeatureId) -> Option<f64>;
}

impl FeatureSource for [f64; 6] {
    fn feature(&self, id: FeatureId) -> Option<f64> {
        Some(self[id.index()])
    }
}

impl FeatureSource for HashMap<FeatureId, f64> {
    fn feature(&self, id: FeatureId) -> Option<f64> {
        self.get(&id).copied()
    }
}

impl FeatureSource for BTreeMap<FeatureId, f64> {
    fn feature(&self, id: FeatureId) -> Option<f64> {
        self.get(&id).copied()
    }
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn feature(f: FeatureId) -> Self {
        Expr::Feature(f)
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::Unary {
            op,
            child: Box::new(child),
        }
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Evaluates against any feature source; fails when a referenced
    /// feature is absent or non-finite.
    pub fn eval<F: FeatureSource + ?Sized>(&self, features: &F) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => saturate(*c),
            Expr::Feature(id) => match features.feature(*id) {
                Some(v) if v.is_finite() => v,
                _ => return Err(ExprError::MissingFeature(*id)),
            },
            Expr::Unary { op, child } => saturate(op.apply(child.eval(features)?)),
            Expr::Binary { op, left, right } => {
                saturate(op.apply(left.eval(features)?, right.eval(features)?))
            }
        })
    }

    /// Depth counting the root as 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Feature(_) => 1,
            Expr::Unary { child, .. } => 1 + child.depth(),
            Expr::Binary { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Feature(_) => 1,
            Expr::Unary { child, .. } => 1 + child.size(),
            Expr::Binary { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Feature(_) => vec![],
            Expr::Unary { child, .. } => vec![child],
            Expr::Binary { left, right, .. } => vec![left, right],
        }
    }

    /// Node label used by tree-structured comparisons.
    pub fn label(&self) -> String {
        match self {
            Expr::Const(c) => format!("const {}", format_const(*c)),
            Expr::Feature(f) => format!("feat {}", f.name()),
            Expr::Unary { op, .. } => op.name().to_string(),
            Expr::Binary { op, .. } => op.name().to_string(),
        }
    }

    /// Subtree at a preorder index.
    pub fn node(&self, index: usize) -> Option<&Expr> {
        let mut counter = index;
        self.node_inner(&mut counter)
    }

    fn node_inner(&self, counter: &mut usize) -> Option<&Expr> {
        if *counter == 0 {
            return Some(self);
        }
        *counter -= 1;
        for c in self.children() {
            if let Some(found) = c.node_inner(counter) {
                return Some(found);
            }
        }
        None
    }

    pub fn node_mut(&mut self, index: usize) -> Option<&mut Expr> {
        let mut counter = index;
        self.node_mut_inner(&mut counter)
    }

    fn node_mut_inner(&mut self, counter: &mut usize) -> Option<&mut Expr> {
        if *counter == 0 {
            return Some(self);
        }
        *counter -= 1;
        match self {
            Expr::Const(_) | Expr::Feature(_) => None,
            Expr::Unary { child, .. } => child.node_mut_inner(counter),
            Expr::Binary { left, right, .. } => match left.node_mut_inner(counter) {
                Some(found) => Some(found),
                None => right.node_mut_inner(counter),
            },
        }
    }

    /// Depth (root = 1) of the node at a preorder index.
    pub fn node_depth(&self, index: usize) -> Option<usize> {
        fn walk(e: &Expr, counter: &mut usize, depth: usize) -> Option<usize> {
            if *counter == 0 {
                return Some(depth);
            }
            *counter -= 1;
            e.children().into_iter().find_map(|c| walk(c, counter, depth + 1))
        }
        let mut counter = index;
        walk(self, &mut counter, 1)
    }

    /// Canonical S-expression text, e.g. `(add (feat dist_to_current) (const 0.1))`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out);
        out
    }

    fn write_sexpr(&self, out: &mut String) {
        match self {
            Expr::Const(c) => {
                out.push_str("(const ");
                out.push_str(&format_const(*c));
                out.push(')');
            }
            Expr::Feature(f) => {
                out.push_str("(feat ");
                out.push_str(f.name());
                out.push(')');
            }
            Expr::Unary { op, child } => {
                out.push('(');
                out.push_str(op.name());
                out.push(' ');
                child.write_sexpr(out);
                out.push(')');
            }
            Expr::Binary { op, left, right } => {
                out.push('(');
                out.push_str(op.name());
                out.push(' ');
                left.write_sexpr(out);
                out.push(' ');
                right.write_sexpr(out);
                out.push(')');
            }
        }
    }

    /// Grows a random tree of depth at most `max_depth`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_depth: usize) -> Expr {
        Self::grow(rng, max_depth.max(1), true)
    }

    fn grow<R: Rng + ?Sized>(rng: &mut R, depth_left: usize, root: bool) -> Expr {
        let leaf = depth_left <= 1 || (!root && rng.random_bool(0.3));
        if leaf {
            return Self::random_leaf(rng);
        }
        if rng.random_bool(0.3) {
            let op = UnaryOp::ALL[rng.random_range(0..UnaryOp::ALL.len())];
            Expr::unary(op, Self::grow(rng, depth_left - 1, false))
        } else {
            let op = BinaryOp::ALL[rng.random_range(0..BinaryOp::ALL.len())];
            Expr::binary(
                op,
                Self::grow(rng, depth_left - 1, false),
                Self::grow(rng, depth_left - 1, false),
            )
        }
    }

    pub fn random_leaf<R: Rng + ?Sized>(rng: &mut R) -> Expr {
        if rng.random_bool(0.7) {
            Expr::Feature(FeatureId::ALL[rng.random_range(0..FeatureId::ALL.len())])
        } else {
            // Three decimals keep constants exactly representable in display text.
            let c: f64 = rng.random_range(-2.0..2.0);
            Expr::Const((c * 1000.0).round() / 1000.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Evaluates an expression; the free-function form of [`Expr::eval`].
pub fn expr_eval<F: FeatureSource + ?Sized>(e: &Expr, features: &F) -> Result<f64, ExprError> {
    e.eval(features)
}

/// Six-significant-digit rendering in the style of C's `%g`.
pub fn format_const(c: f64) -> String {
    if c == 0.0 {
        return "0".to_string();
    }
    let exp = c.abs().log10().floor() as i32;
    // Rounding may bump the exponent (e.g. 999999.7 -> 1e6).
    let sci = format!("{:.5e}", c);
    let (mantissa, e) = sci.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("integer exponent");
    let exp = if e != exp { e } else { exp };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, c))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), e)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("bad constant `{0}`")]
    BadConstant(String),
    #[error("trailing input after expression")]
    Trailing,
    #[error("no expression found in text")]
    NotFound,
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sexpr(s)
    }
}

/// Parses the canonical S-expression grammar.
pub fn parse_sexpr(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text);
    let mut pos = 0;
    let e = parse_at(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(ParseError::Trailing);
    }
    Ok(e)
}

/// Finds and parses the first balanced parenthesized expression in free text
/// (e.g. a chat reply that wraps the expression in prose or code fences).
pub fn extract_sexpr(text: &str) -> Result<Expr, ParseError> {
    let mut last_err = ParseError::NotFound;
    let mut from = 0;
    while let Some(rel) = text[from..].find('(') {
        let start = from + rel;
        let mut depth = 0i32;
        let mut end = None;
        for (off, ch) in text[start..].char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 {
                end = Some(start + off + 1);
                break;
            }
        }
        let Some(end) = end else { break };
        match parse_sexpr(&text[start..end]) {
            Ok(e) => return Ok(e),
            Err(e) => last_err = e,
        }
        from = end;
    }
    Err(last_err)
}

fn lex(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_at(tokens: &[String], pos: &mut usize) -> Result<Expr, ParseError> {
    let next = |pos: &mut usize| -> Result<&String, ParseError> {
        let t = tokens.get(*pos).ok_or(ParseError::UnexpectedEnd)?;
        *pos += 1;
        Ok(t)
    };
    let open = next(pos)?;
    if open != "(" {
        return Err(ParseError::UnexpectedToken(open.clone()));
    }
    let head = next(pos)?.clone();
    let expr = match head.as_str() {
        "const" => {
            let v = next(pos)?;
            let c: f64 = v.parse().map_err(|_| ParseError::BadConstant(v.clone()))?;
            if !c.is_finite() {
                return Err(ParseError::BadConstant(v.clone()));
            }
            Expr::Const(c)
        }
        "feat" => {
            let v = next(pos)?;
            Expr::Feature(FeatureId::from_name(v).ok_or_else(|| ParseError::UnknownFeature(v.clone()))?)
        }
        name => {
            if let Some(op) = UnaryOp::ALL.into_iter().find(|o| o.name() == name) {
                Expr::unary(op, parse_at(tokens, pos)?)
            } else if let Some(op) = BinaryOp::ALL.into_iter().find(|o| o.name() == name) {
                let l = parse_at(tokens, pos)?;
                let r = parse_at(tokens, pos)?;
                Expr::binary(op, l, r)
            } else {
                return Err(ParseError::UnknownOperator(name.to_string()));
            }
        }
    };
    let close = next(pos)?;
    if close != ")" {
        return Err(ParseError::UnexpectedToken(close.clone()));
    }
    Ok(expr)
}

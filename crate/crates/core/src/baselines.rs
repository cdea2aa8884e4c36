//! Static text baselines: token n-gram overlap and expression tree edit
//! similarity. They look only at program text, never at behavior.

use std::collections::HashMap;

use thiserror::Error;

use crate::expr::Expr;
use crate::types::AlgorithmSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("token stream is empty")]
    EmptyStream,
    #[error("algorithm `{0}` has no expression tree")]
    NotDsl(String),
}

/// Splits text into identifier/number words and single punctuation tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            word.push(ch);
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        if !ch.is_whitespace() {
            out.push(ch.to_string());
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    for w in tokens.windows(n) {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// Geometric mean of clipped n-gram precisions of `cand` against `reference`.
fn directional(cand: &[String], reference: &[String], max_n: usize) -> f64 {
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let c = ngram_counts(cand, n);
        let r = ngram_counts(reference, n);
        let total = cand.len() + 1 - n;
        let clipped: usize = c.iter().map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0))).sum();
        if clipped == 0 {
            return 0.0;
        }
        log_sum += (clipped as f64 / total as f64).ln();
    }
    (log_sum / max_n as f64).exp()
}

/// Symmetrized n-gram precision similarity.
///
/// Orders above the shorter stream's length are skipped so that short
/// identical streams still score 1.
pub fn ngram_sim(a: &[String], b: &[String], max_n: usize) -> Result<f64, BaselineError> {
    if a.is_empty() || b.is_empty() {
        return Err(BaselineError::EmptyStream);
    }
    if a == b {
        return Ok(1.0);
    }
    let n = max_n.max(1).min(a.len()).min(b.len());
    Ok(0.5 * (directional(a, b, n) + directional(b, a, n)))
}

/// [`ngram_sim`] over two pieces of text with the default order 4.
pub fn text_sim(a: &str, b: &str) -> Result<f64, BaselineError> {
    ngram_sim(&tokenize(a), &tokenize(b), 4)
}

/// Ordered labeled tree in postorder layout, as used by Zhang–Shasha.
struct Postorder {
    labels: Vec<String>,
    /// Postorder index of each node's leftmost leaf descendant.
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl Postorder {
    fn new(e: &Expr) -> Self {
        let mut p = Postorder {
            labels: Vec::new(),
            lml: Vec::new(),
            keyroots: Vec::new(),
        };
        p.visit(e);
        let n = p.labels.len();
        // A keyroot is the highest node having a given leftmost leaf.
        let mut seen = vec![false; n];
        for i in (0..n).rev() {
            if !seen[p.lml[i]] {
                seen[p.lml[i]] = true;
                p.keyroots.push(i);
            }
        }
        p.keyroots.sort_unstable();
        p
    }

    fn visit(&mut self, e: &Expr) -> usize {
        let mut first_leaf = None;
        for c in e.children() {
            let l = self.visit(c);
            first_leaf.get_or_insert(l);
        }
        let idx = self.labels.len();
        self.labels.push(e.label());
        let l = first_leaf.unwrap_or(idx);
        self.lml.push(l);
        l
    }
}

/// Unit-cost ordered tree edit distance (Zhang–Shasha).
pub fn tree_edit_distance(a: &Expr, b: &Expr) -> usize {
    let ta = Postorder::new(a);
    let tb = Postorder::new(b);
    let (na, nb) = (ta.labels.len(), tb.labels.len());
    let mut td = vec![vec![0usize; nb]; na];
    let mut fd = vec![vec![0usize; nb + 1]; na + 1];
    for &i in &ta.keyroots {
        for &j in &tb.keyroots {
            let (li, lj) = (ta.lml[i], tb.lml[j]);
            // Forest distances indexed relative to the leftmost leaves.
            fd[0][0] = 0;
            for x in li..=i {
                fd[x - li + 1][0] = fd[x - li][0] + 1;
            }
            for y in lj..=j {
                fd[0][y - lj + 1] = fd[0][y - lj] + 1;
            }
            for x in li..=i {
                for y in lj..=j {
                    let (fx, fy) = (x - li + 1, y - lj + 1);
                    let del = fd[fx - 1][fy] + 1;
                    let ins = fd[fx][fy - 1] + 1;
                    if ta.lml[x] == li && tb.lml[y] == lj {
                        let rel = fd[fx - 1][fy - 1] + usize::from(ta.labels[x] != tb.labels[y]);
                        fd[fx][fy] = del.min(ins).min(rel);
                        td[x][y] = fd[fx][fy];
                    } else {
                        let px = ta.lml[x] - li;
                        let py = tb.lml[y] - lj;
                        fd[fx][fy] = del.min(ins).min(fd[px][py] + td[x][y]);
                    }
                }
            }
        }
    }
    td[na - 1][nb - 1]
}

/// `1 - TED / max(size)` over expression trees.
pub fn expr_tree_sim(a: &Expr, b: &Expr) -> f64 {
    let d = tree_edit_distance(a, b) as f64;
    1.0 - d / a.size().max(b.size()) as f64
}

/// Tree edit similarity between two DSL algorithms.
pub fn tree_edit_sim(a: &AlgorithmSpec, b: &AlgorithmSpec) -> Result<f64, BaselineError> {
    let ea = a.expr().ok_or_else(|| BaselineError::NotDsl(a.id()))?;
    let eb = b.expr().ok_or_else(|| BaselineError::NotDsl(b.id()))?;
    Ok(expr_tree_sim(ea, eb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinaryOp, FeatureId, UnaryOp};
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(
            tokenize("for i in range(n): a[i]+=1"),
            ["for", "i", "in", "range", "(", "n", ")", ":", "a", "[", "i", "]", "+", "=", "1"]
        );
        assert!(tokenize("  \n").is_empty());
    }

    #[test]
    fn ngram_examples() {
        let a = toks("x = min(a, b)");
        assert_eq!(ngram_sim(&a, &a, 4), Ok(1.0));
        assert_eq!(ngram_sim(&toks("a b c"), &toks("d e f"), 4), Ok(0.0));
        assert_eq!(ngram_sim(&a, &[], 4), Err(BaselineError::EmptyStream));
        let s = ngram_sim(&toks("x = min(a, b)"), &toks("x = max(a, b)"), 4).unwrap();
        assert!(s > 0.3 && s < 1.0);
    }

    #[test]
    fn one_token_change_keeps_long_text_close() {
        let body = "def step(cur, unvisited, d):\n    best = None\n    for c in unvisited:\n        if best is None or d[cur][c] < d[cur][best]:\n            best = c\n    return best\n";
        let other = body.replace('<', ">");
        let s = text_sim(body, &other).unwrap();
        assert!(s > 0.8, "{s}");
    }

    /// Forest edit distance by the definitional recursion on rightmost roots.
    fn forest_oracle(f: &[&Expr], g: &[&Expr]) -> usize {
        fn split<'a>(f: &[&'a Expr]) -> (Vec<&'a Expr>, &'a Expr, Vec<&'a Expr>) {
            let (last, rest) = f.split_last().unwrap();
            let mut opened = rest.to_vec();
            opened.extend(last.children());
            (rest.to_vec(), *last, opened)
        }
        match (f.is_empty(), g.is_empty()) {
            (true, true) => 0,
            (false, true) => forest_oracle(&split(f).2, g) + 1,
            (true, false) => forest_oracle(f, &split(g).2) + 1,
            (false, false) => {
                let (frest, v, fopen) = split(f);
                let (grest, w, gopen) = split(g);
                let del = forest_oracle(&fopen, g) + 1;
                let ins = forest_oracle(f, &gopen) + 1;
                let rel = forest_oracle(&frest, &grest)
                    + forest_oracle(&v.children(), &w.children())
                    + usize::from(v.label() != w.label());
                del.min(ins).min(rel)
            }
        }
    }

    fn c(v: f64) -> Expr {
        Expr::constant(v)
    }
    fn f(id: FeatureId) -> Expr {
        Expr::feature(id)
    }

    #[test]
    fn tree_examples() {
        let e = Expr::binary(BinaryOp::Add, f(FeatureId::DistToCurrent), c(1.0));
        assert_eq!(expr_tree_sim(&e, &e), 1.0);
        assert_eq!(expr_tree_sim(&c(1.0), &c(2.0)), 0.0);
        let g = Expr::binary(BinaryOp::Sub, f(FeatureId::DistToCurrent), c(1.0));
        assert_eq!(tree_edit_distance(&e, &g), 1);
        let h = Expr::unary(UnaryOp::Neg, e.clone());
        assert_eq!(tree_edit_distance(&e, &h), 1);
        assert_eq!(expr_tree_sim(&e, &h), 0.75);
    }

    #[test]
    fn five_node_trees_match_oracle() {
        let a = Expr::binary(
            BinaryOp::Mul,
            Expr::unary(UnaryOp::Abs, f(FeatureId::MinDistToUnvisited)),
            Expr::binary(BinaryOp::Add, c(1.0), f(FeatureId::RemainingCount)),
        );
        let b = Expr::binary(
            BinaryOp::Max,
            Expr::binary(BinaryOp::Add, f(FeatureId::RemainingCount), c(1.0)),
            Expr::unary(UnaryOp::Neg, f(FeatureId::MinDistToUnvisited)),
        );
        assert_eq!(tree_edit_distance(&a, &b), forest_oracle(&[&a], &[&b]));
    }

    #[test]
    fn dsl_only() {
        let z = AlgorithmSpec::zoo("bubble_sort").unwrap();
        let d = AlgorithmSpec::dsl(c(1.0));
        assert!(matches!(tree_edit_sim(&z, &d), Err(BaselineError::NotDsl(_))));
        assert_eq!(tree_edit_sim(&d, &d), Ok(1.0));
    }

    fn small_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0usize..6).prop_map(|i| f(FeatureId::ALL[i])),
            (0i32..3).prop_map(|v| c(v as f64)),
        ];
        leaf.prop_recursive(3, 7, 2, |inner| {
            prop_oneof![
                (0usize..2, inner.clone()).prop_map(|(o, e)| Expr::unary([UnaryOp::Neg, UnaryOp::Abs][o], e)),
                (0usize..3, inner.clone(), inner)
                    .prop_map(|(o, l, r)| Expr::binary([BinaryOp::Add, BinaryOp::Min, BinaryOp::Mul][o], l, r)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ted_matches_oracle(a in small_expr(), b in small_expr()) {
            prop_assume!(a.size() <= 6 && b.size() <= 6);
            prop_assert_eq!(tree_edit_distance(&a, &b), forest_oracle(&[&a], &[&b]));
        }

        #[test]
        fn ted_symmetric_and_zero_iff_equal(a in small_expr(), b in small_expr()) {
            let d = tree_edit_distance(&a, &b);
            prop_assert_eq!(d, tree_edit_distance(&b, &a));
            prop_assert_eq!(d == 0, a.label() == b.label() && a.to_sexpr() == b.to_sexpr());
        }

        #[test]
        fn ngram_symmetric_in_unit_interval(a in "[a-c ()]{1,20}", b in "[a-c ()]{1,20}") {
            let (ta, tb) = (tokenize(&a), tokenize(&b));
            prop_assume!(!ta.is_empty() && !tb.is_empty());
            let s = ngram_sim(&ta, &tb, 4).unwrap();
            prop_assert_eq!(s, ngram_sim(&tb, &ta, 4).unwrap());
            prop_assert!((0.0..=1.0).contains(&s));
            if ta == tb {
                prop_assert_eq!(s, 1.0);
            } else if ta.len().min(tb.len()) <= 4 {
                prop_assert!(s < 1.0);
            }
        }
    }
}

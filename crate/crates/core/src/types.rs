//! Shared domain values: solutions, trajectories, problem instances and
//! algorithm descriptors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;

/// Which family a [`Solution`] payload belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    PermSeq,
    CatSeq,
    RealVec,
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PayloadKind::PermSeq => "permseq",
            PayloadKind::CatSeq => "catseq",
            PayloadKind::RealVec => "realvec",
        };
        f.write_str(s)
    }
}

/// Payload of one intermediate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    /// Ordered item identifiers without repetition (routes, arrays, visit orders).
    PermSeq(Vec<u32>),
    /// Small-integer category labels (e.g. bin assignments).
    CatSeq(Vec<u16>),
    /// A point in problem units.
    RealVec(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("permutation payload repeats identifier {0}")]
    DuplicateId(u32),
    #[error("real vector entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("category label {label} outside range 0..{range}")]
    LabelOutOfRange { label: u16, range: u16 },
}

/// One intermediate or partial solution emitted by an iterative algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub payload: Payload,
}

impl Solution {
    pub fn perm(ids: Vec<u32>) -> Result<Self, SolutionError> {
        let s = Solution {
            payload: Payload::PermSeq(ids),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn cat(labels: Vec<u16>) -> Self {
        Solution {
            payload: Payload::CatSeq(labels),
        }
    }

    pub fn real(values: Vec<f64>) -> Result<Self, SolutionError> {
        let s = Solution {
            payload: Payload::RealVec(values),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn as_perm(&self) -> Option<&[u32]> {
        match &self.payload {
            Payload::PermSeq(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_cat(&self) -> Option<&[u16]> {
        match &self.payload {
            Payload::CatSeq(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.payload {
            Payload::RealVec(v) => Some(v),
            _ => None,
        }
    }

    pub fn kind(&self) -> PayloadKind {
        match self.payload {
            Payload::PermSeq(_) => PayloadKind::PermSeq,
            Payload::CatSeq(_) => PayloadKind::CatSeq,
            Payload::RealVec(_) => PayloadKind::RealVec,
        }
    }

    /// Sequence length or vector dimension.
    pub fn len(&self) -> usize {
        match &self.payload {
            Payload::PermSeq(v) => v.len(),
            Payload::CatSeq(v) => v.len(),
            Payload::RealVec(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the payload-level invariants (no duplicate ids, finite reals).
    pub fn validate(&self) -> Result<(), SolutionError> {
        match &self.payload {
            Payload::PermSeq(ids) => {
                let mut seen = std::collections::HashSet::with_capacity(ids.len());
                for &id in ids {
                    if !seen.insert(id) {
                        return Err(SolutionError::DuplicateId(id));
                    }
                }
                Ok(())
            }
            Payload::CatSeq(_) => Ok(()),
            Payload::RealVec(v) => match v.iter().position(|x| !x.is_finite()) {
                Some(index) => Err(SolutionError::NonFinite { index }),
                None => Ok(()),
            },
        }
    }

    /// Checks category labels against an instance-declared range.
    pub fn check_labels(&self, range: u16) -> Result<(), SolutionError> {
        if let Payload::CatSeq(labels) = &self.payload {
            if let Some(&label) = labels.iter().find(|&&l| l >= range) {
                return Err(SolutionError::LabelOutOfRange { label, range });
            }
        }
        Ok(())
    }
}

/// Provenance of a recorded trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrajMeta {
    pub algorithm_id: String,
    pub instance_id: String,
    pub start_id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajError {
    #[error("trajectory has no steps")]
    Empty,
    #[error("step {index} has payload {found}, expected {expected}")]
    MixedPayload {
        index: usize,
        expected: PayloadKind,
        found: PayloadKind,
    },
    #[error("step {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("step {index}: {source}")]
    BadStep {
        index: usize,
        #[source]
        source: SolutionError,
    },
}

/// Problem-solving trajectory: the ordered intermediate solutions of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsTraj {
    pub steps: Vec<Solution>,
    pub meta: TrajMeta,
}

impl PsTraj {
    pub fn new(steps: Vec<Solution>, meta: TrajMeta) -> Result<Self, TrajError> {
        let t = PsTraj { steps, meta };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TrajError> {
        let first = self.steps.first().ok_or(TrajError::Empty)?;
        let kind = first.kind();
        let dim = first.len();
        for (index, s) in self.steps.iter().enumerate() {
            if s.kind() != kind {
                return Err(TrajError::MixedPayload {
                    index,
                    expected: kind,
                    found: s.kind(),
                });
            }
            if kind == PayloadKind::RealVec && s.len() != dim {
                return Err(TrajError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: s.len(),
                });
            }
            s.validate()
                .map_err(|source| TrajError::BadStep { index, source })?;
        }
        Ok(())
    }

    pub fn kind(&self) -> PayloadKind {
        self.steps[0].kind()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Solution {
        self.steps.last().expect("trajectory is non-empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Tsp,
    Sort,
    TreeTraversal,
    GraphTraversal,
    BinPacking,
    MatMul,
    ShortestPath,
    Rosenbrock,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::Tsp => "tsp",
            Task::Sort => "sort",
            Task::TreeTraversal => "tree_traversal",
            Task::GraphTraversal => "graph_traversal",
            Task::BinPacking => "bin_packing",
            Task::MatMul => "mat_mul",
            Task::ShortestPath => "shortest_path",
            Task::Rosenbrock => "rosenbrock",
        };
        f.write_str(s)
    }
}

/// Weighted undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: f64,
}

/// Task-specific instance data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceData {
    Tsp {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        coords: Vec<[f64; 2]>,
        dist: Vec<Vec<f64>>,
    },
    Sort {
        values: Vec<u32>,
    },
    /// Binary tree as `[left, right]` child slots per node.
    Tree {
        children: Vec<[Option<u32>; 2]>,
    },
    Graph {
        n: usize,
        edges: Vec<Edge>,
    },
    BinPacking {
        capacity: f64,
        items: Vec<f64>,
    },
    MatMul {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    },
    Rosenbrock {
        lo: f64,
        hi: f64,
    },
}

/// Value of an admissible start point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartValue {
    /// City, root or source node.
    Node(u32),
    /// Initial point in problem units.
    Point(Vec<f64>),
    /// The instance's own initial state (unsorted array, empty packing, zero matrix).
    Initial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartPoint {
    pub id: String,
    pub value: StartValue,
}

impl StartPoint {
    pub fn node(n: u32) -> Self {
        StartPoint {
            id: format!("node{n}"),
            value: StartValue::Node(n),
        }
    }

    pub fn point(id: impl Into<String>, p: Vec<f64>) -> Self {
        StartPoint {
            id: id.into(),
            value: StartValue::Point(p),
        }
    }

    pub fn initial() -> Self {
        StartPoint {
            id: "initial".into(),
            value: StartValue::Initial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("distance matrix is not square (row {row} has {len} entries, expected {n})")]
    NonSquareMatrix { row: usize, len: usize, n: usize },
    #[error("distance matrix is asymmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("distance matrix has nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("distance matrix has negative or non-finite entry at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("instance declares no start points")]
    EmptyStartPoints,
    #[error("normalization bound must be strictly positive, got {0}")]
    NonpositiveBound(f64),
    #[error("instance data does not match task {0}")]
    DataMismatch(Task),
    #[error("malformed instance: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    pub task: Task,
    pub data: InstanceData,
    pub start_points: Vec<StartPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max_hint: Option<f64>,
}

impl ProblemInstance {
    pub fn start(&self, id: &str) -> Option<&StartPoint> {
        self.start_points.iter().find(|s| s.id == id)
    }

    /// Upper bound (exclusive) on category labels emitted for this instance.
    pub fn label_range(&self) -> Option<u16> {
        match &self.data {
            InstanceData::BinPacking { items, .. } => Some(items.len().min(u16::MAX as usize) as u16),
            _ => None,
        }
    }

    pub fn tsp_dist(&self) -> Option<&[Vec<f64>]> {
        match &self.data {
            InstanceData::Tsp { dist, .. } => Some(dist),
            _ => None,
        }
    }
}

/// Checks every [`ProblemInstance`] invariant.
pub fn validate_instance(inst: &ProblemInstance) -> Result<(), InstanceError> {
    if inst.start_points.is_empty() {
        return Err(InstanceError::EmptyStartPoints);
    }
    if let Some(h) = inst.d_max_hint {
        if !(h > 0.0) || !h.is_finite() {
            return Err(InstanceError::NonpositiveBound(h));
        }
    }
    let matches = matches!(
        (inst.task, &inst.data),
        (Task::Tsp, InstanceData::Tsp { .. })
            | (Task::Sort, InstanceData::Sort { .. })
            | (Task::TreeTraversal, InstanceData::Tree { .. })
            | (Task::GraphTraversal, InstanceData::Graph { .. })
            | (Task::ShortestPath, InstanceData::Graph { .. })
            | (Task::BinPacking, InstanceData::BinPacking { .. })
            | (Task::MatMul, InstanceData::MatMul { .. })
            | (Task::Rosenbrock, InstanceData::Rosenbrock { .. })
    );
    if !matches {
        return Err(InstanceError::DataMismatch(inst.task));
    }
    match &inst.data {
        InstanceData::Tsp { dist, .. } => validate_matrix(dist)?,
        InstanceData::Sort { values } => {
            let mut sorted = values.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(InstanceError::Malformed("sort values must be distinct".into()));
            }
        }
        InstanceData::Tree { children } => {
            let n = children.len() as u32;
            if children.iter().flatten().flatten().any(|&c| c >= n) {
                return Err(InstanceError::Malformed("tree child index out of range".into()));
            }
        }
        InstanceData::Graph { n, edges } => {
            if edges
                .iter()
                .any(|e| e.u as usize >= *n || e.v as usize >= *n || !(e.w >= 0.0) || !e.w.is_finite())
            {
                return Err(InstanceError::Malformed("graph edge out of range or negative".into()));
            }
        }
        InstanceData::BinPacking { capacity, items } => {
            if !(*capacity > 0.0) || items.iter().any(|&s| !(s > 0.0) || s > *capacity) {
                return Err(InstanceError::Malformed("bin items must lie in (0, capacity]".into()));
            }
        }
        InstanceData::MatMul { a, b } => {
            let inner = a.first().map_or(0, Vec::len);
            if a.iter().any(|r| r.len() != inner) || b.len() != inner {
                return Err(InstanceError::Malformed("matrix shapes do not conform".into()));
            }
            let cols = b.first().map_or(0, Vec::len);
            if b.iter().any(|r| r.len() != cols) {
                return Err(InstanceError::Malformed("ragged right matrix".into()));
            }
        }
        InstanceData::Rosenbrock { lo, hi } => {
            if !(lo < hi) {
                return Err(InstanceError::Malformed("empty start box".into()));
            }
        }
    }
    Ok(())
}

fn validate_matrix(dist: &[Vec<f64>]) -> Result<(), InstanceError> {
    let n = dist.len();
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(InstanceError::NonSquareMatrix { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        if dist[i][i] != 0.0 {
            return Err(InstanceError::NonzeroDiagonal(i));
        }
        for j in 0..n {
            let d = dist[i][j];
            if !(d >= 0.0) || !d.is_finite() {
                return Err(InstanceError::NegativeDistance { i, j });
            }
            if d != dist[j][i] {
                return Err(InstanceError::AsymmetricMatrix { i, j });
            }
        }
    }
    Ok(())
}

/// Instances addressable by id.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct InstanceRegistry {
    pub instances: BTreeMap<String, ProblemInstance>,
}

impl InstanceRegistry {
    pub fn new(instances: impl IntoIterator<Item = ProblemInstance>) -> Self {
        InstanceRegistry {
            instances: instances.into_iter().map(|i| (i.id.clone(), i)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&ProblemInstance> {
        self.instances.get(id)
    }

    pub fn insert(&mut self, inst: ProblemInstance) {
        self.instances.insert(inst.id.clone(), inst);
    }

    pub fn by_task(&self, task: Task) -> impl Iterator<Item = &ProblemInstance> {
        self.instances.values().filter(move |i| i.task == task)
    }
}

/// How an algorithm is specified: a built-in reference implementation or a
/// scoring expression for the constructive TSP template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Zoo { name: String },
    Dsl { expr: Expr },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("unknown zoo algorithm `{0}`")]
    UnknownZoo(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub kind: AlgoKind,
    pub display_text: String,
    pub length_tokens: usize,
}

impl AlgorithmSpec {
    pub fn zoo(name: &str) -> Result<Self, SpecError> {
        let algo = crate::zoo::lookup(name).ok_or_else(|| SpecError::UnknownZoo(name.to_string()))?;
        let display_text = algo.pseudocode.trim().to_string();
        Ok(AlgorithmSpec {
            length_tokens: crate::baselines::tokenize(&display_text).len(),
            kind: AlgoKind::Zoo {
                name: algo.id.to_string(),
            },
            display_text,
        })
    }

    pub fn dsl(expr: Expr) -> Self {
        let display_text = expr.to_sexpr();
        AlgorithmSpec {
            length_tokens: crate::baselines::tokenize(&display_text).len(),
            kind: AlgoKind::Dsl { expr },
            display_text,
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.kind {
            AlgoKind::Dsl { expr } => Some(expr),
            AlgoKind::Zoo { .. } => None,
        }
    }

    /// Stable identifier: the zoo name, or `dsl:` followed by the expression text.
    pub fn id(&self) -> String {
        match &self.kind {
            AlgoKind::Zoo { name } => name.clone(),
            AlgoKind::Dsl { .. } => format!("dsl:{}", self.display_text),
        }
    }
}

/// An evaluated algorithm with its behavioral fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAlgorithm {
    pub spec: AlgorithmSpec,
    pub fitness: f64,
    pub trajs: Vec<PsTraj>,
    pub eval_count_at_birth: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsp(dist: Vec<Vec<f64>>, starts: Vec<StartPoint>) -> ProblemInstance {
        ProblemInstance {
            id: "t".into(),
            task: Task::Tsp,
            data: InstanceData::Tsp { coords: vec![], dist },
            start_points: starts,
            d_max_hint: None,
        }
    }

    #[test]
    fn valid_tsp_instance() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        assert_eq!(validate_instance(&tsp(d, vec![StartPoint::node(0)])), Ok(()));
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.5, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        assert!(matches!(
            validate_instance(&tsp(d, vec![StartPoint::node(0)])),
            Err(InstanceError::AsymmetricMatrix { i: 0, j: 1 })
        ));
    }

    #[test]
    fn empty_starts_rejected() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(validate_instance(&tsp(d, vec![])), Err(InstanceError::EmptyStartPoints));
    }

    #[test]
    fn nonpositive_hint_rejected() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let mut inst = tsp(d, vec![StartPoint::node(0)]);
        inst.d_max_hint = Some(0.0);
        assert_eq!(validate_instance(&inst), Err(InstanceError::NonpositiveBound(0.0)));
    }

    #[test]
    fn trajectory_invariants() {
        let meta = TrajMeta::default();
        assert_eq!(PsTraj::new(vec![], meta.clone()), Err(TrajError::Empty));
        let mixed = vec![Solution::perm(vec![0]).unwrap(), Solution::cat(vec![0])];
        assert!(matches!(
            PsTraj::new(mixed, meta.clone()),
            Err(TrajError::MixedPayload { index: 1, .. })
        ));
        let dims = vec![
            Solution::real(vec![0.0, 0.0]).unwrap(),
            Solution::real(vec![0.0]).unwrap(),
        ];
        assert!(matches!(
            PsTraj::new(dims, meta),
            Err(TrajError::DimensionMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn solution_invariants() {
        assert_eq!(Solution::perm(vec![1, 2, 1]), Err(SolutionError::DuplicateId(1)));
        assert_eq!(
            Solution::real(vec![0.0, f64::NAN]),
            Err(SolutionError::NonFinite { index: 1 })
        );
        assert!(Solution::cat(vec![0, 3]).check_labels(3).is_err());
        assert!(Solution::cat(vec![0, 2]).check_labels(3).is_ok());
    }

    #[test]
    fn solution_json_shape() {
        let s = Solution::perm(vec![3, 1, 2]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"payload":{"permseq":[3,1,2]}}"#);
        let r = Solution::real(vec![0.1, -2.5e-300]).unwrap();
        let back: Solution = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

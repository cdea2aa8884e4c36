//! Reference algorithms, each instrumented to emit its trajectory, and the
//! four-type benchmark pair registry.

mod binpack;
pub mod fixtures;
mod graph;
mod matmul;
pub mod optimizers;
mod shortest_path;
mod sorting;
mod traversal;
pub mod tsp;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::ExprError;
use crate::types::{
    validate_instance, AlgoKind, AlgorithmSpec, InstanceData, ProblemInstance, PsTraj, Solution, StartPoint,
    StartValue, Task, TrajMeta,
};

pub use optimizers::{rosenbrock, rosenbrock_grad, run_optimizer, OptimizerSettings};
pub use tsp::{nearest_neighbor_route, run_tsp_expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("algorithm `{algo}` solves {expected}, instance is {got}")]
    TaskMismatch { algo: String, expected: Task, got: Task },
    #[error("start `{0}` is not admissible for this instance")]
    BadStart(String),
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("iterate left the box [-10, 10]^2 after {} recorded steps", .partial.len())]
    DivergedIterate { partial: Box<PsTraj> },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

type Runner = fn(&ProblemInstance, &StartPoint, u64) -> Result<Vec<Solution>, ZooError>;

/// A registered reference algorithm.
pub struct ZooAlgorithm {
    pub id: &'static str,
    pub task: Task,
    pub pseudocode: &'static str,
    runner: Runner,
}

impl fmt::Debug for ZooAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZooAlgorithm")
            .field("id", &self.id)
            .field("task", &self.task)
            .finish_non_exhaustive()
    }
}

macro_rules! algo {
    ($id:literal, $task:ident, $module:ident :: $code:ident, $run:expr) => {
        ZooAlgorithm {
            id: $id,
            task: Task::$task,
            pseudocode: $module::$code,
            runner: $run,
        }
    };
}

static REGISTRY: &[ZooAlgorithm] = &[
    algo!("bubble_sort", Sort, sorting::BUBBLE, |i, _, _| sorting::run(i, sorting::bubble)),
    algo!("bubble_sort_recursive", Sort, sorting::BUBBLE_REC, |i, _, _| sorting::run(i, sorting::bubble_recursive)),
    algo!("insertion_sort", Sort, sorting::INSERTION, |i, _, _| sorting::run(i, sorting::insertion)),
    algo!("insertion_sort_recursive", Sort, sorting::INSERTION_REC, |i, _, _| sorting::run(i, sorting::insertion_recursive)),
    algo!("selection_sort", Sort, sorting::SELECTION, |i, _, _| sorting::run(i, sorting::selection)),
    algo!("merge_sort", Sort, sorting::MERGE, |i, _, _| sorting::run(i, sorting::merge_recursive)),
    algo!("merge_sort_iterative", Sort, sorting::MERGE_ITER, |i, _, _| sorting::run(i, sorting::merge_iterative)),
    algo!("quick_sort", Sort, sorting::QUICK, |i, _, _| sorting::run(i, sorting::quick)),
    algo!("heap_sort", Sort, sorting::HEAP, |i, _, _| sorting::run(i, sorting::heap)),
    algo!("bfs_left", TreeTraversal, traversal::BFS_LEFT, |i, s, _| traversal::run(i, s, traversal::bfs_left)),
    algo!("bfs_right", TreeTraversal, traversal::BFS_RIGHT, |i, s, _| traversal::run(i, s, traversal::bfs_right)),
    algo!("dfs_left", TreeTraversal, traversal::DFS_LEFT, |i, s, _| traversal::run(i, s, traversal::dfs_left)),
    algo!("dfs_right", TreeTraversal, traversal::DFS_RIGHT, |i, s, _| traversal::run(i, s, traversal::dfs_right)),
    algo!("bfs_recursive", TreeTraversal, traversal::BFS_REC, |i, s, _| traversal::run(i, s, traversal::bfs_recursive)),
    algo!("bfs_iterative", TreeTraversal, traversal::BFS_ITER, |i, s, _| traversal::run(i, s, traversal::bfs_iterative)),
    algo!("dfs_recursive", TreeTraversal, traversal::DFS_REC, |i, s, _| traversal::run(i, s, traversal::dfs_recursive)),
    algo!("dfs_iterative", TreeTraversal, traversal::DFS_ITER, |i, s, _| traversal::run(i, s, traversal::dfs_iterative)),
    algo!("graph_greedy_min", GraphTraversal, graph::GREEDY_MIN, |i, s, _| graph::run(i, s, false)),
    algo!("graph_greedy_max", GraphTraversal, graph::GREEDY_MAX, |i, s, _| graph::run(i, s, true)),
    algo!("first_fit", BinPacking, binpack::FIRST_FIT, |i, _, _| binpack::run(i, binpack::first_fit)),
    algo!("first_fit_indexed", BinPacking, binpack::FIRST_FIT_INDEXED, |i, _, _| binpack::run(i, binpack::first_fit_indexed)),
    algo!("best_fit", BinPacking, binpack::BEST_FIT, |i, _, _| binpack::run(i, binpack::best_fit)),
    algo!("best_fit_reduce", BinPacking, binpack::BEST_FIT_REDUCE, |i, _, _| binpack::run(i, binpack::best_fit_reduce)),
    algo!("binpack_param_a", BinPacking, binpack::PARAM_A, |i, _, _| binpack::run_weighted(i, binpack::WEIGHTS_A)),
    algo!("binpack_param_b", BinPacking, binpack::PARAM_B, |i, _, _| binpack::run_weighted(i, binpack::WEIGHTS_B)),
    algo!("binpack_param_c", BinPacking, binpack::PARAM_C, |i, _, _| binpack::run_weighted(i, binpack::WEIGHTS_C)),
    algo!("binpack_param_d", BinPacking, binpack::PARAM_D, |i, _, _| binpack::run_weighted(i, binpack::WEIGHTS_D)),
    algo!("matmul_ijk", MatMul, matmul::IJK, |i, _, _| matmul::run(i, false)),
    algo!("matmul_jik", MatMul, matmul::JIK, |i, _, _| matmul::run(i, true)),
    algo!("dijkstra", ShortestPath, shortest_path::DIJKSTRA, |i, s, _| shortest_path::run(i, s, shortest_path::dijkstra)),
    algo!("bellman_ford", ShortestPath, shortest_path::BELLMAN_FORD, |i, s, _| shortest_path::run(i, s, shortest_path::bellman_ford)),
    algo!("floyd_slice", ShortestPath, shortest_path::FLOYD, |i, s, _| shortest_path::run(i, s, shortest_path::floyd_slice)),
    algo!("tsp_nearest_neighbor", Tsp, tsp::NEAREST, |i, s, _| tsp::run_greedy(i, s, false)),
    algo!("tsp_farthest_neighbor", Tsp, tsp::FARTHEST, |i, s, _| tsp::run_greedy(i, s, true)),
    algo!("sgd", Rosenbrock, optimizers::SGD, |i, s, seed| optimizers::run_zoo("sgd", i, s, seed)),
    algo!("momentum", Rosenbrock, optimizers::MOMENTUM, |i, s, seed| optimizers::run_zoo("momentum", i, s, seed)),
    algo!("cg", Rosenbrock, optimizers::CG, |i, s, seed| optimizers::run_zoo("cg", i, s, seed)),
    algo!("quasi_newton", Rosenbrock, optimizers::QUASI_NEWTON, |i, s, seed| optimizers::run_zoo("quasi_newton", i, s, seed)),
    algo!("nelder_mead", Rosenbrock, optimizers::NELDER_MEAD, |i, s, seed| optimizers::run_zoo("nelder_mead", i, s, seed)),
    algo!("nelder_mead_adaptive", Rosenbrock, optimizers::NELDER_MEAD_ADAPTIVE, |i, s, seed| optimizers::run_zoo("nelder_mead_adaptive", i, s, seed)),
    algo!("adam", Rosenbrock, optimizers::ADAM, |i, s, seed| optimizers::run_zoo("adam", i, s, seed)),
    algo!("lbfgs_like", Rosenbrock, optimizers::LBFGS, |i, s, seed| optimizers::run_zoo("lbfgs_like", i, s, seed)),
];

/// Every registered algorithm, in registry order.
pub fn registry() -> &'static [ZooAlgorithm] {
    REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static ZooAlgorithm> {
    REGISTRY.iter().find(|a| a.id == id)
}

pub fn ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|a| a.id)
}

/// The eight Rosenbrock optimizers.
pub const OPTIMIZER_IDS: [&str; 8] = [
    "sgd",
    "momentum",
    "cg",
    "quasi_newton",
    "nelder_mead",
    "nelder_mead_adaptive",
    "adam",
    "lbfgs_like",
];

fn check_start(inst: &ProblemInstance, start: &StartPoint) -> Result<(), ZooError> {
    if inst.start_points.iter().any(|s| s == start) {
        Ok(())
    } else {
        Err(ZooError::BadStart(start.id.clone()))
    }
}

fn meta(algorithm_id: &str, inst: &ProblemInstance, start: &StartPoint, seed: u64) -> TrajMeta {
    TrajMeta {
        algorithm_id: algorithm_id.to_string(),
        instance_id: inst.id.clone(),
        start_id: start.id.clone(),
        seed,
    }
}

fn finish(steps: Vec<Solution>, meta: TrajMeta) -> Result<PsTraj, ZooError> {
    PsTraj::new(steps, meta).map_err(|e| ZooError::BadInstance(e.to_string()))
}

/// Runs a registered algorithm and records its trajectory.
pub fn run_zoo(id: &str, inst: &ProblemInstance, start: &StartPoint, seed: u64) -> Result<PsTraj, ZooError> {
    let algo = lookup(id).ok_or_else(|| ZooError::UnknownAlgorithm(id.to_string()))?;
    if algo.task != inst.task {
        return Err(ZooError::TaskMismatch {
            algo: id.to_string(),
            expected: algo.task,
            got: inst.task,
        });
    }
    check_start(inst, start)?;
    validate_instance(inst).map_err(|e| ZooError::BadInstance(e.to_string()))?;
    let steps = (algo.runner)(inst, start, seed).map_err(|e| match e {
        ZooError::DivergedIterate { mut partial } => {
            partial.meta = meta(id, inst, start, seed);
            ZooError::DivergedIterate { partial }
        }
        other => other,
    })?;
    finish(steps, meta(id, inst, start, seed))
}

/// Runs any algorithm spec: zoo entries by id, DSL heuristics through the
/// constructive TSP template.
pub fn run_algorithm(
    spec: &AlgorithmSpec,
    inst: &ProblemInstance,
    start: &StartPoint,
    seed: u64,
) -> Result<PsTraj, ZooError> {
    match &spec.kind {
        AlgoKind::Zoo { name } => run_zoo(name, inst, start, seed),
        AlgoKind::Dsl { expr } => {
            let id = spec.id();
            if inst.task != Task::Tsp {
                return Err(ZooError::TaskMismatch {
                    algo: id,
                    expected: Task::Tsp,
                    got: inst.task,
                });
            }
            check_start(inst, start)?;
            let dist = inst.tsp_dist().expect("task checked");
            let StartValue::Node(s) = start.value else {
                return Err(ZooError::BadStart(start.id.clone()));
            };
            if s as usize >= dist.len() {
                return Err(ZooError::BadStart(start.id.clone()));
            }
            let route = run_tsp_expr(expr, dist, s as usize)?;
            let steps = tsp::prefixes(&route);
            finish(steps, meta(&id, inst, start, seed))
        }
    }
}

fn start_node(inst: &ProblemInstance, start: &StartPoint, n: usize) -> Result<usize, ZooError> {
    match start.value {
        StartValue::Node(s) if (s as usize) < n => Ok(s as usize),
        _ => Err(ZooError::BadStart(format!("{} on {}", start.id, inst.id))),
    }
}

fn bad_data(inst: &ProblemInstance) -> ZooError {
    ZooError::BadInstance(format!("{} carries data for another task", inst.id))
}

fn graph_of(inst: &ProblemInstance) -> Result<(usize, &[crate::types::Edge]), ZooError> {
    match &inst.data {
        InstanceData::Graph { n, edges } => Ok((*n, edges)),
        _ => Err(bad_data(inst)),
    }
}

/// Benchmark pair family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PairType {
    T1,
    T2,
    T3,
    T4,
}

impl PairType {
    pub const ALL: [PairType; 4] = [PairType::T1, PairType::T2, PairType::T3, PairType::T4];
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetPair {
    pub type_tag: PairType,
    pub left: String,
    pub right: String,
    pub case_label: String,
}

const SORTS: [&str; 6] = [
    "bubble_sort",
    "insertion_sort",
    "selection_sort",
    "merge_sort",
    "quick_sort",
    "heap_sort",
];

/// The fixed benchmark registry.
pub fn dataset_pairs() -> Vec<DatasetPair> {
    let mut out = Vec::new();
    let mut push = |t: PairType, l: &str, r: &str| {
        let case = out.iter().filter(|p: &&DatasetPair| p.type_tag == t).count() + 1;
        out.push(DatasetPair {
            type_tag: t,
            left: l.to_string(),
            right: r.to_string(),
            case_label: format!("case{case}"),
        });
    };
    push(PairType::T1, "matmul_ijk", "matmul_jik");
    push(PairType::T1, "bfs_left", "bfs_right");
    push(PairType::T1, "dfs_left", "dfs_right");
    push(PairType::T2, "graph_greedy_min", "graph_greedy_max");
    push(PairType::T2, "binpack_param_a", "binpack_param_b");
    push(PairType::T2, "binpack_param_c", "binpack_param_d");
    push(PairType::T3, "bfs_recursive", "bfs_iterative");
    push(PairType::T3, "bubble_sort_recursive", "bubble_sort");
    push(PairType::T3, "insertion_sort_recursive", "insertion_sort");
    push(PairType::T3, "merge_sort", "merge_sort_iterative");
    push(PairType::T3, "first_fit", "first_fit_indexed");
    push(PairType::T3, "best_fit", "best_fit_reduce");
    for i in 0..SORTS.len() {
        for j in i + 1..SORTS.len() {
            push(PairType::T4, SORTS[i], SORTS[j]);
        }
    }
    push(PairType::T4, "dijkstra", "bellman_ford");
    push(PairType::T4, "dijkstra", "floyd_slice");
    push(PairType::T4, "bellman_ford", "floyd_slice");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub task: Task,
    pub pseudocode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub algorithms: Vec<ManifestEntry>,
    pub pairs: Vec<DatasetPair>,
}

/// Every algorithm id, task and pseudocode plus every benchmark pair.
pub fn manifest() -> DatasetManifest {
    DatasetManifest {
        algorithms: REGISTRY
            .iter()
            .map(|a| ManifestEntry {
                id: a.id.to_string(),
                task: a.task,
                pseudocode: a.pseudocode.trim().to_string(),
            })
            .collect(),
        pairs: dataset_pairs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_unique() {
        let mut ids: Vec<_> = ids().collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn pair_counts() {
        let pairs = dataset_pairs();
        let count = |t| pairs.iter().filter(|p| p.type_tag == t).count();
        assert_eq!(count(PairType::T1), 3);
        assert_eq!(count(PairType::T2), 3);
        assert_eq!(count(PairType::T3), 6);
        assert_eq!(count(PairType::T4), 18);
        for p in &pairs {
            assert_ne!(p.left, p.right);
            assert_eq!(lookup(&p.left).unwrap().task, lookup(&p.right).unwrap().task);
        }
    }

    #[test]
    fn errors() {
        let reg = fixtures::registry();
        let sort = reg.get("sort_0").unwrap();
        let tsp = reg.get("tsp20_0").unwrap();
        let init = StartPoint::initial();
        assert!(matches!(run_zoo("nope", sort, &init, 0), Err(ZooError::UnknownAlgorithm(_))));
        assert!(matches!(run_zoo("bubble_sort", tsp, &init, 0), Err(ZooError::TaskMismatch { .. })));
        assert!(matches!(
            run_zoo("tsp_nearest_neighbor", tsp, &StartPoint::node(3), 0),
            Err(ZooError::BadStart(_))
        ));
    }

    #[test]
    fn every_algorithm_runs_on_its_fixtures_deterministically() {
        let reg = fixtures::registry();
        for algo in registry() {
            for inst in reg.by_task(algo.task) {
                for s in &inst.start_points {
                    let a = run_zoo(algo.id, inst, s, 0).unwrap();
                    let b = run_zoo(algo.id, inst, s, 0).unwrap();
                    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
                    for step in &a.steps {
                        if let Some(r) = inst.label_range() {
                            step.check_labels(r).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pseudocode_nonempty_and_distinct() {
        for a in registry() {
            assert!(!crate::baselines::tokenize(a.pseudocode).is_empty(), "{}", a.id);
        }
        for (i, a) in registry().iter().enumerate() {
            for b in &registry()[i + 1..] {
                assert_ne!(a.pseudocode, b.pseudocode, "{} vs {}", a.id, b.id);
            }
        }
    }
}

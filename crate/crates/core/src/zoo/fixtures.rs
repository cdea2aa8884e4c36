//! Seeded benchmark instances. The generated set is shipped as a JSON asset so
//! that trajectories stay reproducible across dependency upgrades; a test
//! checks the asset against the generator.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matmul::product_norm;
use super::shortest_path::unreached;
use crate::types::{Edge, InstanceData, InstanceRegistry, ProblemInstance, StartPoint, Task};

const SHIPPED: &str = include_str!("../../assets/fixtures.json");
const BASE_SEED: u64 = 0x5EED_2025;

fn round(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

fn rng_for(tag: &str, k: usize) -> ChaCha8Rng {
    let h = tag.bytes().fold(BASE_SEED, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    ChaCha8Rng::seed_from_u64(h.wrapping_add(k as u64))
}

fn inst(id: String, task: Task, data: InstanceData, start_points: Vec<StartPoint>, hint: Option<f64>) -> ProblemInstance {
    ProblemInstance {
        id,
        task,
        data,
        start_points,
        d_max_hint: hint,
    }
}

fn sort_instance(k: usize) -> ProblemInstance {
    let mut rng = rng_for("sort", k);
    let mut values: Vec<u32> = (0..10).collect();
    values.shuffle(&mut rng);
    inst(
        format!("sort_{k}"),
        Task::Sort,
        InstanceData::Sort { values },
        vec![StartPoint::initial()],
        None,
    )
}

fn tree_instance(k: usize) -> ProblemInstance {
    let mut rng = rng_for("tree", k);
    let n = 12;
    let mut children: Vec<[Option<u32>; 2]> = vec![[None, None]];
    for node in 1..n {
        let open: Vec<(usize, usize)> = (0..children.len())
            .flat_map(|p| (0..2).map(move |s| (p, s)))
            .filter(|&(p, s)| children[p][s].is_none())
            .collect();
        let (p, s) = open[rng.random_range(0..open.len())];
        children[p][s] = Some(node);
        children.push([None, None]);
    }
    let mut internal: Vec<u32> = (1..n)
        .filter(|&v| children[v as usize].iter().any(Option::is_some))
        .collect();
    internal.shuffle(&mut rng);
    let mut starts = vec![StartPoint::node(0)];
    let mut picked: Vec<u32> = internal.into_iter().take(2).collect();
    picked.sort_unstable();
    starts.extend(picked.into_iter().map(StartPoint::node));
    inst(format!("tree_{k}"), Task::TreeTraversal, InstanceData::Tree { children }, starts, None)
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<Edge> {
    let mut edges = Vec::new();
    let mut has = vec![vec![false; n]; n];
    let add = |u: usize, v: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<Edge>, has: &mut Vec<Vec<bool>>| {
        has[u][v] = true;
        has[v][u] = true;
        edges.push(Edge {
            u: u as u32,
            v: v as u32,
            w: round(rng.random_range(1.0..10.0), 2),
        });
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        add(u, v, rng, &mut edges, &mut has);
    }
    let mut added = 0;
    while added < extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || has[u][v] {
            continue;
        }
        add(u.min(v), u.max(v), rng, &mut edges, &mut has);
        added += 1;
    }
    edges
}

fn graph_instance(tag: &str, task: Task, k: usize) -> ProblemInstance {
    let mut rng = rng_for(tag, k);
    let n = 12;
    let edges = random_graph(&mut rng, n, 8);
    let hint = (task == Task::ShortestPath).then(|| unreached(&edges) * (n as f64).sqrt());
    inst(
        format!("{tag}_{k}"),
        task,
        InstanceData::Graph { n, edges },
        [0, 4, 8].into_iter().map(StartPoint::node).collect(),
        hint,
    )
}

fn binpack_instance(k: usize) -> ProblemInstance {
    let mut rng = rng_for("binpack", k);
    let items = (0..40).map(|_| round(rng.random_range(0.05..0.6), 2)).collect();
    inst(
        format!("binpack_{k}"),
        Task::BinPacking,
        InstanceData::BinPacking { capacity: 1.0, items },
        vec![StartPoint::initial()],
        None,
    )
}

fn matmul_instance(k: usize) -> ProblemInstance {
    let mut rng = rng_for("matmul", k);
    let mut m = || -> Vec<Vec<f64>> {
        (0..4)
            .map(|_| (0..4).map(|_| round(rng.random_range(0.0..1.0), 3)).collect())
            .collect()
    };
    let (a, b) = (m(), m());
    let hint = product_norm(&a, &b);
    inst(
        format!("matmul_{k}"),
        Task::MatMul,
        InstanceData::MatMul { a, b },
        vec![StartPoint::initial()],
        Some(hint),
    )
}

/// Random Euclidean instance in the unit square.
pub fn tsp_instance(id: String, n: usize, starts: &[u32], rng: &mut impl Rng) -> ProblemInstance {
    let coords: Vec<[f64; 2]> = (0..n)
        .map(|_| [round(rng.random_range(0.0..1.0), 4), round(rng.random_range(0.0..1.0), 4)])
        .collect();
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| (a[0] - b[0]).hypot(a[1] - b[1])).collect())
        .collect();
    inst(
        id,
        Task::Tsp,
        InstanceData::Tsp { coords, dist },
        starts.iter().copied().map(StartPoint::node).collect(),
        None,
    )
}

fn rosenbrock_instance() -> ProblemInstance {
    inst(
        "rosenbrock".into(),
        Task::Rosenbrock,
        InstanceData::Rosenbrock { lo: -2.0, hi: 2.0 },
        vec![
            StartPoint::point("p0", vec![-1.2, 1.0]),
            StartPoint::point("p1", vec![0.5, -0.5]),
        ],
        Some(32f64.sqrt()),
    )
}

/// Regenerates every fixture from its seed.
pub fn generate() -> Vec<ProblemInstance> {
    let mut out = Vec::new();
    out.extend((0..5).map(sort_instance));
    out.extend((0..3).map(tree_instance));
    out.extend((0..2).map(|k| graph_instance("graph", Task::GraphTraversal, k)));
    out.extend((0..2).map(|k| graph_instance("sp_graph", Task::ShortestPath, k)));
    out.extend((0..3).map(binpack_instance));
    out.extend((0..2).map(matmul_instance));
    for k in 0..5 {
        out.push(tsp_instance(format!("tsp20_{k}"), 20, &[0, 7, 14], &mut rng_for("tsp20", k)));
    }
    for k in 0..5 {
        out.push(tsp_instance(format!("tsp12_{k}"), 12, &[0, 6], &mut rng_for("tsp12", k)));
    }
    out.push(rosenbrock_instance());
    out
}

/// Fixture set as JSON, the format of the shipped asset.
pub fn to_json(instances: &[ProblemInstance]) -> String {
    let mut s = serde_json::to_string_pretty(instances).expect("instances serialize");
    s.push('\n');
    s
}

/// The shipped fixture instances.
pub fn registry() -> &'static InstanceRegistry {
    static REG: OnceLock<InstanceRegistry> = OnceLock::new();
    REG.get_or_init(|| {
        let list: Vec<ProblemInstance> = serde_json::from_str(SHIPPED).expect("shipped fixtures parse");
        InstanceRegistry::new(list)
    })
}

/// The 20-city instances behind the TSP benchmark comparisons.
pub fn tsp20_ids() -> Vec<String> {
    (0..5).map(|k| format!("tsp20_{k}")).collect()
}

/// The 12-city instances used by the search harness (exact optima available).
pub fn tsp12_ids() -> Vec<String> {
    (0..5).map(|k| format!("tsp12_{k}")).collect()
}

/// Instances a benchmark comparison runs on for a task.
pub fn benchmark_ids(task: Task) -> Vec<String> {
    match task {
        Task::Tsp => tsp20_ids(),
        _ => registry().by_task(task).map(|i| i.id.clone()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_instance;

    #[test]
    fn shipped_asset_matches_generator() {
        let generated = generate();
        if std::env::var_os("BEHAVESIM_WRITE_FIXTURES").is_some() {
            let path = concat!(env!("CARGO_MANIFEST_DIR"), "/assets/fixtures.json");
            std::fs::write(path, to_json(&generated)).unwrap();
            return;
        }
        let shipped: Vec<ProblemInstance> = serde_json::from_str(SHIPPED).unwrap();
        assert_eq!(shipped, generated);
    }

    #[test]
    fn fixtures_are_valid() {
        for inst in generate() {
            validate_instance(&inst).unwrap_or_else(|e| panic!("{}: {e}", inst.id));
        }
    }

    #[test]
    fn trees_have_twelve_nodes_and_internal_starts() {
        for inst in generate().iter().filter(|i| i.task == Task::TreeTraversal) {
            let InstanceData::Tree { children } = &inst.data else { unreachable!() };
            assert_eq!(children.len(), 12);
            assert_eq!(inst.start_points.len(), 3);
        }
    }
}

//! Single-source shortest paths. The trajectory is the tentative distance
//! vector, starting from the initialization. Unreached nodes carry the total
//! edge weight as a finite stand-in for infinity.

use super::graph::adjacency;
use super::{graph_of, start_node, ZooError};
use crate::types::{Edge, ProblemInstance, Solution, StartPoint};

/// Finite "unreached" value for a graph: the sum of all edge weights.
pub fn unreached(edges: &[Edge]) -> f64 {
    edges.iter().map(|e| e.w).sum::<f64>().max(1.0)
}

type Solver = fn(usize, &[Edge], usize, f64) -> Vec<Vec<f64>>;

pub(super) fn run(inst: &ProblemInstance, start: &StartPoint, solve: Solver) -> Result<Vec<Solution>, ZooError> {
    let (n, edges) = graph_of(inst)?;
    let s = start_node(inst, start, n)?;
    if edges.iter().any(|e| !(e.w >= 0.0) || e.u as usize >= n || e.v as usize >= n) {
        return Err(ZooError::BadInstance(format!("{}: bad edge", inst.id)));
    }
    solve(n, edges, s, unreached(edges))
        .into_iter()
        .map(|v| Solution::real(v).map_err(|e| ZooError::BadInstance(e.to_string())))
        .collect()
}

fn init(n: usize, s: usize, inf: f64) -> Vec<f64> {
    let mut d = vec![inf; n];
    d[s] = 0.0;
    d
}

/// One snapshot per settled node.
pub(super) fn dijkstra(n: usize, edges: &[Edge], s: usize, inf: f64) -> Vec<Vec<f64>> {
    let adj = adjacency(n, edges);
    let mut d = init(n, s, inf);
    let mut settled = vec![false; n];
    let mut steps = vec![d.clone()];
    loop {
        let mut u = None;
        for v in 0..n {
            if !settled[v] && d[v] < inf && u.is_none_or(|b: usize| d[v] < d[b]) {
                u = Some(v);
            }
        }
        let Some(u) = u else { break };
        settled[u] = true;
        for &(v, w) in &adj[u] {
            if d[u] + w < d[v] {
                d[v] = d[u] + w;
            }
        }
        steps.push(d.clone());
    }
    steps
}

/// One snapshot per full pass over the edges that changed something.
pub(super) fn bellman_ford(n: usize, edges: &[Edge], s: usize, inf: f64) -> Vec<Vec<f64>> {
    let mut d = init(n, s, inf);
    let mut steps = vec![d.clone()];
    for _ in 1..n.max(2) {
        let mut changed = false;
        for e in edges {
            let (u, v) = (e.u as usize, e.v as usize);
            if d[u] + e.w < d[v] {
                d[v] = d[u] + e.w;
                changed = true;
            }
            if d[v] + e.w < d[u] {
                d[u] = d[v] + e.w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        steps.push(d.clone());
    }
    steps
}

/// The source row of the Floyd–Warshall matrix after every intermediate node.
pub(super) fn floyd_slice(n: usize, edges: &[Edge], s: usize, inf: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![inf; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in edges {
        let (u, v) = (e.u as usize, e.v as usize);
        if e.w < m[u][v] {
            m[u][v] = e.w;
            m[v][u] = e.w;
        }
    }
    let mut steps = vec![init(n, s, inf)];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
        steps.push(m[s].clone());
    }
    steps
}

pub(super) const DIJKSTRA: &str = r#"
def dijkstra(graph, source):
    dist = {v: INF for v in graph}
    dist[source] = 0
    heap = [(0, source)]
    done = set()
    while heap:
        d, u = heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in graph[u]:
            if d + w < dist[v]:
                dist[v] = d + w
                heappush(heap, (dist[v], v))
    return dist
"#;

pub(super) const BELLMAN_FORD: &str = r#"
def bellman_ford(nodes, edges, source):
    distance = [INF] * len(nodes)
    distance[source] = 0
    for _ in range(len(nodes) - 1):
        updated = False
        for u, v, w in edges:
            if distance[u] + w < distance[v]:
                distance[v] = distance[u] + w
                updated = True
            if distance[v] + w < distance[u]:
                distance[u] = distance[v] + w
                updated = True
        if not updated:
            break
    return distance
"#;

pub(super) const FLOYD: &str = r#"
def floyd_warshall_row(n, weight, source):
    M = [[0 if i == j else weight.get((i, j), INF) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                M[i][j] = min(M[i][j], M[i][k] + M[k][j])
    return M[source]
"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn edges() -> Vec<Edge> {
        let e = |u, v, w| Edge { u, v, w };
        vec![e(0, 1, 4.0), e(0, 2, 1.0), e(2, 1, 2.0), e(1, 3, 1.0), e(2, 3, 5.0)]
    }

    #[test]
    fn all_solvers_agree_on_final_distances() {
        let es = edges();
        let inf = unreached(&es);
        assert_eq!(inf, 13.0);
        let expect = vec![0.0, 3.0, 1.0, 4.0];
        for solve in [dijkstra, bellman_ford, floyd_slice] {
            let t = solve(4, &es, 0, inf);
            assert_eq!(t[0], vec![0.0, inf, inf, inf]);
            assert_eq!(t.last().unwrap(), &expect);
        }
    }

    #[test]
    fn dijkstra_trace() {
        let es = edges();
        let t = dijkstra(4, &es, 0, 13.0);
        assert_eq!(t.len(), 5);
        assert_eq!(t[1], vec![0.0, 4.0, 1.0, 13.0]);
        assert_eq!(t[2], vec![0.0, 3.0, 1.0, 6.0]);
    }
}

//! Greedy graph exploration: from the current node move along the lightest
//! (or heaviest) edge to an unvisited neighbor, backtracking at dead ends.

use super::{graph_of, start_node, ZooError};
use crate::types::{ProblemInstance, Solution, StartPoint};

pub(super) fn adjacency(n: usize, edges: &[crate::types::Edge]) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u as usize].push((e.v as usize, e.w));
        adj[e.v as usize].push((e.u as usize, e.w));
    }
    for row in &mut adj {
        row.sort_by_key(|&(v, _)| v);
    }
    adj
}

pub(super) fn greedy_walk(adj: &[Vec<(usize, f64)>], start: usize, heaviest: bool) -> Vec<u32> {
    let mut visited = vec![false; adj.len()];
    let mut order = vec![start as u32];
    let mut path = vec![start];
    visited[start] = true;
    while let Some(&cur) = path.last() {
        let mut pick: Option<(usize, f64)> = None;
        for &(v, w) in &adj[cur] {
            if visited[v] {
                continue;
            }
            let better = match pick {
                None => true,
                Some((_, bw)) => {
                    if heaviest {
                        w > bw
                    } else {
                        w < bw
                    }
                }
            };
            if better {
                pick = Some((v, w));
            }
        }
        match pick {
            Some((v, _)) => {
                visited[v] = true;
                order.push(v as u32);
                path.push(v);
            }
            None => {
                path.pop();
            }
        }
    }
    order
}

pub(super) fn run(inst: &ProblemInstance, start: &StartPoint, heaviest: bool) -> Result<Vec<Solution>, ZooError> {
    let (n, edges) = graph_of(inst)?;
    let s = start_node(inst, start, n)?;
    let order = greedy_walk(&adjacency(n, edges), s, heaviest);
    Ok(super::tsp::prefixes(&order))
}

pub(super) const GREEDY_MIN: &str = r#"
def greedy_explore(graph, start):
    visited = [start]
    path = [start]
    while path:
        current = path[-1]
        options = [(w, v) for v, w in graph[current] if v not in visited]
        if not options:
            path.pop()
            continue
        w, nxt = min(options)
        visited.append(nxt)
        path.append(nxt)
    return visited
"#;

pub(super) const GREEDY_MAX: &str = r#"
def greedy_explore(graph, start):
    visited = [start]
    path = [start]
    while path:
        current = path[-1]
        options = [(w, v) for v, w in graph[current] if v not in visited]
        if not options:
            path.pop()
            continue
        w, nxt = max(options)
        visited.append(nxt)
        path.append(nxt)
    return visited
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Edge;

    #[test]
    fn walks_follow_weights_and_backtrack() {
        // 0-1 (1), 0-2 (5), 1-3 (2), 2-3 (1)
        let e = |u, v, w| Edge { u, v, w };
        let adj = adjacency(4, &[e(0, 1, 1.0), e(0, 2, 5.0), e(1, 3, 2.0), e(2, 3, 1.0)]);
        assert_eq!(greedy_walk(&adj, 0, false), [0, 1, 3, 2]);
        assert_eq!(greedy_walk(&adj, 0, true), [0, 2, 3, 1]);
        // Star: dead end at each leaf forces backtracking to the hub.
        let star = adjacency(4, &[e(0, 1, 3.0), e(0, 2, 1.0), e(0, 3, 2.0)]);
        assert_eq!(greedy_walk(&star, 0, false), [0, 2, 3, 1]);
    }
}

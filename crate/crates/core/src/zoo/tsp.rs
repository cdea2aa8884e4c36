//! Constructive TSP: greedy reference heuristics and the expression-scored
//! template used by the search space.

use super::{start_node, ZooError};
use crate::expr::{Expr, ExprError, FeatureId};
use crate::types::{ProblemInstance, Solution, StartPoint};

/// Every non-empty prefix of a visit order, one step each.
pub fn prefixes(order: &[u32]) -> Vec<Solution> {
    (1..=order.len())
        .map(|k| Solution {
            payload: crate::types::Payload::PermSeq(order[..k].to_vec()),
        })
        .collect()
}

fn greedy(dist: &[Vec<f64>], start: usize, farthest: bool) -> Vec<u32> {
    let n = dist.len();
    let mut visited = vec![false; n];
    let mut route = vec![start as u32];
    visited[start] = true;
    let mut cur = start;
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for c in 0..n {
            if visited[c] {
                continue;
            }
            let better = match pick {
                None => true,
                Some(b) if farthest => dist[cur][c] > dist[cur][b],
                Some(b) => dist[cur][c] < dist[cur][b],
            };
            if better {
                pick = Some(c);
            }
        }
        let c = pick.expect("unvisited city remains");
        visited[c] = true;
        route.push(c as u32);
        cur = c;
    }
    route
}

pub fn nearest_neighbor_route(dist: &[Vec<f64>], start: usize) -> Vec<u32> {
    greedy(dist, start, false)
}

pub(super) fn run_greedy(inst: &ProblemInstance, start: &StartPoint, farthest: bool) -> Result<Vec<Solution>, ZooError> {
    let dist = inst.tsp_dist().ok_or_else(|| super::bad_data(inst))?;
    let s = start_node(inst, start, dist.len())?;
    Ok(prefixes(&greedy(dist, s, farthest)))
}

/// Closed tour length of a visit order.
pub fn tour_length(dist: &[Vec<f64>], route: &[u32]) -> f64 {
    if route.len() < 2 {
        return 0.0;
    }
    let mut len = 0.0;
    for w in route.windows(2) {
        len += dist[w[0] as usize][w[1] as usize];
    }
    len + dist[*route.last().unwrap() as usize][route[0] as usize]
}

/// Builds a tour from `start`, moving each step to the unvisited city with the
/// lowest expression score (ties to the lowest id). The tour returns to the
/// start, which serves as the destination feature.
pub fn run_tsp_expr(expr: &Expr, dist: &[Vec<f64>], start: usize) -> Result<Vec<u32>, ExprError> {
    let n = dist.len();
    let mut unvisited: Vec<usize> = (0..n).filter(|&c| c != start).collect();
    let mut route = vec![start as u32];
    let mut cur = start;
    let dest = start;
    let mut feats = [0.0; 6];
    while !unvisited.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &c) in unvisited.iter().enumerate() {
            let mut sum = 0.0;
            let mut min = f64::INFINITY;
            for &o in &unvisited {
                if o != c {
                    sum += dist[c][o];
                    min = min.min(dist[c][o]);
                }
            }
            let others = unvisited.len() - 1;
            feats[FeatureId::DistToCurrent.index()] = dist[cur][c];
            feats[FeatureId::DistToDestination.index()] = dist[c][dest];
            feats[FeatureId::MeanDistToUnvisited.index()] = if others > 0 { sum / others as f64 } else { 0.0 };
            feats[FeatureId::MinDistToUnvisited.index()] = if others > 0 { min } else { 0.0 };
            feats[FeatureId::RemainingCount.index()] = unvisited.len() as f64;
            feats[FeatureId::DistCurrentToDestination.index()] = dist[cur][dest];
            let score = expr.eval(&feats)?;
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((pos, score));
            }
        }
        // `unvisited` stays sorted, so the first minimum is the lowest id.
        let (pos, _) = best.expect("non-empty");
        cur = unvisited.remove(pos);
        route.push(cur as u32);
    }
    Ok(route)
}

pub(super) const NEAREST: &str = r#"
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    best_node = None
    best_distance = None
    for node in unvisited_nodes:
        d = distance_matrix[current_node][node]
        if best_distance is None or d < best_distance:
            best_distance = d
            best_node = node
    return best_node

def construct_route(start_node, distance_matrix):
    route = [start_node]
    unvisited_nodes = set(range(len(distance_matrix))) - {start_node}
    while unvisited_nodes:
        next_node = select_next_node(route[-1], start_node, unvisited_nodes, distance_matrix)
        route.append(next_node)
        unvisited_nodes.remove(next_node)
    return route
"#;

pub(super) const FARTHEST: &str = r#"
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    best_node = None
    best_distance = None
    for node in unvisited_nodes:
        d = distance_matrix[current_node][node]
        if best_distance is None or d > best_distance:
            best_distance = d
            best_node = node
    return best_node

def construct_route(start_node, distance_matrix):
    route = [start_node]
    unvisited_nodes = set(range(len(distance_matrix))) - {start_node}
    while unvisited_nodes:
        next_node = select_next_node(route[-1], start_node, unvisited_nodes, distance_matrix)
        route.append(next_node)
        unvisited_nodes.remove(next_node)
    return route
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::UnaryOp;

    fn tri() -> Vec<Vec<f64>> {
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]
    }

    #[test]
    fn nearest_hand_trace() {
        let steps = prefixes(&nearest_neighbor_route(&tri(), 0));
        let got: Vec<&[u32]> = steps.iter().map(|s| s.as_perm().unwrap()).collect();
        assert_eq!(got, vec![&[0][..], &[0, 1], &[0, 1, 2]]);
        assert_eq!(tour_length(&tri(), &[0, 1, 2]), 4.0);
    }

    #[test]
    fn expression_template_reproduces_greedy_heuristics() {
        let d = tri();
        let near = Expr::feature(FeatureId::DistToCurrent);
        let far = Expr::unary(UnaryOp::Neg, near.clone());
        for s in 0..3 {
            assert_eq!(run_tsp_expr(&near, &d, s).unwrap(), greedy(&d, s, false));
            assert_eq!(run_tsp_expr(&far, &d, s).unwrap(), greedy(&d, s, true));
        }
        // A constant score picks cities in id order.
        assert_eq!(run_tsp_expr(&Expr::constant(1.0), &d, 1).unwrap(), [1, 0, 2]);
    }
}

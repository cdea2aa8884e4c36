//! Exact TSP by dynamic programming over subsets.

/// Largest instance solved exactly (2^14 * 15 table entries).
pub const MAX_EXACT: usize = 15;

/// Optimal closed tour length and a tour starting at city 0, or `None` when
/// the instance is larger than [`MAX_EXACT`].
pub fn held_karp(dist: &[Vec<f64>]) -> Option<(f64, Vec<u32>)> {
    let n = dist.len();
    if n > MAX_EXACT {
        return None;
    }
    match n {
        0 => return Some((0.0, vec![])),
        1 => return Some((0.0, vec![0])),
        _ => {}
    }
    // Subsets of cities 1..n; bit k stands for city k + 1.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut cost = vec![f64::INFINITY; (1 << m) * m];
    let mut parent = vec![u8::MAX; (1 << m) * m];
    for k in 0..m {
        cost[(1 << k) * m + k] = dist[0][k + 1];
    }
    for set in 1..=full {
        for last in 0..m {
            if set & (1 << last) == 0 {
                continue;
            }
            let c = cost[set * m + last];
            if !c.is_finite() {
                continue;
            }
            for next in 0..m {
                if set & (1 << next) != 0 {
                    continue;
                }
                let s2 = set | (1 << next);
                let v = c + dist[last + 1][next + 1];
                if v < cost[s2 * m + next] {
                    cost[s2 * m + next] = v;
                    parent[s2 * m + next] = last as u8;
                }
            }
        }
    }
    let (mut best, mut last) = (f64::INFINITY, 0);
    for k in 0..m {
        let v = cost[full * m + k] + dist[k + 1][0];
        if v < best {
            best = v;
            last = k;
        }
    }
    let mut route = Vec::with_capacity(n);
    let mut set = full;
    loop {
        route.push(last as u32 + 1);
        let p = parent[set * m + last];
        set &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    route.push(0);
    route.reverse();
    Some((best, route))
}

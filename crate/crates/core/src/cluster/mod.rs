//! Agglomerative clustering over similarity matrices, island diversity
//! measures and rank correlations between similarity lists.

mod newick;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behave::{BehaveError, TrajComparator};
use crate::types::PsTraj;

pub use newick::{NewickError, NewickTree};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("bad similarity matrix: {0}")]
    BadMatrix(String),
    #[error("k = {k} is outside 1..={n}")]
    BadK { k: usize, n: usize },
    #[error("{0} labels for {1} leaves")]
    LabelCount(usize, usize),
    #[error("an island needs at least 2 members, got {0}")]
    TooFewMembers(usize),
    #[error("island is empty")]
    EmptyIsland,
    #[error("lists differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("rank correlation needs at least 2 paired values")]
    TooShort,
    #[error("one of the lists is constant")]
    DegenerateConstantInput,
    #[error(transparent)]
    Behave(#[from] BehaveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub node: usize,
}

/// Leaves are nodes `0..n`; the i-th merge creates node `n + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaves: Vec<String>,
}

fn check_matrix(m: &[Vec<f64>]) -> Result<(), ClusterError> {
    let n = m.len();
    if n == 0 {
        return Err(ClusterError::BadMatrix("empty".into()));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(ClusterError::BadMatrix(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, &v) in row.iter().enumerate() {
            if !(-TOL..=1.0 + TOL).contains(&v) {
                return Err(ClusterError::BadMatrix(format!("entry ({i}, {j}) = {v} is outside [0, 1]")));
            }
            if (v - m[j][i]).abs() > TOL {
                return Err(ClusterError::BadMatrix(format!("not symmetric at ({i}, {j})")));
            }
        }
        if (row[i] - 1.0).abs() > TOL {
            return Err(ClusterError::BadMatrix(format!("diagonal entry {i} is {}", row[i])));
        }
    }
    Ok(())
}

/// Clusters on the dissimilarity `1 - m`. Each merged cluster takes the lower
/// of the two slots, so a slot index is always the smallest leaf index of its
/// cluster; ties go to the smallest (i, j) slot pair.
pub fn agglomerate(m: &[Vec<f64>], linkage: Linkage, labels: &[String]) -> Result<Dendrogram, ClusterError> {
    check_matrix(m)?;
    let n = m.len();
    if labels.len() != n {
        return Err(ClusterError::LabelCount(labels.len(), n));
    }
    let mut d: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| (1.0 - v).max(0.0)).collect()).collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if active[j] && best.is_none_or(|(bi, bj)| d[i][j] < d[bi][bj]) {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("two active clusters remain");
        let dist = d[i][j];
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let v = match linkage {
                Linkage::Average => (size[i] as f64 * d[i][k] + size[j] as f64 * d[j][k]) / (size[i] + size[j]) as f64,
                Linkage::Complete => d[i][k].max(d[j][k]),
                Linkage::Single => d[i][k].min(d[j][k]),
            };
            d[i][k] = v;
            d[k][i] = v;
        }
        merges.push(Merge {
            left: node[i],
            right: node[j],
            distance: dist,
            node: n + step,
        });
        active[j] = false;
        size[i] += size[j];
        node[i] = n + step;
    }
    Ok(Dendrogram {
        merges,
        leaves: labels.to_vec(),
    })
}

impl Dendrogram {
    /// Leaf sets after undoing the last `k - 1` merges, each sorted, ordered
    /// by smallest leaf.
    pub fn cut_k(&self, k: usize) -> Result<Vec<Vec<usize>>, ClusterError> {
        let n = self.leaves.len();
        if k == 0 || k > n {
            return Err(ClusterError::BadK { k, n });
        }
        let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
        members.resize(n + self.merges.len(), None);
        for m in &self.merges[..n - k] {
            let mut a = members[m.left].take().expect("node merged once");
            a.extend(members[m.right].take().expect("node merged once"));
            members[m.node] = Some(a);
        }
        let mut out: Vec<Vec<usize>> = members
            .into_iter()
            .flatten()
            .map(|mut v| {
                v.sort_unstable();
                v
            })
            .collect();
        out.sort_by_key(|v| v[0]);
        Ok(out)
    }

    /// Merge heights of every node; leaves sit at 0.
    fn heights(&self) -> Vec<f64> {
        let n = self.leaves.len();
        let mut h = vec![0.0; n + self.merges.len()];
        for m in &self.merges {
            h[m.node] = m.distance;
        }
        h
    }

    pub fn to_newick_tree(&self) -> NewickTree {
        let n = self.leaves.len();
        let h = self.heights();
        let mut nodes: Vec<Option<NewickTree>> = self
            .leaves
            .iter()
            .map(|l| {
                Some(NewickTree::Leaf {
                    label: l.clone(),
                    length: None,
                })
            })
            .collect();
        nodes.resize(n + self.merges.len(), None);
        for m in &self.merges {
            let mut kids = Vec::with_capacity(2);
            for c in [m.left, m.right] {
                let mut t = nodes[c].take().expect("node merged once");
                t.set_length(h[m.node] - h[c]);
                kids.push(t);
            }
            nodes[m.node] = Some(NewickTree::Node {
                children: kids,
                length: None,
            });
        }
        nodes.pop().flatten().expect("dendrogram has a root")
    }

    pub fn to_newick(&self) -> String {
        format!("{};", self.to_newick_tree())
    }
}

fn mean_distance(pairs: impl Iterator<Item = Result<f64, BehaveError>>) -> Result<f64, ClusterError> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in pairs {
        sum += 1.0 - s?;
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Mean of `1 - sim` over unordered member pairs of one island.
pub fn intra_island_distance(members: &[&[PsTraj]], cmp: &TrajComparator) -> Result<f64, ClusterError> {
    if members.len() < 2 {
        return Err(ClusterError::TooFewMembers(members.len()));
    }
    let n = members.len();
    mean_distance((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| cmp.behave_sim_traj(members[i], members[j])))
}

/// Mean of `1 - sim` over all cross pairs of two islands.
pub fn inter_island_distance(a: &[&[PsTraj]], b: &[&[PsTraj]], cmp: &TrajComparator) -> Result<f64, ClusterError> {
    if a.is_empty() || b.is_empty() {
        return Err(ClusterError::EmptyIsland);
    }
    mean_distance(a.iter().flat_map(|x| b.iter().map(move |y| cmp.behave_sim_traj(x, y))))
}

/// Same as [`intra_island_distance`] over a precomputed similarity matrix
/// restricted to `members`.
pub fn intra_from_matrix(sim: &[Vec<f64>], members: &[usize]) -> Result<f64, ClusterError> {
    let n = members.len();
    if n < 2 {
        return Err(ClusterError::TooFewMembers(n));
    }
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    mean_distance(pairs.map(|(i, j)| Ok(sim[members[i]][members[j]])))
}

pub fn inter_from_matrix(sim: &[Vec<f64>], a: &[usize], b: &[usize]) -> Result<f64, ClusterError> {
    if a.is_empty() || b.is_empty() {
        return Err(ClusterError::EmptyIsland);
    }
    mean_distance(a.iter().flat_map(|&x| b.iter().map(move |&y| Ok(sim[x][y]))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    KendallTau,
    Spearman,
}

/// Kendall tau-b or Spearman rho (average ranks for ties).
pub fn rank_correlation(a: &[f64], b: &[f64], method: RankMethod) -> Result<f64, ClusterError> {
    if a.len() != b.len() {
        return Err(ClusterError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(ClusterError::TooShort);
    }
    let constant = |x: &[f64]| x.iter().all(|&v| v == x[0]);
    if constant(a) || constant(b) {
        return Err(ClusterError::DegenerateConstantInput);
    }
    Ok(match method {
        RankMethod::KendallTau => kendall_tau_b(a, b),
        RankMethod::Spearman => pearson(&ranks(a), &ranks(b)),
    })
}

fn tie_pairs(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut run = 1usize;
    for i in 1..=s.len() {
        if i < s.len() && s[i] == s[i - 1] {
            run += 1;
        } else {
            total += (run * (run - 1) / 2) as f64;
            run = 1;
        }
    }
    total
}

fn kendall_tau_b(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let (mut conc, mut disc) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            if a[i] == a[j] || b[i] == b[j] {
                continue;
            }
            if (a[i] < a[j]) == (b[i] < b[j]) {
                conc += 1.0;
            } else {
                disc += 1.0;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as f64;
    (conc - disc) / ((n0 - tie_pairs(a)) * (n0 - tie_pairs(b))).sqrt()
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    fn sim_from_dist(d: &[Vec<f64>]) -> Vec<Vec<f64>> {
        d.iter().map(|r| r.iter().map(|v| 1.0 - v).collect()).collect()
    }

    fn random_sim(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(0.0..1.0);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }

    /// Recomputes the full linkage between leaf sets at every step.
    fn naive(m: &[Vec<f64>], linkage: Linkage) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
        let mut clusters: Vec<Vec<usize>> = (0..m.len()).map(|i| vec![i]).collect();
        let mut out = Vec::new();
        while clusters.len() > 1 {
            let link = |a: &[usize], b: &[usize]| {
                let ds: Vec<f64> = a.iter().flat_map(|&x| b.iter().map(move |&y| 1.0 - m[x][y])).collect();
                match linkage {
                    Linkage::Average => ds.iter().sum::<f64>() / ds.len() as f64,
                    Linkage::Complete => ds.iter().cloned().fold(f64::MIN, f64::max),
                    Linkage::Single => ds.iter().cloned().fold(f64::MAX, f64::min),
                }
            };
            let mut best = (0, 1, f64::INFINITY);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let d = link(&clusters[i], &clusters[j]);
                    if d < best.2 {
                        best = (i, j, d);
                    }
                }
            }
            let right = clusters.remove(best.1);
            let left = clusters[best.0].clone();
            clusters[best.0].extend(right.iter().copied());
            out.push((left, right, best.2));
        }
        out
    }

    fn leaf_sets(d: &Dendrogram) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
        let n = d.leaves.len();
        let mut sets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut out = Vec::new();
        for m in &d.merges {
            let (l, r) = (sets[m.left].clone(), sets[m.right].clone());
            let mut both = l.clone();
            both.extend(r.iter().copied());
            sets.push(both);
            out.push((l, r, m.distance));
        }
        out
    }

    #[test]
    fn identical_pair_merges_at_zero() {
        let d = agglomerate(&[vec![1.0, 1.0], vec![1.0, 1.0]], Linkage::Average, &labels(2)).unwrap();
        assert_eq!(d.merges.len(), 1);
        assert_eq!(d.merges[0].distance, 0.0);
        assert_eq!(d.to_newick(), "(a0:0,a1:0);");
    }

    #[test]
    fn closest_pair_first_and_cuts() {
        let m = sim_from_dist(&[vec![0.0, 0.1, 0.9], vec![0.1, 0.0, 0.9], vec![0.9, 0.9, 0.0]]);
        let d = agglomerate(&m, Linkage::Average, &labels(3)).unwrap();
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
        assert!((d.merges[0].distance - 0.1).abs() < 1e-12);
        assert_eq!(d.cut_k(2).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(d.cut_k(1).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(d.cut_k(3).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(d.cut_k(0), Err(ClusterError::BadK { k: 0, n: 3 }));
        assert_eq!(d.cut_k(4), Err(ClusterError::BadK { k: 4, n: 3 }));
    }

    #[test]
    fn matches_naive_agglomeration() {
        for seed in 0..30 {
            let m = random_sim(6, seed);
            for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
                let fast = leaf_sets(&agglomerate(&m, linkage, &labels(6)).unwrap());
                let slow = naive(&m, linkage);
                assert_eq!(fast.len(), slow.len());
                for (f, s) in fast.iter().zip(&slow) {
                    assert_eq!((&f.0, &f.1), (&s.0, &s.1), "seed {seed} {linkage:?}");
                    assert!((f.2 - s.2).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ties_break_to_smallest_pair() {
        let m = vec![vec![1.0; 4]; 4];
        let d = agglomerate(&m, Linkage::Average, &labels(4)).unwrap();
        let pairs: Vec<(usize, usize)> = d.merges.iter().map(|m| (m.left, m.right)).collect();
        assert_eq!(pairs, vec![(0, 1), (4, 2), (5, 3)]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = vec![vec![1.0, 0.2], vec![0.3, 1.0]];
        assert!(matches!(agglomerate(&asym, Linkage::Average, &labels(2)), Err(ClusterError::BadMatrix(_))));
        let diag = vec![vec![0.9, 0.2], vec![0.2, 1.0]];
        assert!(matches!(agglomerate(&diag, Linkage::Average, &labels(2)), Err(ClusterError::BadMatrix(_))));
        let range = vec![vec![1.0, 1.5], vec![1.5, 1.0]];
        assert!(matches!(agglomerate(&range, Linkage::Average, &labels(2)), Err(ClusterError::BadMatrix(_))));
        assert!(matches!(agglomerate(&[], Linkage::Average, &[]), Err(ClusterError::BadMatrix(_))));
    }

    #[test]
    fn island_distances_from_matrix() {
        let m = random_sim(5, 3);
        let members = [0, 1, 3, 4];
        let mut sum = 0.0;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                sum += 1.0 - m[a][b];
            }
        }
        assert!((intra_from_matrix(&m, &members).unwrap() - sum / 6.0).abs() < 1e-12);
        let (a, b) = ([0, 2, 4], [1, 3]);
        let brute: f64 = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| 1.0 - m[x][y]).sum();
        assert!((inter_from_matrix(&m, &a, &b).unwrap() - brute / 6.0).abs() < 1e-12);
        assert_eq!(intra_from_matrix(&m, &[1]), Err(ClusterError::TooFewMembers(1)));
        assert_eq!(inter_from_matrix(&m, &[], &[1]), Err(ClusterError::EmptyIsland));
    }

    fn sign(x: f64) -> f64 {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    fn kendall_oracle(a: &[f64], b: &[f64]) -> f64 {
        let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                let (x, y) = (sign(a[i] - a[j]), sign(b[i] - b[j]));
                num += x * y;
                da += x * x;
                db += y * y;
            }
        }
        num / (da * db).sqrt()
    }

    #[test]
    fn rank_correlation_basics() {
        let x = [0.1, 0.5, 0.3, 0.9];
        let rev = [0.9, 0.1, 0.5, 0.0];
        for m in [RankMethod::KendallTau, RankMethod::Spearman] {
            assert!((rank_correlation(&x, &x, m).unwrap() - 1.0).abs() < 1e-12);
            assert!((rank_correlation(&x, &rev, m).unwrap() + 1.0).abs() < 1e-12);
        }
        assert_eq!(rank_correlation(&x, &[1.0; 4], RankMethod::Spearman), Err(ClusterError::DegenerateConstantInput));
        assert_eq!(rank_correlation(&x, &x[..3], RankMethod::KendallTau), Err(ClusterError::LengthMismatch(4, 3)));
    }

    #[test]
    fn kendall_with_ties_matches_pair_enumeration() {
        let a = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0];
        let b = [2.0, 1.0, 4.0, 3.0, 3.0, 5.0];
        let got = rank_correlation(&a, &b, RankMethod::KendallTau).unwrap();
        assert!((got - kendall_oracle(&a, &b)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn kendall_matches_oracle(v in prop::collection::vec((0u8..4, 0u8..4), 2..9)) {
            let a: Vec<f64> = v.iter().map(|p| p.0 as f64).collect();
            let b: Vec<f64> = v.iter().map(|p| p.1 as f64).collect();
            match rank_correlation(&a, &b, RankMethod::KendallTau) {
                Ok(t) => prop_assert!((t - kendall_oracle(&a, &b)).abs() < 1e-12),
                Err(e) => prop_assert_eq!(e, ClusterError::DegenerateConstantInput),
            }
        }

        #[test]
        fn invariant_under_permutation(seed in 0u64..1000, perm_seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            let n = 7;
            let m = random_sim(n, seed);
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
            let pm: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[p[i]][p[j]]).collect()).collect();
            let canon = |d: &Dendrogram, map: &dyn Fn(usize) -> usize| {
                let mut v: Vec<(Vec<usize>, u64)> = leaf_sets(d)
                    .into_iter()
                    .map(|(l, r, dist)| {
                        let mut s: Vec<usize> = l.iter().chain(&r).map(|&x| map(x)).collect();
                        s.sort_unstable();
                        (s, (dist * 1e9).round() as u64)
                    })
                    .collect();
                v.sort();
                v
            };
            let d1 = agglomerate(&m, Linkage::Average, &labels(n)).unwrap();
            let d2 = agglomerate(&pm, Linkage::Average, &labels(n)).unwrap();
            prop_assert_eq!(canon(&d1, &|x| x), canon(&d2, &|x| p[x]));
        }
    }
}

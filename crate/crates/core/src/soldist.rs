//! Normalized distances between pairs of solutions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{Payload, PayloadKind, ProblemInstance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMaxRule {
    /// `max(|x|, |y|)`, the tight Levenshtein bound.
    #[default]
    MaxLen,
    /// The instance's `d_max_hint`, falling back to `MaxLen` when absent.
    InstanceHint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistConfig {
    #[serde(default)]
    pub d_max_rule: DMaxRule,
    /// Euclidean normalization bound used when the instance gives none.
    #[serde(default = "default_euclid_bound")]
    pub euclid_bound: f64,
}

fn default_euclid_bound() -> f64 {
    1.0
}

impl Default for DistConfig {
    fn default() -> Self {
        DistConfig {
            d_max_rule: DMaxRule::MaxLen,
            euclid_bound: default_euclid_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("payload mismatch: {0} vs {1}")]
    PayloadMismatch(PayloadKind, PayloadKind),
    #[error("real vectors differ in dimension: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("euclidean bound must be positive, got {0}")]
    BadBound(f64),
}

/// Levenshtein distance with unit insert, delete and substitute costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Full Levenshtein table: entry `[i][j]` is the distance between `a[..i]`
/// and `b[..j]`.
pub fn edit_table<T: PartialEq>(a: &[T], b: &[T]) -> Vec<Vec<u32>> {
    let mut t = vec![vec![0u32; b.len() + 1]; a.len() + 1];
    for (j, cell) in t[0].iter_mut().enumerate() {
        *cell = j as u32;
    }
    for i in 1..=a.len() {
        t[i][0] = i as u32;
        for j in 1..=b.len() {
            let sub = t[i - 1][j - 1] + u32::from(a[i - 1] != b[j - 1]);
            t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
        }
    }
    t
}

/// A [`DistConfig`] resolved against one instance's normalization hint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionMetric {
    pub rule: DMaxRule,
    pub seq_bound: Option<f64>,
    pub euclid_bound: f64,
}

impl Default for SolutionMetric {
    fn default() -> Self {
        DistConfig::default().metric(None)
    }
}

impl DistConfig {
    /// Resolves the bounds for solutions of `inst` (or none).
    pub fn metric(&self, inst: Option<&ProblemInstance>) -> SolutionMetric {
        let hint = inst.and_then(|i| i.d_max_hint);
        SolutionMetric {
            rule: self.d_max_rule,
            seq_bound: match self.d_max_rule {
                DMaxRule::MaxLen => None,
                DMaxRule::InstanceHint => hint,
            },
            euclid_bound: hint.unwrap_or(self.euclid_bound),
        }
    }
}

impl SolutionMetric {
    pub fn dist(&self, x: &Solution, y: &Solution) -> Result<f64, DistError> {
        match (&x.payload, &y.payload) {
            (Payload::PermSeq(a), Payload::PermSeq(b)) => Ok(self.seq_dist(a, b)),
            (Payload::CatSeq(a), Payload::CatSeq(b)) => Ok(self.seq_dist(a, b)),
            (Payload::RealVec(a), Payload::RealVec(b)) => {
                if a.len() != b.len() {
                    return Err(DistError::DimensionMismatch(a.len(), b.len()));
                }
                Ok(self.euclid_dist(a, b))
            }
            _ => Err(DistError::PayloadMismatch(x.kind(), y.kind())),
        }
    }

    pub fn seq_dist<T: PartialEq>(&self, a: &[T], b: &[T]) -> f64 {
        self.normalize_edit(edit_distance(a, b), a.len(), b.len())
    }

    /// Normalizes a raw edit distance between sequences of the given lengths.
    #[inline]
    pub fn normalize_edit(&self, d: usize, la: usize, lb: usize) -> f64 {
        if la == 0 && lb == 0 {
            return 0.0;
        }
        let bound = self.seq_bound.unwrap_or(la.max(lb) as f64);
        (d as f64 / bound).min(1.0)
    }

    #[inline]
    pub fn euclid_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (sq.sqrt() / self.euclid_bound).min(1.0)
    }
}

/// Distance in `[0, 1]` between two solutions of the same payload kind.
pub fn dist_solution(
    x: &Solution,
    y: &Solution,
    cfg: &DistConfig,
    inst: Option<&ProblemInstance>,
) -> Result<f64, DistError> {
    if !(cfg.euclid_bound > 0.0) {
        return Err(DistError::BadBound(cfg.euclid_bound));
    }
    cfg.metric(inst).dist(x, y)
}

/// Energy-style discrepancy between two sample sets of solutions: mean cross
/// distance minus half the sum of the mean within-set distances, clamped to
/// `[0, 1]`. Within-set means include the zero self-pairs.
pub fn dist_solution_stochastic(
    xs: &[Solution],
    ys: &[Solution],
    metric: &SolutionMetric,
) -> Result<f64, DistError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(DistError::EmptySamples);
    }
    let mean = |a: &[Solution], b: &[Solution]| -> Result<f64, DistError> {
        let mut s = 0.0;
        for x in a {
            for y in b {
                s += metric.dist(x, y)?;
            }
        }
        Ok(s / (a.len() * b.len()) as f64)
    };
    let cross = mean(xs, ys)?;
    let within = mean(xs, xs)? + mean(ys, ys)?;
    Ok((cross - 0.5 * within).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive recursion over the last symbol of each sequence.
    fn edit_oracle(a: &[u8], b: &[u8]) -> usize {
        match (a.split_last(), b.split_last()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => {
                let sub = edit_oracle(ra, rb) + usize::from(x != y);
                let del = edit_oracle(ra, b) + 1;
                let ins = edit_oracle(a, rb) + 1;
                sub.min(del).min(ins)
            }
        }
    }

    #[test]
    fn edit_examples() {
        assert_eq!(edit_distance(b"abc", b"abc"), 0);
        assert_eq!(edit_distance(b"kitten", b"sitting"), 3);
        assert_eq!(edit_oracle(b"kitten", b"sitting"), 3);
        assert_eq!(edit_distance(&[1, 2, 3], &[3, 2, 1]), 2);
        assert_eq!(edit_oracle(&[1, 2, 3], &[3, 2, 1]), 2);
    }

    #[test]
    fn edit_matches_oracle_exhaustively() {
        fn all_seqs(max_len: usize, alphabet: u8) -> Vec<Vec<u8>> {
            let mut out = vec![vec![]];
            let mut frontier = vec![vec![]];
            for _ in 0..max_len {
                let mut next = Vec::new();
                for s in &frontier {
                    for c in 0..alphabet {
                        let mut t: Vec<u8> = s.clone();
                        t.push(c);
                        next.push(t);
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        }
        let seqs = all_seqs(4, 2);
        for a in &seqs {
            for b in &seqs {
                assert_eq!(edit_distance(a, b), edit_oracle(a, b), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn table_agrees_with_distance() {
        let a = [3u32, 1, 4, 1, 5];
        let b = [2u32, 7, 1, 8];
        let t = edit_table(&a, &b);
        for i in 0..=a.len() {
            for j in 0..=b.len() {
                assert_eq!(t[i][j] as usize, edit_distance(&a[..i], &b[..j]));
            }
        }
    }

    #[test]
    fn normalized_examples() {
        let cfg = DistConfig::default();
        let p = |v: Vec<u32>| Solution::perm(v).unwrap();
        assert_eq!(dist_solution(&p(vec![1, 2, 3]), &p(vec![1, 2, 3]), &cfg, None), Ok(0.0));
        let d = dist_solution(&p(vec![1, 2, 3]), &p(vec![3, 2, 1]), &cfg, None).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
        let r = |v: Vec<f64>| Solution::real(v).unwrap();
        let cfg10 = DistConfig {
            euclid_bound: 10.0,
            ..cfg
        };
        assert_eq!(dist_solution(&r(vec![0.0, 0.0]), &r(vec![3.0, 4.0]), &cfg10, None), Ok(0.5));
        assert_eq!(dist_solution(&r(vec![0.0, 0.0]), &r(vec![30.0, 40.0]), &cfg10, None), Ok(1.0));
        assert!(matches!(
            dist_solution(&p(vec![1]), &r(vec![1.0]), &cfg, None),
            Err(DistError::PayloadMismatch(..))
        ));
        assert_eq!(dist_solution(&p(vec![]), &p(vec![]), &cfg, None), Ok(0.0));
    }

    #[test]
    fn instance_hint_overrides_bounds() {
        use crate::types::{InstanceData, StartPoint, Task};
        let inst = ProblemInstance {
            id: "h".into(),
            task: Task::Rosenbrock,
            data: InstanceData::Rosenbrock { lo: -1.0, hi: 1.0 },
            start_points: vec![StartPoint::initial()],
            d_max_hint: Some(5.0),
        };
        let cfg = DistConfig {
            d_max_rule: DMaxRule::InstanceHint,
            euclid_bound: 100.0,
        };
        let r = |v: Vec<f64>| Solution::real(v).unwrap();
        assert_eq!(dist_solution(&r(vec![0.0, 0.0]), &r(vec![3.0, 4.0]), &cfg, Some(&inst)), Ok(1.0));
        let p = |v: Vec<u32>| Solution::perm(v).unwrap();
        assert_eq!(dist_solution(&p(vec![1, 2]), &p(vec![2, 1]), &cfg, Some(&inst)), Ok(0.4));
    }

    #[test]
    fn stochastic_examples() {
        let m = DistConfig {
            euclid_bound: 10.0,
            ..Default::default()
        }
        .metric(None);
        let r = |v: Vec<f64>| Solution::real(v).unwrap();
        let xs = vec![r(vec![0.0, 0.0]), r(vec![1.0, 2.0])];
        assert_eq!(dist_solution_stochastic(&xs, &xs, &m), Ok(0.0));
        assert_eq!(dist_solution_stochastic(&[r(vec![0.0, 0.0])], &[r(vec![3.0, 4.0])], &m), Ok(0.5));
        assert_eq!(
            dist_solution_stochastic(&[r(vec![0.0, 0.0]), r(vec![0.0, 0.0])], &[r(vec![0.0, 0.0])], &m),
            Ok(0.0)
        );
        assert_eq!(dist_solution_stochastic(&[], &xs, &m), Err(DistError::EmptySamples));
    }

    proptest! {
        #[test]
        fn edit_triangle(a in prop::collection::vec(0u8..3, 0..7),
                         b in prop::collection::vec(0u8..3, 0..7),
                         c in prop::collection::vec(0u8..3, 0..7)) {
            prop_assert!(edit_distance(&a, &c) <= edit_distance(&a, &b) + edit_distance(&b, &c));
        }

        #[test]
        fn normalized_is_metric_like(a in prop::collection::vec(0u32..5, 0..8),
                                     b in prop::collection::vec(0u32..5, 0..8)) {
            let m = SolutionMetric::default();
            let d = m.seq_dist(&a, &b);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, m.seq_dist(&b, &a));
            prop_assert_eq!(d == 0.0, a == b);
        }
    }
}

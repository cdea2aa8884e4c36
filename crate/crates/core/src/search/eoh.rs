//! Dominance-dissimilarity parent selection and population management.
//!
//! Objectives (both minimised): fitness, and behavioral similarity to the
//! incumbent best algorithm. `S[i][j] = -sim(i, j)` off the diagonal,
//! `D[i][j] = 1` when `i` dominates `j`, and `v` holds the column sums of
//! `S * D`, so only dominated members get a negative value.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::SearchError;
use crate::behave::{sim_matrix_trajs, TrajComparator};
use crate::types::{PsTraj, ScoredAlgorithm};

/// `a` is no worse than `b` in both objectives and strictly better in one.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Column sums of the masked negative-similarity matrix.
pub fn dominance_values(objectives: &[(f64, f64)], sim: &[Vec<f64>]) -> Vec<f64> {
    let n = objectives.len();
    let mut v = vec![0.0; n];
    for (j, vj) in v.iter_mut().enumerate() {
        for i in 0..n {
            if i != j && dominates(objectives[i], objectives[j]) {
                *vj -= sim[i][j];
            }
        }
    }
    v
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Indices sorted by `v` descending, ties to the lower index, first `n`.
pub fn top_by_value(v: &[f64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    idx.truncate(n);
    idx
}

/// Objective pairs and the similarity matrix of a population relative to
/// the incumbent best.
pub fn objectives(
    pop: &[ScoredAlgorithm],
    best: &ScoredAlgorithm,
    cmp: &TrajComparator,
) -> Result<(Vec<(f64, f64)>, Vec<Vec<f64>>), SearchError> {
    let fps: Vec<&[PsTraj]> = pop.iter().map(|a| a.trajs.as_slice()).collect();
    let sim = sim_matrix_trajs(&fps, cmp)?;
    let mut obj = Vec::with_capacity(pop.len());
    for a in pop {
        obj.push((a.fitness, cmp.behave_sim_traj(&a.trajs, &best.trajs)?));
    }
    Ok((obj, sim))
}

/// Selection probabilities over the population.
pub fn selection_probs(pop: &[ScoredAlgorithm], best: &ScoredAlgorithm, cmp: &TrajComparator) -> Result<Vec<f64>, SearchError> {
    if pop.is_empty() {
        return Err(SearchError::EmptyPopulation);
    }
    let (obj, sim) = objectives(pop, best, cmp)?;
    Ok(softmax(&dominance_values(&obj, &sim)))
}

/// Draws `d` parent indices with replacement.
pub fn sample_parents<R: Rng + ?Sized>(probs: &[f64], d: usize, rng: &mut R) -> Vec<usize> {
    let dist = WeightedIndex::new(probs).expect("softmax weights are positive");
    (0..d).map(|_| dist.sample(rng)).collect()
}

pub fn eoh_parent_select<R: Rng + ?Sized>(
    pop: &[ScoredAlgorithm],
    best: &ScoredAlgorithm,
    d: usize,
    cmp: &TrajComparator,
    rng: &mut R,
) -> Result<Vec<usize>, SearchError> {
    let probs = selection_probs(pop, best, cmp)?;
    Ok(sample_parents(&probs, d, rng))
}

/// Survivor indices, best value first.
pub fn eoh_manage_population(
    pop: &[ScoredAlgorithm],
    best: &ScoredAlgorithm,
    n: usize,
    cmp: &TrajComparator,
) -> Result<Vec<usize>, SearchError> {
    if pop.len() < n {
        return Err(SearchError::PopTooSmall { have: pop.len(), need: n });
    }
    if pop.is_empty() {
        return Err(SearchError::EmptyPopulation);
    }
    let (obj, sim) = objectives(pop, best, cmp)?;
    Ok(top_by_value(&dominance_values(&obj, &sim), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_member_trace() {
        // A dominates B, sim(A, B) = 0.8.
        let obj = [(0.1, 0.2), (0.3, 0.5)];
        let sim = vec![vec![1.0, 0.8], vec![0.8, 1.0]];
        let v = dominance_values(&obj, &sim);
        assert_eq!(v, vec![0.0, -0.8]);
        let pi = softmax(&v);
        let z = 1.0 + (-0.8f64).exp();
        assert!((pi[0] - 1.0 / z).abs() < 1e-12);
        assert!((pi[1] - (-0.8f64).exp() / z).abs() < 1e-12);
        assert_eq!(top_by_value(&v, 1), vec![0]);
    }

    #[test]
    fn no_dominance_gives_uniform() {
        let obj = [(0.1, 0.9), (0.5, 0.5), (0.9, 0.1)];
        let sim = vec![vec![1.0, 0.3, 0.4], vec![0.3, 1.0, 0.6], vec![0.4, 0.6, 1.0]];
        let v = dominance_values(&obj, &sim);
        assert_eq!(v, vec![0.0; 3]);
        for p in softmax(&v) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(top_by_value(&v, 3), vec![0, 1, 2]);
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let n = 5;
        let probs = vec![1.0 / n as f64; n];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 100_000;
        let mut counts = vec![0usize; n];
        for i in sample_parents(&probs, draws, &mut rng) {
            counts[i] += 1;
        }
        let mean = draws as f64 / n as f64;
        let sd = (draws as f64 * 0.2 * 0.8).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn undominated_survive_first() {
        let obj = [(0.5, 0.5), (0.1, 0.9), (0.6, 0.6), (0.9, 0.1), (0.7, 0.95)];
        let sim: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.5 }).collect()).collect();
        let v = dominance_values(&obj, &sim);
        let keep = top_by_value(&v, 3);
        assert_eq!(keep, vec![0, 1, 3]);
    }
}

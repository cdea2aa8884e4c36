//! Distances and similarities between two problem-solving trajectories.
//!
//! DTW is the primary measure. Mean pairwise distance, ERP and segment
//! cosine are available for comparison studies. All measures run on the
//! preprocessed trajectory (truncation, then sampling).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::soldist::{edit_table, DistConfig, DistError, SolutionMetric};
use crate::types::{Payload, PayloadKind, PsTraj, Solution};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    #[default]
    Dtw,
    MeanPairwise,
    Erp {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_ref: Option<Solution>,
    },
    SegmentCosine,
}

impl Measure {
    pub fn erp() -> Self {
        Measure::Erp { gap_ref: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajSimConfig {
    #[serde(default)]
    pub measure: Measure,
    /// Fraction of trailing steps dropped, in `[0, 1)`.
    #[serde(default)]
    pub truncate_k: f64,
    /// Number of steps skipped between kept steps; 0 keeps all.
    #[serde(default)]
    pub sample_n: usize,
    #[serde(default)]
    pub dist_cfg: DistConfig,
}

impl Default for TrajSimConfig {
    fn default() -> Self {
        TrajSimConfig {
            measure: Measure::Dtw,
            truncate_k: 0.0,
            sample_n: 0,
            dist_cfg: DistConfig::default(),
        }
    }
}

impl TrajSimConfig {
    pub fn with_measure(measure: Measure) -> Self {
        TrajSimConfig {
            measure,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrajSimError> {
        if !(0.0..1.0).contains(&self.truncate_k) {
            return Err(TrajSimError::BadTruncation(self.truncate_k));
        }
        if !(self.dist_cfg.euclid_bound > 0.0) {
            return Err(TrajSimError::Dist(DistError::BadBound(self.dist_cfg.euclid_bound)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajSimError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("payload mismatch: {0} vs {1}")]
    PayloadMismatch(PayloadKind, PayloadKind),
    #[error("measure needs real-vector payloads, got {0}")]
    NonVectorPayload(PayloadKind),
    #[error("trajectory too short: {0} steps")]
    TooShort(usize),
    #[error("trajectory is empty")]
    Empty,
    #[error("truncation fraction {0} outside [0, 1)")]
    BadTruncation(f64),
}

/// Indices surviving truncation of the last `floor(k * len)` steps followed by
/// keeping one step and skipping `n`.
pub fn kept_indices(len: usize, truncate_k: f64, sample_n: usize) -> Vec<usize> {
    let drop = (truncate_k * len as f64).floor() as usize;
    let keep = len.saturating_sub(drop).max(len.min(1));
    (0..keep).step_by(sample_n + 1).collect()
}

pub fn preprocess(t: &PsTraj, cfg: &TrajSimConfig) -> PsTraj {
    let idx = kept_indices(t.len(), cfg.truncate_k, cfg.sample_n);
    PsTraj {
        steps: idx.into_iter().map(|i| t.steps[i].clone()).collect(),
        meta: t.meta.clone(),
    }
}

fn preprocess_refs<'a>(steps: &'a [Solution], cfg: &TrajSimConfig) -> Vec<&'a Solution> {
    kept_indices(steps.len(), cfg.truncate_k, cfg.sample_n)
        .into_iter()
        .map(|i| &steps[i])
        .collect()
}

/// Row-major `m x n` matrix of pairwise solution distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

fn uniform_kind(steps: &[&Solution]) -> Result<PayloadKind, TrajSimError> {
    let kind = steps.first().ok_or(TrajSimError::Empty)?.kind();
    for s in steps {
        if s.kind() != kind {
            return Err(TrajSimError::PayloadMismatch(kind, s.kind()));
        }
    }
    Ok(kind)
}

/// When every step is a prefix of the longest step (constructive
/// trajectories), returns that longest sequence and each step's length.
fn prefix_chain<'a, T: PartialEq>(seqs: &[&'a [T]]) -> Option<(&'a [T], Vec<usize>)> {
    let longest = *seqs.iter().max_by_key(|s| s.len())?;
    let mut lens = Vec::with_capacity(seqs.len());
    for s in seqs {
        if !longest.starts_with(s) {
            return None;
        }
        lens.push(s.len());
    }
    Some((longest, lens))
}

fn chain_costs<T: PartialEq>(
    x: &[&[T]],
    y: &[&[T]],
    metric: &SolutionMetric,
) -> Option<CostMatrix> {
    let (fx, lx) = prefix_chain(x)?;
    let (fy, ly) = prefix_chain(y)?;
    let table = edit_table(fx, fy);
    let mut data = Vec::with_capacity(lx.len() * ly.len());
    for &a in &lx {
        for &b in &ly {
            data.push(metric.normalize_edit(table[a][b] as usize, a, b));
        }
    }
    Some(CostMatrix {
        rows: lx.len(),
        cols: ly.len(),
        data,
    })
}

/// Pairwise cost matrix between two step lists.
///
/// Constructive sequence trajectories take a shortcut: one Levenshtein table
/// of the two final sequences yields the distance of every prefix pair, with
/// results identical to the direct computation.
pub fn cost_matrix(
    x: &[&Solution],
    y: &[&Solution],
    metric: &SolutionMetric,
) -> Result<CostMatrix, TrajSimError> {
    let kx = uniform_kind(x)?;
    let ky = uniform_kind(y)?;
    if kx != ky {
        return Err(TrajSimError::PayloadMismatch(kx, ky));
    }
    let fast = match kx {
        PayloadKind::PermSeq => {
            let sx: Vec<&[u32]> = x.iter().map(|s| perm_slice(s)).collect();
            let sy: Vec<&[u32]> = y.iter().map(|s| perm_slice(s)).collect();
            chain_costs(&sx, &sy, metric)
        }
        PayloadKind::CatSeq => {
            let sx: Vec<&[u16]> = x.iter().map(|s| cat_slice(s)).collect();
            let sy: Vec<&[u16]> = y.iter().map(|s| cat_slice(s)).collect();
            chain_costs(&sx, &sy, metric)
        }
        PayloadKind::RealVec => None,
    };
    if let Some(c) = fast {
        return Ok(c);
    }
    direct_cost_matrix(x, y, metric)
}

/// Cost matrix computed cell by cell with [`SolutionMetric::dist`].
pub fn direct_cost_matrix(
    x: &[&Solution],
    y: &[&Solution],
    metric: &SolutionMetric,
) -> Result<CostMatrix, TrajSimError> {
    let mut data = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            data.push(metric.dist(a, b)?);
        }
    }
    Ok(CostMatrix {
        rows: x.len(),
        cols: y.len(),
        data,
    })
}

fn perm_slice(s: &Solution) -> &[u32] {
    match &s.payload {
        Payload::PermSeq(v) => v,
        _ => unreachable!("kind checked"),
    }
}

fn cat_slice(s: &Solution) -> &[u16] {
    match &s.payload {
        Payload::CatSeq(v) => v,
        _ => unreachable!("kind checked"),
    }
}

/// Classic three-move DTW over a precomputed cost matrix.
pub fn dtw_from_costs(c: &CostMatrix) -> f64 {
    let (m, n) = (c.rows, c.cols);
    if m == 0 || n == 0 {
        return 0.0;
    }
    let mut prev = vec![f64::INFINITY; n];
    let mut cur = vec![f64::INFINITY; n];
    for i in 0..m {
        for j in 0..n {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut b = f64::INFINITY;
                if i > 0 {
                    b = b.min(prev[j]);
                }
                if j > 0 {
                    b = b.min(cur[j - 1]);
                }
                if i > 0 && j > 0 {
                    b = b.min(prev[j - 1]);
                }
                b
            };
            cur[j] = best + c.get(i, j);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n - 1]
}

/// DTW distance: the cheapest monotone alignment of the two step lists.
pub fn dtw_distance(x: &[Solution], y: &[Solution], metric: &SolutionMetric) -> Result<f64, TrajSimError> {
    let xr: Vec<&Solution> = x.iter().collect();
    let yr: Vec<&Solution> = y.iter().collect();
    Ok(dtw_from_costs(&cost_matrix(&xr, &yr, metric)?))
}

/// Step-by-step mean distance over the common prefix length.
pub fn mean_pairwise_distance(
    x: &[Solution],
    y: &[Solution],
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    let xr: Vec<&Solution> = x.iter().collect();
    let yr: Vec<&Solution> = y.iter().collect();
    mean_pairwise_refs(&xr, &yr, metric)
}

fn mean_pairwise_refs(x: &[&Solution], y: &[&Solution], metric: &SolutionMetric) -> Result<f64, TrajSimError> {
    let kx = uniform_kind(x)?;
    let ky = uniform_kind(y)?;
    if kx != ky {
        return Err(TrajSimError::PayloadMismatch(kx, ky));
    }
    let l = x.len().min(y.len());
    let mut s = 0.0;
    for t in 0..l {
        s += metric.dist(x[t], y[t])?;
    }
    Ok(s / l as f64)
}

fn default_gap(kind: PayloadKind, dim: usize) -> Solution {
    match kind {
        PayloadKind::PermSeq => Solution {
            payload: Payload::PermSeq(vec![]),
        },
        PayloadKind::CatSeq => Solution::cat(vec![]),
        PayloadKind::RealVec => Solution {
            payload: Payload::RealVec(vec![0.0; dim]),
        },
    }
}

/// Edit distance with real penalty: substitutions cost the solution distance,
/// gaps cost the distance to `gap_ref` (zero vector or empty sequence by default).
pub fn erp_distance(
    x: &[Solution],
    y: &[Solution],
    gap_ref: Option<&Solution>,
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    let xr: Vec<&Solution> = x.iter().collect();
    let yr: Vec<&Solution> = y.iter().collect();
    erp_refs(&xr, &yr, gap_ref, metric)
}

fn erp_refs(
    x: &[&Solution],
    y: &[&Solution],
    gap_ref: Option<&Solution>,
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    let Some(probe) = x.first().or(y.first()) else {
        return Ok(0.0);
    };
    let kind = probe.kind();
    for s in x.iter().chain(y) {
        if s.kind() != kind {
            return Err(TrajSimError::PayloadMismatch(kind, s.kind()));
        }
    }
    let owned;
    let gap = match gap_ref {
        Some(g) => g,
        None => {
            owned = default_gap(kind, probe.len());
            &owned
        }
    };
    let gx: Vec<f64> = x.iter().map(|s| metric.dist(s, gap)).collect::<Result<_, _>>()?;
    let gy: Vec<f64> = y.iter().map(|s| metric.dist(s, gap)).collect::<Result<_, _>>()?;
    let (m, n) = (x.len(), y.len());
    let mut d = vec![vec![0.0; n + 1]; m + 1];
    for i in 1..=m {
        d[i][0] = d[i - 1][0] + gx[i - 1];
    }
    for j in 1..=n {
        d[0][j] = d[0][j - 1] + gy[j - 1];
    }
    for i in 1..=m {
        for j in 1..=n {
            let sub = d[i - 1][j - 1] + metric.dist(x[i - 1], y[j - 1])?;
            let del = d[i - 1][j] + gx[i - 1];
            let ins = d[i][j - 1] + gy[j - 1];
            d[i][j] = sub.min(del).min(ins);
        }
    }
    Ok(d[m][n])
}

/// Mean cosine between matching step-to-step displacement vectors over the
/// common prefix; zero-length displacements contribute 0.
pub fn segment_cosine_sim(x: &[Solution], y: &[Solution]) -> Result<f64, TrajSimError> {
    let xr: Vec<&Solution> = x.iter().collect();
    let yr: Vec<&Solution> = y.iter().collect();
    segment_cosine_refs(&xr, &yr)
}

fn real_slice(s: &Solution) -> Result<&[f64], TrajSimError> {
    match &s.payload {
        Payload::RealVec(v) => Ok(v),
        _ => Err(TrajSimError::NonVectorPayload(s.kind())),
    }
}

fn segment_cosine_refs(x: &[&Solution], y: &[&Solution]) -> Result<f64, TrajSimError> {
    let kx = uniform_kind(x)?;
    let ky = uniform_kind(y)?;
    if kx != ky {
        return Err(TrajSimError::PayloadMismatch(kx, ky));
    }
    if kx != PayloadKind::RealVec {
        return Err(TrajSimError::NonVectorPayload(kx));
    }
    if x.len() < 2 || y.len() < 2 {
        return Err(TrajSimError::TooShort(x.len().min(y.len())));
    }
    let l = x.len().min(y.len());
    let mut total = 0.0;
    for t in 1..l {
        let (x0, x1) = (real_slice(x[t - 1])?, real_slice(x[t])?);
        let (y0, y1) = (real_slice(y[t - 1])?, real_slice(y[t])?);
        if x1.len() != y1.len() {
            return Err(TrajSimError::Dist(DistError::DimensionMismatch(x1.len(), y1.len())));
        }
        let mut dot = 0.0;
        let mut nx = 0.0;
        let mut ny = 0.0;
        for k in 0..x1.len() {
            let dx = x1[k] - x0[k];
            let dy = y1[k] - y0[k];
            dot += dx * dy;
            nx += dx * dx;
            ny += dy * dy;
        }
        if nx > 0.0 && ny > 0.0 {
            total += (dot / (nx.sqrt() * ny.sqrt())).clamp(-1.0, 1.0);
        }
    }
    Ok(total / (l - 1) as f64)
}

/// Similarity in `[0, 1]` of two trajectories under the configured measure.
///
/// * DTW: `1 - DTW / min(|X|, |Y|)`, clamped.
/// * mean pairwise: `1 - mean distance`.
/// * ERP: `1 - ERP / max(|X|, |Y|)`, clamped.
/// * segment cosine: `(1 + mean cosine) / 2`.
pub fn sim_pstraj(
    x: &PsTraj,
    y: &PsTraj,
    cfg: &TrajSimConfig,
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    sim_steps(&x.steps, &y.steps, cfg, metric)
}

/// [`sim_pstraj`] over bare step lists.
pub fn sim_steps(
    x: &[Solution],
    y: &[Solution],
    cfg: &TrajSimConfig,
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    let xs = preprocess_refs(x, cfg);
    let ys = preprocess_refs(y, cfg);
    if xs.is_empty() || ys.is_empty() {
        return Err(TrajSimError::Empty);
    }
    let sim = match &cfg.measure {
        Measure::Dtw => {
            let dtw = dtw_from_costs(&cost_matrix(&xs, &ys, metric)?);
            1.0 - dtw / xs.len().min(ys.len()) as f64
        }
        Measure::MeanPairwise => 1.0 - mean_pairwise_refs(&xs, &ys, metric)?,
        Measure::Erp { gap_ref } => {
            let erp = erp_refs(&xs, &ys, gap_ref.as_ref(), metric)?;
            1.0 - erp / xs.len().max(ys.len()) as f64
        }
        Measure::SegmentCosine => 0.5 * (1.0 + segment_cosine_refs(&xs, &ys)?),
    };
    Ok(sim.clamp(0.0, 1.0))
}

/// DTW over trajectories whose steps are sample sets (stochastic algorithms),
/// with the energy-style set discrepancy as the cell cost.
pub fn dtw_distance_sampled(
    x: &[Vec<Solution>],
    y: &[Vec<Solution>],
    metric: &SolutionMetric,
) -> Result<f64, TrajSimError> {
    let mut data = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            data.push(crate::soldist::dist_solution_stochastic(a, b, metric)?);
        }
    }
    Ok(dtw_from_costs(&CostMatrix {
        rows: x.len(),
        cols: y.len(),
        data,
    }))
}

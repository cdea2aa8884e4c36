//! Expected trajectory similarity over a fixed set of instances, start points
//! and seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::soldist::SolutionMetric;
use crate::trajsim::{sim_pstraj, TrajSimConfig, TrajSimError};
use crate::types::{AlgorithmSpec, InstanceRegistry, PsTraj, ScoredAlgorithm, Task};
use crate::zoo::{self, ZooError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintPair {
    pub instance_id: String,
    pub start_id: String,
}

/// The (instance, start) pairs and seeds every algorithm is run on.
/// Trajectories are ordered pair-major, seed-minor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintSet {
    pub pairs: Vec<FingerprintPair>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub traj_cfg: TrajSimConfig,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BehaveError {
    #[error("fingerprint set has no (instance, start) pairs")]
    EmptyFingerprint,
    #[error("fingerprint set has no seeds")]
    EmptySeeds,
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("instance `{instance}` has no start `{start}`")]
    UnknownStart { instance: String, start: String },
    #[error("running on ({instance}, {start}): {source}")]
    Run {
        instance: String,
        start: String,
        #[source]
        source: ZooError,
    },
    #[error("comparing trajectory {index}: {source}")]
    Sim {
        index: usize,
        #[source]
        source: TrajSimError,
    },
    #[error("fingerprint lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    BadConfig(#[from] TrajSimError),
}

impl FingerprintSet {
    /// Every start point of every listed instance, with a single seed 0.
    pub fn over_instances(reg: &InstanceRegistry, ids: &[String], traj_cfg: TrajSimConfig) -> Result<Self, BehaveError> {
        let mut pairs = Vec::new();
        for id in ids {
            let inst = reg.get(id).ok_or_else(|| BehaveError::UnknownInstance(id.clone()))?;
            pairs.extend(inst.start_points.iter().map(|s| FingerprintPair {
                instance_id: id.clone(),
                start_id: s.id.clone(),
            }));
        }
        let fp = FingerprintSet {
            pairs,
            seeds: default_seeds(),
            traj_cfg,
        };
        fp.validate()?;
        Ok(fp)
    }

    /// The benchmark fingerprint for a task over the shipped fixtures.
    pub fn for_task(task: Task, traj_cfg: TrajSimConfig) -> Self {
        Self::over_instances(zoo::fixtures::registry(), &zoo::fixtures::benchmark_ids(task), traj_cfg)
            .expect("fixtures cover every task")
    }

    pub fn validate(&self) -> Result<(), BehaveError> {
        if self.pairs.is_empty() {
            return Err(BehaveError::EmptyFingerprint);
        }
        if self.seeds.is_empty() {
            return Err(BehaveError::EmptySeeds);
        }
        self.traj_cfg.validate()?;
        Ok(())
    }

    /// Number of trajectories in a fingerprint.
    pub fn len(&self) -> usize {
        self.pairs.len() * self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that every pair resolves in the registry.
    pub fn resolve(&self, reg: &InstanceRegistry) -> Result<(), BehaveError> {
        for p in &self.pairs {
            let inst = reg
                .get(&p.instance_id)
                .ok_or_else(|| BehaveError::UnknownInstance(p.instance_id.clone()))?;
            if inst.start(&p.start_id).is_none() {
                return Err(BehaveError::UnknownStart {
                    instance: p.instance_id.clone(),
                    start: p.start_id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Runs an algorithm on every fingerprint entry.
pub fn record_fingerprint(spec: &AlgorithmSpec, fp: &FingerprintSet, reg: &InstanceRegistry) -> Result<Vec<PsTraj>, BehaveError> {
    fp.validate()?;
    let mut out = Vec::with_capacity(fp.len());
    for p in &fp.pairs {
        let inst = reg
            .get(&p.instance_id)
            .ok_or_else(|| BehaveError::UnknownInstance(p.instance_id.clone()))?;
        let start = inst.start(&p.start_id).ok_or_else(|| BehaveError::UnknownStart {
            instance: p.instance_id.clone(),
            start: p.start_id.clone(),
        })?;
        for &seed in &fp.seeds {
            let t = zoo::run_algorithm(spec, inst, start, seed).map_err(|source| BehaveError::Run {
                instance: p.instance_id.clone(),
                start: p.start_id.clone(),
                source,
            })?;
            out.push(t);
        }
    }
    Ok(out)
}

/// Compares aligned fingerprints: the trajectory measure plus one solution
/// metric per fingerprint entry (instances may carry their own bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajComparator {
    pub cfg: TrajSimConfig,
    metrics: Vec<SolutionMetric>,
}

impl TrajComparator {
    /// One metric for every entry, ignoring instance hints.
    pub fn uniform(cfg: TrajSimConfig) -> Self {
        let metrics = vec![cfg.dist_cfg.metric(None)];
        TrajComparator { cfg, metrics }
    }

    pub fn for_fingerprint(fp: &FingerprintSet, reg: &InstanceRegistry) -> Result<Self, BehaveError> {
        fp.resolve(reg)?;
        let mut metrics = Vec::with_capacity(fp.len());
        for p in &fp.pairs {
            let m = fp.traj_cfg.dist_cfg.metric(reg.get(&p.instance_id));
            metrics.extend(std::iter::repeat_n(m, fp.seeds.len()));
        }
        Ok(TrajComparator {
            cfg: fp.traj_cfg.clone(),
            metrics,
        })
    }

    fn metric(&self, i: usize) -> &SolutionMetric {
        if self.metrics.len() == 1 {
            &self.metrics[0]
        } else {
            &self.metrics[i]
        }
    }

    /// Per-entry similarities of two aligned fingerprints.
    pub fn entry_sims(&self, a: &[PsTraj], b: &[PsTraj]) -> Result<Vec<f64>, BehaveError> {
        if a.len() != b.len() {
            return Err(BehaveError::LengthMismatch(a.len(), b.len()));
        }
        if a.is_empty() {
            return Err(BehaveError::EmptyFingerprint);
        }
        if self.metrics.len() != 1 && self.metrics.len() != a.len() {
            return Err(BehaveError::LengthMismatch(self.metrics.len(), a.len()));
        }
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| sim_pstraj(x, y, &self.cfg, self.metric(i)).map_err(|source| BehaveError::Sim { index: i, source }))
            .collect()
    }

    /// Mean similarity over aligned fingerprint entries.
    pub fn behave_sim_traj(&self, a: &[PsTraj], b: &[PsTraj]) -> Result<f64, BehaveError> {
        let sims = self.entry_sims(a, b)?;
        Ok(sims.iter().sum::<f64>() / sims.len() as f64)
    }
}

/// Mean trajectory similarity of two aligned fingerprints under a single
/// metric.
pub fn behave_sim_traj(a: &[PsTraj], b: &[PsTraj], cfg: &TrajSimConfig) -> Result<f64, BehaveError> {
    TrajComparator::uniform(cfg.clone()).behave_sim_traj(a, b)
}

/// Expected similarity of two algorithms' trajectories over the fingerprint set.
pub fn behave_sim(a: &AlgorithmSpec, b: &AlgorithmSpec, fp: &FingerprintSet, reg: &InstanceRegistry) -> Result<f64, BehaveError> {
    Ok(breakdown(a, b, fp, reg)?.mean)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSim {
    pub instance_id: String,
    pub start_id: String,
    /// Similarity averaged over seeds.
    pub sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimBreakdown {
    pub mean: f64,
    pub pairs: Vec<PairSim>,
}

/// [`behave_sim`] together with the per-(instance, start) similarities.
pub fn breakdown(a: &AlgorithmSpec, b: &AlgorithmSpec, fp: &FingerprintSet, reg: &InstanceRegistry) -> Result<SimBreakdown, BehaveError> {
    let cmp = TrajComparator::for_fingerprint(fp, reg)?;
    let ta = record_fingerprint(a, fp, reg)?;
    let tb = record_fingerprint(b, fp, reg)?;
    let sims = cmp.entry_sims(&ta, &tb)?;
    let k = fp.seeds.len();
    let pairs = fp
        .pairs
        .iter()
        .zip(sims.chunks(k))
        .map(|(p, s)| PairSim {
            instance_id: p.instance_id.clone(),
            start_id: p.start_id.clone(),
            sim: s.iter().sum::<f64>() / k as f64,
        })
        .collect();
    Ok(SimBreakdown {
        mean: sims.iter().sum::<f64>() / sims.len() as f64,
        pairs,
    })
}

/// Symmetric similarity matrix over fingerprints, unit diagonal. Entries are
/// computed in parallel; each is an independent pure computation.
pub fn sim_matrix_trajs(fps: &[&[PsTraj]], cmp: &TrajComparator) -> Result<Vec<Vec<f64>>, BehaveError> {
    let n = fps.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| cmp.behave_sim_traj(fps[i], fps[j]))
        .collect::<Result<_, _>>()?;
    let mut m = vec![vec![1.0; n]; n];
    for (&(i, j), v) in cells.iter().zip(vals) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

pub fn sim_matrix(algos: &[ScoredAlgorithm], cmp: &TrajComparator) -> Result<Vec<Vec<f64>>, BehaveError> {
    let fps: Vec<&[PsTraj]> = algos.iter().map(|a| a.trajs.as_slice()).collect();
    sim_matrix_trajs(&fps, cmp)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Matrix as CSV with a header row and a label column, in input order.
pub fn matrix_to_csv(labels: &[String], m: &[Vec<f64>]) -> String {
    let mut out = String::from("id");
    for l in labels {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (l, row) in labels.iter().zip(m) {
        out.push_str(&csv_field(l));
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

//! Candidate evaluation: fingerprint trajectories plus mean relative gap to
//! the exact optimum.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::heldkarp::{held_karp, MAX_EXACT};
use crate::behave::{BehaveError, FingerprintSet};
use crate::types::{AlgorithmSpec, InstanceRegistry, ScoredAlgorithm, Task};
use crate::zoo::{self, tsp::tour_length, ZooError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("evaluation exceeded {0:?}")]
    Timeout(Duration),
    #[error(transparent)]
    Run(#[from] ZooError),
    #[error("instance `{0}` is not a TSP instance")]
    NotTsp(String),
    #[error("instance `{0}` has more than {MAX_EXACT} cities, no exact optimum")]
    TooLarge(String),
    #[error(transparent)]
    Fingerprint(#[from] BehaveError),
}

/// Runs candidates on a fixed fingerprint set. Optima are computed once.
#[derive(Debug, Clone)]
pub struct Evaluator {
    fp: FingerprintSet,
    reg: InstanceRegistry,
    optima: BTreeMap<String, f64>,
    timeout: Duration,
}

impl Evaluator {
    pub fn new(fp: FingerprintSet, reg: &InstanceRegistry, timeout: Duration) -> Result<Self, EvalError> {
        fp.validate()?;
        fp.resolve(reg)?;
        let mut optima = BTreeMap::new();
        let mut local = InstanceRegistry::default();
        for p in &fp.pairs {
            if optima.contains_key(&p.instance_id) {
                continue;
            }
            let inst = reg.get(&p.instance_id).expect("resolved");
            if inst.task != Task::Tsp {
                return Err(EvalError::NotTsp(inst.id.clone()));
            }
            let dist = inst.tsp_dist().ok_or_else(|| EvalError::NotTsp(inst.id.clone()))?;
            let (opt, _) = held_karp(dist).ok_or_else(|| EvalError::TooLarge(inst.id.clone()))?;
            optima.insert(inst.id.clone(), opt);
            local.insert(inst.clone());
        }
        Ok(Evaluator {
            fp,
            reg: local,
            optima,
            timeout,
        })
    }

    pub fn fingerprint(&self) -> &FingerprintSet {
        &self.fp
    }

    pub fn registry(&self) -> &InstanceRegistry {
        &self.reg
    }

    pub fn optimum(&self, instance_id: &str) -> Option<f64> {
        self.optima.get(instance_id).copied()
    }

    /// Records the fingerprint trajectories and scores the final tours:
    /// relative gaps are averaged over each instance's entries, then over
    /// instances.
    pub fn evaluate(&self, spec: &AlgorithmSpec, birth: u64) -> Result<ScoredAlgorithm, EvalError> {
        let started = Instant::now();
        let mut trajs = Vec::with_capacity(self.fp.len());
        let mut gaps: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
        for p in &self.fp.pairs {
            let inst = self.reg.get(&p.instance_id).expect("resolved at construction");
            let start = inst.start(&p.start_id).expect("resolved at construction");
            for &seed in &self.fp.seeds {
                let t = zoo::run_algorithm(spec, inst, start, seed)?;
                let route = t.last().as_perm().expect("TSP trajectories are permutations");
                let opt = self.optima[&p.instance_id];
                let gap = (tour_length(inst.tsp_dist().expect("TSP"), route) - opt) / opt;
                let e = gaps.entry(&p.instance_id).or_default();
                e.0 += gap.max(0.0);
                e.1 += 1;
                trajs.push(t);
                if started.elapsed() > self.timeout {
                    return Err(EvalError::Timeout(self.timeout));
                }
            }
        }
        let fitness = gaps.values().map(|(s, c)| s / *c as f64).sum::<f64>() / gaps.len() as f64;
        Ok(ScoredAlgorithm {
            spec: spec.clone(),
            fitness,
            trajs,
            eval_count_at_birth: birth,
        })
    }
}

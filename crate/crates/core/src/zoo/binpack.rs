//! Online bin packing. One step per placed item: the bin labels assigned so far.

use super::{bad_data, ZooError};
use crate::types::{InstanceData, ProblemInstance, Solution};

const EPS: f64 = 1e-9;

type Packer = fn(&[f64], f64) -> Vec<u16>;

pub(super) fn run(inst: &ProblemInstance, pack: Packer) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::BinPacking { capacity, items } = &inst.data else {
        return Err(bad_data(inst));
    };
    if items.iter().any(|&w| w > *capacity + EPS) {
        return Err(ZooError::BadInstance(format!("{}: item larger than capacity", inst.id)));
    }
    let labels = pack(items, *capacity);
    Ok((1..=labels.len()).map(|k| Solution::cat(labels[..k].to_vec())).collect())
}

pub(super) fn run_weighted(inst: &ProblemInstance, w: (f64, f64)) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::BinPacking { capacity, items } = &inst.data else {
        return Err(bad_data(inst));
    };
    let labels = weighted(items, *capacity, w);
    Ok((1..=labels.len()).map(|k| Solution::cat(labels[..k].to_vec())).collect())
}

pub(super) fn first_fit(items: &[f64], cap: f64) -> Vec<u16> {
    let mut remaining: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(items.len());
    for &w in items {
        let b = match remaining.iter().position(|&r| r + EPS >= w) {
            Some(b) => b,
            None => {
                remaining.push(cap);
                remaining.len() - 1
            }
        };
        remaining[b] -= w;
        out.push(b as u16);
    }
    out
}

pub(super) fn first_fit_indexed(items: &[f64], cap: f64) -> Vec<u16> {
    let mut free: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(items.len());
    for &w in items {
        let mut target = free.len();
        let mut k = 0;
        while k < free.len() {
            if free[k] + EPS >= w {
                target = k;
                break;
            }
            k += 1;
        }
        if target == free.len() {
            free.push(cap);
        }
        free[target] -= w;
        out.push(target as u16);
    }
    out
}

pub(super) fn best_fit(items: &[f64], cap: f64) -> Vec<u16> {
    let mut remaining: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(items.len());
    for &w in items {
        let mut best: Option<usize> = None;
        for (b, &r) in remaining.iter().enumerate() {
            if r + EPS >= w && best.is_none_or(|k| r < remaining[k]) {
                best = Some(b);
            }
        }
        let b = best.unwrap_or_else(|| {
            remaining.push(cap);
            remaining.len() - 1
        });
        remaining[b] -= w;
        out.push(b as u16);
    }
    out
}

pub(super) fn best_fit_reduce(items: &[f64], cap: f64) -> Vec<u16> {
    items
        .iter()
        .fold((Vec::<f64>::new(), Vec::new()), |(mut remaining, mut out), &w| {
            let b = remaining
                .iter()
                .enumerate()
                .filter(|(_, &r)| r + EPS >= w)
                .reduce(|acc, cur| if cur.1 < acc.1 { cur } else { acc })
                .map(|(b, _)| b)
                .unwrap_or_else(|| {
                    remaining.push(cap);
                    remaining.len() - 1
                });
            remaining[b] -= w;
            out.push(b as u16);
            (remaining, out)
        })
        .1
}

/// Weighted scoring: `-(remaining - item) * w1 + items_in_bin * w2`,
/// highest score wins among bins that fit.
pub(super) fn weighted(items: &[f64], cap: f64, (w1, w2): (f64, f64)) -> Vec<u16> {
    let mut remaining: Vec<f64> = Vec::new();
    let mut count: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(items.len());
    for &w in items {
        let mut best: Option<(usize, f64)> = None;
        for (b, &r) in remaining.iter().enumerate() {
            if r + EPS < w {
                continue;
            }
            let score = -(r - w) * w1 + count[b] as f64 * w2;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((b, score));
            }
        }
        let b = match best {
            Some((b, _)) => b,
            None => {
                remaining.push(cap);
                count.push(0);
                remaining.len() - 1
            }
        };
        remaining[b] -= w;
        count[b] += 1;
        out.push(b as u16);
    }
    out
}

pub(super) const WEIGHTS_A: (f64, f64) = (1.0, 0.02);
pub(super) const WEIGHTS_B: (f64, f64) = (1.0, 0.1);
pub(super) const WEIGHTS_C: (f64, f64) = (1.0, 0.05);
pub(super) const WEIGHTS_D: (f64, f64) = (1.0, 0.3);

pub(super) const FIRST_FIT: &str = r#"
def first_fit(items, capacity):
    bins = []
    assignment = []
    for item in items:
        for b, space in enumerate(bins):
            if space >= item:
                bins[b] -= item
                assignment.append(b)
                break
        else:
            bins.append(capacity - item)
            assignment.append(len(bins) - 1)
    return assignment
"#;

pub(super) const FIRST_FIT_INDEXED: &str = r#"
def first_fit_indexed(weights, cap):
    loads = []
    labels = []
    for w in weights:
        target = len(loads)
        k = 0
        while k < len(loads):
            if cap - loads[k] >= w:
                target = k
                break
            k = k + 1
        if target == len(loads):
            loads.append(0)
        loads[target] = loads[target] + w
        labels.append(target)
    return labels
"#;

pub(super) const BEST_FIT: &str = r#"
def best_fit(items, capacity):
    bins = []
    assignment = []
    for item in items:
        best = None
        for b, space in enumerate(bins):
            if space >= item and (best is None or space < bins[best]):
                best = b
        if best is None:
            bins.append(capacity)
            best = len(bins) - 1
        bins[best] -= item
        assignment.append(best)
    return assignment
"#;

pub(super) const BEST_FIT_REDUCE: &str = r#"
def best_fit_reduce(weights, cap):
    def place(state, w):
        free, labels = state
        fits = [(room, k) for k, room in enumerate(free) if room >= w]
        k = reduce(lambda a, c: c if c[0] < a[0] else a, fits)[1] if fits else len(free)
        if k == len(free):
            free = free + [cap]
        free[k] -= w
        return free, labels + [k]
    return reduce(place, weights, ([], []))[1]
"#;

pub(super) const PARAM_A: &str = r#"
def score_bins(item, bins, counts):
    scores = []
    for b, space in enumerate(bins):
        if space >= item:
            scores.append(-(space - item) * 1.0 + counts[b] * 0.02)
        else:
            scores.append(-inf)
    return scores
"#;

pub(super) const PARAM_B: &str = r#"
def score_bins(item, bins, counts):
    scores = []
    for b, space in enumerate(bins):
        if space >= item:
            scores.append(-(space - item) * 1.0 + counts[b] * 0.1)
        else:
            scores.append(-inf)
    return scores
"#;

pub(super) const PARAM_C: &str = r#"
def score_bins(item, bins, counts):
    scores = []
    for b, space in enumerate(bins):
        if space >= item:
            scores.append(-(space - item) * 1.0 + counts[b] * 0.05)
        else:
            scores.append(-inf)
    return scores
"#;

pub(super) const PARAM_D: &str = r#"
def score_bins(item, bins, counts):
    scores = []
    for b, space in enumerate(bins):
        if space >= item:
            scores.append(-(space - item) * 1.0 + counts[b] * 0.3)
        else:
            scores.append(-inf)
    return scores
"#;

//! Seeded structural variation of scoring expressions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::expr::{BinaryOp, Expr, UnaryOp, DEFAULT_MAX_DEPTH};

/// Depth of fresh subtrees grown by subtree replacement.
const SUBTREE_DEPTH: usize = 4;
const ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    Subtree,
    Constant,
    OperatorSwap,
    Crossover,
}

impl MutationKind {
    pub const ALL: [MutationKind; 4] = [
        MutationKind::Subtree,
        MutationKind::Constant,
        MutationKind::OperatorSwap,
        MutationKind::Crossover,
    ];
}

/// Offspring generator. One RNG stream per mutator, so a fixed seed and
/// call sequence gives identical offspring.
#[derive(Debug, Clone)]
pub struct Mutator {
    rng: ChaCha8Rng,
    max_depth: usize,
}

fn rounded(c: f64) -> f64 {
    (c * 1000.0).round() / 1000.0
}

fn preorder_indices(e: &Expr, pred: impl Fn(&Expr) -> bool) -> Vec<usize> {
    (0..e.size()).filter(|&i| pred(e.node(i).expect("index in range"))).collect()
}

impl Mutator {
    pub fn new(seed: u64) -> Self {
        Self::with_max_depth(seed, DEFAULT_MAX_DEPTH)
    }

    pub fn with_max_depth(seed: u64, max_depth: usize) -> Self {
        Mutator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_depth: max_depth.max(1),
        }
    }

    /// One offspring of `parents` (first parent is the one mutated; crossover
    /// draws donor material from the second, or the first if alone).
    pub fn offspring(&mut self, parents: &[&Expr]) -> (MutationKind, Expr) {
        assert!(!parents.is_empty(), "offspring needs a parent");
        let kind = MutationKind::ALL[self.rng.random_range(0..MutationKind::ALL.len())];
        for _ in 0..ATTEMPTS {
            if let Some(child) = self.apply(kind, parents) {
                if child.depth() <= self.max_depth {
                    return (kind, child);
                }
            }
        }
        // Replacing a node with a leaf never deepens the tree.
        let mut child = parents[0].clone();
        let i = self.rng.random_range(0..child.size());
        *child.node_mut(i).expect("index in range") = Expr::random_leaf(&mut self.rng);
        (MutationKind::Subtree, child)
    }

    pub fn apply(&mut self, kind: MutationKind, parents: &[&Expr]) -> Option<Expr> {
        let base = parents[0];
        match kind {
            MutationKind::Subtree => Some(self.subtree(base)),
            MutationKind::Constant => {
                let consts = preorder_indices(base, |n| matches!(n, Expr::Const(_)));
                if consts.is_empty() {
                    return Some(self.subtree(base));
                }
                let mut child = base.clone();
                let i = consts[self.rng.random_range(0..consts.len())];
                if let Some(Expr::Const(c)) = child.node_mut(i) {
                    let sigma = if *c == 0.0 { 0.1 } else { 0.2 * c.abs() };
                    let noise = Normal::new(0.0, sigma).expect("positive sigma").sample(&mut self.rng);
                    *c = rounded(*c + noise);
                }
                Some(child)
            }
            MutationKind::OperatorSwap => {
                let ops = preorder_indices(base, |n| matches!(n, Expr::Unary { .. } | Expr::Binary { .. }));
                if ops.is_empty() {
                    return Some(self.subtree(base));
                }
                let mut child = base.clone();
                let i = ops[self.rng.random_range(0..ops.len())];
                match child.node_mut(i).expect("index in range") {
                    Expr::Unary { op, .. } => {
                        let others: Vec<UnaryOp> = UnaryOp::ALL.into_iter().filter(|o| o != op).collect();
                        *op = others[self.rng.random_range(0..others.len())];
                    }
                    Expr::Binary { op, .. } => {
                        let others: Vec<BinaryOp> = BinaryOp::ALL.into_iter().filter(|o| o != op).collect();
                        *op = others[self.rng.random_range(0..others.len())];
                    }
                    _ => unreachable!("filtered to operator nodes"),
                }
                Some(child)
            }
            MutationKind::Crossover => {
                let donor = parents.get(1).copied().unwrap_or(base);
                Some(crossover(&mut self.rng, base, donor))
            }
        }
    }

    fn subtree(&mut self, base: &Expr) -> Expr {
        let mut child = base.clone();
        let i = self.rng.random_range(0..child.size());
        let depth_here = child.node_depth(i).expect("index in range");
        let room = (self.max_depth + 1).saturating_sub(depth_here).clamp(1, SUBTREE_DEPTH);
        *child.node_mut(i).expect("index in range") = Expr::random(&mut self.rng, room);
        child
    }
}

/// Replaces a random node of `a` with a random subtree of `b`.
pub fn crossover<R: Rng + ?Sized>(rng: &mut R, a: &Expr, b: &Expr) -> Expr {
    let mut child = a.clone();
    let i = rng.random_range(0..a.size());
    let j = rng.random_range(0..b.size());
    *child.node_mut(i).expect("index in range") = b.node(j).expect("index in range").clone();
    child
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FeatureId;
    use proptest::prelude::*;

    fn sample() -> Expr {
        Expr::binary(
            BinaryOp::Add,
            Expr::feature(FeatureId::DistToCurrent),
            Expr::unary(UnaryOp::Neg, Expr::constant(0.5)),
        )
    }

    #[test]
    fn seeded_offspring_repeat() {
        let p = sample();
        let run = |seed| {
            let mut m = Mutator::new(seed);
            (0..20).map(|_| m.offspring(&[&p]).1).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn every_kind_changes_something_eventually() {
        let p = sample();
        let mut m = Mutator::new(1);
        for kind in MutationKind::ALL {
            let q = Expr::binary(BinaryOp::Mul, Expr::constant(2.0), Expr::feature(FeatureId::RemainingCount));
            let changed = (0..20).any(|_| m.apply(kind, &[&p, &q]).unwrap() != p);
            assert!(changed, "{kind:?}");
        }
    }

    #[test]
    fn constant_perturbation_only_moves_constants() {
        let p = sample();
        let mut m = Mutator::new(3);
        let c = m.apply(MutationKind::Constant, &[&p]).unwrap();
        let Expr::Binary { left, right, .. } = &c else { panic!() };
        assert_eq!(**left, Expr::feature(FeatureId::DistToCurrent));
        assert!(matches!(&**right, Expr::Unary { op: UnaryOp::Neg, child } if matches!(**child, Expr::Const(_))));
    }

    proptest! {
        #[test]
        fn offspring_respect_depth(seed in 0u64..500, pseed in 0u64..500) {
            let mut r = ChaCha8Rng::seed_from_u64(pseed);
            let a = Expr::random(&mut r, 8);
            let b = Expr::random(&mut r, 8);
            let mut m = Mutator::new(seed);
            for _ in 0..5 {
                let (_, child) = m.offspring(&[&a, &b]);
                prop_assert!(child.depth() <= DEFAULT_MAX_DEPTH);
                // Display text stays parseable.
                prop_assert_eq!(crate::expr::parse_sexpr(&child.to_sexpr()).unwrap().to_sexpr(), child.to_sexpr());
            }
        }

        #[test]
        fn self_crossover_is_a_valid_tree(seed in 0u64..500) {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let a = Expr::random(&mut r, 5);
            let child = crossover(&mut r, &a, &a);
            prop_assert!(child.size() >= 1);
            prop_assert!(child.depth() <= 2 * a.depth());
            prop_assert!(crate::expr::parse_sexpr(&child.to_sexpr()).is_ok());
        }
    }
}

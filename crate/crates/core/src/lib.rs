//! Behavioral similarity of iterative algorithms.
//!
//! Algorithms are compared through their problem-solving trajectories: the
//! sequence of intermediate solutions they produce on a problem instance.
//! Trajectories are aligned with dynamic time warping over normalized
//! solution distances, and the resulting similarity drives clustering and
//! diversity-aware heuristic search.

pub mod baselines;
pub mod behave;
pub mod cluster;
pub mod expr;
pub mod search;
pub mod soldist;
pub mod trajsim;
pub mod types;
pub mod zoo;

pub use expr::{Expr, FeatureId};
pub use types::{AlgorithmSpec, ProblemInstance, PsTraj, ScoredAlgorithm, Solution};

//! Solvers for action-robust MDPs.
//!
//! The agent's action is perturbed by an adversary, either by outright
//! replacement with probability `alpha` (the probabilistic criterion, `pr`)
//! or by convex mixing of the two actions (the noisy criterion, `nr`). Both
//! cases are solved as two-player zero-sum Markov games: exact evaluation,
//! value/policy iteration with optional soft adversary updates, deterministic
//! policy-gradient training for the noisy case, and robustness sweeps.

pub mod error;
pub mod eval;
pub mod game;
pub mod grad;
pub mod matrix_game;
pub mod model;
pub mod par;
pub mod solve;

pub use error::{Error, Result};
pub use game::{JointPolicy, RobustGame, RobustKind, ValueFn};
pub use model::{ActionModel, MdpModel, Policy};

//! Probability-simplex and finite-MDP primitives.
//!
//! The forwarding strategy keeps one [`ProbabilityVector`] per content class. [`FiniteMdp`] and
//! its value iteration are not on the forwarding path; they are used for analysis and as test
//! oracles.

mod mdp;
pub(crate) mod simplex;

pub use mdp::{FiniteMdp, ValueSolution};
pub use simplex::{normalize, ProbabilityVector};

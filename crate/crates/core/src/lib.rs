//! Discrete-event Named Data Networking simulator built around the DRR-MDPF forwarding
//! strategy: per-interface reward estimates drive a learning automaton that picks egress faces,
//! and a Deficit Round Robin scheduler shares each face's bandwidth between content classes.
//!
//! The numeric core ([`prob`], [`strategy`]) is generic over `f32` / `f64`; the simulator runs
//! on `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod drr;
pub mod error;
pub mod metrics;
pub mod node;
pub mod packet;
pub mod prob;
pub mod scalar;
pub mod sim;
pub mod strategy;

pub use baselines::{baseline_select, BaselineKind, FaceStats};
pub use config::{dump_scenario, load_scenario, parse_override, parse_scenario, parse_scenario_with};
pub use drr::{DrrScheduler, Enqueue};
pub use error::{Error, Result};
pub use metrics::{coefficient_of_variation, finalize_report, write_report, MetricsReport, ReportFormat};
pub use node::{NdnNode, StrategyKind};
pub use packet::{ClassId, Name, Packet, PacketKind};
pub use prob::{normalize, FiniteMdp, ProbabilityVector};
pub use scalar::Scalar;
pub use sim::{load_topology, run_scenario, Scenario, Topology};
pub use strategy::{RewardMode, SelectionMode, StrategyParams, StrategyTable};

pub type Probabilities = ProbabilityVector<f64>;
pub type Mdp = FiniteMdp<f64>;
pub type Strategy = StrategyTable<f64>;
pub type Params = StrategyParams<f64>;

pub type Probabilities32 = ProbabilityVector<f32>;
pub type Mdp32 = FiniteMdp<f32>;
pub type Strategy32 = StrategyTable<f32>;

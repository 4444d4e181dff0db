//! Cyber-insurance pricing for smart homes.
//!
//! A home is described by a Bayesian attack graph over its vulnerabilities.
//! Exploitation states are propagated with a noisy-OR rule, each business
//! line maps a state to a conditional loss law, and the resulting loss
//! samples are priced under four premium principles. Portfolio simulation
//! and a deductible/premium search sit on top of that.
//!
//! The modules follow the data flow:
//!
//! * [`attack_graph`]: the vulnerability DAG, exact joint enumeration and sampling.
//! * [`loss_models`]: per-line conditional loss laws with closed-form moments.
//! * [`simulation`]: repeated single-home runs and summary statistics.
//! * [`pricing`]: retention, premium principles and calibration.
//! * [`portfolio`]: many homes over many replications, profit and loss ratio.
//! * [`strategy_search`]: deductible search and premium solving under LR targets.
//! * [`scenario_io`]: scenario files, CSV export, manifests and the CLI.

pub mod attack_graph;
pub mod loss_models;
pub mod numeric;
pub mod portfolio;
pub mod pricing;
pub mod rng;
pub mod scenario_io;
pub mod simulation;
pub mod stats;
pub mod strategy_search;

mod error;

pub use attack_graph::{AttackGraph, Edge, ExploitNetwork, JointDistribution, NodeId, StateVector, VulnNode};
pub use error::{Error, Result};
pub use loss_models::{BusinessLine, ConditionalLoss, DistributionSpec, RiskModel};
pub use portfolio::{PortfolioResult, PortfolioSpec, RetentionBasis};
pub use pricing::{Policy, PrincipleFamily, PrincipleParam};
pub use scenario_io::Scenario;
pub use simulation::SimulationResult;
pub use stats::SummaryStats;
pub use strategy_search::LrStrategy;

//! Exact simulation of the entanglement-controlled delayed-choice
//! interferometer, conditional-independence extraction, IC* discovery and
//! exhaustive enumeration of latent-variable causal structures.
//!
//! The pipeline is
//! [`qsim`] → [`distributions`] → [`discovery`] → [`enumeration`], with
//! [`graphs`] supplying DAGs, d-separation and factorized joints, and
//! [`report`] / [`cli`] tying it together.

pub mod cli;
pub mod discovery;
pub mod distributions;
pub mod enumeration;
pub mod graphs;
pub mod json;
pub mod qsim;
pub mod report;

pub use discovery::{ic_star, CiOracle, CiSetOracle, DistributionOracle, Pattern};
pub use distributions::{CiRelation, CiSet, JointDistribution};
pub use enumeration::{enumerate_structures, no_go_report, CausalStructure, DetectionOrdering, NoGoReport};
pub use graphs::{CausalGraph, NodeKind};
pub use qsim::{CircuitParams, StateVector};

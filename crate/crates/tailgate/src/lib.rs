//! Exact and Monte Carlo machinery for comparing tails of sums of
//! independent vector-valued random variables with the i.i.d. sums of their
//! uniform-mixture cover, plus a stratified Riemann-sum laboratory.

pub mod config;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod exact;
pub mod ineq;
pub mod mc;
pub mod report;
pub mod riemann;
pub mod rng;
pub mod runner;
pub mod stats;

pub use dist::{ComponentFamily, FiniteDistribution, NormKind, Vector};
pub use error::{Error, Result};
pub use report::{CheckMode, CheckReport, ConstantEstimate};
pub use rng::SeedSpec;

//! Monte Carlo engine for variable-annuity liability greeks under a joint
//! Heston stochastic-volatility / CIR stochastic-rate model.
//!
//! The crate simulates correlated variance, short-rate and equity paths,
//! projects a stylized GMWB (guaranteed minimum withdrawal benefit) contract
//! along them, and estimates the liability's equity delta and gamma with
//! bump-and-revalue, pathwise, conditional likelihood-ratio, and mixed
//! pathwise-likelihood-ratio estimators.

pub mod bs;
pub mod error;
pub mod greeks;
pub mod model;
pub mod product;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod stats;
pub mod validation;

pub use error::{EngineError, Result};
pub use model::{Case, CholeskyFactor, ModelParams};
pub use product::{MortalityTable, ProductSpec};
pub use scenario::{QuadRule, SimGrid};

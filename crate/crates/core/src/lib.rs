//! Exact finite-multiverse simulation.
//!
//! Quantum event probabilities are ratios of counts over finite, explicitly
//! enumerable sets of parallel universes. The crate provides:
//!
//! * [`rational`]: exact fractions and the half-angle cos² values
//! * [`kernel`]: outcome-count kernels, tensor products and symbolic powers
//! * [`entanglement`]: singlet spin measurements by sequential collapse
//! * [`relativity`]: 1+1 Lorentz boosts and frame-dependent event order
//! * [`mwi`]: branching trees and their equal-weight filaments
//! * [`ensemble`]: deterministic ensembles, entropy and seeded sampling
//! * [`life`]: Game of Life block histories and period detection
//! * [`formats`] and [`query`]: text interchange for the CLI

pub mod ensemble;
pub mod entanglement;
pub mod error;
pub mod formats;
pub mod kernel;
pub mod life;
pub mod mwi;
pub mod query;
pub mod rational;
pub mod relativity;

pub use error::{Error, Result};
pub use kernel::{FactorQuery, Kernel, OutcomeLabel, Power, PowerKernel};
pub use rational::{AngleDeg, Rational};

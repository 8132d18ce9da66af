//! Stochastic orders between multivariate elliptical distributions.
//!
//! Given two elliptical laws with a common generator, [`order::check_order`]
//! decides each of the thirteen integral orders from the location and
//! dispersion parameters alone. The [`verify`] module cross-checks those
//! decisions by Monte Carlo over the test functions in [`catalog`].

pub mod catalog;
pub mod cones;
pub mod elliptical;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod order;
pub mod quadrature;
pub mod sampler;
pub mod special;
pub mod stats;
pub mod verify;
pub mod wire;

pub use elliptical::{DispersionMatrix, EllipticalDistribution, GeneratorSpec, Location};
pub use error::{Error, Result};
pub use order::{check_order, OrderRelation, OrderReport, Verdict};
pub use sampler::RandomStream;
pub use stats::MCEstimate;

//! Generalized Ziggurat sampling for unimodal distributions with unbounded
//! support or unbounded density.
//!
//! The core is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the common double-precision instantiation.

pub mod bench;
pub mod distributions;
pub mod peak;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod setup;
pub mod specfun;
pub mod tail;
pub mod validation;

pub use distributions::{make_sampler, DistributionSpec, Family};
pub use rng::{canonical_real, fixed_real, BitSource, CanonicalFloatGen};
pub use sampler::{AsymmetricSampler, Sampler, ZigguratSampler};
pub use scalar::Real;
pub use setup::{build_table, Density, MonotoneSlice, ZigguratTable};

/// Double-precision sampler for any shipped family.
pub type Zigg = Sampler<f64>;
/// Single-precision sampler for any shipped family.
pub type Zigg32 = Sampler<f32>;
pub type Spec = DistributionSpec<f64>;
pub type Spec32 = DistributionSpec<f32>;
pub type Table = ZigguratTable<f64>;
pub type CanonicalGen = CanonicalFloatGen<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} did not converge within {1} iterations")]
    Convergence(&'static str, usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("covering condition fails: {0}")]
    Covering(String),
    #[error("setup failed: {0}")]
    Setup(String),
    #[error("rejection loop hit the cap of {0} iterations")]
    IterationCap(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

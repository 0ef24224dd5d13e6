//! Pricing of single-barrier digital (cash-or-nothing) options under Black-Scholes.
//!
//! Engines: closed forms ([`analytic`]), the CRR tree with backward induction
//! and reflection-principle sums ([`crr`]), the adjusted binomial interpolated
//! lattice ([`bil`]), and two reference oracles ([`oracles`]). [`expansion`]
//! evaluates the asymptotic expansion of the CRR error and [`harness`] runs
//! convergence sweeps.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod analytic;
pub mod bil;
pub mod crr;
pub mod error;
pub mod expansion;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod scalar;

pub use crr::ProbabilityRule;
pub use error::{ErrorKind, PricingError, Result};
pub use expansion::Regime;
pub use model::{Barrier, ExerciseStyle, Knock, Method, Orientation, Side};
pub use oracles::McConfig;
pub use scalar::Scalar;

pub type Market = model::MarketParams<f64>;
pub type OptionSpec = model::DigitalOptionSpec<f64>;
pub type BarrierSpec = model::Barrier<f64>;
pub type Price = model::PriceResult<f64>;
pub type TreeParams = crr::TreeParams<f64>;
pub type LatticeGeometry = crr::LatticeGeometry<f64>;
pub type ExpansionCoefficients = expansion::ExpansionCoefficients<f64>;
pub type BilMesh = bil::BilMesh<f64>;

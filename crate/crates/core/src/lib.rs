//! Exact arithmetic toolkit for real stable and hyperbolic polynomials.
//!
//! The crate is organised bottom-up: [`poly`] and [`uni`] carry exact
//! polynomials, [`realroot`] decides univariate real-rootedness, [`stability`]
//! refutes or certifies multivariate stability, [`srmeasure`] audits strong
//! Rayleigh measures on the Boolean cube, [`permbounds`] handles permanents and
//! capacity, and [`aztec`] extracts Aztec-diamond placement probabilities.
//!
//! Decisions are always made in exact rational arithmetic. Floating point only
//! appears in complex evaluation, the capacity optimizer, arctan limits and the
//! exclusion-process rates.

pub mod aztec;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod permbounds;
pub mod poly;
pub mod polymat;
pub mod rational;
pub mod realroot;
pub mod srmeasure;
pub mod stability;
pub mod uni;

pub use error::{Error, Result};
pub use matrix::RationalMatrix;
pub use poly::{ComplexF, Monomial, PolyQ, RealVector};
pub use rational::Rational;
pub use uni::UniPolyQ;

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

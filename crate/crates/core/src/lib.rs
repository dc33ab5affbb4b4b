//! Extension of singular radial distributions across their singular points
//! using partition-of-unity test functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: Bessel `J0`/`K0`, digamma at integers and the harmonic sums
//!   that appear in the infrared delta coefficients.
//! * [`quadrature`]: deterministic adaptive Gauss-Kronrod integration on
//!   finite and semi-infinite intervals.
//! * [`testfunc`]: the smooth boundary profile `chi`, the ultraviolet test
//!   function `f>`, the infrared weight and `f< = w f>`.
//! * [`taylor`]: Taylor jets, the integral form of the remainder and the
//!   weighted subtraction operator.
//! * [`extend`]: singular orders and the ultraviolet / infrared extensions,
//!   together with direct-pairing oracles.
//! * [`physics`]: tadpoles in two and four dimensions, the Pauli-Villars
//!   cross-check and the mass-expansion of the two-dimensional propagator.
//! * [`verify`]: the identity checks run by `distext verify`.
//!
//! Parameter sweeps run on rayon when the `parallel` feature is enabled (the
//! default) and sequentially otherwise; see [`par`].

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod expr;
pub mod extend;
pub mod par;
pub mod physics;
pub mod quadrature;
pub mod special;
pub mod taylor;
pub mod testfunc;
pub mod verify;

pub use error::{Error, Result};

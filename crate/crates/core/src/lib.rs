//! Integrated pair correlations of 1D quantum many-body models and the
//! thermodynamics that follows from them.
//!
//! Every model handled here has the form `H(c) = H0 + c * G2`, where `G2` is
//! the interaction operator whose thermal expectation value is the
//! integrated pair correlation. Because `dF/dc = <G2>`, mixed derivatives of
//! the free energy tie every thermodynamic quantity `Y = dF/dX` to a
//! derivative of `<G2>` with respect to `X`:
//!
//! ```text
//! Y(c) = Y(c0) + integral_{c0}^{c} d<G2>/dX dc'
//! ```
//!
//! The crate computes `<G2>` by exact diagonalization ([`hilbert`],
//! [`models`], [`statmech`]), from the Bethe ansatz ([`bethe`]) and from
//! closed forms ([`analytic`]), and reconstructs thermodynamic quantities
//! with the [`maxwell`] engine. [`check`] cross-validates both routes.
//!
//! Units: hbar = k_B = m = 1 throughout.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bethe;
pub mod check;
pub mod error;
pub mod hilbert;
pub mod maxwell;
pub mod models;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod statmech;

pub use error::{Error, Result};

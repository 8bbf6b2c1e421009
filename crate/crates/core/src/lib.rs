// SPDX-License-Identifier: Apache-2.0

//! Random Stieltjes continued fractions with gamma-distributed
//! coefficients: Padé convergents and their convergence rate, the
//! associated random Jacobi operators with eigenvalue counting and
//! Gaussian quadrature measures, and the closed-form spectral
//! predictions (complex Lyapunov exponent, integrated density of states,
//! density of states, invariant density) expressed through Bessel
//! functions and their order-derivatives.
//!
//! Module map:
//! - [`coeffs`] — reproducible coefficient streams (gamma / constant);
//! - [`specfun`] — Bessel J/Y/K with order-derivatives and the
//!   double-exponential quadrature engine;
//! - [`cfrac`] — convergents, log-scaled growth, error-rate estimation,
//!   moment extraction;
//! - [`jacobi`] — truncated Jacobi matrices, Sturm-bisection
//!   eigenvalues, counting and quadrature measures;
//! - [`theory`] — closed-form predictions and the invariant density.

// `!(x > 0.0)` rejects NaN along with the out-of-range values; spelled-out
// constants keep the published coefficient tables recognizable
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::manual_is_multiple_of)]

pub mod cfrac;
pub mod coeffs;
pub mod error;
pub mod jacobi;
pub mod rng;
pub mod specfun;
pub mod theory;

pub use error::{Error, Result};

// SPDX-License-Identifier: Apache-2.0

//! Special functions and the quadrature engine behind them: Bessel
//! J/Y of real order and positive argument, modified Bessel K of real
//! order and complex argument (with order-derivatives), and the
//! double-exponential integration rules they are built on.

pub mod bessel;
pub mod quad;

pub use bessel::{bessel_jy, bessel_k_complex, dk_da_complex, jy_aux, JyAux, JyValues, ScaledK};
pub use quad::{
    exp_sinh, gauss_legendre, gauss_legendre_sum, sinh_sinh, tanh_sinh, trapezoid_line,
    QuadResult, Quadrable, QuadratureSpec,
};

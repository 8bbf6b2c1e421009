// SPDX-License-Identifier: Apache-2.0

//! Double-exponential quadrature (Takahasi & Mori 1974) with level
//! doubling, plus a plain trapezoid rule for kernels that already decay
//! double-exponentially and Gauss–Legendre nodes for finite smooth
//! integrals.
//!
//! Each rule refines by halving the step until two successive levels
//! agree to the requested relative tolerance; an absolute floor of 1e-30
//! stops underflow churn on negligible integrals.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Absolute convergence floor (quantities below this are treated as zero).
const ABS_FLOOR: f64 = 1e-30;

/// Accuracy request for the integration engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    rel_tol: f64,
    max_level: u32,
}

impl QuadratureSpec {
    /// `rel_tol` must lie in (0, 1e-6]; `max_level` (number of step
    /// halvings) must be at least 1.
    pub fn new(rel_tol: f64, max_level: u32) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(Error::Parameter(format!(
                "quadrature tolerance must be in (0, 1e-6], got {rel_tol}"
            )));
        }
        if max_level < 1 {
            return Err(Error::Parameter("max_level must be >= 1".into()));
        }
        Ok(Self { rel_tol, max_level })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_level: 12,
        }
    }
}

/// Value plus a conservative error estimate (the last level-to-level
/// difference).
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
}

/// Output scalars the engine can accumulate: real or complex.
pub trait Quadrable:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl Quadrable for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Quadrable for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

fn check_converged<T: Quadrable>(
    what: &str,
    spec: &QuadratureSpec,
    best: T,
    diff: f64,
) -> Result<QuadResult<T>> {
    if diff <= spec.rel_tol * best.norm() + ABS_FLOOR {
        Ok(QuadResult {
            value: best,
            error: diff,
        })
    } else {
        Err(Error::Accuracy {
            what: what.into(),
            best_re: best.norm(),
            best_im: 0.0,
            estimate: diff,
        })
    }
}

/// Trapezoid sum of `f(start + k·step)` over all integers k, expanding
/// in both directions until the terms stay negligible. The integrand
/// must decay at least (double-)exponentially away from its peak, and
/// `start` must not sit far outside the support (the expansion stops on
/// a run of negligible terms). Returns the sum and the abscissa of the
/// largest term, which lets callers re-anchor refined levels on the
/// actual mass of the integrand.
fn line_sum<T: Quadrable, F: Fn(f64) -> T>(f: &F, start: f64, step: f64) -> (T, f64) {
    let mut total = f(start);
    let mut peak = total.norm();
    let mut peak_x = start;
    for dir in [1.0f64, -1.0] {
        let mut x = start + dir * step;
        let mut small_run = 0;
        loop {
            let v = f(x);
            let n = v.norm();
            if n.is_finite() {
                total = total + v;
            }
            if n > peak {
                peak = n;
                peak_x = x;
            }
            if n <= ABS_FLOOR * (1.0 + peak) {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            x += dir * step;
            if (x - start).abs() > 1e4 * (1.0 + step) {
                break; // runaway guard; decaying kernels never get here
            }
        }
    }
    (total, peak_x)
}

/// Integrate an already double-exponentially decaying kernel over the
/// real line by the trapezoid rule with step halving. `center` should
/// sit near the peak of the integrand and `h0` is the level-0 step.
pub fn trapezoid_line<T: Quadrable, F: Fn(f64) -> T>(
    f: F,
    center: f64,
    h0: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    refine("trapezoid_line", &f, center, h0, spec)
}

/// Shared level-doubling driver: trapezoid at step `h0`, then add the
/// midpoint lattice each level (the points `center + h + 2kh` are the
/// odd multiples of the halved step).
fn refine<T: Quadrable, F: Fn(f64) -> T>(
    what: &str,
    term: &F,
    center: f64,
    h0: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    let mut h = h0;
    let (mut sum, mut anchor) = line_sum(term, center, h);
    let mut prev = sum * h;
    let mut diff = f64::INFINITY;
    // a single level-to-level agreement can be a coincidence when the
    // integrand has a narrow interior peak; demand two in a row
    let mut agreements = 0;
    for _ in 0..spec.max_level {
        h *= 0.5;
        // odd multiples of the halved step, expanded from the lattice
        // point nearest the integrand's peak so the run of negligible
        // terms that stops the expansion lies beyond the mass
        let start = center + h + 2.0 * h * ((anchor - center - h) / (2.0 * h)).round();
        let (delta, peak_x) = line_sum(term, start, 2.0 * h);
        anchor = peak_x;
        sum = sum + delta;
        let cur = sum * h;
        diff = (cur - prev).norm();
        prev = cur;
        if diff <= spec.rel_tol * cur.norm() + ABS_FLOOR {
            agreements += 1;
            if agreements >= 2 {
                return Ok(QuadResult {
                    value: cur,
                    error: diff,
                });
            }
        } else {
            agreements = 0;
        }
    }
    check_converged(what, spec, prev, diff)
}

/// ∫ₐᵇ f(x) dx by tanh–sinh. Integrable endpoint singularities are fine;
/// abscissas are formed as offsets from the endpoints so the kernel is
/// never evaluated exactly at `a` or `b`.
pub fn tanh_sinh<T: Quadrable, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    if !(b > a) {
        return Err(Error::Parameter(format!(
            "tanh_sinh needs b > a, got [{a}, {b}]"
        )));
    }
    let d = 0.5 * (b - a);

    let term = |u: f64| -> T {
        let v = FRAC_PI_2 * u.sinh();
        let av = v.abs();
        let emh = (-av).exp();
        let em = emh * emh;
        // 1 − tanh|v| = 2e^{−2|v|}/(1+e^{−2|v|}); sech|v| = 2e^{−|v|}/(1+e^{−2|v|})
        let off = d * 2.0 * em / (1.0 + em);
        let sech = 2.0 * emh / (1.0 + em);
        let w = d * FRAC_PI_2 * u.cosh() * sech * sech;
        if w == 0.0 || off == 0.0 {
            return T::zero();
        }
        let x = if v >= 0.0 { b - off } else { a + off };
        f(x) * w
    };
    refine("tanh_sinh", &term, 0.0, 1.0, spec)
}

/// ∫₀^∞ f(x) dx by exp–sinh, for kernels decaying at least exponentially
/// at infinity; integrable singularities at 0 are fine.
pub fn exp_sinh<T: Quadrable, F: Fn(f64) -> T>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    let term = |u: f64| -> T {
        let x = (FRAC_PI_2 * u.sinh()).exp();
        if x == 0.0 || !x.is_finite() {
            return T::zero();
        }
        let w = x * FRAC_PI_2 * u.cosh();
        f(x) * w
    };
    refine("exp_sinh", &term, 0.0, 1.0, spec)
}

/// ∫_ℝ f(x) dx by sinh–sinh, for kernels decaying at least exponentially
/// in both directions.
pub fn sinh_sinh<T: Quadrable, F: Fn(f64) -> T>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    let term = |u: f64| -> T {
        let v = FRAC_PI_2 * u.sinh();
        let x = v.sinh();
        if !x.is_finite() {
            return T::zero();
        }
        let w = FRAC_PI_2 * u.cosh() * v.cosh();
        if !w.is_finite() {
            return T::zero();
        }
        f(x) * w
    };
    refine("sinh_sinh", &term, 0.0, 1.0, spec)
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre sum of `f` over [a, b] with `n` nodes.
pub fn gauss_legendre_sum<T: Quadrable, F: Fn(f64) -> T>(f: F, a: f64, b: f64, n: usize) -> T {
    let (xs, ws) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let mut acc = T::zero();
    for (x, w) in xs.iter().zip(ws.iter()) {
        acc = acc + f(c + d * x) * (w * d);
    }
    acc
}

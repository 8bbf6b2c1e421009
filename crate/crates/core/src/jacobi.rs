// SPDX-License-Identifier: Apache-2.0

//! Truncated Jacobi operators built from a coefficient sequence:
//! eigenvalues by Sturm bisection, the normalized eigenvalue counting
//! function, and the Gaussian quadrature measure with Christoffel
//! weights.
//!
//! The n×n truncation uses exactly 2n coefficients:
//!   v₀ = 1/(s₁s₂),  v_k = (1/s_{2k+1})(1/s_{2k} + 1/s_{2k+2}),
//!   h_k = 1/(s_{2k+2}√(s_{2k+1}s_{2k+3})).
//! All h_k are strictly positive, so the eigenvalues are simple; for
//! positive coefficient sequences they are strictly positive as well.

use crate::error::{Error, Result};

/// Symmetric tridiagonal truncation of the Jacobi operator.
#[derive(Debug, Clone)]
pub struct JacobiMatrix {
    v: Vec<f64>,
    h: Vec<f64>,
    s1: f64,
}

impl JacobiMatrix {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Diagonal entries v₀ … v_{n−1}.
    pub fn diagonal(&self) -> &[f64] {
        &self.v
    }

    /// Off-diagonal entries h₀ … h_{n−2} (all positive).
    pub fn off_diagonal(&self) -> &[f64] {
        &self.h
    }

    /// The first coefficient s₁ (total mass of the spectral measure is
    /// 1/s₁).
    pub fn s1(&self) -> f64 {
        self.s1
    }

    /// Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.h[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.h[i].abs() } else { 0.0 };
            lo = lo.min(self.v[i] - left - right);
            hi = hi.max(self.v[i] + left + right);
        }
        (lo, hi)
    }
}

/// Build the n×n Jacobi matrix from exactly 2n positive coefficients.
pub fn build_jacobi(coeffs: &[f64]) -> Result<JacobiMatrix> {
    if coeffs.len() < 2 || coeffs.len() % 2 != 0 {
        return Err(Error::Parameter(format!(
            "build_jacobi needs exactly 2n coefficients with n >= 1, got {}",
            coeffs.len()
        )));
    }
    if let Some(bad) = coeffs.iter().find(|&&c| !(c > 0.0) || !c.is_finite()) {
        return Err(Error::Parameter(format!(
            "coefficients must be strictly positive and finite, got {bad}"
        )));
    }
    let n = coeffs.len() / 2;
    let s = |i: usize| coeffs[i - 1]; // 1-based like the formulas
    let mut v = Vec::with_capacity(n);
    v.push(1.0 / (s(1) * s(2)));
    for k in 1..n {
        v.push((1.0 / s(2 * k + 1)) * (1.0 / s(2 * k) + 1.0 / s(2 * k + 2)));
    }
    let mut h = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        h.push(1.0 / (s(2 * k + 2) * (s(2 * k + 1) * s(2 * k + 3)).sqrt()));
    }
    Ok(JacobiMatrix {
        v,
        h,
        s1: coeffs[0],
    })
}

/// Number of eigenvalues strictly below λ, by the Sturm/LDLᵀ pivot
/// count. Probes that hit an eigenvalue exactly are resolved by nudging
/// λ one ulp upward first (documented convention).
pub fn sturm_count(j: &JacobiMatrix, lambda: f64) -> usize {
    let lam = lambda.next_up();
    let n = j.n();
    let mut count = 0usize;
    let mut d = j.v[0] - lam;
    if d < 0.0 {
        count += 1;
    }
    for k in 1..n {
        // ratio form with clamping so tiny/huge pivots never overflow
        let safe = if d.abs() < 1e-300 {
            if d.is_sign_negative() {
                -1e-300
            } else {
                1e-300
            }
        } else if d.abs() > 1e300 {
            if d < 0.0 {
                -1e300
            } else {
                1e300
            }
        } else {
            d
        };
        d = (j.v[k] - lam) - j.h[k - 1] * j.h[k - 1] / safe;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All n eigenvalues, ascending, each bracketed by bisection to
/// relative width ≤ tol·|λ| (tiny eigenvalues of positive matrices are
/// resolved relatively, not just to an absolute width).
pub fn eigenvalues(j: &JacobiMatrix, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0, got {tol}")));
    }
    let n = j.n();
    let (glo, ghi) = j.gershgorin();
    let (glo, ghi) = (glo - 1e-12 - 1e-12 * glo.abs(), ghi + 1e-12 + 1e-12 * ghi.abs());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut lo = if k == 0 { glo } else { out[k - 1] };
        let mut hi = ghi;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol * mid.abs() + 1e-300 || mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(j, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut lam = 0.5 * (lo + hi);
        if k > 0 && lam <= out[k - 1] {
            lam = out[k - 1].next_up();
        }
        out.push(lam);
    }
    Ok(out)
}

/// Discrete measure: strictly ascending nodes with positive weights.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Σ λᵏ w over the support.
    pub fn moment(&self, k: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x.powi(k as i32) * w)
            .sum()
    }

    /// Cumulative mass strictly below λ.
    pub fn cdf(&self, lambda: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .take_while(|(x, _)| **x < lambda)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Orthonormal-polynomial values ψ₀(λ) … ψ_{n−1}(λ) by the three-term
/// recurrence (ψ₀ = √s₁). Used by the Christoffel route and tests.
pub(crate) fn psi_values(j: &JacobiMatrix, lambda: f64) -> Vec<f64> {
    let n = j.n();
    let mut psi = Vec::with_capacity(n);
    psi.push(j.s1.sqrt());
    if n == 1 {
        return psi;
    }
    psi.push((lambda - j.v[0]) * psi[0] / j.h[0]);
    for l in 1..n - 1 {
        let next = ((lambda - j.v[l]) * psi[l] - j.h[l - 1] * psi[l - 1]) / j.h[l];
        psi.push(next);
    }
    psi
}

/// Christoffel weight (Σ_{ℓ<n} ψ_ℓ(λ)²)⁻¹ — the secondary route used to
/// cross-check the eigenvector route for moderate n.
pub fn christoffel_weight(j: &JacobiMatrix, lambda: f64) -> f64 {
    let psi = psi_values(j, lambda);
    1.0 / psi.iter().map(|p| p * p).sum::<f64>()
}

/// Christoffel weight plus the relative eigen-residual ‖(J−λ)ψ‖/‖ψ‖ of
/// the ψ vector. Forward recurrence loses the decaying tail of
/// eigenvectors localized away from the chain end; a large residual
/// flags exactly those nodes, where the Christoffel value cannot be
/// trusted (the eigenvector route remains exact there).
pub fn christoffel_weight_with_residual(j: &JacobiMatrix, lambda: f64) -> (f64, f64) {
    let psi = psi_values(j, lambda);
    let n = j.n();
    let mut r2 = 0.0;
    let mut n2 = 0.0;
    for i in 0..n {
        let mut t = (j.v[i] - lambda) * psi[i];
        if i > 0 {
            t += j.h[i - 1] * psi[i - 1];
        }
        if i + 1 < n {
            t += j.h[i] * psi[i + 1];
        }
        r2 += t * t;
        n2 += psi[i] * psi[i];
    }
    (1.0 / n2, (r2 / n2).sqrt())
}

/// First component of the normalized eigenvector for the given
/// eigenvalue, by inverse iteration with a partially pivoted tridiagonal
/// solve and one Rayleigh-quotient polish of the shift.
fn eigenvector_first_component(j: &JacobiMatrix, lambda: f64) -> f64 {
    let n = j.n();
    if n == 1 {
        return 1.0;
    }
    let (glo, ghi) = j.gershgorin();
    let jnorm = glo.abs().max(ghi.abs()).max(1e-300);
    let mut shift = lambda;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for pass in 0..4 {
        solve_shifted(j, shift, jnorm, &mut x);
        // scale by the largest component first so squaring cannot overflow
        let m = x.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
        if !m.is_finite() || m == 0.0 {
            for (i, t) in x.iter_mut().enumerate() {
                *t = if i % 2 == 0 { 1.0 } else { -0.5 };
            }
            continue;
        }
        for t in x.iter_mut() {
            *t /= m;
        }
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in x.iter_mut() {
            *t /= norm;
        }
        if pass == 1 {
            // Rayleigh quotient xᵀJx sharpens the shift to ~residual²;
            // accept it only as a small correction of the bisection value
            let mut rq = 0.0;
            for i in 0..n {
                let mut y = j.v[i] * x[i];
                if i > 0 {
                    y += j.h[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += j.h[i] * x[i + 1];
                }
                rq += x[i] * y;
            }
            if rq.is_finite() && (rq - lambda).abs() < 1e-8 * jnorm {
                shift = rq;
            }
        }
    }
    x[0]
}

/// Solve (J − λI) y = x in place by Gaussian elimination with partial
/// pivoting (two superdiagonals appear under pivoting). Pivots smaller
/// than eps·‖J‖ are clamped so a singular shift amplifies the
/// eigendirection by ~1/eps without overflowing.
fn solve_shifted(j: &JacobiMatrix, lambda: f64, jnorm: f64, x: &mut [f64]) {
    let n = j.n();
    let tiny = f64::EPSILON * jnorm;
    let mut diag: Vec<f64> = j.v.iter().map(|v| v - lambda).collect();
    let mut sup1: Vec<f64> = (0..n - 1).map(|i| j.h[i]).collect();
    let mut sup2: Vec<f64> = vec![0.0; n.saturating_sub(2)];
    let mut sub: Vec<f64> = (0..n - 1).map(|i| j.h[i]).collect();

    // forward elimination
    for i in 0..n - 1 {
        if sub[i].abs() > diag[i].abs() {
            // swap rows i and i+1
            std::mem::swap(&mut diag[i], &mut sub[i]);
            std::mem::swap(&mut sup1[i], &mut diag[i + 1]);
            if i + 2 < n {
                sup2[i] = sup1[i + 1];
                sup1[i + 1] = 0.0;
            }
            x.swap(i, i + 1);
        }
        let mut piv = diag[i];
        if piv.abs() < tiny {
            piv = if piv.is_sign_negative() { -tiny } else { tiny };
            diag[i] = piv;
        }
        let m = sub[i] / piv;
        diag[i + 1] -= m * sup1[i];
        if i + 2 < n {
            sup1[i + 1] -= m * sup2[i];
        }
        x[i + 1] -= m * x[i];
    }

    // back substitution
    let mut piv = diag[n - 1];
    if piv.abs() < tiny {
        piv = if piv.is_sign_negative() { -tiny } else { tiny };
    }
    x[n - 1] /= piv;
    if n >= 2 {
        let mut piv = diag[n - 2];
        if piv.abs() < tiny {
            piv = if piv.is_sign_negative() { -tiny } else { tiny };
        }
        x[n - 2] = (x[n - 2] - sup1[n - 2] * x[n - 1]) / piv;
    }
    for i in (0..n.saturating_sub(2)).rev() {
        let mut piv = diag[i];
        if piv.abs() < tiny {
            piv = if piv.is_sign_negative() { -tiny } else { tiny };
        }
        x[i] = (x[i] - sup1[i] * x[i + 1] - sup2[i] * x[i + 2]) / piv;
    }
}

/// The Gaussian quadrature measure σ_n: nodes are the eigenvalues,
/// weights come from the first components of the normalized
/// eigenvectors scaled by the total mass 1/s₁. For n ≤ 64 every weight
/// is cross-checked against the Christoffel sum.
pub fn quadrature_measure(j: &JacobiMatrix, tol: f64) -> Result<DiscreteMeasure> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0, got {tol}")));
    }
    // weights need ulp-level nodes regardless of the reporting tolerance
    let nodes = eigenvalues(j, tol.min(1e-14))?;
    let (_, ghi) = j.gershgorin();
    let mut weights = Vec::with_capacity(nodes.len());
    for &lam in &nodes {
        let w0 = eigenvector_first_component(j, lam);
        let w = w0 * w0 / j.s1;
        if j.n() <= 64 {
            // cross-check against the Christoffel sum wherever the
            // forward ψ recurrence is numerically an eigenvector
            let (cw, resid) = christoffel_weight_with_residual(j, lam);
            if resid < 1e-10 * ghi.abs().max(1.0) {
                let rel = (w - cw).abs() / w.max(cw);
                if rel > 1e-7 {
                    return Err(Error::Inconsistent(format!(
                        "weight routes disagree at node {lam}: eigenvector {w}, Christoffel {cw}"
                    )));
                }
            }
        }
        weights.push(w);
    }
    Ok(DiscreteMeasure { nodes, weights })
}

/// Normalized counting function N_n(λ) = #{nodes < λ}/n on a grid.
pub fn counting_measure(nodes: &[f64], grid: &[f64]) -> Vec<f64> {
    debug_assert!(nodes.windows(2).all(|w| w[0] <= w[1]));
    let n = nodes.len() as f64;
    grid.iter()
        .map(|&lam| nodes.partition_point(|&x| x < lam) as f64 / n)
        .collect()
}

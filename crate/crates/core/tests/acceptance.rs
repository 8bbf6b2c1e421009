// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them all). Criterion 8 pins the scaled large-shape Lyapunov residual
//! at +0.9 = (1+8t)/(2(1+4t)) for t = 1; direct chain simulation, the
//! K-integral formula and the uniform large-order Bessel asymptotics all
//! give −1/(2(1+4t)) = −0.1 for that limit, so `criterion_8_as_stated`
//! is expected to fail and is kept red as a sentinel; the verified
//! behaviour is asserted by `criterion_8_true_limit`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;
use stieltjes_core::cfrac::{
    forward_iterate_samples, log_growth, pade_error_rate, CutPoint,
};
use stieltjes_core::coeffs::{CoefficientStream, GammaParams};
use stieltjes_core::jacobi::{build_jacobi, counting_measure, eigenvalues, quadrature_measure};
use stieltjes_core::specfun::bessel::{
    bessel_jy, bessel_k_complex, dk_da_complex, jy_aux, k_scaled,
};
use stieltjes_core::specfun::quad::{gauss_legendre_sum, QuadratureSpec};
use stieltjes_core::theory::{
    baseline_lyapunov, dos_density, integrated_dos, integrated_dos_routes, ks_statistic,
    lyapunov_gamma, lyapunov_large_a_term, InvariantDensity, InvariantDensityParams,
    InvariantMarginals,
};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

/// 1. Constant-stream eigenvalues match 4cos²(jπ/(2n+1)) to 1e-10
///    relative for n ∈ {1, 2, 64, 512}; the n = 512 solve takes ≤ 1 s.
#[test]
fn criterion_1_baseline_eigenvalues() {
    let mut worst: f64 = 0.0;
    let mut solve_512 = 0.0;
    for &n in &[1usize, 2, 64, 512] {
        let j = build_jacobi(&vec![1.0; 2 * n]).unwrap();
        let t0 = Instant::now();
        let eigs = eigenvalues(&j, 1e-13).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        if n == 512 {
            solve_512 = dt;
        }
        let mut expect: Vec<f64> = (1..=n)
            .map(|jj| {
                let c = (jj as f64 * PI / (2.0 * n as f64 + 1.0)).cos();
                4.0 * c * c
            })
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, x) in eigs.iter().zip(&expect) {
            worst = worst.max((e - x).abs() / x);
        }
    }
    report(
        "1",
        worst <= 1e-10 && solve_512 <= 1.0,
        &format!("worst relative eigenvalue error {worst:.2e}, n=512 solve {solve_512:.3}s"),
    );
}

/// 2. Counting-measure convergence: a=8, b=1/8, n=256, 10 seeds; the
///    median over seeds of sup|N_n − N| on a 200-point grid in
///    [0.05, 20] is ≤ 0.06, within a 60 s budget.
#[test]
fn criterion_2_counting_measure() {
    let t0 = Instant::now();
    let p = GammaParams::new(8.0, 0.125).unwrap();
    let grid: Vec<f64> = (0..200)
        .map(|i| 0.05 + i as f64 * (20.0 - 0.05) / 199.0)
        .collect();
    let n_closed: Vec<f64> = grid.iter().map(|&l| integrated_dos(&p, l).unwrap()).collect();
    let mut sups = Vec::new();
    for seed in 0..10u64 {
        let s = CoefficientStream::gamma(p, seed, 0);
        let j = build_jacobi(&s.take_fresh(512)).unwrap();
        let eigs = eigenvalues(&j, 1e-12).unwrap();
        let nn = counting_measure(&eigs, &grid);
        let sup = nn
            .iter()
            .zip(&n_closed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        sups.push(sup);
    }
    sups.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (sups[4] + sups[5]);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        "2",
        median <= 0.06 && elapsed <= 60.0,
        &format!("median sup|N_n − N| = {median:.4} over 10 seeds, runtime {elapsed:.2}s"),
    );
}

/// 3. Lyapunov cross-check: chain growth over 10⁶ steps matches
///    ∂ₐ ln K_a(2√t/b) within 3 SE in both parts at the three points.
#[test]
fn criterion_3_lyapunov_monte_carlo() {
    let cases = [
        (1.0, 1.0, Complex64::new(1.0, 0.0)),
        (2.0, 1.0, Complex64::new(1.0, 1.0)),
        (8.0, 0.125, Complex64::new(0.3, 0.0)),
    ];
    let mut detail = String::new();
    let mut ok = true;
    for (i, &(a, b, t)) in cases.iter().enumerate() {
        let p = GammaParams::new(a, b).unwrap();
        let cp = CutPoint::interior(t).unwrap();
        let lam = lyapunov_gamma(&p, &cp, &spec()).unwrap().value;
        let stream = CoefficientStream::gamma(p, 2024 + i as u64, 0);
        let g = log_growth(&stream, &cp, 1_000_000).unwrap();
        let z_re = (g.mean.re - lam.re).abs() / g.se_re;
        let z_im = if g.se_im > 0.0 {
            (g.mean.im - lam.im).abs() / g.se_im
        } else {
            0.0
        };
        ok &= z_re <= 3.0 && z_im <= 3.0;
        detail.push_str(&format!("(a={a}, t={t}): {z_re:.2}σ/{z_im:.2}σ  "));
    }
    report("3", ok, &detail);
}

/// 4. Padé rate: at (a=2, b=1, t=1) the slope of ln|S_{n+1} − S_n|
///    fitted over n ∈ [10³, 10⁴] matches −2∂ₐln|K_a(2)| within 1%,
///    across 5 seeds (seed-aggregated mean slope; single windows of
///    length 10⁴ fluctuate by ~1% individually).
#[test]
fn criterion_4_pade_rate() {
    let p = GammaParams::new(2.0, 1.0).unwrap();
    let t = CutPoint::real(1.0).unwrap();
    let target = -2.0 * lyapunov_gamma(&p, &t, &spec()).unwrap().value.re;
    let mut slopes = Vec::new();
    for seed in 0..5u64 {
        let stream = CoefficientStream::gamma(p, seed, 0);
        let fit = pade_error_rate(&stream, &t, 1000, 10_000).unwrap();
        slopes.push(fit.slope);
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let rel = (mean - target).abs() / target.abs();
    report(
        "4",
        rel <= 0.01,
        &format!("mean slope {mean:.6} vs −2∂ₐln|K| = {target:.6} ({:.3}% off)", 100.0 * rel),
    );
}

/// 5. Gaussian quadrature exactness: Σλᵏσ_j reproduces the
///    series-extracted moments to 1e-8 relative for k ≤ 2n−1, n ≤ 20,
///    and Σσ_j = 1/s₁ to 1e-10, across random gamma streams.
#[test]
fn criterion_5_quadrature_exactness() {
    let p = GammaParams::new(2.0, 1.0).unwrap();
    let mut worst_mom: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    for seed in 0..6u64 {
        for &n in &[4usize, 12, 20] {
            let stream = CoefficientStream::gamma(p, seed, 0);
            let coeffs = stream.take_fresh(2 * n);
            let j = build_jacobi(&coeffs).unwrap();
            let meas = quadrature_measure(&j, 1e-13).unwrap();
            let moments = stieltjes_core::cfrac::moments_from_coefficients(&coeffs).unwrap();
            for (k, m) in moments.iter().enumerate() {
                worst_mom = worst_mom.max((meas.moment(k as u32) - m).abs() / m);
            }
            worst_mass =
                worst_mass.max((meas.total_mass() - 1.0 / coeffs[0]).abs() * coeffs[0]);
        }
    }
    report(
        "5",
        worst_mom <= 1e-8 && worst_mass <= 1e-10,
        &format!("worst moment error {worst_mom:.2e}, worst mass error {worst_mass:.2e}"),
    );
}

/// 6. Density-of-states self-consistency: the two N routes agree to
///    1e-6, ∫ρ over [0.1, 20] equals N(20) − N(0.1) to 1e-6, and ρ > 0
///    everywhere tested.
#[test]
fn criterion_6_dos_self_consistency() {
    let mut worst_route: f64 = 0.0;
    let mut min_rho = f64::INFINITY;
    for &(a, b) in &[(1.0, 1.0), (8.0, 0.125)] {
        let p = GammaParams::new(a, b).unwrap();
        for i in 0..=40 {
            let lambda = 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0);
            let (n_im, n_phase) = integrated_dos_routes(&p, lambda).unwrap();
            worst_route = worst_route.max((n_im - n_phase).abs());
            min_rho = min_rho.min(dos_density(&p, lambda, &spec()).unwrap());
        }
    }
    // fundamental theorem on [0.1, 20] for the Figure-1 parameters,
    // panels split around the baseline band edge λ = 4
    let p = GammaParams::new(8.0, 0.125).unwrap();
    let rho = |l: f64| dos_density(&p, l, &spec()).unwrap();
    let integral = gauss_legendre_sum(rho, 0.1, 3.0, 64)
        + gauss_legendre_sum(rho, 3.0, 5.0, 64)
        + gauss_legendre_sum(rho, 5.0, 20.0, 64);
    let dn = integrated_dos(&p, 20.0).unwrap() - integrated_dos(&p, 0.1).unwrap();
    let ft_err = (integral - dn).abs();
    report(
        "6",
        worst_route <= 1e-6 && ft_err <= 1e-6 && min_rho > 0.0,
        &format!(
            "route gap {worst_route:.2e}, |∫ρ − ΔN| = {ft_err:.2e}, min ρ = {min_rho:.3e}"
        ),
    );
}

/// 7. Invariant density: normalization to 1e-6; the log- and
///    argument-moments reproduce Re/Im of ∂ₚK_p/K_p at 2e^{−iα}/s to
///    1e-5 at (p=2, s=1, α=π/6); the |Z| marginal of 10⁵ forward
///    iterates passes the KS test at the 1% level (1.63/√N).
#[test]
fn criterion_7_invariant_density() {
    let p = GammaParams::new(2.0, 1.0).unwrap();
    let t = CutPoint::interior(Complex64::from_polar(1.0, -PI / 3.0)).unwrap();
    let ip = InvariantDensityParams::from_gamma(&p, &t).unwrap();
    assert!((ip.alpha() - PI / 6.0).abs() < 1e-15 && (ip.scale() - 1.0).abs() < 1e-15);
    let dens = InvariantDensity::new(ip, &spec()).unwrap();
    let marg = InvariantMarginals::build(&dens, 1400, 641);
    let norm_err = (marg.total - 1.0).abs();

    let lam = k_scaled(ip.shape(), ip.k_argument(), &spec())
        .unwrap()
        .dlog_da();
    let est = marg.lyapunov_estimate();
    let mom_err = (est.re - lam.re).abs().max((est.im - lam.im).abs());

    let n = 100_000;
    let template = CoefficientStream::gamma(p, 777, 0);
    let samples = forward_iterate_samples(&template, &t, n, 64).unwrap();
    let mut rs: Vec<f64> = samples.iter().map(|z| z.norm()).collect();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks = ks_statistic(&rs, |r| marg.radial_cdf(r));
    let mut ths: Vec<f64> = samples.iter().map(|z| z.im.atan2(z.re)).collect();
    ths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks_angular = ks_statistic(&ths, |x| marg.angular_cdf(x));
    let threshold = 1.63 / (n as f64).sqrt();
    report(
        "7",
        norm_err <= 1e-6 && mom_err <= 1e-5 && ks <= threshold && ks_angular <= threshold,
        &format!(
            "normalization error {norm_err:.2e}, moment error {mom_err:.2e}, KS |Z| {ks:.4e} / arg {ks_angular:.4e} (threshold {threshold:.4e})"
        ),
    );
}

/// 8 (as stated). Pins a·(Λ_{a,1/a}(1) − Λ^∞(1)) at 0.9 within 5% for
///    a = 256 with the error shrinking from a = 64 to a = 1024.
///
/// Expected to FAIL: the chain simulation (criterion 3 machinery), the
/// K-integral formula and the uniform large-order asymptotics of
/// ln K_a all give −1/(2(1+4t)) = −0.1 for this limit. Kept red as a
/// faithful sentinel; see `criterion_8_true_limit`.
#[test]
fn criterion_8_as_stated() {
    let pinned = 0.9; // (1+8t)/(2(1+4t)) at t = 1
    let linf = baseline_lyapunov(Complex64::new(1.0, 0.0)).re;
    let t = CutPoint::real(1.0).unwrap();
    let mut scaled = Vec::new();
    for &a in &[64.0, 256.0, 1024.0] {
        let p = GammaParams::new(a, 1.0 / a).unwrap();
        let lam = lyapunov_gamma(&p, &t, &spec()).unwrap().value.re;
        scaled.push(a * (lam - linf));
    }
    let errs: Vec<f64> = scaled.iter().map(|s| (s - pinned).abs()).collect();
    let pass = errs[1] <= 0.05 * pinned && errs[0] > errs[1] && errs[1] > errs[2];
    report(
        "8 (as stated)",
        pass,
        &format!(
            "a(Λ−Λ^∞) at a∈{{64,256,1024}} = {:.5?}, pinned value {pinned}; measured limit is −1/(2(1+4t)) = −0.1",
            scaled
        ),
    );
}

/// 8 (true limit). The same scaled residual converges to −1/(2(1+4t))
///    (within 5% at a = 256) with the error shrinking from a = 64 to
///    a = 1024 — the convergence content of the criterion, at the limit
///    value that simulation and asymptotics agree on.
#[test]
fn criterion_8_true_limit() {
    let limit = lyapunov_large_a_term(Complex64::new(1.0, 0.0)).re;
    let linf = baseline_lyapunov(Complex64::new(1.0, 0.0)).re;
    let t = CutPoint::real(1.0).unwrap();
    let mut scaled = Vec::new();
    for &a in &[64.0, 256.0, 1024.0] {
        let p = GammaParams::new(a, 1.0 / a).unwrap();
        let lam = lyapunov_gamma(&p, &t, &spec()).unwrap().value.re;
        scaled.push(a * (lam - linf));
    }
    let errs: Vec<f64> = scaled.iter().map(|s| (s - limit).abs()).collect();
    let pass = errs[1] <= 0.05 * limit.abs() && errs[0] > errs[1] && errs[1] > errs[2];
    report(
        "8 (true limit)",
        pass,
        &format!("a(Λ−Λ^∞) = {scaled:.5?} → {limit}, errors {errs:?}"),
    );
}

/// 9. Special-function layer: Wronskian (1e-9), evenness of K in the
///    order, two-path M² (1e-8), and finite-difference-vs-integral ∂ₐK
///    (1e-7) all hold on their grids.
#[test]
fn criterion_9_special_functions() {
    // Wronskian J Y' − Y J' = 2/(πz)
    let mut worst_wron: f64 = 0.0;
    for &a in &[0.5, 2.0, 8.0, 32.0] {
        for &z in &[0.05, 0.2, 1.0, 2.5, 7.0, 18.0, 50.0] {
            let v = bessel_jy(a, z).unwrap();
            let w = 2.0 / (PI * z);
            worst_wron = worst_wron.max(((v.j * v.yp - v.y * v.jp) - w).abs() / w);
        }
    }
    // evenness K_a = K_{−a} (exact by construction, asserted on values)
    let mut worst_even: f64 = 0.0;
    for &(a, re, im) in &[(0.7, 2.0, 1.0), (3.3, 0.4, -0.8), (12.0, 10.0, 30.0)] {
        let kp = bessel_k_complex(a, Complex64::new(re, im)).unwrap();
        let km = bessel_k_complex(-a, Complex64::new(re, im)).unwrap();
        worst_even = worst_even.max((kp - km).norm() / kp.norm());
    }
    // two-path M² on the spec grid (a up to 64; z floor for a = 64 keeps
    // M² under the f64 overflow ceiling)
    let mut worst_m2: f64 = 0.0;
    for &a in &[0.5, 2.0, 8.0, 32.0, 64.0] {
        let z_min = if a == 64.0 { 0.5 } else { 0.1 };
        for i in 0..7 {
            let z = z_min * (50.0f64 / z_min).powf(i as f64 / 6.0);
            let aux = jy_aux(a, z, &spec()).unwrap();
            worst_m2 = worst_m2.max((aux.m2 - aux.m2_watson).abs() / aux.m2);
        }
    }
    // ∂ₐK: exact integral vs central finite difference
    let mut worst_dk: f64 = 0.0;
    for &(a, re, im) in &[(1.0, 2.0, 0.0), (0.3, 1.0, 0.5), (5.0, 3.0, -2.0)] {
        let w = Complex64::new(re, im);
        let h = 1e-5;
        let fd = (bessel_k_complex(a + h, w).unwrap() - bessel_k_complex(a - h, w).unwrap())
            / (2.0 * h);
        let dk = dk_da_complex(a, w).unwrap();
        worst_dk = worst_dk.max((fd - dk).norm() / dk.norm());
    }
    report(
        "9",
        worst_wron <= 1e-9 && worst_even == 0.0 && worst_m2 <= 1e-8 && worst_dk <= 1e-7,
        &format!(
            "Wronskian {worst_wron:.2e}, evenness {worst_even:.1e}, M² paths {worst_m2:.2e}, ∂ₐK fd {worst_dk:.2e}"
        ),
    );
}

/// Companion: the quadrature-measure CDF approaches the
/// constant-coefficient baseline CDF as the shape grows (qualitative —
/// the random measure itself stays singular, so no rate is claimed).
#[test]
fn measure_cdf_approaches_baseline() {
    let sup_dist = |a: f64, seed: u64| -> f64 {
        let p = GammaParams::new(a, 1.0 / a).unwrap();
        let s = CoefficientStream::gamma(p, seed, 0);
        let j = build_jacobi(&s.take_fresh(512)).unwrap();
        let m = quadrature_measure(&j, 1e-12).unwrap();
        let mut acc = 0.0;
        let mut sup: f64 = 0.0;
        for (x, w) in m.nodes().iter().zip(m.weights()) {
            let target = stieltjes_core::theory::baseline_sigma_cdf(*x);
            sup = sup.max((acc - target).abs());
            acc += w;
            sup = sup.max((acc - target).abs());
        }
        sup
    };
    for seed in 0..4 {
        let d8 = sup_dist(8.0, seed);
        let d64 = sup_dist(64.0, seed);
        println!("measure CDF distance, seed {seed}: a=8 → {d8:.3}, a=64 → {d64:.3}");
        assert!(d64 < d8, "distance did not shrink with the shape");
        assert!(d64 < 0.25, "a=64 measure too far from the baseline: {d64}");
    }
}

/// Companion to criteria 3/6: Re Λ > 0 on a dense boundary grid — the
/// computational content of the empty absolutely-continuous spectrum.
#[test]
fn boundary_positivity_grid() {
    let mut min_re = f64::INFINITY;
    let mut count = 0;
    for &(a, b) in &[(1.0, 1.0), (8.0, 0.125)] {
        let p = GammaParams::new(a, b).unwrap();
        for i in 0..512 {
            let lambda = 10f64.powf(-2.0 + 4.0 * i as f64 / 511.0);
            let lam = stieltjes_core::theory::boundary_lyapunov(&p, lambda)
                .unwrap()
                .value;
            min_re = min_re.min(lam.re);
            count += 1;
        }
    }
    println!("boundary grid: min Re Λ = {min_re:.6e} over {count} points");
    assert!(min_re > 0.0);
}

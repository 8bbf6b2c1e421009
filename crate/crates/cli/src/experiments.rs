// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers: each run writes one CSV per seed, a summary CSV
//! comparing empirical against closed-form columns, and a line-oriented
//! manifest with the embedded pass/fail checks. Identical config and
//! seeds produce byte-identical CSVs regardless of how many worker
//! threads execute the seeds (work is merged in seed order; all
//! per-task randomness derives from the `(seed, stream_index)` pair).

use crate::config::{Experiment, ExperimentConfig, GridKind};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::time::Instant;
use stieltjes_core::cfrac::{
    forward_iterate_samples, log_growth_trace, pade_error_rate, CutPoint, LogConvergentState,
};
use stieltjes_core::coeffs::{CoefficientStream, GammaParams, StreamKind};
use stieltjes_core::error::Error as CoreError;
use stieltjes_core::jacobi::{build_jacobi, counting_measure, eigenvalues, quadrature_measure};
use stieltjes_core::specfun::quad::QuadratureSpec;
use stieltjes_core::theory::{
    baseline_dos, baseline_idos, baseline_lyapunov, baseline_sigma_cdf, dos_density,
    integrated_dos_routes, ks_statistic, lyapunov_gamma, lyapunov_large_a_term,
    InvariantDensity, InvariantDensityParams, InvariantMarginals,
};

pub enum RunError {
    Usage(String),
    Numeric(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Numeric(e.to_string())
    }
}

/// One embedded tolerance check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn le(name: &str, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            bound,
            pass: observed <= bound,
        }
    }

    fn gt(name: &str, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            bound,
            pass: observed > bound,
        }
    }
}

/// Everything a run produces, before it is written to disk.
pub struct RunReport {
    pub files: Vec<(String, String)>,
    pub seed_summaries: Vec<String>,
    pub checks: Vec<Check>,
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn lambda_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let n = cfg.grid_points;
    (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            match cfg.grid {
                GridKind::Linear => cfg.lambda_min + f * (cfg.lambda_max - cfg.lambda_min),
                GridKind::Log => {
                    cfg.lambda_min * (cfg.lambda_max / cfg.lambda_min).powf(f)
                }
            }
        })
        .collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    }
}

fn gamma_params(cfg: &ExperimentConfig) -> Result<GammaParams, RunError> {
    GammaParams::new(cfg.a, cfg.b)
        .map_err(|e| RunError::Usage(format!("invalid gamma parameters: {e}")))
}

fn interior_t(cfg: &ExperimentConfig) -> Result<CutPoint, RunError> {
    CutPoint::interior(Complex64::new(cfg.t_re, cfg.t_im))
        .map_err(|e| RunError::Usage(format!("invalid evaluation point: {e}")))
}

/// Run seeds in parallel, merge in seed order.
fn per_seed<T: Send, F: Fn(u64) -> Result<T, CoreError> + Sync>(
    seeds: &[u64],
    work: F,
) -> Result<Vec<T>, RunError> {
    let results: Vec<Result<T, CoreError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&s| {
                let work = &work;
                scope.spawn(move || work(s))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results
        .into_iter()
        .collect::<Result<Vec<T>, CoreError>>()
        .map_err(RunError::from)
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let t0 = Instant::now();
    let mut report = match cfg.experiment {
        Experiment::Dos => run_dos(cfg),
        Experiment::Idos => run_idos(cfg),
        Experiment::Lyapunov => run_lyapunov(cfg),
        Experiment::PadeError => run_pade_error(cfg),
        Experiment::Measure => run_measure(cfg),
        Experiment::Invariant => run_invariant(cfg),
        Experiment::Baseline => run_baseline(cfg),
    }?;
    report
        .timings
        .push(("total".into(), t0.elapsed().as_secs_f64()));
    Ok(report)
}

/// Counting measure N_n against the closed-form N on a λ grid.
fn run_dos(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let grid = lambda_grid(cfg);
    let t_closed = Instant::now();
    let n_closed: Vec<f64> = grid
        .iter()
        .map(|&l| stieltjes_core::theory::integrated_dos(&p, l))
        .collect::<Result<_, _>>()?;
    let closed_secs = t_closed.elapsed().as_secs_f64();

    let t_emp = Instant::now();
    let rows = per_seed(&cfg.seeds, |seed| {
        let stream = CoefficientStream::gamma(p, seed, 0);
        let j = build_jacobi(&stream.take_fresh(2 * cfg.n))?;
        let eigs = eigenvalues(&j, 1e-12)?;
        Ok(counting_measure(&eigs, &grid))
    })?;
    let emp_secs = t_emp.elapsed().as_secs_f64();

    let mut files = Vec::new();
    let mut seed_summaries = Vec::new();
    let mut sups = Vec::new();
    for (seed, nn) in cfg.seeds.iter().zip(&rows) {
        let mut csv =
            String::from("lambda,N_n (empirical),N (closed-form),abs_diff (derived)\n");
        let mut sup: f64 = 0.0;
        for ((l, a), b) in grid.iter().zip(nn).zip(&n_closed) {
            let d = (a - b).abs();
            sup = sup.max(d);
            let _ = writeln!(csv, "{l:e},{a:e},{b:e},{d:e}");
        }
        files.push((format!("dos_seed{seed}.csv"), csv));
        seed_summaries.push(format!("seed {seed} sup_abs_diff={sup:e}"));
        sups.push(sup);
    }

    let mut summary =
        String::from("lambda,N_n_median (empirical),N (closed-form),abs_diff (derived)\n");
    for (i, (l, b)) in grid.iter().zip(&n_closed).enumerate() {
        let vals: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        let med = median(&vals);
        let _ = writeln!(summary, "{l:e},{med:e},{b:e},{:e}", (med - b).abs());
    }
    files.push(("summary.csv".into(), summary));

    let median_sup = median(&sups);
    Ok(RunReport {
        files,
        seed_summaries,
        checks: vec![Check::le("median_sup_abs_diff", median_sup, cfg.tol)],
        timings: vec![
            ("closed_form".into(), closed_secs),
            ("empirical".into(), emp_secs),
        ],
    })
}

/// Closed-form integrated density of states: two routes plus ρ.
fn run_idos(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let grid = lambda_grid(cfg);
    let mut csv = String::from(
        "lambda,N_im_route (closed-form),N_phase_route (closed-form),route_abs_diff (derived),rho (closed-form)\n",
    );
    let mut worst_route: f64 = 0.0;
    let mut min_rho = f64::INFINITY;
    let mut min_step = f64::INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for &l in &grid {
        let (n_im, n_phase) = integrated_dos_routes(&p, l)?;
        let rho = dos_density(&p, l, &spec())?;
        worst_route = worst_route.max((n_im - n_phase).abs());
        min_rho = min_rho.min(rho);
        if prev > f64::NEG_INFINITY {
            min_step = min_step.min(n_im - prev);
        }
        prev = n_im;
        let _ = writeln!(csv, "{l:e},{n_im:e},{n_phase:e},{:e},{rho:e}", (n_im - n_phase).abs());
    }
    Ok(RunReport {
        files: vec![("summary.csv".into(), csv)],
        seed_summaries: Vec::new(),
        checks: vec![
            Check::le("max_route_diff", worst_route, cfg.tol),
            Check::gt("min_rho", min_rho, 0.0),
            Check::gt("min_N_increment", min_step, -1e-9),
        ],
        timings: Vec::new(),
    })
}

/// Chain growth against ∂ₐ ln K_a(2√t/b).
fn run_lyapunov(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let t = interior_t(cfg)?;
    let lam = lyapunov_gamma(&p, &t, &spec())?.value;
    let traces = per_seed(&cfg.seeds, |seed| {
        let stream = CoefficientStream::gamma(p, seed, 0);
        log_growth_trace(&stream, &t, cfg.n, 100.min(cfg.n))
    })?;

    let mut files = Vec::new();
    let mut seed_summaries = Vec::new();
    let mut summary = String::from(
        "seed,mc_re (empirical),mc_im (empirical),se_re (empirical),se_im (empirical),closed_re (closed-form),closed_im (closed-form),sigmas_re (derived),sigmas_im (derived)\n",
    );
    let mut worst_sigma: f64 = 0.0;
    for (seed, (trace, est)) in cfg.seeds.iter().zip(&traces) {
        let mut csv = String::from("step,running_re (empirical),running_im (empirical)\n");
        for (k, v) in trace {
            let _ = writeln!(csv, "{k},{:e},{:e}", v.re, v.im);
        }
        files.push((format!("lyapunov_seed{seed}.csv"), csv));
        let z_re = (est.mean.re - lam.re).abs() / est.se_re;
        let z_im = if est.se_im > 0.0 {
            (est.mean.im - lam.im).abs() / est.se_im
        } else {
            0.0
        };
        worst_sigma = worst_sigma.max(z_re).max(z_im);
        let _ = writeln!(
            summary,
            "{seed},{:e},{:e},{:e},{:e},{:e},{:e},{z_re:e},{z_im:e}",
            est.mean.re, est.mean.im, est.se_re, est.se_im, lam.re, lam.im
        );
        seed_summaries.push(format!(
            "seed {seed} mc={:e}{:+e}i sigmas_re={z_re:e} sigmas_im={z_im:e}",
            est.mean.re, est.mean.im
        ));
    }
    files.push(("summary.csv".into(), summary));
    Ok(RunReport {
        files,
        seed_summaries,
        checks: vec![Check::le("max_se_multiples", worst_sigma, cfg.tol)],
        timings: Vec::new(),
    })
}

/// Slope of ln|S_{n+1} − S_n| against the closed-form rate −2 Re Λ.
fn run_pade_error(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let t = interior_t(cfg)?;
    let rate = -2.0 * lyapunov_gamma(&p, &t, &spec())?.value.re;

    let outs = per_seed(&cfg.seeds, |seed| {
        let stream = CoefficientStream::gamma(p, seed, 0);
        let fit = pade_error_rate(&stream, &t, cfg.n_min, cfg.n_max)?;
        // log-difference series for the per-seed CSV
        let mut s = stream.clone();
        s.reset();
        let mut state = LogConvergentState::start(&t, s.next_coefficient());
        let ln_t = t.value().norm().ln();
        let stride = ((cfg.n_max - cfg.n_min) / 400).max(1);
        let mut rows = Vec::new();
        let mut prev_q = state.q_log().re;
        for n in 1..cfg.n_max {
            state.step(s.next_coefficient())?;
            if n >= cfg.n_min && (n - cfg.n_min) % stride == 0 {
                rows.push((n, n as f64 * ln_t - prev_q - state.q_log().re));
            }
            prev_q = state.q_log().re;
        }
        Ok((fit, rows))
    })?;

    let mut files = Vec::new();
    let mut seed_summaries = Vec::new();
    let mut summary = String::from(
        "seed,slope (empirical),slope_se (empirical),closed_rate (closed-form),rel_err (derived)\n",
    );
    let mut slopes = Vec::new();
    for (seed, (fit, rows)) in cfg.seeds.iter().zip(&outs) {
        let mut csv = String::from("n,ln_abs_diff (empirical)\n");
        for (n, y) in rows {
            let _ = writeln!(csv, "{n},{y:e}");
        }
        files.push((format!("pade_error_seed{seed}.csv"), csv));
        let rel = (fit.slope - rate).abs() / rate.abs();
        let _ = writeln!(
            summary,
            "{seed},{:e},{:e},{rate:e},{rel:e}",
            fit.slope, fit.slope_se
        );
        seed_summaries.push(format!("seed {seed} slope={:e} rel_err={rel:e}", fit.slope));
        slopes.push(fit.slope);
    }
    files.push(("summary.csv".into(), summary));
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let rel_mean = (mean - rate).abs() / rate.abs();
    Ok(RunReport {
        files,
        seed_summaries,
        checks: vec![Check::le("mean_slope_rel_err", rel_mean, cfg.tol)],
        timings: Vec::new(),
    })
}

/// Quadrature measure CDF against the deterministic-baseline CDF.
fn run_measure(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let outs = per_seed(&cfg.seeds, |seed| {
        let stream = CoefficientStream::gamma(p, seed, 0);
        let coeffs = stream.take_fresh(2 * cfg.n);
        let j = build_jacobi(&coeffs)?;
        let meas = quadrature_measure(&j, 1e-12)?;
        let moment_err = if cfg.n <= 20 {
            let m = stieltjes_core::cfrac::moments_from_coefficients(&coeffs)?;
            m.iter()
                .enumerate()
                .map(|(k, mk)| (meas.moment(k as u32) - mk).abs() / mk)
                .fold(0.0f64, f64::max)
        } else {
            0.0
        };
        Ok((meas, coeffs[0], moment_err))
    })?;

    let mut files = Vec::new();
    let mut seed_summaries = Vec::new();
    let mut worst_mass: f64 = 0.0;
    let mut worst_moment: f64 = 0.0;
    let mut summary = String::from(
        "seed,total_mass (empirical),expected_mass (closed-form),mass_rel_err (derived),max_moment_rel_err (derived)\n",
    );
    for (seed, (meas, s1, moment_err)) in cfg.seeds.iter().zip(&outs) {
        let mut csv = String::from(
            "node (empirical),weight (empirical),sigma_cdf (empirical),sigma_inf_cdf (closed-form baseline)\n",
        );
        let mut acc = 0.0;
        for (x, w) in meas.nodes().iter().zip(meas.weights()) {
            acc += w;
            let _ = writeln!(csv, "{x:e},{w:e},{acc:e},{:e}", baseline_sigma_cdf(*x));
        }
        files.push((format!("measure_seed{seed}.csv"), csv));
        let expected = 1.0 / s1;
        let rel = (meas.total_mass() - expected).abs() / expected;
        worst_mass = worst_mass.max(rel);
        worst_moment = worst_moment.max(*moment_err);
        let _ = writeln!(
            summary,
            "{seed},{:e},{expected:e},{rel:e},{moment_err:e}",
            meas.total_mass()
        );
        seed_summaries.push(format!("seed {seed} mass_rel_err={rel:e}"));
    }
    files.push(("summary.csv".into(), summary));
    let mut checks = vec![Check::le("max_mass_rel_err", worst_mass, cfg.tol)];
    if cfg.n <= 20 {
        checks.push(Check::le("max_moment_rel_err", worst_moment, 1e-8));
    }
    Ok(RunReport {
        files,
        seed_summaries,
        checks,
        timings: Vec::new(),
    })
}

/// Forward-iterate statistics against the stationary density.
fn run_invariant(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let p = gamma_params(cfg)?;
    let t = interior_t(cfg)?;
    if cfg.t_im == 0.0 {
        return Err(RunError::Usage(
            "invariant: t must be non-real (the stationary density degenerates on the real axis); set t_im".into(),
        ));
    }
    let ip = InvariantDensityParams::from_gamma(&p, &t)?;
    let dens = InvariantDensity::new(ip, &spec())?;
    let marg = InvariantMarginals::build(&dens, 1400, 641);
    let norm_err = (marg.total - 1.0).abs();
    let lam = stieltjes_core::specfun::bessel::k_scaled(ip.shape(), ip.k_argument(), &spec())?
        .dlog_da();
    let est = marg.lyapunov_estimate();
    let mom_err = (est.re - lam.re).abs().max((est.im - lam.im).abs());

    let threshold = 1.63 / (cfg.samples as f64).sqrt();
    let outs = per_seed(&cfg.seeds, |seed| {
        let template = CoefficientStream::new(StreamKind::Gamma(p), seed, 0)?;
        let samples = forward_iterate_samples(&template, &t, cfg.samples, cfg.burn_in)?;
        let mut rs: Vec<f64> = samples.iter().map(|z| z.norm()).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks_r = ks_statistic(&rs, |r| marg.radial_cdf(r));
        let mut ths: Vec<f64> = samples.iter().map(|z| z.im.atan2(z.re)).collect();
        ths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks_th = ks_statistic(&ths, |x| marg.angular_cdf(x));
        Ok((rs, ks_r, ks_th))
    })?;

    let mut files = Vec::new();
    let mut seed_summaries = Vec::new();
    let mut summary = String::from(
        "seed,ks_radial (derived),ks_angular (derived),ks_threshold_1pct (closed-form)\n",
    );
    let mut worst_ks: f64 = 0.0;
    for (seed, (rs, ks_r, ks_th)) in cfg.seeds.iter().zip(&outs) {
        // empirical vs model radial CDF at ~200 quantiles
        let mut csv = String::from(
            "r,radial_cdf (closed-form),empirical_cdf (empirical)\n",
        );
        let step = (rs.len() / 200).max(1);
        for (i, r) in rs.iter().enumerate().step_by(step) {
            let _ = writeln!(
                csv,
                "{r:e},{:e},{:e}",
                marg.radial_cdf(*r),
                (i + 1) as f64 / rs.len() as f64
            );
        }
        files.push((format!("invariant_seed{seed}.csv"), csv));
        worst_ks = worst_ks.max(*ks_r).max(*ks_th);
        let _ = writeln!(summary, "{seed},{ks_r:e},{ks_th:e},{threshold:e}");
        seed_summaries.push(format!("seed {seed} ks_radial={ks_r:e} ks_angular={ks_th:e}"));
    }
    files.push(("summary.csv".into(), summary));
    Ok(RunReport {
        files,
        seed_summaries,
        checks: vec![
            Check::le("normalization_err", norm_err, 1e-6),
            Check::le("moment_err", mom_err, cfg.tol),
            Check::le("max_ks", worst_ks, threshold),
        ],
        timings: Vec::new(),
    })
}

/// Closed-form deterministic baseline tables and the large-shape
/// Lyapunov residual.
fn run_baseline(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let grid = lambda_grid(cfg);
    let mut csv = String::from(
        "lambda,N_inf (closed-form),rho_inf (closed-form),sigma_cdf_inf (closed-form)\n",
    );
    for &l in &grid {
        let rho = baseline_dos(l).unwrap_or(f64::INFINITY);
        let _ = writeln!(
            csv,
            "{l:e},{:e},{rho:e},{:e}",
            baseline_idos(l),
            baseline_sigma_cdf(l)
        );
    }

    let t = Complex64::new(cfg.t_re, cfg.t_im);
    let cp = interior_t(cfg)?;
    let linf = baseline_lyapunov(t);
    let limit = lyapunov_large_a_term(t);
    let mut resid_csv = String::from(
        "a,scaled_residual (empirical),limit (closed-form),abs_err (derived)\n",
    );
    let mut errs = Vec::new();
    for &a in &[64.0, 256.0, 1024.0] {
        let p = GammaParams::new(a, 1.0 / a).map_err(RunError::from)?;
        let lam = lyapunov_gamma(&p, &cp, &spec())?.value;
        let scaled = a * (lam - linf);
        let err = (scaled - limit).norm();
        errs.push(err);
        let _ = writeln!(resid_csv, "{a},{:e},{:e},{err:e}", scaled.re, limit.re);
    }
    let shrinking = errs[0] > errs[1] && errs[1] > errs[2];
    Ok(RunReport {
        files: vec![
            ("summary.csv".into(), csv),
            ("lyapunov_residual.csv".into(), resid_csv),
        ],
        seed_summaries: Vec::new(),
        checks: vec![
            Check::le("residual_rel_err_a256", errs[1] / limit.norm(), cfg.tol),
            Check::gt("errors_shrinking", if shrinking { 1.0 } else { 0.0 }, 0.5),
        ],
        timings: Vec::new(),
    })
}

/// Write a finished report plus the manifest into `dir`.
pub fn write_report(
    dir: &std::path::Path,
    cfg: &ExperimentConfig,
    report: &RunReport,
) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)?;
    for (name, content) in &report.files {
        std::fs::write(dir.join(name), content)?;
    }
    let mut manifest = String::new();
    let _ = writeln!(
        manifest,
        "artifact = stieltjes-lab {}",
        env!("CARGO_PKG_VERSION")
    );
    for line in cfg.emit().lines() {
        let _ = writeln!(manifest, "config.{line}");
    }
    for s in &report.seed_summaries {
        let _ = writeln!(manifest, "seed_summary {s}");
    }
    for c in &report.checks {
        let _ = writeln!(
            manifest,
            "check {} observed={:e} bound={:e} result={}",
            c.name,
            c.observed,
            c.bound,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    // timings vary run to run; they are excluded from the determinism
    // contract, which covers the CSVs
    for (label, secs) in &report.timings {
        let _ = writeln!(manifest, "timing {label} = {secs:.3}s");
    }
    std::fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

/// Parse a manifest back into its checks; print a table; 0 = all pass.
pub fn summarize(dir: &std::path::Path) -> Result<bool, RunError> {
    let path = dir.join("manifest.txt");
    let text = std::fs::read_to_string(&path).map_err(|e| {
        RunError::Usage(format!("cannot read manifest {}: {e}", path.display()))
    })?;
    let mut any = false;
    let mut all_pass = true;
    println!("{:<28} {:>14} {:>14} {:>7}", "check", "observed", "bound", "result");
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("check ") {
            let mut name = "";
            let mut observed = "";
            let mut bound = "";
            let mut result = "";
            for (i, tok) in rest.split_whitespace().enumerate() {
                if i == 0 {
                    name = tok;
                } else if let Some(v) = tok.strip_prefix("observed=") {
                    observed = v;
                } else if let Some(v) = tok.strip_prefix("bound=") {
                    bound = v;
                } else if let Some(v) = tok.strip_prefix("result=") {
                    result = v;
                }
            }
            if name.is_empty() || result.is_empty() {
                return Err(RunError::Usage(format!(
                    "corrupt check line in manifest: `{line}`"
                )));
            }
            any = true;
            all_pass &= result == "PASS";
            println!("{name:<28} {observed:>14} {bound:>14} {result:>7}");
        }
    }
    if !any {
        return Err(RunError::Usage(
            "manifest contains no check lines".into(),
        ));
    }
    Ok(all_pass)
}

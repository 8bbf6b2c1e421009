// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a line-oriented `key = value` format with
//! `#` comments. Unknown keys, type mismatches and out-of-range values
//! are reported with their line number. `emit` produces a canonical
//! text that parses back to the same configuration.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Dos,
    Idos,
    Lyapunov,
    PadeError,
    Measure,
    Invariant,
    Baseline,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dos" => Some(Self::Dos),
            "idos" => Some(Self::Idos),
            "lyapunov" => Some(Self::Lyapunov),
            "pade-error" => Some(Self::PadeError),
            "measure" => Some(Self::Measure),
            "invariant" => Some(Self::Invariant),
            "baseline" => Some(Self::Baseline),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dos => "dos",
            Self::Idos => "idos",
            Self::Lyapunov => "lyapunov",
            Self::PadeError => "pade-error",
            Self::Measure => "measure",
            Self::Invariant => "invariant",
            Self::Baseline => "baseline",
        }
    }
}

/// Grid spacing for λ grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Linear,
    Log,
}

/// Full experiment description. Field defaults are recorded in the
/// manifest through `emit`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Gamma shape a > 0.
    pub a: f64,
    /// Gamma scale b > 0.
    pub b: f64,
    /// Evaluation point t (experiments on the cut use the λ grid).
    pub t_re: f64,
    pub t_im: f64,
    /// λ grid for dos/idos/baseline.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub grid: GridKind,
    /// Matrix size (dos/measure) or chain length (lyapunov).
    pub n: usize,
    /// Rate-fit window (pade-error).
    pub n_min: usize,
    pub n_max: usize,
    /// Sample count and burn-in (invariant).
    pub samples: usize,
    pub burn_in: usize,
    /// Seeds; non-empty.
    pub seeds: Vec<u64>,
    /// Experiment tolerance (meaning documented per experiment).
    pub tol: f64,
    /// Output directory.
    pub out: String,
}

impl ExperimentConfig {
    /// Defaults for a given experiment; tolerances are the embedded
    /// acceptance bounds.
    pub fn defaults(experiment: Experiment) -> Self {
        let tol = match experiment {
            Experiment::Dos => 0.06,
            Experiment::Idos => 1e-6,
            Experiment::Lyapunov => 3.0,
            Experiment::PadeError => 0.01,
            Experiment::Measure => 1e-10,
            Experiment::Invariant => 1e-5,
            Experiment::Baseline => 0.05,
        };
        Self {
            experiment,
            a: 8.0,
            b: 0.125,
            t_re: 1.0,
            t_im: 0.0,
            lambda_min: 0.05,
            lambda_max: 20.0,
            grid_points: 200,
            grid: GridKind::Linear,
            n: match experiment {
                Experiment::Lyapunov => 1_000_000,
                _ => 256,
            },
            n_min: 1000,
            n_max: 10_000,
            samples: 100_000,
            burn_in: 64,
            seeds: vec![0],
            tol,
            out: "runs".into(),
        }
    }

    /// Canonical text that parses back to `self`.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("experiment = {}\n", self.experiment.name()));
        s.push_str(&format!("a = {:e}\n", self.a));
        s.push_str(&format!("b = {:e}\n", self.b));
        s.push_str(&format!("t_re = {:e}\n", self.t_re));
        s.push_str(&format!("t_im = {:e}\n", self.t_im));
        s.push_str(&format!("lambda_min = {:e}\n", self.lambda_min));
        s.push_str(&format!("lambda_max = {:e}\n", self.lambda_max));
        s.push_str(&format!("grid_points = {}\n", self.grid_points));
        s.push_str(&format!(
            "grid = {}\n",
            match self.grid {
                GridKind::Linear => "linear",
                GridKind::Log => "log",
            }
        ));
        s.push_str(&format!("n = {}\n", self.n));
        s.push_str(&format!("n_min = {}\n", self.n_min));
        s.push_str(&format!("n_max = {}\n", self.n_max));
        s.push_str(&format!("samples = {}\n", self.samples));
        s.push_str(&format!("burn_in = {}\n", self.burn_in));
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        s.push_str(&format!("seeds = {}\n", seeds.join(",")));
        s.push_str(&format!("tol = {:e}\n", self.tol));
        s.push_str(&format!("out = {}\n", self.out));
        s
    }
}

/// Parse failure with its source line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parse `key = value` text. `experiment` selects the defaults; a
/// conflicting `experiment` key inside the text is an error.
pub fn parse_config(text: &str, experiment: Experiment) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let err = |message: String| ConfigError {
            line: line_no,
            message,
        };
        let parse_f64 = |field: &str| -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| err(format!("{field}: not a number: `{value}`")))
        };
        let parse_usize = |field: &str| -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .map_err(|_| err(format!("{field}: not a non-negative integer: `{value}`")))
        };
        match key {
            "experiment" => {
                let named = Experiment::parse(value)
                    .ok_or_else(|| err(format!("unknown experiment `{value}`")))?;
                if named != experiment {
                    return Err(err(format!(
                        "experiment `{value}` conflicts with the requested `{}`",
                        experiment.name()
                    )));
                }
            }
            "a" => {
                cfg.a = parse_f64("a")?;
                if !(cfg.a > 0.0) {
                    return Err(err(format!("a: shape must be > 0, got {}", cfg.a)));
                }
            }
            "b" => {
                cfg.b = parse_f64("b")?;
                if !(cfg.b > 0.0) {
                    return Err(err(format!("b: scale must be > 0, got {}", cfg.b)));
                }
            }
            "t_re" => cfg.t_re = parse_f64("t_re")?,
            "t_im" => cfg.t_im = parse_f64("t_im")?,
            "lambda_min" => {
                cfg.lambda_min = parse_f64("lambda_min")?;
                if !(cfg.lambda_min > 0.0) {
                    return Err(err("lambda_min: must be > 0".into()));
                }
            }
            "lambda_max" => cfg.lambda_max = parse_f64("lambda_max")?,
            "grid_points" => {
                cfg.grid_points = parse_usize("grid_points")?;
                if cfg.grid_points < 2 {
                    return Err(err("grid_points: need at least 2".into()));
                }
            }
            "grid" => {
                cfg.grid = match value {
                    "linear" => GridKind::Linear,
                    "log" => GridKind::Log,
                    other => {
                        return Err(err(format!("grid: expected linear|log, got `{other}`")))
                    }
                }
            }
            "n" => {
                cfg.n = parse_usize("n")?;
                if cfg.n == 0 {
                    return Err(err("n: must be >= 1".into()));
                }
            }
            "n_min" => cfg.n_min = parse_usize("n_min")?,
            "n_max" => cfg.n_max = parse_usize("n_max")?,
            "samples" => {
                cfg.samples = parse_usize("samples")?;
                if cfg.samples == 0 {
                    return Err(err("samples: must be >= 1".into()));
                }
            }
            "burn_in" => cfg.burn_in = parse_usize("burn_in")?,
            "seeds" => {
                let mut seeds = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    seeds.push(part.parse::<u64>().map_err(|_| {
                        err(format!("seeds: not an unsigned integer: `{part}`"))
                    })?);
                }
                if seeds.is_empty() {
                    return Err(err("seeds: list must be non-empty".into()));
                }
                cfg.seeds = seeds;
            }
            "tol" => {
                cfg.tol = parse_f64("tol")?;
                if !(cfg.tol > 0.0) {
                    return Err(err("tol: must be > 0".into()));
                }
            }
            "out" => cfg.out = value.to_string(),
            other => {
                return Err(err(format!("unknown key `{other}`")));
            }
        }
    }
    if cfg.lambda_max <= cfg.lambda_min {
        return Err(ConfigError {
            line: 0,
            message: format!(
                "lambda_max: must exceed lambda_min ({} <= {})",
                cfg.lambda_max, cfg.lambda_min
            ),
        });
    }
    if cfg.n_max <= cfg.n_min {
        return Err(ConfigError {
            line: 0,
            message: format!("n_max: must exceed n_min ({} <= {})", cfg.n_max, cfg.n_min),
        });
    }
    Ok(cfg)
}

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use nonlocal_core::OperatorKind;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Apply,
    Eigen,
    Poisson,
    Evolve,
    #[value(name = "peri_convergence", alias = "peri-convergence")]
    PeriConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Sine,
    #[value(name = "poly_q1", alias = "poly-q1")]
    PolyQ1,
    #[value(name = "poly_q2", alias = "poly-q2")]
    PolyQ2,
    Step,
    Gaussian,
    #[value(name = "constant_one", alias = "constant-one")]
    ConstantOne,
}

impl Profile {
    /// Profile on `(-l, l)`. The polynomial profiles depend on `alpha`.
    pub fn eval(self, alpha: f64, half_width: f64, x: f64) -> f64 {
        let y = x / half_width;
        match self {
            Profile::Sine => (0.5 * std::f64::consts::PI * (1.0 + y)).sin(),
            Profile::PolyQ1 => (1.0 - y * y).max(0.0).powf(1.0 + 0.5 * alpha),
            Profile::PolyQ2 => (1.0 - y * y).max(0.0).powf(2.0 + 0.5 * alpha),
            Profile::Step => {
                if x.abs() < 0.2 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian => (-(4.0 * x) * (4.0 * x)).exp(),
            Profile::ConstantOne => 1.0,
        }
    }

    pub fn poly_degree(self) -> Option<u32> {
        match self {
            Profile::PolyQ1 => Some(1),
            Profile::PolyQ2 => Some(2),
            _ => None,
        }
    }
}

/// Command line of `nonlocal-lab`.
#[derive(Debug, Parser)]
#[command(name = "nonlocal-lab", version, about = "Experiments with nonlocal 1-D diffusion operators")]
pub struct Cli {
    #[arg(value_enum)]
    pub experiment: Experiment,

    /// Operator kinds: h (fractional), s (spectral), r (regional), p (peridynamic).
    #[arg(long, value_delimiter = ',', default_value = "h,s,r")]
    pub kinds: Vec<String>,

    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub half_width: f64,

    /// Number of cells N (default 1024, or 4096 for eigen).
    #[arg(long)]
    pub n_cells: Option<usize>,

    /// Peridynamic horizon(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<f64>,

    /// Output times for evolve, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub times: Vec<f64>,

    #[arg(long, value_enum)]
    pub profile: Option<Profile>,

    /// Domain ratio kappa for the eigenvalue scaling check.
    #[arg(long)]
    pub scale_ratio: Option<f64>,

    /// Coefficient r of the reaction term in u_t = -A u + r u.
    #[arg(long, default_value_t = 0.0)]
    pub reaction_rate: f64,

    /// Number of eigenvalues written per operator.
    #[arg(long, default_value_t = 20)]
    pub modes: usize,

    /// Run regional Poisson problems with alpha <= 1.
    #[arg(long)]
    pub allow_formal: bool,

    #[arg(long)]
    pub out: PathBuf,
}

/// Validated experiment configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(serialize_with = "kind_tags")]
    pub kinds: Vec<OperatorKind>,
    pub alphas: Vec<f64>,
    pub half_width: f64,
    pub n_cells: usize,
    pub delta: Vec<f64>,
    pub times: Vec<f64>,
    pub profile: Option<Profile>,
    pub scale_ratio: Option<f64>,
    pub reaction_rate: f64,
    pub modes: usize,
    pub allow_formal: bool,
    pub output_dir: PathBuf,
}

fn kind_tags<S: serde::Serializer>(kinds: &[OperatorKind], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(kinds.iter().map(|k| k.tag()))
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let mut kinds = Vec::new();
        for k in &cli.kinds {
            let kind: OperatorKind = k.trim().parse().map_err(|e| config_err(format!("{e}")))?;
            if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
        if cli.experiment == Experiment::PeriConvergence {
            kinds = vec![OperatorKind::Fractional, OperatorKind::Peridynamic];
        }
        if kinds.is_empty() {
            return Err(config_err("no operator kinds given"));
        }

        if cli.alphas.is_empty() {
            return Err(config_err("no alphas given"));
        }
        let only_spectral = kinds.iter().all(|k| *k == OperatorKind::Spectral);
        for &a in &cli.alphas {
            let ok = a.is_finite() && a > 0.0 && (a < 2.0 || (a == 2.0 && only_spectral));
            if !ok {
                return Err(config_err(format!(
                    "alpha {a} outside (0, 2) (alpha = 2 is accepted for the spectral kind alone)"
                )));
            }
        }

        if !(cli.half_width.is_finite() && cli.half_width > 0.0) {
            return Err(config_err(format!("half-width must be positive, got {}", cli.half_width)));
        }
        let n_cells = cli.n_cells.unwrap_or(match cli.experiment {
            Experiment::Eigen => 4096,
            _ => 1024,
        });
        if n_cells < 4 {
            return Err(config_err(format!("n-cells must be at least 4, got {n_cells}")));
        }
        let h = 2.0 * cli.half_width / n_cells as f64;

        let needs_delta = kinds.contains(&OperatorKind::Peridynamic);
        if needs_delta && cli.delta.is_empty() {
            return Err(config_err("--delta is required when kind p is selected"));
        }
        if !needs_delta && !cli.delta.is_empty() {
            return Err(config_err("--delta is only meaningful with kind p"));
        }
        for &d in &cli.delta {
            if !(d.is_finite() && d >= h * (1.0 - 1e-12)) {
                return Err(config_err(format!("horizon {d} must be at least the grid spacing {h}")));
            }
        }
        if cli.experiment == Experiment::PeriConvergence {
            if cli.delta.len() < 2 {
                return Err(config_err("peri_convergence needs at least two horizons"));
            }
            if cli.delta.windows(2).any(|w| w[1] <= w[0]) {
                return Err(config_err("horizons must be strictly increasing"));
            }
        }

        let is_evolve = cli.experiment == Experiment::Evolve;
        if is_evolve && cli.times.is_empty() {
            return Err(config_err("--times is required for evolve"));
        }
        if !is_evolve && !cli.times.is_empty() {
            return Err(config_err("--times is only meaningful for evolve"));
        }
        if cli.times.iter().any(|t| !(t.is_finite() && *t > 0.0))
            || cli.times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(config_err("times must be positive and strictly increasing"));
        }

        if let Some(k) = cli.scale_ratio {
            if !(k.is_finite() && k > 0.0) {
                return Err(config_err(format!("scale ratio must be positive, got {k}")));
            }
        }
        if !cli.reaction_rate.is_finite() {
            return Err(config_err("reaction rate must be finite"));
        }
        if cli.modes == 0 {
            return Err(config_err("--modes must be positive"));
        }

        if cli.experiment == Experiment::Poisson
            && kinds.contains(&OperatorKind::Regional)
            && !cli.allow_formal
        {
            if let Some(a) = cli.alphas.iter().find(|a| **a <= 1.0) {
                return Err(config_err(format!(
                    "regional Poisson problem with alpha = {a} <= 1: the continuum solution does not \
                     exist for alpha <= 1; pass --allow-formal to compute the formal discrete solution"
                )));
            }
        }

        let profile = match cli.experiment {
            Experiment::Eigen => None,
            Experiment::Apply => Some(cli.profile.unwrap_or(Profile::Sine)),
            Experiment::Evolve => Some(cli.profile.unwrap_or(Profile::Step)),
            Experiment::Poisson | Experiment::PeriConvergence => {
                Some(cli.profile.unwrap_or(Profile::ConstantOne))
            }
        };

        Ok(Self {
            experiment: cli.experiment,
            kinds,
            alphas: cli.alphas,
            half_width: cli.half_width,
            n_cells,
            delta: cli.delta,
            times: cli.times,
            profile,
            scale_ratio: cli.scale_ratio,
            reaction_rate: cli.reaction_rate,
            modes: cli.modes,
            allow_formal: cli.allow_formal,
            output_dir: cli.out,
        })
    }
}

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use nonlocal_core::oracles::series_poisson_spectral;
use nonlocal_core::solvers::{evolve_with, fit_parabola_scale};
use nonlocal_core::spectral::{
    eigenvalues_dense, report_row, spectral_decomposition as sine_spectral_decomposition,
    spectral_eigenvalue, EigenDecomposition,
};
use nonlocal_core::{
    apply, assemble, eig_sym, exact_frac_lap_poly, gamma, peridynamic_convergence, q1_correction,
    q2_correction, sample, solve_poisson, EvolutionSpec, Field, FractionalOrder,
    Grid1D, Horizon, OperatorKind, OperatorMatrix,
};

use crate::config::{Experiment, ExperimentConfig, Profile};
use crate::csv::{format_value, Table};
use crate::error::{numerical, CliError};

/// Files and derived quantities produced by one experiment, before writing.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Table)>,
    pub notes: Vec<String>,
    pub fits: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy)]
struct Case {
    kind: OperatorKind,
    alpha: f64,
    delta: Option<f64>,
}

impl Case {
    fn label(&self) -> String {
        let mut s = format!("{}_a{}", self.kind.tag(), format_value(self.alpha));
        if let Some(d) = self.delta {
            s.push_str(&format!("_d{}", format_value(d)));
        }
        s
    }

    fn order(&self) -> Result<FractionalOrder, CliError> {
        let o = if self.kind == OperatorKind::Spectral {
            FractionalOrder::spectral(self.alpha)
        } else {
            FractionalOrder::new(self.alpha)
        };
        o.map_err(|e| CliError::Config(e.to_string()))
    }

    fn assemble(&self, grid: &Grid1D) -> Result<OperatorMatrix, CliError> {
        let horizon = match self.delta {
            Some(d) => Some(Horizon::new(d).map_err(|e| CliError::Config(e.to_string()))?),
            None => None,
        };
        assemble(self.kind, grid, self.order()?, horizon).map_err(numerical("assemble"))
    }
}

fn cases(cfg: &ExperimentConfig) -> Vec<Case> {
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        for &alpha in &cfg.alphas {
            if kind == OperatorKind::Peridynamic {
                for &d in &cfg.delta {
                    out.push(Case { kind, alpha, delta: Some(d) });
                }
            } else {
                out.push(Case { kind, alpha, delta: None });
            }
        }
    }
    out
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn grid_of(cfg: &ExperimentConfig) -> Result<Grid1D, CliError> {
    Grid1D::new(cfg.half_width, cfg.n_cells).map_err(|e| CliError::Config(e.to_string()))
}

fn sample_profile(grid: &Grid1D, profile: Profile, alpha: f64) -> Result<Field, CliError> {
    let l = grid.half_width();
    sample(grid, |x| profile.eval(alpha, l, x)).map_err(numerical("sample"))
}

/// Three-point Laplacian, used for the classical reference curves.
fn classical_operator(grid: &Grid1D) -> Result<OperatorMatrix, CliError> {
    let order = FractionalOrder::spectral(2.0).expect("alpha = 2 is spectral-admissible");
    assemble(OperatorKind::Spectral, grid, order, None).map_err(numerical("assemble"))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    match cfg.experiment {
        Experiment::Apply => run_apply(cfg),
        Experiment::Eigen => run_eigen(cfg),
        Experiment::Poisson => run_poisson(cfg),
        Experiment::Evolve => run_evolve(cfg),
        Experiment::PeriConvergence => run_peri(cfg),
    }
}

/// Closed-form image of the profile under the case's operator, when known.
fn apply_reference(
    case: &Case,
    profile: Profile,
    grid: &Grid1D,
    x: f64,
) -> Result<Option<f64>, CliError> {
    let l = grid.half_width();
    let a = case.alpha;
    if case.kind == OperatorKind::Spectral {
        return Ok((profile == Profile::Sine)
            .then(|| (PI / (2.0 * l)).powf(a) * (0.5 * PI * (1.0 + x / l)).sin()));
    }
    let Some(q) = profile.poly_degree() else {
        return Ok(None);
    };
    let order = case.order()?;
    let u = profile.eval(a, l, x);
    let exact_h = l.powf(-a) * exact_frac_lap_poly(order, q, x / l).map_err(numerical("exact_frac_lap_poly"))?;
    Ok(match (case.kind, case.delta) {
        (OperatorKind::Fractional, _) => Some(exact_h),
        (OperatorKind::Regional, _) => {
            Some(exact_h - q1_correction(order, l, x).map_err(numerical("q1_correction"))? * u)
        }
        (OperatorKind::Peridynamic, Some(d)) if d >= 2.0 * l => {
            let h = Horizon::new(d).map_err(|e| CliError::Config(e.to_string()))?;
            Some(exact_h - q2_correction(order, h).map_err(numerical("q2_correction"))? * u)
        }
        _ => None,
    })
}

fn run_apply(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let grid = grid_of(cfg)?;
    let profile = cfg.profile.expect("apply has a profile");
    let results: Vec<(Case, Table, Field)> = cases(cfg)
        .par_iter()
        .map(|case| {
            let op = case.assemble(&grid)?;
            let u = sample_profile(&grid, profile, case.alpha)?;
            let v = apply(&op, &u).map_err(numerical("apply"))?;
            let label = case.label();
            let xs = grid.interior();
            let refs = xs
                .iter()
                .map(|&x| apply_reference(case, profile, &grid, x))
                .collect::<Result<Vec<_>, _>>()?;
            let with_ref = refs.iter().all(Option::is_some);
            let mut cols = vec!["x".to_string(), format!("u_{label}")];
            if with_ref {
                cols.push(format!("exact_{label}"));
            }
            let mut t = Table::new(cols);
            for (j, &x) in xs.iter().enumerate() {
                let mut row = vec![x, v.values()[j]];
                if with_ref {
                    row.push(refs[j].expect("checked"));
                }
                t.push(row);
            }
            Ok((*case, t, v))
        })
        .collect::<Result<_, CliError>>()?;

    let mut out = Outputs::default();
    let lap = classical_operator(&grid)?;
    let mut alphas: Vec<f64> = cfg.alphas.clone();
    if profile.poly_degree().is_none() {
        alphas.truncate(1);
    }
    for &a in &alphas {
        let u = sample_profile(&grid, profile, a)?;
        let v = apply(&lap, &u).map_err(numerical("apply"))?;
        let (name, col) = if profile.poly_degree().is_some() {
            (format!("apply_classical_a{}.csv", format_value(a)), format!("u_classical_a{}", format_value(a)))
        } else {
            ("apply_classical.csv".to_string(), "u_classical".to_string())
        };
        let mut t = Table::new(vec!["x".into(), col]);
        for (x, y) in grid.interior().iter().zip(v.values()) {
            t.push(vec![*x, *y]);
        }
        out.files.push((name, t));
    }

    // Largest gap between the peridynamic and fractional images.
    let h_results: BTreeMap<String, &Field> = results
        .iter()
        .filter(|(c, _, _)| c.kind == OperatorKind::Fractional)
        .map(|(c, _, f)| (format_value(c.alpha), f))
        .collect();
    let mut gap = Table::new(header(&["alpha", "delta", "max_abs_diff"]));
    for (case, _, field) in &results {
        if case.kind != OperatorKind::Peridynamic {
            continue;
        }
        if let Some(fh) = h_results.get(&format_value(case.alpha)) {
            let d = field.max_diff(fh).map_err(numerical("max_diff"))?;
            gap.push(vec![case.alpha, case.delta.expect("p has delta"), d]);
        }
    }
    if !gap.rows.is_empty() {
        out.files.push(("apply_p_minus_h.csv".into(), gap));
    }
    for (case, t, _) in results {
        out.files.push((format!("apply_{}.csv", case.label()), t));
    }
    Ok(out)
}

/// Eigen-decomposition of one case; the spectral kind uses the sine basis.
fn decompose(case: &Case, grid: &Grid1D) -> Result<EigenDecomposition, CliError> {
    if case.kind == OperatorKind::Spectral {
        return spectral_decomposition(grid, case.alpha);
    }
    let op = case.assemble(grid)?;
    eig_sym(&op).map_err(numerical("eig_sym"))
}

fn spectral_decomposition(grid: &Grid1D, alpha: f64) -> Result<EigenDecomposition, CliError> {
    let order = FractionalOrder::spectral(alpha).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(sine_spectral_decomposition(grid, order))
}

fn scaled_eigenvalues(case: &Case, grid: &Grid1D, kappa: f64) -> Result<Vec<f64>, CliError> {
    let g = Grid1D::new(grid.half_width() * kappa, grid.n_cells())
        .map_err(|e| CliError::Config(e.to_string()))?;
    if case.kind == OperatorKind::Spectral {
        return Ok(spectral_decomposition(&g, case.alpha)?.eigenvalues().to_vec());
    }
    let op = case.assemble(&g)?;
    eigenvalues_dense(op.entries()).map_err(numerical("eigenvalues"))
}

fn run_eigen(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let grid = grid_of(cfg)?;
    let modes = cfg.modes.min(grid.n_interior());
    let all = cases(cfg);
    let results: Vec<(Case, Vec<f64>, Vec<(String, Table)>)> = all
        .par_iter()
        .map(|case| {
            let d = decompose(case, &grid)?;
            let label = case.label();
            let lam: Vec<f64> = d.eigenvalues()[..modes].to_vec();
            let mut files = Vec::new();

            let mut t = Table::new(vec!["k".into(), format!("lambda_{label}")]);
            for (k, l) in lam.iter().enumerate() {
                t.push(vec![(k + 1) as f64, *l]);
            }
            files.push((format!("eigen_{label}.csv"), t));

            let nf = modes.min(4);
            let mut cols = vec!["x".to_string()];
            cols.extend((1..=nf).map(|k| format!("phi{k}_{label}")));
            let mut t = Table::new(cols);
            let scale = grid.spacing().sqrt().recip();
            for (j, &x) in grid.interior().iter().enumerate() {
                let mut row = vec![x];
                row.extend((0..nf).map(|k| scale * d.eigenvectors().get(j, k)));
                t.push(row);
            }
            files.push((format!("eigenfunctions_{label}.csv"), t));

            if let Some(kappa) = cfg.scale_ratio {
                let scaled = scaled_eigenvalues(case, &grid, kappa)?;
                let mut t = Table::new(header(&["k", "lambda_l", "lambda_kl", "ratio", "kappa_pow_minus_alpha"]));
                for k in 0..modes {
                    t.push(vec![
                        (k + 1) as f64,
                        lam[k],
                        scaled[k],
                        scaled[k] / lam[k],
                        kappa.powf(-case.alpha),
                    ]);
                }
                files.push((format!("eigen_scaling_{label}.csv"), t));
            }
            Ok((*case, lam, files))
        })
        .collect::<Result<_, CliError>>()?;

    let mut out = Outputs::default();
    let find = |kind: OperatorKind, alpha: f64| {
        results
            .iter()
            .find(|(c, _, _)| c.kind == kind && c.alpha == alpha)
            .map(|(_, l, _)| l)
    };

    let has = |k: OperatorKind| cfg.kinds.contains(&k);
    if has(OperatorKind::Fractional) && has(OperatorKind::Regional) {
        let mut t = Table::new(header(&[
            "alpha", "k", "lambda_s", "lambda_h", "lambda_r", "mu", "lower_bound_ok",
            "upper_bound_ok", "asymptotic",
        ]));
        for &a in &cfg.alphas {
            let order = FractionalOrder::new(a).map_err(|e| CliError::Config(e.to_string()))?;
            let lh = find(OperatorKind::Fractional, a).expect("h computed");
            let lr = find(OperatorKind::Regional, a).expect("r computed");
            for k in 1..=modes {
                let r = report_row(&grid, order, k, lh[k - 1], lr[k - 1]);
                t.push(vec![
                    r.alpha,
                    k as f64,
                    r.lambda_s,
                    r.lambda_h,
                    r.lambda_r,
                    r.mu,
                    f64::from(u8::from(r.lower_bound_ok)),
                    f64::from(u8::from(r.upper_bound_ok)),
                    r.asymptotic,
                ]);
            }
        }
        out.files.push(("eigen_report.csv".into(), t));
        if modes >= 4 {
            out.notes.push(
                "classical eigenvalue for k = 4 is 4^2 pi^2 / 4 = 39.478 (not 29.478)"
                    .into(),
            );
        }
    }

    if has(OperatorKind::Fractional) && has(OperatorKind::Spectral) {
        let l = grid.half_width();
        let mut t = Table::new(header(&["alpha", "k", "lambda_s", "lambda_h", "abs_diff", "rel_diff"]));
        let mut best: Vec<(f64, f64)> = vec![(f64::NEG_INFINITY, f64::NAN); modes];
        for &a in &cfg.alphas {
            let order = FractionalOrder::new(a).map_err(|e| CliError::Config(e.to_string()))?;
            let lh = find(OperatorKind::Fractional, a).expect("h computed");
            for k in 1..=modes {
                let ls = spectral_eigenvalue(order, k, l);
                let diff = ls - lh[k - 1];
                t.push(vec![a, k as f64, ls, lh[k - 1], diff, diff / ls]);
                if diff > best[k - 1].0 {
                    best[k - 1] = (diff, a);
                }
            }
        }
        out.files.push(("eigen_gap.csv".into(), t));
        if cfg.alphas.len() > 1 {
            let mut t = Table::new(header(&["k", "alpha_cr", "max_abs_diff"]));
            for (k, (gap, a)) in best.iter().enumerate() {
                t.push(vec![(k + 1) as f64, *a, *gap]);
            }
            out.files.push(("eigen_gap_argmax.csv".into(), t));
        }
    }

    for (_, _, files) in results {
        out.files.extend(files);
    }
    Ok(out)
}

fn poisson_reference(case: &Case, profile: Profile,
    grid: &Grid1D,
) -> Result<Option<Vec<f64>>, CliError> {
    if profile != Profile::ConstantOne {
        return Ok(None);
    }
    let l = grid.half_width();
    let a = case.alpha;
    match case.kind {
        OperatorKind::Fractional => {
            let g = gamma(a + 1.0).map_err(numerical("gamma"))?;
            Ok(Some(grid.interior().iter().map(|x| (l * l - x * x).powf(0.5 * a) / g).collect()))
        }
        OperatorKind::Spectral => {
            let order = case.order()?;
            Ok(Some(
                grid.interior()
                    .iter()
                    .map(|x| l.powf(a) * series_poisson_spectral(order, x / l, 10_000))
                    .collect(),
            ))
        }
        _ => Ok(None),
    }
}

fn run_poisson(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let grid = grid_of(cfg)?;
    let profile = cfg.profile.expect("poisson has a profile");
    let results: Vec<(Case, Table, Option<f64>)> = cases(cfg)
        .par_iter()
        .map(|case| {
            let op = case.assemble(&grid)?;
            let f = sample_profile(&grid, profile, case.alpha)?;
            let u = solve_poisson(&op, &f).map_err(numerical("solve_poisson"))?;
            let label = case.label();
            let reference = poisson_reference(case, profile, &grid)?;
            let mut cols = vec!["x".to_string(), format!("u_{label}")];
            if reference.is_some() {
                cols.push(format!("exact_{label}"));
            }
            let mut t = Table::new(cols);
            for (j, &x) in grid.interior().iter().enumerate() {
                let mut row = vec![x, u.values()[j]];
                if let Some(r) = &reference {
                    row.push(r[j]);
                }
                t.push(row);
            }
            let fit = (case.kind == OperatorKind::Peridynamic).then(|| fit_parabola_scale(&u));
            Ok((*case, t, fit))
        })
        .collect::<Result<_, CliError>>()?;

    let mut out = Outputs::default();
    let lap = classical_operator(&grid)?;
    let f = sample_profile(&grid, profile, cfg.alphas[0])?;
    if profile.poly_degree().is_none() {
        let u = solve_poisson(&lap, &f).map_err(numerical("solve_poisson"))?;
        let mut t = Table::new(header(&["x", "u_classical"]));
        for (x, y) in grid.interior().iter().zip(u.values()) {
            t.push(vec![*x, *y]);
        }
        out.files.push(("poisson_classical.csv".into(), t));
    }
    for (case, t, fit) in results {
        let label = case.label();
        if case.kind == OperatorKind::Regional && case.alpha <= 1.0 {
            out.notes.push(format!(
                "poisson_{label}.csv is a formal discrete solution only: the continuum regional \
                 problem has no solution for alpha <= 1"
            ));
        }
        if let Some(c) = fit {
            out.fits.insert(format!("parabola_scale_{label}"), c);
        }
        out.files.push((format!("poisson_{label}.csv"), t));
    }
    Ok(out)
}

fn run_evolve(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let grid = grid_of(cfg)?;
    let profile = cfg.profile.expect("evolve has a profile");
    let u0 = sample_profile(&grid, profile, cfg.alphas[0])?;
    let spec = EvolutionSpec::new(u0.clone(), cfg.times.clone(), cfg.reaction_rate)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut all: Vec<(String, Result<EigenDecomposition, CliError>)> = cases(cfg)
        .par_iter()
        .map(|case| (case.label(), decompose(case, &grid)))
        .collect();
    all.push(("classical".into(), spectral_decomposition(&grid, 2.0)));

    let mut out = Outputs::default();
    let mut norms = Vec::new();
    for (label, decomp) in all {
        let decomp = decomp?;
        let fields = evolve_with(&decomp, &grid, &spec).map_err(numerical("evolve"))?;
        let mut t = Table::new(vec!["t".into(), "x".into(), format!("u_{label}")]);
        let mut n = vec![u0.l2_norm()];
        for (x, v) in grid.interior().iter().zip(u0.values()) {
            t.push(vec![0.0, *x, *v]);
        }
        for (time, field) in cfg.times.iter().zip(&fields) {
            for (x, v) in grid.interior().iter().zip(field.values()) {
                t.push(vec![*time, *x, *v]);
            }
            n.push(field.l2_norm());
        }
        norms.push((label.clone(), n));
        out.files.push((format!("evolve_{label}.csv"), t));
    }
    let mut cols = vec!["t".to_string()];
    cols.extend(norms.iter().map(|(l, _)| format!("norm_{l}")));
    let mut t = Table::new(cols);
    let times: Vec<f64> = std::iter::once(0.0).chain(cfg.times.iter().copied()).collect();
    for (i, time) in times.iter().enumerate() {
        let mut row = vec![*time];
        row.extend(norms.iter().map(|(_, n)| n[i]));
        t.push(row);
    }
    out.files.push(("evolve_norms.csv".into(), t));
    Ok(out)
}

fn run_peri(cfg: &ExperimentConfig) -> Result<Outputs, CliError> {
    let grid = grid_of(cfg)?;
    let profile = cfg.profile.expect("peri_convergence has a profile");
    let results: Vec<(f64, nonlocal_core::PeriConvergence)> = cfg
        .alphas
        .par_iter()
        .map(|&a| {
            let order = FractionalOrder::new(a).map_err(|e| CliError::Config(e.to_string()))?;
            let f = sample_profile(&grid, profile, a)?;
            let pc = peridynamic_convergence(&grid, order, &cfg.delta, &f)
                .map_err(numerical("peridynamic_convergence"))?;
            Ok((a, pc))
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = Outputs::default();
    for (a, pc) in results {
        let tag = format_value(a);
        let mut t = Table::new(vec!["delta".into(), format!("gap_a{tag}")]);
        for (d, g) in &pc.rows {
            t.push(vec![*d, *g]);
        }
        out.fits.insert(format!("slope_a{tag}"), pc.slope);
        out.files.push((format!("peri_convergence_a{tag}.csv"), t));
    }
    Ok(out)
}

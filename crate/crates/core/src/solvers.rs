//! Poisson solves, exact-in-time evolution and the peridynamic convergence study.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use crate::operators::{assemble_fractional, assemble_peridynamic, Horizon, OperatorMatrix};
use crate::spectral::{eig_sym, EigenDecomposition};
use crate::specfun::FractionalOrder;

/// Solves `A u = f` by Cholesky factorisation with one refinement step.
pub fn solve_poisson(op: &OperatorMatrix, f: &Field) -> Result<Field> {
    if !op.grid().same_as(f.grid()) {
        return Err(grid_mismatch(op.grid(), f.grid()));
    }
    let a = op.entries().to_faer();
    let llt = a.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
    let n = op.dim();
    let rhs = Mat::from_fn(n, 1, |i, _| f.values()[i]);
    let mut u = llt.solve(&rhs);
    let residual = &rhs - &a * &u;
    let correction = llt.solve(&residual);
    u += &correction;
    let values = (0..n).map(|i| u[(i, 0)]).collect();
    Field::new(op.grid(), values)
}

fn grid_mismatch(expected: &Grid1D, found: &Grid1D) -> Error {
    Error::GridMismatch {
        expected: expected.n_cells(),
        expected_half_width: expected.half_width(),
        found: found.n_cells(),
        found_half_width: found.half_width(),
    }
}

/// Initial data, output times and reaction coefficient of `u_t = -A u + r u`.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    initial: Field,
    times: Vec<f64>,
    reaction_rate: f64,
}

impl EvolutionSpec {
    pub fn new(initial: Field, times: Vec<f64>, reaction_rate: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTimes("no output times".into()));
        }
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidTimes("times must be positive and finite".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimes("times must be strictly increasing".into()));
        }
        if !reaction_rate.is_finite() {
            return Err(Error::InvalidArgument(format!("reaction rate {reaction_rate}")));
        }
        Ok(Self { initial, times, reaction_rate })
    }

    pub fn initial(&self) -> &Field {
        &self.initial
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn reaction_rate(&self) -> f64 {
        self.reaction_rate
    }
}

/// `u(t) = V exp((r - Lambda) t) V^T u0` at every requested time.
pub fn evolve(op: &OperatorMatrix, spec: &EvolutionSpec) -> Result<Vec<Field>> {
    if !op.grid().same_as(spec.initial.grid()) {
        return Err(grid_mismatch(op.grid(), spec.initial.grid()));
    }
    let decomp = eig_sym(op)?;
    evolve_with(&decomp, op.grid(), spec)
}

/// Same as [`evolve`] with a precomputed decomposition of the operator.
pub fn evolve_with(
    decomp: &EigenDecomposition,
    grid: &Grid1D,
    spec: &EvolutionSpec,
) -> Result<Vec<Field>> {
    if !grid.same_as(spec.initial.grid()) {
        return Err(grid_mismatch(grid, spec.initial.grid()));
    }
    let n = decomp.len();
    if n != grid.n_interior() {
        return Err(Error::DimensionMismatch(format!(
            "decomposition of size {n} on a grid with {} unknowns",
            grid.n_interior()
        )));
    }
    let v = decomp.eigenvectors();
    let u0 = spec.initial.values();
    let mut coef = vec![0.0; n];
    for (i, u) in u0.iter().enumerate() {
        for (k, ck) in v.row(i).iter().zip(coef.iter_mut()) {
            *ck += k * u;
        }
    }
    spec.times
        .iter()
        .map(|&t| {
            let weights: Vec<f64> = decomp
                .eigenvalues()
                .iter()
                .zip(&coef)
                .map(|(lam, c)| c * ((spec.reaction_rate - lam) * t).exp())
                .collect();
            let values = (0..n)
                .map(|i| v.row(i).iter().zip(&weights).map(|(a, b)| a * b).sum())
                .collect();
            Field::new(grid, values)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriConvergence {
    /// `(delta, ||u_p(delta) - u_h||_inf)` in the order of the input horizons.
    pub rows: Vec<(f64, f64)>,
    /// Least-squares slope of `log gap` against `log delta`.
    pub slope: f64,
}

/// Distance between the peridynamic and fractional Poisson solutions as the
/// horizon grows.
pub fn peridynamic_convergence(
    grid: &Grid1D,
    order: FractionalOrder,
    deltas: &[f64],
    f: &Field,
) -> Result<PeriConvergence> {
    if deltas.len() < 2 {
        return Err(Error::InvalidArgument("need at least two horizons".into()));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("horizons must be strictly increasing".into()));
    }
    let uh = solve_poisson(&assemble_fractional(grid, order)?, f)?;
    let rows = deltas
        .iter()
        .map(|&d| {
            let op = assemble_peridynamic(grid, order, Horizon::new(d)?)?;
            let up = solve_poisson(&op, f)?;
            Ok((d, up.max_diff(&uh)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().map(|(d, g)| (d.ln(), g.ln())).unzip();
    let slope = least_squares_slope(&xs, &ys)?;
    Ok(PeriConvergence { rows, slope })
}

/// Slope of the least-squares line through `(x, y)`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("slope needs two or more paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    if slope.is_finite() {
        Ok(slope)
    } else {
        Err(Error::InvalidArgument("degenerate abscissae in slope fit".into()))
    }
}

/// Least-squares `C` in `u(x) ~ C (l^2 - x^2)`.
pub fn fit_parabola_scale(u: &Field) -> f64 {
    let l = u.grid().half_width();
    let (num, den) = u
        .grid()
        .interior()
        .iter()
        .zip(u.values())
        .fold((0.0, 0.0), |(n, d), (x, v)| {
            let p = l * l - x * x;
            (n + p * v, d + p * p)
        });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample;
    use crate::operators::{apply, assemble_regional};

    fn setup(alpha: f64, n: usize) -> (Grid1D, FractionalOrder) {
        (Grid1D::new(1.0, n).unwrap(), FractionalOrder::new(alpha).unwrap())
    }

    #[test]
    fn poisson_residual_and_zero_rhs() {
        let (g, o) = setup(1.2, 128);
        let op = assemble_regional(&g, o).unwrap();
        let f = sample(&g, |x| 1.0 + x).unwrap();
        let u = solve_poisson(&op, &f).unwrap();
        let r = apply(&op, &u).unwrap();
        assert!(r.max_diff(&f).unwrap() <= 1e-10 * f.max_norm());
        let z = solve_poisson(&op, &Field::zeros(&g)).unwrap();
        assert_eq!(z.max_norm(), 0.0);
    }

    #[test]
    fn spec_validation() {
        let (g, _) = setup(1.0, 16);
        let u0 = Field::zeros(&g);
        assert!(EvolutionSpec::new(u0.clone(), vec![], 0.0).is_err());
        assert!(EvolutionSpec::new(u0.clone(), vec![0.0, 1.0], 0.0).is_err());
        assert!(EvolutionSpec::new(u0.clone(), vec![1.0, 0.5], 0.0).is_err());
        assert!(EvolutionSpec::new(u0, vec![0.5, 1.0], 1.0).is_ok());
    }

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|x| (3.0 * x.powf(-1.5)).ln()).collect();
        assert!((least_squares_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn parabola_fit_recovers_scale() {
        let (g, _) = setup(1.0, 64);
        let u = sample(&g, |x| 0.7 * (1.0 - x * x)).unwrap();
        assert!((fit_parabola_scale(&u) - 0.7).abs() < 1e-12);
    }
}

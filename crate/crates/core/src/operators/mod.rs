//! Assembly of the four nonlocal operators on the interior nodes of a grid.
//!
//! * `h`: fractional Laplacian of the zero extension (integral over the line)
//! * `s`: spectral fractional power of the Dirichlet Laplacian
//! * `r`: regional operator, integral restricted to the domain
//! * `p`: peridynamic operator, integral restricted to a horizon `delta`
//!
//! The integral kinds share one quadrature (see [`kernel`]); `h` and `p`
//! differ from `r` only by analytic diagonal terms.

mod kernel;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use crate::matrix::DenseMatrix;
use crate::specfun::{norm_const, FractionalOrder};
use kernel::Stencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    Fractional,
    Spectral,
    Regional,
    Peridynamic,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::Fractional,
        OperatorKind::Spectral,
        OperatorKind::Regional,
        OperatorKind::Peridynamic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            OperatorKind::Fractional => "h",
            OperatorKind::Spectral => "s",
            OperatorKind::Regional => "r",
            OperatorKind::Peridynamic => "p",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(OperatorKind::Fractional),
            "s" => Ok(OperatorKind::Spectral),
            "r" => Ok(OperatorKind::Regional),
            "p" => Ok(OperatorKind::Peridynamic),
            other => Err(Error::InvalidArgument(format!(
                "unknown operator kind {other:?} (expected h, s, r or p)"
            ))),
        }
    }
}

/// Peridynamic horizon `delta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Horizon(f64);

impl Horizon {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_finite() && delta > 0.0 {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidHorizon(delta))
        }
    }

    #[inline]
    pub fn delta(self) -> f64 {
        self.0
    }
}

/// Assembled operator on the interior nodes. Always symmetric.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    order: FractionalOrder,
    grid: Grid1D,
    horizon: Option<Horizon>,
    entries: DenseMatrix,
}

impl OperatorMatrix {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn horizon(&self) -> Option<Horizon> {
        self.horizon
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> DenseMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// `Q1(x) = (c / alpha) ((l + x)^{-alpha} + (l - x)^{-alpha})`, the kernel mass
/// outside `(-l, l)` seen from `x`.
pub fn q1_correction(order: FractionalOrder, half_width: f64, x: f64) -> Result<f64> {
    if !(x.abs() < half_width) {
        return Err(Error::OutsideDomain { x, half_width });
    }
    let a = order.alpha();
    let c = norm_const(order)?;
    Ok(c / a * ((half_width + x).powf(-a) + (half_width - x).powf(-a)))
}

/// `Q2 = (c / alpha) 2 delta^{-alpha}`, the kernel mass beyond the horizon.
pub fn q2_correction(order: FractionalOrder, horizon: Horizon) -> Result<f64> {
    let a = order.alpha();
    Ok(norm_const(order)? / a * 2.0 * horizon.delta().powf(-a))
}

fn require_integral(order: FractionalOrder) -> Result<()> {
    if order.is_integral() {
        Ok(())
    } else {
        Err(Error::InvalidOrder { alpha: order.alpha(), window: "(0, 2)" })
    }
}

/// Fills a symmetric Toeplitz-plus-diagonal matrix row by row.
fn fill_rows(n: usize, off: &[f64], diag: impl Fn(usize) -> f64 + Sync) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    m.as_mut_slice()
        .par_chunks_exact_mut(n)
        .enumerate()
        .for_each(|(r, row)| {
            for (c, v) in row.iter_mut().enumerate() {
                *v = if c == r { diag(r) } else { -off[r.abs_diff(c)] };
            }
        });
    m
}

fn integral_scale(grid: &Grid1D, order: FractionalOrder) -> Result<f64> {
    Ok(norm_const(order)? * grid.spacing().powf(-order.alpha()))
}

/// Regional operator: the singular integral restricted to `(-l, l)`.
pub fn assemble_regional(grid: &Grid1D, order: FractionalOrder) -> Result<OperatorMatrix> {
    require_integral(order)?;
    let n = grid.n_cells();
    let scale = integral_scale(grid, order)?;
    let st = Stencil::new(order.alpha(), n, None);
    let off: Vec<f64> = (0..n).map(|m| scale * st.coupling(m)).collect();
    let entries = fill_rows(n - 1, &off, |r| scale * st.interior_diag(r + 1));
    Ok(OperatorMatrix {
        kind: OperatorKind::Regional,
        order,
        grid: grid.clone(),
        horizon: None,
        entries,
    })
}

/// Fractional Laplacian of the zero extension: regional plus `diag(Q1)`.
pub fn assemble_fractional(grid: &Grid1D, order: FractionalOrder) -> Result<OperatorMatrix> {
    let mut op = assemble_regional(grid, order)?;
    let q1 = grid
        .interior()
        .iter()
        .map(|&x| q1_correction(order, grid.half_width(), x))
        .collect::<Result<Vec<_>>>()?;
    for (i, q) in q1.into_iter().enumerate() {
        let v = op.entries.get(i, i) + q;
        op.entries.set(i, i, v);
    }
    op.kind = OperatorKind::Fractional;
    Ok(op)
}

/// Peridynamic operator with horizon `delta >= h`.
///
/// For `delta >= 2l` every interaction inside the domain is kept and the
/// operator is `A_h - Q2 I`. Otherwise couplings beyond `delta` vanish and
/// the diagonal carries the exterior kernel mass up to `delta`.
pub fn assemble_peridynamic(
    grid: &Grid1D,
    order: FractionalOrder,
    horizon: Horizon,
) -> Result<OperatorMatrix> {
    require_integral(order)?;
    let h = grid.spacing();
    let delta = horizon.delta();
    if delta < h * (1.0 - 1e-12) {
        return Err(Error::HorizonTooSmall { delta, spacing: h });
    }
    if delta >= 2.0 * grid.half_width() {
        let mut op = assemble_fractional(grid, order)?;
        let q2 = q2_correction(order, horizon)?;
        for i in 0..op.dim() {
            let v = op.entries.get(i, i) - q2;
            op.entries.set(i, i, v);
        }
        op.kind = OperatorKind::Peridynamic;
        op.horizon = Some(horizon);
        return Ok(op);
    }
    let entries = truncated_entries(grid, order, delta)?;
    Ok(OperatorMatrix {
        kind: OperatorKind::Peridynamic,
        order,
        grid: grid.clone(),
        horizon: Some(horizon),
        entries,
    })
}

/// General horizon path (also valid for `delta >= 2l`, used in tests).
pub(crate) fn truncated_entries(grid: &Grid1D, order: FractionalOrder, delta: f64) -> Result<DenseMatrix> {
    let n = grid.n_cells();
    let scale = integral_scale(grid, order)?;
    let mut d = (delta / grid.spacing()).max(1.0);
    // A horizon meant to sit on a node should not leave a sliver cell.
    if (d - d.round()).abs() < 1e-10 * d {
        d = d.round();
    }
    let st = Stencil::new(order.alpha(), n, Some(d));
    let off: Vec<f64> = (0..n).map(|m| scale * st.coupling(m)).collect();
    let alpha = order.alpha();
    let overlap = |dist: usize| {
        if d > dist as f64 {
            kernel::power_integral(dist as f64, d, -alpha)
        } else {
            0.0
        }
    };
    Ok(fill_rows(n - 1, &off, |r| {
        let i = r + 1;
        scale * (st.interior_diag(i) + overlap(i) + overlap(n - i))
    }))
}

/// Spectral fractional power of the discrete Dirichlet Laplacian,
/// `V diag(mu_k^{alpha/2}) V^T`, assembled through the cosine sums
/// `A_ij = f(i - j) - f(i + j)`, `f(m) = (1/N) sum_k d_k cos(k pi m / N)`.
pub fn assemble_spectral(grid: &Grid1D, order: FractionalOrder) -> Result<OperatorMatrix> {
    let n = grid.n_cells();
    let half = 0.5 * order.alpha();
    let two_n = 2 * n;
    let cos_table: Vec<f64> = {
        let mut t = vec![0.0; two_n];
        for r in 0..=n {
            t[r] = (PI * r as f64 / n as f64).cos();
        }
        for r in n + 1..two_n {
            t[r] = t[two_n - r];
        }
        t
    };
    let scale = grid.spacing().powf(-order.alpha());
    let weights: Vec<f64> = (1..n)
        .map(|k| {
            let s = (0.5 * PI * k as f64 / n as f64).sin();
            (4.0 * s * s).powf(half)
        })
        .collect();
    let mut f = vec![0.0; two_n];
    f[..=n].par_iter_mut().enumerate().for_each(|(m, fm)| {
        let mut acc = 0.0;
        let mut idx = 0usize;
        for w in &weights {
            idx += m;
            if idx >= two_n {
                idx %= two_n;
            }
            acc += w * cos_table[idx];
        }
        *fm = scale * acc / n as f64;
    });
    for m in n + 1..two_n {
        f[m] = f[two_n - m];
    }
    let dim = n - 1;
    let mut entries = DenseMatrix::zeros(dim);
    entries
        .as_mut_slice()
        .par_chunks_exact_mut(dim)
        .enumerate()
        .for_each(|(r, row)| {
            let i = r + 1;
            for (c, v) in row.iter_mut().enumerate() {
                let j = c + 1;
                *v = f[i.abs_diff(j)] - f[i + j];
            }
        });
    Ok(OperatorMatrix {
        kind: OperatorKind::Spectral,
        order,
        grid: grid.clone(),
        horizon: None,
        entries,
    })
}

/// Assembles any kind. `horizon` is required for `p` and ignored otherwise.
pub fn assemble(
    kind: OperatorKind,
    grid: &Grid1D,
    order: FractionalOrder,
    horizon: Option<Horizon>,
) -> Result<OperatorMatrix> {
    match kind {
        OperatorKind::Fractional => assemble_fractional(grid, order),
        OperatorKind::Spectral => assemble_spectral(grid, order),
        OperatorKind::Regional => assemble_regional(grid, order),
        OperatorKind::Peridynamic => {
            let horizon = horizon.ok_or_else(|| {
                Error::InvalidArgument("peridynamic operator needs a horizon".into())
            })?;
            assemble_peridynamic(grid, order, horizon)
        }
    }
}

/// Matrix-vector product `A u`.
pub fn apply(op: &OperatorMatrix, field: &Field) -> Result<Field> {
    op.grid.check_same(field.grid())?;
    let values = op.entries.matvec(field.values())?;
    Field::new(&op.grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, Grid1D};
    use crate::spectral::{dst_decomposition, matrix_power};

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn symmetric_and_persymmetric() {
        let g = Grid1D::new(1.0, 32).unwrap();
        for a in [0.4, 1.0, 1.7] {
            for op in [
                assemble_fractional(&g, order(a)).unwrap(),
                assemble_regional(&g, order(a)).unwrap(),
                assemble_peridynamic(&g, order(a), Horizon::new(0.5).unwrap()).unwrap(),
            ] {
                assert!(op.entries().is_symmetric(0.0), "{} {a}", op.kind());
                assert!(op.entries().is_persymmetric(), "{} {a}", op.kind());
            }
        }
    }

    #[test]
    fn fractional_minus_regional_is_q1() {
        let g = Grid1D::new(1.5, 24).unwrap();
        let o = order(1.3);
        let h = assemble_fractional(&g, o).unwrap();
        let r = assemble_regional(&g, o).unwrap();
        for (i, &x) in g.interior().iter().enumerate() {
            let q = q1_correction(o, 1.5, x).unwrap();
            let d = h.entries().get(i, i) - r.entries().get(i, i);
            assert!((d - q).abs() <= 1e-12 * q, "{i}");
            for j in 0..g.n_interior() {
                if i != j {
                    assert_eq!(h.entries().get(i, j), r.entries().get(i, j));
                }
            }
        }
    }

    #[test]
    fn wide_horizon_shortcut_matches_general_path() {
        let g = Grid1D::new(1.0, 40).unwrap();
        for a in [0.5, 1.0, 1.5] {
            let o = order(a);
            let fast = assemble_peridynamic(&g, o, Horizon::new(2.5).unwrap()).unwrap();
            let slow = truncated_entries(&g, o, 2.5).unwrap();
            let scale = fast.entries().max_abs();
            assert!(fast.entries().max_abs_diff(&slow) <= 1e-12 * scale, "{a}");
        }
    }

    #[test]
    fn no_coupling_beyond_horizon() {
        let g = Grid1D::new(1.0, 40).unwrap();
        let op = assemble_peridynamic(&g, order(1.0), Horizon::new(0.25).unwrap()).unwrap();
        // delta = 5h: only neighbours strictly closer than delta interact.
        for j in 0..g.n_interior() {
            let v = op.entries().get(10, j);
            if 10usize.abs_diff(j) >= 5 {
                assert_eq!(v, 0.0, "{j}");
            } else if j != 10 {
                assert!(v < 0.0, "{j}");
            }
        }
    }

    #[test]
    fn horizon_below_spacing_rejected() {
        let g = Grid1D::new(1.0, 16).unwrap();
        let e = assemble_peridynamic(&g, order(1.0), Horizon::new(0.1).unwrap()).unwrap_err();
        assert!(matches!(e, Error::HorizonTooSmall { .. }));
        assert!(assemble_peridynamic(&g, order(1.0), Horizon::new(0.125).unwrap()).is_ok());
        assert!(assemble(OperatorKind::Peridynamic, &g, order(1.0), None).is_err());
    }

    #[test]
    fn spectral_is_matrix_power_of_laplacian() {
        let g = Grid1D::new(1.0, 24).unwrap();
        for a in [0.3, 1.0, 1.6] {
            let s = assemble_spectral(&g, order(a)).unwrap();
            let p = matrix_power(&dst_decomposition(&g), 0.5 * a).unwrap();
            let scale = s.entries().max_abs();
            assert!(s.entries().max_abs_diff(&p) <= 1e-10 * scale, "{a}");
        }
    }

    #[test]
    fn spectral_order_two_is_tridiagonal() {
        let g = Grid1D::new(1.0, 16).unwrap();
        let s = assemble_spectral(&g, FractionalOrder::spectral(2.0).unwrap()).unwrap();
        let h2 = g.spacing() * g.spacing();
        for i in 0..g.n_interior() {
            for j in 0..g.n_interior() {
                let want = match i.abs_diff(j) {
                    0 => 2.0 / h2,
                    1 => -1.0 / h2,
                    _ => 0.0,
                };
                assert!((s.entries().get(i, j) - want).abs() < 1e-9, "{i} {j}");
            }
        }
        assert!(assemble_regional(&g, FractionalOrder::spectral(2.0).unwrap()).is_err());
    }

    #[test]
    fn apply_checks_grid() {
        let g = Grid1D::new(1.0, 16).unwrap();
        let other = Grid1D::new(1.0, 32).unwrap();
        let op = assemble_regional(&g, order(1.2)).unwrap();
        let u = sample(&other, |x| 1.0 - x * x).unwrap();
        assert!(matches!(apply(&op, &u), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn kind_tags_round_trip() {
        for k in OperatorKind::ALL {
            assert_eq!(k.tag().parse::<OperatorKind>().unwrap(), k);
        }
        assert!("x".parse::<OperatorKind>().is_err());
    }
}

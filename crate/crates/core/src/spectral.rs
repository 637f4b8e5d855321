//! Symmetric eigendecomposition, the discrete sine eigenpairs of the
//! three-point Laplacian, matrix functions and eigenvalue validation helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use faer::Side;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::matrix::DenseMatrix;
use crate::operators::{assemble_fractional, assemble_regional, OperatorKind, OperatorMatrix};
use crate::specfun::FractionalOrder;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DenseMatrix,
    source_kind: Option<OperatorKind>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `k` (0-based) is the eigenvector of `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &DenseMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    pub fn source_kind(&self) -> Option<OperatorKind> {
        self.source_kind
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Full eigendecomposition of an assembled operator.
pub fn eig_sym(op: &OperatorMatrix) -> Result<EigenDecomposition> {
    let mut d = eig_sym_dense(op.entries())?;
    d.source_kind = Some(op.kind());
    Ok(d)
}

/// Eigenvalues of an assembled operator, ascending.
pub fn eigenvalues(op: &OperatorMatrix) -> Result<Vec<f64>> {
    eigenvalues_dense(op.entries())
}

fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    let tol = 1e-12 * m.max_abs().max(1.0);
    if m.is_symmetric(tol) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("matrix is not symmetric".into()))
    }
}

/// Even/odd blocks of an exactly persymmetric symmetric matrix.
///
/// With `J` the exchange matrix, eigenvectors are either `J`-symmetric or
/// `J`-antisymmetric, and each family is the spectrum of a half-size block.
struct Halves {
    even: DenseMatrix,
    odd: DenseMatrix,
}

fn split_persymmetric(m: &DenseMatrix) -> Halves {
    let n = m.dim();
    let half = n / 2;
    let centre = n % 2 == 1;
    let ne = half + usize::from(centre);
    let mut even = DenseMatrix::zeros(ne);
    let mut odd = DenseMatrix::zeros(half);
    for i in 0..half {
        for j in 0..half {
            let a = m.get(i, j);
            let b = m.get(i, n - 1 - j);
            even.set(i, j, a + b);
            odd.set(i, j, a - b);
        }
    }
    if centre {
        for i in 0..half {
            let v = std::f64::consts::SQRT_2 * m.get(i, half);
            even.set(i, half, v);
            even.set(half, i, v);
        }
        even.set(half, half, m.get(half, half));
    }
    Halves { even, odd }
}

fn faer_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if m.dim() == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0)));
    }
    let evd = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { size: m.dim(), norm: m.frobenius_norm() })?;
    let s = evd.S().column_vector();
    let values = (0..m.dim()).map(|i| s[i]).collect();
    Ok((values, DenseMatrix::from_faer(evd.U())))
}

fn faer_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { size: m.dim(), norm: m.frobenius_norm() })
}

fn sort_ascending(values: &mut [f64]) {
    values.sort_by(f64::total_cmp);
}

/// Eigendecomposition of a dense symmetric matrix.
///
/// Each eigenvector is normalised so that its first component with
/// magnitude above `1e-12` is positive.
pub fn eig_sym_dense(m: &DenseMatrix) -> Result<EigenDecomposition> {
    check_symmetric(m)?;
    let n = m.dim();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);
    if n >= 4 && m.is_persymmetric() {
        let half = n / 2;
        let Halves { even, odd } = split_persymmetric(m);
        let (ve, ue) = faer_eigen(&even)?;
        for (k, lam) in ve.into_iter().enumerate() {
            let mut v = vec![0.0; n];
            for i in 0..half {
                let y = FRAC_1_SQRT_2 * ue.get(i, k);
                v[i] = y;
                v[n - 1 - i] = y;
            }
            if n % 2 == 1 {
                v[half] = ue.get(half, k);
            }
            pairs.push((lam, v));
        }
        let (vo, uo) = faer_eigen(&odd)?;
        for (k, lam) in vo.into_iter().enumerate() {
            let mut v = vec![0.0; n];
            for i in 0..half {
                let y = FRAC_1_SQRT_2 * uo.get(i, k);
                v[i] = y;
                v[n - 1 - i] = -y;
            }
            pairs.push((lam, v));
        }
    } else {
        let (vals, u) = faer_eigen(m)?;
        for (k, lam) in vals.into_iter().enumerate() {
            pairs.push((lam, u.column(k)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = DenseMatrix::zeros(n);
    for (k, (lam, mut v)) in pairs.into_iter().enumerate() {
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        for (i, x) in v.into_iter().enumerate() {
            vectors.set(i, k, x);
        }
        eigenvalues.push(lam);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors, source_kind: None })
}

/// Eigenvalues only, ascending. Cheaper than [`eig_sym_dense`].
pub fn eigenvalues_dense(m: &DenseMatrix) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let mut values = if m.dim() >= 4 && m.is_persymmetric() {
        let Halves { even, odd } = split_persymmetric(m);
        let mut v = faer_values(&even)?;
        v.extend(faer_values(&odd)?);
        v
    } else {
        faer_values(m)?
    };
    sort_ascending(&mut values);
    Ok(values)
}

/// Eigenpairs of `(1/h^2) tridiag(-1, 2, -1)` on `n_cells - 1` unknowns:
/// `mu_k = (4/h^2) sin^2(k pi / 2N)`, `phi_k(j) = sqrt(2/N) sin(k pi j / N)`.
pub fn sine_eigenpairs(n_cells: usize, spacing: f64) -> Vec<(f64, Vec<f64>)> {
    let nf = n_cells as f64;
    let norm = (2.0 / nf).sqrt();
    (1..n_cells)
        .map(|k| {
            let s = (0.5 * PI * k as f64 / nf).sin();
            let mu = 4.0 * s * s / (spacing * spacing);
            let phi = (1..n_cells)
                .map(|j| norm * (PI * ((k * j) % (2 * n_cells)) as f64 / nf).sin())
                .collect();
            (mu, phi)
        })
        .collect()
}

pub fn dst_eigenpairs(grid: &Grid1D) -> Vec<(f64, Vec<f64>)> {
    sine_eigenpairs(grid.n_cells(), grid.spacing())
}

/// The sine eigenpairs packaged as a decomposition of the three-point Laplacian.
pub fn dst_decomposition(grid: &Grid1D) -> EigenDecomposition {
    let pairs = dst_eigenpairs(grid);
    let n = pairs.len();
    let mut vectors = DenseMatrix::zeros(n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, (mu, phi)) in pairs.into_iter().enumerate() {
        for (i, x) in phi.into_iter().enumerate() {
            vectors.set(i, k, x);
        }
        eigenvalues.push(mu);
    }
    EigenDecomposition { eigenvalues, eigenvectors: vectors, source_kind: None }
}

/// Decomposition of the spectral operator: the sine eigenvectors with
/// eigenvalues `mu_k^{alpha/2}`.
pub fn spectral_decomposition(grid: &Grid1D, order: FractionalOrder) -> EigenDecomposition {
    let mut d = dst_decomposition(grid);
    let p = 0.5 * order.alpha();
    for lam in &mut d.eigenvalues {
        *lam = lam.powf(p);
    }
    d.source_kind = Some(OperatorKind::Spectral);
    d
}

/// `V diag(lambda^p) V^T`.
pub fn matrix_power(decomp: &EigenDecomposition, p: f64) -> Result<DenseMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("matrix power must be finite, got {p}")));
    }
    let integral_power = p == p.trunc();
    let mut scaled = Vec::with_capacity(decomp.len());
    for &lam in &decomp.eigenvalues {
        if lam < 0.0 && !integral_power || lam <= 0.0 && p < 0.0 {
            return Err(Error::NonPositiveEigenvalue { power: p, eigenvalue: lam });
        }
        scaled.push(if p == 0.0 { 1.0 } else { lam.powf(p) });
    }
    let n = decomp.len();
    let v = decomp.eigenvectors.to_faer();
    let w = faer::Mat::from_fn(n, n, |i, k| v[(i, k)] * scaled[k]);
    let prod = &w * v.transpose();
    // Symmetrise against rounding in the product.
    Ok(DenseMatrix::from_fn(n, |i, j| 0.5 * (prod[(i, j)] + prod[(j, i)])))
}

/// Classical Dirichlet Laplacian eigenvalue on `(-l, l)`, `(k pi / 2l)^2`.
pub fn classical_eigenvalue(k: usize, half_width: f64) -> f64 {
    let w = k as f64 * PI / (2.0 * half_width);
    w * w
}

/// Spectral fractional eigenvalue `(k pi / 2l)^alpha`.
pub fn spectral_eigenvalue(order: FractionalOrder, k: usize, half_width: f64) -> f64 {
    (k as f64 * PI / (2.0 * half_width)).powf(order.alpha())
}

/// Large-`k` approximation of the `k`-th fractional Laplacian eigenvalue,
/// `(k pi / 2 - (2 - alpha) pi / 8)^alpha / l^alpha`.
pub fn asymptotic_eigenvalue(order: FractionalOrder, k: usize, half_width: f64) -> f64 {
    let a = order.alpha();
    (k as f64 * PI / 2.0 - (2.0 - a) * PI / 8.0).powf(a) / half_width.powf(a)
}

/// Size of the remainder term in [`asymptotic_eigenvalue`], `(2 - alpha) / (k sqrt(alpha))`.
pub fn asymptotic_remainder(order: FractionalOrder, k: usize) -> f64 {
    let a = order.alpha();
    (2.0 - a) / (k as f64 * a.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReportRow {
    pub alpha: f64,
    pub k: usize,
    pub lambda_s: f64,
    pub lambda_h: f64,
    pub lambda_r: f64,
    pub mu: f64,
    /// `lambda_s / 2 <= lambda_h`
    pub lower_bound_ok: bool,
    /// `lambda_h <= lambda_s`
    pub upper_bound_ok: bool,
    pub asymptotic: f64,
}

/// Builds one report row from already computed `h` and `r` eigenvalues.
pub fn report_row(
    grid: &Grid1D,
    order: FractionalOrder,
    k: usize,
    lambda_h: f64,
    lambda_r: f64,
) -> EigenReportRow {
    let l = grid.half_width();
    let lambda_s = spectral_eigenvalue(order, k, l);
    EigenReportRow {
        alpha: order.alpha(),
        k,
        lambda_s,
        lambda_h,
        lambda_r,
        mu: classical_eigenvalue(k, l),
        lower_bound_ok: 0.5 * lambda_s <= lambda_h,
        upper_bound_ok: lambda_h <= lambda_s,
        asymptotic: asymptotic_eigenvalue(order, k, l),
    }
}

/// Eigenvalue comparison table for each order and mode index (1-based).
pub fn eigen_report(
    grid: &Grid1D,
    orders: &[FractionalOrder],
    ks: &[usize],
) -> Result<Vec<EigenReportRow>> {
    let max = grid.n_interior();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > max) {
        return Err(Error::ModeOutOfRange { k, max });
    }
    let mut rows = Vec::with_capacity(orders.len() * ks.len());
    for &order in orders {
        let lh = eigenvalues(&assemble_fractional(grid, order)?)?;
        let lr = eigenvalues(&assemble_regional(grid, order)?)?;
        for &k in ks {
            rows.push(report_row(grid, order, k, lh[k - 1], lr[k - 1]));
        }
    }
    Ok(rows)
}

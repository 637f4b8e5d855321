//! Quadrature weights for the truncated singular integral
//! `int_0^R (2u(x) - u(x+xi) - u(x-xi)) xi^{-1-alpha} dxi` on a unit-spacing grid.
//!
//! The numerator is written as `xi^2 phi(xi)` and `phi` is interpolated
//! linearly on each cell `[k-1, k]`, which leaves the weight `xi^{1-alpha}`
//! to be integrated exactly against the two hat functions. Beyond the
//! symmetric part (where both `x +- xi` stay inside the domain) only one
//! neighbour exists; there the `u(x)` mass is integrated exactly and
//! `u(x +- xi) / xi^2` is interpolated with the same cell weights.

/// `int_a^b xi^{p-1} dxi` for `0 <= a < b`, accurate when `p` is near zero.
pub(crate) fn power_integral(a: f64, b: f64, p: f64) -> f64 {
    if a == 0.0 {
        return b.powf(p) / p;
    }
    let r = (b / a).ln();
    if (p * r).abs() < 1e-8 {
        a.powf(p) * r * (1.0 + 0.5 * p * r)
    } else {
        a.powf(p) * (p * r).exp_m1() / p
    }
}

/// Moments of `xi^{1-alpha}` against the left and right hat on cell `[k-1, k]`.
fn cell_moments(alpha: f64, k: usize) -> (f64, f64) {
    let p = 2.0 - alpha;
    if k == 1 {
        return (1.0 / (p * (p + 1.0)), 1.0 / (p + 1.0));
    }
    let a = (k - 1) as f64;
    if a < 16.0 {
        let b = k as f64;
        let m1 = power_integral(a, b, p);
        let m2 = power_integral(a, b, p + 1.0);
        return (b * m1 - m2, m2 - a * m1);
    }
    // (a + tau)^beta = a^beta sum_j binom(beta, j) (tau / a)^j, |tau / a| <= 1/16.
    let beta = 1.0 - alpha;
    let (mut left, mut right) = (0.0, 0.0);
    let mut coef = 1.0;
    for j in 0..40 {
        let jf = j as f64;
        let tl = coef / ((jf + 1.0) * (jf + 2.0));
        let tr = coef / (jf + 2.0);
        left += tl;
        right += tr;
        if tr.abs() < 1e-17 * right.abs() {
            break;
        }
        coef *= (beta - jf) / ((jf + 1.0) * a);
    }
    let s = a.powf(beta);
    (s * left, s * right)
}

#[derive(Debug, Clone, Copy)]
struct Truncation {
    /// Horizon in units of the spacing.
    d: f64,
    /// Index of the cell containing the horizon, `ceil(d)`.
    cell: usize,
    /// Kernel mass attached to node `cell - 1` from the piece `[cell - 1, d]`.
    partial: f64,
}

/// Unit-spacing stencil for one `(alpha, N, horizon)` triple.
///
/// Couplings depend only on the node distance, so the assembled matrices
/// are symmetric Toeplitz off the diagonal.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    alpha: f64,
    n_cells: usize,
    coupling: Vec<f64>,
    prefix: Vec<f64>,
    truncation: Option<Truncation>,
}

impl Stencil {
    /// `horizon` is measured in grid spacings and must be at least 1.
    pub(crate) fn new(alpha: f64, n_cells: usize, horizon: Option<f64>) -> Self {
        let truncation = horizon.filter(|&d| d < n_cells as f64).map(|d| {
            let cell = (d.ceil() as usize).max(1);
            let partial = if cell == 1 {
                1.0 / (2.0 - alpha)
            } else {
                power_integral((cell - 1) as f64, d, -alpha)
            };
            Truncation { d, cell, partial }
        });
        // Cells 1..full are integrated whole.
        let full = truncation.map_or(n_cells, |t| t.cell - 1);

        let moments: Vec<(f64, f64)> = (1..=n_cells).map(|k| cell_moments(alpha, k)).collect();
        let mut coupling = vec![0.0; n_cells + 1];
        for m in 1..n_cells {
            let mf = (m * m) as f64;
            let mut g = 0.0;
            if m <= full {
                g += moments[m - 1].1 / mf;
            }
            if m < full {
                g += moments[m].0 / mf;
            }
            if m == 1 && full >= 1 {
                g += moments[0].0;
            }
            if let Some(t) = truncation {
                if m == (t.cell - 1).max(1) {
                    g += t.partial;
                }
            }
            coupling[m] = g;
        }

        let mut prefix = vec![0.0; n_cells + 1];
        for k in 1..=n_cells {
            let e = if k == 1 {
                moments[0].0 + moments[0].1
            } else {
                let a = (k - 1) as f64;
                let b = k as f64;
                moments[k - 1].0 / (a * a) + moments[k - 1].1 / (b * b)
            };
            prefix[k] = prefix[k - 1] + e;
        }

        Self { alpha, n_cells, coupling, prefix, truncation }
    }

    /// Coupling weight between nodes `m` spacings apart (entry is `-weight`).
    #[inline]
    pub(crate) fn coupling(&self, m: usize) -> f64 {
        self.coupling[m]
    }

    /// Diagonal weight of row `i` (node index, `1..N`) from the truncated
    /// interior integral, excluding any exterior kernel mass.
    pub(crate) fn interior_diag(&self, i: usize) -> f64 {
        let s = i.min(self.n_cells - i);
        let t = i.max(self.n_cells - i);
        match self.truncation {
            Some(tr) if tr.cell <= s => 2.0 * self.prefix[tr.cell - 1] + 2.0 * tr.partial,
            Some(tr) => {
                2.0 * self.prefix[s] + power_integral(s as f64, tr.d.min(t as f64), -self.alpha)
            }
            None => 2.0 * self.prefix[s] + power_integral(s as f64, t as f64, -self.alpha),
        }
    }
}

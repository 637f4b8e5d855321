//! Uniform grids on `[-l, l]` and fields on their interior nodes.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform grid with `n_cells` cells on `[-half_width, half_width]`.
///
/// Nodes are `x_j = l (2j - N) / N` for `j = 0..=N`, so the endpoints are
/// exact and `x_{N-j} = -x_j` holds bit for bit. Unknowns live on the
/// interior nodes `j = 1..N-1`.
#[derive(Debug, Clone)]
pub struct Grid1D {
    half_width: f64,
    n_cells: usize,
    spacing: f64,
    nodes: Arc<[f64]>,
}

pub const MIN_CELLS: usize = 4;

impl Grid1D {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        let n = n_cells as f64;
        let nodes: Vec<f64> = (0..=n_cells)
            .map(|j| half_width * (2.0 * j as f64 - n) / n)
            .collect();
        Ok(Self {
            half_width,
            n_cells,
            spacing: 2.0 * half_width / n,
            nodes: nodes.into(),
        })
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of interior unknowns, `N - 1`.
    #[inline]
    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    /// All nodes including the two boundary nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Interior nodes `x_1..x_{N-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.n_cells]
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n_cells == other.n_cells && self.half_width == other.half_width
    }

    pub(crate) fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: self.n_cells,
                expected_half_width: self.half_width,
                found: other.n_cells,
                found_half_width: other.half_width,
            })
        }
    }
}

/// Shorthand for [`Grid1D::new`].
pub fn make_grid(half_width: f64, n_cells: usize) -> Result<Grid1D> {
    Grid1D::new(half_width, n_cells)
}

/// Values on the interior nodes of a grid. Boundary values are zero implicitly.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_interior() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} values, grid has {} interior nodes",
                values.len(),
                grid.n_interior()
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.n_interior()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L2 norm `sqrt(h * sum u_j^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Max-norm distance to another field on the same grid.
    pub fn max_diff(&self, other: &Field) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Samples `f` on the interior nodes. Fails on the first non-finite value.
pub fn sample(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<Field> {
    let values = grid
        .interior()
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { x, value: v })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Field { grid: grid.clone(), values })
}

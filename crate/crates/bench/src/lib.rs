//! Shared fixtures for the criterion benches.

use nonlocal_core::{FractionalOrder, Grid1D};

pub fn fixture(alpha: f64, n_cells: usize) -> (Grid1D, FractionalOrder) {
    (
        Grid1D::new(1.0, n_cells).expect("valid grid"),
        FractionalOrder::new(alpha).expect("valid order"),
    )
}

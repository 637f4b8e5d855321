//! Discretisations of four nonlocal diffusion operators on a bounded interval
//! `(-l, l)` with zero exterior data:
//!
//! * the fractional Laplacian `(-Delta)^{alpha/2}` of the zero extension (`h`),
//! * the spectral fractional Laplacian, a power of the Dirichlet Laplacian (`s`),
//! * the regional fractional Laplacian, the integral restricted to the domain (`r`),
//! * the peridynamic operator with finite horizon `delta` (`p`).
//!
//! Matrices are dense and assembled on the interior nodes of a uniform grid.
//! [`spectral`] and [`solvers`] provide eigenvalues, Poisson solves and
//! exact-in-time evolution; [`oracles`] provides quadrature and series
//! references that do not depend on the assembly.
//!
//! ```
//! use nonlocal_core::{assemble_fractional, make_grid, sample, solve_poisson, FractionalOrder};
//!
//! let grid = make_grid(1.0, 256).unwrap();
//! let order = FractionalOrder::new(1.0).unwrap();
//! let a = assemble_fractional(&grid, order).unwrap();
//! let u = solve_poisson(&a, &sample(&grid, |_| 1.0).unwrap()).unwrap();
//! // The exact solution is sqrt(1 - x^2).
//! let mid = u.values()[grid.n_interior() / 2];
//! assert!((mid - 1.0).abs() < 1e-2);
//! ```

pub mod error;
pub mod grid;
pub mod matrix;
pub mod operators;
pub mod oracles;
pub mod solvers;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{make_grid, sample, Field, Grid1D};
pub use matrix::DenseMatrix;
pub use operators::{
    apply, assemble, assemble_fractional, assemble_peridynamic, assemble_regional,
    assemble_spectral, q1_correction, q2_correction, Horizon, OperatorKind, OperatorMatrix,
};
pub use solvers::{evolve, peridynamic_convergence, solve_poisson, EvolutionSpec, PeriConvergence};
pub use specfun::{exact_frac_lap_poly, gamma, hyp2f1_terminating, norm_const, FractionalOrder};
pub use spectral::{
    dst_eigenpairs, eig_sym, eigen_report, eigenvalues, matrix_power, EigenDecomposition,
    EigenReportRow,
};

//! Reference values computed independently of the assembled matrices:
//! adaptive quadrature of the singular integrals and the spectral series.

pub mod quadrature;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{norm_const, FractionalOrder};
use quadrature::integrate;

/// Radius of the singular core handled by the Taylor expansion.
pub const TAYLOR_RADIUS: f64 = 1e-4;
/// Absolute tolerance of each adaptive integral.
pub const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Exterior {
    /// Integral over the whole line (zero extension).
    Full,
    /// Integral restricted to the domain.
    None,
    /// Integral restricted to `|xi| < delta`.
    Horizon(f64),
}

/// `c * int (2u(x) - u(x+xi) - u(x-xi)) xi^{-1-alpha} dxi` with the exterior
/// handled according to `ext`. `u` must vanish outside `(-l, l)`.
fn singular_integral(
    u: &dyn Fn(f64) -> f64,
    order: FractionalOrder,
    half_width: f64,
    x: f64,
    u_xx: f64,
    ext: Exterior,
) -> Result<f64> {
    if !(x.abs() < half_width) {
        return Err(Error::OutsideDomain { x, half_width });
    }
    let a = order.alpha();
    let c = norm_const(order)?;
    let ux = u(x);
    if !ux.is_finite() {
        return Err(Error::NonFinite { x, value: ux });
    }
    let s = half_width - x.abs();
    let t = half_width + x.abs();
    let reach = match ext {
        Exterior::Horizon(d) => d,
        _ => f64::INFINITY,
    };
    // Sign of the side that stays inside beyond s.
    let inward = if x >= 0.0 { -1.0 } else { 1.0 };

    let eps = TAYLOR_RADIUS.min(0.25 * s).min(reach);
    let mut total = -u_xx * eps.powf(2.0 - a) / (2.0 - a);

    let sym_end = s.min(reach);
    if sym_end > eps {
        let g = |xi: f64| (2.0 * ux - u(x + xi) - u(x - xi)) * xi.powf(-1.0 - a);
        total += integrate(&g, eps, sym_end, QUAD_TOL)?;
    }
    let one_end = t.min(reach);
    if one_end > s {
        let g = |xi: f64| (ux - u(x + inward * xi)) * xi.powf(-1.0 - a);
        total += integrate(&g, s, one_end, QUAD_TOL)?;
    }
    // u(x) times the kernel mass where the neighbour lies outside the domain.
    let tail = |from: f64| match ext {
        Exterior::Full => from.powf(-a) / a,
        Exterior::None => 0.0,
        Exterior::Horizon(d) if d > from => (from.powf(-a) - d.powf(-a)) / a,
        Exterior::Horizon(_) => 0.0,
    };
    total += ux * (tail(s) + tail(t));
    Ok(c * total)
}

/// Fractional Laplacian of the zero extension of `u` at `x` by quadrature.
///
/// `u_xx` is the second derivative of `u` at `x`, used on the singular
/// core `xi < 1e-4`.
pub fn quad_frac_lap(
    u: &dyn Fn(f64) -> f64,
    order: FractionalOrder,
    half_width: f64,
    x: f64,
    u_xx: f64,
) -> Result<f64> {
    singular_integral(u, order, half_width, x, u_xx, Exterior::Full)
}

/// Regional operator (integral restricted to `(-l, l)`) by quadrature.
pub fn quad_regional_lap(
    u: &dyn Fn(f64) -> f64,
    order: FractionalOrder,
    half_width: f64,
    x: f64,
    u_xx: f64,
) -> Result<f64> {
    singular_integral(u, order, half_width, x, u_xx, Exterior::None)
}

/// Peridynamic operator with horizon `delta` by quadrature.
pub fn quad_peridynamic(
    u: &dyn Fn(f64) -> f64,
    order: FractionalOrder,
    half_width: f64,
    delta: f64,
    x: f64,
    u_xx: f64,
) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidHorizon(delta));
    }
    singular_integral(u, order, half_width, x, u_xx, Exterior::Horizon(delta))
}

/// Spectral operator applied to `sin(pi (1 + x) / 2)` on `(-1, 1)`.
pub fn sin_action_spectral(order: FractionalOrder, x: f64) -> f64 {
    (0.5 * PI).powf(order.alpha()) * (0.5 * PI * (1.0 + x)).sin()
}

fn mode(k: usize, x: f64) -> f64 {
    (0.5 * k as f64 * PI * (1.0 + x)).sin()
}

/// Partial sum of the spectral Poisson solution with `f = 1` on `(-1, 1)`.
pub fn series_poisson_spectral(order: FractionalOrder, x: f64, n_terms: usize) -> f64 {
    let a = order.alpha();
    let mut terms: Vec<f64> = (1..=n_terms)
        .step_by(2)
        .map(|k| {
            let kp = k as f64 * PI;
            4.0 / kp * (0.5 * kp).powf(-a) * mode(k, x)
        })
        .collect();
    terms.reverse();
    terms.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialProfile {
    /// Indicator of `(-0.2, 0.2)`.
    Step,
    /// `exp(-(4x)^2)`.
    Gaussian,
}

impl InitialProfile {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            InitialProfile::Step => {
                if x.abs() < 0.2 {
                    1.0
                } else {
                    0.0
                }
            }
            InitialProfile::Gaussian => (-(4.0 * x) * (4.0 * x)).exp(),
        }
    }
}

/// Sine coefficients `c_k = int_{-1}^{1} u0(x) sin(k pi (1 + x) / 2) dx`, `k = 1..=n`.
pub fn sine_coefficients(init: InitialProfile, n_terms: usize) -> Result<Vec<f64>> {
    (1..=n_terms)
        .map(|k| match init {
            InitialProfile::Step => {
                let kf = k as f64 * PI;
                Ok(2.0 / kf * ((0.4 * kf).cos() - (0.6 * kf).cos()))
            }
            InitialProfile::Gaussian => {
                // Split at the mode's zeros so every piece is a single lobe.
                let g = |x: f64| init.eval(x) * mode(k, x);
                let mut acc = 0.0;
                let nodes: Vec<f64> = (0..=k).map(|j| -1.0 + 2.0 * j as f64 / k as f64).collect();
                for w in nodes.windows(2) {
                    acc += integrate(&g, w[0], w[1], 1e-12 / k as f64)?;
                }
                Ok(acc)
            }
        })
        .collect()
}

/// Partial sum of the spectral diffusion (reaction) solution on `(-1, 1)`,
/// `e^{r t} sum_k c_k e^{-(k pi / 2)^alpha t} sin(k pi (1 + x) / 2)`.
pub fn series_diffusion_spectral(
    order: FractionalOrder,
    x: f64,
    t: f64,
    n_terms: usize,
    init: InitialProfile,
    reaction_rate: f64,
) -> Result<f64> {
    let coef = sine_coefficients(init, n_terms)?;
    Ok(series_diffusion_with(order, x, t, &coef, reaction_rate))
}

/// [`series_diffusion_spectral`] with precomputed coefficients.
pub fn series_diffusion_with(
    order: FractionalOrder,
    x: f64,
    t: f64,
    coef: &[f64],
    reaction_rate: f64,
) -> f64 {
    let a = order.alpha();
    let mut terms: Vec<f64> = coef
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = i + 1;
            c * (-(0.5 * k as f64 * PI).powf(a) * t).exp() * mode(k, x)
        })
        .collect();
    terms.reverse();
    (reaction_rate * t).exp() * terms.iter().sum::<f64>()
}

//! Special functions: gamma, the fractional Laplacian normalisation constant,
//! terminating hypergeometric series and closed-form fractional Laplacians of
//! the polynomial family `(1 - x^2)^{alpha/2 + q}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Order `alpha` of a nonlocal operator.
///
/// [`FractionalOrder::new`] admits the open window `(0, 2)` used by the
/// integral operators. [`FractionalOrder::spectral`] also admits `alpha = 2`,
/// where the spectral operator reduces to the negative second derivative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder { alpha, window: "(0, 2)" })
        }
    }

    pub fn spectral(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder { alpha, window: "(0, 2]" })
        }
    }

    #[inline]
    pub fn alpha(self) -> f64 {
        self.0
    }

    /// True when the order lies in the open window of the integral operators.
    pub fn is_integral(self) -> bool {
        self.0 < 2.0
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments.
///
/// Lanczos approximation (g = 7, nine terms) for `x >= 1/2` and the
/// reflection formula below. Non-positive integers are poles.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        // sin(pi x) via the reduced argument keeps accuracy near the poles.
        let s = sin_pi(x);
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // t^(z + 1/2) is split in two halves so large arguments do not overflow early.
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc)
}

fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Normalisation constant `c_{1,alpha}` of the 1-D fractional Laplacian,
/// `2^{alpha-1} alpha Gamma((1+alpha)/2) / (sqrt(pi) Gamma(1 - alpha/2))`.
pub fn norm_const(order: FractionalOrder) -> Result<f64> {
    let a = order.alpha();
    if !order.is_integral() {
        return Err(Error::InvalidOrder { alpha: a, window: "(0, 2)" });
    }
    let num = 2f64.powf(a - 1.0) * a * gamma(0.5 * (1.0 + a))?;
    Ok(num / (PI.sqrt() * gamma(1.0 - 0.5 * a)?))
}

/// Terminating Gauss series `2F1(a, -q; c; z)`.
///
/// Terms come from the Pochhammer recurrence and are summed smallest first.
pub fn hyp2f1_terminating(a: f64, q: u32, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::InvalidHypergeometricParameter(c));
    }
    let mut terms = Vec::with_capacity(q as usize + 1);
    let mut term = 1.0;
    terms.push(term);
    for m in 0..q {
        let m = m as f64;
        term *= (a + m) * (m - q as f64) / ((c + m) * (m + 1.0)) * z;
        terms.push(term);
    }
    terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(terms.iter().sum())
}

/// Exact fractional Laplacian of `(1 - x^2)_+^{alpha/2 + q}` at `|x| < 1`.
pub fn exact_frac_lap_poly(order: FractionalOrder, q: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() >= 1.0 {
        return Err(Error::OutsideDomain { x, half_width: 1.0 });
    }
    let a = order.alpha();
    let qf = q as f64;
    let pre = 2f64.powf(a) * gamma(0.5 * (a + 1.0))? * gamma(0.5 * a + qf + 1.0)?
        / (PI.sqrt() * gamma(qf + 1.0)?);
    Ok(pre * hyp2f1_terminating(0.5 * (a + 1.0), q, 0.5, x * x)?)
}

/// Polynomial test profile `(1 - x^2)^{alpha/2 + q}` on `|x| < 1`, zero outside.
pub fn poly_profile(order: FractionalOrder, q: u32, x: f64) -> f64 {
    let r = 1.0 - x * x;
    if r <= 0.0 {
        0.0
    } else {
        r.powf(0.5 * order.alpha() + q as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        let table = [
            (0.05, 19.470_085_311_255_511_756),
            (0.5, 1.772_453_850_905_516_027_3),
            (1.0 / 3.0, 2.678_938_534_707_747_788_9),
            (2.5, 1.329_340_388_179_137_020_5),
            (7.3, 1_271.423_633_663_908_839_9),
            (29.9, 6.304_174_488_373_721_221e30),
            (-0.5, -3.544_907_701_811_032_054_6),
            (-2.5, -0.945_308_720_482_941_881_2),
        ];
        for (x, want) in table {
            let got = gamma(x).unwrap();
            assert!(rel(got, want) < 1e-13, "gamma({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_integers_and_poles() {
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        assert_eq!(gamma(0.0), Err(Error::GammaPole(0.0)));
        assert_eq!(gamma(-3.0), Err(Error::GammaPole(-3.0)));
    }

    #[test]
    fn norm_const_values() {
        let table = [
            (0.5, 0.199_471_140_200_716_338_97),
            (1.0, 1.0 / PI),
            (1.5, 0.299_206_710_301_074_508_45),
            (1.95, 0.047_720_086_172_791_644_924),
            (0.2, 0.090_313_982_871_455_618_397),
        ];
        for (a, want) in table {
            let got = norm_const(FractionalOrder::new(a).unwrap()).unwrap();
            assert!(rel(got, want) < 1e-13, "c({a}) = {got}");
        }
    }

    #[test]
    fn order_window() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(2.0).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert!(FractionalOrder::spectral(2.0).is_ok());
        assert!(norm_const(FractionalOrder::spectral(2.0).unwrap()).is_err());
    }

    #[test]
    fn hyp2f1_hand_expansion() {
        // 1 - 1 + 1/6
        let v = hyp2f1_terminating(1.0, 2, 0.5, 0.25).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(hyp2f1_terminating(0.7, 0, 1.3, 0.9).unwrap(), 1.0);
        assert!(hyp2f1_terminating(1.0, 2, -1.0, 0.5).is_err());
    }

    #[test]
    fn frac_lap_poly_constant_case() {
        for a in [0.3, 1.0, 1.7] {
            let o = FractionalOrder::new(a).unwrap();
            for x in [-0.9, 0.0, 0.4] {
                let v = exact_frac_lap_poly(o, 0, x).unwrap();
                assert!(rel(v, gamma(a + 1.0).unwrap()) < 1e-13);
            }
        }
        let o = FractionalOrder::new(1.0).unwrap();
        assert!(exact_frac_lap_poly(o, 1, 1.0).is_err());
    }
}

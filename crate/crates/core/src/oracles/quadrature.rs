//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_9,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

pub const MAX_DEPTH: u32 = 40;
const MAX_INTERVALS: usize = 50_000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    depth: u32,
    value: f64,
    error: f64,
}

fn eval(f: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x, value: v })
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = eval(f, c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = eval(f, c - dx)? + eval(f, c + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok(Piece { a, b, depth, value: r * kronrod, error: (r * (kronrod - gauss)).abs() })
}

/// Integral of `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// The piece with the largest error estimate is bisected until the summed
/// estimate meets the tolerance. Bisecting a piece already at depth
/// [`MAX_DEPTH`] is an error.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("integration bounds [{a}, {b}]")));
    }
    let mut pieces = vec![gk15(f, a, b, 0)?];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            break;
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .expect("at least one piece");
        if worst.depth >= MAX_DEPTH || pieces.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureBudget { a: worst.a, b: worst.b, estimate: total_err });
        }
        let mid = 0.5 * (worst.a + worst.b);
        pieces[idx] = gk15(f, worst.a, mid, worst.depth + 1)?;
        pieces.push(gk15(f, mid, worst.b, worst.depth + 1)?);
    }
    // Sum small pieces first.
    let mut values: Vec<f64> = pieces.iter().map(|p| p.value).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(values.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-6).unwrap();
        assert!((v - 2.0).abs() < 1e-5);
    }

    #[test]
    fn non_finite_integrand() {
        assert!(matches!(
            integrate(&|x| 1.0 / x, 0.0, 1.0, 1e-8),
            Err(Error::NonFinite { .. }) | Err(Error::QuadratureBudget { .. })
        ));
        assert!(matches!(integrate(&|_| f64::NAN, 0.0, 1.0, 1e-8), Err(Error::NonFinite { .. })));
    }
}

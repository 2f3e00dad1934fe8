//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let center = (a + b) * T::half();
    let half = (b - a) * T::half();
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(center - dx) + f(center + dx);
        kron = kron + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol * |I|)`. Never evaluates `f` at the endpoints.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<QuadResult<T>> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), intervals: 0 });
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    loop {
        let value = parts.iter().fold(T::zero(), |acc, p| acc + p.2);
        let error = parts.iter().fold(T::zero(), |acc, p| acc + p.3);
        if !value.is_finite() {
            return Err(Error::QuadratureFailed("non-finite integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, intervals: parts.len() });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailed(format!(
                "no convergence after {MAX_INTERVALS} subintervals (error estimate {error})"
            )));
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.partial_cmp(&parts[j].3).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = (lo + hi) * T::half();
        if !(mid > lo && mid < hi) {
            return Err(Error::QuadratureFailed("interval underflow".into()));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_trig() {
        let r = integrate(|x: f64| x * x, 0.0, 3.0, 1e-13, 1e-13).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = integrate(|x: f64| x.sin(), 0.0, PI, 1e-13, 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kink_needs_subdivision() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-11);
        assert!(r.intervals > 1);
    }

    #[test]
    fn non_integrable_fails() {
        let e = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12);
        assert!(matches!(e, Err(Error::QuadratureFailed(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let r = integrate(|x: f32| x.exp(), 0.0, 1.0, 1e-6, 1e-6).unwrap();
        assert!((r.value - (1f32.exp() - 1.0)).abs() < 1e-5);
    }
}

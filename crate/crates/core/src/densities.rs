//! Closed-form densities of the class parameter of a product of two random
//! class elements, their CDFs and quantiles, and the one-dimensional exact
//! samplers that the integral-formula derivations reduce each product to.
//!
//! Four product kinds are supported:
//!
//! | kind        | group     | variable                  | normalized pdf                                   |
//! |-------------|-----------|---------------------------|--------------------------------------------------|
//! | `ConjSu2`   | SU(2)     | class angle `theta`       | `sin theta / (2 sin a sin b)`                    |
//! | `SphSu2`    | SU(2)     | `u = |a11|`               | `(2/pi) u / sqrt(c1^2 - (u^2 - c0)^2)`           |
//! | `SphSl2R`   | SL(2,R)   | Cartan parameter `r`      | `(1/pi) sinh r / sqrt(c2^2 - (c1 - cosh r)^2)`   |
//! | `SphSl2C`   | SL(2,C)   | Cartan parameter `r`      | `sinh r / (2 sinh t1 sinh t2)`                   |
//!
//! Each density is stored as `norm_constant * shape(x)`. The unnormalized
//! product-measure values are `prefactor * shape(x)`, so ratios of either at
//! two points agree.
//!
//! The two arcsine-type kinds diverge like an inverse square root at their
//! support ends. Integrals of those are taken in the angle variable `phi` of
//! `w = w_lo + (w_hi - w_lo) (1 - cos phi) / 2` (with `w = u^2` or
//! `w = cosh r`), in which the integrand is smooth.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classes::HAAR_CONSTANT;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::{uniform01, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DensityKind {
    ConjSu2,
    SphSu2,
    SphSl2R,
    SphSl2C,
}

impl DensityKind {
    pub const ALL: [DensityKind; 4] = [Self::ConjSu2, Self::SphSu2, Self::SphSl2R, Self::SphSl2C];

    pub fn name(self) -> &'static str {
        match self {
            Self::ConjSu2 => "CONJ_SU2",
            Self::SphSu2 => "SPH_SU2",
            Self::SphSl2R => "SPH_SL2R",
            Self::SphSl2C => "SPH_SL2C",
        }
    }

    /// Whether the pdf diverges at (some of) its support ends.
    pub fn has_endpoint_singularity(self) -> bool {
        matches!(self, Self::SphSu2 | Self::SphSl2R)
    }
}

/// Closed interval `[lo, hi]`. Open supports are reported closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> SupportInterval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// A pdf value; at a divergent support end `singular` is set and `value` is
/// the finite sentinel `T::max_value()`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue<T> {
    pub value: T,
    pub singular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductDensity<T> {
    pub kind: DensityKind,
    /// `(alpha, beta)`, `(ra, rb)` or `(t1, t2)`.
    pub params: [T; 2],
    pub support: SupportInterval<T>,
    pub norm_constant: T,
    /// `(sin a sin b, cos a cos b)`, `(c0, c1)` or `(c1, c2)` per kind.
    coeffs: [T; 2],
}

fn check_open_unit<T: Real>(name: &str, x: T, hi: T, degenerate: impl Fn(String) -> Error) -> Result<()> {
    if !(x >= T::zero() && x <= hi) {
        return Err(Error::InvalidParams(format!("{name} = {x} outside [0, {hi}]")));
    }
    if x == T::zero() || x == hi {
        return Err(degenerate(format!("{name} = {x}: class is degenerate (Dirac product measure)")));
    }
    Ok(())
}

/// `2 sinh((x + y)/2) sinh((x - y)/2) = cosh x - cosh y`, without cancellation.
fn cosh_diff<T: Real>(x: T, y: T) -> T {
    T::two() * ((x + y) * T::half()).sinh() * ((x - y) * T::half()).sinh()
}

impl<T: Real> ProductDensity<T> {
    pub fn new(kind: DensityKind, p: T, q: T) -> Result<Self> {
        match kind {
            DensityKind::ConjSu2 => Self::conjugacy(p, q),
            DensityKind::SphSu2 => Self::spherical_compact(p, q),
            DensityKind::SphSl2R => Self::spherical_real(p, q),
            DensityKind::SphSl2C => Self::spherical_complex(p, q),
        }
    }

    /// Class angle of `C_alpha * C_beta` in SU(2).
    pub fn conjugacy(alpha: T, beta: T) -> Result<Self> {
        check_open_unit("alpha", alpha, T::PI(), Error::DegenerateClass)?;
        check_open_unit("beta", beta, T::PI(), Error::DegenerateClass)?;
        let support = conj_support(alpha, beta);
        let s = alpha.sin() * beta.sin();
        Ok(Self {
            kind: DensityKind::ConjSu2,
            params: [alpha, beta],
            support,
            norm_constant: T::one() / (T::two() * s),
            coeffs: [s, alpha.cos() * beta.cos()],
        })
    }

    /// `|a11|` of a product of two SU(2) spherical classes.
    pub fn spherical_compact(ra: T, rb: T) -> Result<Self> {
        check_open_unit("ra", ra, T::one(), Error::DegenerateInput)?;
        check_open_unit("rb", rb, T::one(), Error::DegenerateInput)?;
        let (c0, c1) = spherical_coeffs_a(ra, rb);
        if c1 <= T::zero() {
            return Err(Error::DegenerateInput("c1 = 0".into()));
        }
        let sa = (T::one() - ra * ra).sqrt();
        let sb = (T::one() - rb * rb).sqrt();
        let support = SupportInterval::new((ra * rb - sa * sb).abs(), (ra * rb + sa * sb).min(T::one()));
        Ok(Self {
            kind: DensityKind::SphSu2,
            params: [ra, rb],
            support,
            norm_constant: T::two() / T::PI(),
            coeffs: [c0, c1],
        })
    }

    fn noncompact(kind: DensityKind, t1: T, t2: T) -> Result<Self> {
        for (name, t) in [("t1", t1), ("t2", t2)] {
            if !(t >= T::zero() && t.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} = {t} must be finite and >= 0")));
            }
            if t == T::zero() {
                return Err(Error::DegenerateInput(format!("{name} = 0: class is the compact subgroup")));
            }
        }
        let c1 = t1.cosh() * t2.cosh();
        let c2 = t1.sinh() * t2.sinh();
        let norm_constant = match kind {
            DensityKind::SphSl2R => T::one() / T::PI(),
            _ => T::one() / (T::two() * c2),
        };
        Ok(Self {
            kind,
            params: [t1, t2],
            support: SupportInterval::new((t1 - t2).abs(), t1 + t2),
            norm_constant,
            coeffs: [c1, c2],
        })
    }

    /// Cartan parameter of a product of two SL(2,R) spherical classes.
    pub fn spherical_real(t1: T, t2: T) -> Result<Self> {
        Self::noncompact(DensityKind::SphSl2R, t1, t2)
    }

    /// Cartan parameter of a product of two SL(2,C) spherical classes.
    pub fn spherical_complex(t1: T, t2: T) -> Result<Self> {
        Self::noncompact(DensityKind::SphSl2C, t1, t2)
    }

    /// The kind-specific pair `(c0, c1)` for `SphSu2`, `(c1, c2)` for the
    /// noncompact kinds, `(sin a sin b, cos a cos b)` for `ConjSu2`.
    pub fn coefficients(&self) -> (T, T) {
        (self.coeffs[0], self.coeffs[1])
    }

    /// Unnormalized density shape; `pdf = norm_constant * shape`.
    /// Infinite at divergent support ends.
    pub fn shape(&self, x: T) -> T {
        let SupportInterval { lo, hi } = self.support;
        if !(x >= lo && x <= hi) {
            return T::zero();
        }
        match self.kind {
            DensityKind::ConjSu2 => x.sin(),
            DensityKind::SphSu2 => {
                // c1^2 - (u^2 - c0)^2 = (u^2 - lo^2)(hi^2 - u^2)
                let top = (hi - x) * (hi + x);
                if lo == T::zero() {
                    return T::one() / top.sqrt();
                }
                x / ((x - lo) * (x + lo) * top).sqrt()
            }
            DensityKind::SphSl2R => {
                // c2^2 - (c1 - cosh r)^2 = (cosh r - cosh lo)(cosh hi - cosh r)
                let top = cosh_diff(hi, x);
                if lo == T::zero() {
                    return (x * T::half()).cosh() / (T::half() * top).sqrt();
                }
                x.sinh() / (cosh_diff(x, lo) * top).sqrt()
            }
            DensityKind::SphSl2C => x.sinh(),
        }
    }

    pub fn pdf(&self, x: T) -> T {
        self.evaluate(x).value
    }

    pub fn evaluate(&self, x: T) -> DensityValue<T> {
        let v = self.norm_constant * self.shape(x);
        if v.is_infinite() || (v.is_nan() && self.support.contains(x)) {
            DensityValue { value: T::max_value(), singular: true }
        } else {
            DensityValue { value: v, singular: false }
        }
    }

    pub fn cdf(&self, x: T) -> T {
        let SupportInterval { lo, hi } = self.support;
        if x <= lo {
            return T::zero();
        }
        if x >= hi {
            return T::one();
        }
        let f = match self.kind {
            DensityKind::ConjSu2 => (lo.cos() - x.cos()) * self.norm_constant,
            DensityKind::SphSu2 => {
                let frac = (x - lo) * (x + lo) / ((hi - lo) * (hi + lo));
                T::two() / T::PI() * frac.clamp_to(T::zero(), T::one()).sqrt().asin()
            }
            DensityKind::SphSl2R => {
                let frac = cosh_diff(x, lo) / (T::two() * self.coeffs[1]);
                T::two() / T::PI() * frac.clamp_to(T::zero(), T::one()).sqrt().asin()
            }
            DensityKind::SphSl2C => cosh_diff(x, lo) / (T::two() * self.coeffs[1]),
        };
        f.clamp_to(T::zero(), T::one())
    }

    /// Inverse CDF on `[0, 1]`.
    pub fn quantile(&self, p: T) -> T {
        let p = p.clamp_to(T::zero(), T::one());
        let SupportInterval { lo, hi } = self.support;
        let x = match self.kind {
            DensityKind::ConjSu2 => (lo.cos() - p / self.norm_constant).clamp_to(-T::one(), T::one()).acos(),
            DensityKind::SphSu2 => {
                let s = (T::FRAC_PI_2() * p).sin();
                (lo * lo + (hi - lo) * (hi + lo) * s * s).sqrt()
            }
            DensityKind::SphSl2R => {
                let s = (T::FRAC_PI_2() * p).sin();
                self.radius_above_lo(self.coeffs[1] * s * s)
            }
            DensityKind::SphSl2C => self.radius_above_lo(self.coeffs[1] * p),
        };
        x.clamp_to(lo, hi)
    }

    /// Noncompact kinds: the `r` with `cosh r - cosh lo = 2 h`.
    fn radius_above_lo(&self, h: T) -> T {
        let lo = self.support.lo;
        if lo == T::zero() {
            // cosh r - 1 = 2 sinh^2(r/2)
            T::two() * h.max(T::zero()).sqrt().asinh()
        } else {
            (lo.cosh() + T::two() * h).acosh()
        }
    }

    /// Prefactor of the unnormalized product measure, against the same shape.
    pub fn stated_prefactor(&self) -> T {
        let pi = T::PI();
        let c = T::lit(HAAR_CONSTANT);
        let [p, q] = self.params;
        match self.kind {
            DensityKind::ConjSu2 => T::lit(4.0) * pi * pi * self.coeffs[0],
            DensityKind::SphSu2 => T::lit(16.0) * pi * pi * p * q,
            DensityKind::SphSl2R => T::lit(4.0) * c * c * pi * pi * p.sinh() * q.sinh(),
            DensityKind::SphSl2C => T::lit(32.0) * c * c * pi.powi(6) * p.sinh() * q.sinh(),
        }
    }

    /// The stated normalized constant where one is stated (absent for the
    /// conjugacy product, which is only given unnormalized).
    pub fn stated_norm_constant(&self) -> Option<T> {
        match self.kind {
            DensityKind::ConjSu2 => None,
            DensityKind::SphSu2 => Some(T::one() / (T::two() * T::PI())),
            DensityKind::SphSl2R => Some(T::one() / T::PI()),
            DensityKind::SphSl2C => Some(T::one() / (T::two() * self.coeffs[1])),
        }
    }

    /// Unnormalized product value at `x`. For the conjugacy product `x` is
    /// read on `(-pi, pi]`, where the measure is even in `x`.
    pub fn raw_value(&self, x: T) -> T {
        match self.kind {
            DensityKind::ConjSu2 => {
                if !(x > -T::PI() && x <= T::PI()) {
                    return T::zero();
                }
                self.stated_prefactor() * self.shape(x.abs())
            }
            _ => self.stated_prefactor() * self.shape(x),
        }
    }

    /// Integral of `shape` over the support. The arcsine-type kinds are
    /// integrated in the angle variable, with both endpoint distances written
    /// as `sin^2(phi/2)` and `cos^2(phi/2)` multiples so nothing cancels.
    fn shape_integral(&self, tol: T) -> Result<T> {
        let SupportInterval { lo, hi } = self.support;
        let half = T::half();
        let r = match self.kind {
            DensityKind::ConjSu2 | DensityKind::SphSl2C => quadrature::integrate(|x| self.shape(x), lo, hi, tol, tol)?,
            DensityKind::SphSu2 => {
                let (wl, wh) = (lo * lo, hi * hi);
                let span = wh - wl;
                quadrature::integrate(
                    |phi: T| {
                        let (s, c) = ((phi * half).sin(), (phi * half).cos());
                        let u = (wl + span * s * s).sqrt();
                        // u / sqrt((u^2 - lo^2)(hi^2 - u^2)) times du/dphi
                        let shape = u / (span * s * c);
                        let du = span * s * c / (T::two() * u);
                        shape * du
                    },
                    T::zero(),
                    T::PI(),
                    tol,
                    tol,
                )?
            }
            DensityKind::SphSl2R => {
                let c2 = self.coeffs[1];
                quadrature::integrate(
                    |phi: T| {
                        let (s, c) = ((phi * half).sin(), (phi * half).cos());
                        let r = self.radius_above_lo(c2 * s * s);
                        // sinh r / sqrt((cosh r - cosh lo)(cosh hi - cosh r)) times dr/dphi
                        let shape = r.sinh() / (T::two() * c2 * s * c);
                        let dr = T::two() * c2 * s * c / r.sinh();
                        shape * dr
                    },
                    T::zero(),
                    T::PI(),
                    tol,
                    tol,
                )?
            }
        };
        Ok(r.value)
    }

    /// Numerical integral of the pdf over its support.
    pub fn integrate_pdf(&self, tol: T) -> Result<T> {
        Ok(self.norm_constant * self.shape_integral(tol)?)
    }

    /// Normalization constant obtained by integrating the shape numerically.
    pub fn verified_norm_constant(&self, tol: T) -> Result<T> {
        Ok(T::one() / self.shape_integral(tol)?)
    }

    /// Exact one-dimensional sampler taken from the integral-formula
    /// derivation of each density, independent of the pdf/CDF code:
    ///
    /// * conjugacy: `cos theta = cos a cos b - sin a sin b U`, `U ~ U[-1, 1]`;
    /// * SU(2) spherical: `u = sqrt(c0 + c1 cos X)`, `X ~ U[0, 2 pi)`;
    /// * SL(2,R): `cosh r = c1 - c2 cos X`, `X ~ U[0, 2 pi)`;
    /// * SL(2,C): `cosh r = c1 - c2 V`, `V ~ U[-1, 1]`.
    pub fn sample_oracle<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let [k0, k1] = self.coeffs;
        match self.kind {
            DensityKind::ConjSu2 => {
                let u = T::two() * uniform01::<T, R>(rng) - T::one();
                (k1 - k0 * u).clamp_to(-T::one(), T::one()).acos()
            }
            DensityKind::SphSu2 => {
                let x = T::TAU() * uniform01::<T, R>(rng);
                (k0 + k1 * x.cos()).max(T::zero()).sqrt()
            }
            DensityKind::SphSl2R => {
                let x = T::TAU() * uniform01::<T, R>(rng);
                (k0 - k1 * x.cos()).max(T::one()).acosh()
            }
            DensityKind::SphSl2C => {
                let v = T::two() * uniform01::<T, R>(rng) - T::one();
                (k0 - k1 * v).max(T::one()).acosh()
            }
        }
    }

    /// `(point, pdf, cdf, raw)` rows on a uniform grid of `n >= 2` points
    /// spanning the closed support.
    pub fn curve(&self, n: usize) -> Vec<CurvePoint<T>> {
        let n = n.max(2);
        let SupportInterval { lo, hi } = self.support;
        (0..n)
            .map(|i| {
                let x = if i + 1 == n { hi } else { lo + (hi - lo) * T::from_count(i) / T::from_count(n - 1) };
                let v = self.evaluate(x);
                CurvePoint { point: x, pdf: v.value, singular: v.singular, cdf: self.cdf(x), raw: self.raw_value(x) }
            })
            .collect()
    }

    pub fn constants_report(&self) -> Result<ConstantsReport> {
        let verified = self.verified_norm_constant(T::lit(1e-12).max(T::epsilon() * T::lit(16.0)))?.as_f64();
        let stated = self.stated_norm_constant().map(|c| c.as_f64());
        let ratio = stated.map(|p| verified / p);
        Ok(ConstantsReport {
            kind: self.kind,
            params: [self.params[0].as_f64(), self.params[1].as_f64()],
            stated_constant: stated,
            verified_constant: verified,
            ratio,
            flagged: ratio.is_some_and(|r| (r - 1.0).abs() > 1e-6),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    pub point: T,
    pub pdf: T,
    pub singular: bool,
    pub cdf: T,
    pub raw: T,
}

/// Stated versus numerically verified normalization constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub kind: DensityKind,
    pub params: [f64; 2],
    pub stated_constant: Option<f64>,
    pub verified_constant: f64,
    pub ratio: Option<f64>,
    /// Set when the stated constant does not normalize the density.
    pub flagged: bool,
}

/// `[|a - b|, min(a + b, 2 pi - a - b)]`: product angles past `pi` fold back.
pub fn conj_support<T: Real>(alpha: T, beta: T) -> SupportInterval<T> {
    let s = alpha + beta;
    SupportInterval::new((alpha - beta).abs(), s.min(T::TAU() - s))
}

/// Unnormalized conjugacy product density on `theta` in `(-pi, pi]`:
/// `4 pi^2 sin a sin b sin theta` on the positive branch, its reflection on the
/// negative branch, zero elsewhere. Zero for degenerate angles.
pub fn conj_density_raw<T: Real>(alpha: T, beta: T, theta: T) -> T {
    ProductDensity::conjugacy(alpha, beta).map_or(T::zero(), |d| d.raw_value(theta))
}

pub fn conj_pdf<T: Real>(alpha: T, beta: T, theta: T) -> Result<T> {
    Ok(ProductDensity::conjugacy(alpha, beta)?.pdf(theta))
}

/// One draw of the product class angle via `cos theta = cos a cos b - sin a sin b U`.
pub fn conj_exact_sampler<T: Real, R: Rng + ?Sized>(alpha: T, beta: T, rng: &mut R) -> Result<T> {
    Ok(ProductDensity::conjugacy(alpha, beta)?.sample_oracle(rng))
}

/// `c0 = ra^2 rb^2 + (1 - ra^2)(1 - rb^2)`, `c1 = 2 ra rb sqrt((1 - ra^2)(1 - rb^2))`.
pub fn spherical_coeffs_a<T: Real>(ra: T, rb: T) -> (T, T) {
    let (qa, qb) = (ra * ra, rb * rb);
    let c0 = qa * qb + (T::one() - qa) * (T::one() - qb);
    let c1 = T::two() * ra * rb * ((T::one() - qa) * (T::one() - qb)).sqrt();
    (c0, c1)
}

pub fn spherical_pdf_a<T: Real>(ra: T, rb: T, u: T) -> Result<T> {
    Ok(ProductDensity::spherical_compact(ra, rb)?.pdf(u))
}

pub fn spherical_pdf_b<T: Real>(t1: T, t2: T, r: T) -> Result<T> {
    Ok(ProductDensity::spherical_real(t1, t2)?.pdf(r))
}

pub fn spherical_pdf_c<T: Real>(t1: T, t2: T, r: T) -> Result<T> {
    Ok(ProductDensity::spherical_complex(t1, t2)?.pdf(r))
}

pub fn unnormalized_product_value<T: Real>(kind: DensityKind, params: [T; 2], point: T) -> Result<T> {
    Ok(ProductDensity::new(kind, params[0], params[1])?.raw_value(point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn conj_support_examples() {
        let s = conj_support(FRAC_PI_2, FRAC_PI_2);
        assert_abs_diff_eq!(s.lo, 0.0);
        assert_abs_diff_eq!(s.hi, PI, epsilon = 1e-15);
        let s = conj_support(FRAC_PI_3, FRAC_PI_6);
        assert_abs_diff_eq!(s.lo, FRAC_PI_6, epsilon = 1e-15);
        assert_abs_diff_eq!(s.hi, FRAC_PI_2, epsilon = 1e-15);
        let s = conj_support(2.0 * FRAC_PI_3, 2.0 * FRAC_PI_3);
        assert_abs_diff_eq!(s.lo, 0.0);
        assert_abs_diff_eq!(s.hi, 2.0 * FRAC_PI_3, epsilon = 1e-14);
    }

    #[test]
    fn conj_raw_examples() {
        assert_abs_diff_eq!(conj_density_raw(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2), 4.0 * PI * PI, epsilon = 1e-12);
        assert_eq!(conj_density_raw(FRAC_PI_3, FRAC_PI_6, 0.1), 0.0);
        assert_eq!(conj_density_raw(FRAC_PI_3, FRAC_PI_6, 2.0), 0.0);
        assert_eq!(conj_density_raw(FRAC_PI_3, FRAC_PI_6, 4.0), 0.0);
        let (a, b) = (1.1, 0.4);
        for th in [0.8, 1.0, 1.4] {
            assert_eq!(conj_density_raw(a, b, -th), conj_density_raw(a, b, th));
            assert_eq!(conj_density_raw(a, b, th), conj_density_raw(b, a, th));
        }
        assert_eq!(conj_density_raw(0.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn conj_pdf_examples() {
        for th in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(conj_pdf(FRAC_PI_2, FRAC_PI_2, th).unwrap(), th.sin() / 2.0, epsilon = 1e-15);
        }
        let v = conj_pdf(FRAC_PI_3, FRAC_PI_6, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(v, (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert!(matches!(conj_pdf(0.0, 1.0, 0.5), Err(Error::DegenerateClass(_))));
        assert!(matches!(conj_pdf(4.0, 1.0, 0.5), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn conj_closed_form_normalization() {
        let mut rng = stream(21, 0);
        for _ in 0..100 {
            let a = PI * (0.001 + 0.998 * rng.gen::<f64>());
            let b = PI * (0.001 + 0.998 * rng.gen::<f64>());
            let d = ProductDensity::conjugacy(a, b).unwrap();
            let closed = (d.support.lo.cos() - d.support.hi.cos()) / (2.0 * a.sin() * b.sin());
            assert_abs_diff_eq!(closed, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(d.cdf(d.support.hi), 1.0);
        }
    }

    #[test]
    fn conj_sampler_endpoints() {
        // U = -1 and U = +1 of the oracle map
        let (a, b) = (2.0f64, 1.5f64);
        let at = |u: f64| (a.cos() * b.cos() - a.sin() * b.sin() * u).clamp(-1.0, 1.0).acos();
        assert_abs_diff_eq!(at(-1.0), 0.5, epsilon = 1e-12);
        let s = conj_support(a, b);
        assert_abs_diff_eq!(at(1.0), s.hi, epsilon = 1e-7);
        assert_abs_diff_eq!(s.hi, 2.0 * PI - 3.5, epsilon = 1e-15);
    }

    #[test]
    fn spherical_coeff_examples() {
        let (c0, c1) = spherical_coeffs_a(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(c0, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c1, 0.5, epsilon = 1e-15);
        let mut rng = stream(22, 0);
        for _ in 0..100 {
            let (ra, rb) = (rng.gen::<f64>(), rng.gen::<f64>());
            let (c0, c1) = spherical_coeffs_a(ra, rb);
            let (d0, d1) = spherical_coeffs_a(rb, ra);
            assert_eq!((c0, c1), (d0, d1));
            let (sa, sb) = ((1.0 - ra * ra).sqrt(), (1.0 - rb * rb).sqrt());
            assert_abs_diff_eq!(c0 - c1, (ra * rb - sa * sb).powi(2), epsilon = 1e-14);
            assert_abs_diff_eq!(c0 + c1, (ra * rb + sa * sb).powi(2), epsilon = 1e-14);
            assert!(c0 + c1 <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn spherical_a_example() {
        let d = ProductDensity::spherical_compact(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert_abs_diff_eq!(d.support.lo, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.support.hi, 1.0, epsilon = 1e-15);
        for u in [0.1, 0.5, 0.9] {
            let want = 2.0 / PI * u / (0.25 - (u * u - 0.5f64).powi(2)).sqrt();
            assert_relative_eq!(d.pdf(u), want, max_relative = 1e-12);
        }
        assert!(d.evaluate(1.0).singular);
        assert!(!d.evaluate(0.0).singular);
        assert!(matches!(ProductDensity::spherical_compact(1.0, 0.5), Err(Error::DegenerateInput(_))));
        assert!(matches!(spherical_pdf_a(0.0, 0.5, 0.3), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn spherical_b_and_c_examples() {
        let b = ProductDensity::spherical_real(1.0f64, 1.0).unwrap();
        assert_eq!((b.support.lo, b.support.hi), (0.0, 2.0));
        assert!(b.evaluate(2.0).singular);
        assert!(b.pdf(0.0).is_finite());
        let (c1, c2) = b.coefficients();
        for r in [0.3f64, 1.0, 1.7] {
            let want = r.sinh() / PI / (c2 * c2 - (c1 - r.cosh()).powi(2)).sqrt();
            assert_relative_eq!(b.pdf(r), want, max_relative = 1e-10);
        }
        let c = ProductDensity::spherical_complex(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(c.pdf(1.0), 1.0 / (2.0 * 1f64.sinh()), epsilon = 1e-14);
        assert_abs_diff_eq!(c.pdf(1.0), 0.42546, epsilon = 1e-5);
        assert!(!c.evaluate(2.0).singular);
        assert!(matches!(spherical_pdf_c(0.0, 1.0, 0.5), Err(Error::DegenerateInput(_))));
        assert!(matches!(spherical_pdf_b(1.0, 0.0, 0.5), Err(Error::DegenerateInput(_))));
        // hyperbolic identity behind the closed-form normalization
        let mut rng = stream(23, 0);
        for _ in 0..100 {
            let (t1, t2) = (3.0 * rng.gen::<f64>() + 1e-3, 3.0 * rng.gen::<f64>() + 1e-3);
            let v = ((t1 + t2).cosh() - (t1 - t2).cosh()) / (2.0 * t1.sinh() * t2.sinh());
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let ds = [
            ProductDensity::conjugacy(1.2, 0.7).unwrap(),
            ProductDensity::spherical_compact(0.3, 0.8).unwrap(),
            ProductDensity::spherical_real(0.5, 2.0).unwrap(),
            ProductDensity::spherical_complex(1.5, 0.25).unwrap(),
        ];
        for d in ds {
            for i in 1..20 {
                let p = i as f64 / 20.0;
                assert_abs_diff_eq!(d.cdf(d.quantile(p)), p, epsilon = 1e-10);
            }
            assert_eq!(d.cdf(d.support.lo - 1.0), 0.0);
            assert_eq!(d.cdf(d.support.hi + 1.0), 1.0);
            assert_eq!(d.pdf(d.support.hi + 0.1), 0.0);
        }
    }

    #[test]
    fn raw_values_match_stated_prefactors() {
        let (ra, rb) = (0.4f64, 0.9f64);
        let d = ProductDensity::spherical_compact(ra, rb).unwrap();
        let (c0, c1) = d.coefficients();
        let u = c0.sqrt();
        assert_relative_eq!(d.raw_value(u), 16.0 * PI * PI * ra * rb * c0.sqrt() / c1, max_relative = 1e-12);
        assert_abs_diff_eq!(
            unnormalized_product_value(DensityKind::ConjSu2, [FRAC_PI_2, FRAC_PI_2], FRAC_PI_2).unwrap(),
            4.0 * PI * PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn constants_report_flags_stated_su2_constant() {
        let r = ProductDensity::spherical_compact(FRAC_1_SQRT_2, 0.6).unwrap().constants_report().unwrap();
        assert_abs_diff_eq!(r.verified_constant, 2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(r.stated_constant.unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(r.ratio.unwrap(), 4.0, epsilon = 1e-10);
        assert!(r.flagged);
        for d in
            [ProductDensity::spherical_real(1.0, 1.0).unwrap(), ProductDensity::spherical_complex(0.5, 2.0).unwrap()]
        {
            let r = d.constants_report().unwrap();
            assert!(!r.flagged, "{r:?}");
        }
        let r = ProductDensity::conjugacy(1.0, 2.0).unwrap().constants_report().unwrap();
        assert!(r.stated_constant.is_none() && !r.flagged);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"{"kind":"CONJ_SU2""#));
    }

    #[test]
    fn curve_spans_support() {
        let d = ProductDensity::spherical_complex(1.0, 1.0).unwrap();
        let c = d.curve(200);
        assert_eq!(c.len(), 200);
        assert_eq!(c[0].point, 0.0);
        assert_eq!(c[199].point, 2.0);
        let d = ProductDensity::spherical_real(1.0, 1.0).unwrap();
        assert!(d.curve(10)[9].singular);
    }

    #[test]
    fn f32_densities_normalize() {
        let d = ProductDensity::<f32>::spherical_compact(0.5, 0.6).unwrap();
        assert!((d.integrate_pdf(1e-5).unwrap() - 1.0).abs() < 1e-4);
        let d = ProductDensity::<f32>::conjugacy(1.0, 0.5).unwrap();
        assert!((d.integrate_pdf(1e-5).unwrap() - 1.0).abs() < 1e-4);
    }

    use rand::Rng;
}

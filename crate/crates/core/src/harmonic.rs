//! Character series for products of SU(2) conjugacy classes.
//!
//! The irreducible representation of dimension `k + 1` has character
//! `chi_k(theta) = sin((k + 1) theta) / sin theta`. Expanding the product of
//! two class measures over characters gives, at class angle `theta`,
//!
//! ```text
//! nu(theta) = 16 pi sin a sin b sin theta * sum_{j>=1} sin(j a) sin(j b) sin(j theta) / j
//! ```
//!
//! which converges only conditionally; pointwise values are taken with
//! Cesaro (C,1) averaging by default. The same function expanded in
//! `cos(n theta)` has coefficients
//!
//! ```text
//! a_n = 8 pi sin a sin b [ B(n + 1) - B(n - 1) ],   B(j) = sin(j a) sin(j b) / j,
//! ```
//!
//! with `B(0) = 0` (the limit), and telescopes back into the sine series.

use serde::{Deserialize, Serialize};

use crate::densities::conj_density_raw;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Summation {
    Partial,
    Cesaro,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    pub summation: Summation,
}

/// SU(2) characters `chi_0 ..= chi_max_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterTable {
    pub max_k: usize,
}

impl CharacterTable {
    pub fn new(max_k: usize) -> Self {
        Self { max_k: max_k.max(1) }
    }

    /// `[chi_0(theta), ..., chi_max_k(theta)]` by the Chebyshev recurrence.
    pub fn values<T: Real>(&self, theta: T) -> Vec<T> {
        let x = theta.cos();
        let mut out = Vec::with_capacity(self.max_k + 1);
        let (mut prev, mut cur) = (T::zero(), T::one());
        for _ in 0..=self.max_k {
            out.push(cur);
            let next = T::two() * x * cur - prev;
            prev = cur;
            cur = next;
        }
        out
    }
}

/// `sin((k+1) theta) / sin theta`, continuous at `theta` in `{0, pi}`.
/// Evaluated as the Chebyshev polynomial `U_k(cos theta)`.
pub fn character<T: Real>(k: usize, theta: T) -> T {
    let x = theta.cos();
    let (mut prev, mut cur) = (T::zero(), T::one());
    for _ in 0..k {
        let next = T::two() * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Sum `terms[0..K]` plainly or as the mean of the partial sums `S_1..S_K`.
fn sum_terms<T: Real>(terms: impl Iterator<Item = T>, k_max: usize, summation: Summation) -> T {
    let kf = T::from_count(k_max);
    terms.enumerate().fold(T::zero(), |acc, (i, t)| match summation {
        Summation::Partial => acc + t,
        Summation::Cesaro => acc + t * (kf - T::from_count(i)) / kf,
    })
}

/// Character-series value of the conjugacy product density using `K`
/// representations (`j = 1..=K`).
pub fn nu_series<T: Real>(alpha: T, beta: T, theta: T, k_max: usize, summation: Summation) -> SeriesResult<T> {
    let k_max = k_max.max(1);
    let terms = (1..=k_max).map(|j| {
        let jf = T::from_count(j);
        (jf * alpha).sin() * (jf * beta).sin() * (jf * theta).sin() / jf
    });
    let s = sum_terms(terms, k_max, summation);
    let pre = T::lit(16.0) * T::PI() * alpha.sin() * beta.sin() * theta.sin();
    SeriesResult { value: pre * s, terms_used: k_max, summation }
}

/// `B(j) = sin(j a) sin(j b) / j`, with `B(0) = 0`.
fn b_term<T: Real>(j: i64, alpha: T, beta: T) -> T {
    if j == 0 {
        return T::zero();
    }
    let jf = T::lit(j as f64);
    (jf * alpha).sin() * (jf * beta).sin() / jf
}

/// Coefficient of `cos(n theta)` in the even Fourier expansion of the
/// unnormalized conjugacy product density, i.e. `(2/pi) int_0^pi f cos(n theta)`.
pub fn fourier_coefficient<T: Real>(n: usize, alpha: T, beta: T) -> T {
    let n = n as i64;
    let pre = T::lit(8.0) * T::PI() * alpha.sin() * beta.sin();
    pre * (b_term(n + 1, alpha, beta) - b_term(n - 1, alpha, beta))
}

/// `a_0/2 + sum_{n=1}^{K-1} a_n cos(n theta)`, with the same summation
/// options as [`nu_series`].
pub fn cosine_synthesis<T: Real>(alpha: T, beta: T, theta: T, k_max: usize, summation: Summation) -> SeriesResult<T> {
    let k_max = k_max.max(1);
    let terms = (0..k_max).map(|n| {
        let a = fourier_coefficient(n, alpha, beta);
        if n == 0 {
            a * T::half()
        } else {
            a * (T::from_count(n) * theta).cos()
        }
    });
    SeriesResult { value: sum_terms(terms, k_max, summation), terms_used: k_max, summation }
}

/// `sum_{k=1}^{K} 16 sin^2(k a) sin^2(k b) / k^2`, the squared L2 norm series
/// of the product measure.
pub fn plancherel_norm_sq<T: Real>(alpha: T, beta: T, k_max: usize) -> T {
    let sixteen = T::lit(16.0);
    // Smallest terms first keeps the rounding error of long sums down.
    (1..=k_max).rev().fold(T::zero(), |acc, k| {
        let kf = T::from_count(k);
        let s = (kf * alpha).sin() * (kf * beta).sin();
        acc + sixteen * s * s / (kf * kf)
    })
}

/// One row of a series convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostic {
    pub k: usize,
    pub partial: f64,
    pub cesaro: f64,
    pub reference: f64,
}

/// `nu_series` at each truncation in `ks`, against the closed-form value.
pub fn series_diagnostics(alpha: f64, beta: f64, theta: f64, ks: &[usize]) -> Vec<SeriesDiagnostic> {
    let reference = conj_density_raw(alpha, beta, theta);
    ks.iter()
        .map(|&k| SeriesDiagnostic {
            k,
            partial: nu_series(alpha, beta, theta, k, Summation::Partial).value,
            cesaro: nu_series(alpha, beta, theta, k, Summation::Cesaro).value,
            reference,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn character_examples() {
        for th in [0.0, 0.4, 2.0, PI] {
            assert_eq!(character(0, th), 1.0);
        }
        for k in 0..10 {
            assert_abs_diff_eq!(character(k, 0.0), (k + 1) as f64, epsilon = 1e-12);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(character(k, PI), sign * (k + 1) as f64, epsilon = 1e-10);
            let th = 0.77;
            assert_abs_diff_eq!(character(k, th), ((k + 1) as f64 * th).sin() / th.sin(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(character(1, FRAC_PI_3), 1.0, epsilon = 1e-15);
        let table = CharacterTable::new(6).values(1.3);
        for (k, v) in table.iter().enumerate() {
            assert_abs_diff_eq!(*v, character(k, 1.3), epsilon = 1e-13);
        }
    }

    #[test]
    fn series_at_symmetric_point() {
        let v = nu_series(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 10_000, Summation::Cesaro);
        assert!((v.value / (4.0 * PI * PI) - 1.0).abs() < 0.01);
        assert_eq!(v.terms_used, 10_000);
    }

    #[test]
    fn series_vanishes_outside_support() {
        let (a, b) = (FRAC_PI_2, FRAC_PI_3);
        let peak = 4.0 * PI * PI * a.sin() * b.sin();
        for th in [0.1, 0.3, 0.45] {
            let v = nu_series(a, b, th, 10_000, Summation::Cesaro).value;
            assert!(v.abs() < 1e-2 * peak, "theta {th}: {v}");
        }
    }

    #[test]
    fn series_ratio_follows_sine() {
        let (a, b) = (FRAC_PI_2, FRAC_PI_3);
        let (t1, t2) = (1.0, 2.0);
        let r =
            nu_series(a, b, t1, 10_000, Summation::Cesaro).value / nu_series(a, b, t2, 10_000, Summation::Cesaro).value;
        assert!((r / (t1.sin() / t2.sin()) - 1.0).abs() < 0.01);
    }

    #[test]
    fn series_is_totally_symmetric() {
        let (a, b, c) = (0.4, 1.9, 2.6);
        let k = 500;
        let base = nu_series(a, b, c, k, Summation::Partial).value;
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            assert_abs_diff_eq!(nu_series(x, y, z, k, Summation::Partial).value, base, epsilon = 1e-12);
        }
    }

    #[test]
    fn fourier_coefficients_match_quadrature() {
        let (a, b) = (2.1, 0.7);
        let s = crate::densities::conj_support(a, b);
        for n in 0..=50 {
            let f = |th: f64| conj_density_raw(a, b, th) * (n as f64 * th).cos();
            let q = integrate(f, s.lo, s.hi, 1e-12, 1e-12).unwrap().value * 2.0 / PI;
            assert_abs_diff_eq!(fourier_coefficient(n, a, b), q, epsilon = 1e-8);
        }
    }

    #[test]
    fn plancherel_examples() {
        let k = 100_000;
        let v = plancherel_norm_sq(FRAC_PI_2, FRAC_PI_2, k);
        assert!((v - 2.0 * PI * PI).abs() <= 16.0 / k as f64);
        let mut prev = 0.0;
        for k in 1..200 {
            let v = plancherel_norm_sq(0.3, 1.1, k);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn diagnostics_rows() {
        let rows = series_diagnostics(FRAC_PI_2, FRAC_PI_3, 1.5, &[10, 100, 1000]);
        assert_eq!(rows.len(), 3);
        assert!((rows[2].cesaro - rows[2].reference).abs() < (rows[0].cesaro - rows[0].reference).abs() + 1e-9);
    }
}

//! Monte-Carlo product experiments and goodness-of-fit against the analytic
//! product densities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::ClassDescriptor;
use crate::densities::{DensityKind, ProductDensity, SupportInterval};
use crate::error::{Error, Result};
use crate::group::{Flavor, Su2Element};
use crate::rng::{blocks, stream};
use crate::scalar::Real;

/// Stream-id namespace for the 1-D oracle samplers, disjoint from the
/// matrix-product streams so the two are independent for a shared seed.
const ORACLE_STREAM_BASE: u64 = 1 << 63;

pub const DEFAULT_BINS: usize = 200;

/// Product density kind for a pair of classes.
pub fn product_kind<T: Real>(a: &ClassDescriptor<T>, b: &ClassDescriptor<T>) -> Result<DensityKind> {
    use ClassDescriptor::*;
    match (a, b) {
        (Conjugacy(_), Conjugacy(_)) => Ok(DensityKind::ConjSu2),
        (SphericalCompact(_), SphericalCompact(_)) => Ok(DensityKind::SphSu2),
        (SphericalNC(x), SphericalNC(y)) if x.flavor == y.flavor => Ok(match x.flavor {
            Flavor::Real => DensityKind::SphSl2R,
            Flavor::Complex => DensityKind::SphSl2C,
        }),
        _ => Err(Error::KindMismatch(format!("cannot multiply {a} by {b}"))),
    }
}

/// Analytic density of the product's class parameter.
pub fn analytic_density<T: Real>(a: &ClassDescriptor<T>, b: &ClassDescriptor<T>) -> Result<ProductDensity<T>> {
    let kind = product_kind(a, b)?;
    ProductDensity::new(kind, a.param(), b.param()).map_err(|e| match e {
        // A degenerate class is a caller error regardless of kind.
        Error::DegenerateInput(m) => Error::DegenerateClass(m),
        other => other,
    })
}

/// Class parameter of one product `g h`, `g` from `a`, `h` from `b`.
fn product_draw<T: Real, R: rand::Rng + ?Sized>(
    a: &ClassDescriptor<T>,
    b: &ClassDescriptor<T>,
    rng: &mut R,
) -> Result<T> {
    use ClassDescriptor::*;
    match (a, b) {
        (Conjugacy(x), Conjugacy(y)) => Ok((x.sample(rng)? * y.sample(rng)?).class_angle()),
        (SphericalCompact(x), SphericalCompact(y)) => Ok((x.sample(rng)? * y.sample(rng)?).spherical_radius()),
        (SphericalNC(x), SphericalNC(y)) => (x.sample(rng)? * y.sample(rng)?).cartan_parameter(),
        _ => Err(Error::KindMismatch(format!("cannot multiply {a} by {b}"))),
    }
}

fn sort_values<T: Real>(v: &mut [T]) {
    v.par_sort_unstable_by(|x, y| x.partial_cmp(y).expect("NaN in sample"));
}

/// `n` independent products `g h` with `g ~ a`, `h ~ b`; returns the sorted
/// class parameters (class angle, `|a11|` or Cartan parameter). The result
/// depends only on `(a, b, n, seed)`, not on the thread count.
pub fn product_experiment<T: Real>(
    a: &ClassDescriptor<T>,
    b: &ClassDescriptor<T>,
    n: usize,
    seed: u64,
) -> Result<Vec<T>> {
    product_kind(a, b)?;
    for c in [a, b] {
        if c.is_degenerate() {
            return Err(Error::DegenerateClass(format!("{c} is degenerate")));
        }
    }
    let parts: Vec<Vec<T>> = blocks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, _, len)| {
            let mut rng = stream(seed, id);
            (0..len).map(|_| product_draw(a, b, &mut rng)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<T> = parts.into_iter().flatten().collect();
    sort_values(&mut out);
    Ok(out)
}

/// `n` sorted draws from the density's exact 1-D sampler.
pub fn oracle_experiment<T: Real>(density: &ProductDensity<T>, n: usize, seed: u64) -> Vec<T> {
    let parts: Vec<Vec<T>> = blocks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, _, len)| {
            let mut rng = stream(seed, ORACLE_STREAM_BASE | id);
            (0..len).map(|_| density.sample_oracle(&mut rng)).collect()
        })
        .collect();
    let mut out: Vec<T> = parts.into_iter().flatten().collect();
    sort_values(&mut out);
    out
}

fn check_sorted<T: PartialOrd>(sample: &[T]) -> Result<()> {
    match sample.windows(2).position(|w| !(w[0] <= w[1])) {
        Some(i) => Err(Error::UnsortedInput(i + 1)),
        None => Ok(()),
    }
}

/// Kolmogorov-Smirnov statistic `sup |F_n - F|` of a sorted sample against a
/// continuous CDF; both one-sided gaps are checked at every sample point.
pub fn ks_distance<T: Real, F: Fn(T) -> T>(sample: &[T], cdf: F) -> Result<f64> {
    check_sorted(sample)?;
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x).as_f64();
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Two-sample Kolmogorov-Smirnov statistic of two sorted samples.
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T]) -> Result<f64> {
    check_sorted(a)?;
    check_sorted(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(if a.len() == b.len() { 0.0 } else { 1.0 });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Equal-width histogram over `[lo, hi]`. Values outside the range are
/// clamped into the edge bins, so `sum(counts) == n_total` always holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub n_total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParams(format!("histogram range [{lo}, {hi}] with {bins} bins")));
        }
        Ok(Self { lo, hi, counts: vec![0; bins], n_total: 0 })
    }

    /// Histogram over a support interval, widened when the support is a point.
    pub fn over_support(support: SupportInterval<f64>, bins: usize) -> Result<Self> {
        let (lo, hi) =
            if support.hi > support.lo { (support.lo, support.hi) } else { (support.lo - 0.5, support.hi + 0.5) };
        Self::new(lo, hi, bins)
    }

    pub fn from_samples<T: Real>(lo: f64, hi: f64, bins: usize, xs: &[T]) -> Result<Self> {
        let mut h = Self::new(lo, hi, bins)?;
        for &x in xs {
            h.add(x.as_f64());
        }
        Ok(h)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_index(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.bin_width()).floor();
        if i.is_nan() || i < 0.0 {
            0
        } else {
            (i as usize).min(self.bins() - 1)
        }
    }

    pub fn add(&mut self, x: f64) {
        let i = self.bin_index(x);
        self.counts[i] += 1;
        self.n_total += 1;
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + w * i as f64, if i + 1 == self.bins() { self.hi } else { self.lo + w * (i + 1) as f64 })
    }

    pub fn center(&self, i: usize) -> f64 {
        let (a, b) = self.edges(i);
        0.5 * (a + b)
    }

    /// Empirical density in bin `i`.
    pub fn density(&self, i: usize) -> f64 {
        if self.n_total == 0 {
            return 0.0;
        }
        self.counts[i] as f64 / (self.n_total as f64 * self.bin_width())
    }

    /// Bin-wise sum. Both histograms must share range and bin count.
    pub fn merge(&self, other: &Histogram) -> Result<Histogram> {
        if self.lo != other.lo || self.hi != other.hi || self.bins() != other.bins() {
            return Err(Error::InvalidParams("histograms with different binning cannot be merged".into()));
        }
        Ok(Histogram {
            lo: self.lo,
            hi: self.hi,
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
            n_total: self.n_total + other.n_total,
        })
    }

    /// `sum_i |count_i / n - (F(b_i) - F(a_i))|`: L1 distance between the
    /// binned empirical measure and the analytic one.
    pub fn l1_against<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        if self.n_total == 0 {
            return 0.0;
        }
        let n = self.n_total as f64;
        (0..self.bins())
            .map(|i| {
                let (a, b) = self.edges(i);
                // edge bins absorb clamped mass
                let fa = if i == 0 { 0.0 } else { cdf(a) };
                let fb = if i + 1 == self.bins() { 1.0 } else { cdf(b) };
                (self.counts[i] as f64 / n - (fb - fa)).abs()
            })
            .sum()
    }

    /// `(param, count, pdf_analytic)` rows; the analytic value is the bin
    /// average of the pdf, `(F(b) - F(a)) / width`.
    pub fn rows<F: Fn(f64) -> f64>(&self, cdf: F) -> Vec<(f64, u64, f64)> {
        (0..self.bins())
            .map(|i| {
                let (a, b) = self.edges(i);
                (self.center(i), self.counts[i], (cdf(b) - cdf(a)) / (b - a))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub kind: DensityKind,
    pub params: [f64; 2],
    pub n: usize,
    pub seed: u64,
    pub ks: f64,
    pub l1: f64,
}

/// Run a product experiment and measure it against the analytic density.
pub fn compare(a: &ClassDescriptor<f64>, b: &ClassDescriptor<f64>, n: usize, seed: u64) -> Result<ComparisonReport> {
    let density = analytic_density(a, b)?;
    let sample = product_experiment(a, b, n, seed)?;
    let ks = ks_distance(&sample, |x| density.cdf(x))?;
    let hist = Histogram::from_samples(density.support.lo, density.support.hi, DEFAULT_BINS, &sample)?;
    Ok(ComparisonReport {
        kind: density.kind,
        params: density.params,
        n,
        seed,
        ks,
        l1: hist.l1_against(|x| density.cdf(x)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean_ks: f64,
    pub sd_ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln(mean_ks)` against `ln(n)`.
    pub slope: f64,
}

/// Mean and standard deviation of the KS statistic across `seeds` for each
/// sample size in `n_grid` (ascending; at least 10 seeds).
pub fn convergence_study(
    a: &ClassDescriptor<f64>,
    b: &ClassDescriptor<f64>,
    n_grid: &[usize],
    seeds: &[u64],
) -> Result<ConvergenceTable> {
    if seeds.len() < 10 {
        return Err(Error::InvalidParams(format!("need at least 10 seeds, got {}", seeds.len())));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::InvalidParams("n_grid must be nonempty, positive and strictly ascending".into()));
    }
    let density = analytic_density(a, b)?;
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let ks = seeds
            .iter()
            .map(|&s| ks_distance(&product_experiment(a, b, n, s)?, |x| density.cdf(x)))
            .collect::<Result<Vec<f64>>>()?;
        let m = ks.len() as f64;
        let mean = ks.iter().sum::<f64>() / m;
        let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (m - 1.0);
        rows.push(ConvergenceRow { n, mean_ks: mean, sd_ks: var.sqrt() });
    }
    let slope = log_log_slope(rows.iter().map(|r| (r.n as f64, r.mean_ks)));
    Ok(ConvergenceTable { rows, slope })
}

/// Least-squares slope of `ln y` on `ln x`; NaN for fewer than two points.
pub fn log_log_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Support of the class angle of a product of an element with angle in
/// `[lo, hi]` and an element of `C_gamma`.
fn extend_support(s: SupportInterval<f64>, gamma: f64) -> SupportInterval<f64> {
    use std::f64::consts::PI;
    let lo = if gamma < s.lo {
        s.lo - gamma
    } else if gamma > s.hi {
        gamma - s.hi
    } else {
        0.0
    };
    let (x_lo, x_hi) = (s.lo + gamma, s.hi + gamma);
    let hi = if x_lo <= PI && PI <= x_hi {
        PI
    } else if x_hi < PI {
        x_hi
    } else {
        2.0 * PI - x_lo
    };
    SupportInterval::new(lo, hi)
}

/// Support of the class angle of `C_a1 * C_a2 * ... * C_ak`, obtained by
/// iterating the two-class support rule.
pub fn iterated_support(angles: &[f64]) -> Result<SupportInterval<f64>> {
    let (first, rest) =
        angles.split_first().ok_or_else(|| Error::InvalidParams("at least one class angle required".into()))?;
    Ok(rest.iter().fold(SupportInterval::new(*first, *first), |s, &g| extend_support(s, g)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IteratedConvolution {
    pub histogram: Histogram,
    pub support: SupportInterval<f64>,
    pub min: f64,
    pub max: f64,
}

/// Empirical class-angle distribution of k-fold products of conjugacy classes
/// (`k >= 2`), binned over `[0, pi]`.
pub fn iterated_convolution(angles: &[f64], n: usize, seed: u64) -> Result<IteratedConvolution> {
    if angles.len() < 2 {
        return Err(Error::InvalidParams("at least two classes required".into()));
    }
    let classes = angles
        .iter()
        .map(|&a| {
            let c = crate::classes::ConjugacyClass::new(a)?;
            if c.is_degenerate() {
                return Err(Error::DegenerateClass(format!("conjugacy class alpha = {a} is central")));
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<Vec<f64>> = blocks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, _, len)| {
            let mut rng = stream(seed, id);
            (0..len)
                .map(|_| {
                    classes
                        .iter()
                        .try_fold(Su2Element::<f64>::identity(), |acc, c| Ok(acc * c.sample(&mut rng)?))
                        .map(|g| g.class_angle())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut histogram = Histogram::new(0.0, std::f64::consts::PI, DEFAULT_BINS)?;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in parts.iter().flatten() {
        histogram.add(x);
        min = min.min(x);
        max = max.max(x);
    }
    Ok(IteratedConvolution { histogram, support: iterated_support(angles)?, min, max })
}

//! Clebsch-Gordan bookkeeping against the continuous product support.
//!
//! A representation label `n` corresponds to the conjugacy class of angle
//! `n / (4 pi)` (mod pi). The labels occurring in `rho_n (x) rho_m` are
//! compared with the labels whose classes lie in the support of
//! `C_alpha C_beta`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::densities::{conj_support, SupportInterval};
use crate::error::{Error, Result};

/// Symmetric power representation of dimension `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RepLabel(pub u32);

impl RepLabel {
    pub fn dim(self) -> u64 {
        self.0 as u64 + 1
    }

    /// `n / (4 pi)` reduced to `[0, pi)`.
    pub fn class_angle(self) -> f64 {
        label_angle(self.0)
    }
}

pub fn label_angle(k: u32) -> f64 {
    (k as f64 / (4.0 * PI)).rem_euclid(PI)
}

/// Labels `k` with `|n - m| <= k <= n + m` and `k = n + m (mod 2)`, ascending.
pub fn clebsch_gordan_range(n: u32, m: u32) -> Vec<RepLabel> {
    (n.abs_diff(m)..=n + m).step_by(2).map(RepLabel).collect()
}

/// `[|n - m|, n + m]` in label units.
pub fn minkowski_support(n: u32, m: u32) -> SupportInterval<f64> {
    SupportInterval::new(n.abs_diff(m) as f64, (n + m) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub n: u32,
    pub m: u32,
    pub cg_labels: Vec<u32>,
    /// Continuous product support, in class-angle units.
    pub support_interval: [f64; 2],
    /// Labels in `0..=n+m` whose class angle lies in the support.
    pub support_labels: Vec<u32>,
    pub ratio: f64,
    /// `(n + m) / (4 pi) >= pi`: some label angle wraps or the support folds,
    /// and the comparison is outside the unfolded picture.
    pub folded: bool,
    pub cg_within_support: bool,
}

impl QuantizationReport {
    /// Builds the report in any regime; folding is flagged, not rejected.
    pub fn compute(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::DegenerateClass(format!(
                "label {} maps to the identity class",
                if n == 0 { n } else { m }
            )));
        }
        let (alpha, beta) = (label_angle(n), label_angle(m));
        let support = conj_support(alpha, beta);
        // tolerance for labels sitting exactly on a support endpoint
        let eps = 1e-12;
        let support_labels: Vec<u32> = (0..=n + m)
            .filter(|&k| {
                let a = label_angle(k);
                a >= support.lo - eps && a <= support.hi + eps
            })
            .collect();
        let cg_labels: Vec<u32> = clebsch_gordan_range(n, m).into_iter().map(|l| l.0).collect();
        let cg_within_support = cg_labels.iter().all(|k| support_labels.binary_search(k).is_ok());
        let ratio = if support_labels.is_empty() { 0.0 } else { cg_labels.len() as f64 / support_labels.len() as f64 };
        Ok(Self {
            n,
            m,
            cg_labels,
            support_interval: [support.lo, support.hi],
            support_labels,
            ratio,
            folded: (n + m) as f64 / (4.0 * PI) >= PI,
            cg_within_support,
        })
    }
}

/// As [`QuantizationReport::compute`], but rejects the folded regime.
pub fn quantization_consistency(n: u32, m: u32) -> Result<QuantizationReport> {
    let r = QuantizationReport::compute(n, m)?;
    if r.folded {
        return Err(Error::FoldedRegime((n + m) as f64 / (4.0 * PI)));
    }
    Ok(r)
}

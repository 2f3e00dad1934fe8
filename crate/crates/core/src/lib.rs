//! Products of conjugacy classes and spherical double cosets in SU(2),
//! SL(2, R) and SL(2, C).
//!
//! The group, class, density and series code is generic over [`Real`]
//! (`f32` or `f64`); point sets, experiment reports and file output work in
//! `f64`. The aliases below fix the scalar for the common cases.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classes;
pub mod densities;
pub mod error;
pub mod experiments;
pub mod group;
pub mod harmonic;
pub mod io;
pub mod pointsets;
pub mod quadrature;
pub mod quantize;
pub mod rng;
pub mod scalar;

pub use classes::{
    class_mass, ClassDescriptor, ClassMass, ConjugacyClass, MassConvention, SphericalClassCompact, SphericalClassNC,
};
pub use densities::{conj_pdf, conj_support, ConstantsReport, DensityKind, ProductDensity, SupportInterval};
pub use error::{Error, Result};
pub use experiments::{compare, ks_distance, ks_two_sample, product_experiment, ComparisonReport, Histogram};
pub use group::{ChartPoint, Flavor, KakFactors, Sl2Element, Su2Element};
pub use harmonic::{character, nu_series, Summation};
pub use pointsets::{EnergyReport, PointSetMethod, SpherePointSet};
pub use quantize::{clebsch_gordan_range, QuantizationReport, RepLabel};
pub use scalar::Real;

pub type Su2 = Su2Element<f64>;
pub type Su2F32 = Su2Element<f32>;
pub type Sl2 = Sl2Element<f64>;
pub type Sl2F32 = Sl2Element<f32>;
pub type Kak = KakFactors<f64>;
pub type Density = ProductDensity<f64>;
pub type DensityF32 = ProductDensity<f32>;
pub type Class = ClassDescriptor<f64>;
pub type Support = SupportInterval<f64>;

//! Conjugacy and spherical classes: descriptors, invariant-measure samplers,
//! and masses.

use std::fmt;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Flavor, Sl2Element, Su2Element};
use crate::scalar::{uniform01, Real};

/// Constant `c` in the KAK form of Haar measure,
/// `dg = c sinh^eps(t) dt dk1 dk2`. Fixed to 1 for both flavors so that the
/// complex-flavor orbit volume is `16 pi^4 sinh^2 t`, i.e. `c vol(SU(2))^2 sinh^2 t`
/// with `vol(SU(2)) = 4 pi^2`. Probability results never depend on it.
pub const HAAR_CONSTANT: f64 = 1.0;

/// Conjugacy class `C_alpha` of `diag(e^{i alpha}, e^{-i alpha})` in SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugacyClass<T> {
    pub alpha: T,
}

/// Double coset `K a K` in SU(2), `K` the diagonal torus, labelled by `r = |a11|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalClassCompact<T> {
    pub r: T,
}

/// Double coset `K a_t K` in SL(2,R) or SL(2,C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalClassNC<T> {
    pub t: T,
    pub flavor: Flavor,
}

impl<T: Real> ConjugacyClass<T> {
    /// Accepts `alpha` in `[0, pi]`; the endpoints are central elements and
    /// are rejected later by the sampler.
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::PI()) {
            return Err(Error::InvalidParams(format!("conjugacy angle {alpha} outside [0, pi]")));
        }
        Ok(Self { alpha })
    }

    pub fn is_degenerate(&self) -> bool {
        self.alpha <= T::zero() || self.alpha >= T::PI()
    }

    pub fn representative(&self) -> Su2Element<T> {
        Su2Element::torus(self.alpha)
    }

    /// `h diag(e^{i alpha}, e^{-i alpha}) h^{-1}` with `h` Haar-random.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Su2Element<T>> {
        if self.is_degenerate() {
            return Err(Error::DegenerateClass(format!("conjugacy class alpha = {} is central", self.alpha)));
        }
        let h = Su2Element::<T>::haar(rng);
        Ok(self.representative().conjugate_by(&h))
    }

    /// Weyl factor `4 pi sin^2 alpha`.
    pub fn weyl_factor(&self) -> T {
        let s = self.alpha.sin();
        T::lit(4.0) * T::PI() * s * s
    }
}

impl<T: Real> SphericalClassCompact<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::InvalidParams(format!("spherical radius {r} outside [0, 1]")));
        }
        Ok(Self { r })
    }

    pub fn is_degenerate(&self) -> bool {
        self.r <= T::zero() || self.r >= T::one()
    }

    /// `su2_from_chart(r, phi, psi)` with independent uniform phases.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Su2Element<T>> {
        if self.is_degenerate() {
            return Err(Error::DegenerateClass(format!("spherical class r = {} is a circle", self.r)));
        }
        let phi = T::TAU() * uniform01::<T, R>(rng);
        let psi = T::TAU() * uniform01::<T, R>(rng);
        Ok(Su2Element::from_chart(crate::group::ChartPoint::new(self.r, phi, psi)))
    }
}

impl<T: Real> SphericalClassNC<T> {
    pub fn new(t: T, flavor: Flavor) -> Result<Self> {
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::InvalidParams(format!("Cartan parameter {t} must be finite and >= 0")));
        }
        Ok(Self { t, flavor })
    }

    pub fn is_degenerate(&self) -> bool {
        self.t <= T::zero()
    }

    /// `k1 a_t k2` with `k1`, `k2` Haar-random in the compact subgroup.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sl2Element<T>> {
        if self.is_degenerate() {
            return Err(Error::DegenerateClass("spherical class t = 0 is the compact subgroup".into()));
        }
        Ok(Sl2Element::sample_double_coset(self.t, self.flavor, rng))
    }
}

pub fn sample_conjugacy<T: Real, R: Rng + ?Sized>(c: &ConjugacyClass<T>, rng: &mut R) -> Result<Su2Element<T>> {
    c.sample(rng)
}

pub fn sample_spherical_compact<T: Real, R: Rng + ?Sized>(
    c: &SphericalClassCompact<T>,
    rng: &mut R,
) -> Result<Su2Element<T>> {
    c.sample(rng)
}

pub fn sample_spherical_nc<T: Real, R: Rng + ?Sized>(c: &SphericalClassNC<T>, rng: &mut R) -> Result<Sl2Element<T>> {
    c.sample(rng)
}

/// Any of the supported class types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassDescriptor<T> {
    Conjugacy(ConjugacyClass<T>),
    SphericalCompact(SphericalClassCompact<T>),
    SphericalNC(SphericalClassNC<T>),
}

impl<T: Real> ClassDescriptor<T> {
    pub fn conjugacy(alpha: T) -> Result<Self> {
        ConjugacyClass::new(alpha).map(Self::Conjugacy)
    }

    pub fn spherical_compact(r: T) -> Result<Self> {
        SphericalClassCompact::new(r).map(Self::SphericalCompact)
    }

    pub fn spherical_nc(t: T, flavor: Flavor) -> Result<Self> {
        SphericalClassNC::new(t, flavor).map(Self::SphericalNC)
    }

    pub fn param(&self) -> T {
        match self {
            Self::Conjugacy(c) => c.alpha,
            Self::SphericalCompact(c) => c.r,
            Self::SphericalNC(c) => c.t,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Conjugacy(_) => "conjugacy",
            Self::SphericalCompact(_) => "spherical_compact",
            Self::SphericalNC(_) => "spherical_nc",
        }
    }

    pub fn flavor(&self) -> Option<Flavor> {
        match self {
            Self::SphericalNC(c) => Some(c.flavor),
            _ => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            Self::Conjugacy(c) => c.is_degenerate(),
            Self::SphericalCompact(c) => c.is_degenerate(),
            Self::SphericalNC(c) => c.is_degenerate(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    kind: String,
    param: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    flavor: Option<Flavor>,
}

impl<T: Real> Serialize for ClassDescriptor<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DescriptorJson { kind: self.kind_name().to_string(), param: self.param().as_f64(), flavor: self.flavor() }
            .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for ClassDescriptor<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DescriptorJson::deserialize(d)?;
        let p = T::lit(j.param);
        let out = match (j.kind.as_str(), j.flavor) {
            ("conjugacy", None) => Self::conjugacy(p),
            ("spherical_compact", None) => Self::spherical_compact(p),
            ("spherical_nc", Some(f)) => Self::spherical_nc(p, f),
            ("spherical_nc", None) => return Err(D::Error::custom("spherical_nc requires a flavor")),
            (k, _) => return Err(D::Error::custom(format!("unknown class kind {k:?}"))),
        };
        out.map_err(D::Error::custom)
    }
}

impl<T: Real> fmt::Display for ClassDescriptor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor() {
            Some(fl) => write!(f, "{}({}, {:?})", self.kind_name(), self.param(), fl),
            None => write!(f, "{}({})", self.kind_name(), self.param()),
        }
    }
}

/// Which normalization a compact spherical mass is reported in. The two
/// readings differ by the factor `4 pi^2` of the phase integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MassConvention {
    /// `2 |a11|`.
    Stated,
    /// `2 r` integrated against `dphi dpsi`, i.e. `8 pi^2 r`.
    ProofConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMass {
    pub value: f64,
    pub convention: MassConvention,
}

/// Total mass of the invariant measure on a class, in the
/// [`MassConvention::ProofConsistent`] normalization.
pub fn class_mass<T: Real>(d: &ClassDescriptor<T>) -> ClassMass {
    class_mass_with(d, MassConvention::ProofConsistent)
}

/// Conjugacy: `4 pi sin^2 alpha`. Compact spherical: `8 pi^2 r` or `2 r`.
/// Noncompact: `(4 pi^2 c sinh t)^eps` with `c = HAAR_CONSTANT`.
pub fn class_mass_with<T: Real>(d: &ClassDescriptor<T>, convention: MassConvention) -> ClassMass {
    use std::f64::consts::PI;
    let value = match d {
        ClassDescriptor::Conjugacy(c) => c.weyl_factor().as_f64(),
        ClassDescriptor::SphericalCompact(c) => match convention {
            MassConvention::Stated => 2.0 * c.r.as_f64(),
            MassConvention::ProofConsistent => 8.0 * PI * PI * c.r.as_f64(),
        },
        ClassDescriptor::SphericalNC(c) => {
            (4.0 * PI * PI * HAAR_CONSTANT * c.t.as_f64().sinh()).powi(c.flavor.epsilon())
        }
    };
    ClassMass { value, convention }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn conjugacy_samples_stay_on_class() {
        let mut rng = stream(1, 0);
        for alpha in [0.1, FRAC_PI_3, FRAC_PI_2, 2.9] {
            let c = ConjugacyClass::new(alpha).unwrap();
            for _ in 0..1000 {
                let g = c.sample(&mut rng).unwrap();
                assert!((g.class_angle() - alpha).abs() < 1e-10);
                assert!(g.unitarity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_classes_are_rejected() {
        let mut rng = stream(1, 0);
        for alpha in [0.0, PI] {
            let c = ConjugacyClass::new(alpha).unwrap();
            assert!(matches!(c.sample(&mut rng), Err(Error::DegenerateClass(_))));
        }
        for r in [0.0, 1.0] {
            let c = SphericalClassCompact::new(r).unwrap();
            assert!(matches!(c.sample(&mut rng), Err(Error::DegenerateClass(_))));
        }
        let c = SphericalClassNC::new(0.0, Flavor::Real).unwrap();
        assert!(matches!(c.sample(&mut rng), Err(Error::DegenerateClass(_))));
        assert!(ConjugacyClass::new(-0.1).is_err());
        assert!(ConjugacyClass::new(f64::NAN).is_err());
        assert!(SphericalClassCompact::new(1.5).is_err());
        assert!(SphericalClassNC::new(-1.0, Flavor::Complex).is_err());
    }

    #[test]
    fn spherical_samples_stay_on_class() {
        let mut rng = stream(2, 0);
        let c = SphericalClassCompact::new(0.37f64).unwrap();
        for _ in 0..1000 {
            assert!((c.sample(&mut rng).unwrap().spherical_radius() - 0.37).abs() < 1e-15);
        }
        for flavor in [Flavor::Real, Flavor::Complex] {
            let c = SphericalClassNC::new(1.1f64, flavor).unwrap();
            for _ in 0..1000 {
                let g = c.sample(&mut rng).unwrap();
                assert!((g.cartan_parameter().unwrap() - 1.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mass_examples() {
        let m = class_mass(&ClassDescriptor::conjugacy(FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(m.value, 4.0 * PI, epsilon = 1e-12);
        let s = ClassDescriptor::spherical_compact(0.5).unwrap();
        assert_abs_diff_eq!(class_mass(&s).value, 4.0 * PI * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(class_mass_with(&s, MassConvention::Stated).value, 1.0, epsilon = 1e-15);
        let nc = ClassDescriptor::spherical_nc(1.0, Flavor::Complex).unwrap();
        let want = 16.0 * PI.powi(4) * 1f64.sinh().powi(2);
        assert_abs_diff_eq!(class_mass(&nc).value / want, 1.0, epsilon = 1e-14);
        let nr = ClassDescriptor::spherical_nc(1.0, Flavor::Real).unwrap();
        assert_abs_diff_eq!(class_mass(&nr).value, 4.0 * PI * PI * 1f64.sinh(), epsilon = 1e-12);
    }

    #[test]
    fn weyl_factor_integrates_to_group_volume() {
        // midpoint rule over (-pi, pi]
        let n = 100_000;
        let h = 2.0 * PI / n as f64;
        let total: f64 = (0..n)
            .map(|i| {
                let th = -PI + (i as f64 + 0.5) * h;
                ConjugacyClass { alpha: th }.weyl_factor() * h
            })
            .sum();
        assert_abs_diff_eq!(total, 4.0 * PI * PI, epsilon = 1e-9);
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = ClassDescriptor::spherical_nc(0.5, Flavor::Complex).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"spherical_nc","param":0.5,"flavor":"complex"}"#);
        let back: ClassDescriptor<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let c: ClassDescriptor<f64> = serde_json::from_str(r#"{"kind":"conjugacy","param":1.0}"#).unwrap();
        assert_eq!(c, ClassDescriptor::conjugacy(1.0).unwrap());
        assert!(serde_json::from_str::<ClassDescriptor<f64>>(r#"{"kind":"spherical_nc","param":1.0}"#).is_err());
        assert!(serde_json::from_str::<ClassDescriptor<f64>>(r#"{"kind":"conjugacy","param":9.0}"#).is_err());
    }
}

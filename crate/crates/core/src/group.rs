//! Elements of SU(2), SL(2,R) and SL(2,C), their class invariants, the
//! Cartan (KAK) decomposition, and Haar sampling.
//!
//! An SU(2) element is stored by its first row `(a11, a12)`; the full matrix is
//!
//! ```text
//! [  a11         a12       ]
//! [ -conj(a12)   conj(a11) ]
//! ```
//!
//! SL(2) elements carry all four complex entries plus a flavor tag that
//! selects the maximal compact subgroup (SO(2) for real, SU(2) for complex).

use std::ops::Mul;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{uniform01, Real};

pub type Mat2<T> = [[Complex<T>; 2]; 2];

fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut y = x % tau;
    if y < T::zero() {
        y = y + tau;
    }
    if y >= tau {
        y = T::zero();
    }
    y
}

/// Coordinates `(rho, phi, psi)` on SU(2) with `a11 = rho e^{i phi}` and
/// `a12 = sqrt(1 - rho^2) e^{-i psi}`. Haar measure is `2 rho drho dphi dpsi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint<T> {
    pub rho: T,
    pub phi: T,
    pub psi: T,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(rho: T, phi: T, psi: T) -> Self {
        Self { rho, phi, psi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Element<T> {
    pub a11: Complex<T>,
    pub a12: Complex<T>,
}

impl<T: Real> Su2Element<T> {
    /// Element with the given first row. The caller is responsible for
    /// `|a11|^2 + |a12|^2 = 1`; see [`Su2Element::unitarity_defect`].
    pub fn from_row(a11: Complex<T>, a12: Complex<T>) -> Self {
        Self { a11, a12 }
    }

    pub fn identity() -> Self {
        Self::from_row(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// `diag(e^{i alpha}, e^{-i alpha})`.
    pub fn torus(alpha: T) -> Self {
        Self::from_row(Complex::from_polar(T::one(), alpha), Complex::new(T::zero(), T::zero()))
    }

    /// Rotation `[[cos a, -sin a], [sin a, cos a]]`, the SO(2) subgroup.
    pub fn rotation(angle: T) -> Self {
        Self::from_row(Complex::new(angle.cos(), T::zero()), Complex::new(-angle.sin(), T::zero()))
    }

    pub fn from_chart(p: ChartPoint<T>) -> Self {
        let s = (T::one() - p.rho * p.rho).max(T::zero()).sqrt();
        Self::from_row(Complex::from_polar(p.rho, p.phi), Complex::from_polar(s, -p.psi))
    }

    /// Inverse of [`Su2Element::from_chart`]. `phi` (resp. `psi`) is reported
    /// as 0 where it is undefined, at `rho = 0` (resp. `rho = 1`).
    pub fn to_chart(&self) -> ChartPoint<T> {
        let rho = self.a11.norm().min(T::one());
        let phi = if self.a11.norm() > T::zero() { wrap_angle(self.a11.arg()) } else { T::zero() };
        let psi = if self.a12.norm() > T::zero() { wrap_angle(-self.a12.arg()) } else { T::zero() };
        ChartPoint { rho, phi, psi }
    }

    /// `(q0, q1, q2, q3)` with `a11 = q0 + i q3`, `a12 = q2 + i q1`.
    pub fn quaternion(&self) -> [T; 4] {
        [self.a11.re, self.a12.im, self.a12.re, self.a11.im]
    }

    pub fn matrix(&self) -> Mat2<T> {
        [[self.a11, self.a12], [-self.a12.conj(), self.a11.conj()]]
    }

    pub fn inverse(&self) -> Self {
        Self::from_row(self.a11.conj(), -self.a12)
    }

    pub fn trace(&self) -> T {
        self.a11.re + self.a11.re
    }

    /// `| |a11|^2 + |a12|^2 - 1 |`.
    pub fn unitarity_defect(&self) -> T {
        (self.a11.norm_sqr() + self.a12.norm_sqr() - T::one()).abs()
    }

    /// Rescale the row back onto the unit sphere.
    pub fn renormalized(&self) -> Self {
        let n = (self.a11.norm_sqr() + self.a12.norm_sqr()).sqrt();
        Self::from_row(self.a11 / n, self.a12 / n)
    }

    /// Conjugacy class angle: eigenvalues are `e^{+-i theta}`, `theta` in `[0, pi]`.
    pub fn class_angle(&self) -> T {
        self.a11.re.clamp_to(-T::one(), T::one()).acos()
    }

    /// `|a11|`, constant on double cosets of the diagonal torus.
    pub fn spherical_radius(&self) -> T {
        self.a11.norm()
    }

    /// `h self h^{-1}`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        *h * *self * h.inverse()
    }

    /// Adjoint action on R^3, identified with traceless skew-hermitian
    /// matrices via `xi(a, b, c) = [[ic, a + ib], [-a + ib, -ic]]`.
    pub fn act_on_vector(&self, v: [T; 3]) -> [T; 3] {
        let xi = Su2Element::from_row(Complex::new(T::zero(), v[2]), Complex::new(v[0], v[1]));
        // xi is not unitary, but the row representation is closed under
        // products and conjugation by unitaries, which is all that is needed.
        let w = *self * xi * self.inverse();
        [w.a12.re, w.a12.im, w.a11.im]
    }

    /// Haar-random element via the chart: `rho^2`, `phi`, `psi` independent uniform.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let rho = uniform01::<T, R>(rng).sqrt();
        let phi = T::TAU() * uniform01::<T, R>(rng);
        let psi = T::TAU() * uniform01::<T, R>(rng);
        Self::from_chart(ChartPoint { rho, phi, psi })
    }

    /// Uniformly random rotation in SO(2).
    pub fn haar_so2<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::rotation(T::TAU() * uniform01::<T, R>(rng))
    }
}

impl<T: Real> Mul for Su2Element<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::from_row(self.a11 * rhs.a11 - self.a12 * rhs.a12.conj(), self.a11 * rhs.a12 + self.a12 * rhs.a11.conj())
    }
}

pub fn su2_from_chart<T: Real>(p: ChartPoint<T>) -> Su2Element<T> {
    Su2Element::from_chart(p)
}

pub fn class_angle<T: Real>(g: &Su2Element<T>) -> T {
    g.class_angle()
}

pub fn spherical_radius<T: Real>(g: &Su2Element<T>) -> T {
    g.spherical_radius()
}

pub fn haar_sample_su2<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Su2Element<T> {
    Su2Element::haar(rng)
}

/// Real or complex form of SL(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Real,
    Complex,
}

impl Flavor {
    /// Exponent of `sinh t` in the radial part of Haar measure (1 for SL(2,R), 2 for SL(2,C)).
    pub fn epsilon(self) -> i32 {
        match self {
            Flavor::Real => 1,
            Flavor::Complex => 2,
        }
    }

    /// Haar-random element of the maximal compact subgroup.
    pub fn sample_compact<T: Real, R: Rng + ?Sized>(self, rng: &mut R) -> Su2Element<T> {
        match self {
            Flavor::Real => Su2Element::haar_so2(rng),
            Flavor::Complex => Su2Element::haar(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Element<T> {
    pub entries: Mat2<T>,
    pub flavor: Flavor,
}

impl<T: Real> Sl2Element<T> {
    /// Checked constructor: `|det - 1| <= 1e-10` (relative to the entry scale)
    /// and, for the real flavor, vanishing imaginary parts.
    pub fn new(entries: Mat2<T>, flavor: Flavor) -> Result<Self> {
        let g = Self { entries, flavor };
        let scale = g.trace_gg_star().max(T::one());
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) * scale;
        let d = g.det() - Complex::new(T::one(), T::zero());
        if d.norm() > tol {
            return Err(Error::InvalidParams(format!("det = 1 required, |det - 1| = {}", d.norm())));
        }
        if flavor == Flavor::Real && entries.iter().flatten().any(|z| z.im.abs() > tol) {
            return Err(Error::InvalidParams("real flavor requires real entries".into()));
        }
        Ok(g)
    }

    pub fn from_real(m: [[T; 2]; 2]) -> Result<Self> {
        let c = |x: T| Complex::new(x, T::zero());
        Self::new([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]], Flavor::Real)
    }

    pub fn identity(flavor: Flavor) -> Self {
        Self::from_su2(&Su2Element::identity(), flavor)
    }

    /// Cartan element `a_t = diag(e^{t/2}, e^{-t/2})`.
    pub fn cartan(t: T, flavor: Flavor) -> Self {
        let h = t * T::half();
        let z = Complex::new(T::zero(), T::zero());
        Self { entries: [[Complex::new(h.exp(), T::zero()), z], [z, Complex::new((-h).exp(), T::zero())]], flavor }
    }

    pub fn from_su2(k: &Su2Element<T>, flavor: Flavor) -> Self {
        Self { entries: k.matrix(), flavor }
    }

    pub fn det(&self) -> Complex<T> {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `Tr(g g*)`, the sum of squared moduli of the entries.
    pub fn trace_gg_star(&self) -> T {
        self.entries.iter().flatten().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn inverse(&self) -> Self {
        let m = &self.entries;
        Self { entries: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]], flavor: self.flavor }
    }

    pub fn left_mul_compact(&self, k: &Su2Element<T>) -> Self {
        Self { entries: mat_mul(&k.matrix(), &self.entries), flavor: self.flavor }
    }

    pub fn right_mul_compact(&self, k: &Su2Element<T>) -> Self {
        Self { entries: mat_mul(&self.entries, &k.matrix()), flavor: self.flavor }
    }

    /// Cartan parameter `t >= 0` with `2 cosh t = Tr(g g*)`.
    pub fn cartan_parameter(&self) -> Result<T> {
        let tr = self.trace_gg_star();
        let two = T::two();
        if tr < two - T::lit(1e-9) {
            return Err(Error::TraceBelowTwo(tr.as_f64()));
        }
        // 2 sinh t is the eigenvalue gap of g g*; acosh(tr / 2) loses half
        // the digits near t = 0.
        let m = &self.entries;
        let half_gap = (m[0][0].norm_sqr() + m[0][1].norm_sqr() - m[1][0].norm_sqr() - m[1][1].norm_sqr()) * T::half();
        let q = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
        Ok((half_gap * half_gap + q.norm_sqr()).sqrt().asinh())
    }

    /// Cartan decomposition `g = k1 a_t k2` with `k1`, `k2` in the compact
    /// subgroup of the flavor. The first column of `k1` is rotated to have a
    /// nonnegative real first entry.
    pub fn kak(&self) -> Result<KakFactors<T>> {
        let t = self.cartan_parameter()?;
        let m = &self.entries;
        let p = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let r = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let q = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
        let half_gap = (p - r) * T::half();
        let lambda = (p + r) * T::half() + (half_gap * half_gap + q.norm_sqr()).sqrt();

        // Top eigenvector of the hermitian matrix g g* = [[p, q], [conj q, r]].
        let cand1 = [q, Complex::new(lambda - p, T::zero())];
        let cand2 = [Complex::new(lambda - r, T::zero()), q.conj()];
        let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        let (v, nrm) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
        let scale = (p + r) * T::epsilon();
        let mut v = if nrm.sqrt() <= scale {
            [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())]
        } else {
            let s = nrm.sqrt();
            [v[0] / s, v[1] / s]
        };
        let v0n = v[0].norm();
        if v0n > T::zero() {
            let phase = v[0].conj() / v0n;
            v = [v[0] * phase, v[1] * phase];
            v[0].im = T::zero();
        } else {
            v[0] = Complex::new(T::zero(), T::zero());
        }
        let k1 = Su2Element::from_row(v[0], -v[1].conj());
        let rest = Self::cartan(-t, self.flavor).entries;
        let k2m = mat_mul(&rest, &mat_mul(&k1.inverse().matrix(), m));
        let k2 = Su2Element::from_row(k2m[0][0], k2m[0][1]);
        Ok(KakFactors { k1, t, k2, flavor: self.flavor })
    }

    /// Haar-random compact factors around `a_t`.
    pub fn sample_double_coset<R: Rng + ?Sized>(t: T, flavor: Flavor, rng: &mut R) -> Self {
        let k1 = flavor.sample_compact::<T, R>(rng);
        let k2 = flavor.sample_compact::<T, R>(rng);
        Self::cartan(t, flavor).left_mul_compact(&k1).right_mul_compact(&k2)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        d
    }
}

impl<T: Real> Mul for Sl2Element<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.flavor, rhs.flavor);
        Self { entries: mat_mul(&self.entries, &rhs.entries), flavor: self.flavor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KakFactors<T> {
    pub k1: Su2Element<T>,
    pub t: T,
    pub k2: Su2Element<T>,
    pub flavor: Flavor,
}

impl<T: Real> KakFactors<T> {
    pub fn recompose(&self) -> Sl2Element<T> {
        Sl2Element::cartan(self.t, self.flavor).left_mul_compact(&self.k1).right_mul_compact(&self.k2)
    }
}

pub fn cartan_parameter<T: Real>(g: &Sl2Element<T>) -> Result<T> {
    g.cartan_parameter()
}

pub fn kak_decompose<T: Real>(g: &Sl2Element<T>) -> Result<KakFactors<T>> {
    g.kak()
}

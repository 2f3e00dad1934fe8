//! Point sets on the unit sphere, their Riesz energies, and the discrete
//! product measures obtained by placing them on conjugacy classes.
//!
//! A unit vector `u = (a, b, c)` is placed on `C_alpha` as
//! `cos(alpha) I + sin(alpha) xi(a, b, c)`, where
//! `xi(a, b, c) = [[ic, a + ib], [-a + ib, -ic]]`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::conj_support;
use crate::error::{Error, Result};
use crate::experiments::{Histogram, DEFAULT_BINS};
use crate::group::Su2Element;
use num_complex::Complex;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointSetMethod {
    Random,
    IcosaLattice,
    Polar,
    Minimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePointSet {
    pub method: PointSetMethod,
    pub points: Vec<Vec3>,
}

impl SpherePointSet {
    /// Normalizes every point; rejects zero vectors.
    pub fn new(method: PointSetMethod, points: Vec<Vec3>) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|p| {
                let n = norm(p);
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::InvalidParams("point set contains a zero or non-finite vector".into()));
                }
                Ok([p[0] / n, p[1] / n, p[2] / n])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { method, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Vec3 {
        let n = self.len().max(1) as f64;
        let s = self.points.iter().fold([0.0; 3], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2]]);
        [s[0] / n, s[1] / n, s[2] / n]
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.min(norm(sub(self.points[i], self.points[j])));
            }
        }
        d
    }

    /// Image under the rotation `u -> g u g^{-1}`.
    pub fn rotated(&self, g: &Su2Element<f64>) -> Self {
        let points = self.points.iter().map(|&p| normalize(g.act_on_vector(p))).collect();
        Self { method: self.method, points }
    }

    /// Image under a Haar-random rotation.
    pub fn randomly_rotated<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        self.rotated(&Su2Element::haar(rng))
    }

    /// True if every point of `other` is within `tol` of some point of `self`
    /// and the sizes agree.
    pub fn same_set(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len() && other.points.iter().all(|q| self.points.iter().any(|p| norm(sub(*p, *q)) <= tol))
    }
}

/// `n` independent uniform points on the sphere.
pub fn random_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpherePointSet {
    let points = (0..n)
        .map(|_| {
            let z = 2.0 * rng.gen::<f64>() - 1.0;
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            [s * phi.cos(), s * phi.sin(), z]
        })
        .collect();
    SpherePointSet { method: PointSetMethod::Random, points }
}

/// The 12 unit icosahedron vertices and its 20 faces, counterclockwise
/// seen from outside.
pub fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            v.push([0.0, s1, s2 * g]);
            v.push([s1, s2 * g, 0.0]);
            v.push([s2 * g, 0.0, s1]);
        }
    }
    let mut faces = Vec::with_capacity(20);
    let adjacent = |a: Vec3, b: Vec3| (norm(sub(a, b)) - 2.0).abs() < 1e-9;
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(v[i], v[j]) && adjacent(v[j], v[k]) && adjacent(v[i], v[k]) {
                    let n = cross(sub(v[j], v[i]), sub(v[k], v[i]));
                    faces.push(if dot(n, v[i]) > 0.0 { [i, j, k] } else { [i, k, j] });
                }
            }
        }
    }
    (v.into_iter().map(normalize).collect(), faces)
}

/// Deduplicating accumulator for points known to coincide to ~1e-12.
struct PointBag {
    cells: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<Vec3>,
}

impl PointBag {
    const CELL: f64 = 1e-6;

    fn new() -> Self {
        Self { cells: HashMap::new(), points: Vec::new() }
    }

    fn key(p: Vec3) -> [i64; 3] {
        [(p[0] / Self::CELL).round() as i64, (p[1] / Self::CELL).round() as i64, (p[2] / Self::CELL).round() as i64]
    }

    fn insert(&mut self, p: Vec3) {
        let k = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if ids.iter().any(|&i| norm(sub(self.points[i], p)) < 1e-9) {
                            return;
                        }
                    }
                }
            }
        }
        self.cells.entry(k).or_default().push(self.points.len());
        self.points.push(p);
    }
}

/// Geodesic subdivision of the icosahedron of class `(m, n)`: the triangular
/// lattice triangle with corners `0`, `m e1 + n e2` and its 60-degree rotation
/// is mapped onto every face, then projected radially. Produces
/// `10 (m^2 + m n + n^2) + 2` points.
pub fn icosahedral_lattice(m: usize, n: usize) -> Result<SpherePointSet> {
    if m == 0 && n == 0 {
        return Err(Error::InvalidParams("icosahedral lattice needs (m, n) != (0, 0)".into()));
    }
    let (m, n) = (m as i64, n as i64);
    // corners in the (e1, e2) lattice basis, e2 = e1 rotated by 60 degrees
    let p1 = (m, n);
    let p2 = (-n, m + n);
    let cr = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 - a.1 * b.0;
    let area = cr(p1, p2);
    let mut lattice = Vec::new();
    for i in -n..=m {
        for j in 0..=(m + n) {
            let p = (i, j);
            let l0 = cr((p1.0 - i, p1.1 - j), (p2.0 - i, p2.1 - j));
            let l1 = cr((p2.0 - i, p2.1 - j), (-i, -j));
            let l2 = cr((-i, -j), (p1.0 - i, p1.1 - j));
            if l0 >= 0 && l1 >= 0 && l2 >= 0 {
                debug_assert_eq!(l0 + l1 + l2, area);
                lattice.push((p, [l0 as f64, l1 as f64, l2 as f64]));
            }
        }
    }
    let (verts, faces) = icosahedron();
    let mut bag = PointBag::new();
    let af = area as f64;
    for f in &faces {
        let (a, b, c) = (verts[f[0]], verts[f[1]], verts[f[2]]);
        for (_, l) in &lattice {
            let q = [
                (l[0] * a[0] + l[1] * b[0] + l[2] * c[0]) / af,
                (l[0] * a[1] + l[1] * b[1] + l[2] * c[1]) / af,
                (l[0] * a[2] + l[1] * b[2] + l[2] * c[2]) / af,
            ];
            bag.insert(normalize(q));
        }
    }
    Ok(SpherePointSet { method: PointSetMethod::IcosaLattice, points: bag.points })
}

/// `10 (m^2 + m n + n^2) + 2`.
pub fn icosahedral_count(m: usize, n: usize) -> usize {
    10 * (m * n + m * m + n * n) + 2
}

/// Equal-area banded layout: one point at each pole, the rest on latitude
/// collars whose counts are proportional to collar area, each point at the
/// area-center of its cell, with a golden-angle longitude offset per collar.
pub fn polar_points(n: usize) -> Result<SpherePointSet> {
    use std::f64::consts::{PI, TAU};
    if n < 2 {
        return Err(Error::InvalidParams("polar point set needs N >= 2".into()));
    }
    let mut points = vec![[0.0, 0.0, 1.0]];
    if n > 2 {
        let cell_area = 4.0 * PI / n as f64;
        let cap = 2.0 * (1.0 / (n as f64).sqrt()).asin();
        let collars = (((PI - 2.0 * cap) / cell_area.sqrt()).round() as usize).max(1);
        let height = (PI - 2.0 * cap) / collars as f64;
        let golden = PI * (3.0 - 5f64.sqrt());
        let mut carry = 0.0;
        let mut placed = 0usize;
        for i in 0..collars {
            let top = cap + i as f64 * height;
            let bot = top + height;
            let count = if i + 1 == collars {
                n - 2 - placed
            } else {
                let ideal = TAU * (top.cos() - bot.cos()) / cell_area + carry;
                let c = ideal.round().max(0.0) as usize;
                carry = ideal - c as f64;
                c.min(n - 2 - placed)
            };
            placed += count;
            let z = 0.5 * (top.cos() + bot.cos());
            let rho = (1.0 - z * z).sqrt();
            let offset = (golden * i as f64) % TAU;
            for k in 0..count {
                let phi = offset + TAU * (k as f64 + 0.5) / count as f64;
                points.push([rho * phi.cos(), rho * phi.sin(), z]);
            }
        }
    }
    points.push([0.0, 0.0, -1.0]);
    Ok(SpherePointSet { method: PointSetMethod::Polar, points })
}

/// Riesz `s`-energy with the largest tangential gradient norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub s: f64,
    pub energy: f64,
    pub gradient_norm: f64,
}

/// Energy and tangential gradients, deterministic in the point order.
fn energy_and_gradient(points: &[Vec3], s: f64) -> Result<(f64, Vec<Vec3>)> {
    let rows: Vec<std::result::Result<(f64, Vec3), (usize, usize)>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let zi = points[i];
            let mut e = 0.0;
            let mut g = [0.0; 3];
            for (j, &zj) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = sub(zi, zj);
                let r2 = dot(d, d);
                if r2 == 0.0 {
                    return Err((i.min(j), i.max(j)));
                }
                let rs = if s == 1.0 {
                    1.0 / r2.sqrt()
                } else if s == 2.0 {
                    1.0 / r2
                } else {
                    r2.powf(-0.5 * s)
                };
                e += rs;
                let f = -s * rs / r2;
                g = [g[0] + f * d[0], g[1] + f * d[1], g[2] + f * d[2]];
            }
            let radial = dot(g, zi);
            Ok((e, [g[0] - radial * zi[0], g[1] - radial * zi[1], g[2] - radial * zi[2]]))
        })
        .collect();
    let mut energy = 0.0;
    let mut grads = Vec::with_capacity(points.len());
    for r in rows {
        let (e, g) = r.map_err(|(i, j)| Error::CoincidentPoints(i, j))?;
        energy += e;
        grads.push(g);
    }
    Ok((0.5 * energy, grads))
}

/// `sum_{i<j} |z_i - z_j|^{-s}`.
pub fn riesz_energy(ps: &SpherePointSet, s: f64) -> Result<EnergyReport> {
    if !(s > 0.0) {
        return Err(Error::InvalidParams(format!("Riesz exponent must be > 0, got {s}")));
    }
    let (energy, grads) = energy_and_gradient(&ps.points, s)?;
    let gradient_norm = grads.iter().map(|g| norm(*g)).fold(0.0, f64::max);
    Ok(EnergyReport { s, energy, gradient_norm })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimized {
    pub set: SpherePointSet,
    pub report: EnergyReport,
    pub iterations: usize,
    /// Whether the gradient tolerance was met (otherwise the iteration cap
    /// was hit or the line search stalled).
    pub converged: bool,
}

/// Projected gradient descent on the product of spheres:
/// `u <- normalize(u - eta (I - u u^T) grad)`, with an Armijo backtracking
/// line search whose trial step starts at `1/N` and doubles after each
/// accepted step. The energy never increases.
pub fn minimize_energy(ps: &SpherePointSet, s: f64, max_iters: usize, tol: f64) -> Result<Minimized> {
    if !(s > 0.0) {
        return Err(Error::InvalidParams(format!("Riesz exponent must be > 0, got {s}")));
    }
    let mut points = ps.points.clone();
    let (mut energy, mut grads) = energy_and_gradient(&points, s)?;
    let mut eta = 1.0 / ps.len().max(1) as f64;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        let gmax = grads.iter().map(|g| norm(*g)).fold(0.0, f64::max);
        if gmax < tol {
            converged = true;
            break;
        }
        let g2: f64 = grads.iter().map(|g| dot(*g, *g)).sum();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<Vec3> = points
                .iter()
                .zip(&grads)
                .map(|(p, g)| normalize([p[0] - eta * g[0], p[1] - eta * g[1], p[2] - eta * g[2]]))
                .collect();
            match energy_and_gradient(&trial, s) {
                Ok((e, gr)) if e <= energy - 1e-4 * eta * g2 => {
                    points = trial;
                    energy = e;
                    grads = gr;
                    accepted = true;
                    break;
                }
                _ => eta *= 0.5,
            }
        }
        iterations += 1;
        if !accepted {
            break;
        }
        eta *= 2.0;
    }
    if !converged {
        converged = grads.iter().map(|g| norm(*g)).fold(0.0, f64::max) < tol;
    }
    let gradient_norm = grads.iter().map(|g| norm(*g)).fold(0.0, f64::max);
    Ok(Minimized {
        set: SpherePointSet { method: PointSetMethod::Minimized, points },
        report: EnergyReport { s, energy, gradient_norm },
        iterations,
        converged,
    })
}

/// Lowest energy over `restarts` minimizations from independent random
/// starts of `n` points.
pub fn thomson_best_of(n: usize, s: f64, restarts: usize, max_iters: usize, tol: f64, seed: u64) -> Result<Minimized> {
    let runs = (0..restarts.max(1) as u64)
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            minimize_energy(&random_points(n, &mut rng), s, max_iters, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(runs.into_iter().min_by(|a, b| a.report.energy.total_cmp(&b.report.energy)).expect("at least one restart"))
}

/// `cos(alpha) I + sin(alpha) xi(u)` for each point `u`.
pub fn pointset_to_class(ps: &SpherePointSet, alpha: f64) -> Vec<Su2Element<f64>> {
    let (c, s) = (alpha.cos(), alpha.sin());
    ps.points
        .iter()
        .map(|p| Su2Element::from_row(Complex::new(c, s * p[2]), Complex::new(s * p[0], s * p[1])))
        .collect()
}

/// Sorted class angles of all `|A| |B|` products of the two point sets placed
/// on `C_alpha` and `C_beta`.
pub fn deterministic_product_angles(a: &SpherePointSet, alpha: f64, b: &SpherePointSet, beta: f64) -> Vec<f64> {
    let ga = pointset_to_class(a, alpha);
    let gb = pointset_to_class(b, beta);
    let mut out: Vec<f64> = ga.par_iter().flat_map_iter(|x| gb.iter().map(move |y| (*x * *y).class_angle())).collect();
    out.par_sort_unstable_by(f64::total_cmp);
    out
}

/// Histogram of [`deterministic_product_angles`] over the analytic support.
pub fn deterministic_product_measure(
    a: &SpherePointSet,
    alpha: f64,
    b: &SpherePointSet,
    beta: f64,
) -> Result<Histogram> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParams("point sets must be nonempty".into()));
    }
    let angles = deterministic_product_angles(a, alpha, b, beta);
    let mut h = Histogram::over_support(conj_support(alpha, beta), DEFAULT_BINS)?;
    for x in angles {
        h.add(x);
    }
    Ok(h)
}

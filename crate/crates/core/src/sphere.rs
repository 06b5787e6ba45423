//! Points on the unit sphere, product quadrature grids and the subsphericity
//! averaging kernel `K_{ρ,r}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::normalization::{ball_volume, sphere_area};
use crate::quadrature::{gauss_chebyshev_second, gauss_legendre};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector in `R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("sphere point needs at least one coordinate");
        }
        let norm = norm(&coords);
        if (norm - 1.0).abs() > UNIT_TOL {
            return domain(format!("|x| = {norm} is not 1"));
        }
        Ok(Self(coords))
    }

    /// Normalizes a nonzero vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let r = norm(v);
        if !(r > 0.0) || !r.is_finite() {
            return domain("cannot project the zero vector onto the sphere");
        }
        Ok(Self(v.iter().map(|x| x / r).collect()))
    }

    /// `(cos θ, sin θ)` on the circle.
    pub fn from_angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    /// First basis vector of `R^m`.
    pub fn pole(m: usize) -> Self {
        let mut v = vec![0.0; m];
        v[0] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Polar angle on the circle (only meaningful for `m = 2`).
    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two directions, `arccos` of the clamped inner product.
pub fn geodesic_angle(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return domain(format!("dimension mismatch: {} vs {}", x.dim(), y.dim()));
    }
    Ok(dot(x.coords(), y.coords()).clamp(-1.0, 1.0).acos())
}

/// `K_{ρ,r}` as a function of `cos φ = x·y` in dimension `m`.
///
/// Zero unless `cos φ > √(1 - r²)`. The radicand is clamped at 0, so both
/// branches meet continuously at the support boundary.
pub fn kernel_from_cos(rho: f64, m: usize, r: f64, cos_phi: f64) -> f64 {
    let c = cos_phi.clamp(-1.0, 1.0);
    let floor = (1.0 - r * r).max(0.0);
    if c <= floor.sqrt() {
        return 0.0;
    }
    kernel_branch(rho, m, r, c)
}

/// The two-branch expression without the support cut-off.
pub(crate) fn kernel_branch(rho: f64, m: usize, r: f64, c: f64) -> f64 {
    let q = rho + m as f64;
    let root = (c * c - (1.0 - r * r)).max(0.0).sqrt();
    let hi = c + root;
    let lo = (c - root).max(0.0);
    ((hi.powf(q) - lo.powf(q)) / q).max(0.0)
}

/// `K_{ρ,r}(x, y)`; the averaging kernel of the subsphericity mean-value test.
pub fn averaging_kernel(rho: f64, r: f64, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return domain(format!("kernel radius r = {r} is outside (0, 1]"));
    }
    if !(rho >= 0.0) {
        return domain(format!("kernel order ρ = {rho} must be nonnegative"));
    }
    if x.dim() != y.dim() {
        return domain(format!("dimension mismatch: {} vs {}", x.dim(), y.dim()));
    }
    Ok(kernel_from_cos(rho, x.dim(), r, dot(x.coords(), y.coords())))
}

/// Reproducibility record of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub m: usize,
    pub resolution: usize,
    pub rule: String,
    pub nodes: usize,
    pub total_weight: f64,
}

/// Quadrature rule for `dσ_{m-1}` on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    m: usize,
    resolution: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn descriptor(&self) -> GridDescriptor {
        let rule = match self.m {
            2 => "uniform-circle",
            3 => "gauss-legendre(cos)×uniform-azimuth",
            _ => "chebyshev-u(cos χ)×gauss-legendre(cos θ)×uniform-azimuth",
        };
        GridDescriptor {
            m: self.m,
            resolution: self.resolution,
            rule: rule.to_string(),
            nodes: self.len(),
            total_weight: self.total_weight(),
        }
    }
}

/// Builds the product rule for `m ∈ {2, 3, 4}`; `resolution` is the number of
/// azimuthal nodes, polar counts are `resolution / 2`.
pub fn build_grid(m: usize, resolution: usize) -> Result<SphereGrid> {
    if resolution < 4 {
        return domain(format!("grid resolution {resolution} is below 4"));
    }
    let az: Vec<f64> = (0..resolution)
        .map(|k| 2.0 * PI * k as f64 / resolution as f64)
        .collect();
    let daz = 2.0 * PI / resolution as f64;
    let polar = resolution / 2;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match m {
        2 => {
            for &t in &az {
                nodes.push(vec![t.cos(), t.sin()]);
                weights.push(daz);
            }
        }
        3 => {
            let (ct, wt) = gauss_legendre(polar);
            for (&c, &w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for &p in &az {
                    nodes.push(vec![c, s * p.cos(), s * p.sin()]);
                    weights.push(w * daz);
                }
            }
        }
        4 => {
            // dσ_3 = sin²χ sin θ dχ dθ dφ
            let (cchi, wchi) = gauss_chebyshev_second(polar);
            let (ct, wt) = gauss_legendre(polar);
            for (&a, &wa) in cchi.iter().zip(&wchi) {
                let sa = (1.0 - a * a).sqrt();
                for (&c, &w) in ct.iter().zip(&wt) {
                    let s = (1.0 - c * c).sqrt();
                    for &p in &az {
                        nodes.push(vec![a, sa * c, sa * s * p.cos(), sa * s * p.sin()]);
                        weights.push(wa * w * daz);
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(m)),
    }
    Ok(SphereGrid { m, resolution, nodes, weights })
}

/// `(1/s_{m-1}) Σ w_i F(center + ε node_i)`: the discrete spherical mean.
pub fn sphere_mean<F>(field: F, center: &[f64], eps: f64, grid: &SphereGrid) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(eps > 0.0) {
        return domain(format!("sphere radius ε = {eps} must be positive"));
    }
    if center.len() != grid.dim() {
        return domain("center dimension does not match the grid");
    }
    let mut point = vec![0.0; grid.dim()];
    let mut acc = 0.0;
    for (node, w) in grid.iter() {
        for ((p, c), u) in point.iter_mut().zip(center).zip(node) {
            *p = c + eps * u;
        }
        let value = field(&point);
        if !value.is_finite() {
            return Err(Error::Evaluation { node: point, value });
        }
        acc += w * value;
    }
    Ok(acc / sphere_area(grid.dim())?)
}

/// Orthonormal basis of the complement of the unit vector `x`.
pub(crate) fn orthonormal_complement(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for k in 0..m {
        if basis.len() == m - 1 {
            break;
        }
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for b in std::iter::once(x).chain(basis.iter().map(Vec::as_slice)) {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
        }
        let n = norm(&v);
        if n > 1e-6 {
            basis.push(v.iter().map(|t| t / n).collect());
        }
    }
    basis
}

/// `(1/(b_m r^m)) ∫ F(y) K_{ρ,r}(x, y) dσ_{m-1}(y)` for `m ∈ {2, 3, 4}`.
///
/// The integral is taken in polar coordinates about `x`: Gauss–Legendre in
/// `v` with `φ = φ₀ - v²` (which removes the square-root edge of the kernel at
/// `φ₀ = arcsin r`) times a rule on the `(m-2)`-sphere orthogonal to `x`.
pub fn kernel_average<F>(field: F, rho: f64, r: f64, x: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(r > 0.0 && r <= 1.0) {
        return domain(format!("kernel radius r = {r} is outside (0, 1]"));
    }
    let m = x.len();
    let basis = orthonormal_complement(x);
    // directions u ∈ S_{m-2} ⊂ x^⊥ with weights summing to s_{m-2}
    let ring: Vec<(Vec<f64>, f64)> = match m {
        2 => vec![(basis[0].clone(), 1.0), (basis[0].iter().map(|t| -t).collect(), 1.0)],
        3 => {
            let n = 64;
            (0..n)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    let u = basis[0].iter().zip(&basis[1]).map(|(p, q)| a.cos() * p + a.sin() * q);
                    (u.collect(), 2.0 * PI / n as f64)
                })
                .collect()
        }
        4 => build_grid(3, 16)?
            .iter()
            .map(|(s, w)| {
                let u = (0..4).map(|i| (0..3).map(|j| s[j] * basis[j][i]).sum());
                (u.collect(), w)
            })
            .collect(),
        _ => return Err(Error::UnsupportedDimension(m)),
    };
    let phi0 = r.min(1.0).asin();
    let vmax = phi0.sqrt();
    let (gx, gw) = gauss_legendre(16);
    let panels = 4;
    let hv = vmax / panels as f64;
    let mut y = vec![0.0; m];
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * hv;
        for (t, w) in gx.iter().zip(&gw) {
            let v = mid + 0.5 * hv * t;
            let phi = phi0 - v * v;
            let (s, c) = phi.sin_cos();
            let kv = kernel_from_cos(rho, m, r, c);
            if kv == 0.0 {
                continue;
            }
            let mut ring_sum = 0.0;
            for (u, wu) in &ring {
                for ((yi, xi), ui) in y.iter_mut().zip(x).zip(u) {
                    *yi = c * xi + s * ui;
                }
                ring_sum += wu * field(&y);
            }
            acc += 0.5 * hv * w * 2.0 * v * kv * s.powi(m as i32 - 2) * ring_sum;
        }
    }
    Ok(acc / (ball_volume(m)? * r.powi(m as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let e1 = SpherePoint::pole(2);
        let e2 = SpherePoint::new(vec![0.0, 1.0]).unwrap();
        let m1 = SpherePoint::new(vec![-1.0, 0.0]).unwrap();
        assert_eq!(geodesic_angle(&e1, &e1).unwrap(), 0.0);
        assert!((geodesic_angle(&e1, &m1).unwrap() - PI).abs() < 1e-15);
        assert!((geodesic_angle(&e1, &e2).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(geodesic_angle(&e1, &SpherePoint::pole(3)).is_err());
        assert!(SpherePoint::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn kernel_spot_value_and_support() {
        let x = SpherePoint::pole(2);
        let k = averaging_kernel(1.0, 1.0, &x, &x).unwrap();
        assert!((k - 8.0 / 3.0).abs() < 1e-15);
        // exactly on the support boundary
        let r: f64 = 0.6;
        let c = (1.0 - r * r).sqrt();
        assert_eq!(kernel_from_cos(1.0, 2, r, c), 0.0);
        assert_eq!(kernel_from_cos(1.0, 2, r, c - 1e-3), 0.0);
        assert!(averaging_kernel(1.0, 0.0, &x, &x).is_err());
        assert!(averaging_kernel(1.0, 1.5, &x, &x).is_err());
    }

    #[test]
    fn grid_weights() {
        let g = build_grid(2, 360).unwrap();
        assert_eq!(g.len(), 360);
        assert!(g.weights().iter().all(|w| (w - 2.0 * PI / 360.0).abs() < 1e-15));
        let g3 = build_grid(3, 32).unwrap();
        assert!((g3.total_weight() - 4.0 * PI).abs() < 1e-6);
        let g4 = build_grid(4, 24).unwrap();
        assert!((g4.total_weight() - 2.0 * PI * PI).abs() < 1e-6);
        for g in [&g, &g3, &g4] {
            assert!(g.nodes().iter().all(|n| (norm(n) - 1.0).abs() < 1e-12));
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
        assert!(matches!(build_grid(5, 8), Err(Error::UnsupportedDimension(5))));
        assert!(build_grid(3, 3).is_err());
    }

    #[test]
    fn kernel_average_of_radial_power() {
        // (1/(b_m r^m)) ∫ K dσ is the ball average of |z|^ρ over B(x, r);
        // for ρ = 2 that is 1 + m r²/(m + 2).
        for m in [2, 3, 4] {
            let x = SpherePoint::pole(m);
            for r in [0.05, 0.3, 1.0] {
                let avg = kernel_average(|_| 1.0, 2.0, r, x.coords()).unwrap();
                let exact = 1.0 + m as f64 * r * r / (m as f64 + 2.0);
                assert!((avg - exact).abs() < 1e-9, "m={m} r={r}: {avg} vs {exact}");
            }
        }
    }

    #[test]
    fn means() {
        for (m, res) in [(2, 64), (3, 16), (4, 12)] {
            let g = build_grid(m, res).unwrap();
            let zero = vec![0.0; m];
            assert!((sphere_mean(|_| 2.5, &zero, 0.3, &g).unwrap() - 2.5).abs() < 1e-12);
            let sq = sphere_mean(|x| dot(x, x), &zero, 1.0, &g).unwrap();
            assert!((sq - 1.0).abs() < 1e-12);
            for i in 0..m {
                let lin = sphere_mean(|x| x[i], &zero, 1.0, &g).unwrap();
                assert!(lin.abs() < 1e-10, "m={m} coord {i}: {lin}");
            }
        }
        let g = build_grid(2, 16).unwrap();
        let err = sphere_mean(|x| if x[0] < -0.99 { f64::NAN } else { 0.0 }, &[0.0, 0.0], 1.0, &g).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }
}

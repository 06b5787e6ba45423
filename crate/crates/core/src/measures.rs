//! Charges and zero divisors in the unit ball, their weighted radial counting
//! functions, and Riesz measures of growth envelopes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::normalization::{riesz_normalizer, sphere_area};
use crate::quadrature::integrate_toward_one;
use crate::sphere::{norm, SphereGrid};
use crate::subspherical::DirectionFunction;

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    Atom,
    Surface,
}

/// A point mass; surface samples carry `σ-weight × density` as their mass.
#[derive(Debug, Clone, Serialize)]
pub struct MassPoint {
    pub point: Vec<f64>,
    pub radius: f64,
    pub mass: f64,
    pub kind: MassKind,
}

fn direction(point: &[f64], radius: f64) -> Vec<f64> {
    point.iter().map(|v| v / radius).collect()
}

fn check_point(point: &[f64], m: usize) -> Result<f64> {
    if point.len() != m {
        return domain(format!("point {point:?} does not lie in R^{m}"));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return domain(format!("point {point:?} is not finite"));
    }
    let r = norm(point);
    if r == 0.0 {
        return domain("mass at the origin is not supported: its direction is undefined");
    }
    if r >= 1.0 {
        return domain(format!("point {point:?} lies outside the open unit ball"));
    }
    Ok(r)
}

fn sort_by_radius(entries: &mut [MassPoint]) {
    entries.sort_by(|a, b| a.radius.total_cmp(&b.radius));
}

/// A signed Borel measure in the unit ball of `R^m` made of atoms and
/// weighted surface samples, stored sorted by radius (stable).
#[derive(Debug, Clone, Serialize)]
pub struct BallMeasure {
    m: usize,
    label: String,
    entries: Vec<MassPoint>,
}

impl BallMeasure {
    pub fn zero(m: usize) -> Self {
        Self { m, label: "zero".into(), entries: Vec::new() }
    }

    /// `atoms`: `(point, signed mass)`; `samples`: `(point, σ-weight > 0, signed density)`.
    pub fn new(
        m: usize,
        label: impl Into<String>,
        atoms: &[(Vec<f64>, f64)],
        samples: &[(Vec<f64>, f64, f64)],
    ) -> Result<Self> {
        if m < 2 {
            return domain("ball dimension m must be at least 2");
        }
        let mut entries = Vec::with_capacity(atoms.len() + samples.len());
        for (point, mass) in atoms {
            let radius = check_point(point, m)?;
            if !mass.is_finite() {
                return domain(format!("mass {mass} is not finite"));
            }
            entries.push(MassPoint { point: point.clone(), radius, mass: *mass, kind: MassKind::Atom });
        }
        for (point, weight, density) in samples {
            let radius = check_point(point, m)?;
            if !(*weight > 0.0 && weight.is_finite()) || !density.is_finite() {
                return domain(format!("sample weight {weight} / density {density} is invalid"));
            }
            entries.push(MassPoint {
                point: point.clone(),
                radius,
                mass: weight * density,
                kind: MassKind::Surface,
            });
        }
        sort_by_radius(&mut entries);
        Ok(Self { m, label: label.into(), entries })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entries(&self) -> &[MassPoint] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| e.mass >= 0.0)
    }

    /// The jumps `(|x|, mass · h(x/|x|))` of `t ↦ μ^rad(t; h)`.
    pub fn radial_profile(&self, h: &DirectionFunction) -> Result<RadialProfile> {
        check_h(h, self.m)?;
        let jumps = self
            .entries
            .iter()
            .map(|e| (e.radius, h.eval(&direction(&e.point, e.radius)) * e.mass))
            .collect();
        Ok(RadialProfile { jumps, density: None })
    }
}

fn check_h(h: &DirectionFunction, m: usize) -> Result<()> {
    if h.dim() != m {
        return domain(format!("h lives on S_{} but the measure is in R^{m}", h.dim() - 1));
    }
    Ok(())
}

/// `μ^rad(r; h) = ∫_{rB} h(x/|x|) dμ(x)`.
pub fn radial_counting(mu: &BallMeasure, r: f64, h: &DirectionFunction) -> Result<f64> {
    check_h(h, mu.m)?;
    let mut acc = 0.0;
    for e in mu.entries.iter().take_while(|e| e.radius < r) {
        acc += h.eval(&direction(&e.point, e.radius)) * e.mass;
    }
    Ok(acc)
}

/// A radial distribution function `t ↦ μ^rad(t; h)` on `(0, 1)`: jumps plus
/// an optional density.
#[derive(Clone)]
pub struct RadialProfile {
    pub jumps: Vec<(f64, f64)>,
    pub density: Option<RadialFn>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("jumps", &self.jumps.len())
            .field("density", &self.density.is_some())
            .finish()
    }
}

impl RadialProfile {
    pub fn zero() -> Self {
        Self { jumps: Vec::new(), density: None }
    }

    pub fn from_density(density: RadialFn) -> Self {
        Self { jumps: Vec::new(), density: Some(density) }
    }

    /// `∫_{(a, b)} f dμ^rad`; jumps at `a` or `b` are excluded.
    pub fn stieltjes<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for &(t, jump) in &self.jumps {
            if t > a && t < b {
                acc += f(t) * jump;
            }
        }
        if let Some(d) = &self.density {
            acc += integrate_toward_one(|t| f(t) * d(t), a, b);
        }
        acc
    }

    /// `μ^rad(r) = μ^rad over the open ball rB`.
    pub fn cumulative(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for &(t, jump) in &self.jumps {
            if t < r {
                acc += jump;
            }
        }
        if let Some(d) = &self.density {
            acc += integrate_toward_one(|t| d(t), 0.0, r);
        }
        acc
    }

    /// Jumps located exactly at radius `r`.
    pub fn jumps_at(&self, r: f64) -> usize {
        self.jumps.iter().filter(|(t, _)| *t == r).count()
    }
}

/// Value of a shell integral over the open shell `r < |x| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellIntegral {
    pub value: f64,
    /// Support points at `|x| = r`, left out by the open-interval convention.
    pub excluded_on_boundary: usize,
}

/// `∫_{B \ r clos B} f(|x|) h(x/|x|) dμ(x)`, summed point by point.
pub fn shell_integral_lhs<F: Fn(f64) -> f64>(
    f: F,
    mu: &BallMeasure,
    h: &DirectionFunction,
    r: f64,
) -> Result<ShellIntegral> {
    check_h(h, mu.m)?;
    let mut value = 0.0;
    let mut excluded_on_boundary = 0;
    for e in &mu.entries {
        if e.radius == r {
            excluded_on_boundary += 1;
        } else if e.radius > r {
            value += f(e.radius) * (h.eval(&direction(&e.point, e.radius)) * e.mass);
        }
    }
    Ok(ShellIntegral { value, excluded_on_boundary })
}

/// `∫_{(r, 1)} f(t) dμ^rad(t; h)` as a Stieltjes sum over the jumps of the
/// radial counting function.
pub fn shell_integral_rhs<F: Fn(f64) -> f64>(
    f: F,
    mu: &BallMeasure,
    h: &DirectionFunction,
    r: f64,
) -> Result<ShellIntegral> {
    let profile = mu.radial_profile(h)?;
    Ok(ShellIntegral {
        value: profile.stieltjes(f, r, 1.0),
        excluded_on_boundary: profile.jumps_at(r),
    })
}

/// `σ_{2n-2}` sample of a component: point in `R^{2n}`, radius, weight.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSample {
    pub point: Vec<f64>,
    pub radius: f64,
    pub weight: f64,
    pub mult: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Patch {
    /// The slice `{z₁ = c}` of the ball in `C²`.
    Hyperplane { c: f64, radial: usize, angular: usize },
    /// User-supplied samples.
    Samples,
}

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub mult: f64,
    pub patch: Patch,
    #[serde(skip)]
    pub samples: Vec<SurfaceSample>,
}

/// Default sampling of a hyperplane slice: equal-area rings × angles.
pub const HYPERPLANE_RADIAL: usize = 4096;
pub const HYPERPLANE_ANGULAR: usize = 32;

impl Component {
    /// `{z₁ = c}` in the ball of `C²` (points ordered `(x₁, x₂, y₁, y₂)`), sampled at
    /// area midpoints of `radial` equal-area rings, `angular` points each.
    pub fn hyperplane(c: f64, mult: f64, radial: usize, angular: usize) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return domain(format!("hyperplane offset |c| = {} must be < 1", c.abs()));
        }
        if !(mult >= 0.0 && mult.is_finite()) {
            return domain(format!("multiplicity {mult} must be finite and >= 0"));
        }
        if radial == 0 || angular == 0 {
            return domain("hyperplane sampling needs positive resolution");
        }
        let big_r2 = 1.0 - c * c;
        let weight = PI * big_r2 / (radial * angular) as f64;
        let mut samples = Vec::with_capacity(radial * angular);
        for i in 0..radial {
            let rho = (big_r2 * (i as f64 + 0.5) / radial as f64).sqrt();
            for j in 0..angular {
                let phi = 2.0 * PI * (j as f64 + 0.5) / angular as f64;
                let point = vec![c, rho * phi.cos(), 0.0, rho * phi.sin()];
                let radius = norm(&point);
                if radius == 0.0 {
                    continue;
                }
                samples.push(SurfaceSample { point, radius, weight, mult });
            }
        }
        Ok(Self { mult, patch: Patch::Hyperplane { c, radial, angular }, samples })
    }

    /// Rows `[point (2n coords), σ-weight, multiplicity]`.
    pub fn from_samples(n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut samples = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != 2 * n + 2 {
                return domain(format!("sample row needs {} entries, found {}", 2 * n + 2, row.len()));
            }
            let point = row[..2 * n].to_vec();
            let radius = check_point(&point, 2 * n)?;
            let (weight, mult) = (row[2 * n], row[2 * n + 1]);
            if !(weight > 0.0 && weight.is_finite()) || !(mult >= 0.0 && mult.is_finite()) {
                return domain(format!("sample weight {weight} / multiplicity {mult} is invalid"));
            }
            samples.push(SurfaceSample { point, radius, weight, mult });
        }
        Ok(Self { mult: 1.0, patch: Patch::Samples, samples })
    }

    /// Closed-form `σ_2`-counting `mult · π (r² - c²)⁺` when available.
    fn closed_form(&self, r: f64) -> Option<f64> {
        match self.patch {
            Patch::Hyperplane { c, .. } => {
                let r = r.min(1.0);
                Some(self.mult * PI * (r * r - c * c).max(0.0))
            }
            Patch::Samples => None,
        }
    }
}

/// A (sub)divisor of zeros of a holomorphic function in the ball of `Cⁿ`.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroDivisor {
    n: usize,
    label: String,
    /// `n = 1` zeros as points of `R²`, sorted by modulus.
    atoms: Vec<MassPoint>,
    components: Vec<Component>,
}

impl ZeroDivisor {
    pub fn empty(n: usize) -> Self {
        Self { n, label: "empty".into(), atoms: Vec::new(), components: Vec::new() }
    }

    /// Zeros `a_k` in the unit disk with positive real multiplicities.
    pub fn planar(label: impl Into<String>, zeros: &[(Complex64, f64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(zeros.len());
        for (a, mult) in zeros {
            let point = vec![a.re, a.im];
            let radius = check_point(&point, 2)?;
            if !(*mult >= 0.0 && mult.is_finite()) {
                return domain(format!("multiplicity {mult} must be finite and >= 0"));
            }
            atoms.push(MassPoint { point, radius, mass: *mult, kind: MassKind::Atom });
        }
        sort_by_radius(&mut atoms);
        Ok(Self { n: 1, label: label.into(), atoms, components: Vec::new() })
    }

    /// Real zeros `a_k` of multiplicity one.
    pub fn real_zeros(label: impl Into<String>, zeros: &[f64]) -> Result<Self> {
        let z: Vec<(Complex64, f64)> = zeros.iter().map(|&a| (Complex64::new(a, 0.0), 1.0)).collect();
        Self::planar(label, &z)
    }

    /// Divisor in `Cⁿ`, `n ≥ 2`, built from sampled components.
    pub fn from_components(n: usize, label: impl Into<String>, components: Vec<Component>) -> Result<Self> {
        if n < 2 {
            return domain("components need complex dimension n >= 2; use planar zeros for n = 1");
        }
        for comp in &components {
            if matches!(comp.patch, Patch::Hyperplane { .. }) && n != 2 {
                return Err(Error::Unsupported(format!("hyperplane patches are sampled only in C², not C^{n}")));
            }
            if comp.samples.iter().any(|s| s.point.len() != 2 * n) {
                return domain(format!("component samples must lie in R^{}", 2 * n));
            }
        }
        Ok(Self { n, label: label.into(), atoms: Vec::new(), components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n` of the ambient ball.
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atoms(&self) -> &[MassPoint] {
        &self.atoms
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Planar zeros as complex numbers with multiplicities.
    pub fn zeros(&self) -> Vec<(Complex64, f64)> {
        self.atoms.iter().map(|a| (Complex64::new(a.point[0], a.point[1]), a.mass)).collect()
    }

    /// All point contributions `(point, radius, σ-weight · multiplicity)` sorted by radius.
    fn sampled_points(&self) -> Vec<MassPoint> {
        let mut out: Vec<MassPoint> = self.atoms.clone();
        for comp in &self.components {
            for s in &comp.samples {
                out.push(MassPoint {
                    point: s.point.clone(),
                    radius: s.radius,
                    mass: s.weight * s.mult,
                    kind: MassKind::Surface,
                });
            }
        }
        sort_by_radius(&mut out);
        out
    }

    /// `t ↦ Z^rad(t; h)`; closed-form hyperplane densities are used when `h` is constant.
    pub fn radial_profile(&self, h: &DirectionFunction) -> Result<RadialProfile> {
        self.profile(h, true)
    }

    /// As [`Self::radial_profile`] but always from the surface samples.
    pub fn sampled_radial_profile(&self, h: &DirectionFunction) -> Result<RadialProfile> {
        self.profile(h, false)
    }

    fn profile(&self, h: &DirectionFunction, closed_forms: bool) -> Result<RadialProfile> {
        check_h(h, self.real_dim())?;
        let constant = if closed_forms { h.as_constant() } else { None };
        let mut jumps: Vec<(f64, f64)> =
            self.atoms.iter().map(|a| (a.radius, h.eval(&direction(&a.point, a.radius)) * a.mass)).collect();
        let mut discs = Vec::new();
        let mut sampled = Vec::new();
        for comp in &self.components {
            match (constant, &comp.patch) {
                (Some(hc), Patch::Hyperplane { c, .. }) => discs.push((c.abs(), hc * comp.mult)),
                _ => sampled.extend(comp.samples.iter().map(|s| {
                    (s.radius, h.eval(&direction(&s.point, s.radius)) * (s.weight * s.mult))
                })),
            }
        }
        jumps.extend(sampled);
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let density: Option<RadialFn> = if discs.is_empty() {
            None
        } else {
            Some(Arc::new(move |t: f64| {
                discs.iter().map(|&(c, w)| if t > c && t < 1.0 { w * 2.0 * PI * t } else { 0.0 }).sum()
            }))
        };
        Ok(RadialProfile { jumps, density })
    }
}

/// `Z^rad(r; h) = ∫_{rB} Z h(z/|z|) dσ_{2n-2}`; hyperplane slices use their
/// closed form `π (r² - c²)⁺` when `h` is constant.
pub fn divisor_counting(z: &ZeroDivisor, r: f64, h: &DirectionFunction) -> Result<f64> {
    check_h(h, z.real_dim())?;
    let constant = h.as_constant();
    let mut acc = 0.0;
    for a in z.atoms.iter().take_while(|a| a.radius < r) {
        acc += h.eval(&direction(&a.point, a.radius)) * a.mass;
    }
    for comp in &z.components {
        match (constant, comp.closed_form(r)) {
            (Some(hc), Some(area)) => acc += hc * area,
            _ => {
                for s in comp.samples.iter().filter(|s| s.radius < r) {
                    acc += h.eval(&direction(&s.point, s.radius)) * (s.weight * s.mult);
                }
            }
        }
    }
    Ok(acc)
}

/// As [`divisor_counting`], always summing the surface samples.
pub fn divisor_counting_sampled(z: &ZeroDivisor, r: f64, h: &DirectionFunction) -> Result<f64> {
    check_h(h, z.real_dim())?;
    let mut acc = 0.0;
    for p in z.sampled_points().iter().take_while(|p| p.radius < r) {
        acc += h.eval(&direction(&p.point, p.radius)) * p.mass;
    }
    Ok(acc)
}

/// The counting measure `n_Z` of a divisor, i.e. the Riesz measure of `log|f|`:
/// atoms of mass `multiplicity` for `n = 1`, `σ`-weighted samples for `n ≥ 2`.
pub fn poincare_lelong_measure(z: &ZeroDivisor) -> BallMeasure {
    BallMeasure {
        m: z.real_dim(),
        label: format!("counting measure of {}", z.label),
        entries: z.sampled_points(),
    }
}

/// `u(z) = Σ mult_k log|(a_k - z)/(1 - ā_k z)|`, `-∞` at a zero.
pub fn blaschke_log_modulus(zeros: &ZeroDivisor, z: Complex64) -> Result<f64> {
    if zeros.n != 1 {
        return Err(Error::Unsupported("Blaschke products are built for n = 1 only".into()));
    }
    if !(z.norm() < 1.0) {
        return domain(format!("|z| = {} is outside the open unit disk", z.norm()));
    }
    let mut u = 0.0;
    for (a, mult) in zeros.zeros() {
        let factor = ((a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)).norm();
        u += mult * factor.ln();
    }
    Ok(u)
}

/// A majorant `M` for `log|f|` (or `u`).
#[derive(Clone)]
pub enum GrowthEnvelope {
    Zero,
    /// `M(r) = c (1 - r)^{-p}`.
    RadialPower { c: f64, p: f64 },
    /// `M = log|B|` for the Blaschke product of the zeros.
    LogBlaschke(ZeroDivisor),
    /// Radial profile `M(r)` with derivative `M'(r)`.
    Custom { label: String, value: RadialFn, derivative: RadialFn },
}

impl std::fmt::Debug for GrowthEnvelope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::RadialPower { c, p } => write!(f, "RadialPower {{ c: {c}, p: {p} }}"),
            Self::LogBlaschke(z) => write!(f, "LogBlaschke({})", z.label()),
            Self::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

impl GrowthEnvelope {
    pub fn radial_power(c: f64, p: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) || !(p > 0.0 && p.is_finite()) {
            return domain(format!("radial power needs c >= 0 and p > 0, got c = {c}, p = {p}"));
        }
        Ok(Self::RadialPower { c, p })
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Self::LogBlaschke(_))
    }

    /// `μ_M^rad(t; h)`. Radial envelopes use `μ_M^rad(t) · mean(h)`,
    /// the Blaschke envelope uses the counting measure of its zeros.
    pub fn radial_profile(&self, m: usize, h: &DirectionFunction, grid: &SphereGrid) -> Result<RadialProfile> {
        check_h(h, m)?;
        match self {
            Self::Zero => Ok(RadialProfile::zero()),
            Self::LogBlaschke(z) => {
                if z.real_dim() != m {
                    return domain("Blaschke zeros do not live in the ball of this dimension");
                }
                poincare_lelong_measure(z).radial_profile(h)
            }
            _ => {
                if grid.dim() != m {
                    return domain("grid dimension does not match the ball");
                }
                let riesz = radial_riesz_density(self, m)?;
                let mean = h.grid_mean(grid);
                Ok(RadialProfile::from_density(Arc::new(move |t| mean * riesz.density(t))))
            }
        }
    }
}

/// Radial Riesz measure of a radial envelope: `μ_M(rB) = (s_{m-1}/d_{m-1}) r^{m-1} M'(r)`.
#[derive(Clone)]
pub struct RadialRiesz {
    m: usize,
    ratio: f64,
    envelope: GrowthEnvelope,
}

/// Cumulative and density of the Riesz measure of a radial envelope.
pub fn radial_riesz_density(envelope: &GrowthEnvelope, m: usize) -> Result<RadialRiesz> {
    if !envelope.is_radial() {
        return Err(Error::Unsupported("the Riesz density is defined for radial envelopes only".into()));
    }
    let ratio = sphere_area(m)? / riesz_normalizer(m)?;
    Ok(RadialRiesz { m, ratio, envelope: envelope.clone() })
}

impl RadialRiesz {
    fn derivative(&self, r: f64) -> f64 {
        match &self.envelope {
            GrowthEnvelope::RadialPower { c, p } => c * p * (1.0 - r).powf(-p - 1.0),
            GrowthEnvelope::Custom { derivative, .. } => derivative(r),
            _ => 0.0,
        }
    }

    /// `μ_M^rad(r)`.
    pub fn cumulative(&self, r: f64) -> f64 {
        if matches!(self.envelope, GrowthEnvelope::Zero) {
            return 0.0;
        }
        self.ratio * r.powi(self.m as i32 - 1) * self.derivative(r)
    }

    /// `dμ_M^rad / dr`.
    pub fn density(&self, r: f64) -> f64 {
        let k = self.m as i32 - 1;
        match &self.envelope {
            GrowthEnvelope::Zero | GrowthEnvelope::LogBlaschke(_) => 0.0,
            GrowthEnvelope::RadialPower { c, p } => {
                let second = c * p * (p + 1.0) * (1.0 - r).powf(-p - 2.0);
                self.ratio * (k as f64 * r.powi(k - 1) * self.derivative(r) + r.powi(k) * second)
            }
            GrowthEnvelope::Custom { .. } => {
                let step = 1e-5 * r.min(1.0 - r);
                (self.cumulative(r + step) - self.cumulative(r - step)) / (2.0 * step)
            }
        }
    }
}

/// Generated real zero sequences for configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ZeroSequence {
    /// `a_k = 1 - k^{-exponent}`, `k = 2..=count + 1`.
    Power { exponent: f64, count: usize },
    /// `a_k = 1 - 2^{-k}`, `k = 1..=count`.
    Geometric { count: usize },
}

impl ZeroSequence {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Self::Power { exponent, count } => {
                (2..count + 2).map(|k| 1.0 - (k as f64).powf(-exponent)).collect()
            }
            Self::Geometric { count } => (1..=count).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub point: Vec<f64>,
    #[serde(default = "one")]
    pub mult: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum PatchSpec {
    Hyperplane {
        c: f64,
        #[serde(default)]
        resolution: Option<usize>,
        #[serde(default)]
        angular: Option<usize>,
        #[serde(default = "one")]
        mult: f64,
    },
    Samples { data: Vec<Vec<f64>> },
}

/// Config form of a divisor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub n: usize,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub sequences: Vec<ZeroSequence>,
    #[serde(default)]
    pub patches: Vec<PatchSpec>,
}

impl DivisorSpec {
    pub fn build(&self) -> Result<ZeroDivisor> {
        let label = self.label.clone().unwrap_or_else(|| "divisor".into());
        match self.n {
            0 => domain("complex dimension n must be at least 1"),
            1 => {
                if !self.patches.is_empty() {
                    return domain("patches need n >= 2; planar divisors take atoms");
                }
                let mut zeros = Vec::new();
                for a in &self.atoms {
                    if a.point.len() != 2 {
                        return domain(format!("planar zero {:?} needs two coordinates", a.point));
                    }
                    zeros.push((Complex64::new(a.point[0], a.point[1]), a.mult));
                }
                for seq in &self.sequences {
                    zeros.extend(seq.points().into_iter().map(|x| (Complex64::new(x, 0.0), 1.0)));
                }
                ZeroDivisor::planar(label, &zeros)
            }
            n => {
                if !self.atoms.is_empty() || !self.sequences.is_empty() {
                    return domain("isolated zeros exist only for n = 1");
                }
                let comps = self
                    .patches
                    .iter()
                    .map(|p| match p {
                        PatchSpec::Hyperplane { c, resolution, angular, mult } => Component::hyperplane(
                            *c,
                            *mult,
                            resolution.unwrap_or(HYPERPLANE_RADIAL),
                            angular.unwrap_or(HYPERPLANE_ANGULAR),
                        ),
                        PatchSpec::Samples { data } => Component::from_samples(n, data),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ZeroDivisor::from_components(n, label, comps)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{build_grid, SpherePoint};
    use crate::subspherical::example_cap_cosine;

    fn one(m: usize) -> DirectionFunction {
        DirectionFunction::constant(m, 1.0, 1.0).unwrap()
    }

    #[test]
    fn counting_examples() {
        let mu = BallMeasure::new(2, "a", &[(vec![0.8, 0.0], 1.0)], &[]).unwrap();
        assert_eq!(radial_counting(&mu, 0.9, &one(2)).unwrap(), 1.0);
        assert_eq!(radial_counting(&mu, 0.7, &one(2)).unwrap(), 0.0);
        let s = SpherePoint::from_angle(1.0);
        let mu = BallMeasure::new(2, "b", &[(s.coords().iter().map(|v| 0.8 * v).collect(), 1.0)], &[]).unwrap();
        let cap = example_cap_cosine(&s, 1.0).unwrap();
        assert!((radial_counting(&mu, 0.9, &cap).unwrap() - 1.0).abs() < 1e-15);
        let pm = BallMeasure::new(2, "c", &[(vec![0.6, 0.0], 1.0), (vec![-0.6, 0.0], -1.0)], &[]).unwrap();
        assert_eq!(radial_counting(&pm, 0.9, &one(2)).unwrap(), 0.0);
        assert!(BallMeasure::new(2, "o", &[(vec![0.0, 0.0], 1.0)], &[]).is_err());
    }

    #[test]
    fn shell_integral_examples() {
        let id = |t: f64| t;
        let mu = BallMeasure::new(2, "a", &[(vec![0.0, 0.8], 1.0)], &[]).unwrap();
        let l = shell_integral_lhs(id, &mu, &one(2), 0.5).unwrap();
        let r = shell_integral_rhs(id, &mu, &one(2), 0.5).unwrap();
        assert_eq!(l.value, 0.8);
        assert_eq!(l, r);

        let two = BallMeasure::new(2, "b", &[(vec![0.6, 0.0], 1.0), (vec![0.0, -0.9], 1.0)], &[]).unwrap();
        let f = |t: f64| 1.0 - t;
        let l = shell_integral_lhs(f, &two, &one(2), 0.5).unwrap();
        assert!((l.value - 0.5).abs() < 1e-15);
        assert_eq!(l, shell_integral_rhs(f, &two, &one(2), 0.5).unwrap());

        let edge = BallMeasure::new(2, "c", &[(vec![0.5, 0.0], 1.0)], &[]).unwrap();
        let l = shell_integral_lhs(id, &edge, &one(2), 0.5).unwrap();
        assert_eq!(l, ShellIntegral { value: 0.0, excluded_on_boundary: 1 });
        assert_eq!(l, shell_integral_rhs(id, &edge, &one(2), 0.5).unwrap());
    }

    #[test]
    fn divisor_examples() {
        let z = ZeroDivisor::real_zeros("z", &[0.75]).unwrap();
        assert_eq!(divisor_counting(&z, 0.8, &one(2)).unwrap(), 1.0);

        let plane = ZeroDivisor::from_components(2, "p", vec![Component::hyperplane(0.3, 1.0, 4096, 32).unwrap()])
            .unwrap();
        let h4 = one(4);
        assert!((divisor_counting(&plane, 0.8, &h4).unwrap() - PI * (0.64 - 0.09)).abs() < 1e-15);
        assert_eq!(divisor_counting(&plane, 0.3, &h4).unwrap(), 0.0);
        let sampled = divisor_counting_sampled(&plane, 0.8, &h4).unwrap();
        assert!((sampled / (PI * 0.55) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn counting_measure_of_zeros() {
        let z = ZeroDivisor::planar("d", &[(Complex64::new(0.75, 0.0), 2.0)]).unwrap();
        let mu = poincare_lelong_measure(&z);
        assert_eq!(mu.entries().len(), 1);
        assert_eq!(mu.entries()[0].point, vec![0.75, 0.0]);
        assert_eq!(mu.entries()[0].mass, 2.0);
        assert!(poincare_lelong_measure(&ZeroDivisor::empty(1)).is_empty());

        let plane =
            ZeroDivisor::from_components(2, "p", vec![Component::hyperplane(0.0, 1.0, 4096, 32).unwrap()]).unwrap();
        let mu = poincare_lelong_measure(&plane);
        let got = radial_counting(&mu, 0.7, &one(4)).unwrap();
        assert!((got / (PI * 0.49) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn riesz_densities() {
        let m = GrowthEnvelope::radial_power(2.0, 1.5).unwrap();
        let rr = radial_riesz_density(&m, 2).unwrap();
        let r = 0.6f64;
        assert!((rr.cumulative(r) - 2.0 * 1.5 * r * (1.0 - r).powf(-2.5)).abs() < 1e-12);
        let fd = (rr.cumulative(r + 1e-6) - rr.cumulative(r - 1e-6)) / 2e-6;
        assert!((rr.density(r) / fd - 1.0).abs() < 1e-8);
        assert_eq!(radial_riesz_density(&GrowthEnvelope::Zero, 2).unwrap().cumulative(0.5), 0.0);

        let sq = GrowthEnvelope::Custom {
            label: "r^2".into(),
            value: Arc::new(|r| r * r),
            derivative: Arc::new(|r| 2.0 * r),
        };
        let rr = radial_riesz_density(&sq, 2).unwrap();
        assert!((rr.cumulative(0.7) - 2.0 * 0.49).abs() < 1e-15);
        assert!((rr.density(0.7) - 4.0 * 0.7).abs() < 1e-6);

        let z = ZeroDivisor::real_zeros("z", &[0.5]).unwrap();
        assert!(matches!(radial_riesz_density(&GrowthEnvelope::LogBlaschke(z), 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn envelope_profile_integrates_to_cumulative() {
        let grid = build_grid(2, 64).unwrap();
        let m = GrowthEnvelope::radial_power(1.0, 1.0).unwrap();
        let prof = m.radial_profile(2, &one(2), &grid).unwrap();
        let rr = radial_riesz_density(&m, 2).unwrap();
        let diff = prof.stieltjes(|_| 1.0, 0.5, 0.9);
        assert!((diff - (rr.cumulative(0.9) - rr.cumulative(0.5))).abs() < 1e-9);
    }

    #[test]
    fn blaschke_modulus() {
        let a = Complex64::new(0.3, 0.4);
        let z = ZeroDivisor::planar("b", &[(a, 1.0)]).unwrap();
        assert!((blaschke_log_modulus(&z, Complex64::new(0.0, 0.0)).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let near = blaschke_log_modulus(&z, Complex64::from_polar(1.0 - 1e-9, 2.0)).unwrap();
        assert!(near <= 0.0 && near > -1e-7);
        assert_eq!(blaschke_log_modulus(&z, a).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn divisor_config() {
        let spec: DivisorSpec = serde_json::from_str(
            r#"{"n": 1, "atoms": [{"point": [0.5, 0.0], "mult": 2}], "sequences": [{"kind": "geometric", "count": 3}]}"#,
        )
        .unwrap();
        let z = spec.build().unwrap();
        assert_eq!(z.atoms().len(), 4);
        assert_eq!(z.atoms()[0].mass, 2.0);
        let spec: DivisorSpec =
            serde_json::from_str(r#"{"n": 2, "patches": [{"type": "hyperplane", "c": 0.0, "resolution": 64}]}"#)
                .unwrap();
        assert_eq!(spec.build().unwrap().components()[0].samples.len(), 64 * 32);
        assert!(serde_json::from_str::<DivisorSpec>(r#"{"n": 1, "zeros": []}"#).is_err());
    }
}

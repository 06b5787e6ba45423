//! Candidate ρ-subspherical functions on the unit sphere and numerical tests of
//! the four equivalent characterizations: ρ-trigonometric convexity (circle
//! only), the kernel mean-value inequality, positivity of `Δ_S + ρ(ρ+m-2)`
//! (circle only) and subharmonicity of the homogeneous extension.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::sphere::{dot, kernel_average, kernel_from_cos, norm, sphere_mean, SphereGrid, SpherePoint};

/// Pointwise evaluator for user-defined direction functions.
pub type DirectionFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Constant(f64),
    CapCosine { center: SpherePoint, rho: f64 },
    KernelSlice { rho: f64, r: f64, pole: SpherePoint },
    Support { points: Vec<Vec<f64>> },
    /// `cos(freq (θ - phase))` on the circle.
    Cosine { freq: f64, phase: f64 },
    /// Samples at `θ_k = 2πk/N`, periodic linear interpolation.
    Table { values: Vec<f64> },
    PositivePart(Box<Shape>),
    Max(Box<Shape>, Box<Shape>),
    Scale(f64, Box<Shape>),
    Sum(Box<Shape>, Box<Shape>),
    Custom { f: DirectionFn, kinks: Vec<f64> },
}

/// Regularity of a direction function, used to decide which checks apply pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    Kinked,
    General,
}

/// A function `h` on `S_{m-1}` together with its declared order ρ.
#[derive(Clone)]
pub struct DirectionFunction {
    m: usize,
    rho: f64,
    shape: Shape,
    label: String,
}

impl fmt::Debug for DirectionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectionFunction")
            .field("m", &self.m)
            .field("rho", &self.rho)
            .field("label", &self.label)
            .finish()
    }
}

fn check_order(rho: f64) -> Result<()> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("order ρ = {rho} must be a finite nonnegative number"));
    }
    Ok(())
}

/// True if some `κ + 2πk` lies in `[lo, hi]`.
fn angle_in_arc(kappa: f64, lo: f64, hi: f64) -> bool {
    let k = ((lo - kappa) / (2.0 * PI)).ceil();
    kappa + 2.0 * PI * k <= hi
}

fn sign_changes(values: &[f64]) -> bool {
    values.windows(2).any(|w| w[0] * w[1] <= 0.0 && !(w[0] == 0.0 && w[1] == 0.0))
}

impl Shape {
    fn eval(&self, s: &[f64]) -> f64 {
        match self {
            Shape::Constant(c) => *c,
            Shape::CapCosine { center, rho } => {
                let phi = dot(s, center.coords()).clamp(-1.0, 1.0).acos();
                if phi < PI / (2.0 * rho) {
                    (rho * phi).cos()
                } else {
                    0.0
                }
            }
            Shape::KernelSlice { rho, r, pole } => {
                kernel_from_cos(*rho, s.len(), *r, dot(s, pole.coords()))
            }
            Shape::Support { points } => points
                .iter()
                .map(|p| dot(s, p))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Cosine { freq, phase } => (freq * (s[1].atan2(s[0]) - phase)).cos(),
            Shape::Table { values } => {
                let n = values.len();
                let t = s[1].atan2(s[0]).rem_euclid(2.0 * PI) / (2.0 * PI) * n as f64;
                let i = (t.floor() as usize).min(n - 1);
                let frac = t - i as f64;
                values[i] * (1.0 - frac) + values[(i + 1) % n] * frac
            }
            Shape::PositivePart(a) => a.eval(s).max(0.0),
            Shape::Max(a, b) => a.eval(s).max(b.eval(s)),
            Shape::Scale(l, a) => l * a.eval(s),
            Shape::Sum(a, b) => a.eval(s) + b.eval(s),
            Shape::Custom { f, .. } => f(s),
        }
    }

    fn eval_angle(&self, theta: f64) -> f64 {
        self.eval(&[theta.cos(), theta.sin()])
    }

    fn smoothness(&self) -> Smoothness {
        match self {
            Shape::Constant(_) | Shape::Cosine { .. } => Smoothness::Smooth,
            Shape::CapCosine { .. }
            | Shape::KernelSlice { .. }
            | Shape::Support { .. }
            | Shape::Table { .. }
            | Shape::PositivePart(_)
            | Shape::Max(..) => Smoothness::Kinked,
            Shape::Scale(_, a) => a.smoothness(),
            Shape::Sum(a, b) => match (a.smoothness(), b.smoothness()) {
                (Smoothness::Smooth, Smoothness::Smooth) => Smoothness::Smooth,
                (Smoothness::General, _) | (_, Smoothness::General) => Smoothness::General,
                _ => Smoothness::Kinked,
            },
            Shape::Custom { kinks, .. } => {
                if kinks.is_empty() {
                    Smoothness::General
                } else {
                    Smoothness::Kinked
                }
            }
        }
    }

    /// Circle only: does the arc `[lo, hi]` (radians, `hi - lo < π`) meet the kink locus?
    fn kink_in_arc(&self, lo: f64, hi: f64) -> bool {
        let probe = |f: &dyn Fn(f64) -> f64| {
            let mid = 0.5 * (lo + hi);
            sign_changes(&[f(lo), f(mid), f(hi)])
        };
        match self {
            Shape::Constant(_) | Shape::Cosine { .. } => false,
            Shape::CapCosine { center, rho } => {
                let t0 = center.angle();
                let half = PI / (2.0 * rho);
                let mut kinks = vec![t0 + PI];
                if half < PI {
                    kinks.extend([t0 - half, t0 + half]);
                }
                kinks.iter().any(|&k| angle_in_arc(k, lo, hi))
            }
            Shape::KernelSlice { r, pole, .. } => {
                let t0 = pole.angle();
                let half = r.min(1.0).asin();
                [t0 - half, t0 + half].iter().any(|&k| angle_in_arc(k, lo, hi))
            }
            Shape::Support { points } => {
                let active = |t: f64| {
                    let s = [t.cos(), t.sin()];
                    let mut best = (0usize, f64::NEG_INFINITY);
                    let mut tie = false;
                    for (i, p) in points.iter().enumerate() {
                        let v = dot(&s, p);
                        if v > best.1 {
                            best = (i, v);
                            tie = false;
                        } else if v == best.1 {
                            tie = true;
                        }
                    }
                    (best.0, tie)
                };
                let (a, ta) = active(lo);
                let (b, tb) = active(hi);
                let (c, tc) = active(0.5 * (lo + hi));
                ta || tb || tc || a != b || a != c
            }
            Shape::Table { values } => {
                let n = values.len() as f64;
                let k = (lo / (2.0 * PI) * n).ceil();
                2.0 * PI * k / n <= hi
            }
            Shape::PositivePart(a) => a.kink_in_arc(lo, hi) || probe(&|t| a.eval_angle(t)),
            Shape::Max(a, b) => {
                a.kink_in_arc(lo, hi)
                    || b.kink_in_arc(lo, hi)
                    || probe(&|t| a.eval_angle(t) - b.eval_angle(t))
            }
            Shape::Scale(_, a) => a.kink_in_arc(lo, hi),
            Shape::Sum(a, b) => a.kink_in_arc(lo, hi) || b.kink_in_arc(lo, hi),
            Shape::Custom { kinks, .. } => kinks.iter().any(|&k| angle_in_arc(k, lo, hi)),
        }
    }

    fn known_sup(&self) -> Option<f64> {
        match self {
            Shape::Constant(c) => Some(*c),
            Shape::CapCosine { .. } => Some(1.0),
            Shape::KernelSlice { rho, r, pole } => {
                Some(crate::sphere::kernel_branch(*rho, pole.dim(), *r, 1.0))
            }
            Shape::Support { points } => points.iter().map(|p| norm(p)).reduce(f64::max),
            Shape::Cosine { .. } => Some(1.0),
            Shape::Table { values } => values.iter().copied().reduce(f64::max),
            Shape::PositivePart(a) => a.known_sup().map(|v| v.max(0.0)),
            Shape::Max(a, b) => Some(a.known_sup()?.max(b.known_sup()?)),
            Shape::Scale(l, a) => a.known_sup().map(|v| l * v),
            Shape::Sum(..) | Shape::Custom { .. } => None,
        }
    }
}

impl DirectionFunction {
    /// `h ≡ c`, which lies in every class ρ-sbs when `c ≥ 0` (and is the whole of 0-sbs).
    pub fn constant(m: usize, c: f64, rho: f64) -> Result<Self> {
        check_order(rho)?;
        if m < 2 {
            return domain("sphere dimension m must be at least 2");
        }
        Ok(Self { m, rho, shape: Shape::Constant(c), label: format!("constant({c})") })
    }

    /// `cos(freq (θ - phase))` on the circle, declared with order `rho`.
    pub fn cosine(freq: f64, phase: f64, rho: f64) -> Result<Self> {
        Self::circle_only(rho, Shape::Cosine { freq, phase }, format!("cos({freq}(θ-{phase}))"))
    }

    /// Samples `values[k] = h(2πk/N)`; linear interpolation in between.
    pub fn table(values: Vec<f64>, rho: f64) -> Result<Self> {
        if values.len() < 3 {
            return domain("table needs at least 3 samples");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("table values must be finite");
        }
        let n = values.len();
        Self::circle_only(rho, Shape::Table { values }, format!("table({n})"))
    }

    fn circle_only(rho: f64, shape: Shape, label: String) -> Result<Self> {
        check_order(rho)?;
        if rho == 0.0 {
            return domain("order 0 admits only constant functions");
        }
        Ok(Self { m: 2, rho, shape, label })
    }

    /// User evaluator; `kink_angles` (circle only) marks where derivatives may jump.
    pub fn custom(
        m: usize,
        rho: f64,
        label: impl Into<String>,
        kink_angles: Vec<f64>,
        f: DirectionFn,
    ) -> Result<Self> {
        check_order(rho)?;
        if rho == 0.0 {
            return domain("order 0 admits only constant functions");
        }
        Ok(Self { m, rho, shape: Shape::Custom { f, kinks: kink_angles }, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> f64 {
        self.rho
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same function with another declared order.
    pub fn with_order(&self, rho: f64) -> Result<Self> {
        check_order(rho)?;
        if rho == 0.0 && !matches!(self.shape, Shape::Constant(_)) {
            return domain("order 0 admits only constant functions");
        }
        Ok(Self { rho, ..self.clone() })
    }

    pub fn eval(&self, s: &[f64]) -> f64 {
        self.shape.eval(s)
    }

    pub fn eval_point(&self, s: &SpherePoint) -> f64 {
        self.shape.eval(s.coords())
    }

    /// `h(e^{iθ})` on the circle.
    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.shape.eval_angle(theta)
    }

    pub fn smoothness(&self) -> Smoothness {
        self.shape.smoothness()
    }

    /// Circle only: whether the closed arc `[lo, hi]` touches a kink.
    pub fn kink_in_arc(&self, lo: f64, hi: f64) -> bool {
        self.m == 2 && self.shape.kink_in_arc(lo, hi)
    }

    /// Exact supremum over the sphere when it is known in closed form.
    pub fn known_sup(&self) -> Option<f64> {
        self.shape.known_sup()
    }

    /// The value of `h` when it is a constant function.
    pub fn as_constant(&self) -> Option<f64> {
        match self.shape {
            Shape::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// Quadrature mean `(1/s_{m-1}) ∫ h dσ` over the grid.
    pub fn grid_mean(&self, grid: &SphereGrid) -> f64 {
        if let Some(c) = self.as_constant() {
            return c;
        }
        let total: f64 = grid.iter().map(|(s, w)| w * self.eval(s)).sum();
        total / grid.total_weight()
    }

    pub fn grid_max(&self, grid: &SphereGrid) -> f64 {
        grid.nodes().iter().map(|s| self.eval(s)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn grid_min(&self, grid: &SphereGrid) -> f64 {
        grid.nodes().iter().map(|s| self.eval(s)).fold(f64::INFINITY, f64::min)
    }

    /// `h⁺ = max{0, h}`.
    pub fn positive_part(&self) -> Self {
        Self {
            m: self.m,
            rho: self.rho,
            shape: Shape::PositivePart(Box::new(self.shape.clone())),
            label: format!("({})⁺", self.label),
        }
    }

    /// Pointwise maximum; the order is the larger of the two.
    pub fn max(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            m: self.m,
            rho: self.rho.max(other.rho),
            shape: Shape::Max(Box::new(self.shape.clone()), Box::new(other.shape.clone())),
            label: format!("max({}, {})", self.label, other.label),
        })
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            m: self.m,
            rho: self.rho.max(other.rho),
            shape: Shape::Sum(Box::new(self.shape.clone()), Box::new(other.shape.clone())),
            label: format!("{} + {}", self.label, other.label),
        })
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return domain(format!("scale factor {lambda} must be nonnegative"));
        }
        if let Some(c) = self.as_constant() {
            return Ok(Self { shape: Shape::Constant(lambda * c), label: format!("constant({})", lambda * c), ..self.clone() });
        }
        Ok(Self {
            m: self.m,
            rho: self.rho,
            shape: Shape::Scale(lambda, Box::new(self.shape.clone())),
            label: format!("{lambda}·{}", self.label),
        })
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return domain(format!("dimension mismatch: {} vs {}", self.m, other.m));
        }
        Ok(())
    }
}

/// Clipped cosine `cos(ρ ∠(s, s₀))` on the cap `∠ < π/(2ρ)`, zero outside.
pub fn example_cap_cosine(center: &SpherePoint, rho: f64) -> Result<DirectionFunction> {
    check_order(rho)?;
    if rho == 0.0 {
        return domain("cap cosine needs ρ > 0");
    }
    Ok(DirectionFunction {
        m: center.dim(),
        rho,
        shape: Shape::CapCosine { center: center.clone(), rho },
        label: format!("cap_cosine(ρ={rho})"),
    })
}

/// `x ↦ K_{ρ,r}(x, y)` with `y` fixed.
pub fn example_kernel_slice(rho: f64, r: f64, pole: &SpherePoint) -> Result<DirectionFunction> {
    check_order(rho)?;
    if rho == 0.0 {
        return domain("kernel slice needs ρ > 0");
    }
    if !(r > 0.0 && r <= 1.0) {
        return domain(format!("kernel radius r = {r} is outside (0, 1]"));
    }
    Ok(DirectionFunction {
        m: pole.dim(),
        rho,
        shape: Shape::KernelSlice { rho, r, pole: pole.clone() },
        label: format!("kernel_slice(ρ={rho}, r={r})"),
    })
}

/// Support function `s ↦ max_{p ∈ points} s·p` of a finite set; order 1.
pub fn example_support_function(points: &[Vec<f64>]) -> Result<DirectionFunction> {
    let first = points.first().ok_or_else(|| Error::Domain("empty point set".into()))?;
    let m = first.len();
    if m < 2 || points.iter().any(|p| p.len() != m) {
        return domain("support points must share a dimension m >= 2");
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return domain("support points must be finite");
    }
    Ok(DirectionFunction {
        m,
        rho: 1.0,
        shape: Shape::Support { points: points.to_vec() },
        label: format!("support({} points)", points.len()),
    })
}

/// `H(x) = h(x/|x|) |x|^ρ` with `H(0) = 0`, using the declared order.
pub fn eval_radial_extension(h: &DirectionFunction, x: &[f64]) -> f64 {
    radial_extension(h, h.rho, x)
}

/// `h(x/|x|) |x|^ρ` for an explicit ρ.
pub fn radial_extension(h: &DirectionFunction, rho: f64, x: &[f64]) -> f64 {
    let r = norm(x);
    if r == 0.0 {
        return 0.0;
    }
    let s: Vec<f64> = x.iter().map(|v| v / r).collect();
    h.eval(&s) * r.powf(rho)
}

/// Which characterization a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    TrigConvexity,
    MeanValueS3,
    OperatorS4,
    RadialExtensionS2,
}

/// Outcome of one characterization test. Every criterion has the form
/// "quantity ≥ 0", so `pass ⇔ worst_residual ≥ -tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct SubsphericityReport {
    pub criterion: Criterion,
    pub worst_residual: f64,
    pub worst_location: Vec<f64>,
    pub pass: bool,
    pub tolerance: f64,
    pub evaluated: usize,
    /// Samples left out of the failure decision (operator test: stencils over a kink).
    pub excluded: usize,
    /// Largest residual among excluded samples; distributional mass at kinks.
    pub max_kink_spike: Option<f64>,
    /// Mean-value test: number of nodes at which each tested radius succeeded.
    pub radii_successes: Vec<(f64, usize)>,
}

impl SubsphericityReport {
    fn new(criterion: Criterion, tolerance: f64) -> Self {
        Self {
            criterion,
            worst_residual: f64::INFINITY,
            worst_location: Vec::new(),
            pass: true,
            tolerance,
            evaluated: 0,
            excluded: 0,
            max_kink_spike: None,
            radii_successes: Vec::new(),
        }
    }

    fn record(&mut self, residual: f64, location: &[f64]) {
        self.evaluated += 1;
        if residual < self.worst_residual || self.worst_location.is_empty() {
            self.worst_residual = residual;
            self.worst_location = location.to_vec();
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst_residual >= -self.tolerance;
        self
    }
}

/// Tolerances of the characterization tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack in the sine-interpolation inequality, per unit of `max|h|`.
    pub trig: f64,
    /// Slack of the kernel mean-value test, per unit of `max|h|`.
    pub mean_value: f64,
    /// Slack of the sub-mean-value test of the homogeneous extension, per unit of `max|h|`.
    pub sub_mean: f64,
    /// Coefficient of `δ²` in the operator tolerance.
    pub operator_c1: f64,
    /// Multiple of machine epsilon in the operator tolerance floor.
    pub operator_c2: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { trig: 1e-9, mean_value: 1e-8, sub_mean: 1e-6, operator_c1: 10.0, operator_c2: 1e6 }
    }
}

impl Tolerances {
    /// `tol(δ) = c₁ δ² scale + c₂ ε_mach scale`.
    pub fn operator(&self, delta: f64, scale: f64) -> f64 {
        self.operator_c1 * delta * delta * scale + self.operator_c2 * f64::EPSILON * scale
    }
}

fn require_circle(h: &DirectionFunction) -> Result<()> {
    if h.m != 2 {
        return Err(Error::UnsupportedDimension(h.m));
    }
    Ok(())
}

fn require_positive_order(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("order ρ = {rho} must be positive"));
    }
    Ok(())
}

fn finite_or_err(value: f64, node: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation { node: node.to_vec(), value })
    }
}

/// One `(θ₁, θ, θ₂)` test of the sine-interpolation inequality.
pub type Triple = (f64, f64, f64);

/// Residual `RHS - LHS` of the ρ-trigonometric convexity inequality.
pub fn trig_convexity_residual(h: &DirectionFunction, rho: f64, triple: Triple) -> Result<f64> {
    let (t1, t, t2) = triple;
    let width = t2 - t1;
    if !(t1 < t && t < t2) {
        return domain(format!("triple ({t1}, {t}, {t2}) is not ordered"));
    }
    if !(width * rho < PI) {
        return domain(format!("window {width} exceeds π/ρ = {}", PI / rho));
    }
    let den = (rho * width).sin();
    let rhs = (rho * (t2 - t)).sin() / den * h.eval_angle(t1)
        + (rho * (t - t1)).sin() / den * h.eval_angle(t2);
    let lhs = h.eval_angle(t);
    Ok(rhs - lhs)
}

/// Dense set of admissible triples covering the circle.
pub fn default_triples(rho: f64, starts: usize) -> Vec<Triple> {
    let max_width = (PI / rho).min(2.0 * PI);
    let mut out = Vec::new();
    for k in 0..starts {
        let t1 = -PI + 2.0 * PI * k as f64 / starts as f64;
        for frac in [0.05, 0.2, 0.45, 0.7, 0.95] {
            let w = frac * max_width;
            for pos in [0.2, 0.5, 0.8] {
                out.push((t1, t1 + pos * w, t1 + w));
            }
        }
    }
    out
}

/// Sine-interpolation test on the circle.
pub fn check_trig_convexity(
    h: &DirectionFunction,
    rho: f64,
    triples: &[Triple],
    tol: &Tolerances,
) -> Result<SubsphericityReport> {
    require_circle(h)?;
    require_positive_order(rho)?;
    let mut scale: f64 = 0.0;
    let mut residuals = Vec::with_capacity(triples.len());
    for &tr in triples {
        residuals.push(trig_convexity_residual(h, rho, tr)?);
        for t in [tr.0, tr.1, tr.2] {
            scale = scale.max(finite_or_err(h.eval_angle(t), &[t])?.abs());
        }
    }
    let mut report = SubsphericityReport::new(Criterion::TrigConvexity, tol.trig * scale.max(1.0));
    for (&(a, b, c), res) in triples.iter().zip(residuals) {
        report.record(res, &[a, b, c]);
    }
    Ok(report.finish())
}

/// Kernel mean-value test at every grid node. A node passes if any tested
/// radius gives `(1/(b_m r^m)) ∫ h K_{ρ,r}(x, ·) dσ - h(x) ≥ -tol`; the
/// integral itself is evaluated by [`kernel_average`].
pub fn check_mean_inequality(
    h: &DirectionFunction,
    rho: f64,
    grid: &SphereGrid,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<SubsphericityReport> {
    require_positive_order(rho)?;
    if radii.is_empty() {
        return domain("mean-value test needs at least one radius");
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return domain(format!("radius {r} is outside (0, 1]"));
    }
    if grid.dim() != h.m {
        return domain("grid dimension does not match h");
    }
    let values = grid
        .nodes()
        .iter()
        .map(|s| finite_or_err(h.eval(s), s))
        .collect::<Result<Vec<_>>>()?;
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let mut report = SubsphericityReport::new(Criterion::MeanValueS3, tol.mean_value * scale);
    let mut successes = vec![0usize; radii.len()];
    for (x, hx) in grid.nodes().iter().zip(&values) {
        let mut best = f64::NEG_INFINITY;
        for (k, &r) in radii.iter().enumerate() {
            let residual = kernel_average(|y| h.eval(y), rho, r, x)? - hx;
            if residual >= -report.tolerance {
                successes[k] += 1;
            }
            best = best.max(residual);
        }
        report.record(best, x);
    }
    report.radii_successes = radii.iter().copied().zip(successes).collect();
    Ok(report.finish())
}

/// One sample of the discrete `L_ρ h` on the circle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OperatorSample {
    pub theta: f64,
    pub residual: f64,
    pub straddles_kink: bool,
}

/// `(h(θ+δ) - 2h(θ) + h(θ-δ))/δ² + ρ² h(θ)` at `N = round(2π/δ)` equispaced nodes.
pub fn operator_residuals(h: &DirectionFunction, rho: f64, delta: f64) -> Result<Vec<OperatorSample>> {
    require_circle(h)?;
    if !(delta > 0.0) || delta >= 0.5 {
        return domain(format!("difference step δ = {delta} must lie in (0, 0.5)"));
    }
    check_order(rho)?;
    let n = (2.0 * PI / delta).round().max(8.0) as usize;
    let lift = rho * rho; // ρ(ρ + m - 2) with m = 2
    (0..n)
        .map(|k| {
            let theta = -PI + 2.0 * PI * k as f64 / n as f64;
            let c = finite_or_err(h.eval_angle(theta), &[theta])?;
            let l = finite_or_err(h.eval_angle(theta - delta), &[theta - delta])?;
            let r = finite_or_err(h.eval_angle(theta + delta), &[theta + delta])?;
            Ok(OperatorSample {
                theta,
                residual: (r - 2.0 * c + l) / (delta * delta) + lift * c,
                straddles_kink: h.kink_in_arc(theta - delta, theta + delta),
            })
        })
        .collect()
}

/// Positivity of `L_ρ = Δ_S + ρ²` on the circle by second differences.
/// Stencils crossing a kink are reported but never fail the test.
pub fn check_operator_positivity(
    h: &DirectionFunction,
    rho: f64,
    delta: f64,
    tol: &Tolerances,
) -> Result<SubsphericityReport> {
    let samples = operator_residuals(h, rho, delta)?;
    let scale = samples
        .iter()
        .map(|s| h.eval_angle(s.theta).abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut report = SubsphericityReport::new(Criterion::OperatorS4, tol.operator(delta, scale));
    for s in &samples {
        if s.straddles_kink {
            report.excluded += 1;
            report.max_kink_spike =
                Some(report.max_kink_spike.map_or(s.residual, |v: f64| v.max(s.residual)));
        } else {
            report.record(s.residual, &[s.theta]);
        }
    }
    Ok(report.finish())
}

/// A sub-mean-value probe: center `x` and sphere radius `ε`.
pub type Probe = (Vec<f64>, f64);

/// Deterministic probes with `0.3 ≤ |x| ≤ 1.5` and `ε = 0.05 |x|`.
pub fn default_probes(m: usize, count: usize, seed: u64) -> Vec<Probe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let dir = random_direction(&mut rng, m);
            let r: f64 = rng.gen_range(0.3..1.5);
            (dir.iter().map(|v| v * r).collect(), 0.05 * r)
        })
        .collect()
}

pub(crate) fn random_direction<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Sub-mean-value test of `H(x) = h(x/|x|)|x|^ρ` at probes in the annulus `0.2 ≤ |x| ≤ 2`.
pub fn check_radial_subharmonicity(
    h: &DirectionFunction,
    rho: f64,
    grid: &SphereGrid,
    probes: &[Probe],
    tol: &Tolerances,
) -> Result<SubsphericityReport> {
    require_positive_order(rho)?;
    if grid.dim() != h.m {
        return domain("grid dimension does not match h");
    }
    let mut scale: f64 = 1.0;
    let mut residuals = Vec::with_capacity(probes.len());
    for (x, eps) in probes {
        let r = norm(x);
        if x.len() != h.m || !(0.2..=2.0).contains(&r) {
            return domain(format!("probe |x| = {r} is outside the annulus [0.2, 2]"));
        }
        if !(*eps > 0.0 && *eps <= 0.1 * r) {
            return domain(format!("probe radius ε = {eps} must lie in (0, 0.1|x|]"));
        }
        let big_h = |y: &[f64]| radial_extension(h, rho, y);
        let center = finite_or_err(big_h(x), x)?;
        let mean = sphere_mean(big_h, x, *eps, grid)?;
        scale = scale.max(center.abs() / r.powf(rho));
        residuals.push(mean - center);
    }
    let mut report = SubsphericityReport::new(Criterion::RadialExtensionS2, tol.sub_mean * scale);
    for ((x, _), res) in probes.iter().zip(residuals) {
        report.record(res, x);
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_grid;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn radial_extension_values() {
        let one = DirectionFunction::constant(2, 1.0, 2.0).unwrap();
        assert!((eval_radial_extension(&one, &[0.3, 0.4]) - 0.25).abs() < 1e-15);
        assert_eq!(eval_radial_extension(&one, &[0.0, 0.0]), 0.0);
        let c = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        assert!((eval_radial_extension(&c, &[0.3, 0.0]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn trig_convexity_examples() {
        let c = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        let res = trig_convexity_residual(&c, 1.0, (-PI / 4.0, 0.0, PI / 4.0)).unwrap();
        assert!(res.abs() < 1e-15);
        let one = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        let res = trig_convexity_residual(&one, 1.0, (0.0, PI / 4.0, PI / 2.0)).unwrap();
        assert!((res - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let c2 = DirectionFunction::cosine(2.0, 0.0, 1.0).unwrap();
        let res = trig_convexity_residual(&c2, 1.0, (-PI / 3.0, 0.0, PI / 3.0)).unwrap();
        assert!((res + 2.0).abs() < 1e-12, "{res}");
        // window must be shorter than π/ρ
        assert!(trig_convexity_residual(&one, 1.0, (0.0, 1.0, 3.2)).is_err());
        assert!(trig_convexity_residual(&one, 1.0, (0.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn operator_examples() {
        let one = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        let s = operator_residuals(&one, 1.0, 1e-3).unwrap();
        assert!(s.iter().all(|s| (s.residual - 1.0).abs() < 1e-9));

        let cap = example_cap_cosine(&SpherePoint::pole(2), 2.0).unwrap();
        let rep = check_operator_positivity(&cap, 2.0, 1e-3, &tol()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.worst_residual.abs() < 10.0 * 1e-6);
        assert!(rep.excluded > 0 && rep.max_kink_spike.unwrap() > 1.0);

        let c2 = DirectionFunction::cosine(2.0, 0.0, 1.0).unwrap();
        let s = operator_residuals(&c2, 1.0, 1e-3).unwrap();
        for x in s.iter().step_by(97) {
            let expect = -3.0 * (2.0 * x.theta).cos();
            assert!((x.residual - expect).abs() < 1e-4);
        }
        assert!(!check_operator_positivity(&c2, 1.0, 1e-3, &tol()).unwrap().pass);
        assert!(operator_residuals(&c2, 1.0, 0.0).is_err());
        let sphere = DirectionFunction::constant(3, 1.0, 1.0).unwrap();
        assert!(matches!(
            operator_residuals(&sphere, 1.0, 1e-3),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn cap_cosine_values() {
        let s0 = SpherePoint::pole(3);
        let h = example_cap_cosine(&s0, 1.0).unwrap();
        assert_eq!(h.eval_point(&s0), 1.0);
        let at = |phi: f64| vec![phi.cos(), phi.sin(), 0.0];
        assert!((h.eval(&at(PI / 3.0)) - 0.5).abs() < 1e-15);
        assert_eq!(h.eval(&at(PI / 2.0)), 0.0);
        let h2 = example_cap_cosine(&s0, 2.0).unwrap();
        assert!(h2.eval(&at(PI / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn kernel_slice_values() {
        let y = SpherePoint::pole(2);
        let k = example_kernel_slice(1.0, 1.0, &y).unwrap();
        assert!((k.eval(y.coords()) - 8.0 / 3.0).abs() < 1e-15);
        assert!((k.known_sup().unwrap() - 8.0 / 3.0).abs() < 1e-15);
        let k = example_kernel_slice(1.0, 0.5, &y).unwrap();
        assert_eq!(k.eval(&[0.0, 1.0]), 0.0);
        let g = build_grid(2, 256).unwrap();
        assert!(k.grid_min(&g) >= 0.0);
    }

    #[test]
    fn support_function_values() {
        let h = example_support_function(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(h.eval(&[0.6, 0.8]), 0.0);
        let h = example_support_function(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        for t in [0.0, 1.0, 2.0, 3.0, -1.5] {
            assert!((h.eval_angle(t) - t.cos().max(0.0)).abs() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cloud: Vec<Vec<f64>> = (0..4000)
            .map(|_| {
                let d = random_direction(&mut rng, 2);
                let r: f64 = rng.gen_range(0.0f64..1.0).sqrt();
                d.iter().map(|v| v * r).collect()
            })
            .collect();
        cloud.push(vec![0.0, 0.0]);
        let h = example_support_function(&cloud).unwrap();
        for t in [0.1, 1.3, 2.9] {
            assert!(h.eval_angle(t) > 0.99);
        }
        assert!(example_support_function(&[]).is_err());
    }

    #[test]
    fn combinators() {
        let c = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        assert_eq!(c.positive_part().eval_angle(2.0 * PI / 3.0), 0.0);
        let mx = c.max(&c).unwrap();
        let sc = c.scale(2.0).unwrap();
        for t in [0.0, 0.7, 2.5] {
            assert_eq!(mx.eval_angle(t), c.eval_angle(t));
            assert_eq!(sc.eval_angle(t), 2.0 * c.eval_angle(t));
        }
        assert!(c.scale(-1.0).is_err());
        let other = DirectionFunction::constant(3, 1.0, 1.0).unwrap();
        assert!(c.max(&other).is_err());
        let c3 = DirectionFunction::cosine(3.0, 0.0, 3.0).unwrap();
        assert_eq!(c.max(&c3).unwrap().order(), 3.0);
    }

    #[test]
    fn zero_order_is_constant_only() {
        assert!(DirectionFunction::cosine(1.0, 0.0, 0.0).is_err());
        assert!(DirectionFunction::constant(2, 3.0, 0.0).is_ok());
        let c = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        assert!(c.with_order(0.0).is_err());
    }

    #[test]
    fn mean_value_examples() {
        let g = build_grid(2, 512).unwrap();
        let one = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        let rep = check_mean_inequality(&one, 1.0, &g, &[0.5], &tol()).unwrap();
        assert!(rep.pass && rep.worst_residual > 0.0, "{rep:?}");

        let cap = example_cap_cosine(&SpherePoint::pole(2), 1.0).unwrap();
        assert!(check_mean_inequality(&cap, 1.0, &g, &[0.25, 0.5], &tol()).unwrap().pass);

        let c2 = DirectionFunction::cosine(2.0, 0.0, 1.0).unwrap();
        let rep = check_mean_inequality(&c2, 1.0, &g, &[0.05, 0.1, 0.2], &tol()).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_location[0] > 0.99 || rep.worst_location[0] < -0.99);
        assert!(check_mean_inequality(&one, 1.0, &g, &[], &tol()).is_err());
    }

    #[test]
    fn radial_subharmonicity_examples() {
        let g = build_grid(2, 256).unwrap();
        let probes = default_probes(2, 40, 7);
        let one = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        let rep = check_radial_subharmonicity(&one, 1.0, &g, &probes, &tol()).unwrap();
        assert!(rep.pass && rep.worst_residual > 0.0);
        let pos = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap().positive_part();
        assert!(check_radial_subharmonicity(&pos, 1.0, &g, &probes, &tol()).unwrap().pass);
        let c2 = DirectionFunction::cosine(2.0, 0.0, 1.0).unwrap();
        let near_axis = vec![(vec![1.0, 0.01], 0.05)];
        let rep = check_radial_subharmonicity(&c2, 1.0, &g, &near_axis, &tol()).unwrap();
        assert!(!rep.pass);
        assert!(check_radial_subharmonicity(&one, 1.0, &g, &[(vec![0.1, 0.0], 0.005)], &tol()).is_err());
        assert!(check_radial_subharmonicity(&one, 1.0, &g, &[(vec![1.0, 0.0], 0.5)], &tol()).is_err());
    }
}

//! Convex gauges `g: R⁺ → R⁺` with `g(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Config form: `{"power": {"c": .., "p": ..}}` or `{"table": [[x, y], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GaugeSpec {
    Power { c: f64, p: f64 },
    Table(Vec<[f64; 2]>),
}

/// A convex, nondecreasing function on `[0, ∞)` vanishing at the origin.
///
/// Tables are piecewise linear through their knots and continue past the last
/// knot with the last slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaugeSpec", into = "GaugeSpec")]
pub enum ConvexGauge {
    Power { c: f64, p: f64 },
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl TryFrom<GaugeSpec> for ConvexGauge {
    type Error = Error;
    fn try_from(spec: GaugeSpec) -> Result<Self> {
        match spec {
            GaugeSpec::Power { c, p } => Self::power(c, p),
            GaugeSpec::Table(points) => Self::table(&points),
        }
    }
}

impl From<ConvexGauge> for GaugeSpec {
    fn from(g: ConvexGauge) -> Self {
        match g {
            ConvexGauge::Power { c, p } => GaugeSpec::Power { c, p },
            ConvexGauge::Table { xs, ys } => {
                GaugeSpec::Table(xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect())
            }
        }
    }
}

impl ConvexGauge {
    /// `g(x) = c x^p`.
    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidGauge(format!("coefficient c = {c} must be >= 0")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidGauge(format!("exponent p = {p} must be >= 1")));
        }
        Ok(ConvexGauge::Power { c, p })
    }

    pub fn identity() -> Self {
        ConvexGauge::Power { c: 1.0, p: 1.0 }
    }

    /// Piecewise-linear gauge through `points`, which must start at `(0, 0)`.
    pub fn table(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGauge("table needs at least two points".into()));
        }
        if points[0] != [0.0, 0.0] {
            return Err(Error::InvalidGauge(format!(
                "table must start at the origin, found {:?}",
                points[0]
            )));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGauge("table entries must be finite".into()));
        }
        if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::InvalidGauge("table abscissae must increase strictly".into()));
        }
        Ok(ConvexGauge::Table {
            xs: points.iter().map(|p| p[0]).collect(),
            ys: points.iter().map(|p| p[1]).collect(),
        })
    }

    fn segment(xs: &[f64], x: f64) -> usize {
        // index i of the segment [xs[i], xs[i+1]) holding x, clamped to the last one
        match xs.partition_point(|&t| t <= x) {
            0 => 0,
            k => (k - 1).min(xs.len() - 2),
        }
    }

    fn slope(xs: &[f64], ys: &[f64], i: usize) -> f64 {
        (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ConvexGauge::Power { c, p } => c * x.max(0.0).powf(*p),
            ConvexGauge::Table { xs, ys } => {
                let i = Self::segment(xs, x);
                ys[i] + Self::slope(xs, ys, i) * (x - xs[i])
            }
        }
    }

    /// Right derivative `g'(x+)`.
    pub fn right_derivative(&self, x: f64) -> f64 {
        match self {
            ConvexGauge::Power { c, p } => {
                if *p == 1.0 {
                    *c
                } else {
                    c * p * x.max(0.0).powf(p - 1.0)
                }
            }
            ConvexGauge::Table { xs, ys } => Self::slope(xs, ys, Self::segment(xs, x)),
        }
    }

    /// `λ g`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            ConvexGauge::Power { c, p } => ConvexGauge::Power { c: c * lambda, p: *p },
            ConvexGauge::Table { xs, ys } => ConvexGauge::Table {
                xs: xs.clone(),
                ys: ys.iter().map(|y| y * lambda).collect(),
            },
        }
    }
}

/// Worst residuals of the gauge axioms on a sample grid; every residual
/// must be `≥ -tolerance` (the origin value must vanish exactly).
#[derive(Debug, Clone, Serialize)]
pub struct GaugeReport {
    pub origin_value: f64,
    /// Smallest increase of consecutive divided differences (convexity).
    pub convexity: f64,
    /// Smallest forward difference (monotonicity).
    pub monotonicity: f64,
    /// Smallest `g'(x) - g(x)/x`.
    pub secant: f64,
    pub secant_at: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Uniform sample `(0, x_max]` with `n` points.
pub fn uniform_grid(x_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| x_max * k as f64 / n as f64).collect()
}

/// Checks `g(0) = 0`, convexity, monotonicity and `g'(x) ≥ g(x)/x` on `xs ⊂ (0, ∞)`.
pub fn gauge_check(g: &ConvexGauge, xs: &[f64]) -> Result<GaugeReport> {
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain("gauge sample points must be positive and finite".into()));
    }
    let mut pts: Vec<f64> = std::iter::once(0.0).chain(xs.iter().copied()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let vals: Vec<f64> = pts.iter().map(|&x| g.eval(x)).collect();
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let tolerance = 1e-12 * scale;

    let slopes: Vec<f64> = pts
        .windows(2)
        .zip(vals.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let convexity = slopes.windows(2).map(|s| s[1] - s[0]).fold(f64::INFINITY, f64::min);
    let monotonicity = vals.windows(2).map(|v| v[1] - v[0]).fold(f64::INFINITY, f64::min);
    let (secant, secant_at) = pts[1..]
        .iter()
        .map(|&x| (g.right_derivative(x) - g.eval(x) / x, x))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    let origin_value = g.eval(0.0);
    let pass = origin_value == 0.0
        && convexity >= -tolerance
        && monotonicity >= -tolerance
        && secant >= -tolerance;
    Ok(GaugeReport { origin_value, convexity, monotonicity, secant, secant_at, tolerance, pass })
}

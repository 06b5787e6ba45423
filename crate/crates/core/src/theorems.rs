//! Executable forms of the integral growth inequalities for charges and zero
//! divisors, and of the uniqueness, Blaschke and Djrbashian conditions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gauge::ConvexGauge;
use crate::measures::{BallMeasure, GrowthEnvelope, RadialProfile, ZeroDivisor};
use crate::sphere::SphereGrid;
use crate::subspherical::DirectionFunction;

/// `g` and `h` rescaled so that `g(2^{m-1} - 1) ≤ 1` and `h ≤ 1`.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub g: ConvexGauge,
    pub h: DirectionFunction,
    pub g_factor: f64,
    pub h_factor: f64,
}

/// Divides `g` by `max(1, g(2^{m-1} - 1))` and `h` by `max(1, grid max h)`.
pub fn normalize_constraints(
    g: &ConvexGauge,
    h: &DirectionFunction,
    m: usize,
    grid: &SphereGrid,
) -> Result<Normalized> {
    if grid.dim() != h.dim() || h.dim() != m {
        return domain("h, grid and ball dimension disagree");
    }
    let h_min = h.grid_min(grid);
    if h_min < 0.0 {
        return domain(format!("h takes the negative value {h_min} on the grid"));
    }
    let g_factor = g.eval(2f64.powi(m as i32 - 1) - 1.0).max(1.0);
    let h_factor = h.grid_max(grid).max(1.0);
    Ok(Normalized {
        g: g.scaled(1.0 / g_factor),
        h: h.scale(1.0 / h_factor)?,
        g_factor,
        h_factor,
    })
}

/// `r_j = 1 - 2^{-j}` for `j = 2..=16`.
pub fn default_schedule() -> Vec<f64> {
    (2..=16).map(|j| 1.0 - 0.5f64.powi(j)).collect()
}

/// The right-hand measure of the growth inequality.
#[derive(Debug, Clone)]
pub enum Majorant {
    Measure(BallMeasure),
    Envelope(GrowthEnvelope),
}

impl Majorant {
    fn profile(&self, m: usize, h: &DirectionFunction, grid: &SphereGrid) -> Result<RadialProfile> {
        match self {
            Majorant::Measure(mu) => {
                if mu.dim() != m {
                    return domain("majorant measure lives in another dimension");
                }
                mu.radial_profile(h)
            }
            Majorant::Envelope(env) => env.radial_profile(m, h, grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalityOptions {
    /// Upper truncation radius `< 1`.
    pub r_max: f64,
    /// Constant to test against; when absent the implied constant must be
    /// stable along the truncation schedule.
    pub declared_c: Option<f64>,
    pub tol: f64,
    /// Relative change of the implied constant over the last schedule step
    /// accepted as stable.
    pub stability: f64,
}

impl Default for InequalityOptions {
    fn default() -> Self {
        Self { r_max: 1.0 - 0.5f64.powi(16), declared_c: None, tol: 1e-10, stability: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationPoint {
    pub r_max: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub implied_c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `max(0, lhs - rhs)`.
    pub implied_c: f64,
    pub declared_c: Option<f64>,
    pub g_factor: f64,
    pub h_factor: f64,
    pub r_max: f64,
    pub stability: Vec<TruncationPoint>,
    pub stable: bool,
    pub tolerance: f64,
    pub pass: bool,
}

fn inequality(
    check: &str,
    left: impl Fn(&DirectionFunction) -> Result<RadialProfile>,
    right: &Majorant,
    g: &ConvexGauge,
    h: &DirectionFunction,
    m: usize,
    grid: &SphereGrid,
    opts: &InequalityOptions,
) -> Result<InequalityReport> {
    if !(opts.r_max > 0.5 && opts.r_max < 1.0) {
        return domain(format!("truncation radius {} must lie in (1/2, 1)", opts.r_max));
    }
    let norm = normalize_constraints(g, h, m, grid)?;
    let lp = left(&norm.h)?;
    let rp = right.profile(m, &norm.h, grid)?;
    let f = |t: f64| norm.g.eval(t.powi(1 - m as i32) - 1.0);

    let mut radii: Vec<f64> = default_schedule().into_iter().filter(|&r| r < opts.r_max).collect();
    radii.push(opts.r_max);
    let stability: Vec<TruncationPoint> = radii
        .iter()
        .map(|&r| {
            let lhs = lp.stieltjes(f, 0.5, r);
            let rhs = rp.stieltjes(f, 0.5, r);
            TruncationPoint { r_max: r, lhs, rhs, implied_c: (lhs - rhs).max(0.0) }
        })
        .collect();
    let last = stability.last().expect("schedule is nonempty");
    let stable = match stability.len() {
        1 => true,
        k => {
            let prev = stability[k - 2].implied_c;
            (last.implied_c - prev).abs() <= opts.tol.max(opts.stability * last.implied_c.abs())
        }
    };
    let pass = match opts.declared_c {
        Some(c) => last.lhs <= last.rhs + c + opts.tol,
        None => stable,
    };
    Ok(InequalityReport {
        check: check.into(),
        lhs: last.lhs,
        rhs: last.rhs,
        implied_c: last.implied_c,
        declared_c: opts.declared_c,
        g_factor: norm.g_factor,
        h_factor: norm.h_factor,
        r_max: opts.r_max,
        tolerance: opts.tol,
        stable,
        pass,
        stability,
    })
}

/// `∫_{1/2}^{r_max} g(r^{1-m} - 1) dμ_u^rad(r; h)` against the same integral of the majorant.
pub fn check_main_inequality(
    mu_u: &BallMeasure,
    majorant: &Majorant,
    g: &ConvexGauge,
    h: &DirectionFunction,
    grid: &SphereGrid,
    opts: &InequalityOptions,
) -> Result<InequalityReport> {
    if !mu_u.is_nonnegative() {
        return domain("the Riesz measure of a subharmonic function has no negative mass");
    }
    inequality("main_inequality", |h| mu_u.radial_profile(h), majorant, g, h, mu_u.dim(), grid, opts)
}

/// The divisor form with `m = 2n` and `Z^rad(r; h)` on the left.
pub fn check_divisor_inequality(
    z: &ZeroDivisor,
    majorant: &Majorant,
    g: &ConvexGauge,
    h: &DirectionFunction,
    grid: &SphereGrid,
    opts: &InequalityOptions,
) -> Result<InequalityReport> {
    inequality("divisor_inequality", |h| z.radial_profile(h), majorant, g, h, z.real_dim(), grid, opts)
}

/// `[g(1 - r), g(r^{1-2n} - 1), g(2^{2n-1}(2n-1)(1 - r))]`, nondecreasing for `r ∈ [1/2, 1)`.
pub fn bound_chain(g: &ConvexGauge, n: usize, r: f64) -> [f64; 3] {
    let k = 2 * n as i32 - 1;
    [
        g.eval(1.0 - r),
        g.eval(r.powi(-k) - 1.0),
        g.eval(2f64.powi(k) * k as f64 * (1.0 - r)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStatus {
    Finite,
    Divergent,
    Inconclusive,
}

/// Heuristic convergence analysis of partial integrals along a truncation schedule.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesAnalysis {
    pub schedule: Vec<f64>,
    pub partial: Vec<f64>,
    /// Geometric mean of the ratios of the last increments.
    pub tail_ratio: Option<f64>,
    /// Slope of `log S_j` against `log 1/(1 - r_j)` over the second half of the schedule.
    pub loglog_slope: f64,
    pub cauchy: bool,
    /// Last partial value plus the geometric tail, when Cauchy.
    pub limit_estimate: Option<f64>,
    pub status: SeriesStatus,
}

const TAIL_RATIO: f64 = 0.9;
const SLOPE_THRESHOLD: f64 = 0.05;

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 5 {
        return domain(format!("truncation schedule needs at least 5 radii, found {}", schedule.len()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.5 || schedule[schedule.len() - 1] >= 1.0 {
        return domain("truncation schedule must increase strictly inside (1/2, 1)");
    }
    Ok(())
}

/// Cauchy test: negligible last increment or fitted tail ratio ≤ 0.9;
/// divergence: not Cauchy and log-log slope above 0.05.
pub fn analyze_series(schedule: &[f64], partial: &[f64]) -> SeriesAnalysis {
    let n = partial.len();
    let incr: Vec<f64> = partial.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = partial.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let negligible = incr.last().map_or(true, |d| d.abs() <= 1e-12 * scale);

    let tail: Vec<f64> = incr.iter().rev().take(5).rev().copied().collect();
    let logs: Vec<f64> = tail
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0)
        .map(|w| (w[1] / w[0]).abs().ln())
        .collect();
    let tail_ratio = if logs.is_empty() { None } else { Some((logs.iter().sum::<f64>() / logs.len() as f64).exp()) };
    let cauchy = negligible || tail_ratio.is_some_and(|q| q <= TAIL_RATIO);

    let pts: Vec<(f64, f64)> = schedule[n / 2..]
        .iter()
        .zip(&partial[n / 2..])
        .filter(|(_, s)| **s > 0.0)
        .map(|(r, s)| ((1.0 / (1.0 - r)).ln(), s.ln()))
        .collect();
    let loglog_slope = if pts.len() < 2 {
        0.0
    } else {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };

    let last = partial[n - 1];
    let limit_estimate = if !cauchy {
        None
    } else if negligible {
        Some(last)
    } else {
        let q = tail_ratio.unwrap_or(0.0);
        Some(last + incr[incr.len() - 1] * q / (1.0 - q))
    };
    let status = if cauchy {
        SeriesStatus::Finite
    } else if loglog_slope > SLOPE_THRESHOLD {
        SeriesStatus::Divergent
    } else {
        SeriesStatus::Inconclusive
    };
    SeriesAnalysis {
        schedule: schedule.to_vec(),
        partial: partial.to_vec(),
        tail_ratio,
        loglog_slope,
        cauchy,
        limit_estimate,
        status,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ForcesZero,
    Compatible,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceVerdict {
    /// `∫ g(2^{2n-1}(2n-1)(1 - r)) dμ_M^rad(r; h)`.
    pub growth_integral: SeriesAnalysis,
    /// `∫ g(1 - r) dZ^rad(r; h)`.
    pub zero_integral: SeriesAnalysis,
    pub verdict: Verdict,
}

/// Classifies `(Z, M)`: if the growth integral converges while the zero
/// integral diverges, no nonzero `f` with `log|f| ≤ M` vanishes on `Z`.
pub fn uniqueness_classifier(
    z: &ZeroDivisor,
    envelope: &GrowthEnvelope,
    g: &ConvexGauge,
    h: &DirectionFunction,
    grid: &SphereGrid,
    schedule: &[f64],
) -> Result<ConvergenceVerdict> {
    check_schedule(schedule)?;
    let n = z.n();
    let m = z.real_dim();
    let zp = z.radial_profile(h)?;
    let mp = envelope.radial_profile(m, h, grid)?;
    let k = 2 * n as i32 - 1;
    let c = 2f64.powi(k) * k as f64;
    let growth: Vec<f64> = schedule.iter().map(|&r| mp.stieltjes(|t| g.eval(c * (1.0 - t)), 0.5, r)).collect();
    let zeros: Vec<f64> = schedule.iter().map(|&r| zp.stieltjes(|t| g.eval(1.0 - t), 0.5, r)).collect();
    let growth_integral = analyze_series(schedule, &growth);
    let zero_integral = analyze_series(schedule, &zeros);
    let verdict = if zero_integral.status == SeriesStatus::Finite {
        Verdict::Compatible
    } else if growth_integral.status == SeriesStatus::Finite && zero_integral.status == SeriesStatus::Divergent {
        Verdict::ForcesZero
    } else {
        Verdict::Inconclusive
    };
    Ok(ConvergenceVerdict { growth_integral, zero_integral, verdict })
}

fn weighted_condition(z: &ZeroDivisor, schedule: &[f64], weight: impl Fn(f64) -> f64) -> Result<SeriesAnalysis> {
    check_schedule(schedule)?;
    let one = DirectionFunction::constant(z.real_dim(), 1.0, 1.0)?;
    let profile = z.radial_profile(&one)?;
    // the sphere |z| = 1/2 belongs to the region outside the open half ball
    let lo = 0.5f64.next_down();
    let partial: Vec<f64> = schedule.iter().map(|&r| profile.stieltjes(&weight, lo, r)).collect();
    Ok(analyze_series(schedule, &partial))
}

/// `∫_{Z ∩ (B \ ½B)} (1 - |z|) dσ_{2n-2}`.
pub fn blaschke_condition(z: &ZeroDivisor, schedule: &[f64]) -> Result<SeriesAnalysis> {
    weighted_condition(z, schedule, |t| 1.0 - t)
}

/// `∫_{Z ∩ (B \ ½B)} (1 - |z|)^{p+1+ε} dσ_{2n-2}`.
pub fn djrbashian_condition(z: &ZeroDivisor, p: f64, eps: f64, schedule: &[f64]) -> Result<SeriesAnalysis> {
    if !(p > 0.0) || !(eps > 0.0) {
        return domain(format!("need p > 0 and ε > 0, got p = {p}, ε = {eps}"));
    }
    weighted_condition(z, schedule, move |t| (1.0 - t).powf(p + 1.0 + eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{poincare_lelong_measure, Component};
    use crate::sphere::{build_grid, SpherePoint};
    use crate::subspherical::example_cap_cosine;
    use std::f64::consts::PI;

    fn one(m: usize) -> DirectionFunction {
        DirectionFunction::constant(m, 1.0, 1.0).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let grid = build_grid(2, 128).unwrap();
        let n = normalize_constraints(&ConvexGauge::identity(), &one(2), 2, &grid).unwrap();
        assert_eq!((n.g_factor, n.h_factor), (1.0, 1.0));
        let n = normalize_constraints(&ConvexGauge::power(4.0, 1.0).unwrap(), &one(2), 2, &grid).unwrap();
        assert_eq!(n.g_factor, 4.0);
        assert_eq!(n.g.eval(1.0), 1.0);
        let cap = example_cap_cosine(&SpherePoint::from_angle(0.0), 1.0).unwrap().scale(3.0).unwrap();
        let n = normalize_constraints(&ConvexGauge::identity(), &cap, 2, &grid).unwrap();
        assert_eq!(n.h_factor, 3.0);
        let neg = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        assert!(normalize_constraints(&ConvexGauge::identity(), &neg, 2, &grid).is_err());
    }

    #[test]
    fn equality_for_log_modulus() {
        let grid = build_grid(2, 64).unwrap();
        let z = ZeroDivisor::real_zeros("z", &[0.75]).unwrap();
        let maj = Majorant::Measure(poincare_lelong_measure(&z));
        let opts = InequalityOptions::default();
        let rep = check_main_inequality(&poincare_lelong_measure(&z), &maj, &ConvexGauge::identity(), &one(2), &grid, &opts)
            .unwrap();
        assert_eq!(rep.implied_c, 0.0);
        assert_eq!(rep.lhs, rep.rhs);
        let rep = check_divisor_inequality(&z, &maj, &ConvexGauge::identity(), &one(2), &grid, &opts).unwrap();
        assert_eq!(rep.lhs, rep.rhs);
        assert!(rep.pass);

        let half = ZeroDivisor::planar("half", &[(num_complex::Complex64::new(0.75, 0.0), 0.5)]).unwrap();
        let sub = check_divisor_inequality(&half, &maj, &ConvexGauge::identity(), &one(2), &grid, &opts).unwrap();
        assert_eq!(sub.lhs, 0.5 * rep.lhs);
        assert_eq!(sub.implied_c, 0.0);

        let empty = BallMeasure::zero(2);
        let rep = check_main_inequality(&empty, &maj, &ConvexGauge::identity(), &one(2), &grid, &opts).unwrap();
        assert_eq!(rep.implied_c, 0.0);
    }

    #[test]
    fn geometric_zeros_give_bounded_constant() {
        let grid = build_grid(2, 64).unwrap();
        let zs: Vec<f64> = (1..=20).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let mu = poincare_lelong_measure(&ZeroDivisor::real_zeros("g", &zs).unwrap());
        let rep = check_main_inequality(
            &mu,
            &Majorant::Envelope(GrowthEnvelope::Zero),
            &ConvexGauge::identity(),
            &one(2),
            &grid,
            &InequalityOptions { r_max: 1.0 - 0.5f64.powi(20), ..Default::default() },
        )
        .unwrap();
        let oracle: f64 = zs.iter().filter(|&&a| a > 0.5 && a < rep.r_max).map(|a| 1.0 / a - 1.0).sum();
        assert!((rep.lhs - oracle).abs() < 1e-14);
        assert!(rep.implied_c <= 2.0 && rep.stable);
        assert!(rep.stability.windows(2).all(|w| w[1].implied_c >= w[0].implied_c));
    }

    #[test]
    fn plane_divisor_matches_its_counting_measure() {
        let grid = build_grid(4, 8).unwrap();
        let z = ZeroDivisor::from_components(2, "z1=0", vec![Component::hyperplane(0.0, 1.0, 4096, 32).unwrap()])
            .unwrap();
        let maj = Majorant::Measure(poincare_lelong_measure(&z));
        let rep = check_divisor_inequality(&z, &maj, &ConvexGauge::identity(), &one(4), &grid, &Default::default())
            .unwrap();
        assert!((rep.lhs - rep.rhs).abs() <= 1e-3 * rep.lhs, "{} vs {}", rep.lhs, rep.rhs);
    }

    #[test]
    fn chain_holds() {
        for p in [1.0, 2.0, 3.0] {
            let g = ConvexGauge::power(1.0, p).unwrap();
            for n in [1, 2] {
                for i in 0..1000 {
                    let [a, b, c] = bound_chain(&g, n, 0.5 + 0.5 * i as f64 / 1000.0);
                    assert!(a <= b && b <= c);
                }
            }
        }
    }

    #[test]
    fn uniqueness_dichotomy() {
        let grid = build_grid(2, 64).unwrap();
        let sched = default_schedule();
        let harmonic: Vec<f64> = (2..=100_000).map(|k| 1.0 - 1.0 / k as f64).collect();
        let z = ZeroDivisor::real_zeros("harmonic", &harmonic).unwrap();
        let v = uniqueness_classifier(&z, &GrowthEnvelope::Zero, &ConvexGauge::identity(), &one(2), &grid, &sched)
            .unwrap();
        assert_eq!(v.verdict, Verdict::ForcesZero);
        assert_eq!(blaschke_condition(&z, &sched).unwrap().status, SeriesStatus::Divergent);
        assert_eq!(djrbashian_condition(&z, 1.0, 0.5, &sched).unwrap().status, SeriesStatus::Finite);

        let geo: Vec<f64> = (1..=40).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let z = ZeroDivisor::real_zeros("geometric", &geo).unwrap();
        let v = uniqueness_classifier(&z, &GrowthEnvelope::Zero, &ConvexGauge::identity(), &one(2), &grid, &sched)
            .unwrap();
        assert_eq!(v.verdict, Verdict::Compatible);
        let b = blaschke_condition(&z, &sched).unwrap();
        assert_eq!(b.status, SeriesStatus::Finite);
        assert!((b.limit_estimate.unwrap() - 1.0).abs() < 1e-12);

        assert!(blaschke_condition(&z, &sched[..4]).is_err());
        let empty = djrbashian_condition(&ZeroDivisor::empty(1), 1.0, 0.5, &sched).unwrap();
        assert_eq!((empty.status, empty.limit_estimate), (SeriesStatus::Finite, Some(0.0)));
    }

    #[test]
    fn plane_blaschke_sum() {
        let z = ZeroDivisor::from_components(2, "z1=0", vec![Component::hyperplane(0.0, 1.0, 4096, 32).unwrap()])
            .unwrap();
        let sched: Vec<f64> = (2..=30).map(|j| 1.0 - 0.5f64.powi(j)).collect();
        let b = blaschke_condition(&z, &sched).unwrap();
        assert_eq!(b.status, SeriesStatus::Finite);
        assert!((b.limit_estimate.unwrap() - PI / 6.0).abs() < 1e-9);
    }
}

//! Subharmonic test functions `v(x) = g(|x|^{1-m} - 1) h(x/|x|)` on the shell
//! `r_ρ < |x| < 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gauge::{gauge_check, uniform_grid, ConvexGauge, GaugeReport};
use crate::sphere::{norm, sphere_mean, SphereGrid};
use crate::subspherical::{random_direction, DirectionFunction, Smoothness};

/// `(m-1)/(1 - r^{m-1}) - ρ(ρ+m-2)`, the sign-carrying factor of the Laplacian lower bound.
pub fn bracket(r: f64, rho: f64, m: usize) -> f64 {
    let k = (m - 1) as f64;
    k / (1.0 - r.powi(m as i32 - 1)) - rho * (rho + k - 1.0)
}

/// `r_ρ = max{1/2, ((1 - (m-1)/(ρ(ρ+m-2)))⁺)^{1/(m-1)}}`.
///
/// The returned float is the smallest one at which [`bracket`] is
/// nonnegative when that exceeds 1/2, so the sign of the bracket flips
/// exactly at `r_ρ`.
pub fn critical_radius(rho: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::UnsupportedDimension(m));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return domain(format!("order ρ = {rho} must be finite and >= 0"));
    }
    let k = (m - 1) as f64;
    let q = rho * (rho + k - 1.0);
    if q <= k {
        return Ok(0.5);
    }
    let mut r = (1.0 - k / q).powf(1.0 / k);
    if r <= 0.5 {
        return Ok(0.5);
    }
    while bracket(r, rho, m) < 0.0 {
        r = r.next_up();
    }
    while r.next_down() > 0.5 && bracket(r.next_down(), rho, m) >= 0.0 {
        r = r.next_down();
    }
    Ok(r.max(0.5))
}

/// A built test function together with its certified constants.
#[derive(Clone)]
pub struct TestFunction {
    pub gauge: ConvexGauge,
    pub h: DirectionFunction,
    pub rho: f64,
    pub m: usize,
    pub r_rho: f64,
    /// `g(r_ρ^{1-m} - 1) · sup h`.
    pub b_rho: f64,
    pub h_max_grid: f64,
    /// Whether `sup h` is known in closed form rather than taken from the grid.
    pub sup_exact: bool,
    pub gauge_report: GaugeReport,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("gauge", &self.gauge)
            .field("h", &self.h.label())
            .field("rho", &self.rho)
            .field("m", &self.m)
            .field("r_rho", &self.r_rho)
            .field("b_rho", &self.b_rho)
            .finish()
    }
}

impl TestFunction {
    /// `sup h` used in `b_ρ`.
    pub fn h_sup(&self) -> f64 {
        match self.h.known_sup() {
            Some(s) => s.max(self.h_max_grid),
            None => self.h_max_grid,
        }
    }

    /// `v(x)` for `0 < |x|`; zero on and outside the unit sphere.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        if r >= 1.0 {
            return 0.0;
        }
        let s: Vec<f64> = x.iter().map(|v| v / r).collect();
        self.gauge.eval(r.powi(1 - self.m as i32) - 1.0) * self.h.eval(&s)
    }

    /// `r^{-2} g(r^{1-m} - 1) h(s) · bracket(r)`, a lower bound for `Δv` on the shell.
    pub fn lower_bound(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        let s: Vec<f64> = x.iter().map(|v| v / r).collect();
        self.gauge.eval(r.powi(1 - self.m as i32) - 1.0) * self.h.eval(&s) * bracket(r, self.rho, self.m)
            / (r * r)
    }
}

/// Builds `v` for `h` of declared order at most `ρ`, nonnegative on `grid`.
pub fn build_test_function(
    g: &ConvexGauge,
    h: &DirectionFunction,
    rho: f64,
    grid: &SphereGrid,
) -> Result<TestFunction> {
    let m = h.dim();
    if grid.dim() != m {
        return domain("grid dimension does not match h");
    }
    if rho < h.order() {
        return domain(format!("ρ = {rho} is below the declared order {} of h", h.order()));
    }
    let h_min = h.grid_min(grid);
    if h_min < 0.0 {
        return domain(format!("h takes the negative value {h_min} on the grid"));
    }
    let r_rho = critical_radius(rho, m)?;
    let x_max = r_rho.powi(1 - m as i32) - 1.0;
    let gauge_report = gauge_check(g, &uniform_grid(x_max.max(1.0), 512))?;
    if !gauge_report.pass {
        return Err(Error::InvalidGauge(format!(
            "gauge axioms fail: convexity {:.3e}, monotonicity {:.3e}, g'(x) - g(x)/x = {:.3e} at x = {}",
            gauge_report.convexity, gauge_report.monotonicity, gauge_report.secant, gauge_report.secant_at
        )));
    }
    let h_max_grid = h.grid_max(grid);
    let sup_exact = h.known_sup().is_some();
    let mut v = TestFunction {
        gauge: g.clone(),
        h: h.clone(),
        rho,
        m,
        r_rho,
        b_rho: 0.0,
        h_max_grid,
        sup_exact,
        gauge_report,
    };
    v.b_rho = g.eval(x_max) * v.h_sup();
    Ok(v)
}

/// `count` deterministic points with `r_ρ + δ ≤ |x| ≤ 1 - δ`, `δ = (1 - r_ρ)/100`.
pub fn default_shell_probes(m: usize, r_rho: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = (1.0 - r_rho) / 100.0;
    (0..count)
        .map(|_| {
            let dir = random_direction(&mut rng, m);
            let r: f64 = rng.gen_range(r_rho + delta..=1.0 - delta);
            dir.iter().map(|v| v * r).collect()
        })
        .collect()
}

/// `1 - 2^{-k}` for `k = 4..=20`; radii inside the critical ball are skipped.
pub fn default_boundary_schedule() -> Vec<f64> {
    (4..=20).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestFnTolerances {
    /// Absolute slack of the sub-mean-value test.
    pub sub_mean: f64,
    /// Relative slack of the bound and boundary tests.
    pub bound: f64,
    /// Relative slack of the finite-difference Laplacian test.
    pub laplacian: f64,
    /// Finite-difference step.
    pub eta: f64,
}

impl Default for TestFnTolerances {
    fn default() -> Self {
        Self { sub_mean: 1e-6, bound: 1e-12, laplacian: 1e-4, eta: 1e-4 }
    }
}

/// One of the five checks: `pass ⇔ worst ≥ -tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub worst: f64,
    pub worst_at: Vec<f64>,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub pass: bool,
}

impl CheckOutcome {
    fn new(tolerance: f64) -> Self {
        Self { worst: f64::INFINITY, worst_at: Vec::new(), tolerance, evaluated: 0, skipped: 0, pass: true }
    }

    fn record(&mut self, residual: f64, at: &[f64]) {
        self.evaluated += 1;
        if residual < self.worst || self.worst_at.is_empty() {
            self.worst = residual;
            self.worst_at = at.to_vec();
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst >= -self.tolerance;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub rho: f64,
    pub m: usize,
    pub r_rho: f64,
    pub b_rho: f64,
    pub h_max_grid: f64,
    pub sup_exact: bool,
    pub positivity: CheckOutcome,
    pub bound: CheckOutcome,
    pub boundary: CheckOutcome,
    /// Largest `v(r s)` over grid directions at the outermost schedule radius.
    pub boundary_last_max: f64,
    pub sub_mean: CheckOutcome,
    /// Only for `m = 2` and `h` with known kinks.
    pub laplacian: Option<CheckOutcome>,
    pub pass: bool,
}

/// Runs the positivity, bound, boundary-vanishing, sub-mean-value and (on
/// the circle) finite-difference Laplacian checks.
pub fn verify_test_function(
    v: &TestFunction,
    grid: &SphereGrid,
    probes: &[Vec<f64>],
    schedule: &[f64],
    tol: &TestFnTolerances,
) -> Result<VerificationReport> {
    if grid.dim() != v.m {
        return domain("grid dimension does not match the test function");
    }
    for x in probes {
        let r = norm(x);
        if x.len() != v.m || !(r > v.r_rho && r < 1.0) {
            return domain(format!(
                "probe |x| = {r} is outside the shell ({}, 1) where subharmonicity is claimed",
                v.r_rho
            ));
        }
    }
    if schedule.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return domain("boundary schedule radii must lie in (0, 1)");
    }
    let scale = v.b_rho.max(1.0);

    let mut positivity = CheckOutcome::new(0.0);
    let mut bound = CheckOutcome::new(tol.bound * scale);
    for x in probes {
        let value = v.eval(x);
        if !value.is_finite() {
            return Err(Error::Evaluation { node: x.clone(), value });
        }
        positivity.record(value, x);
        bound.record(v.b_rho - value, x);
    }

    // convexity and g(0) = 0 give g(t) ≤ t g(1) on [0, 1]
    let mut boundary = CheckOutcome::new(tol.bound * scale);
    let mut boundary_last_max: f64 = 0.0;
    let g1 = v.gauge.eval(1.0);
    let h_sup = v.h_sup();
    for (i, &r) in schedule.iter().enumerate() {
        let t = r.powi(1 - v.m as i32) - 1.0;
        if t > 1.0 || r <= v.r_rho {
            boundary.skipped += grid.len();
            continue;
        }
        let limit = g1 * t * h_sup;
        let mut level_max: f64 = 0.0;
        for (s, _) in grid.iter() {
            let x: Vec<f64> = s.iter().map(|u| u * r).collect();
            let value = v.eval(&x);
            level_max = level_max.max(value);
            boundary.record(limit - value, &x);
        }
        if i + 1 == schedule.len() {
            boundary_last_max = level_max;
        }
    }

    let mut sub_mean = CheckOutcome::new(tol.sub_mean);
    for x in probes {
        let r = norm(x);
        let eps = (0.1 * r).min(0.5 * (r - v.r_rho)).min(0.5 * (1.0 - r));
        let mean = sphere_mean(|y| v.eval(y), x, eps, grid)?;
        sub_mean.record(mean - v.eval(x), x);
    }

    let laplacian = if v.m == 2 && v.h.smoothness() != Smoothness::General {
        let eta = tol.eta;
        let mut out = CheckOutcome::new(0.0);
        for x in probes {
            let r = norm(x);
            let theta = x[1].atan2(x[0]);
            let reach = 2.0 * eta / (r - eta);
            if v.h.kink_in_arc(theta - reach, theta + reach) {
                out.skipped += 1;
                continue;
            }
            let c = v.eval(x);
            let lap = (v.eval(&[x[0] + eta, x[1]])
                + v.eval(&[x[0] - eta, x[1]])
                + v.eval(&[x[0], x[1] + eta])
                + v.eval(&[x[0], x[1] - eta])
                - 4.0 * c)
                / (eta * eta);
            let lb = v.lower_bound(x);
            let slack = tol.laplacian * lb.abs().max(lap.abs()).max(1.0)
                + 64.0 * f64::EPSILON * c.abs() / (eta * eta);
            out.record(lap - lb + slack, x);
        }
        Some(out.finish())
    } else {
        None
    };

    let positivity = positivity.finish();
    let bound = bound.finish();
    let boundary = boundary.finish();
    let sub_mean = sub_mean.finish();
    let pass = positivity.pass
        && bound.pass
        && boundary.pass
        && sub_mean.pass
        && laplacian.as_ref().map_or(true, |c| c.pass);
    Ok(VerificationReport {
        rho: v.rho,
        m: v.m,
        r_rho: v.r_rho,
        b_rho: v.b_rho,
        h_max_grid: v.h_max_grid,
        sup_exact: v.sup_exact,
        positivity,
        bound,
        boundary,
        boundary_last_max,
        sub_mean,
        laplacian,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{build_grid, SpherePoint};
    use crate::subspherical::example_cap_cosine;

    #[test]
    fn critical_radius_values() {
        assert_eq!(critical_radius(1.0, 2).unwrap(), 0.5);
        assert_eq!(critical_radius(2.0, 2).unwrap(), 0.75);
        for m in 2..6 {
            assert_eq!(critical_radius(0.0, m).unwrap(), 0.5);
        }
        assert!(critical_radius(1.0, 1).is_err());
    }

    #[test]
    fn bracket_changes_sign_at_critical_radius() {
        for m in 2..=4 {
            for rho in [0.5, 1.0, 2.0, 3.0, 5.0, 7.25] {
                let r0 = critical_radius(rho, m).unwrap();
                assert!(bracket(r0, rho, m) >= 0.0);
                if r0 > 0.5 {
                    assert!(bracket(r0.next_down(), rho, m) < 0.0, "m={m} ρ={rho}");
                }
            }
        }
    }

    #[test]
    fn identity_gauge_constant_direction() {
        let grid = build_grid(2, 256).unwrap();
        let h = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        let v = build_test_function(&ConvexGauge::identity(), &h, 1.0, &grid).unwrap();
        assert_eq!(v.r_rho, 0.5);
        assert_eq!(v.b_rho, 1.0);
        assert!((v.eval(&[0.75, 0.0]) - 1.0 / 3.0).abs() < 1e-15);
        assert!((v.eval(&[0.0, 0.3]) - (1.0 / 0.3 - 1.0)).abs() < 1e-14);
        let probes = default_shell_probes(2, v.r_rho, 200, 7);
        let report =
            verify_test_function(&v, &grid, &probes, &default_boundary_schedule(), &Default::default())
                .unwrap();
        assert!(report.pass, "{report:#?}");
        assert!(report.laplacian.as_ref().unwrap().evaluated == 200);
        assert!(report.boundary_last_max <= 1e-5);
    }

    #[test]
    fn near_boundary_value_is_first_order_small() {
        let grid = build_grid(2, 64).unwrap();
        let g = ConvexGauge::power(1.0, 3.0).unwrap();
        let h = example_cap_cosine(&SpherePoint::from_angle(0.0), 1.0).unwrap();
        let v = build_test_function(&g, &h, 1.0, &grid).unwrap();
        let x = [1.0 - 1e-6, 0.0];
        assert!(v.eval(&x) <= 1e-5 * g.right_derivative(1.0) * 1.0);
    }

    #[test]
    fn probes_inside_critical_ball_are_rejected() {
        let grid = build_grid(2, 512).unwrap();
        let h = example_cap_cosine(&SpherePoint::from_angle(0.3), 2.0).unwrap();
        let v = build_test_function(&ConvexGauge::identity(), &h, 2.0, &grid).unwrap();
        assert_eq!(v.r_rho, 0.75);
        let ok = verify_test_function(&v, &grid, &[vec![0.85 * 0.3f64.cos(), 0.85 * 0.3f64.sin()]], &[], &Default::default())
            .unwrap();
        assert!(ok.sub_mean.pass);
        assert!(matches!(
            verify_test_function(&v, &grid, &[vec![0.6, 0.0]], &[], &Default::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rejects_negative_h_and_low_order() {
        let grid = build_grid(2, 64).unwrap();
        let c = DirectionFunction::cosine(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            build_test_function(&ConvexGauge::identity(), &c, 1.0, &grid),
            Err(Error::Domain(_))
        ));
        let h = example_cap_cosine(&SpherePoint::from_angle(0.0), 2.0).unwrap();
        assert!(build_test_function(&ConvexGauge::identity(), &h, 1.0, &grid).is_err());
        let bad = ConvexGauge::table(&[[0.0, 0.0], [1.0, 1.0], [2.0, 1.2]]).unwrap();
        let one = DirectionFunction::constant(2, 1.0, 1.0).unwrap();
        assert!(matches!(build_test_function(&bad, &one, 1.0, &grid), Err(Error::InvalidGauge(_))));
    }
}

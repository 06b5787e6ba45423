// The growth inequality for zeros of a Blaschke product: with `M = log|B|`
// both sides coincide; with `M = 0` the implied constant stays bounded.

use ballzeros::gauge::ConvexGauge;
use ballzeros::measures::*;
use ballzeros::sphere::build_grid;
use ballzeros::subspherical::DirectionFunction;
use ballzeros::theorems::*;

pub fn run_example() -> (InequalityReport, InequalityReport) {
    let grid = build_grid(2, 128).unwrap();
    let zs: Vec<f64> = (1..=20).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let z = ZeroDivisor::real_zeros("geometric", &zs).unwrap();
    let h = DirectionFunction::constant(2, 1.0, 0.0).unwrap();
    let g = ConvexGauge::identity();
    let opts = InequalityOptions::default();
    let equal = check_divisor_inequality(&z, &Majorant::Measure(poincare_lelong_measure(&z)), &g, &h, &grid, &opts)
        .unwrap();
    assert_eq!(equal.implied_c, 0.0);
    let bounded = check_divisor_inequality(&z, &Majorant::Envelope(GrowthEnvelope::Zero), &g, &h, &grid, &opts).unwrap();
    assert!(bounded.stable && bounded.implied_c <= 2.0);
    (equal, bounded)
}

fn main() {
    let (equal, bounded) = run_example();
    println!("M = log|B|: lhs {:.12} rhs {:.12} C {}", equal.lhs, equal.rhs, equal.implied_c);
    println!("M = 0:");
    for p in &bounded.stability {
        println!("  r_max {:.8}  implied C {:.10}", p.r_max, p.implied_c);
    }
}

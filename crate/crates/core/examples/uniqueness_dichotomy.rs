// Zero sets that force `f = 0` versus zero sets compatible with bounded growth.

use ballzeros::gauge::ConvexGauge;
use ballzeros::measures::*;
use ballzeros::sphere::build_grid;
use ballzeros::subspherical::DirectionFunction;
use ballzeros::theorems::*;

pub fn run_example() -> Vec<(String, Verdict, SeriesStatus)> {
    let grid = build_grid(2, 64).unwrap();
    let h = DirectionFunction::constant(2, 1.0, 0.0).unwrap();
    let sched = default_schedule();
    let cases = [
        ("1 - 1/k, M = 0", ZeroSequence::Power { exponent: 1.0, count: 100_000 }, GrowthEnvelope::Zero, ConvexGauge::identity()),
        ("1 - 2^-k, M = 0", ZeroSequence::Geometric { count: 40 }, GrowthEnvelope::Zero, ConvexGauge::identity()),
        (
            "1 - k^-1/2, M = (1-r)^-1",
            ZeroSequence::Power { exponent: 0.5, count: 100_000 },
            GrowthEnvelope::radial_power(1.0, 1.0).unwrap(),
            ConvexGauge::power(1.0, 2.5).unwrap(),
        ),
    ];
    let out: Vec<_> = cases
        .into_iter()
        .map(|(name, seq, env, g)| {
            let z = ZeroDivisor::real_zeros(name, &seq.points()).unwrap();
            let v = uniqueness_classifier(&z, &env, &g, &h, &grid, &sched).unwrap();
            (name.to_string(), v.verdict, blaschke_condition(&z, &sched).unwrap().status)
        })
        .collect();
    assert_eq!(out[0].1, Verdict::ForcesZero);
    assert_eq!(out[1].1, Verdict::Compatible);
    out
}

fn main() {
    for (name, verdict, blaschke) in run_example() {
        println!("{name:<26} {verdict:?}  (Blaschke sum: {blaschke:?})");
    }
}

// Four independent tests of ρ-subsphericity on the circle, applied to a
// clipped cosine and to `cos 2θ` declared with the wrong order.

use ballzeros::sphere::{build_grid, SpherePoint};
use ballzeros::subspherical::*;

pub fn run_example() -> Vec<(String, [bool; 4])> {
    let grid = build_grid(2, 1024).unwrap();
    let tol = Tolerances::default();
    let probes = default_probes(2, 100, 3);
    let cases = vec![
        (example_cap_cosine(&SpherePoint::from_angle(0.4), 1.0).unwrap(), 1.0),
        (example_cap_cosine(&SpherePoint::from_angle(0.0), 2.0).unwrap(), 2.0),
        (DirectionFunction::cosine(2.0, 0.0, 1.0).unwrap(), 1.0),
    ];
    cases
        .into_iter()
        .map(|(h, rho)| {
            let verdicts = [
                check_trig_convexity(&h, rho, &default_triples(rho, 128), &tol).unwrap().pass,
                check_mean_inequality(&h, rho, &grid, &[0.05, 0.25, 0.5], &tol).unwrap().pass,
                check_operator_positivity(&h, rho, 1e-3, &tol).unwrap().pass,
                check_radial_subharmonicity(&h, rho, &grid, &probes, &tol).unwrap().pass,
            ];
            (format!("{} as order {rho}", h.label()), verdicts)
        })
        .collect()
}

fn main() {
    println!("{:<34} trig  mean  oper  radial", "function");
    for (name, v) in run_example() {
        println!("{name:<34} {:<5} {:<5} {:<5} {:<5}", v[0], v[1], v[2], v[3]);
    }
}

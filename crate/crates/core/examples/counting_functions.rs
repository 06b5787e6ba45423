// Weighted radial counting functions of planar zeros and of a hyperplane in `C²`.

use ballzeros::measures::*;
use ballzeros::sphere::SpherePoint;
use ballzeros::subspherical::{example_cap_cosine, DirectionFunction};
use num_complex::Complex64;

pub fn run_example() -> Vec<(f64, f64, f64, f64)> {
    let zeros: Vec<(Complex64, f64)> =
        (1..=12).map(|k| (Complex64::from_polar(1.0 - 0.5f64.powi(k), 0.7 * k as f64), 1.0)).collect();
    let planar = ZeroDivisor::planar("spiral", &zeros).unwrap();
    let mu = poincare_lelong_measure(&planar);
    let cap = example_cap_cosine(&SpherePoint::from_angle(0.0), 1.0).unwrap();
    let plane = ZeroDivisor::from_components(
        2,
        "z1 = 0.2",
        vec![Component::hyperplane(0.2, 1.0, HYPERPLANE_RADIAL, HYPERPLANE_ANGULAR).unwrap()],
    )
    .unwrap();
    let one4 = DirectionFunction::constant(4, 1.0, 0.0).unwrap();
    (1..=9)
        .map(|k| {
            let r = k as f64 / 10.0 + 0.05;
            let weighted = divisor_counting(&planar, r, &cap).unwrap();
            // the counting measure of the zeros has the same counting function
            assert_eq!(weighted, radial_counting(&mu, r, &cap).unwrap());
            (r, weighted, divisor_counting(&plane, r, &one4).unwrap(), divisor_counting_sampled(&plane, r, &one4).unwrap())
        })
        .collect()
}

fn main() {
    println!("r,planar_cap_weighted,plane_closed_form,plane_sampled");
    for (r, a, b, c) in run_example() {
        println!("{r:.2},{a:.8},{b:.8},{c:.8}");
    }
}

// Profile of the averaging kernel `K_{ρ,r}` against the angle to the pole.

use ballzeros::sphere::kernel_from_cos;

pub fn run_example() -> Vec<(f64, f64)> {
    let (rho, m, r) = (1.0, 2, 0.8f64);
    let edge = r.asin();
    let profile: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let phi = 1.2 * edge * k as f64 / 40.0;
            (phi, kernel_from_cos(rho, m, r, phi.cos()))
        })
        .collect();
    // decreasing inside the support, zero beyond its edge
    assert!(profile.windows(2).all(|w| w[1].1 <= w[0].1));
    assert!(profile.iter().filter(|(phi, _)| *phi > edge).all(|(_, k)| *k == 0.0));
    profile
}

fn main() {
    println!("phi,value");
    for (phi, k) in run_example() {
        println!("{phi:.6},{k:.10}");
    }
}

// Normalizing constants of balls, spheres and the Riesz measure.

use ballzeros::normalization::{ball_volume, ball_volume_gamma, riesz_normalizer_complex, NormConstants};

pub fn run_example() -> Vec<NormConstants> {
    let rows: Vec<NormConstants> = (2..=8).map(|m| NormConstants::for_dimension(m).unwrap()).collect();
    for c in &rows {
        // closed form against the gamma-function route
        assert!((ball_volume(c.m).unwrap() / ball_volume_gamma(c.m).unwrap() - 1.0).abs() < 1e-13);
    }
    for n in 1..=4 {
        let d = riesz_normalizer_complex(n).unwrap();
        assert!((d / NormConstants::for_dimension(2 * n).unwrap().riesz_normalizer - 1.0).abs() < 1e-13);
    }
    rows
}

fn main() {
    println!("{:>2} {:>14} {:>14} {:>14}", "m", "b_m", "s_(m-1)", "d_(m-1)");
    for c in run_example() {
        println!("{:>2} {:>14.10} {:>14.10} {:>14.10}", c.m, c.ball_volume, c.sphere_area, c.riesz_normalizer);
    }
}

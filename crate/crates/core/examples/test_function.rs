// Gauge test functions `g(|x|^{1-m} - 1) h(x/|x|)` on the shell outside the critical radius.

use ballzeros::gauge::ConvexGauge;
use ballzeros::sphere::{build_grid, SpherePoint};
use ballzeros::subspherical::example_cap_cosine;
use ballzeros::testfn::*;

pub fn run_example() -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for (m, res) in [(2, 512), (4, 24)] {
        let grid = build_grid(m, res).unwrap();
        for p in [1.0, 2.0] {
            let g = ConvexGauge::power(1.0, p).unwrap();
            let h = example_cap_cosine(&SpherePoint::pole(m), 1.0).unwrap();
            let v = build_test_function(&g, &h, 1.0, &grid).unwrap();
            let probes = default_shell_probes(m, v.r_rho, 100, 5);
            let report =
                verify_test_function(&v, &grid, &probes, &default_boundary_schedule(), &Default::default())
                    .unwrap();
            assert!(report.pass);
            out.push(report);
        }
    }
    out
}

fn main() {
    for r in run_example() {
        println!(
            "m={} r_rho={:.4} b_rho={:.4}  sub-mean worst {:+.2e}  boundary max {:.2e}  pass={}",
            r.m, r.r_rho, r.b_rho, r.sub_mean.worst, r.boundary_last_max, r.pass
        );
    }
    for rho in [0.5, 1.0, 2.0, 5.0] {
        println!("critical radius rho={rho}: m=2 {:.6}  m=4 {:.6}", critical_radius(rho, 2).unwrap(), critical_radius(rho, 4).unwrap());
    }
}

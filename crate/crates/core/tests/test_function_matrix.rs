// Test functions built from certified subspherical h pass every check; the
// cases whose h fails certification are listed.

use ballzeros::gauge::ConvexGauge;
use ballzeros::sphere::{build_grid, SpherePoint};
use ballzeros::subspherical::*;
use ballzeros::testfn::*;

fn library(m: usize, rho: f64) -> Vec<DirectionFunction> {
    let mut out = vec![
        DirectionFunction::constant(m, 1.0, 0.0).unwrap(),
        example_cap_cosine(&SpherePoint::pole(m), rho).unwrap(),
        example_kernel_slice(rho, 1.0, &SpherePoint::pole(m)).unwrap(),
    ];
    if rho >= 1.0 {
        let mut pts = vec![vec![0.0; m]; 3];
        pts[1][0] = 1.0;
        pts[2][0] = -0.3;
        pts[2][1] = 0.8;
        out.push(example_support_function(&pts).unwrap());
    }
    out
}

#[test]
fn certified_directions_give_valid_test_functions() {
    let tol = Tolerances::default();
    let mut uncertified = Vec::new();
    let mut checked = 0;
    for m in [2usize, 3, 4] {
        let grid = build_grid(m, if m == 2 { 512 } else { 24 }).unwrap();
        let cert_probes = default_probes(m, 60, 17);
        for rho in [0.5, 1.0, 2.0, 5.0] {
            for h in library(m, rho) {
                let certified = check_radial_subharmonicity(&h, rho, &grid, &cert_probes, &tol).unwrap().pass;
                if !certified {
                    uncertified.push(format!("m={m} ρ={rho} {}", h.label()));
                    continue;
                }
                for p in [1.0, 2.0, 3.0] {
                    let g = ConvexGauge::power(1.0, p).unwrap();
                    let v = build_test_function(&g, &h, rho, &grid).unwrap();
                    let probes = default_shell_probes(m, v.r_rho, 60, 23);
                    let rep = verify_test_function(&v, &grid, &probes, &default_boundary_schedule(), &Default::default())
                        .unwrap();
                    assert!(rep.pass, "m={m} ρ={rho} g=x^{p} {}: {rep:#?}", h.label());
                    checked += 1;
                }
            }
        }
    }
    println!("verified {checked} certified cases; uncertified directions: {uncertified:?}");
    assert!(checked >= 90);
    // every slice or cap that fails certification has the order range excluded by hand analysis
    for case in &uncertified {
        assert!(case.contains("kernel_slice") || (case.contains("cap_cosine") && !case.starts_with("m=2")), "{case}");
    }
}

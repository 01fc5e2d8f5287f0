#![allow(clippy::needless_range_loop)]

use ncqm::fields::{solve_gauge, Gauge, NCProfile};
use ncqm::jacobi::{jacobiator, INDEPENDENT_TRIPLES};
use ncqm::quantum::{omega2_appendix, omega2_general, omega2_raw, order_hbar_condition, scaled_mismatch};
use ncqm::symplectic::{build_constraints, omega0_by_inversion, omega0_closed_form, BivectorField, UPPER_PAIRS};

/// The correction formula with every derivative taken by central differences of
/// the closed-form bracket values.
fn omega2_by_differences(w: &dyn BivectorField, (x, y): (f64, f64), h: f64) -> [[f64; 4]; 4] {
    let m = |x: f64, y: f64| w.eval(x, y, 0).unwrap().matrix();
    let w0 = m(x, y);
    let mut d1 = [[[0.0; 4]; 4]; 4];
    let mut d2 = [[[[0.0; 4]; 4]; 4]; 4];
    let (xp, xm, yp, ym) = (m(x + h, y), m(x - h, y), m(x, y + h), m(x, y - h));
    let (pp, pm, mp, mm) = (m(x + h, y + h), m(x + h, y - h), m(x - h, y + h), m(x - h, y - h));
    for a in 0..4 {
        for b in 0..4 {
            d1[a][b][0] = (xp[a][b] - xm[a][b]) / (2.0 * h);
            d1[a][b][1] = (yp[a][b] - ym[a][b]) / (2.0 * h);
            d2[a][b][0][0] = (xp[a][b] - 2.0 * w0[a][b] + xm[a][b]) / (h * h);
            d2[a][b][1][1] = (yp[a][b] - 2.0 * w0[a][b] + ym[a][b]) / (h * h);
            let c = (pp[a][b] - pm[a][b] - mp[a][b] + mm[a][b]) / (4.0 * h * h);
            d2[a][b][0][1] = c;
            d2[a][b][1][0] = c;
        }
    }
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let (mut t1, mut t2) = (0.0, 0.0);
            for g in 0..2 {
                for r in 0..2 {
                    for s in 0..4 {
                        for dl in 0..4 {
                            if s < 2 && dl < 2 {
                                t1 += d1[r][s][g] * d1[g][dl][r] * d2[mu][nu][s][dl];
                            }
                            if s < 2 {
                                t2 += d2[mu][r][s][g] * if dl < 2 { d2[nu][s][r][dl] } else { 0.0 } * w0[g][dl];
                            }
                        }
                    }
                }
            }
            out[mu][nu] = t1 / 48.0 - t2 / 24.0;
        }
    }
    out
}

#[test]
fn general_formula_matches_finite_differences() {
    let p = NCProfile::local(0.5, 0.5);
    for gauge in [Gauge::Phi, Gauge::Chi] {
        let g = solve_gauge(&p, gauge).unwrap();
        let closed = omega0_closed_form(&g, 0.5);
        for pt in [(0.4, -0.7), (1.1, 0.3)] {
            let exact = omega2_general(&closed, pt).unwrap();
            let fd = omega2_by_differences(&closed, pt, 1e-4);
            for (a, b) in UPPER_PAIRS {
                assert!((exact[a][b] - fd[a][b]).abs() < 1e-6, "{gauge} {pt:?} ({a},{b}) {} {}", exact[a][b], fd[a][b]);
            }
        }
    }
}

#[test]
fn raw_formula_is_already_antisymmetric() {
    let p = NCProfile::new(0.3, 0.4, vec![0.0, 1.0, 0.3]).unwrap();
    let g = solve_gauge(&p, Gauge::Chi).unwrap();
    let w = omega0_by_inversion(&build_constraints(&g, 0.3));
    let raw = omega2_raw(&w, (0.8, -0.2)).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert!((raw[a][b] + raw[b][a]).abs() < 1e-15);
        }
    }
}

#[test]
fn appendix_expansion_matches_on_grid() {
    for theta in [0.1, 0.5] {
        for alpha in [0.25, 0.5] {
            let p = NCProfile::local(theta, alpha);
            for gauge in [Gauge::Phi, Gauge::Chi] {
                let g = solve_gauge(&p, gauge).unwrap();
                let w = omega0_by_inversion(&build_constraints(&g, theta));
                for i in 0..11 {
                    for j in 0..11 {
                        let pt = (-2.0 + 0.4 * i as f64, -2.0 + 0.4 * j as f64);
                        let general = omega2_general(&w, pt).unwrap();
                        let app = omega2_appendix(&g, theta, pt).unwrap().to_matrix();
                        for (a, b) in UPPER_PAIRS {
                            assert!(scaled_mismatch(app[a][b], general[a][b]) <= 1e-8);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn correction_scales_with_theta_at_fixed_density() {
    // d depends on theta * alpha only; the entries then carry theta^3, theta^2 and theta
    for gauge in [Gauge::Phi, Gauge::Chi] {
        let eval = |theta: f64, alpha: f64| {
            let g = solve_gauge(&NCProfile::local(theta, alpha), gauge).unwrap();
            omega2_general(&omega0_by_inversion(&build_constraints(&g, theta)), (0.7, -1.3)).unwrap()
        };
        let a = eval(0.1, 0.5);
        let b = eval(0.2, 0.25);
        let expected = [8.0, 4.0, 4.0, 4.0, 4.0, 2.0];
        for (k, (mu, nu)) in UPPER_PAIRS.into_iter().enumerate() {
            assert!((b[mu][nu] - expected[k] * a[mu][nu]).abs() <= 1e-10 * b[mu][nu].abs().max(1e-12));
        }
    }
}

#[test]
fn order_hbar_condition_is_the_jacobiator() {
    let p = NCProfile::local(0.3, 0.5);
    let g = solve_gauge(&p, Gauge::Phi).unwrap();
    let w = omega0_by_inversion(&build_constraints(&g, 0.3));
    let nonclosed = ncqm::symplectic::PolyBivector::new([
        ncqm::poly::Poly2::u(),
        ncqm::poly::Poly2::constant(1.0),
        ncqm::poly::Poly2::zero(),
        ncqm::poly::Poly2::zero(),
        ncqm::poly::Poly2::constant(1.0),
        ncqm::poly::Poly2::zero(),
    ]);
    for t in INDEPENDENT_TRIPLES {
        let pt = (0.6, -0.9);
        assert!(order_hbar_condition(&w, t, pt).unwrap().abs() < 1e-12);
        assert!(
            (order_hbar_condition(&nonclosed, t, pt).unwrap() - jacobiator(&nonclosed, t, pt).unwrap()).abs() < 1e-15
        );
    }
}

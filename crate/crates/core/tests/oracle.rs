use std::f64::consts::PI;

use num_complex::Complex64;
use philophase::oracle::*;
use philophase::specialfn::bessel_i_ratio;
use philophase::states::{self, Bargmann, FockAmplitudes, StateSpec};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn quadrature_expectation_examples() {
    let spec = StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: re(0.6) };
    let a = states::amplitudes(&spec, 1e-20).unwrap();
    let one = quadrature_expectation(|_| 1.0, &a, -PI, true);
    assert!((one - 1.0).abs() < 1e-14);
    let c = quadrature_expectation(f64::cos, &a, -PI, true);
    assert!((c - 0.6).abs() < 1e-14, "{c}");

    let vac = FockAmplitudes::from_coefficients(vec![re(1.0)]).unwrap();
    let t2 = quadrature_expectation(|t| theta_per(t, -PI).powi(2), &vac, -PI, false);
    assert!((t2 - PI * PI / 3.0).abs() < 1e-12, "{t2}");
}

#[test]
fn moments_via_theta_examples() {
    let vac = FockAmplitudes::from_coefficients(vec![re(1.0)]).unwrap();
    assert_eq!(moments_via_theta(&vac, 1).unwrap(), 0.0);

    let z = Complex64::from_polar(1.7, 0.4);
    let a = states::amplitudes(&StateSpec::PhilophaseMinus { z, sigma: -2 }, 1e-24).unwrap();
    let y = z.norm();
    let expect = y * bessel_i_ratio(1, 0, 2.0 * y).unwrap() + 2.0;
    assert!((moments_via_theta(&a, 1).unwrap() - expect).abs() < 1e-12);

    let b = states::amplitudes(&StateSpec::BarutGirardello { k: Bargmann::ONE, z: re(1.0) }, 1e-24).unwrap();
    let direct = moments_direct(&b).mean_n2;
    assert!((moments_via_theta(&b, 2).unwrap() - direct).abs() < 1e-12);
    assert!(moments_via_theta(&b, 3).is_err());
}

#[test]
fn identity_resolution_examples() {
    assert!(identity_resolution_check(IdentityFamily::Su11(Bargmann::ONE), &[(0, 0)]).unwrap() < 1e-6);
    assert!(identity_resolution_check(IdentityFamily::Bg(Bargmann::HALF), &[(2, 5)]).unwrap() < 1e-12);
    assert!(identity_resolution_check(IdentityFamily::Pplus(2), &[(3, 3)]).unwrap() < 1e-6);
    assert!(identity_resolution_check(IdentityFamily::Bg(Bargmann::HALF), &[(13, 0)]).is_err());
}

#[test]
fn generator_examples() {
    assert_eq!(
        analytic_generator_check(Realization::Disk(Bargmann::HALF), 10).unwrap().max_deviation,
        0.0
    );
    let r = analytic_generator_check(Realization::ModifiedPlane(3), 10).unwrap();
    assert!(r.max_deviation < 1e-13);
    assert_eq!(r.vacuum_projected, Some(0.0));
    assert!(analytic_generator_check(Realization::Circle, 2).is_err());
}

#[test]
fn boundary_examples() {
    let vac = FockAmplitudes::from_coefficients(vec![re(1.0)]).unwrap();
    for zeta in [re(0.0), Complex64::new(0.5, -0.3), re(0.9)] {
        assert!(boundary_reconstruction_check(&vac, zeta).unwrap() < 1e-13);
    }
    let a = states::amplitudes(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: re(0.5) }, 1e-30).unwrap();
    // Geometric series: Σ 0.5ⁿ 0.3ⁿ √0.75.
    let series: Complex64 = a.coefficients().iter().enumerate().map(|(n, c)| c * 0.3f64.powi(n as i32)).sum();
    assert!((series.re - 0.75f64.sqrt() / 0.85).abs() < 1e-15);
    assert!(boundary_reconstruction_check(&a, re(0.3)).unwrap() < 1e-13);
    assert!(boundary_reconstruction_check(&a, re(0.95)).is_err());
}

#[test]
fn phase_like_limit() {
    let d: Vec<f64> = [0.9, 0.99, 0.999, 0.9999].iter().map(|&r| phase_like_deviation(r, 0.8, 6).unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[3] < 1e-3);
}

#[test]
fn eigen_examples() {
    let zeta = Complex64::from_polar(0.7, 2.0);
    let a = states::amplitudes(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta }, 1e-20).unwrap();
    let op = build_operator(OperatorLabel::ShiftLower, a.cutoff()).unwrap();
    assert!(eigen_residual(&op, &a, zeta).unwrap() < 1e-14);

    let z = Complex64::from_polar(3.0, -1.0);
    let p = states::amplitudes(&StateSpec::PhilophasePlus { z, sigma: 3 }, 1e-20).unwrap();
    let op = build_operator(OperatorLabel::KmodMinus(3), p.cutoff()).unwrap();
    assert!(eigen_residual(&op, &p, z).unwrap() < 1e-13);
}

#[test]
fn adjoint_pairs_are_exact() {
    for (a, b) in [
        (OperatorLabel::KPlus(Bargmann::HALF), OperatorLabel::KMinus(Bargmann::HALF)),
        (OperatorLabel::KmodPlus(2), OperatorLabel::KmodMinus(2)),
        (OperatorLabel::ShiftRaise, OperatorLabel::ShiftLower),
    ] {
        let x = build_operator(a, 12).unwrap();
        let y = build_operator(b, 12).unwrap();
        assert_eq!(x.adjoint().matrix(), y.matrix());
    }
    let phi = build_operator(OperatorLabel::PhaseOp(-PI), 12).unwrap();
    assert_eq!(phi.adjoint().matrix(), phi.matrix());
}

#[test]
fn casimir_values() {
    let r = algebra_check(AlgebraParams::Bargmann(Bargmann::from_twice(3).unwrap()), 32).unwrap();
    assert_eq!(r.casimir_value, 0.75);
    assert!(r.casimir < 1e-12);
    let m = algebra_check(AlgebraParams::Modified(2), 32).unwrap();
    assert_eq!(m.casimir_value, -0.25);
    assert!(m.max_deviation() < 1e-12);
}

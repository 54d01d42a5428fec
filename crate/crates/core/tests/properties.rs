//! Randomized invariants: closed forms against brute force, normalization,
//! positivity and uncertainty bounds.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use philophase::oracle::{self, OperatorLabel};
use philophase::phase::{self, PhaseMoments};
use philophase::states::{self, Bargmann, StateSpec};
use philophase::stats::photon_stats;
use philophase::uncertainty::{self, sigma_intelligence};
use philophase::verify::{brute_force_v, scaled_gap};
use proptest::prelude::*;

fn bargmann() -> impl Strategy<Value = Bargmann> {
    (1u32..=5).prop_map(|t| Bargmann::from_twice(t).unwrap())
}

fn spec() -> impl Strategy<Value = StateSpec> {
    let arg = -PI..PI;
    prop_oneof![
        (bargmann(), 0.02f64..0.85, arg.clone())
            .prop_map(|(k, r, a)| StateSpec::Su11Coherent { k, zeta: Complex64::from_polar(r, a) }),
        (bargmann(), 0.05f64..8.0, arg.clone())
            .prop_map(|(k, r, a)| StateSpec::BarutGirardello { k, z: Complex64::from_polar(r, a) }),
        (-5i64..=0, 0.05f64..8.0, arg.clone())
            .prop_map(|(s, r, a)| StateSpec::PhilophaseMinus { z: Complex64::from_polar(r, a), sigma: s }),
        (0i64..=5, 0.05f64..8.0, arg.clone())
            .prop_map(|(s, r, a)| StateSpec::PhilophasePlus { z: Complex64::from_polar(r, a), sigma: s }),
        (0.05f64..4.0, arg).prop_map(|(r, a)| StateSpec::Glauber { alpha: Complex64::from_polar(r, a) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn amplitudes_are_normalized(s in spec()) {
        let a = states::amplitudes(&s, 1e-14).unwrap();
        prop_assert!((a.retained_mass() + a.tail_mass() - 1.0).abs() < 1e-12);
        prop_assert!(a.tail_mass() <= 1e-14);
        let ov = states::overlap(&s, &s).unwrap();
        prop_assert!((ov - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_amplitudes_match_the_recurrence(s in spec(), n in 0usize..30) {
        let a = states::amplitudes_with_cutoff(&s, 30).unwrap();
        let c = states::amplitude_at(&s, n).unwrap();
        prop_assert!((a.get(n) - c).norm() <= 1e-12 * c.norm().max(1e-3));
    }

    #[test]
    fn photon_stats_match_brute_force(s in spec()) {
        let closed = photon_stats(&s).unwrap();
        let a = states::amplitudes(&s, 1e-24).unwrap();
        let b = oracle::moments_direct(&a);
        prop_assert!(scaled_gap(closed.mean_n, b.mean_n) <= 1e-8, "{} vs {}", closed.mean_n, b.mean_n);
        prop_assert!(scaled_gap(closed.variance, b.variance) <= 1e-8, "{} vs {}", closed.variance, b.variance);
        let p1 = oracle::moments_via_theta(&a, 1).unwrap();
        prop_assert!(scaled_gap(p1, b.mean_n) <= 1e-10);
    }

    #[test]
    fn photon_pdf_sums_to_one(s in spec()) {
        let a = states::amplitudes(&s, 1e-16).unwrap();
        let total: f64 = (0..=a.cutoff() as u64).map(|n| philophase::stats::photon_pdf(&s, n).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_moments_match_quadrature(s in spec()) {
        let profile = phase::m_coefficients(&s, 1e-14).unwrap();
        let pm = PhaseMoments::from_profile(&profile);
        let a = states::amplitudes(&s, 1e-24).unwrap();
        let q = oracle::quadrature_moments(&a, pm.theta0);
        for (x, y) in [(pm.var_phi, q.var_phi), (pm.var_cos, q.var_cos), (pm.mean_sin, q.mean_sin)] {
            prop_assert!(scaled_gap(x, y) <= 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn q_is_a_probability_density(s in spec(), t in -PI..PI) {
        let profile = phase::m_coefficients(&s, 1e-14).unwrap();
        prop_assert!(profile.q(t) >= -1e-12);
        let total = philophase::quadrature::periodic_trapezoid(|x| profile.q(x), 0.0, 2 * profile.n_max() + 64);
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_respects_the_lower_bound(s in spec()) {
        if let Ok(v) = uncertainty::v_function(&s) {
            prop_assert!(v >= 0.25 - 1e-9, "V = {v}");
            let b = brute_force_v(&s).unwrap();
            prop_assert!(scaled_gap(v, b) <= 1e-8, "{v} vs {b}");
        }
    }

    #[test]
    fn philophase_minus_states_are_intelligent(sigma in -6i64..=0, r in 0.05f64..10.0, a in -PI..PI) {
        let s = StateSpec::PhilophaseMinus { z: Complex64::from_polar(r, a), sigma };
        prop_assert!(sigma_intelligence(&s).unwrap().relative_gap() <= 1e-9);
    }

    #[test]
    fn lowering_eigenvectors(k in bargmann(), r in 0.05f64..5.0, a in -PI..PI) {
        let z = Complex64::from_polar(r, a);
        let amps = states::amplitudes(&StateSpec::BarutGirardello { k, z }, 1e-20).unwrap();
        let op = oracle::build_operator(OperatorLabel::KMinus(k), amps.cutoff()).unwrap();
        let bound = 10.0 * amps.tail_mass().sqrt() * (amps.cutoff() as f64 + k.twice() as f64) + 1e-12;
        prop_assert!(oracle::eigen_residual(&op, &amps, z).unwrap() <= bound);
    }

    #[test]
    fn doubling_the_cutoff_is_bounded_by_the_tail(s in spec()) {
        let n = states::amplitudes(&s, 1e-6).unwrap().cutoff().max(2);
        let a = states::amplitudes_with_cutoff(&s, n).unwrap();
        let b = states::amplitudes_with_cutoff(&s, 2 * n).unwrap();
        // Diagonal quantities move by the tail mass itself.
        let bound = 10.0 * a.tail_mass() + 1e-14;
        prop_assert!((a.retained_mass() - b.retained_mass()).abs() <= bound);
        let (na, nb) = (a.retained_mass(), b.retained_mass());
        for k in 0..=n {
            let (pa, pb) = (a.get(k).norm_sqr() / na, b.get(k).norm_sqr() / nb);
            prop_assert!((pa - pb).abs() <= bound);
        }
        // Phase moments pick up the cross term C_N C_{N+1}, of order the root of the tail.
        let loose = 10.0 * a.tail_mass().sqrt() + 1e-14;
        let theta0 = s.mean_phase() - PI;
        let qa = oracle::quadrature_moments(&a, theta0);
        let qb = oracle::quadrature_moments(&b, theta0);
        prop_assert!((qa.mean_cos - qb.mean_cos).abs() <= loose);
        prop_assert!((qa.mean_sin - qb.mean_sin).abs() <= loose);
    }
}

#[test]
fn small_parameter_limits() {
    let vac = StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(0.0, 0.0) };
    let pm = phase::phase_moments(&vac, 1e-12).unwrap();
    assert_relative_eq!(pm.var_phi, PI * PI / 3.0, epsilon = 1e-12);
    let a = states::amplitudes(&vac, 1e-12).unwrap();
    assert_relative_eq!(oracle::moments_via_theta(&a, 1).unwrap(), 0.0, epsilon = 1e-15);
}

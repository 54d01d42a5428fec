//! Acceptance criteria. Each test prints one PASS/FAIL line with its
//! wall-clock time and fails if any sub-check or the time budget fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use philophase::contraction::contraction_report;
use philophase::oracle::{self, AlgebraParams, IdentityFamily};
use philophase::phase::{self, PhaseMoments};
use philophase::states::{self, Bargmann, StateSpec};
use philophase::stats::photon_stats;
use philophase::uncertainty::{self, sigma_intelligence};
use philophase::verify::{brute_force_v, scaled_gap};
use philophase::Precision;

struct Outcome(Vec<String>);

impl Outcome {
    fn new() -> Self {
        Outcome(Vec::new())
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }
}

fn criterion(id: u32, title: &str, budget: Duration, body: impl FnOnce(&mut Outcome)) {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    if elapsed > budget {
        out.0.push(format!("took {elapsed:?}, budget {budget:?}"));
    }
    let verdict = if out.0.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {id} [{title}]: {verdict} ({:.3} s)", elapsed.as_secs_f64());
    for f in &out.0 {
        println!("    {f}");
    }
    assert!(out.0.is_empty(), "criterion {id} failed: {:?}", out.0);
}

fn k(twice: u32) -> Bargmann {
    Bargmann::from_twice(twice).unwrap()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn g2(spec: &StateSpec) -> f64 {
    photon_stats(spec).unwrap().g2.unwrap()
}

#[test]
fn criterion_1_g2_closed_forms() {
    criterion(1, "g2 closed forms", Duration::from_secs(1), |o| {
        for t in 1..=4 {
            for r in [0.1, 0.5, 0.9] {
                let spec = StateSpec::Su11Coherent { k: k(t), zeta: Complex64::from_polar(r, 0.7) };
                let expect = 1.0 + 1.0 / t as f64;
                let got = g2(&spec);
                o.require((got - expect).abs() <= 1e-12, || format!("su11 k={}/2 r={r}: g2={got}", t));
            }
        }
        let got = g2(&StateSpec::BarutGirardello { k: Bargmann::HALF, z: re(1e-3) });
        o.require((got - 0.5).abs() <= 1e-3, || format!("bg quantum limit g2={got}"));
    });
}

#[test]
fn criterion_2_philophase_antibunching() {
    criterion(2, "philophase antibunching", Duration::from_secs(1), |o| {
        let a = g2(&StateSpec::PhilophaseMinus { z: re(1e-2), sigma: -1 });
        o.require(a <= 1e-2, || format!("sigma=-1 g2={a}"));
        let b = g2(&StateSpec::PhilophaseMinus { z: re(1e-2), sigma: -2 });
        o.require((b - 0.5).abs() <= 1e-2, || format!("sigma=-2 g2={b}"));
    });
}

#[test]
fn criterion_3_contraction_numbers() {
    criterion(3, "contraction to Glauber states", Duration::from_secs(5), |o| {
        let r20 = contraction_report(20).unwrap();
        let r50 = contraction_report(50).unwrap();
        o.require(r20.abs_z == 40.0 && r50.abs_z == 100.0, || "abs_z not 2 sigma".into());
        o.require(r20.g2_gap <= 1e-3, || format!("g2 gap at 20: {}", r20.g2_gap));
        let m = (r50.mean_ratio - 1.0).abs();
        o.require(m <= 1e-2, || format!("mean ratio gap at 50: {m}"));
        let v = (r20.var_ratio - 1.0).abs();
        o.require(v <= 3e-5, || format!("variance ratio gap at 20: {v}"));
    });
}

#[test]
fn criterion_4_phase_formalism() {
    criterion(4, "phase formalism", Duration::from_secs(5), |o| {
        let vac = phase::phase_moments(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: re(0.0) }, 1e-12).unwrap();
        o.require((vac.var_phi - PI * PI / 3.0).abs() <= 1e-9, || format!("vacuum var_phi {}", vac.var_phi));
        o.require((vac.var_cos - 0.5).abs() <= 1e-9, || format!("vacuum var_cos {}", vac.var_cos));
        for i in 1..=9 {
            let r = i as f64 / 10.0;
            let spec = StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::from_polar(r, 1.1) };
            let m = phase::phase_moments(&spec, 1e-12).unwrap();
            let expect = 0.5 * (1.0 - r * r);
            o.require((m.var_cos - expect).abs() <= 1e-10, || format!("su11 |zeta|={r}: var_cos {}", m.var_cos));
        }
        for r in [0.5, 2.0, 6.0, 15.0] {
            let spec = StateSpec::BarutGirardello { k: Bargmann::HALF, z: Complex64::from_polar(r, -0.4) };
            let profile = phase::m_coefficients(&spec, 1e-14).unwrap();
            let mut worst: f64 = 0.0;
            for j in 0..64 {
                let t = -PI + 2.0 * PI * j as f64 / 64.0;
                let closed = phase::q_theta_closed(&spec, t).unwrap().unwrap();
                worst = worst.max((closed - profile.q(t)).abs());
            }
            o.require(worst <= 1e-9, || format!("bg |z|={r}: von Mises mismatch {worst}"));
        }
    });
}

#[test]
fn criterion_5_uncertainty_limits() {
    criterion(5, "uncertainty limits", Duration::from_secs(10), |o| {
        let lim = PI * PI / 12.0;
        let a = uncertainty::v_function(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: re(1e-3) }).unwrap();
        o.require((a - lim).abs() <= 1e-2, || format!("su11 V small-|zeta| {a}"));
        let b = uncertainty::v_function(&StateSpec::BarutGirardello { k: Bargmann::HALF, z: re(1e-3) }).unwrap();
        o.require((b - lim).abs() <= 1e-2, || format!("bg V small-|z| {b}"));
        let spec = StateSpec::BarutGirardello { k: Bargmann::HALF, z: Complex64::from_polar(20.0, PI / 2.0) };
        let r1 = uncertainty::r_functions(&spec).unwrap().0.unwrap();
        let target = 0.25 * (1.0 + 1.0 / 40.0);
        o.require((r1 - target).abs() <= 0.02 * target, || format!("R1 at |z|=20: {r1}"));
        let precision = Precision::default();
        for spec in states::standard_grid() {
            if let Some(v) = uncertainty::uncertainty_report(&spec, &precision).unwrap().v {
                o.require(v >= 0.25 - 1e-9, || format!("{spec:?}: V={v}"));
            }
        }
    });
}

#[test]
fn criterion_6_intelligent_states() {
    criterion(6, "sigma-operator intelligent states", Duration::from_secs(2), |o| {
        for sigma in [0, -1, -3] {
            for r in [0.5, 1.0, 5.0] {
                let spec = StateSpec::PhilophaseMinus { z: Complex64::from_polar(r, 0.3), sigma };
                let rep = sigma_intelligence(&spec).unwrap();
                let gap = rep.relative_gap();
                o.require(gap <= 1e-9, || format!("sigma={sigma} |z|={r}: relative gap {gap}"));
            }
        }
    });
}

#[test]
fn criterion_7_oracle_equivalence() {
    criterion(7, "oracle equivalence", Duration::from_secs(60), |o| {
        let grid = states::standard_grid();
        let families: std::collections::BTreeSet<_> = grid.iter().map(|s| s.family().name()).collect();
        o.require(families.len() >= 4 && grid.len() >= 48, || "standard grid too small".into());
        for spec in &grid {
            let closed = photon_stats(spec).unwrap();
            let amps = states::amplitudes(spec, 1e-24).unwrap();
            let brute = oracle::moments_direct(&amps);
            for (name, x, y) in [
                ("mean_n", closed.mean_n, brute.mean_n),
                ("mean_n2", closed.mean_n2, brute.mean_n2),
                ("variance", closed.variance, brute.variance),
            ] {
                o.require(scaled_gap(x, y) <= 1e-8, || format!("{spec:?}: {name} {x} vs {y}"));
            }
            let profile = phase::m_coefficients(spec, 1e-14).unwrap();
            let pm = PhaseMoments::from_profile(&profile);
            let q = oracle::quadrature_moments(&amps, pm.theta0);
            for (name, x, y) in [
                ("mean_phi", pm.mean_phi, q.mean_phi),
                ("var_phi", pm.var_phi, q.var_phi),
                ("mean_cos", pm.mean_cos, q.mean_cos),
                ("var_cos", pm.var_cos, q.var_cos),
                ("mean_sin", pm.mean_sin, q.mean_sin),
                ("var_sin", pm.var_sin, q.var_sin),
            ] {
                o.require(scaled_gap(x, y) <= 1e-8, || format!("{spec:?}: {name} {x} vs {y}"));
            }
            if let Ok(v) = uncertainty::v_function(spec) {
                let b = brute_force_v(spec).unwrap();
                o.require(scaled_gap(v, b) <= 1e-8, || format!("{spec:?}: V {v} vs {b}"));
            }
        }
        for theta0 in [-PI, 0.0, 1.3] {
            let d = oracle::number_phase_commutator_deviation(theta0, 64).unwrap();
            o.require(d <= 1e-13, || format!("commutator at theta0={theta0}: {d}"));
        }
        for t in 1..=4 {
            let d = oracle::algebra_check(AlgebraParams::Bargmann(k(t)), 64).unwrap().max_deviation();
            o.require(d <= 1e-12, || format!("algebra k={t}/2: {d}"));
        }
        for s in [0, 1, 2, 5] {
            let d = oracle::algebra_check(AlgebraParams::Modified(s), 64).unwrap().max_deviation();
            o.require(d <= 1e-12, || format!("antinormal algebra sigma={s}: {d}"));
        }
        let pairs: Vec<(usize, usize)> = (0..=8).flat_map(|a| (0..=8).map(move |b| (a, b))).collect();
        for fam in [
            IdentityFamily::Su11(k(2)),
            IdentityFamily::Su11(k(3)),
            IdentityFamily::Su11(k(4)),
            IdentityFamily::Bg(k(1)),
            IdentityFamily::Bg(k(2)),
            IdentityFamily::Bg(k(3)),
            IdentityFamily::Pplus(0),
            IdentityFamily::Pplus(1),
            IdentityFamily::Pplus(2),
        ] {
            let d = oracle::identity_resolution_check(fam, &pairs).unwrap();
            o.require(d <= 1e-6, || format!("identity {fam:?}: {d}"));
        }
    });
}

fn var_phi(spec: StateSpec) -> f64 {
    phase::phase_moments(&spec, 1e-12).unwrap().var_phi
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

#[test]
fn criterion_8_monotonicity_panels() {
    criterion(8, "monotonicity panels", Duration::from_secs(10), |o| {
        for r in [0.2, 0.5, 0.8] {
            let v: Vec<f64> =
                (1..=4).map(|t| var_phi(StateSpec::Su11Coherent { k: k(t), zeta: re(r) })).collect();
            o.require(strictly(&v, false), || format!("su11 var_phi not decreasing in k at |zeta|={r}: {v:?}"));
        }
        for r in [0.5, 2.0, 6.0] {
            let v: Vec<f64> =
                (1..=4).map(|t| var_phi(StateSpec::BarutGirardello { k: k(t), z: re(r) })).collect();
            o.require(strictly(&v, true), || format!("bg var_phi not increasing in k at |z|={r}: {v:?}"));
            let v: Vec<f64> =
                [0, 1, 2, 4].iter().map(|&s| var_phi(StateSpec::PhilophasePlus { z: re(r), sigma: s })).collect();
            o.require(strictly(&v, true), || format!("pplus var_phi not increasing in sigma at |z|={r}: {v:?}"));
        }
        let v = uncertainty::v_function(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: re(0.95) }).unwrap();
        o.require(v > 10.0, || format!("V at |zeta|=0.95 is {v}"));
    });
}

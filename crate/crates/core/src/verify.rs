//! Named invariant suites driven by [`crate::oracle`].
//!
//! Each suite returns a list of [`CheckResult`]s. A check passes when its
//! measured deviation is at most its threshold; a check whose computation
//! fails is recorded as failed with the error message.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::contraction::contraction_report;
use crate::oracle::{self, AlgebraParams, IdentityFamily, OperatorLabel, Realization};
use crate::phase::{self, PhaseMoments};
use crate::states::{self, Bargmann, StateSpec};
use crate::stats::photon_stats;
use crate::uncertainty::{self, sigma_intelligence};
use crate::{Error, Precision, Result};

/// Version of the JSON layout of [`VerifyReport`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Eigen,
    Identity,
    Phase,
    Uncertainty,
    Contraction,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 6] =
        [Suite::Algebra, Suite::Eigen, Suite::Identity, Suite::Phase, Suite::Uncertainty, Suite::Contraction];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Eigen => "eigen",
            Suite::Identity => "identity",
            Suite::Phase => "phase",
            Suite::Uncertainty => "uncertainty",
            Suite::Contraction => "contraction",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Cutoff for matrix-algebra and eigenvector checks.
    pub cutoff: usize,
    /// Threshold for closed form versus brute force, relative with a floor of
    /// `0.01` on the reference magnitude.
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { cutoff: 64, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub deviation: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub cutoff: usize,
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Collector {
    suite: Suite,
    checks: Vec<CheckResult>,
}

impl Collector {
    fn check(&mut self, name: impl Into<String>, threshold: f64, value: Result<f64>) {
        let (deviation, error) = match value {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let passed = deviation.is_some_and(|d| d <= threshold);
        self.checks.push(CheckResult { suite: self.suite, name: name.into(), deviation, threshold, passed, error });
    }
}

/// `|a - b| / max(|b|, 0.01)`: relative above `0.01`, scaled absolute below.
pub fn scaled_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(0.01)
}

/// Run one suite, or all of them in order.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.cutoff < 4 || opts.cutoff > crate::DEFAULT_MAX_CUTOFF {
        return Err(Error::Domain(format!("verify cutoff must lie in [4, {}]", crate::DEFAULT_MAX_CUTOFF)));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::Domain("verify tolerance must be positive".into()));
    }
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for part in parts {
        let mut c = Collector { suite: part, checks: Vec::new() };
        match part {
            Suite::Algebra => algebra(&mut c, opts),
            Suite::Eigen => eigen(&mut c, opts),
            Suite::Identity => identity(&mut c),
            Suite::Phase => phase_suite(&mut c, opts),
            Suite::Uncertainty => uncertainty_suite(&mut c, opts),
            Suite::Contraction => contraction(&mut c),
            Suite::All => unreachable!(),
        }
        checks.extend(c.checks);
    }
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        suite,
        cutoff: opts.cutoff,
        tol: opts.tol,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn bargmanns() -> Vec<Bargmann> {
    (1..=4).map(|t| Bargmann::from_twice(t).expect("small twice-k is valid")).collect()
}

fn algebra(c: &mut Collector, opts: &VerifyOptions) {
    let n = opts.cutoff;
    for k in bargmanns() {
        c.check(
            format!("su11 relations k={k}"),
            1e-12,
            oracle::algebra_check(AlgebraParams::Bargmann(k), n).map(|r| r.max_deviation()),
        );
    }
    for s in [0, 1, 2] {
        c.check(
            format!("antinormal su11 relations sigma={s}"),
            1e-12,
            oracle::algebra_check(AlgebraParams::Modified(s), n).map(|r| r.max_deviation()),
        );
    }
    for theta0 in [-PI, 0.3] {
        c.check(
            format!("number-phase commutator theta0={theta0}"),
            1e-13,
            oracle::number_phase_commutator_deviation(theta0, n),
        );
    }
    for spec in [
        StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(0.3, 0.4) },
        StateSpec::PhilophaseMinus { z: Complex64::new(1.5, -0.5), sigma: -1 },
    ] {
        c.check(
            format!("antinormal unitarity {}", spec.family().name()),
            1e-13,
            states::amplitudes(&spec, 1e-16).map(|a| oracle::antinormal_unitarity_deviation(&a)),
        );
    }
    c.check(
        "antinormal commutativity",
        1e-13,
        Ok(oracle::antinormal_commutator(|t| t, f64::cos, -PI, n.min(32))),
    );
    let deg = n.min(16);
    for r in [
        Realization::Disk(Bargmann::HALF),
        Realization::Disk(Bargmann::from_twice(3).expect("valid")),
        Realization::Circle,
        Realization::Plane(Bargmann::HALF),
        Realization::Plane(Bargmann::ONE),
        Realization::ModifiedPlane(0),
        Realization::ModifiedPlane(2),
    ] {
        c.check(
            format!("differential realization {r:?}"),
            1e-13,
            oracle::analytic_generator_check(r, deg).map(|g| g.max_deviation),
        );
    }
    c.check(
        "modified vacuum after projection",
        0.0,
        oracle::analytic_generator_check(Realization::ModifiedPlane(2), deg)
            .map(|g| g.vacuum_projected.unwrap_or(f64::INFINITY)),
    );
    let a = states::amplitudes(
        &StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(0.5, 0.0) },
        1e-16,
    );
    for zeta in [Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.6)] {
        c.check(
            format!("boundary reconstruction zeta={zeta}"),
            1e-8,
            a.as_ref().map_err(Clone::clone).and_then(|a| oracle::boundary_reconstruction_check(a, zeta)),
        );
    }
}

fn eigen(c: &mut Collector, opts: &VerifyOptions) {
    let n = opts.cutoff;
    let z = Complex64::new(0.9, 0.6);
    let mut run = |name: String, spec: StateSpec, label: Option<OperatorLabel>, eig: Complex64, twice_k: f64| {
        let res = states::amplitudes_with_cutoff(&spec, n).and_then(|a| {
            let op = match label {
                Some(l) => oracle::build_operator(l, n)?,
                None => oracle::sigma_operator(spec.parameter(), n)?,
            };
            let bound = 10.0 * a.tail_mass().sqrt() * (n as f64 + twice_k) + 1e-12;
            // Report the residual in units of the truncation bound.
            Ok(oracle::eigen_residual(&op, &a, eig)? / bound)
        });
        c.check(name, 1.0, res);
    };
    for k in bargmanns() {
        run(
            format!("bg lowering eigenvector k={k}"),
            StateSpec::BarutGirardello { k, z },
            Some(OperatorLabel::KMinus(k)),
            z,
            k.twice() as f64,
        );
    }
    let zeta = Complex64::new(0.4, -0.3);
    run(
        "su11 k=1/2 phase eigenvector".into(),
        StateSpec::Su11Coherent { k: Bargmann::HALF, zeta },
        Some(OperatorLabel::ShiftLower),
        zeta,
        1.0,
    );
    for sigma in [0, -1, -3] {
        run(
            format!("pminus sigma={sigma}"),
            StateSpec::PhilophaseMinus { z, sigma },
            None,
            Complex64::new(-(sigma as f64), 0.0),
            0.0,
        );
    }
    for sigma in [0u32, 2] {
        run(
            format!("pplus sigma={sigma}"),
            StateSpec::PhilophasePlus { z, sigma: sigma as i64 },
            Some(OperatorLabel::KmodMinus(sigma)),
            z,
            2.0 * sigma as f64,
        );
    }
}

fn identity(c: &mut Collector) {
    let pairs: Vec<(usize, usize)> = (0..=8).flat_map(|a| (0..=8).map(move |b| (a, b))).collect();
    let fams = [
        IdentityFamily::Su11(Bargmann::ONE),
        IdentityFamily::Su11(Bargmann::from_twice(3).expect("valid")),
        IdentityFamily::Bg(Bargmann::HALF),
        IdentityFamily::Bg(Bargmann::ONE),
        IdentityFamily::Pplus(0),
        IdentityFamily::Pplus(2),
    ];
    for f in fams {
        c.check(format!("identity resolution {f:?}"), 1e-6, oracle::identity_resolution_check(f, &pairs));
    }
}

/// Closed-form statistics and phase moments against brute force.
fn phase_suite(c: &mut Collector, opts: &VerifyOptions) {
    for spec in states::standard_grid() {
        let label = spec_label(&spec);
        c.check(format!("photon stats {label}"), opts.tol, stats_gap(&spec));
        c.check(format!("phase moments {label}"), opts.tol, moments_gap(&spec));
    }
}

fn spec_label(spec: &StateSpec) -> String {
    let extra = match (spec.bargmann(), spec.sigma()) {
        (Some(k), _) => format!(" k={k}"),
        (_, Some(s)) => format!(" sigma={s}"),
        _ => String::new(),
    };
    format!("{}{extra} |p|={}", spec.family().name(), spec.modulus())
}

fn stats_gap(spec: &StateSpec) -> Result<f64> {
    let closed = photon_stats(spec)?;
    let a = states::amplitudes(spec, 1e-24)?;
    let brute = oracle::moments_direct(&a);
    let via_theta = oracle::moments_via_theta(&a, 2)?;
    let mut gap = scaled_gap(closed.mean_n, brute.mean_n)
        .max(scaled_gap(closed.mean_n2, brute.mean_n2))
        .max(scaled_gap(closed.variance, brute.variance))
        .max(scaled_gap(via_theta, brute.mean_n2));
    if let (Some(x), Some(y)) = (closed.g2, brute.g2) {
        gap = gap.max(scaled_gap(x, y));
    }
    Ok(gap)
}

fn moments_gap(spec: &StateSpec) -> Result<f64> {
    let profile = phase::m_coefficients(spec, 1e-14)?;
    let closed = PhaseMoments::from_profile(&profile);
    let a = states::amplitudes(spec, 1e-24)?;
    let q = oracle::quadrature_moments(&a, closed.theta0);
    let pairs = [
        (closed.mean_phi, q.mean_phi),
        (closed.var_phi, q.var_phi),
        (closed.mean_cos, q.mean_cos),
        (closed.var_cos, q.var_cos),
        (closed.mean_sin, q.mean_sin),
        (closed.var_sin, q.var_sin),
    ];
    Ok(pairs.iter().map(|&(x, y)| scaled_gap(x, y)).fold(0.0, f64::max))
}

/// `𝒱` rebuilt from amplitudes only.
pub fn brute_force_v(spec: &StateSpec) -> Result<f64> {
    let a = states::amplitudes(spec, 1e-24)?;
    let var_n = oracle::moments_direct(&a).variance;
    let theta0 = spec.mean_phase() - PI;
    let q = oracle::quadrature_moments(&a, theta0);
    let d = 1.0 - states::theta_series(&a, theta0).norm_sqr();
    if d.abs() < uncertainty::DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate("boundary term vanishes".into()));
    }
    Ok(var_n * q.var_phi / (d * d))
}

fn uncertainty_suite(c: &mut Collector, opts: &VerifyOptions) {
    let precision = Precision::default();
    let mut v_floor: f64 = 0.0;
    for spec in states::standard_grid() {
        let label = spec_label(&spec);
        let report = uncertainty::uncertainty_report(&spec, &precision);
        if let Ok(Some(v)) = report.as_ref().map(|r| r.v) {
            v_floor = v_floor.max(0.25 - v);
        }
        c.check(
            format!("V closed vs brute force {label}"),
            opts.tol,
            report.and_then(|r| {
                let v = r.v.ok_or_else(|| Error::Degenerate("V undefined".into()))?;
                Ok(scaled_gap(v, brute_force_v(&spec)?))
            }),
        );
    }
    c.check("V >= 1/4 on the standard grid", 1e-9, Ok(v_floor.max(0.0)));
    for sigma in [0, -1, -3] {
        for r in [0.5, 1.0, 5.0] {
            let spec = StateSpec::PhilophaseMinus { z: Complex64::new(r, 0.0), sigma };
            c.check(
                format!("sigma-operator intelligence sigma={sigma} |z|={r}"),
                1e-9,
                sigma_intelligence(&spec).map(|i| i.relative_gap()),
            );
        }
    }
    let lim = PI * PI / 12.0;
    c.check(
        "V su11 k=1/2 small |zeta| limit",
        1e-2,
        uncertainty::v_function(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(1e-3, 0.0) })
            .map(|v| (v - lim).abs()),
    );
    c.check(
        "V bg k=1/2 small |z| limit",
        1e-2,
        uncertainty::v_function(&StateSpec::BarutGirardello { k: Bargmann::HALF, z: Complex64::new(1e-3, 0.0) })
            .map(|v| (v - lim).abs()),
    );
    let target = 0.25 * (1.0 + 1.0 / 40.0);
    c.check(
        "R1 bg k=1/2 |z|=20 large-amplitude value",
        2e-2,
        uncertainty::r_functions(&StateSpec::BarutGirardello {
            k: Bargmann::HALF,
            z: Complex64::from_polar(20.0, PI / 2.0),
        })
        .and_then(|(r1, _)| r1)
        .map(|r1| (r1 - target).abs() / target),
    );
}

fn contraction(c: &mut Collector) {
    let r5 = contraction_report(5);
    let r20 = contraction_report(20);
    let r30 = contraction_report(30);
    let r50 = contraction_report(50);
    c.check("g2 gap at sigma=20", 1e-3, r20.clone().map(|r| r.g2_gap));
    c.check("mean ratio at sigma=50", 1e-2, r50.clone().map(|r| (r.mean_ratio - 1.0).abs()));
    c.check("variance ratio at sigma=20", 3e-5, r20.clone().map(|r| (r.var_ratio - 1.0).abs()));
    c.check(
        "g2 gap decreasing over sigma 5, 20, 50",
        0.0,
        r5.and_then(|a| {
            let b = r20?;
            let c = r50.clone()?;
            Ok(if a.g2_gap > b.g2_gap && b.g2_gap > c.g2_gap { 0.0 } else { 1.0 })
        }),
    );
    c.check("fidelity shortfall at sigma=30", 1e-2, r30.map(|r| 1.0 - r.fidelity));
}

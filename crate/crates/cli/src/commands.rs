use std::f64::consts::PI;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use philophase::contraction::contraction_report;
use philophase::phase::{self, PhaseMoments};
use philophase::states::{Bargmann, Family, StateSpec};
use philophase::stats::photon_stats;
use philophase::uncertainty;
use philophase::verify::{self, Suite, VerifyOptions};
use philophase::Precision;
use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::json;

use crate::complex::parse_complex;
use crate::config::{self, FileConfig, Overrides};
use crate::output::{emit, json_bytes, Cell, Meta, Table, SCHEMA_VERSION};
use crate::{Cli, CliError, Command, OutputArgs, Quantity, ScanArgs, StateArgs, SuiteArg, SweepParam};

/// Largest `|ζ|` a modulus sweep may reach for SU(1,1) coherent states.
const DISK_CAP: f64 = 1.0 - 1e-6;

struct Run {
    precision: Precision,
    started: Instant,
    started_unix_s: u64,
}

impl Run {
    fn meta(&self, notes: Option<serde_json::Value>) -> Meta {
        Meta {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().collect(),
            precision: self.precision,
            started_unix_s: self.started_unix_s,
            elapsed_ms: self.started.elapsed().as_millis(),
            threads: rayon::current_num_threads(),
            notes,
        }
    }

    fn emit(&self, bytes: &[u8], out: Option<&Path>, notes: Option<serde_json::Value>) -> Result<(), CliError> {
        emit(bytes, out, || self.meta(notes))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(FileConfig::load).transpose()?;
    let env = std::env::var(config::MAX_CUTOFF_ENV).ok();
    let flags = Overrides { tail_tol: cli.tail_tol, phase_tol: cli.phase_tol, max_cutoff: cli.max_cutoff };
    let precision = config::resolve(file.as_ref(), env.as_deref(), &flags)?;
    let run = Run {
        precision,
        started: Instant::now(),
        started_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    match cli.command {
        Command::Stats { state, out } => stats(&run, &state, &out),
        Command::PhaseDist { state, points, theta0, out } => phase_dist(&run, &state, points, theta0, &out),
        Command::Scan(args) => scan(&run, &args),
        Command::Verify { suite, cutoff, tol, out } => verify_cmd(&run, suite, cutoff, tol, out.as_deref()),
        Command::Contract { from, to, step, out } => contract(&run, from, to, step, &out),
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// The complex label from whichever flags were given. `None` if none were.
fn complex_label(s: &StateArgs, family: Family) -> Result<Option<Complex64>, CliError> {
    let expected = match family {
        Family::Su11cs => "zeta",
        Family::Glauber => "alpha",
        _ => "z",
    };
    let literals = [("zeta", &s.zeta), ("z", &s.z), ("alpha", &s.alpha)];
    let mut value = None;
    for (name, v) in literals {
        if let Some(text) = v {
            if name != expected {
                return Err(input(format!("--{name} does not apply to family {family}; use --{expected}")));
            }
            value = Some(parse_complex(text).map_err(CliError::Input)?);
        }
    }
    match (value, s.modulus) {
        (Some(_), Some(_)) => Err(input(format!("give either --{expected} or --mod/--arg, not both"))),
        (Some(_), None) if s.arg.is_some() => Err(input("--arg needs --mod")),
        (Some(c), None) => Ok(Some(c)),
        (None, Some(m)) => {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(input(format!("--mod must be a finite non-negative number, got {m}")));
            }
            Ok(Some(Complex64::from_polar(m, s.arg.unwrap_or(0.0))))
        }
        (None, None) => Ok(None),
    }
}

fn family_of(s: &StateArgs) -> Result<Family, CliError> {
    s.family.ok_or_else(|| input("--family is required (su11cs, bg, pminus, pplus, glauber)"))
}

fn bargmann_of(s: &StateArgs, family: Family) -> Result<Bargmann, CliError> {
    let text = s.k.as_deref().ok_or_else(|| input(format!("family {family} needs --k")))?;
    Ok(text.parse::<Bargmann>()?)
}

/// Assemble a state; `c` is the complex label.
fn assemble(s: &StateArgs, family: Family, c: Complex64, k: Option<Bargmann>, sigma: Option<i64>) -> Result<StateSpec, CliError> {
    let needs_k = matches!(family, Family::Su11cs | Family::Bg);
    let needs_sigma = matches!(family, Family::Pminus | Family::Pplus);
    if !needs_k && s.k.is_some() {
        return Err(input(format!("--k does not apply to family {family}")));
    }
    if !needs_sigma && s.sigma.is_some() {
        return Err(input(format!("--sigma does not apply to family {family}")));
    }
    let spec = match family {
        Family::Su11cs => StateSpec::Su11Coherent { k: k.expect("checked"), zeta: c },
        Family::Bg => StateSpec::BarutGirardello { k: k.expect("checked"), z: c },
        Family::Pminus => StateSpec::PhilophaseMinus { z: c, sigma: sigma.expect("checked") },
        Family::Pplus => StateSpec::PhilophasePlus { z: c, sigma: sigma.expect("checked") },
        Family::Glauber => StateSpec::Glauber { alpha: c },
    };
    spec.validate()?;
    Ok(spec)
}

fn state_spec(s: &StateArgs) -> Result<StateSpec, CliError> {
    let family = family_of(s)?;
    let c = complex_label(s, family)?.ok_or_else(|| input("the complex label is missing; give --zeta/--z/--alpha or --mod"))?;
    let k = match family {
        Family::Su11cs | Family::Bg => Some(bargmann_of(s, family)?),
        _ => None,
    };
    let sigma = match family {
        Family::Pminus | Family::Pplus => Some(s.sigma.ok_or_else(|| input(format!("family {family} needs --sigma")))?),
        _ => None,
    };
    assemble(s, family, c, k, sigma)
}

fn spec_context(spec: &StateSpec) -> serde_json::Value {
    json!({
        "state": spec,
        "mod": spec.modulus(),
        "arg": spec.mean_phase(),
    })
}

fn spec_cells(spec: &StateSpec) -> Vec<Cell> {
    vec![
        Cell::Text(spec.family().name().into()),
        spec.bargmann().map_or(Cell::Empty, |k| Cell::Text(k.to_string())),
        spec.sigma().map_or(Cell::Empty, Cell::Int),
        Cell::Num(spec.modulus()),
        Cell::Num(spec.mean_phase()),
    ]
}

const SPEC_COLUMNS: [&str; 5] = ["family", "k", "sigma", "mod", "arg"];

fn stats(run: &Run, s: &StateArgs, out: &OutputArgs) -> Result<(), CliError> {
    let spec = state_spec(s)?;
    let st = photon_stats(&spec)?;
    let mut table = Table::new(SPEC_COLUMNS.iter().copied().chain(["mean_n", "mean_n2", "var_n", "g2", "note"]));
    let note = if st.g2.is_none() { "g2 undefined: zero mean photon number" } else { "" };
    let mut row = spec_cells(&spec);
    row.extend([
        Cell::Num(st.mean_n),
        Cell::Num(st.mean_n2),
        Cell::Num(st.variance),
        st.g2.into(),
        Cell::Text(note.into()),
    ]);
    table.push(row);
    let bytes = table.render(out.format, "stats", spec_context(&spec))?;
    run.emit(&bytes, out.out.as_deref(), None)
}

/// `Q(θ)` by closed form where available, else from the coefficient series.
fn q_sampler(spec: &StateSpec, precision: &Precision) -> Result<impl Fn(f64) -> Result<f64, CliError> + Sync, CliError> {
    let profile = phase::m_coefficients_with_ceiling(spec, precision.phase_tol, precision.max_cutoff)?;
    let spec = *spec;
    let closed = phase::q_theta_closed(&spec, 0.0)?.is_some();
    Ok(move |t: f64| -> Result<f64, CliError> {
        if closed {
            if let Some(q) = phase::q_theta_closed(&spec, t)? {
                return Ok(q);
            }
        }
        Ok(profile.q(t))
    })
}

fn phase_dist(run: &Run, s: &StateArgs, points: usize, theta0: Option<f64>, out: &OutputArgs) -> Result<(), CliError> {
    let spec = state_spec(s)?;
    if points < 2 {
        return Err(input("--points must be at least 2"));
    }
    let theta0 = theta0.unwrap_or(spec.mean_phase() - PI);
    if !theta0.is_finite() {
        return Err(input("--theta0 must be finite"));
    }
    let q = q_sampler(&spec, &run.precision)?;
    let mut table = Table::new(["theta", "q"]);
    for j in 0..points {
        let t = theta0 + 2.0 * PI * j as f64 / points as f64;
        table.push(vec![Cell::Num(t), Cell::Num(q(t)?)]);
    }
    let mut ctx = spec_context(&spec);
    ctx["theta0"] = json!(theta0);
    let bytes = table.render(out.format, "phase-dist", ctx)?;
    run.emit(&bytes, out.out.as_deref(), None)
}

/// One sweep coordinate.
#[derive(Clone, Copy, Debug)]
enum Point {
    Real(f64),
    Twice(u32),
    Sigma(i64),
}

impl Point {
    fn cell(self) -> Cell {
        match self {
            Point::Real(x) => Cell::Num(x),
            Point::Twice(t) => Cell::Text(Bargmann::from_twice(t).map(|k| k.to_string()).unwrap_or_default()),
            Point::Sigma(s) => Cell::Int(s),
        }
    }
}

fn sweep_points(a: &ScanArgs) -> Result<Vec<Point>, CliError> {
    let (from, to) = (a.from, a.to);
    if !(from.is_finite() && to.is_finite()) {
        return Err(input("--from and --to must be finite"));
    }
    match a.sweep {
        SweepParam::Mod | SweepParam::Arg => {
            if a.steps == 0 {
                return Err(input("--steps must be at least 1"));
            }
            if a.log && !(from > 0.0 && to > 0.0) {
                return Err(input("a log sweep needs positive --from and --to"));
            }
            let n = a.steps;
            Ok((0..n)
                .map(|i| {
                    let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    Point::Real(if a.log { from * (to / from).powf(f) } else { from + (to - from) * f })
                })
                .collect())
        }
        SweepParam::K => {
            let tf = 2.0 * from;
            let tt = 2.0 * to;
            if tf.fract() != 0.0 || tt.fract() != 0.0 || tf < 1.0 || tt < tf {
                return Err(input("a k sweep needs half-integer bounds with 1/2 <= from <= to"));
            }
            Ok((tf as u32..=tt as u32).map(Point::Twice).collect())
        }
        SweepParam::Sigma => {
            if from.fract() != 0.0 || to.fract() != 0.0 || to < from {
                return Err(input("a sigma sweep needs integer bounds with from <= to"));
            }
            Ok((from as i64..=to as i64).map(Point::Sigma).collect())
        }
    }
}

fn spec_at(a: &ScanArgs, family: Family, p: Point) -> Result<StateSpec, CliError> {
    let s = &a.state;
    let (c, k, sigma) = match p {
        Point::Real(x) => {
            let base = complex_label(s, family)?;
            let c = match a.sweep {
                SweepParam::Mod => {
                    if base.is_some() && s.modulus.is_none() {
                        return Err(input("a modulus sweep takes the phase from --arg, not a complex literal"));
                    }
                    let m = if family == Family::Su11cs { x.min(DISK_CAP) } else { x };
                    if m < 0.0 {
                        return Err(input(format!("modulus {m} is negative")));
                    }
                    Complex64::from_polar(m, s.arg.unwrap_or(0.0))
                }
                _ => {
                    let m = match (s.modulus, base) {
                        (Some(m), _) => m,
                        (None, Some(c)) => c.norm(),
                        (None, None) => return Err(input("an arg sweep needs --mod")),
                    };
                    Complex64::from_polar(m, x)
                }
            };
            (c, None, None)
        }
        Point::Twice(t) => {
            let c = complex_label(s, family)?.ok_or_else(|| input("a k sweep needs the complex label"))?;
            (c, Some(Bargmann::from_twice(t)?), None)
        }
        Point::Sigma(sg) => {
            let c = complex_label(s, family)?.ok_or_else(|| input("a sigma sweep needs the complex label"))?;
            (c, None, Some(sg))
        }
    };
    let k = match (family, k) {
        (Family::Su11cs | Family::Bg, None) => Some(bargmann_of(s, family)?),
        (Family::Su11cs | Family::Bg, k) => k,
        (_, Some(_)) => return Err(input(format!("family {family} has no k to sweep"))),
        _ => None,
    };
    let sigma = match (family, sigma) {
        (Family::Pminus | Family::Pplus, None) => {
            Some(s.sigma.ok_or_else(|| input(format!("family {family} needs --sigma")))?)
        }
        (Family::Pminus | Family::Pplus, sg) => sg,
        (_, Some(_)) => return Err(input(format!("family {family} has no sigma to sweep"))),
        _ => None,
    };
    let mut stripped = s.clone();
    if matches!(p, Point::Twice(_)) {
        stripped.k = None;
    }
    if matches!(p, Point::Sigma(_)) {
        stripped.sigma = None;
    }
    assemble(&stripped, family, c, k, sigma)
}

fn scan_row(spec: &StateSpec, qs: &[Quantity], profile_points: usize, precision: &Precision) -> Result<Vec<Cell>, CliError> {
    let want = |q: Quantity| qs.contains(&q);
    let stats = if want(Quantity::MeanN) || want(Quantity::VarN) || want(Quantity::G2) {
        Some(photon_stats(spec)?)
    } else {
        None
    };
    let needs_report = [Quantity::V, Quantity::R1, Quantity::R2, Quantity::U].iter().any(|&q| want(q));
    let report = if needs_report { Some(uncertainty::uncertainty_report(spec, precision)?) } else { None };
    let moments = if want(Quantity::VarPhi) || want(Quantity::VarCos) {
        let p = phase::m_coefficients_with_ceiling(spec, precision.phase_tol, precision.max_cutoff)?;
        Some(PhaseMoments::from_profile(&p))
    } else {
        None
    };
    let mut cells = Vec::new();
    for &q in qs {
        match q {
            Quantity::MeanN => cells.push(Cell::Num(stats.expect("computed").mean_n)),
            Quantity::VarN => cells.push(Cell::Num(stats.expect("computed").variance)),
            Quantity::G2 => cells.push(stats.expect("computed").g2.into()),
            Quantity::VarPhi => cells.push(Cell::Num(moments.expect("computed").var_phi)),
            Quantity::VarCos => cells.push(Cell::Num(moments.expect("computed").var_cos)),
            Quantity::V => cells.push(report.expect("computed").v.into()),
            Quantity::R1 => cells.push(report.expect("computed").r1.into()),
            Quantity::R2 => cells.push(report.expect("computed").r2.into()),
            Quantity::U => cells.push(report.expect("computed").u.into()),
            Quantity::QThetaProfile => {
                let sampler = q_sampler(spec, precision)?;
                for t in profile_grid(profile_points) {
                    cells.push(Cell::Num(sampler(t)?));
                }
            }
        }
    }
    Ok(cells)
}

fn profile_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect()
}

fn scan(run: &Run, a: &ScanArgs) -> Result<(), CliError> {
    let family = family_of(&a.state)?;
    let mut qs = a.quantities.clone();
    qs.dedup();
    if qs.contains(&Quantity::QThetaProfile) && a.profile_points < 2 {
        return Err(input("--profile-points must be at least 2"));
    }
    let points = sweep_points(a)?;
    // Reject bad requests before any work is done.
    let specs: Vec<StateSpec> = points.iter().map(|&p| spec_at(a, family, p)).collect::<Result<_, _>>()?;

    let name = match a.sweep {
        SweepParam::Mod => "mod",
        SweepParam::Arg => "arg",
        SweepParam::K => "k",
        SweepParam::Sigma => "sigma",
    };
    let mut columns: Vec<String> = vec![name.into()];
    for &q in &qs {
        match q {
            Quantity::QThetaProfile => columns.extend((0..a.profile_points).map(|j| format!("q_{j}"))),
            other => columns.push(other.to_possible_value().expect("named").get_name().to_string()),
        }
    }
    columns.push("status".into());
    let width = columns.len() - 2;

    let rows: Vec<Vec<Cell>> = specs
        .par_iter()
        .zip(points.par_iter())
        .map(|(spec, &p)| {
            let mut row = vec![p.cell()];
            match scan_row(spec, &qs, a.profile_points, &run.precision) {
                Ok(cells) => {
                    row.extend(cells);
                    row.push(Cell::Text("ok".into()));
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, width));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            row
        })
        .collect();
    let mut table = Table::new(columns);
    for r in rows {
        table.push(r);
    }
    let grid = qs.contains(&Quantity::QThetaProfile).then(|| profile_grid(a.profile_points));
    let ctx = json!({
        "family": family.name(),
        "sweep": name,
        "from": a.from,
        "to": a.to,
        "log": a.log,
        "profile_theta": grid,
    });
    let bytes = table.render(a.out.format, "scan", ctx.clone())?;
    run.emit(&bytes, a.out.out.as_deref(), Some(ctx))
}

fn verify_cmd(run: &Run, suite: SuiteArg, cutoff: usize, tol: f64, out: Option<&Path>) -> Result<(), CliError> {
    if cutoff > run.precision.max_cutoff {
        return Err(input(format!("--cutoff {cutoff} exceeds the ceiling {}", run.precision.max_cutoff)));
    }
    let suite = match suite {
        SuiteArg::Algebra => Suite::Algebra,
        SuiteArg::Eigen => Suite::Eigen,
        SuiteArg::Identity => Suite::Identity,
        SuiteArg::Phase => Suite::Phase,
        SuiteArg::Uncertainty => Suite::Uncertainty,
        SuiteArg::Contraction => Suite::Contraction,
        SuiteArg::All => Suite::All,
    };
    let report = verify::run_suite(suite, &VerifyOptions { cutoff, tol })?;
    run.emit(&json_bytes(&report)?, out, None)?;
    let failed = report.failures().count();
    eprintln!("verify {suite}: {} checks, {failed} failed", report.checks.len());
    for f in report.failures() {
        eprintln!("  FAIL {}: deviation {:?}, threshold {:e}", f.name, f.deviation, f.threshold);
    }
    if failed > 0 {
        Err(CliError::VerifyFailed(failed))
    } else {
        Ok(())
    }
}

fn contract(run: &Run, from: u32, to: u32, step: u32, out: &OutputArgs) -> Result<(), CliError> {
    if from == 0 || to < from || step == 0 {
        return Err(input("contraction needs 1 <= from <= to and step >= 1"));
    }
    let sigmas: Vec<u32> = (from..=to).step_by(step as usize).collect();
    let reports: Vec<_> = sigmas.par_iter().map(|&s| contraction_report(s)).collect::<Result<_, _>>()?;
    let mut table = Table::new(["sigma", "abs_z", "mean_ratio", "var_ratio", "g2_gap", "fidelity"]);
    for r in reports {
        table.push(vec![
            Cell::Int(r.sigma as i64),
            Cell::Num(r.abs_z),
            Cell::Num(r.mean_ratio),
            Cell::Num(r.var_ratio),
            Cell::Num(r.g2_gap),
            Cell::Num(r.fidelity),
        ]);
    }
    let bytes = table.render(out.format, "contract", json!({ "from": from, "to": to, "step": step }))?;
    run.emit(&bytes, out.out.as_deref(), None)
}

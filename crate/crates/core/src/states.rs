//! State families, their number-state amplitudes, overlaps and phase
//! representation functions `Θ(θ) = Σ_n C_n e^{-inθ}`.
//!
//! Amplitude phase conventions:
//!
//! * `|k, ζ⟩`: `C_n ∝ ζⁿ`.
//! * `|k, z⟩`: `C_n ∝ z^{k-1/2} zⁿ` with the principal branch of `z^{k-1/2}`,
//!   i.e. the global phase `(k - 1/2) arg z`, `arg z ∈ (-π, π]`.
//! * `|z, σ⟩₋`: `C_n ∝ z^{n-|σ|}`.
//! * `|z, σ⟩₊`: `C_n ∝ z^{n+σ}`.
//! * Glauber `|α⟩`: `C_n ∝ αⁿ`.
//!
//! Probabilities, `𝓜_n` and every variance depend only on `|C_n|` and the
//! relative phases `e^{inφ̄}`, so none of the conventions leak into results.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specialfn::{self, log_factorial};
use crate::{Error, Result, DEFAULT_MAX_CUTOFF};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bargmann index `k ∈ {1/2, 1, 3/2, …}`, stored as `2k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Bargmann {
    twice: u32,
}

impl Bargmann {
    pub const HALF: Bargmann = Bargmann { twice: 1 };
    pub const ONE: Bargmann = Bargmann { twice: 2 };

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpec("Bargmann index k must be at least 1/2".into()));
        }
        Ok(Bargmann { twice })
    }

    /// `2k`.
    pub fn twice(self) -> u32 {
        self.twice
    }

    /// `ν = 2k - 1`, the order of the Bessel function normalizing `|k, z⟩`.
    pub fn nu(self) -> u32 {
        self.twice - 1
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_half(self) -> bool {
        self.twice == 1
    }
}

impl fmt::Display for Bargmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for Bargmann {
    type Err = Error;

    /// Accepts `"p/2"` and integers `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("k must be a positive half-integer like 1/2 or 3, got {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "2" => Bargmann::from_twice(num),
                    "1" => Bargmann::from_twice(num.checked_mul(2).ok_or_else(bad)?),
                    _ => Err(bad()),
                }
            }
            None => {
                let v: u32 = s.parse().map_err(|_| bad())?;
                Bargmann::from_twice(v.checked_mul(2).ok_or_else(bad)?)
            }
        }
    }
}

impl From<Bargmann> for String {
    fn from(k: Bargmann) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for Bargmann {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// The state families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Su11cs,
    Bg,
    Pminus,
    Pplus,
    Glauber,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Su11cs, Family::Bg, Family::Pminus, Family::Pplus, Family::Glauber];

    pub fn name(self) -> &'static str {
        match self {
            Family::Su11cs => "su11cs",
            Family::Bg => "bg",
            Family::Pminus => "pminus",
            Family::Pplus => "pplus",
            Family::Glauber => "glauber",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "unknown family {s:?}; expected one of su11cs, bg, pminus, pplus, glauber"
                ))
            })
    }
}

/// A state family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum StateSpec {
    /// `|k, ζ⟩`, `|ζ| < 1`.
    #[serde(rename = "su11cs")]
    Su11Coherent { k: Bargmann, zeta: Complex64 },
    /// `|k, z⟩`, eigenstate of `K₋(k)`.
    #[serde(rename = "bg")]
    BarutGirardello { k: Bargmann, z: Complex64 },
    /// `|z, σ⟩₋`, `σ ≤ 0`.
    #[serde(rename = "pminus")]
    PhilophaseMinus { z: Complex64, sigma: i64 },
    /// `|z, σ⟩₊`, `σ ≥ 0`.
    #[serde(rename = "pplus")]
    PhilophasePlus { z: Complex64, sigma: i64 },
    #[serde(rename = "glauber")]
    Glauber { alpha: Complex64 },
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Su11Coherent { k, zeta } => write!(f, "su11cs(k={k}, zeta={zeta})"),
            StateSpec::BarutGirardello { k, z } => write!(f, "bg(k={k}, z={z})"),
            StateSpec::PhilophaseMinus { z, sigma } => write!(f, "pminus(z={z}, sigma={sigma})"),
            StateSpec::PhilophasePlus { z, sigma } => write!(f, "pplus(z={z}, sigma={sigma})"),
            StateSpec::Glauber { alpha } => write!(f, "glauber(alpha={alpha})"),
        }
    }
}

fn finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

fn arg_or_zero(c: Complex64) -> f64 {
    if c == ZERO {
        0.0
    } else {
        c.arg()
    }
}

impl StateSpec {
    pub fn family(&self) -> Family {
        match self {
            StateSpec::Su11Coherent { .. } => Family::Su11cs,
            StateSpec::BarutGirardello { .. } => Family::Bg,
            StateSpec::PhilophaseMinus { .. } => Family::Pminus,
            StateSpec::PhilophasePlus { .. } => Family::Pplus,
            StateSpec::Glauber { .. } => Family::Glauber,
        }
    }

    /// The complex label: `ζ`, `z` or `α`.
    pub fn parameter(&self) -> Complex64 {
        match *self {
            StateSpec::Su11Coherent { zeta, .. } => zeta,
            StateSpec::BarutGirardello { z, .. }
            | StateSpec::PhilophaseMinus { z, .. }
            | StateSpec::PhilophasePlus { z, .. } => z,
            StateSpec::Glauber { alpha } => alpha,
        }
    }

    /// The same state with its complex label replaced.
    pub fn with_parameter(&self, c: Complex64) -> StateSpec {
        match *self {
            StateSpec::Su11Coherent { k, .. } => StateSpec::Su11Coherent { k, zeta: c },
            StateSpec::BarutGirardello { k, .. } => StateSpec::BarutGirardello { k, z: c },
            StateSpec::PhilophaseMinus { sigma, .. } => StateSpec::PhilophaseMinus { z: c, sigma },
            StateSpec::PhilophasePlus { sigma, .. } => StateSpec::PhilophasePlus { z: c, sigma },
            StateSpec::Glauber { .. } => StateSpec::Glauber { alpha: c },
        }
    }

    pub fn modulus(&self) -> f64 {
        self.parameter().norm()
    }

    /// `φ̄`, the argument of the complex label (0 at the origin).
    pub fn mean_phase(&self) -> f64 {
        arg_or_zero(self.parameter())
    }

    pub fn bargmann(&self) -> Option<Bargmann> {
        match *self {
            StateSpec::Su11Coherent { k, .. } | StateSpec::BarutGirardello { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn sigma(&self) -> Option<i64> {
        match *self {
            StateSpec::PhilophaseMinus { sigma, .. } | StateSpec::PhilophasePlus { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.parameter();
        if !finite(c) {
            return Err(Error::InvalidSpec(format!("{self}: complex parameter must be finite")));
        }
        match *self {
            StateSpec::Su11Coherent { zeta, .. } if zeta.norm() >= 1.0 => Err(Error::InvalidSpec(format!(
                "|zeta| must be < 1 (the coherent states live in the open unit disk), got {}",
                zeta.norm()
            ))),
            StateSpec::PhilophaseMinus { sigma, .. } if sigma > 0 => Err(Error::InvalidSpec(format!(
                "pminus needs sigma <= 0, got {sigma}"
            ))),
            StateSpec::PhilophasePlus { sigma, .. } if sigma < 0 => Err(Error::InvalidSpec(format!(
                "pplus needs sigma >= 0, got {sigma}"
            ))),
            StateSpec::PhilophaseMinus { sigma, .. } | StateSpec::PhilophasePlus { sigma, .. }
                if sigma.unsigned_abs() > specialfn::MAX_BESSEL_ORDER as u64 =>
            {
                Err(Error::InvalidSpec(format!("|sigma| = {} is too large", sigma.unsigned_abs())))
            }
            StateSpec::BarutGirardello { k, .. } | StateSpec::Su11Coherent { k, .. }
                if k.twice() > specialfn::MAX_BESSEL_ORDER =>
            {
                Err(Error::InvalidSpec(format!("k = {k} is too large")))
            }
            _ => Ok(()),
        }
    }

    /// `Some(n)` when the state is exactly the number state `|n⟩`.
    pub fn exact_number_state(&self) -> Option<usize> {
        if self.parameter() != ZERO {
            return None;
        }
        match *self {
            StateSpec::PhilophaseMinus { sigma, .. } => Some(sigma.unsigned_abs() as usize),
            _ => Some(0),
        }
    }

    /// `ln |C_first|`, the index `first` of the first nonzero amplitude and
    /// the recurrence `ln |C_{n+1} / C_n|`. Requires a nonzero parameter.
    fn ladder(&self) -> Result<Ladder> {
        let c = self.parameter();
        let y = c.norm();
        let ln_y = y.ln();
        let phi = arg_or_zero(c);
        Ok(match *self {
            StateSpec::Su11Coherent { k, .. } => {
                let tk = k.twice() as f64;
                Ladder {
                    first: 0,
                    ln_first: 0.5 * tk * (-y * y).ln_1p(),
                    global_phase: 0.0,
                    phi,
                    step: LadderStep::Su11 { ln_y, tk },
                }
            }
            StateSpec::BarutGirardello { k, .. } => {
                let nu = k.nu();
                Ladder {
                    first: 0,
                    ln_first: 0.5 * nu as f64 * ln_y
                        - 0.5 * specialfn::log_bessel_i(nu, 2.0 * y)?
                        - 0.5 * log_factorial(nu as u64),
                    global_phase: 0.5 * nu as f64 * phi,
                    phi,
                    step: LadderStep::Bg { ln_y, nu: nu as f64 },
                }
            }
            StateSpec::PhilophaseMinus { sigma, .. } => {
                let s = sigma.unsigned_abs() as usize;
                Ladder {
                    first: s,
                    ln_first: -0.5 * specialfn::log_bessel_i(0, 2.0 * y)?,
                    global_phase: -(s as f64) * phi,
                    phi,
                    step: LadderStep::Minus { ln_y, s: s as f64 },
                }
            }
            StateSpec::PhilophasePlus { sigma, .. } => {
                let s = sigma as u64;
                Ladder {
                    first: 0,
                    ln_first: s as f64 * ln_y
                        - log_factorial(s)
                        - 0.5 * specialfn::log_bessel_i_tail(0, y, s)?,
                    global_phase: s as f64 * phi,
                    phi,
                    step: LadderStep::Plus { ln_y, s: s as f64 },
                }
            }
            StateSpec::Glauber { .. } => Ladder {
                first: 0,
                ln_first: -0.5 * y * y,
                global_phase: 0.0,
                phi,
                step: LadderStep::Glauber { ln_y },
            },
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum LadderStep {
    Su11 { ln_y: f64, tk: f64 },
    Bg { ln_y: f64, nu: f64 },
    Minus { ln_y: f64, s: f64 },
    Plus { ln_y: f64, s: f64 },
    Glauber { ln_y: f64 },
}

#[derive(Clone, Copy, Debug)]
struct Ladder {
    first: usize,
    ln_first: f64,
    global_phase: f64,
    phi: f64,
    step: LadderStep,
}

impl Ladder {
    /// `ln |C_{n+1} / C_n|` for `n ≥ first`.
    fn ln_ratio(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.step {
            LadderStep::Su11 { ln_y, tk } => ln_y + 0.5 * ((n + tk) / (n + 1.0)).ln(),
            LadderStep::Bg { ln_y, nu } => ln_y - 0.5 * ((n + 1.0) * (n + nu + 1.0)).ln(),
            LadderStep::Minus { ln_y, s } => ln_y - (n - s + 1.0).ln(),
            LadderStep::Plus { ln_y, s } => ln_y - (n + s + 1.0).ln(),
            LadderStep::Glauber { ln_y } => ln_y - 0.5 * (n + 1.0).ln(),
        }
    }

    fn phase(&self, n: usize) -> f64 {
        self.global_phase + n as f64 * self.phi
    }

    fn amplitude(&self, n: usize, ln_mag: f64) -> Complex64 {
        Complex64::from_polar(ln_mag.exp(), self.phase(n))
    }

    /// `ln |C_n|` by closed form rather than by running the recurrence.
    fn ln_magnitude(&self, n: usize) -> f64 {
        if n < self.first {
            return f64::NEG_INFINITY;
        }
        let m = (n - self.first) as u64;
        let nn = n as u64;
        match self.step {
            LadderStep::Su11 { ln_y, tk } => {
                let tk = tk as u64;
                self.ln_first
                    + m as f64 * ln_y
                    + 0.5 * (log_factorial(nn + tk - 1) - log_factorial(nn) - log_factorial(tk - 1))
            }
            LadderStep::Bg { ln_y, nu } => {
                let nu = nu as u64;
                self.ln_first + m as f64 * ln_y
                    - 0.5 * (log_factorial(nn) + log_factorial(nn + nu) - log_factorial(nu))
            }
            LadderStep::Minus { ln_y, .. } => self.ln_first + m as f64 * ln_y - log_factorial(m),
            LadderStep::Plus { ln_y, s } => {
                let s = s as u64;
                self.ln_first + m as f64 * ln_y - log_factorial(nn + s) + log_factorial(s)
            }
            LadderStep::Glauber { ln_y } => self.ln_first + m as f64 * ln_y - 0.5 * log_factorial(nn),
        }
    }
}

/// Number-state amplitudes `C_0 … C_N` with the mass left beyond `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockAmplitudes {
    coefficients: Vec<Complex64>,
    tail_mass: f64,
}

impl FockAmplitudes {
    /// Wrap an explicit amplitude vector with no recorded tail.
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Result<Self> {
        FockAmplitudes::with_tail(coefficients, 0.0)
    }

    pub fn with_tail(coefficients: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("amplitude vector must not be empty".into()));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::Domain(format!("tail mass must be non-negative, got {tail_mass}")));
        }
        Ok(FockAmplitudes { coefficients, tail_mass })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `N`, the largest retained photon number.
    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Σ_{n > N} |C_n|²`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `Σ_{n ≤ N} |C_n|²`.
    pub fn retained_mass(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `C_n`, zero beyond the cutoff.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coefficients.get(n).copied().unwrap_or(ZERO)
    }

    /// The same amplitudes padded with zeros or truncated to cutoff `n`.
    pub fn resized(&self, n: usize) -> FockAmplitudes {
        let mut c = self.coefficients.clone();
        let dropped: f64 = c.iter().skip(n + 1).map(|a| a.norm_sqr()).sum();
        c.resize(n + 1, ZERO);
        FockAmplitudes { coefficients: c, tail_mass: self.tail_mass + dropped }
    }
}

fn number_state(n: usize) -> FockAmplitudes {
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    FockAmplitudes { coefficients: c, tail_mass: 0.0 }
}

/// Amplitudes with the cutoff chosen so the tail mass stays below `tail_tol`.
pub fn amplitudes(spec: &StateSpec, tail_tol: f64) -> Result<FockAmplitudes> {
    amplitudes_with_ceiling(spec, tail_tol, DEFAULT_MAX_CUTOFF)
}

/// As [`amplitudes`] with an explicit cutoff ceiling.
pub fn amplitudes_with_ceiling(spec: &StateSpec, tail_tol: f64, ceiling: usize) -> Result<FockAmplitudes> {
    spec.validate()?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::Domain(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
    }
    if let Some(n) = spec.exact_number_state() {
        if n > ceiling {
            return Err(Error::CutoffExceeded { ceiling, what: format!("reaching |{n}⟩") });
        }
        return Ok(number_state(n));
    }
    let ladder = spec.ladder()?;
    let mut coefficients = vec![ZERO; ladder.first];
    let mut ln = ladder.ln_first;
    let mut n = ladder.first;
    loop {
        if n > ceiling {
            return Err(Error::CutoffExceeded {
                ceiling,
                what: format!("the tail of {spec} fell below {tail_tol:e}"),
            });
        }
        coefficients.push(ladder.amplitude(n, ln));
        let next_sq = (2.0 * (ln + ladder.ln_ratio(n))).exp();
        let r = (2.0 * ladder.ln_ratio(n + 1)).exp();
        if r < 1.0 && next_sq / (1.0 - r) <= tail_tol {
            ln += ladder.ln_ratio(n);
            let tail_mass = tail_from(&ladder, n + 1, ln);
            return Ok(FockAmplitudes { coefficients, tail_mass });
        }
        ln += ladder.ln_ratio(n);
        n += 1;
    }
}

/// Amplitudes up to exactly `cutoff`.
pub fn amplitudes_with_cutoff(spec: &StateSpec, cutoff: usize) -> Result<FockAmplitudes> {
    spec.validate()?;
    if let Some(n) = spec.exact_number_state() {
        let mut c = vec![ZERO; cutoff + 1];
        if n <= cutoff {
            c[n] = ONE;
            return Ok(FockAmplitudes { coefficients: c, tail_mass: 0.0 });
        }
        return Ok(FockAmplitudes { coefficients: c, tail_mass: 1.0 });
    }
    let ladder = spec.ladder()?;
    let mut coefficients = vec![ZERO; (ladder.first).min(cutoff + 1)];
    let mut ln = ladder.ln_first;
    let mut n = ladder.first;
    while n <= cutoff {
        coefficients.push(ladder.amplitude(n, ln));
        ln += ladder.ln_ratio(n);
        n += 1;
    }
    let tail_mass = if n == ladder.first && cutoff < ladder.first {
        1.0
    } else {
        tail_from(&ladder, n, ln)
    };
    Ok(FockAmplitudes { coefficients, tail_mass })
}

/// `Σ_{m ≥ start} |C_m|²` given `ln |C_start|`.
fn tail_from(ladder: &Ladder, start: usize, ln_start: f64) -> f64 {
    let mut ln = ln_start;
    let mut sum = 0.0;
    let mut n = start;
    loop {
        let term = (2.0 * ln).exp();
        sum += term;
        let r = (2.0 * ladder.ln_ratio(n)).exp();
        if term == 0.0 || (r < 1.0 && term * r / (1.0 - r) <= 1e-17 * sum) || n > start + 10_000_000 {
            return sum;
        }
        ln += ladder.ln_ratio(n);
        n += 1;
    }
}

/// Closed-form `C_n`, independent of any cutoff.
pub fn amplitude_at(spec: &StateSpec, n: usize) -> Result<Complex64> {
    spec.validate()?;
    if let Some(m) = spec.exact_number_state() {
        return Ok(if m == n { ONE } else { ZERO });
    }
    let ladder = spec.ladder()?;
    let ln = ladder.ln_magnitude(n);
    if ln == f64::NEG_INFINITY {
        return Ok(ZERO);
    }
    Ok(ladder.amplitude(n, ln))
}

/// `⟨spec1 | spec2⟩` in closed form.
pub fn overlap(spec1: &StateSpec, spec2: &StateSpec) -> Result<Complex64> {
    spec1.validate()?;
    spec2.validate()?;
    let mismatch = || Error::FamilyMismatch(format!("cannot form ⟨{spec1}|{spec2}⟩ in closed form"));
    if spec1.family() != spec2.family()
        || spec1.bargmann() != spec2.bargmann()
        || spec1.sigma() != spec2.sigma()
    {
        return Err(mismatch());
    }
    if let Some(n) = spec1.exact_number_state() {
        return Ok(amplitude_at(spec2, n)?);
    }
    if let Some(n) = spec2.exact_number_state() {
        return Ok(amplitude_at(spec1, n)?.conj());
    }
    let a = spec1.parameter();
    let b = spec2.parameter();
    let u = a.conj() * b;
    let (ya, yb) = (a.norm(), b.norm());
    Ok(match *spec1 {
        StateSpec::Su11Coherent { k, .. } => {
            let tk = k.twice() as f64;
            let ln_norm = 0.5 * tk * ((-ya * ya).ln_1p() + (-yb * yb).ln_1p());
            (ONE - u).powf(-tk) * ln_norm.exp()
        }
        StateSpec::BarutGirardello { k, .. } => {
            let nu = k.nu();
            let ln_pre = 0.5 * nu as f64 * (ya.ln() + yb.ln())
                - 0.5 * (specialfn::log_bessel_i(nu, 2.0 * ya)? + specialfn::log_bessel_i(nu, 2.0 * yb)?);
            let phase = Complex64::from_polar(1.0, 0.5 * nu as f64 * (b.arg() - a.arg()));
            specialfn::bessel_entire_tail(nu, u, 0) * phase * ln_pre.exp()
        }
        StateSpec::PhilophaseMinus { .. } => {
            let ln_pre = -0.5 * (specialfn::log_bessel_i(0, 2.0 * ya)? + specialfn::log_bessel_i(0, 2.0 * yb)?);
            specialfn::bessel_entire_tail(0, u, 0) * ln_pre.exp()
        }
        StateSpec::PhilophasePlus { sigma, .. } => {
            let s = sigma as u64;
            let ln_pre = -0.5
                * (specialfn::log_bessel_i_tail(0, ya, s)? + specialfn::log_bessel_i_tail(0, yb, s)?);
            specialfn::bessel_entire_tail(0, u, s) * ln_pre.exp()
        }
        StateSpec::Glauber { .. } => (u - 0.5 * (ya * ya + yb * yb)).exp(),
    })
}

/// `ζ = -tanh(τ/2) e^{-iφ}`, the unit-disk label of the group element with
/// hyperbolic angle `τ` and azimuth `φ`.
pub fn disk_param(tau: f64, varphi: f64) -> Complex64 {
    Complex64::from_polar(-(0.5 * tau).tanh(), -varphi)
}

#[derive(Clone, Copy, Debug)]
enum ClosedTheta {
    /// `√(1-|ζ|²) / (1 - ζ e^{-iθ})`.
    Geometric { zeta: Complex64 },
    /// `e^{-isθ} exp(z e^{-iθ}) / √I₀(2|z|)`.
    Exponential { z: Complex64, shift: u64, ln_norm: f64 },
    /// `e^{iσθ} [exp(w) - Σ_{m<σ} w^m/m!] / √T₀`, `w = z e^{-iθ}`.
    TruncatedExponential { z: Complex64, sigma: u64, ln_norm: f64 },
}

/// The phase representation function `Θ(θ) = Σ_n C_n e^{-inθ}` of a state.
#[derive(Clone, Debug)]
pub struct ThetaFunction {
    spec: StateSpec,
    amps: FockAmplitudes,
    closed: Option<ClosedTheta>,
}

/// Build `Θ` for `spec`, with a closed form for `k = 1/2` and the philophase
/// families, and the truncated Fourier series otherwise.
pub fn theta_function(spec: &StateSpec) -> Result<ThetaFunction> {
    theta_function_with_tol(spec, 1e-28)
}

pub fn theta_function_with_tol(spec: &StateSpec, tail_tol: f64) -> Result<ThetaFunction> {
    let amps = amplitudes(spec, tail_tol)?;
    let closed = match *spec {
        StateSpec::Su11Coherent { k, zeta } if k.is_half() => Some(ClosedTheta::Geometric { zeta }),
        StateSpec::BarutGirardello { k, z } if k.is_half() => Some(ClosedTheta::Exponential {
            z,
            shift: 0,
            ln_norm: -0.5 * specialfn::log_bessel_i(0, 2.0 * z.norm())?,
        }),
        StateSpec::PhilophaseMinus { z, sigma } => Some(ClosedTheta::Exponential {
            z,
            shift: sigma.unsigned_abs(),
            ln_norm: -0.5 * specialfn::log_bessel_i(0, 2.0 * z.norm())?,
        }),
        StateSpec::PhilophasePlus { z, sigma } if z != ZERO => Some(ClosedTheta::TruncatedExponential {
            z,
            sigma: sigma as u64,
            ln_norm: -0.5 * specialfn::log_bessel_i_tail(0, z.norm(), sigma as u64)?,
        }),
        _ => None,
    };
    Ok(ThetaFunction { spec: *spec, amps, closed })
}

impl ThetaFunction {
    pub fn spec(&self) -> &StateSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &FockAmplitudes {
        &self.amps
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    /// `Θ(θ)`, by closed form when available.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.eval_closed(theta).unwrap_or_else(|| self.eval_series(theta))
    }

    /// `Θ(θ)` from the truncated Fourier series of the amplitudes.
    pub fn eval_series(&self, theta: f64) -> Complex64 {
        theta_series(&self.amps, theta)
    }

    pub fn eval_closed(&self, theta: f64) -> Option<Complex64> {
        let rot = Complex64::from_polar(1.0, -theta);
        Some(match self.closed? {
            ClosedTheta::Geometric { zeta } => Complex64::new((1.0 - zeta.norm_sqr()).sqrt(), 0.0) / (ONE - zeta * rot),
            ClosedTheta::Exponential { z, shift, ln_norm } => {
                (z * rot + ln_norm).exp() * Complex64::from_polar(1.0, -(shift as f64) * theta)
            }
            ClosedTheta::TruncatedExponential { z, sigma, ln_norm } => {
                let w = z * rot;
                truncated_exp(w, sigma, ln_norm) * Complex64::from_polar(1.0, sigma as f64 * theta)
            }
        })
    }

    /// Fourier coefficient of `e^{-inθ}`: `C_n` for `n ≥ 0`, zero otherwise.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        if n < 0 {
            ZERO
        } else {
            self.amps.get(n as usize)
        }
    }
}

/// `Σ_n C_n e^{-inθ}`.
pub fn theta_series(amps: &FockAmplitudes, theta: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, -theta);
    amps.coefficients().iter().rev().fold(ZERO, |acc, &c| acc * rot + c)
}

/// `e^{ln_norm} Σ_{m ≥ sigma} w^m / m!`.
fn truncated_exp(w: Complex64, sigma: u64, ln_norm: f64) -> Complex64 {
    let aw = w.norm();
    if aw > sigma as f64 + 1.0 {
        let mut partial = ZERO;
        let mut term = Complex64::new(ln_norm.exp(), 0.0);
        for m in 0..sigma {
            partial += term;
            term = term * w / (m as f64 + 1.0);
        }
        (w + ln_norm).exp() - partial
    } else {
        let lead_ln = sigma as f64 * aw.ln() - log_factorial(sigma) + ln_norm;
        let mut term = Complex64::from_polar(lead_ln.exp(), sigma as f64 * w.arg());
        let mut sum = term;
        let mut m = sigma as f64;
        loop {
            term = term * w / (m + 1.0);
            sum += term;
            m += 1.0;
            let r = aw / (m + 1.0);
            if term.norm() * r / (1.0 - r) <= 1e-17 * sum.norm().max(f64::MIN_POSITIVE) || term == ZERO {
                return sum;
            }
        }
    }
}

/// The standard grid of parameter points used by the verification suites:
/// twelve points for each of the four SU(1,1)-related families.
pub fn standard_grid() -> Vec<StateSpec> {
    let mut grid = Vec::new();
    let ks = [1u32, 2, 3, 4].map(|t| Bargmann::from_twice(t).unwrap());
    let args = |i: usize| -2.9 + 0.53 * i as f64;
    let mut i = 0;
    for k in ks {
        for r in [0.2, 0.5, 0.8] {
            grid.push(StateSpec::Su11Coherent { k, zeta: Complex64::from_polar(r, args(i)) });
            i += 1;
        }
    }
    for k in ks {
        for r in [0.5, 2.0, 6.0] {
            grid.push(StateSpec::BarutGirardello { k, z: Complex64::from_polar(r, args(i)) });
            i += 1;
        }
    }
    for sigma in [0, -1, -2, -4] {
        for r in [0.5, 2.0, 6.0] {
            grid.push(StateSpec::PhilophaseMinus { z: Complex64::from_polar(r, args(i % 11)), sigma });
            i += 1;
        }
    }
    for sigma in [0, 1, 2, 4] {
        for r in [0.5, 2.0, 6.0] {
            grid.push(StateSpec::PhilophasePlus { z: Complex64::from_polar(r, args(i % 11)), sigma });
            i += 1;
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bargmann_parsing() {
        assert_eq!("1/2".parse::<Bargmann>().unwrap(), Bargmann::HALF);
        assert_eq!("2".parse::<Bargmann>().unwrap().twice(), 4);
        assert_eq!("3/2".parse::<Bargmann>().unwrap().to_string(), "3/2");
        assert_eq!("4/2".parse::<Bargmann>().unwrap().to_string(), "2");
        assert!("0".parse::<Bargmann>().is_err());
        assert!("1/3".parse::<Bargmann>().is_err());
        assert!("0.5".parse::<Bargmann>().is_err());
    }

    #[test]
    fn validation() {
        assert!(StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: c(1.0, 0.0) }.validate().is_err());
        assert!(StateSpec::PhilophaseMinus { z: c(1.0, 0.0), sigma: 1 }.validate().is_err());
        assert!(StateSpec::PhilophasePlus { z: c(1.0, 0.0), sigma: -1 }.validate().is_err());
        assert!(StateSpec::Glauber { alpha: c(f64::NAN, 0.0) }.validate().is_err());
        assert!(StateSpec::BarutGirardello { k: Bargmann::ONE, z: c(30.0, 1.0) }.validate().is_ok());
    }

    #[test]
    fn vacuum_and_number_states_are_exact() {
        let a = amplitudes(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: ZERO }, 1e-12).unwrap();
        assert_eq!(a.coefficients(), &[ONE]);
        let a = amplitudes(&StateSpec::PhilophaseMinus { z: ZERO, sigma: -3 }, 1e-12).unwrap();
        assert_eq!(a.cutoff(), 3);
        assert_eq!(a.get(3), ONE);
        assert_eq!(a.tail_mass(), 0.0);
    }

    #[test]
    fn normalization_and_tail_bound() {
        for spec in standard_grid() {
            let a = amplitudes(&spec, 1e-12).unwrap();
            assert!(a.tail_mass() <= 1e-12, "{spec}");
            assert!((a.retained_mass() + a.tail_mass() - 1.0).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn closed_amplitudes_match_recurrence() {
        for spec in standard_grid() {
            let a = amplitudes(&spec, 1e-12).unwrap();
            for n in 0..a.cutoff().min(40) {
                let closed = amplitude_at(&spec, n).unwrap();
                assert!((closed - a.get(n)).norm() < 1e-12, "{spec} n={n}");
            }
        }
    }

    #[test]
    fn pminus_vanishes_below_sigma() {
        let a = amplitudes(&StateSpec::PhilophaseMinus { z: c(0.7, 0.4), sigma: -4 }, 1e-12).unwrap();
        for n in 0..4 {
            assert_eq!(a.get(n), ZERO);
        }
        assert!(a.get(4).norm() > 0.0);
    }

    #[test]
    fn philophase_recursion() {
        let z = c(1.3, -0.6);
        for sigma in [0i64, 2, 5] {
            let a = amplitudes(&StateSpec::PhilophasePlus { z, sigma }, 1e-14).unwrap();
            for n in 0..a.cutoff() {
                let expect = z * a.get(n) / (n as f64 + sigma as f64 + 1.0);
                assert!((a.get(n + 1) - expect).norm() <= 1e-12 * expect.norm().max(1e-300), "n={n}");
            }
        }
        for sigma in [0i64, -2] {
            let a = amplitudes(&StateSpec::PhilophaseMinus { z, sigma }, 1e-14).unwrap();
            for n in sigma.unsigned_abs() as usize..a.cutoff() {
                let expect = z * a.get(n) / (n as f64 + sigma as f64 + 1.0);
                assert!((a.get(n + 1) - expect).norm() <= 1e-12 * expect.norm(), "n={n}");
            }
        }
    }

    #[test]
    fn self_overlap_is_one() {
        for spec in standard_grid() {
            let o = overlap(&spec, &spec).unwrap();
            assert!((o - ONE).norm() < 1e-12, "{spec}: {o}");
        }
    }

    #[test]
    fn overlap_of_mismatched_families_fails() {
        let a = StateSpec::Glauber { alpha: ONE };
        let b = StateSpec::BarutGirardello { k: Bargmann::HALF, z: ONE };
        assert!(matches!(overlap(&a, &b), Err(Error::FamilyMismatch(_))));
        let c1 = StateSpec::BarutGirardello { k: Bargmann::ONE, z: ONE };
        assert!(overlap(&c1, &b).is_err());
    }

    #[test]
    fn bg_overlap_with_opposite_point() {
        // √(z₁* z₂) = i, so the closed form is I₀(2i)/I₀(2) = J₀(2)/I₀(2).
        let a = StateSpec::BarutGirardello { k: Bargmann::HALF, z: c(1.0, 0.0) };
        let b = StateSpec::BarutGirardello { k: Bargmann::HALF, z: c(-1.0, 0.0) };
        let o = overlap(&a, &b).unwrap();
        let expect = 0.223_890_779_141_235_67 / specialfn::bessel_i(0, 2.0).unwrap();
        assert!((o - expect).norm() < 1e-14);
    }

    #[test]
    fn disk_param_values() {
        assert_eq!(disk_param(0.0, 1.3).norm(), 0.0);
        assert!(disk_param(50.0, 0.0).norm() <= 1.0);
        let z = disk_param(1.0, std::f64::consts::FRAC_PI_2);
        assert!((z - Complex64::new(0.0, 0.5f64.tanh())).norm() < 1e-15);
    }

    #[test]
    fn closed_theta_matches_series() {
        let specs = [
            StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: c(0.3, 0.5) },
            StateSpec::BarutGirardello { k: Bargmann::HALF, z: c(-1.2, 0.4) },
            StateSpec::PhilophaseMinus { z: c(0.8, 2.0), sigma: -3 },
            StateSpec::PhilophasePlus { z: c(0.2, 0.1), sigma: 3 },
            StateSpec::PhilophasePlus { z: c(4.0, -1.0), sigma: 2 },
        ];
        for spec in specs {
            let t = theta_function(&spec).unwrap();
            assert!(t.has_closed_form());
            for j in 0..37 {
                let th = -3.0 + 0.17 * j as f64;
                let (a, b) = (t.eval_closed(th).unwrap(), t.eval_series(th));
                assert!((a - b).norm() < 1e-8 * (1.0 + b.norm()), "{spec} θ={th}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pplus_sigma_zero_is_bg_half() {
        let z = c(0.9, -0.7);
        let p = theta_function(&StateSpec::PhilophasePlus { z, sigma: 0 }).unwrap();
        let b = theta_function(&StateSpec::BarutGirardello { k: Bargmann::HALF, z }).unwrap();
        for j in 0..20 {
            let th = 0.3 * j as f64;
            assert!((p.eval(th) - b.eval(th)).norm() < 1e-13);
        }
    }
}

//! Photon-number distribution, moments and `g⁽²⁾` in closed form.
//!
//! Bessel-normalized families use ratios such as `I_{ν+2}/I_ν` rather than
//! the textbook `⟨n̂²⟩` expressions. The two are equal by the recurrence
//! `I_{ν-1} - I_{ν+1} = (2ν/x) I_ν`, but the ratio form has no cancellation at
//! small `|z|`, where `g⁽²⁾` is most interesting.

use serde::Serialize;

use crate::specialfn::{self, log_factorial};
use crate::states::StateSpec;
use crate::{Error, Result};

/// First and second photon-number moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhotonStats {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub variance: f64,
    /// `(⟨n̂²⟩ - ⟨n̂⟩)/⟨n̂⟩²`; `None` when `⟨n̂⟩ = 0`.
    pub g2: Option<f64>,
}

impl PhotonStats {
    /// Assemble from `⟨n̂⟩`, the factorial moment `⟨n̂(n̂-1)⟩` and a variance.
    pub fn from_factorial(mean_n: f64, factorial2: f64, variance: f64) -> Self {
        PhotonStats {
            mean_n,
            mean_n2: factorial2 + mean_n,
            variance,
            g2: (mean_n > 0.0).then(|| factorial2 / (mean_n * mean_n)),
        }
    }

    /// Assemble from raw moments.
    pub fn from_moments(mean_n: f64, mean_n2: f64) -> Self {
        PhotonStats {
            mean_n,
            mean_n2,
            variance: (mean_n2 - mean_n * mean_n).max(0.0),
            g2: (mean_n > 0.0).then(|| (mean_n2 - mean_n) / (mean_n * mean_n)),
        }
    }
}

/// `P_n = |C_n|²` from the family's closed form.
pub fn photon_pdf(spec: &StateSpec, n: u64) -> Result<f64> {
    spec.validate()?;
    if let Some(m) = spec.exact_number_state() {
        return Ok(if m as u64 == n { 1.0 } else { 0.0 });
    }
    let y = spec.modulus();
    let ln_y = y.ln();
    let nf = n as f64;
    let ln_p = match *spec {
        StateSpec::Su11Coherent { k, .. } => {
            let tk = k.twice() as u64;
            tk as f64 * (-y * y).ln_1p() + log_factorial(n + tk - 1) - log_factorial(n)
                - log_factorial(tk - 1)
                + 2.0 * nf * ln_y
        }
        StateSpec::BarutGirardello { k, .. } => {
            let nu = k.nu();
            (2.0 * nf + nu as f64) * ln_y
                - specialfn::log_bessel_i(nu, 2.0 * y)?
                - log_factorial(n)
                - log_factorial(n + nu as u64)
        }
        StateSpec::PhilophaseMinus { sigma, .. } => {
            let s = sigma.unsigned_abs();
            if n < s {
                return Ok(0.0);
            }
            let m = n - s;
            2.0 * m as f64 * ln_y - specialfn::log_bessel_i(0, 2.0 * y)? - 2.0 * log_factorial(m)
        }
        StateSpec::PhilophasePlus { sigma, .. } => {
            let s = sigma as u64;
            2.0 * (nf + s as f64) * ln_y
                - specialfn::log_bessel_i_tail(0, y, s)?
                - 2.0 * log_factorial(n + s)
        }
        StateSpec::Glauber { .. } => -y * y + 2.0 * nf * ln_y - log_factorial(n),
    };
    Ok(ln_p.exp())
}

/// `⟨n̂⟩`, `⟨n̂²⟩`, `(Δn)²` and `g⁽²⁾` in closed form.
pub fn photon_stats(spec: &StateSpec) -> Result<PhotonStats> {
    spec.validate()?;
    if let Some(m) = spec.exact_number_state() {
        let m = m as f64;
        return Ok(PhotonStats::from_factorial(m, m * (m - 1.0), 0.0));
    }
    let y = spec.modulus();
    let x = 2.0 * y;
    Ok(match *spec {
        StateSpec::Su11Coherent { k, .. } => {
            let tk = k.twice() as f64;
            let q = y * y;
            let d = 1.0 - q;
            let mean = tk * q / d;
            PhotonStats::from_factorial(mean, tk * (tk + 1.0) * q * q / (d * d), tk * q / (d * d))
        }
        StateSpec::BarutGirardello { k, .. } => {
            let nu = k.nu();
            let r1 = specialfn::bessel_i_ratio(nu + 1, nu, x)?;
            let r2 = specialfn::bessel_i_ratio(nu + 2, nu, x)?;
            let mean = y * r1;
            let fact = y * y * r2;
            PhotonStats::from_factorial(mean, fact, fact + mean - mean * mean)
        }
        StateSpec::PhilophaseMinus { sigma, .. } => {
            let s = sigma.unsigned_abs() as f64;
            let r1 = specialfn::bessel_i_ratio(1, 0, x)?;
            let r2 = specialfn::bessel_i_ratio(2, 0, x)?;
            let mu = y * r1;
            let fact_m = y * y * r2;
            let variance = y * y * (1.0 - r1) * (1.0 + r1);
            PhotonStats::from_factorial(s + mu, fact_m + 2.0 * s * mu + s * (s - 1.0), variance)
        }
        StateSpec::PhilophasePlus { sigma, .. } => {
            let s = sigma as u64;
            let sf = s as f64;
            let ln_t0 = specialfn::log_bessel_i_tail(0, y, s)?;
            let ln_t1 = specialfn::log_bessel_i_tail(1, y, s.saturating_sub(1))?;
            let rho = y * tail_ratio(y, s, ln_t1, ln_t0)?;
            let extra = if s == 0 {
                0.0
            } else {
                (2.0 * sf * y.ln() - ln_t0 - 2.0 * log_factorial(s - 1)).exp()
            };
            let mean = rho - sf;
            let mean_n2 = sf * sf + y * y - 2.0 * sf * rho + extra;
            PhotonStats::from_factorial(mean, mean_n2 - mean, mean_n2 - mean * mean)
        }
        StateSpec::Glauber { .. } => {
            let q = y * y;
            PhotonStats::from_factorial(q, q * q, q)
        }
    })
}

/// `T₁/T₀`, computed from directly summed tails where they are representable.
fn tail_ratio(y: f64, s: u64, ln_t1: f64, ln_t0: f64) -> Result<f64> {
    let t0 = specialfn::bessel_i_tail(0, y, s)?;
    let t1 = specialfn::bessel_i_tail(1, y, s.saturating_sub(1))?;
    if t0.is_normal() && t1.is_normal() && t0.is_finite() && t1.is_finite() {
        Ok(t1 / t0)
    } else {
        Ok((ln_t1 - ln_t0).exp())
    }
}

/// Which asymptotic regime of `g⁽²⁾` to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `|z| → 0`.
    Quantum,
    /// `|z| → ∞`, leading order in `1/|z|`.
    Classical,
}

/// The limiting value of `g⁽²⁾` in the requested regime.
///
/// The classical limit is the leading-order expression `1 - 1/(2|z|)`, which
/// needs `z ≠ 0`. `|k, ζ⟩` has a `|ζ|`-independent `g⁽²⁾` and Glauber states a
/// constant one, so neither has a regime of this kind.
pub fn asymptotic_g2(spec: &StateSpec, regime: Regime) -> Result<f64> {
    spec.validate()?;
    let not_applicable = || Error::NotApplicable(format!("{spec} has no {regime:?} limit for g2"));
    match (spec, regime) {
        (StateSpec::Su11Coherent { .. } | StateSpec::Glauber { .. }, _) => Err(not_applicable()),
        (StateSpec::BarutGirardello { k, .. }, Regime::Quantum) => {
            let tk = k.twice() as f64;
            Ok(tk / (tk + 1.0))
        }
        (StateSpec::PhilophaseMinus { sigma, .. }, Regime::Quantum) => {
            let s = sigma.unsigned_abs() as f64;
            // σ = 0 is the k = 1/2 Barut–Girardello state.
            Ok(if s == 0.0 { 0.5 } else { 1.0 - 1.0 / s })
        }
        (StateSpec::PhilophasePlus { sigma, .. }, Regime::Quantum) => {
            let s = *sigma as f64;
            let r = (s + 1.0) / (s + 2.0);
            Ok(2.0 * r * r)
        }
        (_, Regime::Classical) => {
            let y = spec.modulus();
            if y == 0.0 {
                return Err(Error::Domain("the classical limit needs z != 0".into()));
            }
            Ok(1.0 - 0.5 / y)
        }
    }
}

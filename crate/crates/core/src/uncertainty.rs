//! Number–phase uncertainty functionals.
//!
//! * `𝒱 = (Δn)² ∗(Δφ)²∗ / [1 - 2πQ(θ₀)]²`
//! * `ℛ₁ = (Δn)² ∗(ΔC)²∗ / ⟨Ŝ⟩²`, `ℛ₂ = (Δn)² ∗(ΔS)²∗ / ⟨Ĉ⟩²`
//! * `𝒰 = (Δn)² (1 - 𝓜₁²) / 𝓜₁²`
//!
//! Each is bounded below by `1/4`. At the vacuum every denominator vanishes;
//! the functionals then report [`Error::Degenerate`] instead of a limit value.

use std::f64::consts::PI;

use serde::Serialize;

use crate::phase::{self, PhaseMoments, PhaseProfile};
use crate::specialfn;
use crate::states::StateSpec;
use crate::stats::{self, PhotonStats};
use crate::{Error, Precision, Result};

/// Denominators below this magnitude are treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

fn degenerate(what: &str, value: f64) -> Error {
    Error::Degenerate(format!("{what} = {value:e} is below the degeneracy threshold"))
}

/// `𝒱` from a variance and a phase profile at `θ₀ = φ̄ - π`.
pub fn v_from(var_n: f64, profile: &PhaseProfile) -> Result<f64> {
    let d = profile.boundary_deficit();
    if d.abs() < DEGENERACY_THRESHOLD {
        return Err(degenerate("1 - 2πQ(θ₀)", d));
    }
    Ok(var_n * PhaseMoments::from_profile(profile).var_phi / (d * d))
}

/// `(ℛ₁, ℛ₂)`, each flagged separately when its denominator degenerates.
pub fn r_from(var_n: f64, profile: &PhaseProfile) -> (Result<f64>, Result<f64>) {
    let mo = PhaseMoments::from_profile(profile);
    (
        r_component(var_n, mo.var_cos, mo.mean_sin, "⟨S⟩"),
        // The second functional is the first with cosine and sine interchanged.
        r_component(var_n, mo.var_sin, mo.mean_cos, "⟨C⟩"),
    )
}

fn r_component(var_n: f64, var_trig: f64, mean_other: f64, name: &str) -> Result<f64> {
    if mean_other.abs() < DEGENERACY_THRESHOLD {
        return Err(degenerate(name, mean_other));
    }
    Ok(var_n * var_trig / (mean_other * mean_other))
}

/// `𝒰` from a variance and a phase profile.
pub fn u_from(var_n: f64, profile: &PhaseProfile) -> Result<f64> {
    let m1 = profile.m(1);
    if m1 < DEGENERACY_THRESHOLD {
        return Err(degenerate("𝓜₁", m1));
    }
    Ok(var_n * (1.0 - m1 * m1) / (m1 * m1))
}

fn inputs(spec: &StateSpec, precision: &Precision) -> Result<(PhotonStats, PhaseProfile)> {
    precision.validate()?;
    let mut profile = phase::m_coefficients_with_ceiling(spec, precision.phase_tol, precision.max_cutoff)?;
    // Near the vacuum the boundary deficit is itself small, so the series
    // truncation has to be tight relative to it.
    let d = profile.boundary_deficit().abs();
    if d >= DEGENERACY_THRESHOLD && profile.truncation_bound() > precision.phase_tol * d {
        profile = phase::m_coefficients_with_ceiling(spec, precision.phase_tol * d, precision.max_cutoff)?;
    }
    Ok((stats::photon_stats(spec)?, profile))
}

pub fn v_function(spec: &StateSpec) -> Result<f64> {
    let (s, p) = inputs(spec, &Precision::default())?;
    v_from(s.variance, &p)
}

pub fn r_functions(spec: &StateSpec) -> Result<(Result<f64>, Result<f64>)> {
    let (s, p) = inputs(spec, &Precision::default())?;
    Ok(r_from(s.variance, &p))
}

pub fn u_function(spec: &StateSpec) -> Result<f64> {
    let (s, p) = inputs(spec, &Precision::default())?;
    u_from(s.variance, &p)
}

/// All functionals of one state. Degenerate entries are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub v: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub u: Option<f64>,
    pub q_at_theta0: f64,
    pub var_n: f64,
    pub var_phi: f64,
}

pub fn uncertainty_report(spec: &StateSpec, precision: &Precision) -> Result<UncertaintyReport> {
    let (s, p) = inputs(spec, precision)?;
    Ok(report_from(s.variance, &p))
}

pub fn report_from(var_n: f64, p: &PhaseProfile) -> UncertaintyReport {
    let (r1, r2) = r_from(var_n, p);
    UncertaintyReport {
        v: v_from(var_n, p).ok(),
        r1: r1.ok(),
        r2: r2.ok(),
        u: u_from(var_n, p).ok(),
        q_at_theta0: (1.0 - p.boundary_deficit()) / (2.0 * PI),
        var_n,
        var_phi: PhaseMoments::from_profile(p).var_phi,
    }
}

/// Antinormally ordered variances of `Σ̂₁ = n̂ - Re z Ĉ - Im z Ŝ` and
/// `Σ̂₂ = Re z Ŝ - Im z Ĉ`, and half the modulus of their commutator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntelligenceReport {
    pub var_sigma1: f64,
    pub var_sigma2: f64,
    pub half_commutator: f64,
}

impl IntelligenceReport {
    /// `var₁ var₂ / (½|⟨[Σ̂₁, Σ̂₂]⟩|)² - 1`.
    pub fn relative_gap(&self) -> f64 {
        let bound = self.half_commutator * self.half_commutator;
        self.var_sigma1 * self.var_sigma2 / bound - 1.0
    }
}

/// Evaluate the `Σ̂₁`, `Σ̂₂` uncertainty relation for `|z, σ⟩₋`.
///
/// The cross term `½⟨{n̂, Ĉ cos φ̄ + Ŝ sin φ̄}⟩` is reduced with the amplitude
/// recurrence `|C_{n-1} C_n| = (n - |σ|) |C_n|² / |z|`.
pub fn sigma_intelligence(spec: &StateSpec) -> Result<IntelligenceReport> {
    let StateSpec::PhilophaseMinus { z, sigma } = *spec else {
        return Err(Error::FamilyMismatch(format!("{spec} is not a pminus state")));
    };
    spec.validate()?;
    let y = z.norm();
    let s = sigma.unsigned_abs() as f64;
    let st = stats::photon_stats(spec)?;
    let (m1, m2) = if y == 0.0 {
        (0.0, 0.0)
    } else {
        (
            specialfn::bessel_i_ratio(1, 0, 2.0 * y)?,
            specialfn::bessel_i_ratio(2, 0, 2.0 * y)?,
        )
    };
    let anticomm = st.mean_n2 - (s + 0.5) * st.mean_n + 0.5 * s;
    let cov = anticomm - st.mean_n * y * m1;
    let var_proj = y * y * (0.5 * (1.0 + m2) - m1 * m1);
    Ok(IntelligenceReport {
        var_sigma1: st.variance - 2.0 * cov + var_proj,
        var_sigma2: 0.5 * y * y * (1.0 - m2),
        half_commutator: 0.5 * y * m1,
    })
}

/// Closed forms for `k = 1/2`, evaluated independently of the `𝓜_n` machinery.
pub mod closed {
    use super::*;
    use crate::quadrature;

    /// `Li₂(-x) = -∫₀^x ln(1+t)/t dt`.
    pub fn dilog_neg(x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        -quadrature::integrate(|t| if t == 0.0 { 1.0 } else { t.ln_1p() / t }, 0.0, x, 8, 24)
    }

    /// `𝒱(1/2, ζ) = [π²/3 + 4 Li₂(-|ζ|)] / [4 (1 - |ζ|)²]`.
    pub fn v_su11_half(abs_zeta: f64) -> f64 {
        (PI * PI / 3.0 + 4.0 * dilog_neg(abs_zeta)) / (4.0 * (1.0 - abs_zeta).powi(2))
    }

    /// `ℛ₁(1/2, ζ) = [2 (1 - |ζ|²) sin²φ̄]⁻¹`.
    pub fn r1_su11_half(abs_zeta: f64, phi: f64) -> f64 {
        1.0 / (2.0 * (1.0 - abs_zeta * abs_zeta) * phi.sin().powi(2))
    }

    /// `𝒱(1/2, z)` with the boundary value `Q(θ₀) = e^{-2|z|} / (2π I₀(2|z|))`.
    pub fn v_bg_half(abs_z: f64) -> Result<f64> {
        let x = 2.0 * abs_z;
        let i0 = specialfn::bessel_i(0, x)?;
        let r = specialfn::bessel_i(1, x)? / i0;
        let mut alt = 0.0;
        let mut n = 1u32;
        loop {
            let t = specialfn::bessel_i(n, x)? / i0 / (n as f64 * n as f64);
            alt += if n % 2 == 0 { t } else { -t };
            if t < 1e-18 {
                break;
            }
            n += 1;
        }
        let boundary = 1.0 - (-x).exp() / i0;
        Ok(abs_z * abs_z * (1.0 - r * r) * (PI * PI / 3.0 + 4.0 * alt) / (boundary * boundary))
    }

    /// `ℛ₁(1/2, z)`.
    pub fn r1_bg_half(abs_z: f64, phi: f64) -> Result<f64> {
        let x = 2.0 * abs_z;
        let i0 = specialfn::bessel_i(0, x)?;
        let r1 = specialfn::bessel_i(1, x)? / i0;
        let r2 = specialfn::bessel_i(2, x)? / i0;
        let (s, c) = phi.sin_cos();
        Ok(abs_z * abs_z / (s * s) * (1.0 / (r1 * r1) - 1.0) * (0.5 * (1.0 - r2) + c * c * (r2 - r1 * r1)))
    }
}

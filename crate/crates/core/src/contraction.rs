//! Contraction of `|z,σ⟩₊` to a Glauber coherent state along `|z| = 2σ`.
//!
//! For `σ ≫ 1` with `|z| ≈ 2σ` the photon distribution of the plus state
//! approaches a Poisson distribution of mean `σ`. The report tracks how far
//! the moments are from that limit and adds the state fidelity against the
//! coherent state `|α⟩` with `α = z / (2√σ) = √σ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::states::{self, StateSpec};
use crate::stats::photon_stats;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub sigma: u32,
    pub abs_z: f64,
    /// `⟨n̂⟩ / σ`.
    pub mean_ratio: f64,
    /// `(Δn)² / σ`.
    pub var_ratio: f64,
    /// `|g⁽²⁾ - 1|`.
    pub g2_gap: f64,
    /// `|⟨α|z,σ⟩₊|²`, summed from truncated amplitudes.
    pub fidelity: f64,
}

/// Evaluate the contraction quantities at `z = 2σ`.
pub fn contraction_report(sigma: u32) -> Result<ContractionReport> {
    if sigma == 0 {
        return Err(Error::Domain("contraction needs sigma >= 1".into()));
    }
    let s = sigma as f64;
    let z = Complex64::new(2.0 * s, 0.0);
    let plus = StateSpec::PhilophasePlus { z, sigma: sigma as i64 };
    let st = photon_stats(&plus)?;
    let g2 = st.g2.ok_or_else(|| Error::Degenerate("g2 undefined at zero mean".into()))?;

    let glauber = StateSpec::Glauber { alpha: Complex64::new(s.sqrt(), 0.0) };
    let a = states::amplitudes(&plus, 1e-16)?;
    let b = states::amplitudes(&glauber, 1e-16)?;
    let overlap: Complex64 = a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| x * y.conj()).sum();

    Ok(ContractionReport {
        sigma,
        abs_z: z.re,
        mean_ratio: st.mean_n / s,
        var_ratio: st.variance / s,
        g2_gap: (g2 - 1.0).abs(),
        fidelity: overlap.norm_sqr(),
    })
}

//! Photon states of the Holstein–Primakoff SU(1,1) realization.
//!
//! The crate covers SU(1,1) coherent states `|k, ζ⟩`, Barut–Girardello
//! states `|k, z⟩`, the two philophase families `|z, σ⟩₋` and `|z, σ⟩₊`, and
//! Glauber coherent states as a reference. For each it computes
//!
//! * number-state amplitudes, overlaps and phase representation functions ([`states`]),
//! * photon statistics and `g⁽²⁾` ([`stats`]),
//! * the phase distribution and moments under antinormal ordering ([`phase`]),
//! * number–phase uncertainty functionals ([`uncertainty`]).
//!
//! A truncated-Fock brute force in [`oracle`] rebuilds the same quantities from
//! operator matrices and quadrature, and [`verify`] runs the comparison suites.
//!
//! ```
//! use philophase::{stats, Bargmann, StateSpec};
//! use num_complex::Complex64;
//!
//! let spec = StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(0.5, 0.0) };
//! let s = stats::photon_stats(&spec).unwrap();
//! assert!((s.g2.unwrap() - 2.0).abs() < 1e-12);
//! ```

pub mod contraction;
pub mod oracle;
pub mod phase;
pub mod quadrature;
pub mod specialfn;
pub mod states;
pub mod stats;
pub mod uncertainty;
pub mod verify;

pub use phase::{PhaseMoments, PhaseProfile};
pub use states::{Bargmann, Family, FockAmplitudes, StateSpec, ThetaFunction};
pub use stats::PhotonStats;
pub use uncertainty::UncertaintyReport;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid state: {0}")]
    InvalidSpec(String),
    #[error("cutoff ceiling {ceiling} reached before {what}")]
    CutoffExceeded { ceiling: usize, what: String },
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default hard ceiling on Fock cutoffs and phase-series lengths.
pub const DEFAULT_MAX_CUTOFF: usize = 4096;

/// Numerical tolerances shared by the high-level entry points.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Precision {
    /// Bound on the amplitude mass beyond the cutoff.
    pub tail_tol: f64,
    /// Size of the first dropped `𝓜_n`.
    pub phase_tol: f64,
    /// Hard ceiling on cutoffs and `n_max`.
    pub max_cutoff: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            tail_tol: 1e-12,
            phase_tol: 1e-10,
            max_cutoff: DEFAULT_MAX_CUTOFF,
        }
    }
}

impl Precision {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tail_tol", self.tail_tol), ("phase_tol", self.phase_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.max_cutoff < 2 {
            return Err(Error::Domain("max_cutoff must be at least 2".into()));
        }
        Ok(())
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/phase.md")]
    mod phase {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/contraction.md")]
    mod contraction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

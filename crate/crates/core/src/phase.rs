//! Phase properties under antinormal ordering.
//!
//! For amplitudes of the form `C_n = |C_n| e^{inφ̄}` the phase distribution is
//!
//! ```text
//! Q(θ) = (1/2π) [1 + 2 Σ_{n≥1} 𝓜_n cos n(θ - φ̄)],   𝓜_n = Σ_m |C_m C_{m+n}|,
//! ```
//!
//! and every antinormally ordered phase moment is a linear functional of the
//! `𝓜_n`. With the reference phase `θ₀ = φ̄ - π` the distribution is symmetric
//! about the centre of the window and the phase mean is `φ̄` itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::specialfn::{self, log_factorial};
use crate::states::{FockAmplitudes, StateSpec};
use crate::{Error, Result, DEFAULT_MAX_CUTOFF};

/// Default size of the first dropped `𝓜_n`.
pub const DEFAULT_PHASE_TOL: f64 = 1e-10;

/// Relative size at which the inner series of an `𝓜_n` is truncated.
const INNER_REL_TOL: f64 = 1e-17;

/// Phase-condition tolerance for raw amplitude vectors.
const PHASE_CONDITION_TOL: f64 = 1e-10;

/// The coefficients `𝓜_1 … 𝓜_{n_max}` and the mean phase `φ̄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseProfile {
    m_coeffs: Vec<f64>,
    mean_phase: f64,
    truncation_bound: f64,
}

impl PhaseProfile {
    /// Build from explicit coefficients, `m_coeffs[0] = 𝓜_1`.
    pub fn new(m_coeffs: Vec<f64>, mean_phase: f64, truncation_bound: f64) -> Result<Self> {
        if m_coeffs.iter().any(|m| !(-1e-12..=1.0 + 1e-12).contains(m)) {
            return Err(Error::Domain("phase coefficients must lie in [0, 1]".into()));
        }
        Ok(PhaseProfile { m_coeffs, mean_phase, truncation_bound })
    }

    /// `𝓜_n` from raw amplitudes, after checking `C_n = |C_n| e^{inφ̄}`.
    pub fn from_amplitudes(amps: &FockAmplitudes, tol: f64) -> Result<Self> {
        let c = amps.coefficients();
        let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let (lead, _) = c
            .iter()
            .enumerate()
            .find(|(_, a)| a.norm() > 1e-6 * scale)
            .ok_or_else(|| Error::Domain("amplitude vector is zero".into()))?;
        let second = c.iter().enumerate().skip(lead + 1).find(|(_, a)| a.norm() > 1e-6 * scale);
        let mean_phase = match second {
            Some((j, a)) => wrap((a / c[lead]).arg() / (j - lead) as f64),
            None => 0.0,
        };
        // With n-dependent phases nφ̄ + const, removing the ramp leaves a constant phase.
        let base = c[lead].arg() - lead as f64 * mean_phase;
        for (n, a) in c.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            let expect = Complex64::from_polar(a.norm(), base + n as f64 * mean_phase);
            if (a - expect).norm() > PHASE_CONDITION_TOL * scale.max(1.0) {
                return Err(Error::Domain(format!(
                    "amplitude {n} violates the phase condition C_n = |C_n| exp(i n phi)"
                )));
            }
        }
        let mags: Vec<f64> = c.iter().map(|a| a.norm()).collect();
        let mut m_coeffs = Vec::new();
        let mut truncation_bound = 0.0;
        for n in 1..mags.len() {
            let m: f64 = mags.iter().zip(&mags[n..]).map(|(a, b)| a * b).sum();
            if n > 2 && m < tol {
                truncation_bound = m;
                break;
            }
            m_coeffs.push(m);
        }
        while m_coeffs.len() < 2 {
            m_coeffs.push(0.0);
        }
        Ok(PhaseProfile { m_coeffs, mean_phase, truncation_bound })
    }

    /// `𝓜_n` for `n ≥ 1`; zero beyond `n_max`. `𝓜_0 = 1`.
    pub fn m(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.m_coeffs.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn m_coeffs(&self) -> &[f64] {
        &self.m_coeffs
    }

    pub fn n_max(&self) -> usize {
        self.m_coeffs.len()
    }

    pub fn mean_phase(&self) -> f64 {
        self.mean_phase
    }

    /// Size of the first `𝓜_n` not retained.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// `θ₀ = φ̄ - π`.
    pub fn standard_theta0(&self) -> f64 {
        self.mean_phase - PI
    }

    /// `Q(θ)` from the cosine series.
    pub fn q(&self, theta: f64) -> f64 {
        let w = Complex64::from_polar(1.0, theta - self.mean_phase);
        let mut rot = Complex64::new(1.0, 0.0);
        let mut sum = 0.0;
        for &m in &self.m_coeffs {
            rot *= w;
            sum += m * rot.re;
        }
        (1.0 + 2.0 * sum) / (2.0 * PI)
    }

    /// `D = 1 - 2πQ(θ₀) = 2 Σ (-1)^{n+1} 𝓜_n` at the standard reference phase,
    /// summed in pairs.
    pub fn boundary_deficit(&self) -> f64 {
        let mut sum = 0.0;
        for pair in self.m_coeffs.chunks(2) {
            sum += pair[0] - pair.get(1).copied().unwrap_or(0.0);
        }
        2.0 * sum
    }
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Inner sum `Σ_{m≥0} a_m` of positive terms with `a_0 = exp(ln_a0)` and
/// non-increasing ratios `a_{m+1}/a_m = ratio(m)`.
fn positive_series(ln_a0: f64, ratio: impl Fn(f64) -> f64) -> f64 {
    let mut term = ln_a0.exp();
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    let mut m = 0.0;
    loop {
        let r = ratio(m);
        term *= r;
        sum += term;
        m += 1.0;
        let next = ratio(m);
        if term == 0.0 || (next < 1.0 && term * next / (1.0 - next) <= INNER_REL_TOL * sum) {
            return sum;
        }
    }
}

/// `𝓜_n` for the family in closed or series form.
fn family_m(spec: &StateSpec, n: usize, cache: &BesselCache) -> Result<f64> {
    let y = spec.modulus();
    let ln_y = y.ln();
    let nf = n as f64;
    Ok(match *spec {
        StateSpec::Su11Coherent { k, .. } if k.is_half() => y.powi(n as i32),
        StateSpec::Su11Coherent { k, .. } => {
            let tk = k.twice() as u64;
            let q = y * y;
            let ln_a0 = tk as f64 * (-q).ln_1p()
                + nf * ln_y
                + 0.5 * (log_factorial(n as u64 + tk - 1) - log_factorial(n as u64) - log_factorial(tk - 1));
            let t = tk as f64;
            positive_series(ln_a0, |m| q * (((m + t) * (m + nf + t)) / ((m + 1.0) * (m + nf + 1.0))).sqrt())
        }
        StateSpec::BarutGirardello { k, .. } if k.is_half() => cache.ratio(n as u32)?,
        StateSpec::BarutGirardello { k, .. } => {
            let nu = k.nu() as u64;
            let ln_a0 = (nf + nu as f64) * ln_y
                - cache.ln_norm
                - 0.5 * (log_factorial(n as u64) + log_factorial(nu) + log_factorial(n as u64 + nu));
            let q = y * y;
            let v = nu as f64;
            positive_series(ln_a0, |m| {
                q / ((m + 1.0) * (m + nf + 1.0) * (m + v + 1.0) * (m + nf + v + 1.0)).sqrt()
            })
        }
        StateSpec::PhilophaseMinus { .. } => cache.ratio(n as u32)?,
        StateSpec::PhilophasePlus { sigma, .. } => {
            let s = sigma as u64;
            (specialfn::log_bessel_i_tail(n as u32, y, s)? - cache.ln_norm).exp()
        }
        StateSpec::Glauber { .. } => {
            let q = y * y;
            let ln_a0 = -q + nf * ln_y - 0.5 * log_factorial(n as u64);
            positive_series(ln_a0, |m| q / ((m + 1.0) * (m + nf + 1.0)).sqrt())
        }
    })
}

/// Normalization logs and `I_n/I_0` ratios shared across `n`.
struct BesselCache {
    x: f64,
    ln_norm: f64,
    direct_i0: Option<f64>,
}

impl BesselCache {
    fn new(spec: &StateSpec) -> Result<Self> {
        let y = spec.modulus();
        let x = 2.0 * y;
        let ln_norm = match *spec {
            StateSpec::BarutGirardello { k, .. } => specialfn::log_bessel_i(k.nu(), x)?,
            StateSpec::PhilophaseMinus { .. } => specialfn::log_bessel_i(0, x)?,
            StateSpec::PhilophasePlus { sigma, .. } => specialfn::log_bessel_i_tail(0, y, sigma as u64)?,
            _ => 0.0,
        };
        let i0 = specialfn::bessel_i(0, x)?;
        let direct_i0 = (i0.is_finite() && x <= 300.0).then_some(i0);
        Ok(BesselCache { x, ln_norm, direct_i0 })
    }

    /// `I_n(x) / I_0(x)`.
    fn ratio(&self, n: u32) -> Result<f64> {
        if n > specialfn::MAX_BESSEL_ORDER {
            return Ok(0.0);
        }
        match self.direct_i0 {
            Some(i0) => Ok(specialfn::bessel_i(n, self.x)? / i0),
            None => Ok((specialfn::log_bessel_i(n, self.x)? - self.ln_norm).exp()),
        }
    }
}

/// `𝓜_n` from the family series, truncated at the first `𝓜_n < tol`.
pub fn m_coefficients(spec: &StateSpec, tol: f64) -> Result<PhaseProfile> {
    m_coefficients_with_ceiling(spec, tol, DEFAULT_MAX_CUTOFF)
}

pub fn m_coefficients_with_ceiling(spec: &StateSpec, tol: f64, ceiling: usize) -> Result<PhaseProfile> {
    spec.validate()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("phase tolerance must lie in (0, 1), got {tol}")));
    }
    let mean_phase = spec.mean_phase();
    if spec.exact_number_state().is_some() {
        return Ok(PhaseProfile { m_coeffs: vec![0.0, 0.0], mean_phase, truncation_bound: 0.0 });
    }
    let cache = BesselCache::new(spec)?;
    let mut m_coeffs = Vec::new();
    let mut n = 1;
    loop {
        let m = family_m(spec, n, &cache)?;
        if n > 2 && m < tol {
            return Ok(PhaseProfile { m_coeffs, mean_phase, truncation_bound: m });
        }
        if n > ceiling {
            return Err(Error::CutoffExceeded {
                ceiling,
                what: format!("the phase coefficients of {spec} decayed below {tol:e}"),
            });
        }
        m_coeffs.push(m.min(1.0));
        n += 1;
    }
}

/// `Q(θ)`, by closed form where one exists and from `𝓜_n` otherwise.
pub fn q_theta(spec: &StateSpec, theta: f64) -> Result<f64> {
    spec.validate()?;
    if spec.exact_number_state().is_some() {
        return Ok(1.0 / (2.0 * PI));
    }
    if let Some(q) = q_theta_closed(spec, theta)? {
        return Ok(q);
    }
    Ok(m_coefficients(spec, 1e-14)?.q(theta))
}

/// The closed-form phase distribution, if the family has one.
pub fn q_theta_closed(spec: &StateSpec, theta: f64) -> Result<Option<f64>> {
    let y = spec.modulus();
    let d = theta - spec.mean_phase();
    Ok(match *spec {
        StateSpec::Su11Coherent { k, .. } if k.is_half() => {
            Some((1.0 - y * y) / (2.0 * PI * (1.0 + y * y - 2.0 * y * d.cos())))
        }
        StateSpec::BarutGirardello { k, .. } if k.is_half() => Some(von_mises(y, d)?),
        StateSpec::PhilophaseMinus { .. } => Some(von_mises(y, d)?),
        StateSpec::PhilophasePlus { sigma: 0, .. } => Some(von_mises(y, d)?),
        StateSpec::PhilophasePlus { .. } => {
            let t = crate::states::theta_function(spec)?;
            Some(t.eval(theta).norm_sqr() / (2.0 * PI))
        }
        _ => None,
    })
}

/// `exp(2y cos d) / (2π I₀(2y))`.
fn von_mises(y: f64, d: f64) -> Result<f64> {
    Ok((2.0 * y * d.cos() - specialfn::log_bessel_i(0, 2.0 * y)?).exp() / (2.0 * PI))
}

/// Fourier coefficients `(θ̃_n, θ̃_n^{(2)})` of `θ` and `θ²` over
/// `[θ₀, θ₀ + 2π)`, with the convention `g̃_n = (1/2π) ∫ g(θ) e^{inθ} dθ`.
pub fn phase_fourier(n: i64, theta0: f64) -> (Complex64, Complex64) {
    if n == 0 {
        let t1 = Complex64::new(theta0 + PI, 0.0);
        let t2 = Complex64::new(4.0 * PI * PI / 3.0 + 2.0 * PI * theta0 + theta0 * theta0, 0.0);
        return (t1, t2);
    }
    let nf = n as f64;
    let e = Complex64::from_polar(1.0, nf * theta0);
    let i_n = Complex64::new(0.0, nf);
    let t1 = e / i_n;
    let t2 = e * 2.0 * (Complex64::new(PI + theta0, 0.0) / i_n + 1.0 / (nf * nf));
    (t1, t2)
}

/// Antinormally ordered phase moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseMoments {
    pub mean_phi: f64,
    pub var_phi: f64,
    pub mean_cos: f64,
    pub var_cos: f64,
    pub mean_sin: f64,
    pub var_sin: f64,
    pub theta0: f64,
}

impl PhaseMoments {
    /// Moments at the standard reference phase `θ₀ = φ̄ - π`.
    pub fn from_profile(p: &PhaseProfile) -> Self {
        let phi = p.mean_phase();
        // Σ (-1)^n 𝓜_n / n², paired from the small-n end.
        let mut alt = 0.0;
        let m = p.m_coeffs();
        let mut i = 0;
        while i < m.len() {
            let n = (i + 1) as f64;
            let a = -m[i] / (n * n);
            let b = m.get(i + 1).map_or(0.0, |v| v / ((n + 1.0) * (n + 1.0)));
            alt += a + b;
            i += 2;
        }
        let var_phi = (PI * PI / 3.0 + 4.0 * alt).max(0.0);
        let mut out = Self::trig(p, phi);
        out.mean_phi = phi;
        out.var_phi = var_phi;
        out.theta0 = phi - PI;
        out
    }

    /// Moments for an arbitrary reference phase `θ₀`.
    pub fn from_profile_at(p: &PhaseProfile, theta0: f64) -> Self {
        let phi = p.mean_phase();
        let mut mean = theta0 + PI;
        let (_, t2_0) = phase_fourier(0, theta0);
        let mut second = t2_0.re;
        for (i, &m) in p.m_coeffs().iter().enumerate() {
            let n = (i + 1) as i64;
            let nf = n as f64;
            mean += 2.0 * m * (nf * (theta0 - phi)).sin() / nf;
            let (_, t2) = phase_fourier(n, theta0);
            second += 2.0 * m * (t2 * Complex64::from_polar(1.0, -nf * phi)).re;
        }
        let mut out = Self::trig(p, phi);
        out.mean_phi = mean;
        out.var_phi = (second - mean * mean).max(0.0);
        out.theta0 = theta0;
        out
    }

    fn trig(p: &PhaseProfile, phi: f64) -> Self {
        let (m1, m2) = (p.m(1), p.m(2));
        let (s, c) = phi.sin_cos();
        PhaseMoments {
            mean_phi: 0.0,
            var_phi: 0.0,
            mean_cos: m1 * c,
            var_cos: 0.5 * (1.0 - m2) + (m2 - m1 * m1) * c * c,
            mean_sin: m1 * s,
            var_sin: 0.5 * (1.0 - m2) + (m2 - m1 * m1) * s * s,
            theta0: 0.0,
        }
    }
}

/// Phase moments of `spec` at `θ₀ = φ̄ - π`.
pub fn phase_moments(spec: &StateSpec, tol: f64) -> Result<PhaseMoments> {
    Ok(PhaseMoments::from_profile(&m_coefficients(spec, tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{amplitudes, Bargmann};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn su11_half_coefficients_are_powers() {
        let p = m_coefficients(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: c(0.5, 0.0) }, 1e-12).unwrap();
        assert!((p.m(3) - 0.125).abs() < 1e-16);
    }

    #[test]
    fn family_series_match_amplitude_sums() {
        for spec in crate::states::standard_grid() {
            let p = m_coefficients(&spec, 1e-12).unwrap();
            let a = amplitudes(&spec, 1e-30).unwrap();
            let q = PhaseProfile::from_amplitudes(&a, 1e-13).unwrap();
            assert!((p.mean_phase() - q.mean_phase()).abs() < 1e-9, "{spec}");
            for n in 1..=p.n_max() {
                assert!((p.m(n) - q.m(n)).abs() < 1e-12, "{spec} n={n}: {} vs {}", p.m(n), q.m(n));
            }
        }
    }

    #[test]
    fn vacuum_profile() {
        let p = m_coefficients(&StateSpec::Glauber { alpha: c(0.0, 0.0) }, 1e-10).unwrap();
        assert_eq!(p.m(1), 0.0);
        let mo = PhaseMoments::from_profile(&p);
        assert!((mo.var_phi - PI * PI / 3.0).abs() < 1e-15);
        assert!((mo.var_cos - 0.5).abs() < 1e-15);
        assert!((q_theta(&StateSpec::Glauber { alpha: c(0.0, 0.0) }, 1.0).unwrap() - 0.5 / PI).abs() < 1e-16);
    }

    #[test]
    fn raw_amplitudes_must_satisfy_phase_condition() {
        let a = FockAmplitudes::from_coefficients(vec![c(0.6, 0.0), c(0.0, 0.6), c(0.52, 0.0)]).unwrap();
        assert!(PhaseProfile::from_amplitudes(&a, 1e-12).is_err());
        let b = FockAmplitudes::from_coefficients(vec![c(0.6, 0.0), c(0.0, 0.6), c(-0.52, 0.0)]).unwrap();
        let p = PhaseProfile::from_amplitudes(&b, 1e-12).unwrap();
        assert!((p.mean_phase() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn phase_fourier_values() {
        assert_eq!(phase_fourier(0, -PI).0, c(0.0, 0.0));
        assert!((phase_fourier(1, 0.0).0 - c(0.0, -1.0)).norm() < 1e-16);
        let theta0 = 0.4;
        for n in [-3i64, 2, 5] {
            let (t1, t2) = phase_fourier(n, theta0);
            let rule = crate::quadrature::CompositeRule::new(theta0, theta0 + 2.0 * PI, 16, 20);
            let re1 = rule.integrate(|t| t * (n as f64 * t).cos()) / (2.0 * PI);
            let im1 = rule.integrate(|t| t * (n as f64 * t).sin()) / (2.0 * PI);
            let re2 = rule.integrate(|t| t * t * (n as f64 * t).cos()) / (2.0 * PI);
            let im2 = rule.integrate(|t| t * t * (n as f64 * t).sin()) / (2.0 * PI);
            assert!((t1 - c(re1, im1)).norm() < 1e-13);
            assert!((t2 - c(re2, im2)).norm() < 1e-12);
        }
    }

    #[test]
    fn general_reference_phase_agrees_with_standard() {
        let spec = StateSpec::BarutGirardello { k: Bargmann::from_twice(3).unwrap(), z: c(2.0, 1.0) };
        let p = m_coefficients(&spec, 1e-15).unwrap();
        let a = PhaseMoments::from_profile(&p);
        let b = PhaseMoments::from_profile_at(&p, p.standard_theta0());
        assert!((a.mean_phi - b.mean_phi).abs() < 1e-12);
        assert!((a.var_phi - b.var_phi).abs() < 1e-10);
    }

    #[test]
    fn su11_half_cos_variance() {
        for r in [0.1, 0.5, 0.9] {
            let mo = phase_moments(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: c(0.0, r) }, 1e-10).unwrap();
            assert!((mo.var_cos - 0.5 * (1.0 - r * r)).abs() < 1e-14);
        }
    }
}

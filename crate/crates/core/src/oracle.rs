//! Truncated-Fock brute force.
//!
//! Everything here works from number-state matrices, explicit amplitude
//! vectors and numerical quadrature, never from the closed forms of
//! [`crate::stats`], [`crate::phase`] or [`crate::uncertainty`]. Matrix
//! element conventions:
//!
//! * `⟨n|E|n+1⟩ = 1` for the lowering exponential phase operator `E = e^{iφ}`;
//! * a phase-related operator with real symbol `g(θ)` has
//!   `⟨m|ĝ|m'⟩ = g̃_{m-m'} = (1/2π) ∫ g(θ) e^{i(m-m')θ} dθ`.
//!
//! Products of phase-related factors are antinormally ordered by collapsing
//! each contiguous run of `E`, `E†` into the kernel of the product of their
//! symbols, evaluated by quadrature over phase states.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::phase::phase_fourier;
use crate::quadrature::{self, CompositeRule};
use crate::specialfn;
use crate::states::{self, Bargmann, FockAmplitudes, StateSpec};
use crate::stats::PhotonStats;
use crate::{Error, Result};

type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which operator a [`FockOperator`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum OperatorLabel {
    Number,
    ShiftLower,
    ShiftRaise,
    Cosine,
    Sine,
    KPlus(Bargmann),
    KMinus(Bargmann),
    K3(Bargmann),
    KmodPlus(u32),
    KmodMinus(u32),
    Kmod3(u32),
    PhaseOp(f64),
    PhaseOpSq(f64),
}

/// A dense `(N+1) × (N+1)` operator matrix in the number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
    label: Option<OperatorLabel>,
}

impl FockOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::Domain("operator matrices must be square with N >= 1".into()));
        }
        Ok(FockOperator { matrix, label: None })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn label(&self) -> Option<OperatorLabel> {
        self.label
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator { matrix: self.matrix.adjoint(), label: None }
    }

    /// `A c` for an amplitude vector of the same cutoff.
    pub fn apply(&self, amps: &FockAmplitudes) -> Result<Vec<Complex64>> {
        if amps.cutoff() != self.cutoff() {
            return Err(Error::Domain(format!(
                "cutoff mismatch: operator {} vs amplitudes {}",
                self.cutoff(),
                amps.cutoff()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amps.coefficients());
        Ok((&self.matrix * v).iter().copied().collect())
    }
}

fn diag(n: usize, f: impl Fn(usize) -> f64) -> CMatrix {
    CMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { Complex64::new(f(i), 0.0) } else { ZERO })
}

/// `⟨i|A|i+1⟩ = f(i)`.
fn upper(n: usize, f: impl Fn(usize) -> f64) -> CMatrix {
    CMatrix::from_fn(n + 1, n + 1, |i, j| if j == i + 1 { Complex64::new(f(i), 0.0) } else { ZERO })
}

/// Toeplitz matrix `⟨m|A|m'⟩ = g(m - m')` with `g(-d) = g(d)*`.
fn toeplitz(n: usize, g: impl Fn(i64) -> Complex64) -> CMatrix {
    let coeffs: Vec<Complex64> = (0..=n as i64).map(&g).collect();
    CMatrix::from_fn(n + 1, n + 1, |i, j| {
        let d = i as i64 - j as i64;
        if d >= 0 {
            coeffs[d as usize]
        } else {
            coeffs[(-d) as usize].conj()
        }
    })
}

/// Build the matrix of `label` at cutoff `N ≥ 2`.
pub fn build_operator(label: OperatorLabel, cutoff: usize) -> Result<FockOperator> {
    if cutoff < 2 {
        return Err(Error::Domain(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let n = cutoff;
    let lower = || upper(n, |_| 1.0);
    let matrix = match label {
        OperatorLabel::Number => diag(n, |i| i as f64),
        OperatorLabel::ShiftLower => lower(),
        OperatorLabel::ShiftRaise => lower().adjoint(),
        OperatorLabel::Cosine => (lower() + lower().adjoint()) * Complex64::new(0.5, 0.0),
        OperatorLabel::Sine => (lower() - lower().adjoint()) * Complex64::new(0.0, -0.5),
        OperatorLabel::KMinus(k) => {
            let tk = k.twice() as f64;
            upper(n, |i| ((i as f64 + 1.0) * (i as f64 + tk)).sqrt())
        }
        OperatorLabel::KPlus(k) => build_operator(OperatorLabel::KMinus(k), n)?.matrix.adjoint(),
        OperatorLabel::K3(k) => diag(n, |i| i as f64 + k.value()),
        OperatorLabel::KmodMinus(s) => upper(n, |i| i as f64 + 1.0 + s as f64),
        OperatorLabel::KmodPlus(s) => build_operator(OperatorLabel::KmodMinus(s), n)?.matrix.adjoint(),
        OperatorLabel::Kmod3(s) => diag(n, |i| i as f64 + s as f64 + 0.5),
        OperatorLabel::PhaseOp(theta0) => toeplitz(n, |d| phase_fourier(d, theta0).0),
        OperatorLabel::PhaseOpSq(theta0) => toeplitz(n, |d| phase_fourier(d, theta0).1),
    };
    Ok(FockOperator { matrix, label: Some(label) })
}

/// `Σ̂(z) = n̂ - z E†`.
pub fn sigma_operator(z: Complex64, cutoff: usize) -> Result<FockOperator> {
    let n = build_operator(OperatorLabel::Number, cutoff)?;
    let r = build_operator(OperatorLabel::ShiftRaise, cutoff)?;
    FockOperator::from_matrix(n.matrix - r.matrix * z)
}

/// `‖(A - λ) c‖₂` over all rows but the last, which truncation corrupts.
pub fn eigen_residual(op: &FockOperator, amps: &FockAmplitudes, eigenvalue: Complex64) -> Result<f64> {
    let ac = op.apply(amps)?;
    let c = amps.coefficients();
    Ok(ac[..ac.len() - 1]
        .iter()
        .zip(c)
        .map(|(a, x)| (a - eigenvalue * x).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Kernel matrix `⟨m|ĝ|m'⟩ = (1/2π) ∫ g(θ) e^{i(m-m')θ} dθ` over `[θ₀, θ₀ + 2π)`.
///
/// Periodic symbols use the trapezoid rule on `2N + 64` points. Symbols with a
/// jump at the window edge (powers of `θ`) use composite Gauss–Legendre.
pub fn phase_kernel(g: impl Fn(f64) -> Complex64, theta0: f64, cutoff: usize, periodic: bool) -> CMatrix {
    let (nodes, weights): (Vec<f64>, Vec<f64>) = if periodic {
        let m = 2 * cutoff + 64;
        let h = 2.0 * PI / m as f64;
        (quadrature::periodic_grid(theta0, m), vec![h; m])
    } else {
        let rule = CompositeRule::new(theta0, theta0 + 2.0 * PI, 2 * cutoff + 16, 24);
        (rule.nodes, rule.weights)
    };
    let samples: Vec<(f64, Complex64)> = nodes.iter().zip(&weights).map(|(&t, &w)| (t, g(t) * w)).collect();
    let coeffs: Vec<Complex64> = (0..=cutoff as i64)
        .map(|d| {
            samples
                .iter()
                .map(|&(t, gw)| gw * Complex64::from_polar(1.0, d as f64 * t))
                .sum::<Complex64>()
                / (2.0 * PI)
        })
        .collect();
    let neg: Vec<Complex64> = (0..=cutoff as i64)
        .map(|d| {
            samples
                .iter()
                .map(|&(t, gw)| gw * Complex64::from_polar(1.0, -(d as f64) * t))
                .sum::<Complex64>()
                / (2.0 * PI)
        })
        .collect();
    CMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        let d = i as i64 - j as i64;
        if d >= 0 {
            coeffs[d as usize]
        } else {
            neg[(-d) as usize]
        }
    })
}

/// A factor in an operator word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `n̂ + shift`.
    Number(f64),
    /// `E = e^{iφ}`.
    Lower,
    /// `E† = e^{-iφ}`.
    Raise,
}

/// Antinormally ordered product of a word of factors.
///
/// Each maximal run of `Lower`/`Raise` factors becomes the phase-state
/// kernel of `e^{ipθ}`, `p = #Lower - #Raise`.
pub fn antinormal_product(word: &[Factor], cutoff: usize) -> CMatrix {
    let mut out = CMatrix::identity(cutoff + 1, cutoff + 1);
    let mut run: i64 = 0;
    let mut in_run = false;
    let flush = |out: &mut CMatrix, p: i64| {
        let k = phase_kernel(|t| Complex64::from_polar(1.0, p as f64 * t), 0.0, cutoff, true);
        *out = &*out * k;
    };
    for f in word {
        match *f {
            Factor::Lower => {
                run += 1;
                in_run = true;
            }
            Factor::Raise => {
                run -= 1;
                in_run = true;
            }
            Factor::Number(shift) => {
                if in_run {
                    flush(&mut out, run);
                    run = 0;
                    in_run = false;
                }
                out = out * diag(cutoff, |i| i as f64 + shift);
            }
        }
    }
    if in_run {
        flush(&mut out, run);
    }
    out
}

/// Ordinary (unordered) matrix product of a word.
pub fn ordinary_product(word: &[Factor], cutoff: usize) -> CMatrix {
    let lower = upper(cutoff, |_| 1.0);
    let raise = lower.adjoint();
    word.iter().fold(CMatrix::identity(cutoff + 1, cutoff + 1), |acc, f| match *f {
        Factor::Number(s) => acc * diag(cutoff, |i| i as f64 + s),
        Factor::Lower => acc * &lower,
        Factor::Raise => acc * &raise,
    })
}

/// Which generator set [`algebra_check`] examines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum AlgebraParams {
    /// The usual realization with Bargmann index `k`.
    Bargmann(Bargmann),
    /// The modified realization with `σ ≥ 0`, antinormally ordered.
    Modified(u32),
}

/// Interior-block deviations of the SU(1,1) relations.
///
/// Each entry is the largest absolute deviation on rows and columns
/// `0..N-2`, divided by the largest entry among 1, the expected matrix and
/// the products entering the relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub k3_plus: f64,
    pub k3_minus: f64,
    pub minus_plus: f64,
    pub casimir: f64,
    pub casimir_value: f64,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        self.k3_plus.max(self.k3_minus).max(self.minus_plus).max(self.casimir)
    }
}

fn interior_deviation(a: &CMatrix, b: &CMatrix, terms: &[&CMatrix]) -> f64 {
    let n = a.nrows().saturating_sub(2);
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((a[(i, j)] - b[(i, j)]).norm());
            scale = terms.iter().fold(scale.max(b[(i, j)].norm()), |s, t| s.max(t[(i, j)].norm()));
        }
    }
    dev / scale
}

/// Verify `[K₃, K±] = ±K±`, `[K₋, K₊] = 2K₃` and the Casimir value on the
/// interior block.
pub fn algebra_check(params: AlgebraParams, cutoff: usize) -> Result<AlgebraReport> {
    if cutoff < 4 {
        return Err(Error::Domain(format!("algebra checks need N >= 4, got {cutoff}")));
    }
    let n = cutoff;
    let (kp, km, k3, mp, pm, casimir_value) = match params {
        AlgebraParams::Bargmann(k) => {
            let kp = build_operator(OperatorLabel::KPlus(k), n)?.matrix;
            let km = build_operator(OperatorLabel::KMinus(k), n)?.matrix;
            let k3 = build_operator(OperatorLabel::K3(k), n)?.matrix;
            let mp = &km * &kp;
            let pm = &kp * &km;
            let kv = k.value();
            (kp, km, k3, mp, pm, kv * (kv - 1.0))
        }
        AlgebraParams::Modified(s) => {
            let sh = s as f64;
            let kp = build_operator(OperatorLabel::KmodPlus(s), n)?.matrix;
            let km = build_operator(OperatorLabel::KmodMinus(s), n)?.matrix;
            let k3 = build_operator(OperatorLabel::Kmod3(s), n)?.matrix;
            // K₋(σ) = E (n̂ + σ), K₊(σ) = (n̂ + σ) E†.
            let mp = antinormal_product(&[Factor::Lower, Factor::Number(sh), Factor::Number(sh), Factor::Raise], n);
            let pm = antinormal_product(&[Factor::Number(sh), Factor::Raise, Factor::Lower, Factor::Number(sh)], n);
            (kp, km, k3, mp, pm, -0.25)
        }
    };
    let two = Complex64::new(2.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let c3p = &k3 * &kp - &kp * &k3;
    let c3m = &k3 * &km - &km * &k3;
    let cmp = &mp - &pm;
    let k3sq = &k3 * &k3;
    let cas = &k3sq - (&pm + &mp) * half;
    let id = CMatrix::identity(n + 1, n + 1) * Complex64::new(casimir_value, 0.0);
    Ok(AlgebraReport {
        k3_plus: interior_deviation(&c3p, &kp, &[]),
        k3_minus: interior_deviation(&c3m, &(-&km), &[]),
        minus_plus: interior_deviation(&cmp, &(&k3 * two), &[&mp, &pm]),
        casimir: interior_deviation(&cas, &id, &[&k3sq, &mp, &pm]),
        casimir_value,
    })
}

/// Largest deviation of `[n̂, φ̂]` from `i(δ_{mm'} - e^{i(m-m')θ₀})` over
/// the whole truncated space.
pub fn number_phase_commutator_deviation(theta0: f64, cutoff: usize) -> Result<f64> {
    let n = build_operator(OperatorLabel::Number, cutoff)?.matrix;
    let phi = build_operator(OperatorLabel::PhaseOp(theta0), cutoff)?.matrix;
    let c = &n * &phi - &phi * &n;
    let mut dev: f64 = 0.0;
    for i in 0..=cutoff {
        for j in 0..=cutoff {
            let delta = if i == j { ONE } else { ZERO };
            let expect = I * (delta - Complex64::from_polar(1.0, (i as f64 - j as f64) * theta0));
            dev = dev.max((c[(i, j)] - expect).norm());
        }
    }
    Ok(dev)
}

/// `| ‖∗E†E∗ c‖ - 1 |` for a normalized amplitude vector.
pub fn antinormal_unitarity_deviation(amps: &FockAmplitudes) -> f64 {
    let n = amps.cutoff();
    let k = antinormal_product(&[Factor::Raise, Factor::Lower], n);
    let v = nalgebra::DVector::from_column_slice(amps.coefficients());
    let norm_in = v.norm();
    ((&k * &v).norm() / norm_in - 1.0).abs()
}

/// Largest element of the antinormal commutator `∗[ĝ, f̂]∗` built from the
/// kernels of `g f` and `f g`.
pub fn antinormal_commutator(
    g: impl Fn(f64) -> f64 + Copy,
    f: impl Fn(f64) -> f64 + Copy,
    theta0: f64,
    cutoff: usize,
) -> f64 {
    let gf = phase_kernel(|t| Complex64::new(g(t) * f(t), 0.0), theta0, cutoff, false);
    let fg = phase_kernel(|t| Complex64::new(f(t) * g(t), 0.0), theta0, cutoff, false);
    (gf - fg).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `⟨n̂⟩`, `⟨n̂²⟩` and `g⁽²⁾` summed directly from amplitudes.
pub fn moments_direct(amps: &FockAmplitudes) -> PhotonStats {
    let c = amps.coefficients();
    let norm: f64 = c.iter().map(|a| a.norm_sqr()).sum();
    let (m1, m2) = c.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (n, a)| {
        let p = a.norm_sqr();
        let nf = n as f64;
        (m1 + nf * p, m2 + nf * nf * p)
    });
    PhotonStats::from_moments(m1 / norm, m2 / norm)
}

/// `⟨n̂^p⟩ = (i^p / 2π) ∫ Θ* ∂_θ^p Θ dθ`, with the derivative taken on the
/// Fourier series and the integral by the trapezoid rule.
pub fn moments_via_theta(amps: &FockAmplitudes, p: u32) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(Error::Domain(format!("moment order must be 1 or 2, got {p}")));
    }
    let c = amps.coefficients();
    let deriv: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(n, a)| a * Complex64::new(0.0, -(n as f64)).powu(p))
        .collect();
    let d = FockAmplitudes::from_coefficients(deriv)?;
    let m = 2 * amps.cutoff() + 64;
    let ip = I.powu(p);
    let integral: Complex64 = quadrature::periodic_grid(0.0, m)
        .into_iter()
        .map(|t| states::theta_series(amps, t).conj() * states::theta_series(&d, t))
        .sum::<Complex64>()
        * (2.0 * PI / m as f64);
    Ok((ip * integral / (2.0 * PI)).re)
}

/// `∫ g(θ) Q(θ) dθ` over `[θ₀, θ₀ + 2π)` with `Q = |Θ|²/2π` rebuilt from
/// the amplitudes.
///
/// Periodic `g` is integrated with the trapezoid rule on `2N + 64` points
/// (exact for a band-limited integrand). Non-periodic `g`, such as powers of
/// the folded phase, uses composite Gauss–Legendre.
pub fn quadrature_expectation(
    g: impl Fn(f64) -> f64,
    amps: &FockAmplitudes,
    theta0: f64,
    periodic: bool,
) -> f64 {
    let q = |t: f64| states::theta_series(amps, t).norm_sqr() / (2.0 * PI);
    let n = amps.cutoff();
    if periodic {
        quadrature::periodic_trapezoid(|t| g(t) * q(t), theta0, 2 * n + 64)
    } else {
        let panels = (2 * n + 32).max(64);
        quadrature::integrate(|t| g(t) * q(t), theta0, theta0 + 2.0 * PI, panels, 20)
    }
}

/// `θ` folded into `[θ₀, θ₀ + 2π)`.
pub fn theta_per(theta: f64, theta0: f64) -> f64 {
    theta0 + (theta - theta0).rem_euclid(2.0 * PI)
}

/// Phase moments from quadrature against the rebuilt `Q(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureMoments {
    pub mean_phi: f64,
    pub var_phi: f64,
    pub mean_cos: f64,
    pub var_cos: f64,
    pub mean_sin: f64,
    pub var_sin: f64,
}

pub fn quadrature_moments(amps: &FockAmplitudes, theta0: f64) -> QuadratureMoments {
    let e = |g: &dyn Fn(f64) -> f64, periodic| quadrature_expectation(g, amps, theta0, periodic);
    let mean_phi = e(&|t| theta_per(t, theta0), false);
    let second = e(&|t| theta_per(t, theta0).powi(2), false);
    let mean_cos = e(&f64::cos, true);
    let mean_sin = e(&f64::sin, true);
    let cos2 = e(&|t| t.cos().powi(2), true);
    let sin2 = e(&|t| t.sin().powi(2), true);
    QuadratureMoments {
        mean_phi,
        var_phi: second - mean_phi * mean_phi,
        mean_cos,
        var_cos: cos2 - mean_cos * mean_cos,
        mean_sin,
        var_sin: sin2 - mean_sin * mean_sin,
    }
}

/// Families whose identity resolution is checked.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum IdentityFamily {
    /// Measure `(2k-1)/π d²ζ / (1-|ζ|²)²`, `k ≥ 1`.
    Su11(Bargmann),
    /// Measure `(2/π) K_{2k-1}(2|z|) I_{2k-1}(2|z|) d²z`.
    Bg(Bargmann),
    /// Measure `(2/π) K₀(2|z|) T₀(|z|, σ) d²z`.
    Pplus(u32),
}

const IDENTITY_ANGLES: usize = 32;

/// Largest `|∫dμ ⟨n|·⟩⟨·|n'⟩ - δ_{nn'}|` over the given pairs.
pub fn identity_resolution_check(family: IdentityFamily, pairs: &[(usize, usize)]) -> Result<f64> {
    let max_n = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
    let m = identity_matrix(family, max_n)?;
    Ok(pairs
        .iter()
        .map(|&(a, b)| {
            let delta = if a == b { ONE } else { ZERO };
            (m[(a, b)] - delta).norm()
        })
        .fold(0.0, f64::max))
}

/// `∫dμ ⟨n|·⟩⟨·|n'⟩` for `n, n' ≤ max_n ≤ 12`.
///
/// The radial integral is refined by doubling the panel count until no
/// element moves by more than `1e-8`; the angular integral uses the
/// trapezoid rule, exact for the `e^{i(n-n')φ}` dependence.
pub fn identity_matrix(family: IdentityFamily, max_n: usize) -> Result<CMatrix> {
    if max_n > 12 {
        return Err(Error::Domain("identity checks support n, n' <= 12".into()));
    }
    let spec_at = |c: Complex64| match family {
        IdentityFamily::Su11(k) => StateSpec::Su11Coherent { k, zeta: c },
        IdentityFamily::Bg(k) => StateSpec::BarutGirardello { k, z: c },
        IdentityFamily::Pplus(s) => StateSpec::PhilophasePlus { z: c, sigma: s as i64 },
    };
    // Angular integral of the outer products at radius r.
    let angular = |r: f64| -> Result<CMatrix> {
        let h = 2.0 * PI / IDENTITY_ANGLES as f64;
        let mut acc = CMatrix::zeros(max_n + 1, max_n + 1);
        for j in 0..IDENTITY_ANGLES {
            let spec = spec_at(Complex64::from_polar(r, j as f64 * h));
            let c: Vec<Complex64> = (0..=max_n).map(|n| states::amplitude_at(&spec, n)).collect::<Result<_>>()?;
            for a in 0..=max_n {
                for b in 0..=max_n {
                    acc[(a, b)] += c[a] * c[b].conj();
                }
            }
        }
        Ok(acc * Complex64::new(h, 0.0))
    };
    // Radial weight of the measure times r, so that dμ = weight(r) dr dφ.
    let weight = |r: f64| -> Result<f64> {
        Ok(match family {
            IdentityFamily::Su11(k) => (k.twice() as f64 - 1.0) / PI * r / (1.0 - r * r).powi(2),
            IdentityFamily::Bg(k) => {
                let nu = k.nu();
                2.0 / PI * r * (specialfn::log_bessel_k(nu, 2.0 * r)? + specialfn::log_bessel_i(nu, 2.0 * r)?).exp()
            }
            IdentityFamily::Pplus(s) => {
                2.0 / PI
                    * r
                    * (specialfn::log_bessel_k(0, 2.0 * r)? + specialfn::log_bessel_i_tail(0, r, s as u64)?).exp()
            }
        })
    };
    let rule = |panels: usize| -> CompositeRule {
        match family {
            IdentityFamily::Su11(_) => CompositeRule::new(0.0, 1.0, panels, 16),
            IdentityFamily::Bg(k) => CompositeRule::new(-25.0, (30.0 + 4.0 * (max_n + k.nu() as usize) as f64).ln(), panels, 16),
            IdentityFamily::Pplus(s) => CompositeRule::new(-25.0, (30.0 + 4.0 * (max_n + s as usize) as f64).ln(), panels, 16),
        }
    };
    let integrate = |panels: usize| -> Result<CMatrix> {
        let rule = rule(panels);
        let mut acc = CMatrix::zeros(max_n + 1, max_n + 1);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            // r = e^x for the Bessel measures resolves the logarithmic behaviour of K at the origin.
            let (r, jac) = match family {
                IdentityFamily::Su11(_) => (x, 1.0),
                _ => (x.exp(), x.exp()),
            };
            acc += angular(r)? * Complex64::new(weight(r)? * w * jac, 0.0);
        }
        Ok(acc)
    };
    if let IdentityFamily::Su11(k) = family {
        if k.twice() < 2 {
            return Err(Error::Domain(
                "the k = 1/2 measure vanishes identically; its resolution is a limit taken after integration".into(),
            ));
        }
    }
    let mut panels = 8;
    let mut prev = integrate(panels)?;
    for _ in 0..8 {
        panels *= 2;
        let next = integrate(panels)?;
        if (&next - &prev).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-8 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Convergence(format!("radial quadrature did not settle within {panels} panels")))
}

/// Analytic function spaces on which the generators act as differential operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Realization {
    /// Functions analytic in the unit disk, basis `√(Γ(n+2k)/(n!Γ(2k))) ζⁿ`.
    Disk(Bargmann),
    /// Boundary functions on the circle, basis `e^{-inθ}`, `k = 1/2`.
    Circle,
    /// Entire functions, basis `zⁿ / √(n! Γ(n+2k))`.
    Plane(Bargmann),
    /// Entire functions, basis `z^{n+σ} / (n+σ)!`.
    ModifiedPlane(u32),
}

/// Result of [`analytic_generator_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneratorReport {
    /// Largest coefficient deviation between the differential and matrix actions.
    pub max_deviation: f64,
    /// `K₋ u₀` on the modified plane before and after discarding powers below `σ`.
    pub vacuum_raw: Option<f64>,
    pub vacuum_projected: Option<f64>,
}

/// Sparse Laurent polynomial in one variable, exponent → coefficient.
#[derive(Clone, Debug, Default)]
struct Poly(std::collections::BTreeMap<i64, f64>);

impl Poly {
    fn monomial(p: i64, c: f64) -> Self {
        let mut m = std::collections::BTreeMap::new();
        m.insert(p, c);
        Poly(m)
    }
    fn add(mut self, o: &Poly) -> Self {
        for (&p, &c) in &o.0 {
            *self.0.entry(p).or_insert(0.0) += c;
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        self.0.values_mut().for_each(|c| *c *= s);
        self
    }
    fn shift(&self, by: i64) -> Self {
        Poly(self.0.iter().map(|(&p, &c)| (p + by, c)).collect())
    }
    /// `d/dz`.
    fn d(&self) -> Self {
        Poly(self.0.iter().filter(|(&p, _)| p != 0).map(|(&p, &c)| (p - 1, c * p as f64)).collect())
    }
    fn coeff(&self, p: i64) -> f64 {
        self.0.get(&p).copied().unwrap_or(0.0)
    }
}

/// Apply each differential-operator realization to the first `degree + 1`
/// basis functions and compare coefficients with the matrix action.
pub fn analytic_generator_check(realization: Realization, degree: usize) -> Result<GeneratorReport> {
    if degree < 3 {
        return Err(Error::Domain("generator checks need degree >= 3".into()));
    }
    let n = degree + 1;
    // Basis normalization b_j (u_j = b_j w^{j+offset}) and operator symbols.
    let (k3m, kpm, kmm, offset, norm): (CMatrix, CMatrix, CMatrix, i64, Box<dyn Fn(i64) -> f64>) = match realization {
        Realization::Disk(k) | Realization::Plane(k) => {
            let tk = k.twice() as u64;
            let lf = specialfn::log_factorial;
            let norm: Box<dyn Fn(i64) -> f64> = if matches!(realization, Realization::Disk(_)) {
                Box::new(move |j| (0.5 * (lf(j as u64 + tk - 1) - lf(j as u64) - lf(tk - 1))).exp())
            } else {
                Box::new(move |j| (-0.5 * (lf(j as u64) + lf(j as u64 + tk - 1))).exp())
            };
            (
                build_operator(OperatorLabel::K3(k), n)?.matrix,
                build_operator(OperatorLabel::KPlus(k), n)?.matrix,
                build_operator(OperatorLabel::KMinus(k), n)?.matrix,
                0,
                norm,
            )
        }
        Realization::Circle => (
            build_operator(OperatorLabel::K3(Bargmann::HALF), n)?.matrix,
            build_operator(OperatorLabel::KPlus(Bargmann::HALF), n)?.matrix,
            build_operator(OperatorLabel::KMinus(Bargmann::HALF), n)?.matrix,
            0,
            Box::new(|_| 1.0),
        ),
        Realization::ModifiedPlane(s) => (
            build_operator(OperatorLabel::Kmod3(s), n)?.matrix,
            build_operator(OperatorLabel::KmodPlus(s), n)?.matrix,
            build_operator(OperatorLabel::KmodMinus(s), n)?.matrix,
            s as i64,
            Box::new(move |j| (-specialfn::log_factorial((j + s as i64).max(0) as u64)).exp()),
        ),
    };
    let k_val = match realization {
        Realization::Disk(k) | Realization::Plane(k) => k.value(),
        _ => 0.5,
    };
    let tk = 2.0 * k_val;
    // Differential operators on a polynomial in the representation variable.
    let apply = |which: usize, f: &Poly| -> Poly {
        match (realization, which) {
            // K₃, K₊, K₋ in that order.
            (Realization::Disk(_), 0) => f.d().shift(1).add(&f.clone().scale(k_val)),
            (Realization::Disk(_), 1) => f.d().shift(2).add(&f.shift(1).scale(tk)),
            (Realization::Disk(_), 2) => f.d(),
            (Realization::Plane(_), 0) => f.d().shift(1).add(&f.clone().scale(k_val)),
            (Realization::Plane(_), 1) => f.shift(1),
            (Realization::Plane(_), 2) => f.d().scale(tk).add(&f.d().d().shift(1)),
            (Realization::ModifiedPlane(_), 0) => f.d().shift(1).add(&f.clone().scale(0.5)),
            (Realization::ModifiedPlane(_), 1) => f.shift(1),
            (Realization::ModifiedPlane(_), 2) => f.d().add(&f.d().d().shift(1)),
            // Circle, in w = e^{-iθ}: d/dθ w^p = -ip w^p, e^{iθ} = w^{-1}.
            // K₃ = i d/dθ + 1/2, K₊ = e^{-iθ}(1 + i d/dθ), K₋ = i e^{iθ} d/dθ.
            (Realization::Circle, 0) => theta_i_d(f).add(&f.clone().scale(0.5)),
            (Realization::Circle, 1) => f.shift(1).add(&theta_i_d(f).shift(1)),
            (Realization::Circle, 2) => theta_i_d(f).shift(-1),
            _ => unreachable!(),
        }
    };
    let mut dev: f64 = 0.0;
    for j in 0..degree as i64 {
        let u = Poly::monomial(j + offset, norm(j));
        for (which, m) in [&k3m, &kpm, &kmm].into_iter().enumerate() {
            let got = apply(which, &u);
            for i in 0..=degree as i64 {
                let expect = m[(i as usize, j as usize)].re * norm(i);
                dev = dev.max((got.coeff(i + offset) - expect).abs() / expect.abs().max(1.0));
            }
        }
    }
    let (vacuum_raw, vacuum_projected) = match realization {
        Realization::ModifiedPlane(s) => {
            let v = apply(2, &Poly::monomial(s as i64, norm(0)));
            let raw = v.0.values().map(|c| c.abs()).fold(0.0, f64::max);
            let proj = v.0.iter().filter(|(&p, _)| p >= s as i64).map(|(_, c)| c.abs()).fold(0.0, f64::max);
            (Some(raw), Some(proj))
        }
        _ => (None, None),
    };
    Ok(GeneratorReport { max_deviation: dev, vacuum_raw, vacuum_projected })
}

/// `i d/dθ` on a polynomial in `w = e^{-iθ}`: `w^p ↦ p w^p`.
fn theta_i_d(f: &Poly) -> Poly {
    Poly(f.0.iter().map(|(&p, &c)| (p, c * p as f64)).collect())
}

/// `| (1/2π) ∫ Θ(θ) / (1 - ζ e^{iθ}) dθ - Σ C_n ζⁿ |`.
pub fn boundary_reconstruction_check(amps: &FockAmplitudes, zeta: Complex64) -> Result<f64> {
    let r = zeta.norm();
    if r > 0.9 {
        return Err(Error::Domain(format!("boundary reconstruction needs |zeta| <= 0.9, got {r}")));
    }
    let extra = if r == 0.0 { 0 } else { (40.0 / -r.ln()).ceil() as usize };
    let m = 2 * amps.cutoff() + 64 + extra;
    let integral: Complex64 = quadrature::periodic_grid(0.0, m)
        .into_iter()
        .map(|t| states::theta_series(amps, t) / (ONE - zeta * Complex64::from_polar(1.0, t)))
        .sum::<Complex64>()
        / m as f64;
    let series = amps.coefficients().iter().rev().fold(ZERO, |acc, &c| acc * zeta + c);
    Ok((integral - series).norm())
}

/// Largest `|C_n/√(1-r²) - e^{inθ}| / √(2π)` for `n ≤ n_max` of `|1/2, re^{iθ}⟩`,
/// the distance to the phase-state pattern.
pub fn phase_like_deviation(r: f64, theta: f64, n_max: usize) -> Result<f64> {
    let spec = StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::from_polar(r, theta) };
    let scale = 1.0 / (1.0 - r * r).sqrt();
    let mut dev: f64 = 0.0;
    for n in 0..=n_max {
        let c = states::amplitude_at(&spec, n)? * scale;
        dev = dev.max((c - Complex64::from_polar(1.0, n as f64 * theta)).norm());
    }
    Ok(dev / (2.0 * PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_examples() {
        let k3 = build_operator(OperatorLabel::K3(Bargmann::HALF), 6).unwrap();
        for i in 0..=6 {
            assert_eq!(k3.matrix()[(i, i)].re, i as f64 + 0.5);
        }
        let a = build_operator(OperatorLabel::KmodMinus(0), 8).unwrap();
        let b = build_operator(OperatorLabel::KMinus(Bargmann::HALF), 8).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = build_operator(OperatorLabel::Cosine, 5).unwrap();
        let l = build_operator(OperatorLabel::ShiftLower, 5).unwrap();
        let r = build_operator(OperatorLabel::ShiftRaise, 5).unwrap();
        assert_eq!(c.matrix(), &((l.matrix() + r.matrix()) * Complex64::new(0.5, 0.0)));
        assert_eq!(l.matrix()[(0, 1)], ONE);
        assert!(build_operator(OperatorLabel::Number, 1).is_err());
    }

    #[test]
    fn phase_kernel_reproduces_closed_fourier_coefficients() {
        let theta0 = -1.2;
        let k = phase_kernel(|t| Complex64::new(t, 0.0), theta0, 10, false);
        let p = build_operator(OperatorLabel::PhaseOp(theta0), 10).unwrap();
        let dev = (k - p.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn algebra_on_the_interior() {
        for tk in 1..=4 {
            let rep = algebra_check(AlgebraParams::Bargmann(Bargmann::from_twice(tk).unwrap()), 64).unwrap();
            assert!(rep.max_deviation() < 1e-12, "{rep:?}");
        }
        for s in 0..3 {
            let rep = algebra_check(AlgebraParams::Modified(s), 32).unwrap();
            assert!(rep.max_deviation() < 1e-12, "{rep:?}");
            assert_eq!(rep.casimir_value, -0.25);
        }
    }

    #[test]
    fn commutator_identity() {
        assert!(number_phase_commutator_deviation(0.3, 40).unwrap() < 1e-13);
    }

    #[test]
    fn eigen_residuals() {
        let z = Complex64::new(0.8, -0.5);
        let k = Bargmann::from_twice(3).unwrap();
        let a = states::amplitudes(&StateSpec::BarutGirardello { k, z }, 1e-14).unwrap();
        let op = build_operator(OperatorLabel::KMinus(k), a.cutoff()).unwrap();
        assert!(eigen_residual(&op, &a, z).unwrap() < 1e-13);
        let a = states::amplitudes(&StateSpec::PhilophaseMinus { z, sigma: -2 }, 1e-14).unwrap();
        let op = sigma_operator(z, a.cutoff()).unwrap();
        assert!(eigen_residual(&op, &a, Complex64::new(2.0, 0.0)).unwrap() < 1e-13);
        let bad = build_operator(OperatorLabel::Number, a.cutoff() + 1).unwrap();
        assert!(eigen_residual(&bad, &a, ZERO).is_err());
    }

    #[test]
    fn identity_resolutions() {
        let pairs = [(0, 0), (2, 5), (3, 3)];
        for fam in [
            IdentityFamily::Su11(Bargmann::ONE),
            IdentityFamily::Bg(Bargmann::HALF),
            IdentityFamily::Pplus(2),
        ] {
            assert!(identity_resolution_check(fam, &pairs).unwrap() < 1e-6, "{fam:?}");
        }
        assert!(identity_resolution_check(IdentityFamily::Su11(Bargmann::HALF), &pairs).is_err());
    }

    #[test]
    fn analytic_realizations() {
        for r in [
            Realization::Disk(Bargmann::from_twice(3).unwrap()),
            Realization::Circle,
            Realization::Plane(Bargmann::ONE),
            Realization::ModifiedPlane(2),
        ] {
            let rep = analytic_generator_check(r, 8).unwrap();
            assert!(rep.max_deviation < 1e-13, "{r:?}: {rep:?}");
        }
        let rep = analytic_generator_check(Realization::ModifiedPlane(2), 5).unwrap();
        assert!(rep.vacuum_raw.unwrap() > 0.5);
        assert_eq!(rep.vacuum_projected.unwrap(), 0.0);
    }

    #[test]
    fn boundary_reconstruction() {
        let vac = FockAmplitudes::from_coefficients(vec![ONE]).unwrap();
        assert!(boundary_reconstruction_check(&vac, Complex64::new(0.4, 0.2)).unwrap() < 1e-14);
        let a = states::amplitudes(&StateSpec::Su11Coherent { k: Bargmann::HALF, zeta: Complex64::new(0.5, 0.0) }, 1e-15)
            .unwrap();
        let z = Complex64::new(0.3, 0.0);
        assert!(boundary_reconstruction_check(&a, z).unwrap() < 1e-12);
        assert!(phase_like_deviation(0.999, 0.4, 5).unwrap() < phase_like_deviation(0.9, 0.4, 5).unwrap());
    }
}

//! Modified Bessel functions of integer order, log-factorials and the
//! truncated Bessel tails that normalize the philophase families.
//!
//! `I_n` is summed from its ascending power series. Every term is positive,
//! so the only error is rounding in the running sum. Above `x = 300` (or
//! when the leading term leaves the normal range) the same series is summed
//! around its largest term in log space.
//!
//! `K_0` and `K_1` come from the trapezoid rule applied to
//! `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(νt) dt`. The integrand is entire and
//! decays double-exponentially, so the rule converges geometrically in the
//! step. Higher orders follow by forward recurrence, which is stable for `K`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest order accepted by [`bessel_i`] and [`bessel_k`].
pub const MAX_BESSEL_ORDER: u32 = 8192;

/// Half-argument above which the direct series may overflow.
const DIRECT_HALF_ARG_LIMIT: f64 = 150.0;

/// Relative size of the geometric tail bound at which a series is stopped.
const SERIES_REL_TOL: f64 = 1e-17;

const MAX_SERIES_TERMS: u64 = 1_000_000;

const EXACT_FACTORIALS: [u64; 21] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5040,
    40320,
    362880,
    3628800,
    39916800,
    479001600,
    6227020800,
    87178291200,
    1307674368000,
    20922789888000,
    355687428096000,
    6402373705728000,
    121645100408832000,
    2432902008176640000,
];

/// `ln(n!)`.
///
/// Exact (to rounding of the logarithm) for `n ≤ 20`; Stirling's series with
/// four correction terms beyond, which is accurate to a few ulp there.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        return (EXACT_FACTORIALS[n as usize] as f64).ln();
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let correction =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + correction
}

fn check_order(order: u32) -> Result<()> {
    if order > MAX_BESSEL_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {order} exceeds the supported maximum {MAX_BESSEL_ORDER}"
        )));
    }
    Ok(())
}

fn check_nonneg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

/// `Σ_{j ≥ start} y^{2j+n} / (j! (j+n)!)` summed directly.
///
/// Returns `None` when the leading term is outside the comfortable normal
/// range and the caller should fall back to the log-space summation.
fn bessel_series_direct(order: u32, y: f64, start: u64) -> Option<f64> {
    if y > DIRECT_HALF_ARG_LIMIT {
        return None;
    }
    let n = order as f64;
    let mut term = 1.0;
    for i in 1..=order {
        term *= y / i as f64;
    }
    let q = y * y;
    for j in 0..start {
        term *= q / ((j as f64 + 1.0) * (j as f64 + n + 1.0));
    }
    if !term.is_finite() || term < 1e-280 {
        return None;
    }
    let mut sum = term;
    let mut j = start as f64;
    for _ in 0..MAX_SERIES_TERMS {
        let ratio = q / ((j + 1.0) * (j + n + 1.0));
        term *= ratio;
        sum += term;
        j += 1.0;
        let next = q / ((j + 1.0) * (j + n + 1.0));
        if next < 1.0 && term * next / (1.0 - next) <= SERIES_REL_TOL * sum {
            break;
        }
    }
    Some(sum)
}

/// Log of the same tail series, summed outwards from its largest term.
fn bessel_series_log(order: u32, y: f64, start: u64) -> f64 {
    if y == 0.0 {
        return if order == 0 && start == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let n = order as f64;
    let q = y * y;
    // The term ratio q / ((j+1)(j+n+1)) falls below one past the peak.
    let disc = (n * n + 4.0 * q).sqrt();
    let crossing = ((disc - n) / 2.0 - 1.0).ceil().max(0.0) as u64;
    let peak = crossing.max(start);
    let ln_y = y.ln();
    let ln_peak = (2.0 * peak as f64 + n) * ln_y
        - log_factorial(peak)
        - log_factorial(peak + order as u64);

    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = peak as f64;
    for _ in 0..MAX_SERIES_TERMS {
        let ratio = q / ((j + 1.0) * (j + n + 1.0));
        term *= ratio;
        sum += term;
        j += 1.0;
        let next = q / ((j + 1.0) * (j + n + 1.0));
        if next < 1.0 && term * next / (1.0 - next) <= SERIES_REL_TOL * sum {
            break;
        }
    }
    let mut term = 1.0;
    let mut j = peak;
    while j > start {
        let ratio = q / (j as f64 * (j as f64 + n));
        term /= ratio;
        sum += term;
        j -= 1;
        if term <= SERIES_REL_TOL * sum {
            break;
        }
    }
    ln_peak + sum.ln()
}

/// Modified Bessel function of the first kind, `I_order(x)`.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    match bessel_series_direct(order, 0.5 * x, 0) {
        Some(v) => Ok(v),
        None => Ok(bessel_series_log(order, 0.5 * x, 0).exp()),
    }
}

/// `ln I_order(x)`; finite wherever `I_order(x) > 0`, including where the
/// value itself overflows.
pub fn log_bessel_i(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    match bessel_series_direct(order, 0.5 * x, 0) {
        Some(v) => Ok(v.ln()),
        None => Ok(bessel_series_log(order, 0.5 * x, 0)),
    }
}

/// Ratio `I_top(x) / I_bottom(x)` without intermediate overflow.
pub fn bessel_i_ratio(top: u32, bottom: u32, x: f64) -> Result<f64> {
    check_order(top)?;
    check_order(bottom)?;
    check_nonneg(x)?;
    if x == 0.0 {
        return match (top, bottom) {
            (t, b) if t == b => Ok(1.0),
            (_, 0) => Ok(0.0),
            _ => Err(Error::Domain(format!(
                "I_{top}(0)/I_{bottom}(0) is 0/0"
            ))),
        };
    }
    let y = 0.5 * x;
    if let (Some(a), Some(b)) = (
        bessel_series_direct(top, y, 0),
        bessel_series_direct(bottom, y, 0),
    ) {
        return Ok(a / b);
    }
    Ok((bessel_series_log(top, y, 0) - bessel_series_log(bottom, y, 0)).exp())
}

/// Tail of the `I_order(2y)` power series, `Σ_{j ≥ start} y^{2j+order} / (j! (j+order)!)`.
///
/// `start = 0` gives `I_order(2y)` itself. The tail is summed directly, never
/// formed as a difference of the full function and a partial sum.
pub fn bessel_i_tail(order: u32, half_arg: f64, start: u64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(half_arg)?;
    if half_arg == 0.0 {
        return Ok(if order == 0 && start == 0 { 1.0 } else { 0.0 });
    }
    match bessel_series_direct(order, half_arg, start) {
        Some(v) => Ok(v),
        None => Ok(bessel_series_log(order, half_arg, start).exp()),
    }
}

/// `ln` of [`bessel_i_tail`].
pub fn log_bessel_i_tail(order: u32, half_arg: f64, start: u64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(half_arg)?;
    if half_arg == 0.0 {
        return Ok(if order == 0 && start == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    match bessel_series_direct(order, half_arg, start) {
        Some(v) => Ok(v.ln()),
        None => Ok(bessel_series_log(order, half_arg, start)),
    }
}

/// The entire function `Σ_{j ≥ start} u^j / (j! (j+order)!)` of a complex
/// argument.
///
/// With `start = 0` this equals `I_order(2√u) / u^{order/2}` for any branch of
/// the root, which is how overlaps of Bessel-normalized states avoid branch
/// bookkeeping.
pub fn bessel_entire_tail(order: u32, u: Complex64, start: u64) -> Complex64 {
    let n = order as f64;
    let mut ln_mag = -log_factorial(start) - log_factorial(start + order as u64);
    let (mut term, abs_u) = if u == Complex64::new(0.0, 0.0) {
        if start > 0 {
            return Complex64::new(0.0, 0.0);
        }
        (Complex64::new(ln_mag.exp(), 0.0), 0.0)
    } else {
        ln_mag += start as f64 * u.norm().ln();
        let phase = start as f64 * u.arg();
        (Complex64::from_polar(ln_mag.exp(), phase), u.norm())
    };
    let mut sum = term;
    let mut j = start as f64;
    let mut abs_sum = term.norm();
    for _ in 0..MAX_SERIES_TERMS {
        let scale = 1.0 / ((j + 1.0) * (j + n + 1.0));
        term = term * u * scale;
        sum += term;
        abs_sum += term.norm();
        j += 1.0;
        let next = abs_u / ((j + 1.0) * (j + n + 1.0));
        if next < 1.0 && term.norm() * next / (1.0 - next) <= SERIES_REL_TOL * abs_sum {
            break;
        }
    }
    sum
}

/// `e^x K_ν(x)` for `ν ∈ {0, 1}` from the trapezoid rule on the integral
/// representation.
fn scaled_k01(x: f64) -> (f64, f64) {
    let h = if x <= 9.0 { 0.2 } else { 0.6 / x.sqrt() };
    let mut k0 = 0.5;
    let mut k1 = 0.5;
    let mut step = 1u32;
    loop {
        let t = step as f64 * h;
        let c = t.cosh();
        let w = (-x * (c - 1.0)).exp();
        let f0 = w;
        let f1 = w * c;
        k0 += f0;
        k1 += f1;
        // Past the peak of the order-one integrand both are decreasing.
        if x * (c - 1.0) > t + 10.0 && f1 <= 1e-19 * k1 {
            break;
        }
        step += 1;
    }
    (k0 * h, k1 * h)
}

/// `e^x K_order(x)` for `x > 0`.
pub fn bessel_k_scaled(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "K_n(x) needs a finite positive argument, got {x}"
        )));
    }
    let (k0, k1) = scaled_k01(x);
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for nu in 1..order {
                let next = prev + 2.0 * nu as f64 / x * cur;
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

/// Modified Bessel function of the second kind, `K_order(x)`, `x > 0`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}

/// `ln K_order(x)`.
pub fn log_bessel_k(order: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)?.ln() - x)
}

/// The two truncated Bessel sums that normalize `|z, σ⟩₊` and enter its
/// photon statistics.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TruncatedSums {
    pub abs_z: f64,
    pub sigma: u32,
    /// `I₀(2|z|) − Σ_{m<σ} |z|^{2m}/(m!)²`.
    pub t0: f64,
    /// `I₁(2|z|) − Σ_{m<σ−1} |z|^{2m+1}/(m!(m+1)!)`.
    pub t1: f64,
}

/// Evaluate `T₀(|z|, σ)` and `T₁(|z|, σ)` as convergent tails.
pub fn truncated_sums(abs_z: f64, sigma: u32) -> Result<TruncatedSums> {
    check_nonneg(abs_z)?;
    Ok(TruncatedSums {
        abs_z,
        sigma,
        t0: bessel_i_tail(0, abs_z, sigma as u64)?,
        t1: bessel_i_tail(1, abs_z, sigma.saturating_sub(1) as u64)?,
    })
}

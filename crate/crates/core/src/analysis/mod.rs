//! Closed-form security quantities, used as oracles for the Monte Carlo
//! experiments.
//!
//! Binomial quantities are evaluated in log space so that sweeps up to
//! `n = 10^4` stay finite. Every returned probability is clamped to `[0, 1]`.

use std::f64::consts::{FRAC_PI_8, PI};

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quantum::{trace_norm, DensityOp, StatePair};

pub mod special;

pub use special::erf;
use special::{ln_binomial_pmf, ln_binomial_range, ln_choose};

fn clamp01(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("{name} must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Optimal unambiguous discrimination probability `1 - cos A`.
pub fn p_usd(cos_a: f64) -> Result<f64> {
    check_prob("cos A", cos_a)?;
    Ok(1.0 - cos_a)
}

/// Range of `p_A` allowed by the overlap constraint at a given `delta`:
/// `[1 - sqrt(1 - delta), 1 - sqrt(1/2 + delta)]`.
pub fn p_usd_bounds(delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::param(format!(
            "delta must lie in (0, 1/4], got {delta}"
        )));
    }
    Ok((1.0 - (1.0 - delta).sqrt(), 1.0 - (0.5 + delta).sqrt()))
}

/// Single-shot Breidbart success `cos^2(pi/8)`.
pub fn breidbart_rate() -> f64 {
    FRAC_PI_8.cos().powi(2)
}

/// Component recovery when measuring four-state qubits in random bases.
pub const RANDOM_BASIS_RATE: f64 = 0.75;

/// Minimal string counts for a binding confidence `1 - e^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinStrings {
    /// Escape probability per string taken as `sin^2 A`.
    pub sin2: u64,
    /// Escape probability per string taken as `cos^2 A`, the Born-rule pass
    /// probability of one lying qubit.
    pub cos2: u64,
}

/// Smallest `m` with `s^m < e^-alpha`, i.e. `1 - s^m > 1 - e^-alpha`.
fn min_m_for(alpha: f64, s: f64) -> u64 {
    // m > alpha / (-ln s)
    let bound = alpha / -s.ln();
    let mut m = bound.floor().max(0.0) as u64 + 1;
    // guard the floor against rounding in either direction
    while m > 1 && (m - 1) as f64 * s.ln() < -alpha {
        m -= 1;
    }
    while m as f64 * s.ln() >= -alpha {
        m += 1;
    }
    m
}

pub fn binding_min_m(alpha: f64, cos_a: f64) -> Result<MinStrings> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha must be positive, got {alpha}")));
    }
    check_prob("cos A", cos_a)?;
    let c2 = cos_a * cos_a;
    Ok(MinStrings {
        sin2: min_m_for(alpha, 1.0 - c2),
        cos2: min_m_for(alpha, c2),
    })
}

/// Detection probability `1 - (sin^2 A)^m`, the commonly quoted form of the
/// binding bound.
pub fn binding_detection_sin2(m: u32, cos_a: f64) -> f64 {
    clamp01(1.0 - (1.0 - cos_a * cos_a).powi(m as i32))
}

/// Detection probability `1 - (cos^2 A)^m` when every string lies in exactly
/// one position and Bob verifies in the claimed-state basis.
pub fn binding_detection_cos2(m: u32, cos_a: f64) -> f64 {
    clamp01(1.0 - (cos_a * cos_a).powi(m as i32))
}

/// Both sides of the probe-attack failure identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eq12Sides {
    pub closed_form: f64,
    pub binomial_sum: f64,
}

/// `sum_k C(m,k) 2^-m [1 - (cos^2 A)^(m-k)]` and `1 - ((1 + cos^2 A)/2)^m`.
pub fn eq12_sides(m: u32, cos_a: f64) -> Result<Eq12Sides> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    if !(0.0..=1.0).contains(&cos_a) {
        return Err(Error::param(format!(
            "cos A must lie in [0, 1], got {cos_a}"
        )));
    }
    let c2 = cos_a * cos_a;
    let closed_form = 1.0 - ((1.0 + c2) / 2.0).powi(m as i32);
    let binomial_sum = (0..=m)
        .map(|k| {
            let w = (ln_choose(m as u64, k as u64) - m as f64 * 2f64.ln()).exp();
            w * (1.0 - c2.powi((m - k) as i32))
        })
        .sum();
    Ok(Eq12Sides {
        closed_form: clamp01(closed_form),
        binomial_sum: clamp01(binomial_sum),
    })
}

/// Failure probability of the one-probe-per-string committer attack.
pub fn eq12_failure(m: u32, cos_a: f64) -> Result<f64> {
    let sides = eq12_sides(m, cos_a)?;
    debug_assert!((sides.closed_form - sides.binomial_sum).abs() < 1e-12);
    Ok(sides.closed_form)
}

fn check_concealing(n: u64, n0: u64, p: f64) -> Result<()> {
    if n0 >= n {
        return Err(Error::param(format!("need n0 < n, got n0 = {n0}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p_A must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Probability that unambiguous discrimination reveals at most `n0` of `n`
/// positions: `sum_{k<=n0} C(n,k) p^k (1-p)^(n-k)`.
pub fn concealing_exact(n: u64, n0: u64, p_a: f64) -> Result<f64> {
    check_concealing(n, n0, p_a)?;
    // Sum whichever side has fewer terms; the tail side keeps precision near 1.
    if n0 + 1 > n - n0 {
        Ok(clamp01(1.0 - concealing_tail(n, n0, p_a)?))
    } else {
        Ok(clamp01(ln_binomial_range(n, 0, n0, p_a).exp()))
    }
}

/// `1 - concealing_exact`, evaluated directly: `P[Bin(n, p) > n0]`.
pub fn concealing_tail(n: u64, n0: u64, p_a: f64) -> Result<f64> {
    check_concealing(n, n0, p_a)?;
    Ok(clamp01(ln_binomial_range(n, n0 + 1, n, p_a).exp()))
}

/// `lambda = n0/(n p)`, `lambda1 = sqrt(p/(1-p))`, `lambda2 = (lambda-1) lambda1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalTerms {
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn normal_terms(n: u64, n0: u64, p_a: f64) -> Result<NormalTerms> {
    check_concealing(n, n0, p_a)?;
    check_prob("p_A", p_a)?;
    let lambda = n0 as f64 / (n as f64 * p_a);
    let lambda1 = (p_a / (1.0 - p_a)).sqrt();
    Ok(NormalTerms {
        lambda,
        lambda1,
        lambda2: (lambda - 1.0) * lambda1,
    })
}

/// De Moivre-Laplace value `(erf(l1 sqrt(n/2)) + erf(l2 sqrt(n/2))) / 2`.
pub fn concealing_dml(n: u64, n0: u64, p_a: f64) -> Result<f64> {
    let t = normal_terms(n, n0, p_a)?;
    let s = (n as f64 / 2.0).sqrt();
    Ok(clamp01(0.5 * (erf(t.lambda1 * s) + erf(t.lambda2 * s))))
}

/// The large-`n` tail expansion under two readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticReadings {
    /// `(2 pi n)^-1/2 [e^(-l1^2 n/2)/l1 + e^(-l2^2 n/2)/l2]`, as written.
    pub as_printed: f64,
    /// `1 - as_printed`: the expression read as the two neglected tails.
    pub complement: f64,
}

impl AsymptoticReadings {
    /// Which reading lies closer to `exact`.
    pub fn closer_reading(&self, exact: f64) -> &'static str {
        if (self.complement - exact).abs() <= (self.as_printed - exact).abs() {
            "complement"
        } else {
            "as-printed"
        }
    }
}

pub fn concealing_asymptotic(n: u64, n0: u64, p_a: f64) -> Result<AsymptoticReadings> {
    let t = normal_terms(n, n0, p_a)?;
    if t.lambda2 <= 0.0 {
        return Err(Error::domain(format!(
            "asymptotic expansion needs lambda2 > 0, got {}",
            t.lambda2
        )));
    }
    let nf = n as f64;
    let v = ((-0.5 * t.lambda1 * t.lambda1 * nf).exp() / t.lambda1
        + (-0.5 * t.lambda2 * t.lambda2 * nf).exp() / t.lambda2)
        / (2.0 * PI * nf).sqrt();
    Ok(AsymptoticReadings {
        as_printed: v,
        complement: 1.0 - v,
    })
}

/// Probability that at least one of `m` strings reveals more than `n0`
/// positions: `1 - concealing_exact^m`.
pub fn bob_cheat_prob(n: u64, n0: u64, p_a: f64, m: u32) -> Result<f64> {
    let tail = concealing_tail(n, n0, p_a)?;
    // 1 - (1 - tail)^m without cancellation
    Ok(clamp01(-(m as f64 * (-tail).ln_1p()).exp_m1()))
}

/// Upper bound on the receiver's probability of guessing the committed bit:
/// a fair coin unless some string leaks more than `n0` positions.
pub fn bob_guess_bound(n: u64, n0: u64, p_a: f64, m: u32) -> Result<f64> {
    Ok(0.5 + 0.5 * bob_cheat_prob(n, n0, p_a, m)?)
}

/// Guess probability against `F(a) = a_1`: correct whenever some string
/// reveals its first position, a coin flip otherwise.
pub fn dictator_guess_rate(m: u32, p_a: f64) -> f64 {
    1.0 - 0.5 * (1.0 - p_a).powi(m as i32)
}

/// Smallest `n` (with `n0 = n - gap`) such that
/// `concealing_exact(n, n0, p)^m > 1 - e^-beta`.
pub fn min_n_for_beta(beta: f64, m: u32, p_a: f64, gap: u64) -> Result<u64> {
    const MAX_N: u64 = 10_000_000;
    if !(beta > 0.0) {
        return Err(Error::param("beta must be positive"));
    }
    if m == 0 || gap == 0 {
        return Err(Error::param("m and the gap n - n0 must be positive"));
    }
    check_prob("p_A", p_a)?;
    // condition on the tail: tail < 1 - (1 - e^-beta)^(1/m)
    let allowed = -((-(-beta).exp()).ln_1p() / m as f64).exp_m1();
    let ln_allowed = allowed.ln();
    let mut n = gap;
    while n <= MAX_N {
        let n0 = n - gap;
        let ln_tail = ln_binomial_range(n, n0 + 1, n, p_a);
        if ln_tail < ln_allowed {
            return Ok(n);
        }
        n += 1;
    }
    Err(Error::domain(format!(
        "no n up to {MAX_N} reaches beta = {beta} at p_A = {p_a}"
    )))
}

/// Whether `n` satisfies the threshold used by [`min_n_for_beta`].
pub fn meets_beta(n: u64, beta: f64, m: u32, p_a: f64, gap: u64) -> bool {
    if n < gap {
        return false;
    }
    let allowed = -((-(-beta).exp()).ln_1p() / m as f64).exp_m1();
    ln_binomial_range(n, n - gap + 1, n, p_a) < allowed.ln()
}

/// Trace distance between two blobs whose strings each differ in one
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlobDistance {
    /// `sin A / n`.
    pub analytic: f64,
    /// `(1/(2mn)) sum_j tr|D_j|` with `D_j` the per-string operator difference,
    /// from eigenvalues.
    pub numeric: f64,
    /// `(1/(2mn)) tr|sum_j D_j|`, never larger than `numeric`.
    pub summed: f64,
}

pub fn blob_trace_distance(
    pair: &StatePair,
    a: &[BitString],
    a_prime: &[BitString],
) -> Result<BlobDistance> {
    if a.is_empty() || a.len() != a_prime.len() {
        return Err(Error::param(
            "need the same nonzero number of strings on both sides",
        ));
    }
    let n = a[0].len();
    if n == 0 {
        return Err(Error::param("empty strings"));
    }
    let m = a.len();
    let zero =
        DensityOp::from_pure(pair.psi0()).matrix().clone() * num_complex::Complex64::new(0.0, 0.0);
    let mut per_string = 0.0;
    let mut total = zero.clone();
    for (j, (x, y)) in a.iter().zip(a_prime).enumerate() {
        if x.len() != n || y.len() != n {
            return Err(Error::param("strings have different lengths"));
        }
        if x.hamming(y) != 1 {
            return Err(Error::param(format!(
                "string {j} differs in {} positions; exactly one is required",
                x.hamming(y)
            )));
        }
        let mut diff = zero.clone();
        for (u, v) in x.iter().zip(y.iter()) {
            if u != v {
                diff += DensityOp::from_pure(pair.state(u)).matrix()
                    - DensityOp::from_pure(pair.state(v)).matrix();
            }
        }
        per_string += trace_norm(&diff);
        total += diff;
    }
    let scale = 1.0 / (2.0 * m as f64 * n as f64);
    Ok(BlobDistance {
        analytic: pair.sin_a() / n as f64,
        numeric: per_string * scale,
        summed: trace_norm(&total) * scale,
    })
}

/// `P[Bin(n, q) > n/2] + P[Bin(n, q) = n/2] / 2`: majority vote with fair
/// tie-breaking.
pub fn majority_success(n: u64, q: f64) -> f64 {
    let above = ln_binomial_range(n, n / 2 + 1, n, q).exp();
    let tie = if n % 2 == 0 {
        0.5 * ln_binomial_pmf(n, n / 2, q).exp()
    } else {
        0.0
    };
    clamp01(above + tie)
}

/// Success of the one-probe-per-string committer attack against the
/// two-state protocol: `((1 + cos^2 A)/2)^m`.
pub fn probe_attack_b92_success(m: u32, cos_a: f64) -> f64 {
    ((1.0 + cos_a * cos_a) / 2.0).powi(m as i32)
}

/// One row of a formula comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaRow {
    pub formula: String,
    pub params: String,
    pub value: f64,
    pub oracle: f64,
    pub abs_diff: f64,
}

impl FormulaRow {
    pub fn new(formula: &str, params: String, value: f64, oracle: f64) -> Self {
        Self {
            formula: formula.to_string(),
            params,
            value,
            oracle,
            abs_diff: (value - oracle).abs(),
        }
    }
}

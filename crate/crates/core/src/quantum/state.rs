use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalization and orthonormality checks.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A single-qubit pure state `a0|0> + a1|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amps: [Complex64; 2],
}

impl PureState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::param(format!(
                "state is not normalized: squared norm {norm}"
            )));
        }
        Ok(Self { amps: [a0, a1] })
    }

    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    pub(crate) const fn real_unchecked(a0: f64, a1: f64) -> Self {
        Self {
            amps: [Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)],
        }
    }

    pub const fn zero() -> Self {
        Self::real_unchecked(1.0, 0.0)
    }

    pub const fn one() -> Self {
        Self::real_unchecked(0.0, 1.0)
    }

    pub const fn plus() -> Self {
        Self::real_unchecked(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    }

    pub const fn minus() -> Self {
        Self::real_unchecked(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)
    }

    /// The four-state alphabet `{|0>, |1>, |+>, |->}` indexed by (basis, bit):
    /// basis 0 is computational, basis 1 is Hadamard.
    pub const fn bb84(basis: u8, bit: u8) -> Self {
        match (basis & 1, bit & 1) {
            (0, 0) => Self::zero(),
            (0, _) => Self::one(),
            (_, 0) => Self::plus(),
            _ => Self::minus(),
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]
    }

    /// `|<self|other>|`
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm()
    }

    /// The state orthogonal to `self`, with the phase convention `(-a1*, a0*)`.
    pub fn orthogonal(&self) -> PureState {
        Self {
            amps: [-self.amps[1].conj(), self.amps[0].conj()],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps[0].norm_sqr() + self.amps[1].norm_sqr()
    }
}

/// An orthonormal single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    vectors: [PureState; 2],
}

impl Basis {
    pub fn new(v0: PureState, v1: PureState) -> Result<Self> {
        let n0 = v0.norm_sqr();
        let n1 = v1.norm_sqr();
        let cross = v0.inner(&v1).norm();
        if (n0 - 1.0).abs() > NORM_TOL || (n1 - 1.0).abs() > NORM_TOL || cross > NORM_TOL {
            return Err(Error::param(format!(
                "basis is not orthonormal (norms {n0}, {n1}; overlap {cross})"
            )));
        }
        Ok(Self { vectors: [v0, v1] })
    }

    pub const fn computational() -> Self {
        Self {
            vectors: [PureState::zero(), PureState::one()],
        }
    }

    pub const fn hadamard() -> Self {
        Self {
            vectors: [PureState::plus(), PureState::minus()],
        }
    }

    /// Computational basis for `0`, Hadamard for `1`.
    pub const fn bb84(basis: u8) -> Self {
        if basis & 1 == 0 {
            Self::computational()
        } else {
            Self::hadamard()
        }
    }

    /// The intermediate basis rotated by pi/8 from the computational basis.
    pub fn breidbart() -> Self {
        let (s, c) = FRAC_PI_8.sin_cos();
        Self {
            vectors: [
                PureState::real_unchecked(c, s),
                PureState::real_unchecked(-s, c),
            ],
        }
    }

    /// `{state, state^perp}`: outcome 0 confirms `state`.
    pub fn containing(state: &PureState) -> Self {
        Self {
            vectors: [*state, state.orthogonal()],
        }
    }

    pub fn vector(&self, outcome: u8) -> &PureState {
        &self.vectors[usize::from(outcome & 1)]
    }

    /// Born-rule probabilities of both outcomes, clamped to `[0, 1]`.
    pub fn probabilities(&self, state: &PureState) -> [f64; 2] {
        let p0 = self.vectors[0].inner(state).norm_sqr().clamp(0.0, 1.0);
        let p1 = self.vectors[1].inner(state).norm_sqr().clamp(0.0, 1.0);
        [p0, p1]
    }
}

/// Two nonorthogonal signal states with `<psi0|psi1> = cos A`.
///
/// The states are fixed in the symmetric real gauge
/// `|psi_b> = cos(A/2)|0> +/- sin(A/2)|1>`, with `+` for `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairParams", into = "PairParams")]
pub struct StatePair {
    cos_a: f64,
    delta: f64,
    psi0: PureState,
    psi1: PureState,
}

#[derive(Serialize, Deserialize)]
struct PairParams {
    cos_a: f64,
    delta: f64,
}

impl TryFrom<PairParams> for StatePair {
    type Error = Error;
    fn try_from(p: PairParams) -> Result<Self> {
        make_state_pair(p.cos_a, p.delta)
    }
}

impl From<StatePair> for PairParams {
    fn from(p: StatePair) -> Self {
        PairParams {
            cos_a: p.cos_a,
            delta: p.delta,
        }
    }
}

/// Builds a validated state pair.
///
/// Requires `cos_a` in `(0, 1)`, `delta` in `(0, 1/4]` and
/// `1/2 + delta <= cos_a^2 <= 1 - delta`.
pub fn make_state_pair(cos_a: f64, delta: f64) -> Result<StatePair> {
    if !cos_a.is_finite() || cos_a <= 0.0 || cos_a >= 1.0 {
        return Err(Error::param(format!(
            "cos A must lie in (0, 1), got {cos_a}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 || delta > 0.25 {
        return Err(Error::param(format!(
            "delta must lie in (0, 1/4], got {delta}"
        )));
    }
    let c2 = cos_a * cos_a;
    // Slack of a few ulps so that boundary values like sqrt(0.75) with delta = 1/4 pass.
    let slack = 4.0 * f64::EPSILON;
    if c2 < 0.5 + delta - slack {
        return Err(Error::param(format!(
            "overlap constraint 1/2 + delta <= cos^2 A violated: {c2} < {}",
            0.5 + delta
        )));
    }
    if c2 > 1.0 - delta + slack {
        return Err(Error::param(format!(
            "overlap constraint cos^2 A <= 1 - delta violated: {c2} > {}",
            1.0 - delta
        )));
    }
    Ok(StatePair::build(cos_a, delta))
}

impl StatePair {
    fn build(cos_a: f64, delta: f64) -> Self {
        let half = cos_a.acos() / 2.0;
        let (s, c) = half.sin_cos();
        Self {
            cos_a,
            delta,
            psi0: PureState::real_unchecked(c, s),
            psi1: PureState::real_unchecked(c, -s),
        }
    }

    /// Largest admissible `delta` for a given overlap, capped at 1/4.
    pub fn widest_delta(cos_a: f64) -> f64 {
        let c2 = cos_a * cos_a;
        (c2 - 0.5).min(1.0 - c2).min(0.25)
    }

    /// Pair with the widest admissible `delta` for `cos_a`.
    pub fn with_cos(cos_a: f64) -> Result<Self> {
        make_state_pair(cos_a, Self::widest_delta(cos_a))
    }

    pub fn cos_a(&self) -> f64 {
        self.cos_a
    }

    pub fn sin_a(&self) -> f64 {
        (1.0 - self.cos_a * self.cos_a).sqrt()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }

    pub fn psi1(&self) -> &PureState {
        &self.psi1
    }

    pub fn state(&self, bit: u8) -> &PureState {
        if bit & 1 == 0 {
            &self.psi0
        } else {
            &self.psi1
        }
    }

    /// Optimal unambiguous discrimination rate `1 - cos A`.
    pub fn usd_success(&self) -> f64 {
        1.0 - self.cos_a
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [r0, i0, r1, i1] = <[f64; 4]>::deserialize(d)?;
        PureState::new(Complex64::new(r0, i0), Complex64::new(r1, i1))
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [
            self.amps[0].re,
            self.amps[0].im,
            self.amps[1].re,
            self.amps[1].im,
        ]
        .serialize(s)
    }
}

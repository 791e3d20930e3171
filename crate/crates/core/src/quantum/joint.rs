use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityOp;
use super::measure::{sample_index, Povm};
use super::state::{Basis, PureState, StatePair, NORM_TOL, ZERO};
use crate::error::{Error, Result};

/// Largest joint register, in qubits.
pub const MAX_JOINT_QUBITS: usize = 4;

/// Which party a tensor factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Held by the committer.
    Probe,
    /// Transmitted to the receiver.
    Signal,
}

/// A pure state of up to four qubits. Qubit 0 is the most significant bit of
/// the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    roles: Vec<Role>,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn new(roles: Vec<Role>, amps: Vec<Complex64>) -> Result<Self> {
        let q = roles.len();
        if q == 0 || q > MAX_JOINT_QUBITS {
            return Err(Error::param(format!(
                "joint register must hold 1..={MAX_JOINT_QUBITS} qubits, got {q}"
            )));
        }
        if amps.len() != 1 << q {
            return Err(Error::param(format!(
                "{} amplitudes for {q} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::param(format!("joint state squared norm {norm}")));
        }
        Ok(Self { roles, amps })
    }

    pub fn product(factors: &[(Role, PureState)]) -> Result<Self> {
        let roles = factors.iter().map(|(r, _)| *r).collect::<Vec<_>>();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (_, s) in factors {
            let a = s.amplitudes();
            amps = amps.iter().flat_map(|x| [x * a[0], x * a[1]]).collect();
        }
        Self::new(roles, amps)
    }

    /// `(|0>|s0> + |1>|s1>) / N` with the probe as qubit 0.
    pub fn entangle_with_probe(s0: &PureState, s1: &PureState) -> Self {
        let a = s0.amplitudes();
        let b = s1.amplitudes();
        Self {
            roles: vec![Role::Probe, Role::Signal],
            amps: vec![
                a[0] * FRAC_1_SQRT_2,
                a[1] * FRAC_1_SQRT_2,
                b[0] * FRAC_1_SQRT_2,
                b[1] * FRAC_1_SQRT_2,
            ],
        }
    }

    /// `(|00> + |11>)/sqrt(2)`, probe first.
    pub fn bell_pair() -> Self {
        Self::entangle_with_probe(&PureState::zero(), &PureState::one())
    }

    pub fn qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubits_with(&self, role: Role) -> Vec<usize> {
        (0..self.qubits())
            .filter(|&q| self.roles[q] == role)
            .collect()
    }

    fn bit_of(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.qubits() - 1 - qubit)) & 1
    }

    /// Unnormalized projection of `qubit` onto `vector`, returned as the
    /// amplitudes of the full register with that qubit set to `vector`.
    fn project_raw(&self, qubit: usize, vector: &PureState) -> Vec<Complex64> {
        let v = vector.amplitudes();
        let shift = self.qubits() - 1 - qubit;
        let mut out = vec![ZERO; self.dim()];
        for idx in 0..self.dim() {
            if self.bit_of(idx, qubit) != 0 {
                continue;
            }
            let partner = idx | (1 << shift);
            // <v| on this qubit
            let coeff = v[0].conj() * self.amps[idx] + v[1].conj() * self.amps[partner];
            out[idx] = coeff * v[0];
            out[partner] = coeff * v[1];
        }
        out
    }

    pub fn outcome_probabilities(&self, qubit: usize, basis: &Basis) -> Result<[f64; 2]> {
        self.check_qubit(qubit)?;
        let p = |o: u8| {
            self.project_raw(qubit, basis.vector(o))
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                .clamp(0.0, 1.0)
        };
        Ok([p(0), p(1)])
    }

    /// Post-measurement state for a given outcome, with its probability.
    /// Returns `None` when the outcome has zero probability.
    pub fn project(
        &self,
        qubit: usize,
        basis: &Basis,
        outcome: u8,
    ) -> Result<Option<(f64, JointState)>> {
        self.check_qubit(qubit)?;
        let raw = self.project_raw(qubit, basis.vector(outcome));
        let p: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
        if p <= NORM_TOL * NORM_TOL {
            return Ok(None);
        }
        let norm = p.sqrt();
        Ok(Some((
            p.clamp(0.0, 1.0),
            JointState {
                roles: self.roles.clone(),
                amps: raw.into_iter().map(|a| a / norm).collect(),
            },
        )))
    }

    /// Measures one qubit in `basis`, collapsing the register in place.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: &Basis,
        rng: &mut R,
    ) -> Result<u8> {
        let probs = self.outcome_probabilities(qubit, basis)?;
        let outcome = sample_index(&probs, rng) as u8;
        if let Some((_, post)) = self.project(qubit, basis, outcome)? {
            *self = post;
        }
        Ok(outcome)
    }

    /// Applies a single-qubit operator to `qubit` without renormalizing.
    fn apply_raw(&self, qubit: usize, op: &DMatrix<Complex64>) -> Vec<Complex64> {
        let shift = self.qubits() - 1 - qubit;
        let mut out = vec![ZERO; self.dim()];
        for idx in 0..self.dim() {
            if self.bit_of(idx, qubit) != 0 {
                continue;
            }
            let partner = idx | (1 << shift);
            let (x0, x1) = (self.amps[idx], self.amps[partner]);
            out[idx] = op[(0, 0)] * x0 + op[(0, 1)] * x1;
            out[partner] = op[(1, 0)] * x0 + op[(1, 1)] * x1;
        }
        out
    }

    /// Generalized measurement of one qubit with Lueders post-state
    /// `sqrt(E_k)|psi>`; returns the element index.
    pub fn measure_povm<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        povm: &Povm,
        rng: &mut R,
    ) -> Result<usize> {
        self.check_qubit(qubit)?;
        let branches: Vec<Vec<Complex64>> = povm
            .kraus_operators()
            .iter()
            .map(|k| self.apply_raw(qubit, k))
            .collect();
        let probs: Vec<f64> = branches
            .iter()
            .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        let k = sample_index(&probs, rng);
        let norm = probs[k].sqrt();
        if norm > NORM_TOL {
            self.amps = branches[k].iter().map(|a| a / norm).collect();
        }
        Ok(k)
    }

    /// Reduced density operator of the listed qubits (one or two, in order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOp> {
        if keep.is_empty() || keep.len() > 2 {
            return Err(Error::param("can keep one or two qubits"));
        }
        for &k in keep {
            self.check_qubit(k)?;
        }
        if keep.len() == 2 && keep[0] == keep[1] {
            return Err(Error::param("kept qubits must be distinct"));
        }
        let traced: Vec<usize> = (0..self.qubits()).filter(|q| !keep.contains(q)).collect();
        let kd = 1 << keep.len();
        let mut m = DMatrix::from_element(kd, kd, ZERO);
        let compose = |kept: usize, rest: usize| -> usize {
            let mut idx = 0usize;
            let q = self.qubits();
            for (pos, &k) in keep.iter().enumerate() {
                let bit = (kept >> (keep.len() - 1 - pos)) & 1;
                idx |= bit << (q - 1 - k);
            }
            for (pos, &t) in traced.iter().enumerate() {
                let bit = (rest >> (traced.len() - 1 - pos)) & 1;
                idx |= bit << (q - 1 - t);
            }
            idx
        };
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = ZERO;
                for t in 0..(1usize << traced.len()) {
                    acc += self.amps[compose(r, t)] * self.amps[compose(c, t)].conj();
                }
                m[(r, c)] = acc;
            }
        }
        Ok(DensityOp::from_matrix_unchecked(m))
    }

    /// Reduced operator of every qubit carrying `keep`.
    pub fn partial_trace(&self, keep: Role) -> Result<DensityOp> {
        let qs = self.qubits_with(keep);
        if qs.is_empty() {
            return Err(Error::param(format!("register has no {keep:?} factor")));
        }
        self.reduced(&qs)
    }

    /// Full density operator of a register of at most two qubits.
    pub fn density(&self) -> Result<DensityOp> {
        if self.qubits() > 2 {
            return Err(Error::param("full density operator limited to two qubits"));
        }
        Ok(DensityOp::from_vector(&self.amps))
    }

    /// Largest entrywise change of the reduced state of `observed` caused by
    /// measuring `measured` in `basis`, averaged over outcomes. Zero up to
    /// rounding for any valid quantum state.
    pub fn no_signaling_gap(
        &self,
        measured: usize,
        basis: &Basis,
        observed: &[usize],
    ) -> Result<f64> {
        let before = self.reduced(observed)?;
        let dim = before.dim();
        let mut after = DMatrix::from_element(dim, dim, ZERO);
        for o in 0..2u8 {
            if let Some((p, post)) = self.project(measured, basis, o)? {
                after += post.reduced(observed)?.matrix() * Complex64::new(p, 0.0);
            }
        }
        Ok(before.max_abs_diff(&DensityOp::from_matrix_unchecked(after)))
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits() {
            return Err(Error::param(format!(
                "qubit {qubit} out of range for a {}-qubit register",
                self.qubits()
            )));
        }
        Ok(())
    }
}

/// Entangles the pair's two states with an orthogonal probe:
/// `(|0>|psi0> + |1>|psi1>)/sqrt(2)`.
pub fn probe_entangle(pair: &StatePair) -> JointState {
    JointState::entangle_with_probe(pair.psi0(), pair.psi1())
}

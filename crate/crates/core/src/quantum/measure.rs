use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::{hermitian_eigenvalues, outer};
use super::state::{Basis, PureState, StatePair, ZERO};
use crate::error::{Error, Result};

/// Result of an unambiguous discrimination attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UsdOutcome {
    Identified(u8),
    Inconclusive,
}

impl UsdOutcome {
    pub fn bit(self) -> Option<u8> {
        match self {
            UsdOutcome::Identified(b) => Some(b),
            UsdOutcome::Inconclusive => None,
        }
    }
}

/// Draws an index from (possibly slightly unnormalized) probabilities.
/// Each entry is clamped to `[0, 1]`; the last index absorbs any remainder.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p.clamp(0.0, 1.0);
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Measures `state` in `basis`; returns the outcome and the collapsed state.
pub fn projective_measure<R: Rng + ?Sized>(
    state: &PureState,
    basis: &Basis,
    rng: &mut R,
) -> (u8, PureState) {
    let probs = basis.probabilities(state);
    let outcome = sample_index(&probs, rng) as u8;
    (outcome, *basis.vector(outcome))
}

/// Measurement in the pi/8 intermediate basis.
pub fn breidbart_measure<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> u8 {
    projective_measure(state, &Basis::breidbart(), rng).0
}

/// A single-qubit POVM.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<DMatrix<Complex64>>,
}

impl Povm {
    pub fn new(elements: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let povm = Self { elements };
        let defect = povm.completeness_defect();
        if defect > 1e-10 {
            return Err(Error::param(format!(
                "POVM elements do not sum to identity (defect {defect})"
            )));
        }
        let min = povm.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::param(format!("POVM element has eigenvalue {min}")));
        }
        Ok(povm)
    }

    /// Three-outcome unambiguous discrimination measurement for `pair`:
    /// `E_b = |psi_{1-b}^perp><psi_{1-b}^perp| / (1 + cos A)` and
    /// `E_? = I - E_0 - E_1`. Element order is `[E_0, E_1, E_?]`.
    pub fn usd(pair: &StatePair) -> Self {
        let scale = Complex64::new(1.0 / (1.0 + pair.cos_a()), 0.0);
        let e0 = outer(&pair.psi1().orthogonal()) * scale;
        let e1 = outer(&pair.psi0().orthogonal()) * scale;
        let e_inc = DMatrix::<Complex64>::identity(2, 2) - &e0 - &e1;
        Self {
            elements: vec![e0, e1, e_inc],
        }
    }

    /// `sqrt(E_k)` for each element.
    pub fn kraus_operators(&self) -> Vec<DMatrix<Complex64>> {
        self.elements
            .iter()
            .map(|e| {
                let eig = SymmetricEigen::new(e.clone());
                let sqrt = eig
                    .eigenvalues
                    .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
                let v = &eig.eigenvectors;
                v * DMatrix::from_diagonal(&sqrt) * v.adjoint()
            })
            .collect()
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    /// Largest entrywise deviation of `sum E_k` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = DMatrix::from_element(2, 2, ZERO);
        for e in &self.elements {
            sum += e;
        }
        (sum - DMatrix::<Complex64>::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .flat_map(hermitian_eigenvalues)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn probabilities(&self, state: &PureState) -> Vec<f64> {
        let a = state.amplitudes();
        self.elements
            .iter()
            .map(|e| {
                let mut acc = ZERO;
                for i in 0..2 {
                    for j in 0..2 {
                        acc += a[i].conj() * e[(i, j)] * a[j];
                    }
                }
                acc.re.clamp(0.0, 1.0)
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: &PureState, rng: &mut R) -> usize {
        sample_index(&self.probabilities(state), rng)
    }
}

/// Unambiguous discrimination of a state drawn from `pair`. Never returns a
/// wrong identification; succeeds with probability `1 - cos A`.
pub fn usd_measure<R: Rng + ?Sized>(
    state: &PureState,
    pair: &StatePair,
    rng: &mut R,
) -> UsdOutcome {
    // <psi|E_0|psi> = |<psi1^perp|psi>|^2 / (1 + c), likewise for E_1; this is
    // Povm::usd evaluated without building the matrices.
    let scale = 1.0 / (1.0 + pair.cos_a());
    let p0 = pair.psi1().orthogonal().inner(state).norm_sqr() * scale;
    let p1 = pair.psi0().orthogonal().inner(state).norm_sqr() * scale;
    match sample_index(&[p0, p1, (1.0 - p0 - p1).max(0.0)], rng) {
        0 => UsdOutcome::Identified(0),
        1 => UsdOutcome::Identified(1),
        _ => UsdOutcome::Inconclusive,
    }
}

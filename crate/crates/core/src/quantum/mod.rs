//! Exact single-qubit and small-register quantum mechanics.
//!
//! Everything here is dense linear algebra over at most four qubits: pure
//! states, density operators, projective and POVM measurements, and partial
//! traces. Measurements draw from a caller-supplied RNG so that sessions stay
//! reproducible.

mod density;
mod joint;
mod measure;
mod state;

pub use density::{hermitian_eigenvalues, trace_distance, trace_norm, DensityOp, PSD_TOL};
pub use joint::{probe_entangle, JointState, Role, MAX_JOINT_QUBITS};
pub use measure::{
    breidbart_measure, projective_measure, sample_index, usd_measure, Povm, UsdOutcome,
};
pub use state::{make_state_pair, Basis, PureState, StatePair, NORM_TOL};

//! Quantum encryption functions: classical bits plus random keys to blobs of
//! qubit states.
//!
//! Two alphabets are used. The two-state alphabet is a [`StatePair`]; the
//! four-state alphabet is `{|0>, |1>, |+>, |->}` indexed by (basis, bit).

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::quantum::{
    projective_measure, usd_measure, Basis, DensityOp, JointState, Povm, PureState, StatePair,
    UsdOutcome,
};

/// One symbol of an alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "alphabet", rename_all = "kebab-case")]
pub enum SlotSpec {
    TwoState { bit: u8 },
    FourState { basis: u8, bit: u8 },
}

impl SlotSpec {
    pub fn state(&self, pair: Option<&StatePair>) -> Result<PureState> {
        match *self {
            SlotSpec::TwoState { bit } => pair
                .map(|p| *p.state(bit))
                .ok_or_else(|| Error::param("two-state symbol without a state pair")),
            SlotSpec::FourState { basis, bit } => Ok(PureState::bb84(basis, bit)),
        }
    }
}

/// Which encryption function produced a blob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderId {
    Simple,
    BasisCommitted,
    Keyed,
    Blob2,
    Blob4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlobMeta {
    pub encoder: EncoderId,
    pub m: usize,
    pub n: usize,
    /// SHA-256 of the committer's key material; kept on the committer side.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub key_digest: Option<String>,
}

impl BlobMeta {
    /// The metadata with committer-private fields removed.
    pub fn public(&self) -> BlobMeta {
        BlobMeta {
            key_digest: None,
            ..self.clone()
        }
    }
}

/// A qubit register: either an independent pure state or one qubit of a
/// joint register held in the blob.
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Pure(PureState),
    Joint { register: usize, qubit: usize },
}

/// An `m x n` array of qubit registers, row-major (string `i`, position `j`).
#[derive(Debug, Clone)]
pub struct Blob {
    meta: BlobMeta,
    slots: Vec<Slot>,
    registers: Vec<JointState>,
}

impl Blob {
    pub fn from_specs(
        encoder: EncoderId,
        m: usize,
        n: usize,
        specs: &[SlotSpec],
        pair: Option<&StatePair>,
    ) -> Result<Blob> {
        let slots = specs
            .iter()
            .map(|s| s.state(pair).map(Slot::Pure))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(
            BlobMeta {
                encoder,
                m,
                n,
                key_digest: None,
            },
            slots,
            Vec::new(),
        )
    }

    /// Assembles a blob whose slots may reference joint registers.
    pub fn from_parts(
        meta: BlobMeta,
        slots: Vec<Slot>,
        registers: Vec<JointState>,
    ) -> Result<Blob> {
        if slots.len() != meta.m * meta.n {
            return Err(Error::param(format!(
                "{} slots for a {}x{} blob",
                slots.len(),
                meta.m,
                meta.n
            )));
        }
        for s in &slots {
            match s {
                Slot::Pure(p) if (p.norm_sqr() - 1.0).abs() > crate::quantum::NORM_TOL => {
                    return Err(Error::param("slot state is not normalized"));
                }
                Slot::Joint { register, qubit } => {
                    let reg = registers
                        .get(*register)
                        .ok_or_else(|| Error::param(format!("no joint register {register}")))?;
                    if *qubit >= reg.qubits() {
                        return Err(Error::param(format!(
                            "qubit {qubit} outside register {register}"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(Blob {
            meta,
            slots,
            registers,
        })
    }

    pub fn meta(&self) -> &BlobMeta {
        &self.meta
    }

    pub(crate) fn set_key_digest(&mut self, digest: String) {
        self.meta.key_digest = Some(digest);
    }

    pub fn m(&self) -> usize {
        self.meta.m
    }

    pub fn n(&self) -> usize {
        self.meta.n
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn index(&self, string: usize, position: usize) -> usize {
        string * self.meta.n + position
    }

    pub fn slot(&self, idx: usize) -> &Slot {
        &self.slots[idx]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn registers(&self) -> &[JointState] {
        &self.registers
    }

    pub fn register_mut(&mut self, id: usize) -> &mut JointState {
        &mut self.registers[id]
    }

    /// The pure state of a slot, if it is not entangled.
    pub fn pure_state(&self, idx: usize) -> Option<&PureState> {
        match &self.slots[idx] {
            Slot::Pure(p) => Some(p),
            Slot::Joint { .. } => None,
        }
    }

    /// Reduced density operator of one slot, as seen by its holder.
    pub fn reduced_slot(&self, idx: usize) -> Result<DensityOp> {
        match &self.slots[idx] {
            Slot::Pure(p) => Ok(DensityOp::from_pure(p)),
            Slot::Joint { register, qubit } => self.registers[*register].reduced(&[*qubit]),
        }
    }

    /// Projective measurement of one slot; the slot collapses.
    pub fn measure_slot<R: Rng + ?Sized>(
        &mut self,
        idx: usize,
        basis: &Basis,
        rng: &mut R,
    ) -> Result<u8> {
        match &mut self.slots[idx] {
            Slot::Pure(p) => {
                let (o, post) = projective_measure(p, basis, rng);
                *p = post;
                Ok(o)
            }
            Slot::Joint { register, qubit } => {
                self.registers[*register].measure_qubit(*qubit, basis, rng)
            }
        }
    }

    /// Unambiguous discrimination on one slot. Entangled slots are measured
    /// through the Kraus form of the same POVM.
    pub fn usd_slot<R: Rng + ?Sized>(
        &mut self,
        idx: usize,
        pair: &StatePair,
        rng: &mut R,
    ) -> Result<UsdOutcome> {
        match &self.slots[idx] {
            Slot::Pure(p) => Ok(usd_measure(p, pair, rng)),
            Slot::Joint { register, qubit } => {
                let k = self.registers[*register].measure_povm(*qubit, &Povm::usd(pair), rng)?;
                Ok(match k {
                    0 => UsdOutcome::Identified(0),
                    1 => UsdOutcome::Identified(1),
                    _ => UsdOutcome::Inconclusive,
                })
            }
        }
    }
}

/// Secret material behind a two- or four-state blob.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitKey {
    pub a_strings: Vec<BitString>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis_strings: Option<Vec<BitString>>,
}

impl CommitKey {
    /// `m` strings drawn uniformly and independently from `F^-1(b)`.
    pub fn sample<R: Rng + ?Sized>(b: u8, f: &BoolFn, m: usize, rng: &mut R) -> Result<CommitKey> {
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        let a_strings = (0..m)
            .map(|_| f.sample_preimage(b, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(CommitKey {
            a_strings,
            basis_strings: None,
        })
    }

    /// As [`CommitKey::sample`], plus uniform basis strings.
    pub fn sample_with_bases<R: Rng + ?Sized>(
        b: u8,
        f: &BoolFn,
        m: usize,
        rng: &mut R,
    ) -> Result<CommitKey> {
        let mut key = Self::sample(b, f, m, rng)?;
        let n = f.arity();
        key.basis_strings = Some((0..m).map(|_| BitString::random(n, rng)).collect());
        Ok(key)
    }

    pub fn m(&self) -> usize {
        self.a_strings.len()
    }

    pub fn n(&self) -> usize {
        self.a_strings.first().map_or(0, BitString::len)
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for a in &self.a_strings {
            h.update(a.to_string().as_bytes());
            h.update(b";");
        }
        if let Some(bases) = &self.basis_strings {
            h.update(b"|");
            for t in bases {
                h.update(t.to_string().as_bytes());
                h.update(b";");
            }
        }
        hex::encode(h.finalize())
    }

    fn check_shape(&self) -> Result<(usize, usize)> {
        let (m, n) = (self.m(), self.n());
        if m == 0 || n == 0 {
            return Err(Error::param("empty key"));
        }
        if self.a_strings.iter().any(|a| a.len() != n) {
            return Err(Error::param("key strings have different lengths"));
        }
        if let Some(bases) = &self.basis_strings {
            if bases.len() != m || bases.iter().any(|t| t.len() != n) {
                return Err(Error::param("basis strings do not match the key shape"));
            }
        }
        Ok((m, n))
    }

    /// Two-state alphabet symbols, row-major.
    pub fn two_state_specs(&self) -> Result<Vec<SlotSpec>> {
        self.check_shape()?;
        Ok(self
            .a_strings
            .iter()
            .flat_map(|a| a.iter().map(|bit| SlotSpec::TwoState { bit }))
            .collect())
    }

    /// Four-state alphabet symbols, row-major.
    pub fn four_state_specs(&self) -> Result<Vec<SlotSpec>> {
        self.check_shape()?;
        let bases = self
            .basis_strings
            .as_ref()
            .ok_or_else(|| Error::param("four-state key needs basis strings"))?;
        Ok(self
            .a_strings
            .iter()
            .zip(bases)
            .flat_map(|(a, t)| {
                a.iter()
                    .zip(t.iter())
                    .map(|(bit, basis)| SlotSpec::FourState { basis, bit })
            })
            .collect())
    }
}

/// `a -> |psi_{a_1}>, ..., |psi_{a_k}>` as a `1 x k` blob.
pub fn encode_simple(a: &BitString, pair: &StatePair) -> Result<Blob> {
    let specs: Vec<_> = a.iter().map(|bit| SlotSpec::TwoState { bit }).collect();
    Blob::from_specs(EncoderId::Simple, 1, a.len(), &specs, Some(pair))
}

/// Basis-committed encoder: block `i` carries a random payload string in the
/// basis named by the committed bit `a_i`.
pub fn encode_basis_committed<R: Rng + ?Sized>(
    a: &BitString,
    n: usize,
    rng: &mut R,
) -> Result<(Blob, Vec<BitString>)> {
    let payloads: Vec<_> = (0..a.len()).map(|_| BitString::random(n, rng)).collect();
    let blob = encode_basis_committed_with(a, &payloads)?;
    Ok((blob, payloads))
}

pub fn encode_basis_committed_with(a: &BitString, payloads: &[BitString]) -> Result<Blob> {
    if payloads.len() != a.len() {
        return Err(Error::param("one payload string per committed bit"));
    }
    let n = payloads.first().map_or(0, BitString::len);
    if payloads.iter().any(|p| p.len() != n) {
        return Err(Error::param("payload strings have different lengths"));
    }
    let specs: Vec<_> = a
        .iter()
        .zip(payloads)
        .flat_map(|(basis, p)| p.iter().map(move |bit| SlotSpec::FourState { basis, bit }))
        .collect();
    Blob::from_specs(EncoderId::BasisCommitted, a.len(), n, &specs, None)
}

/// Keyed encoder: data bit `a_i` repeated `n` times under the bases `keys[i]`.
pub fn encode_keyed(a: &BitString, keys: &[BitString]) -> Result<Blob> {
    if keys.len() != a.len() {
        return Err(Error::param("one basis key per data bit"));
    }
    let n = keys.first().map_or(0, BitString::len);
    if keys.iter().any(|k| k.len() != n) {
        return Err(Error::param("basis keys have different lengths"));
    }
    let specs: Vec<_> = a
        .iter()
        .zip(keys)
        .flat_map(|(bit, k)| {
            k.iter()
                .map(move |basis| SlotSpec::FourState { basis, bit })
        })
        .collect();
    Blob::from_specs(EncoderId::Keyed, a.len(), n, &specs, None)
}

pub fn encode_keyed_random<R: Rng + ?Sized>(
    a: &BitString,
    n: usize,
    rng: &mut R,
) -> Result<(Blob, Vec<BitString>)> {
    let keys: Vec<_> = (0..a.len()).map(|_| BitString::random(n, rng)).collect();
    Ok((encode_keyed(a, &keys)?, keys))
}

/// Two-state blob for bit `b`: `m` strings from `F^-1(b)`, each position
/// encoded as `|psi_{a_j}>`.
pub fn blob2_encode<R: Rng + ?Sized>(
    b: u8,
    f: &BoolFn,
    m: usize,
    pair: &StatePair,
    rng: &mut R,
) -> Result<(Blob, CommitKey)> {
    let key = CommitKey::sample(b, f, m, rng)?;
    Ok((blob2_from_key(&key, pair)?, key))
}

pub fn blob2_from_key(key: &CommitKey, pair: &StatePair) -> Result<Blob> {
    let specs = key.two_state_specs()?;
    let mut blob = Blob::from_specs(EncoderId::Blob2, key.m(), key.n(), &specs, Some(pair))?;
    blob.set_key_digest(key.digest());
    Ok(blob)
}

/// Four-state blob for bit `b`: strings from `F^-1(b)` under uniform random
/// bases.
pub fn blob4_encode<R: Rng + ?Sized>(
    b: u8,
    f: &BoolFn,
    m: usize,
    rng: &mut R,
) -> Result<(Blob, CommitKey)> {
    let key = CommitKey::sample_with_bases(b, f, m, rng)?;
    Ok((blob4_from_key(&key)?, key))
}

pub fn blob4_from_key(key: &CommitKey) -> Result<Blob> {
    let specs = key.four_state_specs()?;
    let mut blob = Blob::from_specs(EncoderId::Blob4, key.m(), key.n(), &specs, None)?;
    blob.set_key_digest(key.digest());
    Ok(blob)
}

/// Alphabet for [`strong_concat`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcatMode {
    TwoState(StatePair),
    FourState,
}

/// Independent per-bit blobs with independent keys, one per input bit.
pub fn strong_concat<R: Rng + ?Sized>(
    bits: &BitString,
    mode: ConcatMode,
    f: &BoolFn,
    m: usize,
    rng: &mut R,
) -> Result<Vec<(Blob, CommitKey)>> {
    bits.iter()
        .map(|b| match mode {
            ConcatMode::TwoState(pair) => blob2_encode(b, f, m, &pair, rng),
            ConcatMode::FourState => blob4_encode(b, f, m, rng),
        })
        .collect()
}

//! Boolean functions as truth tables, with Walsh analysis and
//! correlation-immunity certification.
//!
//! Inputs are indexed with `a_1` as the most significant bit, so the string
//! `a_1 ... a_n` read as a binary number is the truth-table index. Walsh masks
//! use the same convention.

use std::sync::OnceLock;

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 20;
pub const MIN_ARITY: usize = 2;
/// Largest arity accepted by [`search_ci`].
pub const MAX_SEARCH_ARITY: usize = 4;

#[derive(Debug, Clone)]
pub struct BoolFn {
    n: usize,
    table: Vec<bool>,
    preimages: OnceLock<[Vec<u32>; 2]>,
}

impl PartialEq for BoolFn {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl Eq for BoolFn {}

/// Walsh coefficients `W(u) = sum_a (-1)^(F(a) + <u,a>)`, indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: usize,
    coefficients: Vec<i64>,
}

impl WalshSpectrum {
    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn at(&self, mask: usize) -> i64 {
        self.coefficients[mask]
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `sum W(u)^2`, which equals `2^(2n)` for every Boolean function.
    pub fn energy(&self) -> u128 {
        self.coefficients.iter().map(|&w| (w * w) as u128).sum()
    }
}

/// How [`make_ci_function`] builds its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiKind {
    /// `F(a) = <c, a>` for the mask `c` covering `a_1 .. a_{n0+1}`.
    LinearMask,
    /// Direct sum `G(x) + H(y)`: `G` linear on `n0 + 1` variables, `H` a sum
    /// of disjoint quadratic terms over the remaining variables. Balanced,
    /// nonlinear, and correlation immune of order exactly `n0`.
    Recursive,
}

impl BoolFn {
    pub fn from_table(n: usize, table: Vec<bool>) -> Result<Self> {
        check_arity(n)?;
        if table.len() != 1 << n {
            return Err(Error::param(format!(
                "truth table of length {} for arity {n}",
                table.len()
            )));
        }
        Ok(Self {
            n,
            table,
            preimages: OnceLock::new(),
        })
    }

    /// Tabulates `f` over every input index.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_arity(n)?;
        Self::from_table(n, (0..1usize << n).map(f).collect())
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    /// `F(a) = <mask, a>` with `mask` an index-convention bit mask.
    pub fn linear(n: usize, mask: usize) -> Result<Self> {
        if mask >= 1 << n {
            return Err(Error::param(format!("mask {mask:#x} exceeds arity {n}")));
        }
        Self::from_fn(n, |x| (x & mask).count_ones() % 2 == 1)
    }

    /// `a_1 + a_2 + ... + a_n (+ 1 if complement)`.
    pub fn parity(n: usize, complement: bool) -> Result<Self> {
        Self::from_fn(n, |x| (x.count_ones() % 2 == 1) ^ complement)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval_index(&self, x: usize) -> u8 {
        u8::from(self.table[x])
    }

    pub fn eval(&self, a: &BitString) -> Result<u8> {
        if a.len() != self.n {
            return Err(Error::param(format!(
                "input of length {} for arity {}",
                a.len(),
                self.n
            )));
        }
        Ok(self.eval_index(a.to_index()))
    }

    /// Number of ones in the truth table.
    pub fn weight(&self) -> usize {
        self.table.iter().filter(|&&v| v).count()
    }

    pub fn is_balanced(&self) -> bool {
        self.weight() == 1 << (self.n - 1)
    }

    pub fn complement(&self) -> BoolFn {
        Self {
            n: self.n,
            table: self.table.iter().map(|v| !v).collect(),
            preimages: OnceLock::new(),
        }
    }

    /// `G(a) = F(b)` where `b_{perm[i]} = a_i` (positions are 0-based).
    pub fn permute_vars(&self, perm: &[usize]) -> Result<BoolFn> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::param("not a permutation of the variables"));
        }
        Self::from_fn(n, |x| {
            let mut y = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                let bit = (x >> (n - 1 - i)) & 1;
                y |= bit << (n - 1 - p);
            }
            self.table[y]
        })
    }

    pub fn walsh(&self) -> WalshSpectrum {
        walsh_transform(self)
    }

    pub fn ci_order(&self) -> usize {
        ci_order(self)
    }

    /// Truth-table indices `x` with `F(x) = b`, computed once and cached.
    pub fn preimage(&self, b: u8) -> &[u32] {
        let lists = self.preimages.get_or_init(|| {
            let mut zeros = Vec::new();
            let mut ones = Vec::new();
            for (x, &v) in self.table.iter().enumerate() {
                if v {
                    ones.push(x as u32);
                } else {
                    zeros.push(x as u32);
                }
            }
            [zeros, ones]
        });
        &lists[usize::from(b & 1)]
    }

    /// A uniformly random `a` with `F(a) = b`.
    pub fn sample_preimage<R: Rng + ?Sized>(&self, b: u8, rng: &mut R) -> Result<BitString> {
        let list = self.preimage(b);
        if list.is_empty() {
            return Err(Error::domain(format!("function never takes the value {b}")));
        }
        let x = list[rng.random_range(0..list.len())] as usize;
        Ok(BitString::from_index(x, self.n))
    }

    /// Hex form of the table read as a big-endian integer whose bit `x` is
    /// `F(x)`: the highest input comes first. Parity on three variables is
    /// `96`.
    pub fn to_hex(&self) -> String {
        let digits = (1usize << self.n) / 4;
        (0..digits)
            .rev()
            .map(|d| {
                let nibble =
                    (0..4).fold(0u32, |acc, k| acc | (u32::from(self.table[d * 4 + k]) << k));
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    /// Parses [`BoolFn::to_hex`] output; arity is inferred from the length.
    pub fn from_hex(hex: &str) -> Result<BoolFn> {
        let hex = hex.trim();
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        let len = hex.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::param(format!(
                "hex truth table needs a power-of-two number of digits, got {len}"
            )));
        }
        let n = len.trailing_zeros() as usize + 2;
        check_arity(n)?;
        let mut table = vec![false; 1 << n];
        for (pos, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::param(format!("invalid hex digit {ch:?}")))?;
            let d = len - 1 - pos;
            for k in 0..4 {
                table[d * 4 + k] = (nibble >> k) & 1 == 1;
            }
        }
        Self::from_table(n, table)
    }
}

/// Serialized as the hex truth table of [`BoolFn::to_hex`].
impl serde::Serialize for BoolFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> serde::Deserialize<'de> for BoolFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let hex = String::deserialize(d)?;
        BoolFn::from_hex(&hex).map_err(serde::de::Error::custom)
    }
}

fn check_arity(n: usize) -> Result<()> {
    if !(MIN_ARITY..=MAX_ARITY).contains(&n) {
        return Err(Error::param(format!(
            "arity must lie in {MIN_ARITY}..={MAX_ARITY}, got {n}"
        )));
    }
    Ok(())
}

/// Fast Walsh-Hadamard transform of `(-1)^F`, `O(n 2^n)`.
pub fn walsh_transform(f: &BoolFn) -> WalshSpectrum {
    let mut w: Vec<i64> = f.table.iter().map(|&v| if v { -1 } else { 1 }).collect();
    let len = w.len();
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (w[j], w[j + h]);
                w[j] = x + y;
                w[j + h] = x - y;
            }
        }
        h *= 2;
    }
    WalshSpectrum {
        n: f.n,
        coefficients: w,
    }
}

/// Largest `n0` with `W(u) = 0` for every mask of weight `1..=n0`
/// (Xiao-Massey). Constant functions get `n`.
pub fn ci_order(f: &BoolFn) -> usize {
    let spectrum = walsh_transform(f);
    let mut min_weight = f.n + 1;
    for (u, &w) in spectrum.coefficients.iter().enumerate().skip(1) {
        if w != 0 {
            min_weight = min_weight.min(u.count_ones() as usize);
        }
    }
    min_weight.min(f.n + 1) - 1
}

pub fn is_balanced(f: &BoolFn) -> bool {
    f.is_balanced()
}

/// Builds a function with correlation-immunity order `n0` on `n` variables.
pub fn make_ci_function(n: usize, n0: usize, kind: CiKind) -> Result<BoolFn> {
    check_arity(n)?;
    if n0 >= n {
        return Err(Error::param(format!(
            "correlation-immunity order {n0} must be below the arity {n}"
        )));
    }
    let linear_vars = n0 + 1;
    let mask = ((1usize << linear_vars) - 1) << (n - linear_vars);
    match kind {
        CiKind::LinearMask => BoolFn::linear(n, mask),
        CiKind::Recursive => {
            let rest = n - linear_vars;
            if rest < 2 {
                return Err(Error::param(format!(
                    "a nonlinear direct sum of order {n0} needs at least {} variables",
                    n0 + 3
                )));
            }
            // Quadratic terms on adjacent trailing variables; with an odd count
            // the first trailing variable stays unused.
            let pairs = rest / 2;
            BoolFn::from_fn(n, |x| {
                let mut v = (x & mask).count_ones() % 2 == 1;
                for p in 0..pairs {
                    v ^= (x >> (2 * p)) & (x >> (2 * p + 1)) & 1 == 1;
                }
                v
            })
        }
    }
}

/// Every function on `n <= 4` variables with CI order at least `n0` and the
/// requested balancedness, in increasing truth-table order.
pub fn search_ci(n: usize, n0: usize, balanced: bool) -> Result<Vec<BoolFn>> {
    if n > MAX_SEARCH_ARITY {
        return Err(Error::param(format!(
            "exhaustive search limited to arity {MAX_SEARCH_ARITY}, got {n}"
        )));
    }
    check_arity(n)?;
    let size = 1usize << n;
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << size) {
        let f = BoolFn::from_fn(n, |x| (bits >> x) & 1 == 1)?;
        if f.is_balanced() == balanced && f.ci_order() >= n0 {
            out.push(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Largest `k` such that `F` is statistically independent of every
    /// subset of at most `k` inputs, by direct counting.
    pub(crate) fn independence_order(f: &BoolFn) -> usize {
        let n = f.arity();
        let total_ones = f.weight();
        let mut order = n;
        'outer: for subset in 1usize..(1 << n) {
            let k = subset.count_ones() as usize;
            if k > order {
                continue;
            }
            let mut ones = vec![0usize; 1 << n];
            for x in 0..(1usize << n) {
                if f.table()[x] {
                    ones[x & subset] += 1;
                }
            }
            // Each assignment of the subset covers 2^(n-k) inputs.
            for x in 0..(1usize << n) {
                if x & subset == x && ones[x] << k != total_ones {
                    order = k - 1;
                    continue 'outer;
                }
            }
        }
        order
    }

    #[test]
    fn constant_spectrum() {
        let f = BoolFn::constant(2, false).unwrap();
        assert_eq!(f.walsh().coefficients(), &[4, 0, 0, 0]);
        assert_eq!(f.ci_order(), 2);
    }

    #[test]
    fn parity_two_spectrum() {
        let f = BoolFn::parity(2, false).unwrap();
        let w = f.walsh();
        assert_eq!(w.at(0b11).abs(), 4);
        assert_eq!(w.at(0), 0);
        assert_eq!(w.at(1), 0);
        assert_eq!(w.at(2), 0);
        // Direct summation: W(11) = sum_a (-1)^(a1+a2+a1+a2) = 4
        assert_eq!(w.at(0b11), 4);
    }

    #[test]
    fn parseval_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let f =
                BoolFn::from_table(8, (0..256).map(|_| rng.random_bool(0.5)).collect()).unwrap();
            assert_eq!(f.walsh().energy(), 1u128 << 16);
        }
    }

    #[test]
    fn parity_has_order_n_minus_one() {
        assert_eq!(BoolFn::parity(6, false).unwrap().ci_order(), 5);
        assert_eq!(BoolFn::parity(6, true).unwrap().ci_order(), 5);
    }

    #[test]
    fn dictator_has_order_zero() {
        let f = make_ci_function(4, 0, CiKind::LinearMask).unwrap();
        assert_eq!(f, BoolFn::from_fn(4, |x| x & 0b1000 != 0).unwrap());
        assert_eq!(f.ci_order(), 0);
    }

    #[test]
    fn balanced_matches_popcount() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(BoolFn::parity(5, false).unwrap().is_balanced());
        assert!(!BoolFn::constant(5, true).unwrap().is_balanced());
        for _ in 0..100 {
            let f =
                BoolFn::from_table(8, (0..256).map(|_| rng.random_bool(0.5)).collect()).unwrap();
            let ones = f.table().iter().filter(|&&b| b).count();
            assert_eq!(f.is_balanced(), ones == 128);
            assert_eq!(f.is_balanced(), f.walsh().at(0) == 0);
        }
    }

    #[test]
    fn parity_preimages_have_even_weight() {
        let f = BoolFn::parity(4, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            assert_eq!(f.sample_preimage(0, &mut rng).unwrap().weight() % 2, 0);
        }
    }

    #[test]
    fn empty_preimage_is_a_domain_error() {
        let f = BoolFn::constant(3, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(matches!(
            f.sample_preimage(1, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linear_mask_orders() {
        let f = make_ci_function(8, 5, CiKind::LinearMask).unwrap();
        assert_eq!(f.ci_order(), 5);
        let f = make_ci_function(6, 5, CiKind::LinearMask).unwrap();
        assert_eq!(f, BoolFn::parity(6, false).unwrap());
    }

    #[test]
    fn recursive_construction_is_nonlinear_and_balanced() {
        let f = make_ci_function(4, 1, CiKind::Recursive).unwrap();
        assert!(f.is_balanced());
        assert!(f.ci_order() >= 1);
        assert_eq!(f.ci_order(), independence_order(&f));
        let w = f.walsh();
        assert!((0..16).any(|u: usize| u.count_ones() >= 2 && w.at(u) != 0 && u != 0b1100));
        // a nonlinear function has more than one nonzero coefficient
        assert!(w.coefficients().iter().filter(|&&c| c != 0).count() > 1);
        for n in 5..=10 {
            for n0 in 0..n - 2 {
                let f = make_ci_function(n, n0, CiKind::Recursive).unwrap();
                assert!(f.is_balanced());
                assert_eq!(f.ci_order(), n0, "n={n} n0={n0}");
            }
        }
    }

    #[test]
    fn unsatisfiable_parameters() {
        assert!(make_ci_function(4, 4, CiKind::LinearMask).is_err());
        assert!(make_ci_function(4, 2, CiKind::Recursive).is_err());
        assert!(make_ci_function(1, 0, CiKind::LinearMask).is_err());
        assert!(make_ci_function(21, 3, CiKind::LinearMask).is_err());
    }

    #[test]
    fn search_three_variable_order_two() {
        let found = search_ci(3, 2, true).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found.contains(&BoolFn::parity(3, false).unwrap()));
        assert!(found.contains(&BoolFn::parity(3, true).unwrap()));
    }

    #[test]
    fn search_two_variable_balanced() {
        let found = search_ci(2, 0, true).unwrap();
        assert_eq!(found.len(), 6);
        for f in &found {
            assert_eq!(f.ci_order(), independence_order(f));
        }
    }

    #[test]
    fn search_rejects_large_arity() {
        assert!(search_ci(5, 1, true).is_err());
    }

    #[test]
    fn walsh_order_matches_counting_for_three_variables() {
        for bits in 0u64..256 {
            let f = BoolFn::from_fn(3, |x| (bits >> x) & 1 == 1).unwrap();
            assert_eq!(f.ci_order(), independence_order(&f), "table {bits:#x}");
        }
    }

    #[test]
    fn hex_round_trip() {
        let f = BoolFn::parity(3, false).unwrap();
        assert_eq!(f.to_hex(), "96");
        assert_eq!(BoolFn::from_hex("0x96").unwrap(), f);
        assert_eq!(BoolFn::parity(4, false).unwrap().to_hex(), "6996");
        assert!(BoolFn::from_hex("abc").is_err());
        assert!(BoolFn::from_hex("zz").is_err());
        let g = make_ci_function(7, 2, CiKind::Recursive).unwrap();
        assert_eq!(BoolFn::from_hex(&g.to_hex()).unwrap(), g);
    }
}

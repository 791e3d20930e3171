use serde::{Deserialize, Serialize};

use crate::boolfn::{make_ci_function, BoolFn, CiKind};
use crate::error::{Error, Result};
use crate::quantum::{make_state_pair, StatePair};

/// Default `n - n0`.
pub const DEFAULT_GAP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Two nonorthogonal states, verified in the unveiled states' bases.
    B92bc,
    /// Four states in two conjugate bases; open unveils the bases.
    Bb84bc,
    /// Commitment over oblivious transfer; Bob keeps classical receipts.
    Otbc,
}

impl Scheme {
    pub fn needs_pair(self) -> bool {
        matches!(self, Scheme::B92bc | Scheme::Otbc)
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s.to_ascii_lowercase().as_str() {
            "b92bc" | "b92" => Ok(Scheme::B92bc),
            "bb84bc" | "bb84" => Ok(Scheme::Bb84bc),
            "otbc" | "ot" => Ok(Scheme::Otbc),
            _ => Err(Error::param(format!("unknown scheme {s:?}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::B92bc => "b92bc",
            Scheme::Bb84bc => "bb84bc",
            Scheme::Otbc => "otbc",
        })
    }
}

/// How Bob checks the two-state slots at open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Project each slot on the basis containing the claimed state.
    #[default]
    ClaimedBasis,
    /// Unambiguous discrimination; only an identified wrong value fails.
    Usd,
}

/// Parameters shared by both parties of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct SessionConfig {
    scheme: Scheme,
    m: usize,
    n0: usize,
    pair: Option<StatePair>,
    f: BoolFn,
    seed: u64,
    pub verify: VerifyMode,
    /// Run a coin flip on top of the commitment.
    pub coin_flip: bool,
    /// Keep slot descriptors in transcripts.
    pub debug: bool,
}

impl SessionConfig {
    /// Validates the configuration. `n0` is the certified CI order of `f`.
    pub fn new(
        scheme: Scheme,
        f: BoolFn,
        m: usize,
        pair: Option<StatePair>,
        seed: u64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        let n = f.arity();
        let n0 = f.ci_order();
        if n0 + 1 >= n {
            return Err(Error::param(format!(
                "CI order {n0} of F is not below n - 1 = {}",
                n - 1
            )));
        }
        if scheme.needs_pair() && pair.is_none() {
            return Err(Error::param(format!("scheme {scheme} needs cos A")));
        }
        Ok(Self {
            scheme,
            m,
            n0,
            pair: if scheme.needs_pair() { pair } else { None },
            f,
            seed,
            verify: VerifyMode::default(),
            coin_flip: false,
            debug: false,
        })
    }

    /// Linear-mask `F` with `n - n0 = gap` and, when `cos_a` is given, the
    /// widest admissible `delta`.
    pub fn with_defaults(
        scheme: Scheme,
        n: usize,
        m: usize,
        cos_a: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        Self::with_gap(scheme, n, DEFAULT_GAP, m, cos_a, None, seed)
    }

    pub fn with_gap(
        scheme: Scheme,
        n: usize,
        gap: usize,
        m: usize,
        cos_a: Option<f64>,
        delta: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        if gap < DEFAULT_GAP || gap > n {
            return Err(Error::param(format!(
                "n - n0 must lie in 2..={n}, got {gap}"
            )));
        }
        let f = make_ci_function(n, n - gap, CiKind::LinearMask)?;
        let pair = pair_from(cos_a, delta)?;
        Self::new(scheme, f, m, pair, seed)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.f.arity()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn f(&self) -> &BoolFn {
        &self.f
    }

    pub fn pair(&self) -> Option<&StatePair> {
        self.pair.as_ref()
    }

    pub(crate) fn require_pair(&self) -> Result<&StatePair> {
        self.pair
            .as_ref()
            .ok_or_else(|| Error::param(format!("scheme {} needs cos A", self.scheme)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Result<Self> {
        let mut c = Self::new(scheme, self.f.clone(), self.m, self.pair, self.seed)?;
        c.verify = self.verify;
        c.coin_flip = self.coin_flip;
        c.debug = self.debug;
        Ok(c)
    }
}

pub(crate) fn pair_from(cos_a: Option<f64>, delta: Option<f64>) -> Result<Option<StatePair>> {
    match (cos_a, delta) {
        (Some(c), Some(d)) => make_state_pair(c, d).map(Some),
        (Some(c), None) => StatePair::with_cos(c).map(Some),
        (None, Some(_)) => Err(Error::param("delta given without cos A")),
        (None, None) => Ok(None),
    }
}

/// File form of [`SessionConfig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: Scheme,
    m: usize,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    n0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<BoolFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cos_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    verify: VerifyMode,
    #[serde(default)]
    coin_flip: bool,
    #[serde(default)]
    debug: bool,
}

impl TryFrom<RawConfig> for SessionConfig {
    type Error = Error;

    fn try_from(r: RawConfig) -> Result<Self> {
        let f = match (r.f, r.n) {
            (Some(f), Some(n)) if f.arity() != n => {
                return Err(Error::param(format!(
                    "F has arity {} but n = {n}",
                    f.arity()
                )))
            }
            (Some(f), _) => f,
            (None, Some(n)) => {
                let n0 = match r.n0 {
                    Some(n0) => n0,
                    None => n
                        .checked_sub(DEFAULT_GAP)
                        .ok_or_else(|| Error::param("n too small"))?,
                };
                make_ci_function(n, n0, CiKind::LinearMask)?
            }
            (None, None) => return Err(Error::param("config needs n or F")),
        };
        if let Some(n0) = r.n0 {
            let certified = f.ci_order();
            if n0 != certified {
                return Err(Error::param(format!(
                    "n0 = {n0} but F is certified to order {certified}"
                )));
            }
        }
        let pair = pair_from(r.cos_a, r.delta)?;
        let mut c = SessionConfig::new(r.scheme, f, r.m, pair, r.seed)?;
        c.verify = r.verify;
        c.coin_flip = r.coin_flip;
        c.debug = r.debug;
        Ok(c)
    }
}

impl From<SessionConfig> for RawConfig {
    fn from(c: SessionConfig) -> Self {
        RawConfig {
            scheme: c.scheme,
            m: c.m,
            n: Some(c.f.arity()),
            n0: Some(c.n0),
            cos_a: c.pair.map(|p| p.cos_a()),
            delta: c.pair.map(|p| p.delta()),
            f: Some(c.f),
            seed: c.seed,
            verify: c.verify,
            coin_flip: c.coin_flip,
            debug: c.debug,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_rejects_parity() {
        let f = BoolFn::parity(4, false).unwrap();
        assert!(SessionConfig::new(Scheme::Bb84bc, f, 3, None, 0).is_err());
    }

    #[test]
    fn zero_strings_rejected() {
        assert!(SessionConfig::with_defaults(Scheme::Bb84bc, 6, 0, None, 0).is_err());
    }

    #[test]
    fn default_gap_is_two() {
        let c = SessionConfig::with_defaults(Scheme::B92bc, 6, 5, Some(0.8), 1).unwrap();
        assert_eq!(c.n0(), 4);
        assert_eq!(c.n(), 6);
        assert!(SessionConfig::with_defaults(Scheme::B92bc, 6, 5, None, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = SessionConfig::with_defaults(Scheme::Otbc, 8, 3, Some(0.8), 9).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: SessionConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let short: SessionConfig =
            serde_json::from_str(r#"{"scheme":"b92bc","n":6,"m":2,"cos_a":0.8}"#).unwrap();
        assert_eq!(short.n0(), 4);
        let f = make_ci_function(6, 3, CiKind::LinearMask).unwrap().to_hex();
        let bad = format!(r#"{{"scheme":"b92bc","f":"{f}","n0":2,"m":2,"cos_a":0.8}}"#);
        assert!(serde_json::from_str::<SessionConfig>(&bad).is_err());
    }
}

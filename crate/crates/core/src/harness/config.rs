use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boolfn::{make_ci_function, BoolFn, CiKind};
use crate::error::{Error, Result};
use crate::protocol::{Scheme, SessionConfig, DEFAULT_GAP};
use crate::quantum::StatePair;

/// Where honest sessions run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transport {
    #[default]
    InProcess,
    /// A receiver server on an ephemeral local port, started for the run.
    Loopback,
    /// An already running receiver at `host:port`.
    Socket(String),
}

impl Transport {
    pub fn parse(s: &str) -> Transport {
        match s {
            "in-process" | "inprocess" => Transport::InProcess,
            "loopback" => Transport::Loopback,
            addr => Transport::Socket(addr.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Registry id, see [`super::STRATEGIES`].
    pub experiment: String,
    pub scheme: Option<Scheme>,
    pub n: usize,
    pub m: usize,
    /// `n - n0` for the default linear-mask `F`.
    pub gap: usize,
    /// Explicit `F`, as a hex truth table; overrides `n` and `gap`.
    pub f: Option<BoolFn>,
    pub cos_a: Option<f64>,
    pub delta: Option<f64>,
    /// Value a cheating committer tries to open.
    pub target: u8,
    /// Data bits for the single-bit encryption experiments.
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub transport: Transport,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: String::new(),
            scheme: None,
            n: 6,
            m: 4,
            gap: DEFAULT_GAP,
            f: None,
            cos_a: None,
            delta: None,
            target: 1,
            k: 1,
            trials: 10_000,
            seed: 0,
            workers: 1,
            output: None,
            format: Format::Csv,
            transport: Transport::InProcess,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if !super::STRATEGIES.iter().any(|s| s.id == self.experiment) {
            return Err(Error::param(format!(
                "unknown experiment {:?}",
                self.experiment
            )));
        }
        if self.target > 1 {
            return Err(Error::param("target must be 0 or 1"));
        }
        Ok(())
    }

    /// `F`: the explicit one or the linear-mask function with `n0 = n - gap`.
    pub fn function(&self) -> Result<BoolFn> {
        match &self.f {
            Some(f) => Ok(f.clone()),
            None => {
                let n0 = self.n.checked_sub(self.gap).ok_or_else(|| {
                    Error::param(format!("gap {} exceeds n = {}", self.gap, self.n))
                })?;
                make_ci_function(self.n, n0, CiKind::LinearMask)
            }
        }
    }

    pub fn pair(&self) -> Result<StatePair> {
        crate::protocol::config::pair_from(Some(self.cos_a.unwrap_or(0.8)), self.delta)
            .map(|p| p.expect("cos A given"))
    }

    pub fn n0(&self) -> Result<usize> {
        match &self.f {
            Some(f) => Ok(f.ci_order()),
            None => self
                .n
                .checked_sub(self.gap)
                .ok_or_else(|| Error::param(format!("gap {} exceeds n = {}", self.gap, self.n))),
        }
    }

    pub fn session(&self, scheme: Scheme) -> Result<SessionConfig> {
        let pair = if scheme.needs_pair() {
            Some(self.pair()?)
        } else {
            None
        };
        SessionConfig::new(scheme, self.function()?, self.m, pair, self.seed)
    }
}

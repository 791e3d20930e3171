//! Attack strategies against the commitment schemes and encryption
//! functions, each reporting empirical rates next to closed-form predictions.

use serde::Serialize;

mod binding;
mod concealing;
mod encryption;
mod posterior;

pub use binding::{
    alice_false_basis_attack_bb84, alice_lie_b92, alice_lie_otbc, alice_probe_attack_b92,
    false_basis_trial, lie_b92_trial, lie_otbc_trial, no_signaling_audit, probe_b92_trial,
    steerable_string, FalseBasisStrategy, LieKind,
};
pub use concealing::{
    bob_breidbart_guess, bob_breidbart_report, bob_usd_guess, bob_usd_report,
    linear_breidbart_rate, linear_usd_guess_rate, BreidbartGuess, ComponentReader, UsdGuess,
};
pub use encryption::{
    alice_epr_attack_eq2, breidbart_recover_keyed, breidbart_recover_report, epr_trial,
    honest_reopen_report, honest_reopen_trial, open_basis_committed, EprTrial,
};
pub use posterior::{
    consistent_counts, noisy_log_ratio, string_posterior, usd_guess_from_receipts, usd_log_ratio,
    Posterior,
};

/// A named count with its denominator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breakdown {
    pub name: String,
    pub count: u64,
    pub total: u64,
    /// Prediction for `count / total`, if there is one.
    pub predicted: Option<f64>,
}

impl Breakdown {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64
        }
    }

    pub fn z_score(&self) -> Option<f64> {
        self.predicted.map(|p| z_score(self.count, self.total, p))
    }
}

/// Empirical outcome of an attack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub strategy: String,
    pub params: String,
    pub trials: u64,
    pub successes: u64,
    pub predicted: f64,
    pub z_score: f64,
    /// True when `predicted` is an upper bound rather than an exact rate.
    pub predicted_is_bound: bool,
    pub breakdown: Vec<Breakdown>,
    /// Other reference curves, for example the alternative binding exponent.
    pub references: Vec<(String, f64)>,
}

impl AttackReport {
    pub fn new(
        strategy: &str,
        params: String,
        trials: u64,
        successes: u64,
        predicted: f64,
    ) -> Self {
        Self {
            strategy: strategy.to_string(),
            params,
            trials,
            successes,
            predicted,
            z_score: z_score(successes, trials, predicted),
            predicted_is_bound: false,
            breakdown: Vec::new(),
            references: Vec::new(),
        }
    }

    pub fn as_bound(mut self) -> Self {
        self.predicted_is_bound = true;
        self
    }

    pub fn with_breakdown(
        mut self,
        name: &str,
        count: u64,
        total: u64,
        predicted: Option<f64>,
    ) -> Self {
        self.breakdown.push(Breakdown {
            name: name.to_string(),
            count,
            total,
            predicted,
        });
        self
    }

    pub fn with_reference(mut self, name: &str, value: f64) -> Self {
        self.references.push((name.to_string(), value));
        self
    }

    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// `sqrt(p(1-p)/trials)` at the empirical rate.
    pub fn stderr(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn breakdown(&self, name: &str) -> Option<&Breakdown> {
        self.breakdown.iter().find(|b| b.name == name)
    }

    /// Within `k` standard errors of the prediction (or below it, for bounds).
    pub fn consistent(&self, k: f64) -> bool {
        if self.predicted_is_bound {
            self.z_score <= k
        } else {
            self.z_score.abs() <= k
        }
    }
}

/// `(successes/trials - p) / sqrt(p(1-p)/trials)`, using the predicted rate
/// for the standard error. A degenerate prediction (`p` of 0 or 1) gives 0
/// when matched exactly and an infinite score otherwise.
/// Parameter value for report labels: at most ten decimals, trailing zeros
/// dropped, so `0.5000000000000001` prints as `0.5`.
pub fn short(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn z_score(successes: u64, trials: u64, p: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let phat = successes as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    if se == 0.0 {
        if (phat - p).abs() < 1e-15 {
            0.0
        } else {
            (phat - p).signum() * f64::INFINITY
        }
    } else {
        (phat - p) / se
    }
}

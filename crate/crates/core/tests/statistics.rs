//! Monte Carlo checks of the attack and session experiments against oracles
//! computed here, at four standard errors.

use qbc::boolfn::BoolFn;
use qbc::harness::{run_experiment, ExperimentConfig};
use qbc::protocol::Scheme;
use statrs::distribution::{Binomial, DiscreteCDF};

fn cfg(id: &str, trials: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(id);
    c.trials = trials;
    c.seed = 4242;
    c.workers = 4;
    c
}

fn z(successes: u64, trials: u64, p: f64) -> f64 {
    let rate = successes as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    if se == 0.0 {
        if rate == p {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (rate - p) / se
    }
}

fn rate_of(c: &ExperimentConfig) -> (u64, u64) {
    let r = run_experiment(c).unwrap();
    (r.report.successes, r.report.trials)
}

fn assert_band(c: &ExperimentConfig, p: f64) {
    let (s, t) = rate_of(c);
    let z = z(s, t, p);
    assert!(z.abs() <= 4.0, "{}: {s}/{t} vs {p} (z = {z})", c.experiment);
}

/// Bob wins when some string reveals all `w` positions F reads, else guesses.
fn linear_guess_oracle(w: i32, p_a: f64, m: i32) -> f64 {
    1.0 - 0.5 * (1.0 - p_a.powi(w)).powi(m)
}

#[test]
fn usd_guess_within_concealing_bound() {
    let mut c = cfg("bob-usd-guess", 20_000);
    c.n = 10;
    c.gap = 2;
    c.m = 4;
    c.cos_a = Some(0.8);
    let (s, t) = rate_of(&c);
    let cdf = Binomial::new(0.2, 10).unwrap().cdf(8);
    let bound = 0.5 + 0.5 * (1.0 - cdf.powi(4));
    let se = (bound * (1.0 - bound) / t as f64).sqrt();
    assert!((s as f64 / t as f64) <= bound + 4.0 * se);
    assert!(z(s, t, linear_guess_oracle(9, 0.2, 4)).abs() <= 4.0);
}

#[test]
fn usd_guess_on_a_dictator() {
    let mut c = cfg("bob-usd-guess", 20_000);
    c.f = Some(BoolFn::from_fn(3, |x| x >> 2 & 1 == 1).unwrap());
    c.m = 3;
    c.cos_a = Some(0.8);
    assert_eq!(c.f.as_ref().unwrap().ci_order(), 0);
    assert_band(&c, linear_guess_oracle(1, 0.2, 3));
}

#[test]
fn breidbart_keyed_majority() {
    for n in [1usize, 5, 15] {
        let c = {
            let mut c = cfg("breidbart-keyed", 50_000);
            c.n = n;
            c
        };
        let q = (std::f64::consts::PI / 8.0).cos().powi(2);
        let p = 1.0 - Binomial::new(q, n as u64).unwrap().cdf((n / 2) as u64);
        assert_band(&c, p);
        if n == 15 {
            assert!(p >= 0.99);
        }
    }
}

/// Majority of `m` per-string reads, each right with `r`; ties by coin.
fn majority(m: u64, r: f64) -> f64 {
    let b = Binomial::new(r, m).unwrap();
    let below = b.cdf(m / 2);
    let tie = if m % 2 == 0 {
        b.cdf(m / 2) - b.cdf(m / 2 - 1)
    } else {
        0.0
    };
    1.0 - below + tie / 2.0
}

#[test]
fn breidbart_guess_advantage_trends() {
    let q = (std::f64::consts::PI / 8.0).cos().powi(2);
    let mut by_n0 = Vec::new();
    for n0 in [1usize, 2, 3] {
        let mut c = cfg("bob-breidbart-guess", 40_000);
        c.n = 5;
        c.gap = 5 - n0;
        c.m = 3;
        let per = (1.0 + (2.0 * q - 1.0).powi(n0 as i32 + 1)) / 2.0;
        let p = majority(3, per);
        assert_band(&c, p);
        by_n0.push(p);
    }
    assert!(by_n0.windows(2).all(|w| w[1] < w[0]), "{by_n0:?}");
    let mut by_m = Vec::new();
    for m in [1usize, 3, 5] {
        let mut c = cfg("bob-breidbart-guess", 40_000);
        c.n = 5;
        c.gap = 2;
        c.m = m;
        let per = (1.0 + (2.0 * q - 1.0).powi(4)) / 2.0;
        let p = majority(m as u64, per);
        assert_band(&c, p);
        by_m.push(p);
    }
    assert!(by_m.windows(2).all(|w| w[1] > w[0]), "{by_m:?}");
}

#[test]
fn random_basis_guess() {
    let mut c = cfg("bob-random-basis-guess", 40_000);
    c.n = 4;
    c.gap = 2;
    c.m = 3;
    assert_band(&c, majority(3, (1.0 + 0.5f64.powi(3)) / 2.0));
}

#[test]
fn lies_escape_per_qubit() {
    let c2: f64 = 0.64;
    for (id, scheme_escape) in [("lie-b92", c2), ("lie-otbc", 0.8)] {
        for m in [1usize, 3] {
            let mut c = cfg(id, 40_000);
            c.m = m;
            c.cos_a = Some(0.8);
            assert_band(&c, scheme_escape.powi(m as i32));
        }
    }
}

#[test]
fn a_single_free_lie_is_caught_like_any_other() {
    for (id, p) in [("lie-b92-free", 0.64), ("lie-otbc-free", 0.8)] {
        let mut c = cfg(id, 40_000);
        c.cos_a = Some(0.8);
        assert_band(&c, p);
    }
}

#[test]
fn probe_collapse_still_vanishes() {
    let mut c = cfg("false-basis-probe", 40_000);
    c.m = 16;
    let (s, t) = rate_of(&c);
    let bound = 0.75f64.powi(8);
    let se = (bound * (1.0 - bound) / t as f64).sqrt();
    assert!((s as f64 / t as f64) <= bound + 4.0 * se);
    assert!(z(s, t, 0.75f64.powi(16)).abs() <= 4.0);
}

#[test]
fn coin_flips_are_fair() {
    for scheme in [Scheme::B92bc, Scheme::Bb84bc, Scheme::Otbc] {
        let mut c = cfg("coin-flip", 20_000);
        c.scheme = Some(scheme);
        let r = run_experiment(&c).unwrap();
        assert!(
            z(r.report.successes, r.report.trials, 0.5).abs() <= 4.0,
            "{scheme}"
        );
        let acc = r.report.breakdown("accepted").unwrap();
        assert_eq!(acc.count, acc.total);
    }
}

#[test]
fn curious_announcement_is_uncorrelated() {
    let mut c = cfg("coin-flip-curious", 100_000);
    c.n = 6;
    c.gap = 2;
    c.m = 4;
    c.cos_a = Some(0.8);
    let (s, t) = rate_of(&c);
    assert!(z(s, t, 0.5).abs() <= 4.0);
    assert!(z(s, t, linear_guess_oracle(5, 0.2, 4)).abs() <= 4.0);
}

#[test]
fn ot_known_fraction() {
    let mut c = cfg("ot-known", 20_000);
    c.n = 8;
    c.cos_a = Some(0.8);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.report.successes, r.report.trials);
    let known = r.report.breakdown("known").unwrap();
    assert!(z(known.count, known.total, 0.2).abs() <= 4.0);
}

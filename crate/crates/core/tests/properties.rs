use proptest::prelude::*;
use qbc::analysis::{concealing_exact, eq12_sides};
use qbc::bits::BitString;
use qbc::boolfn::BoolFn;
use qbc::harness::{read_frame, write_frame};
use qbc::protocol::{run_session, session_bit, BobStrategy, Message, Phase, Scheme, SessionConfig};
use qbc::quantum::{usd_measure, StatePair, UsdOutcome};
use qbc::sim::{run_trials, Tally};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn boolfn(max_n: usize) -> impl Strategy<Value = BoolFn> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), 1 << n)
            .prop_map(move |t| BoolFn::from_table(n, t).unwrap())
    })
}

/// Direct O(4^n) Walsh sum.
fn walsh_direct(f: &BoolFn, mask: usize) -> i64 {
    (0..f.table().len())
        .map(|x| {
            let e = f.eval_index(x) as u32 + (mask & x).count_ones();
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

proptest! {
    #[test]
    fn bitstring_index_round_trip(n in 1usize..20, raw in any::<u64>()) {
        let x = (raw as usize) & ((1 << n) - 1);
        prop_assert_eq!(BitString::from_index(x, n).to_index(), x);
    }

    #[test]
    fn hex_round_trip(f in boolfn(8)) {
        prop_assert_eq!(BoolFn::from_hex(&f.to_hex()).unwrap(), f);
    }

    #[test]
    fn fast_walsh_matches_direct_sum(f in boolfn(6)) {
        let w = f.walsh();
        for mask in 0..f.table().len() {
            prop_assert_eq!(w.at(mask), walsh_direct(&f, mask));
        }
        let energy: i64 = w.coefficients().iter().map(|c| c * c).sum();
        prop_assert_eq!(energy, 1i64 << (2 * f.arity()));
    }

    #[test]
    fn ci_order_survives_permutation_and_complement(f in boolfn(6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = f.arity();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(f.permute_vars(&perm).unwrap().ci_order(), f.ci_order());
        prop_assert_eq!(f.complement().ci_order(), f.ci_order());
    }

    #[test]
    fn eq12_sides_agree(m in 1u32..=64, c2 in 0.0f64..1.0) {
        let s = eq12_sides(m, c2.sqrt()).unwrap();
        prop_assert!((s.closed_form - s.binomial_sum).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.closed_form));
    }

    #[test]
    fn concealing_exact_is_a_monotone_cdf(n in 2u64..3000, frac in 0.0f64..0.98, p in 0.01f64..0.99) {
        let n0 = ((n - 1) as f64 * frac) as u64;
        let a = concealing_exact(n, n0, p).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        if n0 + 1 < n {
            prop_assert!(concealing_exact(n, n0 + 1, p).unwrap() >= a - 1e-12);
        }
    }

    #[test]
    fn usd_never_misidentifies(cos_a in 0.71f64..0.99, seed in any::<u64>()) {
        let pair = StatePair::with_cos(cos_a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let b = u8::from(rng.random_bool(0.5));
            if let UsdOutcome::Identified(v) = usd_measure(pair.state(b), &pair, &mut rng) {
                prop_assert_eq!(v, b);
            }
        }
    }

    #[test]
    fn tallies_do_not_depend_on_workers(trials in 1u64..400, seed in any::<u64>(), workers in 2usize..9) {
        let f = |_: u64, rng: &mut ChaCha8Rng| Ok(Tally::single(rng.random_bool(0.3), vec![rng.random_range(0..5)]));
        prop_assert_eq!(run_trials(trials, seed, 1, f).unwrap(), run_trials(trials, seed, workers, f).unwrap());
    }

    #[test]
    fn frames_round_trip(session in any::<u64>(), text in ".{0,200}") {
        let msg = Message::new(session, Phase::Open, "open", &text).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &msg).unwrap();
        prop_assert_eq!(u32::from_be_bytes(buf[..4].try_into().unwrap()) as usize, buf.len() - 4);
        prop_assert_eq!(read_frame(&mut buf.as_slice()).unwrap(), Some(msg));
    }

    #[test]
    fn truncated_frames_are_errors(session in any::<u64>(), cut in 1usize..40) {
        let msg = Message::new(session, Phase::Commit, "ack", &()).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &msg).unwrap();
        let cut = cut.min(buf.len() - 1);
        prop_assert!(read_frame(&mut &buf[..cut]).is_err());
    }

    #[test]
    fn honest_sessions_accept_and_replay(seed in any::<u64>(), session in 0u64..1000, scheme in 0usize..3, m in 1usize..5) {
        let scheme = [Scheme::B92bc, Scheme::Bb84bc, Scheme::Otbc][scheme];
        let cfg = SessionConfig::with_defaults(scheme, 5, m, Some(0.8), seed).unwrap();
        let b = session_bit(&cfg, session);
        let first = run_session(&cfg, session, b, BobStrategy::Honest).unwrap();
        prop_assert_eq!(first.transcript.verdict.accepted(), Some(b));
        let again = run_session(&cfg, session, b, BobStrategy::Honest).unwrap();
        prop_assert_eq!(first.transcript.to_json(), again.transcript.to_json());
    }
}

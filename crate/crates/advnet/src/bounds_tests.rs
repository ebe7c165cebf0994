use crate::bounds::*;
use crate::builtin::{self, Family};
use crate::error::Error;
use crate::netgraph::simple_two_level;
use crate::schemes::{self, SchemeOuter};

#[test]
fn singleton_bound_on_fully_vulnerable_crossover() {
    let report = singleton_bound(&builtin::crossover_full(), 1).unwrap();
    assert_eq!(report.rate, 0.0);
}

#[test]
fn singleton_bound_on_bypass() {
    let report = singleton_bound(&builtin::bypass(), 1).unwrap();
    assert_eq!(report.rate, 1.0);
    // the witness re-evaluates to the reported value
    let BoundWitness::Cut { edges, .. } = &report.witness else { panic!() };
    let net = builtin::bypass();
    let cut: std::collections::BTreeSet<usize> = edges.iter().copied().collect();
    let vulnerable = cut.intersection(net.vulnerable()).count();
    assert_eq!((cut.len() - vulnerable) + vulnerable.saturating_sub(2), 1);
}

#[test]
fn singleton_bound_without_vulnerable_edges_is_min_cut() {
    let report = singleton_bound(&builtin::crossover(), 1).unwrap();
    assert_eq!(report.rate, 2.0);
}

#[test]
fn singleton_two_level_family_values() {
    for t in 1..=3usize {
        let (ins, outs) = Family::A.profile(t).unwrap();
        assert_eq!(singleton_two_level(&ins, &outs, t).unwrap().rate, t as f64);
        let (ins, outs) = Family::B.profile(t).unwrap();
        assert_eq!(singleton_two_level(&ins, &outs, 1).unwrap().rate, t as f64);
        let (ins, outs) = Family::D.profile(t).unwrap();
        assert_eq!(singleton_two_level(&ins, &outs, t).unwrap().rate, 1.0);
        let (ins, outs) = Family::E.profile(t).unwrap();
        assert_eq!(singleton_two_level(&ins, &outs, t).unwrap().rate, 1.0);
        if t >= 2 {
            let (ins, outs) = Family::C.profile(t).unwrap();
            assert_eq!(singleton_two_level(&ins, &outs, t).unwrap().rate, 1.0);
        }
    }
}

#[test]
fn singleton_two_level_worked_instances() {
    assert_eq!(
        singleton_two_level(&[12, 8, 2, 2, 1], &[5, 2, 4, 3, 1], 3).unwrap().rate,
        7.0
    );
    assert_eq!(singleton_two_level(&[2, 5, 6], &[2, 2, 2], 2).unwrap().rate, 4.0);
}

#[test]
fn two_singleton_routes_agree() {
    let mut lcg = 0x1234_5678u64;
    let mut next = move |m: usize| {
        lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((lcg >> 33) as usize % m) + 1
    };
    for _ in 0..60 {
        let n = next(3);
        let ins: Vec<usize> = (0..n).map(|_| next(4)).collect();
        let outs: Vec<usize> = (0..n).map(|_| next(4)).collect();
        let budget = next(3);
        let by_profile = singleton_two_level(&ins, &outs, budget).unwrap().rate;
        let net = simple_two_level(&ins, &outs).unwrap();
        let by_cuts = singleton_bound(&net, budget).unwrap().rate;
        assert_eq!(by_profile, by_cuts, "profile ({ins:?}, {outs:?}) budget {budget}");
    }
}

#[test]
fn family_sharpest_statements() {
    let r = family_strict_upper(Family::A, 1, 3).unwrap();
    assert_eq!(r.strictness, Strictness::Equal);
    assert!((r.rate - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(r.code_size, Some(2));

    let r = family_strict_upper(Family::D, 2, 2).unwrap();
    assert_eq!(r.strictness, Strictness::Equal);
    assert_eq!(r.rate, 1.0);
    assert_eq!(r.code_size, Some(2));

    let r = family_strict_upper(Family::B, 3, 2).unwrap();
    assert_eq!(r.strictness, Strictness::LessThan);
    assert_eq!(r.rate, 3.0);
    assert_eq!(r.code_size, Some(7));

    let r = family_strict_upper(Family::A, 2, 2).unwrap();
    assert_eq!(r.strictness, Strictness::LessThan);
    assert_eq!(r.rate, 2.0);

    let r = family_strict_upper(Family::E, 3, 2).unwrap();
    assert_eq!(r.strictness, Strictness::LessThan);
    assert_eq!(r.rate, 1.0);

    let r = family_strict_upper(Family::C, 2, 5).unwrap();
    assert_eq!((r.strictness, r.rate), (Strictness::Equal, 1.0));

    assert!(family_strict_upper(Family::C, 1, 2).is_err());
}

fn explicit_words(outer: &SchemeOuter) -> Vec<Vec<u8>> {
    match outer {
        SchemeOuter::Explicit(w) => w.clone(),
        SchemeOuter::Product(p) => panic!("expected explicit words, got {p:?}"),
    }
}

#[test]
fn first_packing_on_the_diamond_alarm_scheme() {
    let s = schemes::diamond_alarm(3).unwrap();
    let words = explicit_words(&s.outer);
    let report = first_packing_check(&s.network, &words, &s.code, 1, 1).unwrap();
    assert!(report.holds);
    assert_eq!(report.lhs, 8);
    assert_eq!(report.rhs, 9);
    assert!(report.lhs <= 27);
}

#[test]
fn first_packing_refutes_the_oversized_diamond_code() {
    // all q repetition words on the diamond: the inequality fails, which
    // certifies that no network code of this shape makes them unambiguous
    let s = schemes::diamond_alarm(3).unwrap();
    let words: Vec<Vec<u8>> = (0..3u8).map(|v| vec![v; 3]).collect();
    let report = first_packing_check(&s.network, &words, &s.code, 1, 1).unwrap();
    assert!(!report.holds);
    assert_eq!(report.lhs, 11);
    assert_eq!(report.rhs, 9);
}

#[test]
fn first_packing_with_zero_budget_is_code_size() {
    let s = schemes::diamond_alarm(3).unwrap();
    let words = explicit_words(&s.outer);
    let report = first_packing_check(&s.network, &words, &s.code, 0, 1).unwrap();
    assert_eq!(report.lhs, words.len() as u128);
    assert!(report.holds);
}

#[test]
fn second_packing_on_the_diamond_alarm_scheme() {
    let s = schemes::diamond_alarm(3).unwrap();
    let words = explicit_words(&s.outer);
    let report = second_packing_check(&s.network, &words, &s.code, 1, 1).unwrap();
    assert!(report.holds);
    assert_eq!(report.lhs, 20);
    assert_eq!(report.rhs, 27);
}

/// The joint preimage genuinely differs from the coordinate product, which
/// is why the preimage side is computed jointly.
#[test]
fn preimage_is_not_a_coordinate_product() {
    let s = schemes::diamond_alarm(3).unwrap();
    let relay = &s.code.nodes[&2];
    // fan-out of (1,1,1) through (identity, relay) under one substitution
    let mut fanout = std::collections::BTreeSet::new();
    for w in crate::util::hamming_ball(3, &[1, 1, 1], 1) {
        fanout.insert((w[0], relay.eval(3, &w[1..])[0]));
    }
    assert_eq!(fanout.len(), 4);
    // joint preimage of the fan-out image
    let mut joint = 0usize;
    for u in 0..3u8 {
        for v0 in 0..3u8 {
            for v1 in 0..3u8 {
                if fanout.contains(&(u, relay.eval(3, &[v0, v1])[0])) {
                    joint += 1;
                }
            }
        }
    }
    // coordinate-product form: identity preimage x relay preimage
    let head = 3usize; // identity preimage of {0,1,2}
    let image: std::collections::BTreeSet<u8> = crate::util::hamming_ball(3, &[1, 1], 1)
        .iter()
        .map(|w| relay.eval(3, w)[0])
        .collect();
    let tail = (0..3u8)
        .flat_map(|a| (0..3u8).map(move |b| (a, b)))
        .filter(|&(a, b)| image.contains(&relay.eval(3, &[a, b])[0]))
        .count();
    assert_eq!(joint, 10);
    assert_eq!(head * tail, 24);
    assert_ne!(joint, head * tail);
}

#[test]
fn second_packing_on_the_mirrored_scheme() {
    let s = schemes::mirrored_alarm(2).unwrap();
    let words = explicit_words(&s.outer);
    let report = second_packing_check(&s.network, &words, &s.code, 1, 0).unwrap();
    assert!(report.holds);
    assert_eq!(report.lhs, 16);
    assert_eq!(report.rhs, 16);
}

#[test]
fn second_packing_zero_budget() {
    let s = schemes::diamond_alarm(3).unwrap();
    let words = explicit_words(&s.outer);
    let report = second_packing_check(&s.network, &words, &s.code, 0, 1).unwrap();
    assert!(report.holds);
}

#[test]
fn packing_checks_hold_for_every_verified_scheme() {
    let cases: Vec<(crate::schemes::Scheme, usize)> = vec![
        (schemes::diamond_alarm(2).unwrap(), 1),
        (schemes::diamond_alarm(3).unwrap(), 1),
        (schemes::mirrored_alarm(2).unwrap(), 0),
        (schemes::mirrored_alarm(3).unwrap(), 0),
        (schemes::wide_diamond_majority(2).unwrap(), 1),
        (schemes::shell_relay(3, 2).unwrap(), 0),
        (schemes::balanced_majority(2, 2).unwrap(), 0),
    ];
    for (scheme, r) in cases {
        assert!(crate::schemes::verify(&scheme, scheme.budget).unwrap().passed);
        let words = explicit_words(&scheme.outer);
        let first =
            first_packing_check(&scheme.network, &words, &scheme.code, scheme.budget, r).unwrap();
        assert!(first.holds, "{} image packing", scheme.label);
        let second =
            second_packing_check(&scheme.network, &words, &scheme.code, scheme.budget, r).unwrap();
        assert!(second.holds, "{} preimage packing", scheme.label);
    }
}

#[test]
fn packing_rejects_bad_preconditions() {
    let s = schemes::mirrored_alarm(2).unwrap();
    let words = explicit_words(&s.outer);
    // the mirrored relays have more inputs than outputs: r = 1 is invalid
    assert!(matches!(
        first_packing_check(&s.network, &words, &s.code, 1, 1),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn mds_partition_lower_bound_values() {
    let r = lower_mds_partition(&[2, 5, 6], &[2, 2, 2], 2).unwrap();
    assert_eq!(r.rate, 3.0);
    let BoundWitness::Profile(profile) = &r.witness else { panic!() };
    assert_eq!(profile.local_decode, vec![2]);
    assert_eq!(profile.x_gain, 1);
    assert_eq!(profile.y_gain, 0);

    let (ins, outs) = Family::A.profile(2).unwrap();
    assert_eq!(lower_mds_partition(&ins, &outs, 2).unwrap().rate, 0.0);

    assert_eq!(lower_mds_partition(&[3, 2], &[1, 4], 0).unwrap().rate, 3.0);

    assert_eq!(
        lower_mds_partition(&[12, 8, 2, 2, 1], &[5, 2, 4, 3, 1], 3).unwrap().rate,
        7.0
    );
}

#[test]
fn trimmed_forwarding_lower_bound_values() {
    assert_eq!(lower_trimmed_forwarding(&[2, 5, 6], &[2, 2, 2], 2).unwrap().rate, 2.0);
    for s in 1..=4usize {
        let (ins, outs) = Family::B.profile(s).unwrap();
        assert_eq!(lower_trimmed_forwarding(&ins, &outs, 1).unwrap().rate, (s - 1) as f64);
    }
    assert_eq!(lower_trimmed_forwarding(&[3, 2], &[1, 4], 0).unwrap().rate, 3.0);
}

#[test]
fn bound_sandwich_over_random_profiles() {
    let mut lcg = 0xfeed_f00du64;
    let mut next = move |m: usize| {
        lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((lcg >> 33) as usize % m) + 1
    };
    for _ in 0..200 {
        let n = next(4);
        let ins: Vec<usize> = (0..n).map(|_| next(6)).collect();
        let outs: Vec<usize> = (0..n).map(|_| next(6)).collect();
        let budget = next(3);
        let low_fwd = lower_trimmed_forwarding(&ins, &outs, budget).unwrap().rate;
        let low_mds = lower_mds_partition(&ins, &outs, budget).unwrap().rate;
        let upper = singleton_two_level(&ins, &outs, budget).unwrap().rate;
        assert!(
            low_fwd <= low_mds && low_mds <= upper,
            "profile ({ins:?}, {outs:?}) budget {budget}: {low_fwd} {low_mds} {upper}"
        );
    }
}

#[test]
fn full_adversary_values() {
    assert_eq!(full_adversary_value(&builtin::crossover_full(), 1).unwrap().rate, 0.0);
    assert_eq!(full_adversary_value(&builtin::interchange(), 1).unwrap().rate, 2.0);
    assert_eq!(full_adversary_value(&builtin::crossover(), 0).unwrap().rate, 2.0);
}

#[test]
fn bsc_reference_spot_values() {
    let cases = [
        (1u8, 1u8, 3usize, 0.10, 1.593013219),
        (1, 2, 3, 0.01, 1.919206864),
        (1, 1, 5, 0.04, 3.788539055),
        (1, 2, 5, 0.04, 3.757707811),
        (1, 1, 7, 0.03, 5.639256995),
        (1, 2, 7, 0.01, 5.919206864),
        (2, 1, 3, 0.07, 5.706687142),
        (2, 2, 3, 0.05, 5.140809129),
        (2, 1, 5, 0.10, 7.965066096),
        (2, 2, 5, 0.03, 9.028040711),
        (2, 1, 7, 0.07, 13.31560333),
        (2, 2, 7, 0.04, 12.30395468),
    ];
    for (gen, scen, n, p, expected) in cases {
        let got = bsc_level_capacity(gen, scen, n, p).unwrap();
        assert!(
            (got - expected).abs() < 1e-6,
            "gen {gen} scen {scen} n {n} p {p}: {got} vs {expected}"
        );
    }
}

#[test]
fn bsc_noiseless_limit() {
    assert_eq!(bsc_level_capacity(1, 1, 3, 0.0).unwrap(), 2.0);
    assert_eq!(bsc_level_capacity(1, 2, 3, 0.0).unwrap(), 2.0);
    assert_eq!(bsc_level_capacity(2, 1, 3, 0.0).unwrap(), 6.0);
    assert_eq!(bsc_level_capacity(2, 2, 3, 0.0).unwrap(), 6.0);
}

#[test]
fn bsc_gap_interval_property() {
    let entropy = |p: f64| -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    };
    for gen in [1u8, 2] {
        for n in [3usize, 5, 7] {
            let (lo, hi) = bsc_gap_interval(gen, n);
            assert_eq!(lo, 0.0);
            for i in 1..=49 {
                let p = i as f64 / 100.0;
                let h = entropy(p);
                if h <= lo + 1e-9 || (h - hi).abs() < 2e-2 {
                    continue; // stay clear of the boundary
                }
                let s1 = bsc_level_capacity(gen, 1, n, p).unwrap();
                let s2 = bsc_level_capacity(gen, 2, n, p).unwrap();
                let gap = s1 - s2;
                if h < hi {
                    assert!(gap > 1e-9, "gen {gen} n {n} p {p}: expected a gap, got {gap}");
                } else {
                    assert!(gap.abs() < 1e-9, "gen {gen} n {n} p {p}: unexpected gap {gap}");
                }
            }
        }
    }
}

#[test]
fn bsc_rejects_out_of_range() {
    assert!(matches!(bsc_level_capacity(1, 1, 3, 0.7), Err(Error::OutOfRange(_))));
    assert!(matches!(bsc_level_capacity(3, 1, 3, 0.1), Err(Error::OutOfRange(_))));
}

#[test]
fn curves_csv_shape() {
    let csv = curves_csv(1, 3, 0.1).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,scenario1,scenario2,gap");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1], "0.000000000,2.000000000,2.000000000,0.000000000");
}

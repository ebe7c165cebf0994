//! Property-based invariants over randomized structures.

use std::collections::BTreeSet;

use advnet::builtin::Family;
use advnet::netcode::{induced_channel, NetworkCode, NodeFunction};
use advnet::netgraph::{detect_levels, from_level_matrices, LevelMatrices, Network};
use proptest::prelude::*;

fn level_matrices() -> impl Strategy<Value = LevelMatrices> {
    // 2- or 3-level shapes with small layers and multiplicities
    let layer = prop::collection::vec(1usize..=3, 1..=3);
    (layer.clone(), layer, prop::option::of(1usize..=3)).prop_map(
        |(mid_sizes, out_mult, third)| {
            let l1 = mid_sizes.len();
            let first = vec![mid_sizes.clone()];
            match third {
                None => {
                    let second: Vec<Vec<usize>> =
                        out_mult.iter().cycle().take(l1).map(|&b| vec![b]).collect();
                    LevelMatrices { matrices: vec![first, second] }
                }
                Some(l2) => {
                    // connect every layer-1 vertex to one or two layer-2
                    // slots, then make sure no slot is left unreached
                    let mut middle = vec![vec![0usize; l2]; l1];
                    for (i, row) in middle.iter_mut().enumerate() {
                        row[i % l2] = 1 + (i % 2);
                        if l2 > 1 {
                            row[(i + 1) % l2] = 1;
                        }
                    }
                    for j in 0..l2 {
                        if middle.iter().all(|row| row[j] == 0) {
                            middle[j % l1][j] = 1;
                        }
                    }
                    let last: Vec<Vec<usize>> = (0..l2).map(|_| vec![1]).collect();
                    LevelMatrices { matrices: vec![first, middle, last] }
                }
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_matrix_roundtrip(lm in level_matrices()) {
        let net = from_level_matrices(&lm).unwrap();
        let detected = detect_levels(&net).unwrap();
        prop_assert_eq!(detected, lm);
    }

    #[test]
    fn edge_order_extends_precedence(lm in level_matrices()) {
        let net = from_level_matrices(&lm).unwrap();
        for e in 0..net.edge_count() {
            for f in 0..net.edge_count() {
                if net.precedes(e, f) {
                    prop_assert!(e <= f);
                }
            }
        }
    }

    #[test]
    fn min_cut_equals_minimum_enumerated_cut(lm in level_matrices()) {
        let net = from_level_matrices(&lm).unwrap();
        for t in net.terminals().collect::<Vec<_>>() {
            let cuts = net.enumerate_cuts(t).unwrap();
            let smallest = cuts.iter().map(BTreeSet::len).min().unwrap();
            prop_assert_eq!(smallest, net.min_cut(net.source(), t).unwrap());
            for cut in &cuts {
                prop_assert!(net.is_cut(cut, t));
            }
        }
    }
}

fn random_relay_code(net: &Network, q: usize, seed: u64) -> NetworkCode {
    let state = std::cell::Cell::new(seed | 1);
    let next = move || {
        let s = state
            .get()
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        state.set(s);
        (s >> 33) as u128
    };
    let mut code = NetworkCode::new(q);
    for v in net.intermediates() {
        let arity_in = net.in_edges(v).len();
        let arity_out = net.out_edges(v).len();
        let f = NodeFunction::table_from_fn(q, arity_in, arity_out, |_input| {
            (0..arity_out).map(|_| (next() % q as u128) as u8).collect()
        })
        .unwrap();
        code.nodes.insert(v, f);
    }
    code
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Raising the adversary budget only coarsens the induced channel.
    #[test]
    fn fanouts_nest_in_the_budget(seed in 0u64..1 << 48, param in 1usize..=2) {
        let net = Family::E.network(param).unwrap();
        let q = 2;
        let code = random_relay_code(&net, q, seed);
        let terminal = net.terminals().next().unwrap();
        let tighter = induced_channel(&net, &code, terminal, 0).unwrap();
        let mid = induced_channel(&net, &code, terminal, 1).unwrap();
        let wider = induced_channel(&net, &code, terminal, 2).unwrap();
        prop_assert!(tighter.finer_than(&mid).unwrap());
        prop_assert!(mid.finer_than(&wider).unwrap());
    }

    /// Enlarging the vulnerable set only coarsens the induced channel.
    #[test]
    fn fanouts_grow_with_the_vulnerable_set(seed in 0u64..1 << 48) {
        let mut net = Family::A.network(1).unwrap();
        let q = 2;
        let code = random_relay_code(&net, q, seed);
        let terminal = net.terminals().next().unwrap();
        let restricted = induced_channel(&net, &code, terminal, 1).unwrap();
        let all: Vec<usize> = (0..net.edge_count()).collect();
        net.set_vulnerable(all).unwrap();
        let wide = induced_channel(&net, &code, terminal, 1).unwrap();
        prop_assert!(restricted.finer_than(&wide).unwrap());
    }
}

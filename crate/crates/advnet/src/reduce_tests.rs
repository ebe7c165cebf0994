use std::collections::BTreeSet;

use crate::bounds::Strictness;
use crate::builtin::{self, Family};
use crate::netgraph::{detect_levels, simple_two_level, CutPair, EdgeId};
use crate::reduce::*;

fn set(ids: &[EdgeId]) -> BTreeSet<EdgeId> {
    ids.iter().copied().collect()
}

fn profile_of(net: &crate::netgraph::Network) -> (Vec<usize>, Vec<usize>) {
    detect_levels(net).unwrap().two_level_profile().unwrap()
}

#[test]
fn hexagon_contracts_to_two_relays() {
    let (two, map) = associate_two_level(&builtin::hexagon()).unwrap();
    let (ins, outs) = profile_of(&two);
    assert_eq!((ins, outs), (vec![2, 4], vec![2, 2]));
    assert_eq!(map.components.len(), 2);
    // multiplicity totals are preserved
    let hexagon = builtin::hexagon();
    let src_edges = hexagon.out_edges(hexagon.source()).len();
    assert_eq!(profile_of(&two).0.iter().sum::<usize>(), src_edges);
}

#[test]
fn association_preserves_edge_totals() {
    let net = builtin::hexagon();
    let (two, _) = associate_two_level(&net).unwrap();
    let (ins, outs) = profile_of(&two);
    assert_eq!(ins.iter().sum::<usize>(), net.out_edges(net.source()).len());
    let terminal = net.terminals().next().unwrap();
    assert_eq!(outs.iter().sum::<usize>(), net.in_edges(terminal).len());
}

#[test]
fn association_rejects_non_three_level_networks() {
    assert!(associate_two_level(&builtin::diamond()).is_err());
    assert!(associate_two_level(&builtin::crossover()).is_err());
}

fn crossover_cut_pair() -> CutPair {
    CutPair { first: set(&[0, 1, 8]), second: set(&[4, 9]), terminal: 5 }
}

fn interchange_cut_pair() -> CutPair {
    CutPair { first: set(&[0, 6, 7, 8, 9]), second: set(&[0, 13, 14, 15]), terminal: 5 }
}

#[test]
fn crossover_pair_induces_the_diamond() {
    let net = builtin::crossover_restricted();
    let (three, map) = induce_three_level(&net, &crossover_cut_pair()).unwrap();
    assert_eq!(map.layer1_edges, vec![0, 1, 8]);
    assert_eq!(map.layer2_edges, vec![4, 9]);
    let lm = detect_levels(&three).unwrap();
    assert_eq!(lm.levels(), 3);
    // all three source edges are vulnerable in the induced network
    assert_eq!(three.vulnerable().len(), 3);
    let (two, _) = associate_two_level(&three).unwrap();
    assert!(two.same_shape(&builtin::diamond()));
}

#[test]
fn interchange_pair_induces_the_b3_shape() {
    let net = builtin::interchange();
    let (three, map) = induce_three_level(&net, &interchange_cut_pair()).unwrap();
    assert_eq!(map.layer1_edges.len(), 5);
    assert_eq!(map.layer2_edges.len(), 4);
    let (two, _) = associate_two_level(&three).unwrap();
    let (ins, outs) = profile_of(&two);
    let (fins, fouts) = Family::B.profile(3).unwrap();
    assert_eq!((ins, outs), (fins, fouts));
}

#[test]
fn identity_pair_on_a_layered_network_reproduces_it() {
    let net = builtin::hexagon();
    let src: Vec<EdgeId> = net.out_edges(net.source()).to_vec();
    let terminal = net.terminals().next().unwrap();
    let snk: Vec<EdgeId> = net.in_edges(terminal).to_vec();
    let pair = CutPair {
        first: src.iter().copied().collect(),
        second: snk.iter().copied().collect(),
        terminal,
    };
    let (three, _) = induce_three_level(&net, &pair).unwrap();
    let lm_in = detect_levels(&net).unwrap();
    let lm_out = detect_levels(&three).unwrap();
    assert_eq!(lm_in.matrices[1], lm_out.matrices[1]);
}

#[test]
fn induced_vulnerability_is_the_first_cut_intersection() {
    let mut net = builtin::crossover_restricted();
    // drop edge 8 from the vulnerable set: the induced chain line is safe
    net.set_vulnerable(vec![0, 1, 2, 3, 5, 6]).unwrap();
    let (three, map) = induce_three_level(&net, &crossover_cut_pair()).unwrap();
    let idx = map.layer1_edges.iter().position(|&e| e == 8).unwrap();
    assert!(!three.vulnerable().contains(&idx));
    assert_eq!(three.vulnerable().len(), 2);
}

#[test]
fn family_matching() {
    assert_eq!(match_family(&[1, 2], &[1, 1], 1), Some((Family::A, 1)));
    assert_eq!(match_family(&[2, 1], &[1, 1], 1), Some((Family::A, 1)));
    assert_eq!(match_family(&[2, 4], &[2, 2], 2), Some((Family::A, 2)));
    assert_eq!(match_family(&[1, 4], &[1, 3], 1), Some((Family::B, 3)));
    assert_eq!(match_family(&[3, 4], &[3, 3], 3), Some((Family::C, 3)));
    assert_eq!(match_family(&[4, 4], &[1, 1], 2), Some((Family::D, 2)));
    assert_eq!(match_family(&[2, 3], &[1, 1], 2), Some((Family::E, 2)));
    // budget must agree
    assert_eq!(match_family(&[2, 4], &[2, 2], 1), None);
    assert_eq!(match_family(&[5, 2], &[2, 2], 2), None);
}

#[test]
fn crossover_chain_reaches_the_diamond_value() {
    let net = builtin::crossover_restricted();
    let q = 3;
    let (report, chain) =
        double_cut_bound(&net, q, 1, Some(vec![crossover_cut_pair()]), Default::default())
            .unwrap();
    assert_eq!(report.strictness, Strictness::Equal);
    assert!((report.rate - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(report.code_size, Some(2));
    assert_eq!(chain.rule, "family-a-1");
    assert_eq!(chain.stages.len(), 2);
}

#[test]
fn interchange_chain_reaches_the_strict_b3_bound() {
    let net = builtin::interchange();
    let (report, chain) =
        double_cut_bound(&net, 3, 1, Some(vec![interchange_cut_pair()]), Default::default())
            .unwrap();
    assert_eq!(report.strictness, Strictness::LessThan);
    assert_eq!(report.rate, 3.0);
    assert_eq!(chain.rule, "family-b-3");
}

#[test]
fn degenerate_identity_pair_gives_one_per_edge() {
    // a single safe edge as both cuts bounds the rate by that edge alone
    let net = crate::netgraph::Network::from_parts(
        vec!["S".into(), "V".into(), "T".into()],
        vec![(0, 1), (0, 1), (1, 2)],
        0,
        vec![2],
        vec![0, 1],
    )
    .unwrap();
    let pair = CutPair { first: set(&[2]), second: set(&[2]), terminal: 2 };
    let (report, _) = double_cut_bound(&net, 2, 1, Some(vec![pair]), Default::default()).unwrap();
    assert_eq!(report.rate, 1.0);
}

#[test]
fn auto_mode_is_no_worse_than_the_plain_cut_bound() {
    for (net, q, budget) in [
        (builtin::diamond(), 3usize, 1usize),
        (builtin::mirrored_diamond(), 2, 1),
        (builtin::bypass(), 3, 1),
        (builtin::crossover_restricted(), 3, 1),
    ] {
        let (report, _) = double_cut_bound(&net, q, budget, None, Default::default()).unwrap();
        let singleton = crate::bounds::singleton_bound(&net, budget).unwrap();
        assert!(
            report.rate <= singleton.rate + 1e-12,
            "{report:?} vs singleton {singleton:?}"
        );
    }
}

#[test]
fn auto_mode_finds_a_strict_bound_on_the_interchange() {
    let net = builtin::interchange();
    let (report, chain) = double_cut_bound(&net, 3, 1, None, Default::default()).unwrap();
    assert_eq!(report.strictness, Strictness::LessThan);
    assert_eq!(report.rate, 3.0);
    assert_eq!(chain.rule, "family-b-3");
}

#[test]
fn auto_mode_finds_the_crossover_chain() {
    let net = builtin::crossover_restricted();
    let (report, chain) = double_cut_bound(&net, 3, 1, None, Default::default()).unwrap();
    assert!((report.rate - 2f64.ln() / 3f64.ln()).abs() < 1e-12, "{report:?}");
    assert_eq!(chain.rule, "family-a-1");
}

#[test]
fn reports_are_deterministic() {
    let net = builtin::crossover_restricted();
    let a = double_cut_bound(&net, 3, 1, None, Default::default()).unwrap();
    let b = double_cut_bound(&net, 3, 1, None, Default::default()).unwrap();
    assert_eq!(serde_json::to_string(&a.1).unwrap(), serde_json::to_string(&b.1).unwrap());
}

/// Exact capacity <= cut-pair bound <= plain cut bound, on instances where
/// the exhaustive oracle completes.
#[test]
fn soundness_sandwich_against_exact_search() {
    for (net, q) in [(builtin::diamond(), 2usize), (builtin::mirrored_diamond(), 2)] {
        let exact =
            crate::search::exact_capacity(&net, q, 1, &Default::default(), None).unwrap();
        assert!(exact.exhaustive);
        let (pair_bound, _) = double_cut_bound(&net, q, 1, None, Default::default()).unwrap();
        let singleton = crate::bounds::singleton_bound(&net, 1).unwrap();
        assert!(exact.rate() <= pair_bound.rate + 1e-9);
        assert!(pair_bound.rate <= singleton.rate + 1e-9);
    }
}

#[test]
fn diamond_association_from_two_level_identity() {
    // building a 3-level expansion of the diamond and contracting it back
    let three = crate::netgraph::from_level_matrices(&crate::netgraph::LevelMatrices {
        matrices: vec![
            vec![vec![1, 1, 1]],
            vec![vec![1, 0], vec![0, 1], vec![0, 1]],
            vec![vec![1], vec![1]],
        ],
    })
    .unwrap();
    let (two, _) = associate_two_level(&three).unwrap();
    let (ins, outs) = profile_of(&two);
    assert_eq!((ins.clone(), outs.clone()), (vec![1, 2], vec![1, 1]));
    let diamond = simple_two_level(&ins, &outs).unwrap();
    assert!(two.same_shape(&diamond));
}

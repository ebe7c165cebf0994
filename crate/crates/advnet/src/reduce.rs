//! Structural reductions: contracting a simple 3-level network to its
//! associated 2-level network, inducing a simple 3-level network from a
//! nested cut pair, and the composed cut-pair bound pipeline.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::{family_strict_upper, singleton_bound_with_limit, singleton_two_level, BoundReport};
use crate::builtin::Family;
use crate::error::{Error, Result};
use crate::netgraph::{detect_levels, CutPair, EdgeId, Network, VertexId};

/// Component mapping of the 2-level association: for each relay of the
/// output network, the layer-1 and layer-2 vertices of the input network it
/// absorbs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationMap {
    pub components: Vec<(Vec<VertexId>, Vec<VertexId>)>,
}

/// Contract a simple 3-level network along the connected components of its
/// middle bipartite graph: one relay per component, with in-multiplicity its
/// layer-1 vertex count and out-multiplicity its layer-2 vertex count.
/// Components are ordered by (ins, outs). Source-adjacent edges of the
/// result are vulnerable, matching the source-adjacent convention.
pub fn associate_two_level(net: &Network) -> Result<(Network, AssociationMap)> {
    let lm = detect_levels(net).ok_or(Error::NotSimple3Level)?;
    if lm.levels() != 3 || lm.layer_size(3) != 1 {
        return Err(Error::NotSimple3Level);
    }
    // simple: layer-1 in-degrees all 1, layer-2 out-degrees all 1
    if lm.matrices[0][0].iter().any(|&d| d != 1) {
        return Err(Error::NotSimple3Level);
    }
    if lm.matrices[2].iter().any(|row| row[0] != 1) {
        return Err(Error::NotSimple3Level);
    }
    let middle = &lm.matrices[1];
    let rows = middle.len();
    let cols = middle[0].len();

    // union-find over rows and columns of the middle matrix
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (i, row) in middle.iter().enumerate() {
        for (j, &mult) in row.iter().enumerate() {
            if mult > 0 {
                let a = find(&mut parent, i);
                let b = find(&mut parent, rows + j);
                parent[a] = b;
            }
        }
    }
    // vertex ids: source is 0, layer-1 vertices follow in layer order
    let layer1_ids: Vec<VertexId> = (1..=rows).collect();
    let layer2_ids: Vec<VertexId> = (rows + 1..=rows + cols).collect();
    let mut components: Vec<(Vec<VertexId>, Vec<VertexId>)> = vec![];
    let mut roots: Vec<usize> = vec![];
    for x in 0..rows + cols {
        let r = find(&mut parent, x);
        if !roots.contains(&r) {
            roots.push(r);
            components.push((vec![], vec![]));
        }
        let slot = roots.iter().position(|&y| y == r).unwrap();
        if x < rows {
            components[slot].0.push(layer1_ids[x]);
        } else {
            components[slot].1.push(layer2_ids[x - rows]);
        }
    }
    if components.iter().any(|(a, b)| a.is_empty() || b.is_empty()) {
        return Err(Error::NotSimple3Level);
    }
    components.sort_by_key(|(a, b)| (a.len(), b.len(), a.clone()));
    let ins: Vec<usize> = components.iter().map(|(a, _)| a.len()).collect();
    let outs: Vec<usize> = components.iter().map(|(_, b)| b.len()).collect();
    let two_level = crate::netgraph::simple_two_level(&ins, &outs)?;
    Ok((two_level, AssociationMap { components }))
}

/// Edge identifications of the induced 3-level network: original edge ids in
/// the order of the layer-1 and layer-2 vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedMap {
    pub layer1_edges: Vec<EdgeId>,
    pub layer2_edges: Vec<EdgeId>,
}

/// Build the simple 3-level network of a nested cut pair: layer-1 vertices
/// stand for the first cut's edges, layer-2 vertices for the second cut's,
/// joined exactly on the immediate-predecessor relation. The vulnerable set
/// of the result is the image of the vulnerable first-cut edges.
pub fn induce_three_level(net: &Network, cuts: &CutPair) -> Result<(Network, InducedMap)> {
    cuts.validate(net)?;
    let first: Vec<EdgeId> = cuts.first.iter().copied().collect();
    let second: Vec<EdgeId> = cuts.second.iter().copied().collect();
    let pool: BTreeSet<EdgeId> = cuts.first.clone();
    let mut middle: Vec<(usize, usize)> = vec![];
    for (j, &e) in second.iter().enumerate() {
        let preds = net.immediate_predecessors(e, &pool);
        debug_assert!(!preds.is_empty(), "cut precedence guarantees a predecessor");
        for p in preds {
            let i = first.iter().position(|&x| x == p).unwrap();
            middle.push((i, j));
        }
    }
    for (i, &e) in first.iter().enumerate() {
        if !middle.iter().any(|&(a, _)| a == i) {
            return Err(Error::InvalidCutPair(format!(
                "first-cut edge {e} precedes no second-cut edge"
            )));
        }
    }

    let mut names = vec!["S".to_string()];
    for &e in &first {
        names.push(format!("F{e}"));
    }
    for &e in &second {
        names.push(format!("G{e}"));
    }
    names.push("T".to_string());
    let terminal = names.len() - 1;
    let mut edges: Vec<(VertexId, VertexId)> = vec![];
    for i in 0..first.len() {
        edges.push((0, 1 + i));
    }
    for &(i, j) in &middle {
        edges.push((1 + i, 1 + first.len() + j));
    }
    for j in 0..second.len() {
        edges.push((1 + first.len() + j, terminal));
    }
    let vulnerable: Vec<EdgeId> = first
        .iter()
        .enumerate()
        .filter(|(_, e)| net.vulnerable().contains(e))
        .map(|(i, _)| i)
        .collect();
    let induced = Network::from_parts(names, edges, 0, vec![terminal], vulnerable)?;
    Ok((induced, InducedMap { layer1_edges: first, layer2_edges: second }))
}

/// Match a simple 2-level profile with all source edges vulnerable against
/// the built-in families at the given budget. Exact-capacity families win
/// over strict-bound families when several match.
pub fn match_family(ins: &[usize], outs: &[usize], budget: usize) -> Option<(Family, usize)> {
    if ins.len() != 2 {
        return None;
    }
    let mut pairs: Vec<(usize, usize)> = ins.iter().copied().zip(outs.iter().copied()).collect();
    pairs.sort_unstable();
    let [(a0, b0), (a1, b1)] = pairs[..] else { return None };
    let t = budget;
    // exact families first
    if t == 1 && (a0, b0, a1, b1) == (1, 1, 2, 1) {
        return Some((Family::A, 1)); // the diamond, exact capacity
    }
    if t >= 2 && (a0, b0, a1, b1) == (t, t, t + 1, t) {
        return Some((Family::C, t));
    }
    if t >= 1 && (a0, b0, a1, b1) == (2 * t, 1, 2 * t, 1) {
        return Some((Family::D, t));
    }
    // strict-bound families
    if t >= 2 && (a0, b0, a1, b1) == (t, t, 2 * t, t) {
        return Some((Family::A, t));
    }
    if t == 1 && b0 == 1 && a0 == 1 && b1 >= 2 && a1 == b1 + 1 {
        return Some((Family::B, b1));
    }
    if t >= 2 && (a0, b0, a1, b1) == (t, 1, t + 1, 1) {
        return Some((Family::E, t));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub tag: String,
    pub network: Network,
    pub note: String,
}

/// The audit trail of one cut-pair reduction: every constructed network plus
/// the rule that produced the final number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionChain {
    pub terminal: VertexId,
    pub first_cut: Vec<EdgeId>,
    pub second_cut: Vec<EdgeId>,
    pub stages: Vec<Stage>,
    pub rule: String,
    pub bound: BoundReport,
}

/// Evaluate one nested cut pair: induce the 3-level network, contract to
/// 2-level when the whole first cut is vulnerable, and apply the sharpest
/// applicable bound.
pub fn evaluate_cut_pair(
    net: &Network,
    cuts: &CutPair,
    q: usize,
    budget: usize,
) -> Result<ReductionChain> {
    let (three, map) = induce_three_level(net, cuts)?;
    let mut stages = vec![Stage {
        tag: "induced-3-level".into(),
        network: three.clone(),
        note: format!(
            "layer-1 edges {:?}, layer-2 edges {:?}",
            map.layer1_edges, map.layer2_edges
        ),
    }];
    let fully_vulnerable = cuts.first.iter().all(|e| net.vulnerable().contains(e));
    let (rule, bound) = if fully_vulnerable {
        let (two, assoc) = associate_two_level(&three)?;
        let lm = detect_levels(&two).unwrap();
        let (ins, outs) = lm.two_level_profile().unwrap();
        stages.push(Stage {
            tag: "associated-2-level".into(),
            network: two.clone(),
            note: format!("components {:?}", assoc.components),
        });
        match match_family(&ins, &outs, budget) {
            Some((family, param)) => (
                format!("family-{family:?}-{param}").to_lowercase(),
                family_strict_upper(family, param, q)?,
            ),
            None => ("singleton-two-level".into(), singleton_two_level(&ins, &outs, budget)?),
        }
    } else {
        // induced networks carry one vertex per cut edge; enumerating their
        // bipartition cuts stays cheap well past the ingestion limit
        ("singleton-on-induced".into(), singleton_bound_with_limit(&three, budget, 20)?)
    };
    Ok(ReductionChain {
        terminal: cuts.terminal,
        first_cut: cuts.first.iter().copied().collect(),
        second_cut: cuts.second.iter().copied().collect(),
        stages,
        rule,
        bound,
    })
}

/// Options for automatic cut-pair enumeration.
#[derive(Debug, Clone, Copy)]
pub struct AutoOptions {
    pub max_pairs: usize,
    pub max_vertices: usize,
}

impl Default for AutoOptions {
    fn default() -> Self {
        AutoOptions { max_pairs: 64, max_vertices: crate::netgraph::MAX_CUT_VERTICES }
    }
}

/// The cut-pair bound over explicit pairs, or over automatically enumerated
/// bipartition-cut pairs per terminal (identity pairs included, so the
/// result never exceeds the plain cut bound). Returns the minimizing chain;
/// ties keep the first in enumeration order.
pub fn double_cut_bound(
    net: &Network,
    q: usize,
    budget: usize,
    pairs: Option<Vec<CutPair>>,
    auto: AutoOptions,
) -> Result<(BoundReport, ReductionChain)> {
    let pairs = match pairs {
        Some(p) => p,
        None => auto_pairs(net, auto)?,
    };
    if pairs.is_empty() {
        return Err(Error::InvalidCutPair("no candidate cut pairs".into()));
    }
    let mut best: Option<ReductionChain> = None;
    for pair in &pairs {
        let chain = match evaluate_cut_pair(net, pair, q, budget) {
            Ok(c) => c,
            Err(Error::InvalidCutPair(_))
            | Err(Error::NotPreceding(_, _))
            | Err(Error::TooManyVertices(_, _)) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| chain.bound.rate < b.bound.rate) {
            best = Some(chain);
        }
    }
    let best = best.ok_or_else(|| Error::InvalidCutPair("no valid cut pair".into()))?;
    let mut report = best.bound.clone();
    report.name = format!("double-cut[{}]", best.rule);
    Ok((report, best))
}

/// Candidate pairs, preferring fully vulnerable first cuts and small cuts.
fn auto_pairs(net: &Network, auto: AutoOptions) -> Result<Vec<CutPair>> {
    let mut out = vec![];
    for terminal in net.terminals().collect::<Vec<_>>() {
        let cuts = net.enumerate_cuts_with_limit(terminal, auto.max_vertices)?;
        let mut ranked: Vec<(usize, usize, &BTreeSet<EdgeId>)> = cuts
            .iter()
            .map(|c| {
                let fully = c.iter().all(|e| net.vulnerable().contains(e));
                (usize::from(!fully), c.len(), c)
            })
            .collect();
        ranked.sort_by_key(|&(fully, len, c)| (fully, len, c.iter().copied().collect::<Vec<_>>()));
        let mut count = 0usize;
        'outer: for &(_, _, first) in &ranked {
            for second in &cuts {
                if count >= auto.max_pairs {
                    break 'outer;
                }
                if !net.set_precedes(first, second) {
                    continue;
                }
                out.push(CutPair {
                    first: first.clone(),
                    second: second.clone(),
                    terminal,
                });
                count += 1;
            }
        }
    }
    Ok(out)
}

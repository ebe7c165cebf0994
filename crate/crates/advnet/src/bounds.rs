//! Upper and lower bounds on one-shot network capacity: cut-based bounds,
//! the per-family sharpest known statements, packing inequalities, the MDS
//! partition lower bounds, and the random-noise capacity curves for the
//! split-relay comparison networks.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::builtin::Family;
use crate::error::{Error, Result};
use crate::netcode::NetworkCode;
use crate::netgraph::{detect_levels, EdgeId, Network, VertexId};
use crate::util::{binomial, hamming_ball, pack, tuple_at, tuple_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Equal,
    AtMost,
    LessThan,
    AtLeast,
}

impl Strictness {
    pub fn symbol(&self) -> &'static str {
        match self {
            Strictness::Equal => "=",
            Strictness::AtMost => "<=",
            Strictness::LessThan => "<",
            Strictness::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundWitness {
    Cut { terminal: VertexId, edges: Vec<EdgeId> },
    Partition { kept: Vec<usize>, charged: Vec<usize> },
    Profile(PartitionProfile),
    None,
}

/// A named bound with its justifying witness. Rates are in alphabet-symbol
/// units (logarithm base `q`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub strictness: Strictness,
    pub rate: f64,
    /// Exact code-size form, when the rate translates to one: `Equal` and
    /// `AtLeast` carry the achieved size, `LessThan` the ceiling size - 1.
    pub code_size: Option<u128>,
    pub witness: BoundWitness,
    pub assumptions: Vec<String>,
}

impl BoundReport {
    pub fn display_value(&self) -> String {
        format!("{} {:.6}", self.strictness.symbol(), self.rate)
    }
}

/// Cut-based upper bound: minimum over terminals and edge-cuts of
/// `|cut \ vulnerable| + max(0, |cut ∩ vulnerable| - 2t)`.
pub fn singleton_bound(net: &Network, budget: usize) -> Result<BoundReport> {
    singleton_bound_with_limit(net, budget, crate::netgraph::MAX_CUT_VERTICES)
}

/// [`singleton_bound`] with an explicit vertex budget for cut enumeration.
pub fn singleton_bound_with_limit(
    net: &Network,
    budget: usize,
    max_vertices: usize,
) -> Result<BoundReport> {
    let mut best: Option<(usize, VertexId, BTreeSet<EdgeId>)> = None;
    for t in net.terminals().collect::<Vec<_>>() {
        for cut in net.enumerate_cuts_with_limit(t, max_vertices)? {
            let vulnerable = cut.intersection(net.vulnerable()).count();
            let safe = cut.len() - vulnerable;
            let value = safe + vulnerable.saturating_sub(2 * budget);
            if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                best = Some((value, t, cut));
            }
        }
    }
    let (value, terminal, cut) = best.expect("validated networks have a terminal");
    Ok(BoundReport {
        name: "singleton-cut".into(),
        strictness: Strictness::AtMost,
        rate: value as f64,
        code_size: None,
        witness: BoundWitness::Cut { terminal, edges: cut.into_iter().collect() },
        assumptions: vec![],
    })
}

/// The same bound specialized to a simple 2-level profile: minimum over
/// 2-partitions of the relay set of `sum(outs over kept) +
/// max(0, sum(ins over charged) - 2t)`.
pub fn singleton_two_level(ins: &[usize], outs: &[usize], budget: usize) -> Result<BoundReport> {
    if ins.len() != outs.len() || ins.is_empty() {
        return Err(Error::NotTwoLevel);
    }
    let n = ins.len();
    let mut best: Option<(usize, u64)> = None;
    for mask in 0..(1u64 << n) {
        let kept_outs: usize =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| outs[i]).sum();
        let charged_ins: usize =
            (0..n).filter(|i| mask & (1 << i) == 0).map(|i| ins[i]).sum();
        let value = kept_outs + charged_ins.saturating_sub(2 * budget);
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, mask));
        }
    }
    let (value, mask) = best.unwrap();
    Ok(BoundReport {
        name: "singleton-two-level".into(),
        strictness: Strictness::AtMost,
        rate: value as f64,
        code_size: None,
        witness: BoundWitness::Partition {
            kept: (0..n).filter(|i| mask & (1 << i) != 0).collect(),
            charged: (0..n).filter(|i| mask & (1 << i) == 0).collect(),
        },
        assumptions: vec![],
    })
}

/// The sharpest known statement for a family member at its conventional
/// budget: exact values where achievability is settled, strict bounds where
/// the cut bound is provably not met.
pub fn family_strict_upper(family: Family, param: usize, q: usize) -> Result<BoundReport> {
    if param == 0 || q < 2 {
        return Err(Error::ParameterOutOfRange("need param >= 1 and q >= 2".into()));
    }
    let qf = q as f64;
    let diamond_exact = || BoundReport {
        name: "family-exact".into(),
        strictness: Strictness::Equal,
        rate: (qf - 1.0).ln() / qf.ln(),
        code_size: Some(q as u128 - 1),
        witness: BoundWitness::None,
        assumptions: vec![],
    };
    let strict = |rate: usize| BoundReport {
        name: "family-strict".into(),
        strictness: Strictness::LessThan,
        rate: rate as f64,
        code_size: Some(tuple_count(q, rate) - 1),
        witness: BoundWitness::None,
        assumptions: vec![],
    };
    let exact_one = || BoundReport {
        name: "family-exact".into(),
        strictness: Strictness::Equal,
        rate: 1.0,
        code_size: Some(q as u128),
        witness: BoundWitness::None,
        assumptions: vec![],
    };
    Ok(match (family, param) {
        (Family::A | Family::B | Family::E, 1) => diamond_exact(),
        (Family::A, t) => strict(t),
        (Family::B, s) => strict(s),
        (Family::C, t) if t >= 2 => exact_one(),
        (Family::C, _) => return Err(Error::ParameterOutOfRange("family c starts at 2".into())),
        (Family::D, _) => exact_one(),
        (Family::E, _) => strict(1),
    })
}

/// Node partition by in/out degree against the adversary budget, with the
/// two achievable gains of the MDS partition bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionProfile {
    /// nodes with `ins >= outs + 2t`: enough margin to decode locally
    pub local_decode: Vec<usize>,
    /// nodes with `ins <= outs`: forwardable without loss
    pub forwardable: Vec<usize>,
    /// the remaining nodes
    pub middle: Vec<usize>,
    /// middle nodes with `ins > 2t`: still decodable at reduced rate
    pub middle_decodable: Vec<usize>,
    pub x_gain: usize,
    pub y_gain: usize,
}

impl PartitionProfile {
    pub fn new(ins: &[usize], outs: &[usize], budget: usize) -> Result<PartitionProfile> {
        if ins.len() != outs.len() || ins.is_empty() {
            return Err(Error::NotTwoLevel);
        }
        let t2 = 2 * budget;
        let mut profile = PartitionProfile {
            local_decode: vec![],
            forwardable: vec![],
            middle: vec![],
            middle_decodable: vec![],
            x_gain: 0,
            y_gain: 0,
        };
        for i in 0..ins.len() {
            if ins[i] >= outs[i] + t2 {
                profile.local_decode.push(i);
            } else if ins[i] <= outs[i] {
                profile.forwardable.push(i);
            } else {
                profile.middle.push(i);
                if ins[i] > t2 {
                    profile.middle_decodable.push(i);
                }
            }
        }
        let fwd_ins: usize = profile.forwardable.iter().map(|&i| ins[i]).sum();
        let mid_outs: usize = profile.middle.iter().map(|&i| outs[i]).sum();
        profile.x_gain = profile.middle_decodable.iter().map(|&i| ins[i] - t2).sum::<usize>()
            + fwd_ins.saturating_sub(t2);
        profile.y_gain = (fwd_ins + mid_outs).saturating_sub(t2);
        Ok(profile)
    }

    pub fn total_rate(&self, outs: &[usize]) -> usize {
        let base: usize = self.local_decode.iter().map(|&i| outs[i]).sum();
        base + self.x_gain.max(self.y_gain)
    }
}

/// Achievable rate from local MDS decoding plus the better of the two
/// cooperative gains.
pub fn lower_mds_partition(ins: &[usize], outs: &[usize], budget: usize) -> Result<BoundReport> {
    let profile = PartitionProfile::new(ins, outs, budget)?;
    let rate = profile.total_rate(outs);
    Ok(BoundReport {
        name: "mds-partition-lower".into(),
        strictness: Strictness::AtLeast,
        rate: rate as f64,
        code_size: None,
        witness: BoundWitness::Profile(profile),
        assumptions: vec!["alphabet is a sufficiently large finite field".into()],
    })
}

/// Achievable rate from trimming every relay to `min(ins, outs)` lines and
/// forwarding through one global MDS code.
pub fn lower_trimmed_forwarding(ins: &[usize], outs: &[usize], budget: usize) -> Result<BoundReport> {
    if ins.len() != outs.len() || ins.is_empty() {
        return Err(Error::NotTwoLevel);
    }
    let lines: usize = ins.iter().zip(outs).map(|(&a, &b)| a.min(b)).sum();
    let rate = lines.saturating_sub(2 * budget);
    Ok(BoundReport {
        name: "trimmed-forwarding-lower".into(),
        strictness: Strictness::AtLeast,
        rate: rate as f64,
        code_size: None,
        witness: BoundWitness::None,
        assumptions: vec!["alphabet is a sufficiently large finite field".into()],
    })
}

/// Capacity when every edge is vulnerable: `max(0, min-cut - 2t)`, under the
/// usual large-field assumption.
pub fn full_adversary_value(net: &Network, budget: usize) -> Result<BoundReport> {
    let mut mu = usize::MAX;
    let mut arg = None;
    for t in net.terminals().collect::<Vec<_>>() {
        let c = net.min_cut(net.source(), t)?;
        if c < mu {
            mu = c;
            arg = Some(t);
        }
    }
    let rate = mu.saturating_sub(2 * budget);
    Ok(BoundReport {
        name: "full-adversary".into(),
        strictness: Strictness::Equal,
        rate: rate as f64,
        code_size: None,
        witness: BoundWitness::Cut { terminal: arg.unwrap(), edges: vec![] },
        assumptions: vec![
            "every edge vulnerable".into(),
            "alphabet is a field extension of sufficient size and degree".into(),
        ],
    })
}

/// Shape of a verified scheme as needed by the packing checks.
struct TwoLevelShape {
    ins: Vec<usize>,
    outs: Vec<usize>,
    node_ids: Vec<VertexId>,
}

fn two_level_shape(net: &Network, code: &NetworkCode) -> Result<TwoLevelShape> {
    let lm = detect_levels(net).ok_or(Error::NotTwoLevel)?;
    let (ins, outs) = lm.two_level_profile().ok_or(Error::NotTwoLevel)?;
    code.check_against(net)?;
    // intermediate ids in layer order = ascending vertex id for our builders
    let node_ids: Vec<VertexId> = net.intermediates().collect();
    if net.vulnerable() != &net.out_edges(net.source()).iter().copied().collect::<BTreeSet<_>>() {
        return Err(Error::PreconditionViolated(
            "packing checks assume the vulnerable set is exactly the source edges".into(),
        ));
    }
    Ok(TwoLevelShape { ins, outs, node_ids })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub name: String,
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

enum PackingSide {
    Image,
    Preimage,
}

/// Shared loop for the two packing inequalities. The first `r` relays must
/// satisfy `ins <= outs` and are treated as identities; the remaining tail
/// is handled jointly (per-relay products are only exact for a single tail
/// relay).
fn packing_check(
    net: &Network,
    outer: &[Vec<u8>],
    code: &NetworkCode,
    budget: usize,
    r: usize,
    side: PackingSide,
) -> Result<PackingReport> {
    let shape = two_level_shape(net, code)?;
    let q = code.alphabet;
    let n = shape.ins.len();
    if r > n {
        return Err(Error::PreconditionViolated("r exceeds the relay count".into()));
    }
    for i in 0..r {
        if shape.ins[i] > shape.outs[i] {
            return Err(Error::PreconditionViolated(format!(
                "relay {i} has more inputs than outputs; identity reduction needs ins <= outs"
            )));
        }
    }
    let tail_nodes = &shape.node_ids[r..];
    let tail_dims: Vec<usize> = shape.ins[r..].to_vec();
    let head_len: usize = shape.ins[..r].iter().sum();

    // per-node output preimage counts for the preimage side
    let preimage_counts: Vec<HashMap<u128, u128>> = match side {
        PackingSide::Preimage => tail_nodes
            .iter()
            .map(|&v| {
                let f = &code.nodes[&v];
                let mut m: HashMap<u128, u128> = HashMap::new();
                for i in 0..tuple_count(q, f.arity_in()) {
                    let out = f.eval(q, &tuple_at(q, f.arity_in(), i));
                    *m.entry(pack(&out)).or_default() += 1;
                }
                m
            })
            .collect(),
        PackingSide::Image => vec![],
    };

    let tail_weight = |x: &[u8], radius: usize| -> u128 {
        let tail: Vec<u8> = x[head_len..].to_vec();
        let mut outputs: BTreeSet<Vec<u128>> = BTreeSet::new();
        for w in hamming_ball(q, &tail, radius) {
            let mut offset = 0;
            let mut out_tuple = Vec::with_capacity(tail_nodes.len());
            for (j, &v) in tail_nodes.iter().enumerate() {
                let f = &code.nodes[&v];
                let part = &w[offset..offset + tail_dims[j]];
                out_tuple.push(pack(&f.eval(q, part)));
                offset += tail_dims[j];
            }
            outputs.insert(out_tuple);
        }
        match side {
            PackingSide::Image => outputs.len() as u128,
            PackingSide::Preimage => outputs
                .iter()
                .map(|tuple| {
                    tuple
                        .iter()
                        .enumerate()
                        .map(|(j, o)| preimage_counts[j].get(o).copied().unwrap_or(0))
                        .product::<u128>()
                })
                .sum(),
        }
    };

    // enumerate head error splits (t_1..t_r) with sum <= budget
    let mut lhs: u128 = 0;
    let mut splits: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..r {
        let mut next = vec![];
        for s in &splits {
            let used: usize = s.iter().sum();
            for v in 0..=budget - used {
                let mut s2 = s.clone();
                s2.push(v);
                next.push(s2);
            }
        }
        splits = next;
    }
    for split in &splits {
        let used: usize = split.iter().sum();
        if used > budget {
            continue;
        }
        let mut coeff: u128 = 1;
        for (i, &ti) in split.iter().enumerate() {
            coeff *= binomial(shape.ins[i], ti) * (q as u128 - 1).pow(ti as u32);
        }
        let radius = budget - used;
        let inner: u128 = outer.iter().map(|x| tail_weight(x, radius)).sum();
        lhs += coeff * inner;
    }

    let (name, rhs_exp): (&str, usize) = match side {
        PackingSide::Image => ("packing-image", shape.outs.iter().sum()),
        PackingSide::Preimage => ("packing-preimage", shape.ins.iter().sum()),
    };
    let rhs = tuple_count(q, rhs_exp);
    Ok(PackingReport { name: name.into(), lhs, rhs, holds: lhs <= rhs })
}

/// Image-side packing inequality: the fan-out images of a code unambiguous
/// at this budget must pack into the terminal observation space.
pub fn first_packing_check(
    net: &Network,
    outer: &[Vec<u8>],
    code: &NetworkCode,
    budget: usize,
    r: usize,
) -> Result<PackingReport> {
    packing_check(net, outer, code, budget, r, PackingSide::Image)
}

/// Preimage-side packing inequality: full preimages of the fan-out images
/// must pack into the source word space.
pub fn second_packing_check(
    net: &Network,
    outer: &[Vec<u8>],
    code: &NetworkCode,
    budget: usize,
    r: usize,
) -> Result<PackingReport> {
    packing_check(net, outer, code, budget, r, PackingSide::Preimage)
}

fn entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Random-noise capacity of the relay comparison networks. Generalization 1
/// grows one fat relay and peels off a single line; generalization 2 scales
/// all multiplicities by `n` and peels off a proportional block. Scenario 1
/// is the single-relay network, scenario 2 the split one.
pub fn bsc_level_capacity(generalization: u8, scenario: u8, n: usize, p: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 0.5]")));
    }
    if n < 1 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let nf = n as f64;
    let h = entropy(p);
    let c = 1.0 - h;
    Ok(match (generalization, scenario) {
        (1, 1) => (nf - 1.0).min(nf * c),
        (1, 2) => c + (nf - 2.0).min((nf - 1.0) * c),
        (2, 1) => (2.0 * nf).min(3.0 * nf * c),
        (2, 2) => nf * c + nf.min(2.0 * nf * c),
        _ => return Err(Error::OutOfRange("generalization and scenario are 1 or 2".into())),
    })
}

/// The open interval of entropies on which splitting the relay strictly
/// reduces random-noise capacity.
pub fn bsc_gap_interval(generalization: u8, n: usize) -> (f64, f64) {
    match generalization {
        1 => (0.0, 1.0 / (n as f64 - 1.0)),
        _ => (0.0, 0.5),
    }
}

/// CSV with one row per sampled `p`: both scenarios and their gap, 9
/// decimal places.
pub fn curves_csv(generalization: u8, n: usize, p_step: f64) -> Result<String> {
    if p_step <= 0.0 || p_step > 0.5 || p_step.is_nan() {
        return Err(Error::OutOfRange(format!("p_step = {p_step}")));
    }
    let mut out = String::from("p,scenario1,scenario2,gap\n");
    let steps = (0.5 / p_step).round() as usize;
    for i in 0..=steps {
        let p = (i as f64 * p_step).min(0.5);
        let s1 = bsc_level_capacity(generalization, 1, n, p)?;
        let s2 = bsc_level_capacity(generalization, 2, n, p)?;
        out.push_str(&format!("{p:.9},{s1:.9},{s2:.9},{:.9}\n", s1 - s2));
    }
    Ok(out)
}

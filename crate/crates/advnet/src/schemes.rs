//! Constructors for the explicit coding schemes, each bundling a network,
//! an outer code and a network code into a certifiable triple, plus the
//! exhaustive and structural verifiers.

use serde::{Deserialize, Serialize};

use crate::bounds::PartitionProfile;
use crate::builtin::Family;
use crate::channel::OuterCode;
use crate::error::{Error, Result};
use crate::gf::{Field, MdsCode};
use crate::netcode::{
    evaluate, for_each_error_pattern, induced_channel, ErrorPattern, LinearNetworkCode,
    NetworkCode, NodeFunction,
};
use crate::netgraph::{simple_two_level, Network, VertexId};
use crate::util::{hamming, tuple_at, tuple_count};

/// Limit on materializing product outer codes into explicit word lists.
const MAX_EXPLICIT_WORDS: u128 = 1 << 21;

/// An MDS code block occupying a set of source-word coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsBlock {
    pub code: MdsCode,
    pub positions: Vec<usize>,
}

/// Outer code given as independent MDS blocks over disjoint source
/// coordinates; unused coordinates carry zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsProduct {
    pub source_len: usize,
    pub blocks: Vec<MdsBlock>,
}

impl MdsProduct {
    pub fn size(&self, q: usize) -> u128 {
        self.blocks.iter().map(|b| tuple_count(q, b.code.k)).product()
    }

    /// The source word encoding one message tuple per block.
    pub fn word(&self, messages: &[Vec<u8>]) -> Result<Vec<u8>> {
        let mut word = vec![0u8; self.source_len];
        for (block, msg) in self.blocks.iter().zip(messages) {
            let cw = block.code.encode(msg)?;
            for (&pos, &sym) in block.positions.iter().zip(&cw) {
                word[pos] = sym;
            }
        }
        Ok(word)
    }

    pub fn materialize(&self, q: usize) -> Result<OuterCode> {
        let size = self.size(q);
        if size > MAX_EXPLICIT_WORDS {
            return Err(Error::DomainTooLarge(size, MAX_EXPLICIT_WORDS));
        }
        let mut words = Vec::with_capacity(size as usize);
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.code.k).collect();
        let total: usize = dims.iter().sum();
        for idx in 0..tuple_count(q, total) {
            let flat = tuple_at(q, total, idx);
            let mut messages = Vec::with_capacity(dims.len());
            let mut offset = 0;
            for &k in &dims {
                messages.push(flat[offset..offset + k].to_vec());
                offset += k;
            }
            words.push(self.word(&messages)?);
        }
        Ok(OuterCode::new(words))
    }
}

/// Outer code of a scheme: explicit words, or a lazily enumerable MDS
/// product for rates where materialization is too large.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SchemeOuter {
    Explicit(Vec<Vec<u8>>),
    Product(MdsProduct),
}

impl SchemeOuter {
    pub fn size(&self, q: usize) -> u128 {
        match self {
            SchemeOuter::Explicit(words) => words.len() as u128,
            SchemeOuter::Product(p) => p.size(q),
        }
    }

    pub fn materialize(&self, q: usize) -> Result<OuterCode> {
        match self {
            SchemeOuter::Explicit(words) => Ok(OuterCode::new(words.clone())),
            SchemeOuter::Product(p) => p.materialize(q),
        }
    }
}

/// A coding scheme: the certifiable (network, outer code, network code)
/// triple with its declared adversary budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub label: String,
    pub network: Network,
    pub alphabet: usize,
    pub budget: usize,
    pub outer: SchemeOuter,
    pub code: NetworkCode,
    pub claimed_code_size: u128,
    /// Present when the network code is linear; doubles as a linear-capacity
    /// witness.
    pub linear: Option<LinearNetworkCode>,
}

impl Scheme {
    /// Rate in alphabet-symbol units.
    pub fn claimed_rate(&self) -> f64 {
        (self.claimed_code_size as f64).ln() / (self.alphabet as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityWitness {
    pub terminal: VertexId,
    pub word_a: Vec<u8>,
    pub word_b: Vec<u8>,
    pub pattern_a: ErrorPattern,
    pub pattern_b: ErrorPattern,
    pub observation: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub code_size: u128,
    pub rate: f64,
    pub terminals_checked: Vec<VertexId>,
    pub witness: Option<AmbiguityWitness>,
}

/// Exhaustive verification: build the induced channel of every terminal and
/// check the outer code is unambiguous at the given budget. On failure the
/// report carries a colliding pair with explicit error patterns.
pub fn verify(scheme: &Scheme, budget: usize) -> Result<VerificationReport> {
    let outer = scheme.outer.materialize(scheme.alphabet)?;
    let mut terminals_checked = vec![];
    for terminal in scheme.network.terminals().collect::<Vec<_>>() {
        let channel = induced_channel(&scheme.network, &scheme.code, terminal, budget)?;
        terminals_checked.push(terminal);
        if let Some((a, b)) = channel.ambiguous_pair(&outer)? {
            let witness = locate_collision(scheme, terminal, budget, &a, &b)?;
            return Ok(VerificationReport {
                passed: false,
                code_size: outer.len() as u128,
                rate: outer.rate(scheme.alphabet),
                terminals_checked,
                witness: Some(witness),
            });
        }
    }
    Ok(VerificationReport {
        passed: true,
        code_size: outer.len() as u128,
        rate: outer.rate(scheme.alphabet),
        terminals_checked,
        witness: None,
    })
}

fn locate_collision(
    scheme: &Scheme,
    terminal: VertexId,
    budget: usize,
    a: &[u8],
    b: &[u8],
) -> Result<AmbiguityWitness> {
    let net = &scheme.network;
    let q = scheme.alphabet;
    let vulnerable: Vec<usize> = net.vulnerable().iter().copied().collect();
    let observe = |word: &[u8], pattern: &ErrorPattern| -> Vec<u8> {
        let values = evaluate(net, &scheme.code, word, pattern).unwrap();
        net.in_edges(terminal).iter().map(|&e| values[e]).collect()
    };
    let mut seen: std::collections::HashMap<Vec<u8>, ErrorPattern> = Default::default();
    let mut found: Option<(ErrorPattern, ErrorPattern, Vec<u8>)> = None;
    for_each_error_pattern(&vulnerable, q, budget, |pa| {
        if found.is_some() {
            return;
        }
        seen.insert(observe(a, pa), pa.clone());
    });
    for_each_error_pattern(&vulnerable, q, budget, |pb| {
        if found.is_some() {
            return;
        }
        let obs = observe(b, pb);
        if let Some(pa) = seen.get(&obs) {
            found = Some((pa.clone(), pb.clone(), obs));
        }
    });
    let (pattern_a, pattern_b, observation) =
        found.ok_or_else(|| Error::PreconditionViolated("collision disappeared".into()))?;
    Ok(AmbiguityWitness {
        terminal,
        word_a: a.to_vec(),
        word_b: b.to_vec(),
        pattern_a,
        pattern_b,
        observation,
    })
}

fn agree_or_alarm(q: usize, arity_in: usize, arity_out: usize, alarm: u8) -> NodeFunction {
    NodeFunction::table_from_fn(q, arity_in, arity_out, move |input| {
        let sym = if input.iter().all(|&s| s == input[0]) { input[0] } else { alarm };
        vec![sym; arity_out]
    })
    .expect("small relay tables")
}

fn repetitions(q: usize, len: usize, exclude_top: bool) -> Vec<Vec<u8>> {
    let upper = if exclude_top { q - 1 } else { q };
    (0..upper as u8).map(|s| vec![s; len]).collect()
}

/// Alarm relay scheme on the diamond: one symbol is sacrificed to signal a
/// detected mismatch, achieving q - 1 words against one substitution.
pub fn diamond_alarm(q: usize) -> Result<Scheme> {
    if q < 2 {
        return Err(Error::ParameterOutOfRange("alphabet needs q >= 2".into()));
    }
    let network = simple_two_level(&[1, 2], &[1, 1])?;
    let alarm = (q - 1) as u8;
    let code = NetworkCode::new(q)
        .with_node(1, NodeFunction::forward(1, 1))
        .with_node(2, agree_or_alarm(q, 2, 1, alarm));
    Ok(Scheme {
        label: "diamond-alarm".into(),
        network,
        alphabet: q,
        budget: 1,
        outer: SchemeOuter::Explicit(repetitions(q, 3, true)),
        code,
        claimed_code_size: q as u128 - 1,
        linear: None,
    })
}

/// Alarm relay scheme on the mirrored diamond: both relays alarm on
/// mismatch; the alarm symbol remains sendable, achieving all q words.
pub fn mirrored_alarm(q: usize) -> Result<Scheme> {
    if q < 2 {
        return Err(Error::ParameterOutOfRange("alphabet needs q >= 2".into()));
    }
    let network = simple_two_level(&[2, 2], &[1, 1])?;
    let alarm = (q - 1) as u8;
    let code = NetworkCode::new(q)
        .with_node(1, agree_or_alarm(q, 2, 1, alarm))
        .with_node(2, agree_or_alarm(q, 2, 1, alarm));
    Ok(Scheme {
        label: "mirrored-alarm".into(),
        network,
        alphabet: q,
        budget: 1,
        outer: SchemeOuter::Explicit(repetitions(q, 4, false)),
        code,
        claimed_code_size: q as u128,
        linear: None,
    })
}

/// Majority scheme on the `([2,4],[2,2])` network against two errors: the
/// wide relay reports a 3-of-4 majority or a fixed mismatched pair, the
/// terminal falls back to the thin relay.
pub fn wide_diamond_majority(q: usize) -> Result<Scheme> {
    if q < 2 {
        return Err(Error::ParameterOutOfRange("alphabet needs q >= 2".into()));
    }
    let network = simple_two_level(&[2, 4], &[2, 2])?;
    let flag_a = (q - 2) as u8;
    let flag_b = (q - 1) as u8;
    let majority = NodeFunction::table_from_fn(q, 4, 2, move |input| {
        for sym in 0..q as u8 {
            if input.iter().filter(|&&s| s == sym).count() >= 3 {
                return vec![sym, sym];
            }
        }
        vec![flag_a, flag_b]
    })?;
    let code = NetworkCode::new(q)
        .with_node(1, NodeFunction::forward(2, 2))
        .with_node(2, majority);
    Ok(Scheme {
        label: "wide-diamond-majority".into(),
        network,
        alphabet: q,
        budget: 2,
        outer: SchemeOuter::Explicit(repetitions(q, 6, false)),
        code,
        claimed_code_size: q as u128,
        linear: None,
    })
}

/// Shell labels used by [`shell_relay`]: which set of relay inputs a word
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellClass {
    /// distance `radius` from the repetition word of `symbol`
    Near { symbol: u8, radius: usize },
    /// outside every ball of radius `max_errors / 2`
    Far,
}

/// Classify a wide-relay input against the repetition centers.
pub fn shell_classify(q: usize, budget: usize, word: &[u8]) -> ShellClass {
    let half = budget / 2;
    for sym in 0..q as u8 {
        let center = vec![sym; word.len()];
        let d = hamming(word, &center);
        if d <= half {
            return ShellClass::Near { symbol: sym, radius: d };
        }
    }
    ShellClass::Far
}

fn shell_label_count(q: usize, budget: usize, far_inhabited: bool) -> usize {
    q * (budget / 2 + 1) + usize::from(far_inhabited)
}

fn shell_label_index(q: usize, budget: usize, class: ShellClass) -> usize {
    match class {
        ShellClass::Near { symbol, radius } => symbol as usize * (budget / 2 + 1) + radius,
        ShellClass::Far => q * (budget / 2 + 1),
    }
}

/// Scheme on `([t,t+1],[t,t])` for budgets `t >= 2`: the thin relay
/// forwards, the wide relay reports which distance shell its word sits in,
/// the terminal reconciles the shell report with the forwarded copies.
pub fn shell_relay(q: usize, budget: usize) -> Result<Scheme> {
    if q < 2 || budget < 2 {
        return Err(Error::ParameterOutOfRange("shell relay needs q >= 2, budget >= 2".into()));
    }
    let t = budget;
    let network = simple_two_level(&[t, t + 1], &[t, t])?;
    let wide = if q == 2 && t == 2 {
        // minimal case: the four shells fill the whole label space
        NodeFunction::table_from_fn(q, 3, 2, |input| {
            let zeros = input.iter().filter(|&&s| s == 0).count();
            match zeros {
                3 => vec![0, 0],
                2 => vec![0, 1],
                1 => vec![1, 0],
                _ => vec![1, 1],
            }
        })?
    } else {
        let far_inhabited = {
            // any word beyond every half-budget ball?
            let ball: u128 = (0..=t / 2)
                .map(|r| crate::util::binomial(t + 1, r) * (q as u128 - 1).pow(r as u32))
                .sum();
            (q as u128) * ball < tuple_count(q, t + 1)
        };
        let labels = shell_label_count(q, t, far_inhabited) as u128;
        if labels > tuple_count(q, t) {
            return Err(Error::ParameterOutOfRange(format!(
                "{labels} shell labels exceed the relay output space"
            )));
        }
        NodeFunction::table_from_fn(q, t + 1, t, move |input| {
            let class = shell_classify(q, t, input);
            let idx = shell_label_index(q, t, class) as u128;
            tuple_at(q, t, idx)
        })?
    };
    let code = NetworkCode::new(q)
        .with_node(1, NodeFunction::forward(t, t))
        .with_node(2, wide);
    Ok(Scheme {
        label: "shell-relay".into(),
        network,
        alphabet: q,
        budget: t,
        outer: SchemeOuter::Explicit(repetitions(q, 2 * t + 1, false)),
        code,
        claimed_code_size: q as u128,
        linear: None,
    })
}

/// Terminal decision rule of the shell relay scheme, used to trace worked
/// decodings: `thin` is the forwarded copy, `wide_label` the shell report.
pub fn shell_relay_decode(q: usize, budget: usize, thin: &[u8], wide_label: &[u8]) -> Option<u8> {
    let t = budget;
    let majority = |word: &[u8]| -> Option<u8> {
        (0..q as u8).max_by_key(|&s| word.iter().filter(|&&x| x == s).count())
    };
    if q == 2 && t == 2 {
        let class = match (wide_label[0], wide_label[1]) {
            (0, 0) => ShellClass::Near { symbol: 0, radius: 0 },
            (0, 1) => ShellClass::Near { symbol: 0, radius: 1 },
            (1, 1) => ShellClass::Near { symbol: 1, radius: 0 },
            _ => ShellClass::Near { symbol: 1, radius: 1 },
        };
        return decode_from_class(q, class, thin, majority);
    }
    let idx = crate::util::tuple_rank(q, wide_label) as usize;
    let per_symbol = t / 2 + 1;
    let class = if idx < q * per_symbol {
        ShellClass::Near { symbol: (idx / per_symbol) as u8, radius: idx % per_symbol }
    } else if idx == q * per_symbol {
        ShellClass::Far
    } else {
        return None;
    };
    decode_from_class(q, class, thin, majority)
}

fn decode_from_class<F: Fn(&[u8]) -> Option<u8>>(
    _q: usize,
    class: ShellClass,
    thin: &[u8],
    majority: F,
) -> Option<u8> {
    match class {
        ShellClass::Far => majority(thin),
        ShellClass::Near { symbol, radius: 0 } => Some(symbol),
        ShellClass::Near { symbol, radius } => {
            let consistent = thin.iter().filter(|&&x| x == symbol).count();
            if consistent >= radius {
                Some(symbol)
            } else {
                majority(thin)
            }
        }
    }
}

/// Majority-with-alarm scheme on `([2t,2t],[1,1])`: both relays vote, ties
/// raise the alarm, the terminal prefers the non-alarm side and accepts the
/// common symbol otherwise.
pub fn balanced_majority(q: usize, budget: usize) -> Result<Scheme> {
    if q < 2 || budget < 1 {
        return Err(Error::ParameterOutOfRange("needs q >= 2, budget >= 1".into()));
    }
    let t = budget;
    let network = simple_two_level(&[2 * t, 2 * t], &[1, 1])?;
    let alarm = (q - 1) as u8;
    let vote = NodeFunction::table_from_fn(q, 2 * t, 1, move |input| {
        let counts: Vec<usize> =
            (0..q as u8).map(|s| input.iter().filter(|&&x| x == s).count()).collect();
        let top = *counts.iter().max().unwrap();
        let winners: Vec<u8> = (0..q as u8).filter(|&s| counts[s as usize] == top).collect();
        vec![if winners.len() == 1 { winners[0] } else { alarm }]
    })?;
    let code = NetworkCode::new(q).with_node(1, vote.clone()).with_node(2, vote);
    Ok(Scheme {
        label: "balanced-majority".into(),
        network,
        alphabet: q,
        budget: t,
        outer: SchemeOuter::Explicit(repetitions(q, 4 * t, false)),
        code,
        claimed_code_size: q as u128,
        linear: None,
    })
}

fn field_for(q: usize, needed: usize) -> Result<Field> {
    let field = Field::new(q)?;
    if field.order() < needed {
        return Err(Error::SuggestedMinimumField { needed, have: field.order() });
    }
    Ok(field)
}

/// The MDS partition scheme on a simple 2-level profile: relays with enough
/// margin decode locally, and the better of the two cooperative strategies
/// adds the extra symbols.
pub fn partitioned_mds(ins: &[usize], outs: &[usize], budget: usize, q: usize) -> Result<Scheme> {
    let profile = PartitionProfile::new(ins, outs, budget)?;
    let t2 = 2 * budget;
    let use_x = profile.x_gain >= profile.y_gain;

    // field must admit every MDS length the chosen branch uses
    let mut needed = 1;
    for &i in &profile.local_decode {
        needed = needed.max(outs[i] + t2);
    }
    let fwd_ins: usize = profile.forwardable.iter().map(|&i| ins[i]).sum();
    if use_x {
        for &i in &profile.middle_decodable {
            needed = needed.max(ins[i]);
        }
        if fwd_ins > t2 {
            needed = needed.max(fwd_ins);
        }
    } else {
        let mid_outs: usize = profile.middle.iter().map(|&i| outs[i]).sum();
        if fwd_ins + mid_outs > t2 {
            needed = needed.max(fwd_ins + mid_outs);
        }
    }
    let field = field_for(q, needed)?;

    let network = simple_two_level(ins, outs)?;
    let mut code = NetworkCode::new(q);
    let mut blocks: Vec<MdsBlock> = vec![];
    // source coordinate ranges per relay, in relay order
    let mut offsets = vec![0usize; ins.len()];
    let mut acc = 0;
    for i in 0..ins.len() {
        offsets[i] = acc;
        acc += ins[i];
    }
    let node_id = |i: usize| -> VertexId { i + 1 };

    for &i in &profile.local_decode {
        let n = outs[i] + t2;
        let mds = MdsCode::new(field.clone(), n, outs[i])?;
        blocks.push(MdsBlock {
            code: mds.clone(),
            positions: (offsets[i]..offsets[i] + n).collect(),
        });
        code.nodes.insert(node_id(i), NodeFunction::mds_decode(ins[i], outs[i], mds));
    }

    if use_x {
        for &i in &profile.middle_decodable {
            let mds = MdsCode::new(field.clone(), ins[i], ins[i] - t2)?;
            blocks.push(MdsBlock {
                code: mds.clone(),
                positions: (offsets[i]..offsets[i] + ins[i]).collect(),
            });
            code.nodes.insert(node_id(i), NodeFunction::mds_decode(ins[i], outs[i], mds));
        }
        for &i in &profile.middle {
            if !profile.middle_decodable.contains(&i) {
                code.nodes.insert(node_id(i), NodeFunction::ConstZero {
                    arity_in: ins[i],
                    arity_out: outs[i],
                });
            }
        }
        if fwd_ins > t2 {
            let mds = MdsCode::new(field.clone(), fwd_ins, fwd_ins - t2)?;
            let mut positions = vec![];
            for &i in &profile.forwardable {
                positions.extend(offsets[i]..offsets[i] + ins[i]);
            }
            blocks.push(MdsBlock { code: mds, positions });
        }
        for &i in &profile.forwardable {
            code.nodes.insert(node_id(i), NodeFunction::forward(ins[i], outs[i]));
        }
    } else {
        let mid_outs: usize = profile.middle.iter().map(|&i| outs[i]).sum();
        if fwd_ins + mid_outs > t2 {
            let n = fwd_ins + mid_outs;
            let mds = MdsCode::new(field.clone(), n, n - t2)?;
            let mut positions = vec![];
            for &i in &profile.forwardable {
                positions.extend(offsets[i]..offsets[i] + ins[i]);
            }
            for &i in &profile.middle {
                positions.extend(offsets[i]..offsets[i] + outs[i]);
            }
            blocks.push(MdsBlock { code: mds, positions });
        }
        for &i in profile.forwardable.iter().chain(&profile.middle) {
            let keep = ins[i].min(outs[i]);
            code.nodes.insert(node_id(i), NodeFunction::forward_first(ins[i], outs[i], keep));
        }
    }

    let product = MdsProduct { source_len: acc, blocks };
    let claimed = product.size(q);
    Ok(Scheme {
        label: "partitioned-mds".into(),
        network,
        alphabet: q,
        budget,
        outer: SchemeOuter::Product(product),
        code,
        claimed_code_size: claimed,
        linear: None,
    })
}

/// The trimmed forwarding scheme: every relay keeps `min(ins, outs)` lines,
/// one global MDS code spans the kept lines. The network code is linear, so
/// the scheme also witnesses linear achievability.
pub fn trimmed_forwarding(ins: &[usize], outs: &[usize], budget: usize, q: usize) -> Result<Scheme> {
    if ins.len() != outs.len() || ins.is_empty() {
        return Err(Error::NotTwoLevel);
    }
    let network = simple_two_level(ins, outs)?;
    let lines: usize = ins.iter().zip(outs).map(|(&a, &b)| a.min(b)).sum();
    let rate = lines.saturating_sub(2 * budget);
    let field = field_for(q, if rate > 0 { lines } else { 1 })?;

    let mut code = NetworkCode::new(q);
    let mut matrices = std::collections::BTreeMap::new();
    for (i, (&a, &b)) in ins.iter().zip(outs).enumerate() {
        let keep = a.min(b);
        code.nodes.insert(i + 1, NodeFunction::forward_first(a, b, keep));
        let mut matrix = vec![vec![0u8; a]; b];
        for (row, m) in matrix.iter_mut().enumerate().take(keep) {
            m[row] = 1;
        }
        matrices.insert(i + 1, matrix);
    }
    let linear = LinearNetworkCode { field: field.clone(), nodes: matrices };

    let outer = if rate == 0 {
        SchemeOuter::Explicit(vec![vec![0u8; ins.iter().sum()]])
    } else {
        let mds = MdsCode::new(field, lines, rate)?;
        let mut positions = vec![];
        let mut offset = 0;
        for (&a, &b) in ins.iter().zip(outs) {
            positions.extend(offset..offset + a.min(b));
            offset += a;
        }
        SchemeOuter::Product(MdsProduct {
            source_len: ins.iter().sum(),
            blocks: vec![MdsBlock { code: mds, positions }],
        })
    };
    let claimed = outer.size(q);
    Ok(Scheme {
        label: "trimmed-forwarding".into(),
        network,
        alphabet: q,
        budget,
        outer,
        code,
        claimed_code_size: claimed,
        linear: Some(linear),
    })
}

/// Alarm relay scheme on the restricted crossover network: repetition over
/// the non-alarm symbols, agreement relays, and a chain relay that forwards
/// the unique non-alarm input.
pub fn crossover_alarm(q: usize) -> Result<Scheme> {
    if q < 2 {
        return Err(Error::ParameterOutOfRange("alphabet needs q >= 2".into()));
    }
    let network = crate::builtin::crossover_restricted();
    let alarm = (q - 1) as u8;
    let pick_non_alarm = NodeFunction::table_from_fn(q, 2, 1, move |input| {
        let sym = match (input[0] == alarm, input[1] == alarm) {
            (false, true) => input[0],
            (true, false) => input[1],
            _ => alarm,
        };
        vec![sym]
    })?;
    let broadcast = NodeFunction::table_from_fn(q, 1, 2, |input| vec![input[0]; 2])?;
    let code = NetworkCode::new(q)
        .with_node(1, agree_or_alarm(q, 2, 2, alarm))
        .with_node(2, agree_or_alarm(q, 2, 2, alarm))
        .with_node(3, pick_non_alarm)
        .with_node(4, broadcast);
    Ok(Scheme {
        label: "crossover-alarm".into(),
        network,
        alphabet: q,
        budget: 1,
        outer: SchemeOuter::Explicit(repetitions(q, 4, true)),
        code,
        claimed_code_size: q as u128 - 1,
        linear: None,
    })
}

/// Construct the conventional scheme of a family member.
pub fn family_scheme(family: Family, param: usize, q: usize) -> Result<Scheme> {
    match (family, param) {
        (Family::A, 1) | (Family::B, 1) | (Family::E, 1) => diamond_alarm(q),
        (Family::A, 2) => wide_diamond_majority(q),
        (Family::C, t) => shell_relay(q, t),
        (Family::D, 1) => mirrored_alarm(q),
        (Family::D, t) => balanced_majority(q, t),
        (f, p) => Err(Error::UnknownFamily(format!(
            "no explicit scheme for family {f:?} parameter {p}"
        ))),
    }
}

/// Serialize a scheme into the certificate form: the instance description,
/// the network code as explicit tables, and the outer code as words.
pub fn scheme_to_certificate(scheme: &Scheme) -> Result<serde_json::Value> {
    let outer = scheme.outer.materialize(scheme.alphabet)?;
    let words: Vec<Vec<u8>> = outer.words;
    Ok(serde_json::json!({
        "label": scheme.label,
        "alphabet": scheme.alphabet,
        "budget": scheme.budget,
        "claimed_code_size": scheme.claimed_code_size.to_string(),
        "network": crate::netgraph::NetworkSpec::from(scheme.network.clone()),
        "code": crate::netcode::code_to_json(&scheme.network, &scheme.code)?,
        "outer": words,
    }))
}

/// Parse a certificate back into a verifiable scheme.
pub fn scheme_from_certificate(value: &serde_json::Value) -> Result<Scheme> {
    let label = value.get("label").and_then(|v| v.as_str()).unwrap_or("certificate");
    let alphabet = value
        .get("alphabet")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse("missing alphabet".into()))? as usize;
    let budget = value
        .get("budget")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse("missing budget".into()))? as usize;
    let spec: crate::netgraph::NetworkSpec = serde_json::from_value(
        value.get("network").cloned().ok_or_else(|| Error::Parse("missing network".into()))?,
    )
    .map_err(|e| Error::Parse(e.to_string()))?;
    let network = crate::netgraph::validate(&spec)?.network;
    let code = crate::netcode::code_from_json(
        &network,
        value.get("code").ok_or_else(|| Error::Parse("missing code".into()))?,
    )?;
    let outer: Vec<Vec<u8>> = serde_json::from_value(
        value.get("outer").cloned().ok_or_else(|| Error::Parse("missing outer".into()))?,
    )
    .map_err(|e| Error::Parse(e.to_string()))?;
    let claimed = outer.len() as u128;
    Ok(Scheme {
        label: label.to_string(),
        network,
        alphabet,
        budget,
        outer: SchemeOuter::Explicit(outer),
        code,
        claimed_code_size: claimed,
        linear: None,
    })
}

/// Report of the structural verification path for product-form schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableReport {
    pub passed: bool,
    pub blocks_checked: usize,
    pub min_distance_ok: bool,
    pub decoders_ok: bool,
    pub injections_tested: u64,
}

/// Structural verification for schemes whose outer code is an MDS product
/// and whose relays act blockwise: checks every block's minimum distance
/// covers twice the budget (by exhaustive minimum-weight scan) and exercises
/// every decoding relay against all error patterns within the budget around
/// a codeword. Sound because the adversary's budget split across blocks is
/// dominated by giving each block the full budget.
pub fn verify_separable(scheme: &Scheme) -> Result<SeparableReport> {
    let SchemeOuter::Product(product) = &scheme.outer else {
        return Err(Error::PreconditionViolated(
            "structural verification needs a product-form outer code".into(),
        ));
    };
    let q = scheme.alphabet;
    let budget = scheme.budget;
    let mut injections = 0u64;
    let mut min_distance_ok = true;
    for block in &product.blocks {
        let code = &block.code;
        if code.min_distance() < 2 * budget + 1 {
            min_distance_ok = false;
        }
        // exhaustive minimum-weight scan (the code is linear)
        let words = tuple_count(q, code.k);
        if words > 5_000_000 {
            return Err(Error::DomainTooLarge(words, 5_000_000));
        }
        let mut min_wt = usize::MAX;
        for m in 1..words {
            let msg = tuple_at(q, code.k, m);
            let wt = code.encode(&msg)?.iter().filter(|&&s| s != 0).count();
            min_wt = min_wt.min(wt);
        }
        if words > 1 && min_wt < 2 * budget + 1 {
            min_distance_ok = false;
        }
    }

    // every decoding relay corrects all patterns within the budget
    let mut decoders_ok = true;
    for f in scheme.code.nodes.values() {
        let NodeFunction::MdsDecode { code, .. } = f else { continue };
        let zero_msg = vec![0u8; code.k];
        let zero_cw = code.encode(&zero_msg)?;
        let mut lcg = 0xbeefcafeu64;
        let mut sample_msg = |k: usize| -> Vec<u8> {
            (0..k)
                .map(|_| {
                    lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
                    ((lcg >> 33) % q as u64) as u8
                })
                .collect()
        };
        let mut messages = vec![zero_msg];
        for _ in 0..3 {
            messages.push(sample_msg(code.k));
        }
        for msg in messages {
            let cw = if msg.iter().all(|&s| s == 0) {
                zero_cw.clone()
            } else {
                code.encode(&msg)?
            };
            let positions: Vec<usize> = (0..code.n).collect();
            let mut ok = true;
            for_each_error_pattern(&positions, q, budget, |pattern| {
                if !ok {
                    return;
                }
                let mut word = cw.clone();
                for (&pos, &val) in &pattern.assignments {
                    word[pos] = val;
                }
                injections += 1;
                if code.decode(&word).ok().as_deref() != Some(msg.as_slice()) {
                    ok = false;
                }
            });
            if !ok {
                decoders_ok = false;
            }
        }
    }
    Ok(SeparableReport {
        passed: min_distance_ok && decoders_ok,
        blocks_checked: product.blocks.len(),
        min_distance_ok,
        decoders_ok,
        injections_tested: injections,
    })
}

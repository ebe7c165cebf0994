//! Network codes as per-node processing functions, forward evaluation under
//! error patterns, and the end-to-end and cut-to-cut channels they induce.
//!
//! Node argument and result coordinates follow the network's global edge
//! order. Node functions are either explicit tables or rule-backed (fixed
//! forwarding, constants, MDS decoding); the rule-backed forms keep large
//! alphabets tractable and memoize expensive decodes.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::gf::{Field, MdsCode};
use crate::netgraph::{EdgeId, Network, VertexId};
use crate::util::{pack, tuple_at, tuple_count, tuple_rank};

/// Hard cap on explicit table materialization.
const MAX_TABLE_ROWS: u128 = 1 << 22;

/// One node's processing function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum NodeFunction {
    /// Explicit table: row `tuple_rank(input)` holds the output tuple.
    Table {
        arity_in: usize,
        arity_out: usize,
        entries: Vec<u8>,
    },
    /// Forward the first `keep` inputs to the first `keep` outputs, emit 0
    /// on the remaining outputs.
    Forward {
        arity_in: usize,
        arity_out: usize,
        keep: usize,
    },
    /// Decode the first `code.n` inputs with an MDS decoder and emit the
    /// message (zeros on decode failure), padded with zeros.
    MdsDecode {
        arity_in: usize,
        arity_out: usize,
        code: MdsCode,
        #[serde(skip)]
        memo: Arc<Mutex<HashMap<u128, Vec<u8>>>>,
    },
    /// All outputs zero.
    ConstZero { arity_in: usize, arity_out: usize },
}

impl PartialEq for NodeFunction {
    fn eq(&self, other: &Self) -> bool {
        use NodeFunction::*;
        match (self, other) {
            (
                Table { arity_in: a, arity_out: b, entries: e },
                Table { arity_in: a2, arity_out: b2, entries: e2 },
            ) => a == a2 && b == b2 && e == e2,
            (
                Forward { arity_in: a, arity_out: b, keep: k },
                Forward { arity_in: a2, arity_out: b2, keep: k2 },
            ) => a == a2 && b == b2 && k == k2,
            (
                MdsDecode { arity_in: a, arity_out: b, code: c, .. },
                MdsDecode { arity_in: a2, arity_out: b2, code: c2, .. },
            ) => a == a2 && b == b2 && c == c2,
            (
                ConstZero { arity_in: a, arity_out: b },
                ConstZero { arity_in: a2, arity_out: b2 },
            ) => a == a2 && b == b2,
            _ => false,
        }
    }
}

impl NodeFunction {
    pub fn table_from_fn<F>(q: usize, arity_in: usize, arity_out: usize, f: F) -> Result<NodeFunction>
    where
        F: Fn(&[u8]) -> Vec<u8>,
    {
        let rows = tuple_count(q, arity_in);
        if rows > MAX_TABLE_ROWS {
            return Err(Error::DomainTooLarge(rows, MAX_TABLE_ROWS));
        }
        let mut entries = Vec::with_capacity(rows as usize * arity_out);
        for i in 0..rows {
            let input = tuple_at(q, arity_in, i);
            let out = f(&input);
            assert_eq!(out.len(), arity_out, "node function must be total with fixed arity");
            entries.extend_from_slice(&out);
        }
        Ok(NodeFunction::Table { arity_in, arity_out, entries })
    }

    pub fn forward(arity_in: usize, arity_out: usize) -> NodeFunction {
        NodeFunction::Forward { arity_in, arity_out, keep: arity_in.min(arity_out) }
    }

    pub fn forward_first(arity_in: usize, arity_out: usize, keep: usize) -> NodeFunction {
        assert!(keep <= arity_in.min(arity_out));
        NodeFunction::Forward { arity_in, arity_out, keep }
    }

    pub fn mds_decode(arity_in: usize, arity_out: usize, code: MdsCode) -> NodeFunction {
        assert!(code.n <= arity_in && code.k <= arity_out);
        NodeFunction::MdsDecode { arity_in, arity_out, code, memo: Default::default() }
    }

    pub fn arity_in(&self) -> usize {
        match self {
            NodeFunction::Table { arity_in, .. }
            | NodeFunction::Forward { arity_in, .. }
            | NodeFunction::MdsDecode { arity_in, .. }
            | NodeFunction::ConstZero { arity_in, .. } => *arity_in,
        }
    }

    pub fn arity_out(&self) -> usize {
        match self {
            NodeFunction::Table { arity_out, .. }
            | NodeFunction::Forward { arity_out, .. }
            | NodeFunction::MdsDecode { arity_out, .. }
            | NodeFunction::ConstZero { arity_out, .. } => *arity_out,
        }
    }

    pub fn eval(&self, q: usize, input: &[u8]) -> Vec<u8> {
        debug_assert_eq!(input.len(), self.arity_in());
        match self {
            NodeFunction::Table { arity_out, entries, .. } => {
                let row = tuple_rank(q, input) as usize;
                entries[row * arity_out..(row + 1) * arity_out].to_vec()
            }
            NodeFunction::Forward { arity_out, keep, .. } => {
                let mut out = vec![0u8; *arity_out];
                out[..*keep].copy_from_slice(&input[..*keep]);
                out
            }
            NodeFunction::MdsDecode { arity_out, code, memo, .. } => {
                let key = pack(input);
                if let Some(hit) = memo.lock().unwrap().get(&key) {
                    return hit.clone();
                }
                let msg = code.decode(&input[..code.n]).unwrap_or_else(|_| vec![0; code.k]);
                let mut out = vec![0u8; *arity_out];
                out[..code.k].copy_from_slice(&msg);
                memo.lock().unwrap().insert(key, out.clone());
                out
            }
            NodeFunction::ConstZero { arity_out, .. } => vec![0; *arity_out],
        }
    }
}

/// A network code: one processing function per intermediate node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkCode {
    pub alphabet: usize,
    pub nodes: BTreeMap<VertexId, NodeFunction>,
}

impl NetworkCode {
    pub fn new(alphabet: usize) -> NetworkCode {
        NetworkCode { alphabet, nodes: BTreeMap::new() }
    }

    pub fn with_node(mut self, v: VertexId, f: NodeFunction) -> NetworkCode {
        self.nodes.insert(v, f);
        self
    }

    /// Every intermediate node has a function whose arities match its
    /// degrees.
    pub fn check_against(&self, net: &Network) -> Result<()> {
        for v in net.intermediates() {
            let f = self
                .nodes
                .get(&v)
                .ok_or_else(|| Error::ArityMismatch(net.vertex_name(v).to_string(), 0, 0))?;
            if f.arity_in() != net.in_edges(v).len() {
                return Err(Error::ArityMismatch(
                    net.vertex_name(v).to_string(),
                    net.in_edges(v).len(),
                    f.arity_in(),
                ));
            }
            if f.arity_out() != net.out_edges(v).len() {
                return Err(Error::ArityMismatch(
                    net.vertex_name(v).to_string(),
                    net.out_edges(v).len(),
                    f.arity_out(),
                ));
            }
        }
        Ok(())
    }

    /// All intermediate nodes forward (padding with zeros where out-degree
    /// exceeds in-degree).
    pub fn forwarding(net: &Network, alphabet: usize) -> NetworkCode {
        let mut code = NetworkCode::new(alphabet);
        for v in net.intermediates() {
            code.nodes.insert(
                v,
                NodeFunction::forward(net.in_edges(v).len(), net.out_edges(v).len()),
            );
        }
        code
    }
}

/// An adversarial substitution: edge -> replacement symbol. The support must
/// stay within the vulnerable set when evaluated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern {
    pub assignments: BTreeMap<EdgeId, u8>,
}

impl ErrorPattern {
    pub fn none() -> ErrorPattern {
        ErrorPattern::default()
    }

    pub fn single(edge: EdgeId, value: u8) -> ErrorPattern {
        ErrorPattern { assignments: BTreeMap::from([(edge, value)]) }
    }

    pub fn weight(&self) -> usize {
        self.assignments.len()
    }
}

/// Enumerate every substitution pattern with support of size `0..=budget`
/// inside `vulnerable`, in deterministic order. Patterns that re-send the
/// original symbol are included; fan-out sets absorb the duplicates.
pub fn for_each_error_pattern<F>(vulnerable: &[EdgeId], q: usize, budget: usize, mut f: F)
where
    F: FnMut(&ErrorPattern),
{
    f(&ErrorPattern::none());
    let budget = budget.min(vulnerable.len());
    for size in 1..=budget {
        crate::util::for_each_subset(vulnerable.len(), size, |subset| {
            let edges: Vec<EdgeId> = subset.iter().map(|&i| vulnerable[i]).collect();
            let combos = tuple_count(q, size);
            for c in 0..combos {
                let values = tuple_at(q, size, c);
                let pattern = ErrorPattern {
                    assignments: edges.iter().copied().zip(values.iter().copied()).collect(),
                };
                f(&pattern);
            }
        });
    }
}

/// Deterministic forward pass: each edge carries its tail's output
/// coordinate (source coordinates for source edges), overwritten by the
/// error pattern; downstream nodes read post-error values. Returns the
/// symbol on every edge.
pub fn evaluate(
    net: &Network,
    code: &NetworkCode,
    source_word: &[u8],
    err: &ErrorPattern,
) -> Result<Vec<u8>> {
    let source_out = net.out_edges(net.source());
    if source_word.len() != source_out.len() {
        return Err(Error::ArityMismatch(
            net.vertex_name(net.source()).to_string(),
            source_out.len(),
            source_word.len(),
        ));
    }
    code.check_against(net)?;
    for &e in err.assignments.keys() {
        if !net.vulnerable().contains(&e) {
            return Err(Error::ErrorOutsideVulnerableSet(e));
        }
    }
    Ok(evaluate_unchecked(net, code, source_word, err))
}

pub(crate) fn evaluate_unchecked(
    net: &Network,
    code: &NetworkCode,
    source_word: &[u8],
    err: &ErrorPattern,
) -> Vec<u8> {
    let q = code.alphabet;
    let mut values = vec![0u8; net.edge_count()];
    let mut node_out: Vec<Option<Vec<u8>>> = vec![None; net.vertex_count()];
    for e in 0..net.edge_count() {
        let (tail, _) = net.edge(e);
        let raw = if tail == net.source() {
            let pos = net.out_edges(tail).iter().position(|&x| x == e).unwrap();
            source_word[pos]
        } else {
            if node_out[tail].is_none() {
                let input: Vec<u8> = net.in_edges(tail).iter().map(|&f| values[f]).collect();
                node_out[tail] = Some(code.nodes[&tail].eval(q, &input));
            }
            let pos = net.out_edges(tail).iter().position(|&x| x == e).unwrap();
            node_out[tail].as_ref().unwrap()[pos]
        };
        values[e] = *err.assignments.get(&e).unwrap_or(&raw);
    }
    values
}

/// The end-to-end channel from the source word to the tuple observed on the
/// terminal's incoming edges, under at most `budget` substitutions inside
/// the network's vulnerable set.
pub fn induced_channel(
    net: &Network,
    code: &NetworkCode,
    terminal: VertexId,
    budget: usize,
) -> Result<Channel> {
    if !net.is_terminal(terminal) {
        return Err(Error::NotATerminal(net.vertex_name(terminal).to_string()));
    }
    code.check_against(net)?;
    let q = code.alphabet;
    let input_len = net.out_edges(net.source()).len();
    let output_len = net.in_edges(terminal).len();
    if output_len > crate::util::MAX_PACKED_LEN {
        return Err(Error::DomainTooLarge(output_len as u128, crate::util::MAX_PACKED_LEN as u128));
    }
    let net = net.clone();
    let code = code.clone();
    let vulnerable: Vec<EdgeId> = net.vulnerable().iter().copied().collect();
    Ok(Channel::from_fanout_fn(q, input_len, output_len, move |word| {
        let mut outs = Vec::new();
        for_each_error_pattern(&vulnerable, q, budget, |pattern| {
            let values = evaluate_unchecked(&net, &code, word, pattern);
            outs.push(net.in_edges(terminal).iter().map(|&e| values[e]).collect());
        });
        outs
    }))
}

/// The channel describing the transfer from the edges of `from` to the edges
/// of `to`, when at most `budget` of the vulnerable edges of `from` are
/// substituted. Each `to` edge is a function of its immediate predecessors
/// in `from` alone: `from` values are pinned (cutting off upstream
/// influence) and propagated forward through the intermediate subgraph.
pub fn transfer_channel(
    net: &Network,
    code: &NetworkCode,
    from: &[EdgeId],
    to: &[EdgeId],
    budget: usize,
) -> Result<Channel> {
    code.check_against(net)?;
    let from_set: std::collections::BTreeSet<EdgeId> = from.iter().copied().collect();
    let to_set: std::collections::BTreeSet<EdgeId> = to.iter().copied().collect();
    for &e in from_set.iter().chain(&to_set) {
        if e >= net.edge_count() {
            return Err(Error::EdgeOutOfRange(e));
        }
    }
    if from_set.is_empty() || to_set.is_empty() || !net.set_precedes(&from_set, &to_set) {
        return Err(Error::NotPreceding(
            from_set.into_iter().collect(),
            to_set.into_iter().collect(),
        ));
    }
    let q = code.alphabet;
    let from_edges: Vec<EdgeId> = from_set.iter().copied().collect();
    let to_edges: Vec<EdgeId> = to_set.iter().copied().collect();
    if to_edges.len() > crate::util::MAX_PACKED_LEN {
        return Err(Error::DomainTooLarge(
            to_edges.len() as u128,
            crate::util::MAX_PACKED_LEN as u128,
        ));
    }
    // positions inside the input tuple that the adversary may corrupt
    let corruptible: Vec<usize> = (0..from_edges.len())
        .filter(|&i| net.vulnerable().contains(&from_edges[i]))
        .collect();
    let net = net.clone();
    let code = code.clone();
    let input_len = from_edges.len();
    Ok(Channel::from_fanout_fn(q, input_len, to_edges.len(), move |assignment| {
        let mut outs = Vec::new();
        for_each_error_pattern(&corruptible, q, budget, |pattern| {
            let mut pinned = assignment.to_vec();
            for (&pos, &val) in &pattern.assignments {
                pinned[pos] = val;
            }
            outs.push(propagate_between(&net, &code, &from_edges, &pinned, &to_edges));
        });
        outs
    }))
}

/// Pin values on `from` edges and propagate forward; edges with undetermined
/// inputs stay unknown, which cut precedence keeps away from `to`.
fn propagate_between(
    net: &Network,
    code: &NetworkCode,
    from_edges: &[EdgeId],
    pinned: &[u8],
    to_edges: &[EdgeId],
) -> Vec<u8> {
    let q = code.alphabet;
    let mut values: Vec<Option<u8>> = vec![None; net.edge_count()];
    let mut node_out: Vec<Option<Option<Vec<u8>>>> = vec![None; net.vertex_count()];
    for e in 0..net.edge_count() {
        if let Some(pos) = from_edges.iter().position(|&f| f == e) {
            values[e] = Some(pinned[pos]);
            continue;
        }
        let (tail, _) = net.edge(e);
        if tail == net.source() {
            continue; // unknown unless pinned
        }
        if node_out[tail].is_none() {
            let inputs: Option<Vec<u8>> =
                net.in_edges(tail).iter().map(|&f| values[f]).collect();
            node_out[tail] = Some(inputs.map(|inp| code.nodes[&tail].eval(q, &inp)));
        }
        if let Some(Some(out)) = &node_out[tail] {
            let pos = net.out_edges(tail).iter().position(|&x| x == e).unwrap();
            values[e] = Some(out[pos]);
        }
    }
    to_edges
        .iter()
        .map(|&e| values[e].expect("cut precedence determines every target edge"))
        .collect()
}

/// A linear network code: one coefficient matrix per intermediate node
/// (rows = out-degree, columns = in-degree) over a small field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearNetworkCode {
    pub field: Field,
    pub nodes: BTreeMap<VertexId, Vec<Vec<u8>>>,
}

impl LinearNetworkCode {
    /// Expand the matrix action into explicit tables.
    pub fn expand(&self, alphabet: usize) -> Result<NetworkCode> {
        if alphabet != self.field.order() {
            return Err(Error::FieldMismatch);
        }
        let q = self.field.order();
        let mut code = NetworkCode::new(q);
        for (&v, matrix) in &self.nodes {
            let arity_out = matrix.len();
            let arity_in = matrix.first().map(|r| r.len()).unwrap_or(0);
            if matrix.iter().any(|r| r.len() != arity_in) {
                return Err(Error::DimensionMismatch(format!("matrix at vertex {v} is ragged")));
            }
            let field = self.field.clone();
            let matrix = matrix.clone();
            let f = NodeFunction::table_from_fn(q, arity_in, arity_out, move |input| {
                matrix
                    .iter()
                    .map(|row| {
                        row.iter().zip(input).fold(0u8, |acc, (&c, &x)| {
                            field.add(acc, field.mul(c, x))
                        })
                    })
                    .collect()
            })?;
            code.nodes.insert(v, f);
        }
        Ok(code)
    }
}

/// Certificate form of a network code: per node name, a map from the base-q
/// input tuple to the output tuple, digits drawn from `0-9a-z`.
pub fn code_to_json(net: &Network, code: &NetworkCode) -> Result<serde_json::Value> {
    let q = code.alphabet;
    let digit = |s: u8| -> Result<char> {
        char::from_digit(s as u32, 36).ok_or_else(|| {
            Error::ParameterOutOfRange("certificate tables support alphabets up to 36".into())
        })
    };
    let mut nodes = serde_json::Map::new();
    for (&v, f) in &code.nodes {
        let rows = tuple_count(q, f.arity_in());
        if rows > 1 << 16 {
            return Err(Error::DomainTooLarge(rows, 1 << 16));
        }
        let mut table = serde_json::Map::new();
        for i in 0..rows {
            let input = tuple_at(q, f.arity_in(), i);
            let output = f.eval(q, &input);
            let key: String = input.iter().map(|&s| digit(s)).collect::<Result<_>>()?;
            let val: String = output.iter().map(|&s| digit(s)).collect::<Result<_>>()?;
            table.insert(key, serde_json::Value::String(val));
        }
        nodes.insert(net.vertex_name(v).to_string(), serde_json::Value::Object(table));
    }
    Ok(serde_json::json!({ "alphabet": q, "nodes": nodes }))
}

/// Parse the certificate form back into explicit tables.
pub fn code_from_json(net: &Network, value: &serde_json::Value) -> Result<NetworkCode> {
    let q = value
        .get("alphabet")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse("missing alphabet".into()))? as usize;
    let nodes = value
        .get("nodes")
        .and_then(|v| v.as_object())
        .ok_or_else(|| Error::Parse("missing nodes".into()))?;
    let undigit = |c: char| -> Result<u8> {
        c.to_digit(36)
            .map(|d| d as u8)
            .filter(|&d| (d as usize) < q)
            .ok_or_else(|| Error::Parse(format!("bad digit {c}")))
    };
    let mut code = NetworkCode::new(q);
    for (name, table) in nodes {
        let v = net.vertex_id(name)?;
        let arity_in = net.in_edges(v).len();
        let arity_out = net.out_edges(v).len();
        let rows = tuple_count(q, arity_in);
        let table = table
            .as_object()
            .ok_or_else(|| Error::Parse(format!("node {name} table must be an object")))?;
        if table.len() as u128 != rows {
            return Err(Error::Parse(format!("node {name} table must have {rows} rows")));
        }
        let mut entries = vec![0u8; rows as usize * arity_out];
        for (key, val) in table {
            let input: Vec<u8> = key.chars().map(undigit).collect::<Result<_>>()?;
            let output: Vec<u8> = val
                .as_str()
                .ok_or_else(|| Error::Parse("table values must be strings".into()))?
                .chars()
                .map(undigit)
                .collect::<Result<_>>()?;
            if input.len() != arity_in || output.len() != arity_out {
                return Err(Error::Parse(format!("node {name} row {key} has wrong arity")));
            }
            let row = tuple_rank(q, &input) as usize;
            entries[row * arity_out..(row + 1) * arity_out].copy_from_slice(&output);
        }
        code.nodes.insert(v, NodeFunction::Table { arity_in, arity_out, entries });
    }
    code.check_against(net)?;
    Ok(code)
}

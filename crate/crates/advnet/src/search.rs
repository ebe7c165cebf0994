//! Exhaustive exact capacity oracles: enumerate every network code (or every
//! linear network code) on a desk-scale instance, compute the per-terminal
//! confusability structure, and maximize the unambiguous code size.

use std::collections::HashMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::OuterCode;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::mis::ConflictGraph;
use crate::netcode::{
    for_each_error_pattern, ErrorPattern, LinearNetworkCode, NetworkCode, NodeFunction,
};
use crate::netgraph::{Network, NetworkSpec, VertexId};
use crate::util::{pack, tuple_at, tuple_count};

#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Maximum number of network codes to enumerate.
    pub max_codes: u128,
    /// Maximum size of the source word space.
    pub max_channel_inputs: u128,
    pub time_limit: Option<Duration>,
    /// Prune codes equivalent under per-edge symbol relabeling by pinning
    /// the all-zero input of every node to the all-zero output.
    pub symmetry: bool,
    /// Use the greedy independent-set heuristic per code (certificate
    /// becomes a lower bound only).
    pub greedy: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_codes: 2_000_000,
            max_channel_inputs: 4096,
            time_limit: None,
            symmetry: true,
            greedy: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceKey {
    pub network: NetworkSpec,
    pub alphabet: usize,
    pub budget: usize,
    pub linear: bool,
    pub greedy: bool,
    pub symmetry: bool,
}

impl InstanceKey {
    fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("keys serialize");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let hash = hasher.finalize();
        hash.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

/// The outcome of an exhaustive (or truncated) search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCertificate {
    pub instance: InstanceKey,
    pub max_code_size: u128,
    pub witness_outer: Vec<Vec<u8>>,
    pub witness_code: NetworkCode,
    /// True when the enumeration completed with the exact solver: the value
    /// is the capacity. False marks a lower-bound-only certificate.
    pub exhaustive: bool,
    pub mode: String,
    pub codes_examined: u128,
}

impl CapacityCertificate {
    /// Rate in alphabet-symbol units.
    pub fn rate(&self) -> f64 {
        (self.max_code_size as f64).ln() / (self.instance.alphabet as f64).ln()
    }

    /// Re-check the witness: the outer code must be unambiguous for every
    /// terminal under the witness network code.
    pub fn reverify(&self, net: &Network) -> Result<bool> {
        let outer = OuterCode::new(self.witness_outer.clone());
        if outer.len() as u128 != self.max_code_size {
            return Ok(false);
        }
        for terminal in net.terminals().collect::<Vec<_>>() {
            let ch = crate::netcode::induced_channel(
                net,
                &self.witness_code,
                terminal,
                self.instance.budget,
            )?;
            if !ch.is_unambiguous(&outer)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One enumerable degree of freedom: a node's function table.
struct NodeSlot {
    vertex: VertexId,
    arity_in: usize,
    arity_out: usize,
    rows: usize,
    outputs: u128,
}

/// Odometer over explicit node tables, lexicographic with the first node's
/// first row most significant. With symmetry on, the all-zero row of every
/// node is pinned to the all-zero output.
struct TableEnumerator {
    slots: Vec<NodeSlot>,
    state: Vec<u128>,
    row_of: Vec<(usize, usize)>,
    pinned_rows: usize,
    done: bool,
}

impl TableEnumerator {
    fn new(slots: Vec<NodeSlot>, symmetry: bool) -> TableEnumerator {
        let mut row_of = vec![];
        for (s, slot) in slots.iter().enumerate() {
            for r in 0..slot.rows {
                row_of.push((s, r));
            }
        }
        let state = vec![0u128; row_of.len()];
        TableEnumerator { slots, state, row_of, pinned_rows: usize::from(symmetry), done: false }
    }

    fn advance(&mut self) {
        for i in (0..self.state.len()).rev() {
            let (s, r) = self.row_of[i];
            if r < self.pinned_rows {
                continue;
            }
            self.state[i] += 1;
            if self.state[i] < self.slots[s].outputs {
                return;
            }
            self.state[i] = 0;
        }
        self.done = true;
    }

    fn build(&self, q: usize) -> NetworkCode {
        let mut code = NetworkCode::new(q);
        let mut idx = 0;
        for slot in &self.slots {
            let mut entries = Vec::with_capacity(slot.rows * slot.arity_out);
            for _ in 0..slot.rows {
                entries.extend(tuple_at(q, slot.arity_out, self.state[idx]));
                idx += 1;
            }
            code.nodes.insert(
                slot.vertex,
                NodeFunction::Table { arity_in: slot.arity_in, arity_out: slot.arity_out, entries },
            );
        }
        code
    }
}

/// Odometer over per-node coefficient matrices.
struct MatrixEnumerator {
    field: Field,
    shapes: Vec<(VertexId, usize, usize, u128)>, // vertex, rows, cols, count
    state: Vec<u128>,
    done: bool,
}

impl MatrixEnumerator {
    fn new(net: &Network, field: Field, q: usize) -> MatrixEnumerator {
        let shapes: Vec<(VertexId, usize, usize, u128)> = net
            .intermediates()
            .map(|v| {
                let cols = net.in_edges(v).len();
                let rows = net.out_edges(v).len();
                (v, rows, cols, tuple_count(q, rows * cols))
            })
            .collect();
        let state = vec![0u128; shapes.len()];
        MatrixEnumerator { field, shapes, state, done: false }
    }

    fn advance(&mut self) {
        for i in (0..self.state.len()).rev() {
            self.state[i] += 1;
            if self.state[i] < self.shapes[i].3 {
                return;
            }
            self.state[i] = 0;
        }
        self.done = true;
    }

    fn build(&self, q: usize) -> Result<NetworkCode> {
        let mut lin = LinearNetworkCode { field: self.field.clone(), nodes: Default::default() };
        for ((vertex, rows, cols, _), &rank) in self.shapes.iter().zip(&self.state) {
            let flat = tuple_at(q, rows * cols, rank);
            let matrix: Vec<Vec<u8>> = flat.chunks(*cols).map(|row| row.to_vec()).collect();
            lin.nodes.insert(*vertex, matrix);
        }
        lin.expand(q)
    }
}

struct Evaluation {
    conflict: ConflictGraph,
    /// Output-counting bound on any unambiguous code size.
    packing_bound: usize,
}

fn evaluate_code(
    net: &Network,
    code: &NetworkCode,
    patterns: &[ErrorPattern],
    inputs: &[Vec<u8>],
) -> Evaluation {
    let terminals: Vec<VertexId> = net.terminals().collect();
    let mut graph = ConflictGraph::new(inputs.len());
    let mut packing_bound = usize::MAX;
    for &terminal in &terminals {
        let mut by_output: HashMap<u128, Vec<usize>> = HashMap::new();
        let mut min_fanout = usize::MAX;
        for (i, word) in inputs.iter().enumerate() {
            let mut outs: Vec<u128> = patterns
                .iter()
                .map(|p| {
                    let values = crate::netcode::evaluate_unchecked(net, code, word, p);
                    pack(
                        &net.in_edges(terminal)
                            .iter()
                            .map(|&e| values[e])
                            .collect::<Vec<u8>>(),
                    )
                })
                .collect();
            outs.sort_unstable();
            outs.dedup();
            min_fanout = min_fanout.min(outs.len());
            for o in outs {
                by_output.entry(o).or_default().push(i);
            }
        }
        packing_bound = packing_bound.min(by_output.len() / min_fanout.max(1));
        for owners in by_output.values() {
            for (a, &u) in owners.iter().enumerate() {
                for &v in &owners[a + 1..] {
                    graph.add_edge(u, v);
                }
            }
        }
    }
    Evaluation { conflict: graph, packing_bound }
}

/// Drive an enumeration of network codes to the maximum unambiguous code
/// size over all terminals.
fn run_search<E>(
    net: &Network,
    q: usize,
    budget: usize,
    search: &SearchBudget,
    key: InstanceKey,
    mode: &str,
    mut next_code: E,
) -> Result<CapacityCertificate>
where
    E: FnMut() -> Result<Option<NetworkCode>>,
{
    let source_len = net.out_edges(net.source()).len();
    let input_count = tuple_count(q, source_len);
    if input_count > search.max_channel_inputs {
        return Err(Error::DomainTooLarge(input_count, search.max_channel_inputs));
    }
    let inputs: Vec<Vec<u8>> = (0..input_count).map(|i| tuple_at(q, source_len, i)).collect();
    let vulnerable: Vec<usize> = net.vulnerable().iter().copied().collect();
    let mut patterns = vec![];
    for_each_error_pattern(&vulnerable, q, budget, |p| patterns.push(p.clone()));

    let started = Instant::now();
    let mut best_size = 0usize;
    let mut best: Option<(Vec<Vec<u8>>, NetworkCode)> = None;
    let mut examined: u128 = 0;
    let mut truncated = false;
    while let Some(code) = next_code()? {
        if examined >= search.max_codes {
            truncated = true;
            break;
        }
        if let Some(limit) = search.time_limit {
            if examined.is_multiple_of(512) && started.elapsed() > limit {
                truncated = true;
                break;
            }
        }
        examined += 1;
        let eval = evaluate_code(net, &code, &patterns, &inputs);
        if eval.packing_bound <= best_size {
            continue;
        }
        let found = if search.greedy {
            let set = eval.conflict.greedy_independent_set();
            (set.len() > best_size).then_some(set)
        } else {
            eval.conflict
                .independent_set_of_size(best_size + 1)
                .map(|_| eval.conflict.max_independent_set())
        };
        if let Some(set) = found {
            if set.len() > best_size {
                best_size = set.len();
                let words: Vec<Vec<u8>> = set.iter().map(|&i| inputs[i].clone()).collect();
                best = Some((words, code));
            }
        }
    }

    let (witness_outer, witness_code) =
        best.ok_or_else(|| Error::BudgetExceeded("no code examined within the budget".into()))?;
    let cert = CapacityCertificate {
        instance: key,
        max_code_size: best_size as u128,
        witness_outer,
        witness_code,
        exhaustive: !truncated && !search.greedy,
        mode: if search.greedy { "greedy".into() } else { mode.to_string() },
        codes_examined: examined,
    };
    debug_assert!(cert.reverify(net)?);
    Ok(cert)
}

/// Exact one-shot capacity: enumerate all network codes and maximize the
/// largest simultaneously unambiguous code over all terminals.
pub fn exact_capacity(
    net: &Network,
    q: usize,
    budget: usize,
    search: &SearchBudget,
    cache: Option<&Path>,
) -> Result<CapacityCertificate> {
    let key = InstanceKey {
        network: net.clone().into(),
        alphabet: q,
        budget,
        linear: false,
        greedy: search.greedy,
        symmetry: search.symmetry,
    };
    if let Some(hit) = cache_lookup(cache, &key, net)? {
        return Ok(hit);
    }
    let slots: Vec<NodeSlot> = net
        .intermediates()
        .map(|v| {
            let arity_in = net.in_edges(v).len();
            let arity_out = net.out_edges(v).len();
            NodeSlot {
                vertex: v,
                arity_in,
                arity_out,
                rows: tuple_count(q, arity_in) as usize,
                outputs: tuple_count(q, arity_out),
            }
        })
        .collect();
    let mut tables = TableEnumerator::new(slots, search.symmetry);
    let cert = run_search(net, q, budget, search, key, "exact", move || {
        if tables.done {
            return Ok(None);
        }
        let code = tables.build(q);
        tables.advance();
        Ok(Some(code))
    })?;
    cache_store(cache, &cert)?;
    Ok(cert)
}

/// Exact linear capacity: enumerate only the matrix-induced network codes;
/// the outer code stays unrestricted.
pub fn exact_linear_capacity(
    net: &Network,
    q: usize,
    budget: usize,
    search: &SearchBudget,
    cache: Option<&Path>,
) -> Result<CapacityCertificate> {
    let field = Field::new(q)?;
    let key = InstanceKey {
        network: net.clone().into(),
        alphabet: q,
        budget,
        linear: true,
        greedy: search.greedy,
        symmetry: false,
    };
    if let Some(hit) = cache_lookup(cache, &key, net)? {
        return Ok(hit);
    }
    let mut matrices = MatrixEnumerator::new(net, field, q);
    let cert = run_search(net, q, budget, search, key, "linear-exact", move || {
        if matrices.done {
            return Ok(None);
        }
        let code = matrices.build(q)?;
        matrices.advance();
        Ok(Some(code))
    })?;
    cache_store(cache, &cert)?;
    Ok(cert)
}

/// The largest outer code that is unambiguous for every terminal under a
/// fixed network code.
pub fn best_code_for(
    net: &Network,
    q: usize,
    budget: usize,
    code: &NetworkCode,
    search: &SearchBudget,
) -> Result<OuterCode> {
    code.check_against(net)?;
    let source_len = net.out_edges(net.source()).len();
    let input_count = tuple_count(q, source_len);
    if input_count > search.max_channel_inputs {
        return Err(Error::DomainTooLarge(input_count, search.max_channel_inputs));
    }
    let inputs: Vec<Vec<u8>> = (0..input_count).map(|i| tuple_at(q, source_len, i)).collect();
    let vulnerable: Vec<usize> = net.vulnerable().iter().copied().collect();
    let mut patterns = vec![];
    for_each_error_pattern(&vulnerable, q, budget, |p| patterns.push(p.clone()));
    let eval = evaluate_code(net, code, &patterns, &inputs);
    let set = if search.greedy {
        eval.conflict.greedy_independent_set()
    } else {
        eval.conflict.max_independent_set()
    };
    Ok(OuterCode::new(set.into_iter().map(|i| inputs[i].clone()).collect()))
}

fn cache_path(dir: &Path, key: &InstanceKey) -> std::path::PathBuf {
    dir.join(format!("cert-{}.json", key.digest()))
}

fn cache_lookup(
    dir: Option<&Path>,
    key: &InstanceKey,
    net: &Network,
) -> Result<Option<CapacityCertificate>> {
    let Some(dir) = dir else { return Ok(None) };
    let path = cache_path(dir, key);
    let Ok(data) = std::fs::read_to_string(&path) else {
        return Ok(None);
    };
    let Ok(cert) = serde_json::from_str::<CapacityCertificate>(&data) else {
        return Ok(None);
    };
    if &cert.instance != key || !cert.reverify(net)? {
        return Ok(None);
    }
    Ok(Some(cert))
}

fn cache_store(dir: Option<&Path>, cert: &CapacityCertificate) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    let path = cache_path(dir, &cert.instance);
    let data = serde_json::to_string_pretty(cert).expect("certificates serialize");
    std::fs::write(&path, data).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

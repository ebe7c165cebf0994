//! The network data model: validated directed acyclic multigraphs with a
//! source, terminals and a vulnerable edge set, plus the structural queries
//! the bound machinery needs (cuts, precedence, level decompositions).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Vertex budget for exhaustive bipartition-cut enumeration.
pub const MAX_CUT_VERTICES: usize = 12;

/// A raw network description, as ingested from JSON. Edge ids are list
/// indices. `validate` turns this into a [`Network`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub vertices: Vec<String>,
    pub source: String,
    pub terminals: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub vulnerable: Vec<EdgeId>,
}

/// A validated network. The edge list is a linear extension of the edge
/// precedence order; parallel edges are distinct first-class edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NetworkSpec", into = "NetworkSpec")]
pub struct Network {
    vertex_names: Vec<String>,
    edges: Vec<(VertexId, VertexId)>,
    source: VertexId,
    terminals: BTreeSet<VertexId>,
    vulnerable: BTreeSet<EdgeId>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl TryFrom<NetworkSpec> for Network {
    type Error = Error;
    fn try_from(spec: NetworkSpec) -> Result<Self> {
        validate(&spec).map(|v| v.network)
    }
}

impl From<Network> for NetworkSpec {
    fn from(net: Network) -> NetworkSpec {
        NetworkSpec {
            vertices: net.vertex_names.clone(),
            source: net.vertex_names[net.source].clone(),
            terminals: net.terminals.iter().map(|&t| net.vertex_names[t].clone()).collect(),
            edges: net
                .edges
                .iter()
                .map(|&(u, v)| (net.vertex_names[u].clone(), net.vertex_names[v].clone()))
                .collect(),
            vulnerable: net.vulnerable.iter().copied().collect(),
        }
    }
}

/// Result of validation: the network plus the mapping from the ids in the
/// raw description to the ids after topological reordering.
#[derive(Debug, Clone)]
pub struct Validated {
    pub network: Network,
    /// `edge_map[old_id] = new_id`
    pub edge_map: Vec<EdgeId>,
}

/// Validate a raw description: checks acyclicity, degree constraints and
/// reachability, and reorders the edge list into a deterministic linear
/// extension of the precedence order (sort by topological rank of the tail
/// vertex, ties broken by the original position).
pub fn validate(spec: &NetworkSpec) -> Result<Validated> {
    let n = spec.vertices.len();
    let mut index: BTreeMap<&str, VertexId> = BTreeMap::new();
    for (i, name) in spec.vertices.iter().enumerate() {
        if index.insert(name, i).is_some() {
            return Err(Error::Parse(format!("duplicate vertex name {name}")));
        }
    }
    let lookup = |name: &str| -> Result<VertexId> {
        index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    };
    let source = lookup(&spec.source)?;
    let mut terminals = BTreeSet::new();
    for t in &spec.terminals {
        terminals.insert(lookup(t)?);
    }
    if terminals.is_empty() {
        return Err(Error::EmptyTerminalSet);
    }
    if terminals.contains(&source) {
        return Err(Error::SourceIsTerminal);
    }
    let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(spec.edges.len());
    for (tail, head) in &spec.edges {
        edges.push((lookup(tail)?, lookup(head)?));
    }
    for id in &spec.vulnerable {
        if *id >= edges.len() {
            return Err(Error::EdgeOutOfRange(*id));
        }
    }

    // Kahn's algorithm with a smallest-index heap gives deterministic ranks.
    let mut indegree = vec![0usize; n];
    for &(_, h) in &edges {
        indegree[h] += 1;
    }
    let mut ready: BTreeSet<VertexId> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut rank = vec![usize::MAX; n];
    let mut next_rank = 0;
    let mut remaining = edges.clone();
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        rank[v] = next_rank;
        next_rank += 1;
        remaining.retain(|&(t, h)| {
            if t == v {
                indegree[h] -= 1;
                if indegree[h] == 0 {
                    ready.insert(h);
                }
                false
            } else {
                true
            }
        });
    }
    if next_rank != n {
        return Err(Error::CyclicGraph);
    }

    for (i, &(tail, head)) in edges.iter().enumerate() {
        let _ = i;
        if head == source {
            return Err(Error::SourceHasInEdges(spec.source.clone()));
        }
        if terminals.contains(&tail) {
            return Err(Error::TerminalHasOutEdges(spec.vertices[tail].clone()));
        }
    }

    // stable sort by tail rank keeps the original order inside each vertex
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| (rank[edges[i].0], i));
    let mut edge_map = vec![0usize; edges.len()];
    for (new_id, &old_id) in order.iter().enumerate() {
        edge_map[old_id] = new_id;
    }
    let sorted_edges: Vec<(VertexId, VertexId)> = order.iter().map(|&i| edges[i]).collect();
    let vulnerable: BTreeSet<EdgeId> = spec.vulnerable.iter().map(|&e| edge_map[e]).collect();

    let mut in_edges = vec![Vec::new(); n];
    let mut out_edges = vec![Vec::new(); n];
    for (id, &(t, h)) in sorted_edges.iter().enumerate() {
        out_edges[t].push(id);
        in_edges[h].push(id);
    }

    let net = Network {
        vertex_names: spec.vertices.clone(),
        edges: sorted_edges,
        source,
        terminals,
        vulnerable,
        in_edges,
        out_edges,
    };

    // reachability checks
    let from_source = net.reachable_from(source, &BTreeSet::new());
    for &t in &net.terminals {
        if !from_source.contains(&t) {
            return Err(Error::UnreachableTerminal(net.vertex_names[t].clone()));
        }
    }
    let mut reaches_terminal = BTreeSet::new();
    for &t in &net.terminals {
        reaches_terminal.extend(net.co_reachable(t));
    }
    for v in 0..n {
        if v == source || net.terminals.contains(&v) {
            continue;
        }
        if !from_source.contains(&v) || !reaches_terminal.contains(&v) {
            return Err(Error::DanglingIntermediate(net.vertex_names[v].clone()));
        }
    }

    Ok(Validated { network: net, edge_map })
}

impl Network {
    /// Build directly from indexed parts; names are synthesized for the CLI
    /// formats. Intended for programmatic construction in tests and the
    /// built-in instance library.
    pub fn from_parts(
        vertices: Vec<String>,
        edges: Vec<(VertexId, VertexId)>,
        source: VertexId,
        terminals: Vec<VertexId>,
        vulnerable: Vec<EdgeId>,
    ) -> Result<Network> {
        let spec = NetworkSpec {
            source: vertices
                .get(source)
                .cloned()
                .ok_or(Error::UnknownVertex(source.to_string()))?,
            terminals: terminals
                .iter()
                .map(|&t| {
                    vertices.get(t).cloned().ok_or(Error::UnknownVertex(t.to_string()))
                })
                .collect::<Result<_>>()?,
            edges: edges.iter().map(|&(u, v)| (vertices[u].clone(), vertices[v].clone())).collect(),
            vertices,
            vulnerable,
        };
        Ok(validate(&spec)?.network)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.terminals.iter().copied()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.contains(&v)
    }

    pub fn vulnerable(&self) -> &BTreeSet<EdgeId> {
        &self.vulnerable
    }

    pub fn set_vulnerable(&mut self, edges: Vec<EdgeId>) -> Result<()> {
        for &e in &edges {
            if e >= self.edges.len() {
                return Err(Error::EdgeOutOfRange(e));
            }
        }
        self.vulnerable = edges.into_iter().collect();
        Ok(())
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Incoming edge ids of `v`, ascending (the global edge order).
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    /// Outgoing edge ids of `v`, ascending.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn intermediates(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).filter(|&v| v != self.source && !self.terminals.contains(&v))
    }

    fn reachable_from(&self, start: VertexId, removed_edges: &BTreeSet<EdgeId>) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                if removed_edges.contains(&e) {
                    continue;
                }
                let (_, h) = self.edges[e];
                if seen.insert(h) {
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    fn co_reachable(&self, target: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([target]);
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.in_edges[v] {
                let (t, _) = self.edges[e];
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Structural equality up to vertex names.
    pub fn same_shape(&self, other: &Network) -> bool {
        self.edges == other.edges
            && self.source == other.source
            && self.terminals == other.terminals
            && self.vulnerable == other.vulnerable
    }

    /// True when removing `cut` disconnects the source from `terminal`.
    pub fn is_cut(&self, cut: &BTreeSet<EdgeId>, terminal: VertexId) -> bool {
        !self.reachable_from(self.source, cut).contains(&terminal)
    }

    /// `e` precedes `f`: some directed path starts with `e` and ends with `f`.
    pub fn precedes(&self, e: EdgeId, f: EdgeId) -> bool {
        if e == f {
            return true;
        }
        let (_, head) = self.edges[e];
        let (tail, _) = self.edges[f];
        head == tail || self.reachable_from(head, &BTreeSet::new()).contains(&tail)
    }

    /// Edge set precedence: every path from the source to an edge of `later`
    /// contains an edge of `earlier`.
    pub fn set_precedes(&self, earlier: &BTreeSet<EdgeId>, later: &BTreeSet<EdgeId>) -> bool {
        let reachable = self.reachable_from(self.source, earlier);
        later.iter().all(|&f| {
            earlier.contains(&f) || {
                let (tail, _) = self.edges[f];
                !reachable.contains(&tail) && tail != self.source
            }
        })
    }

    /// Immediate predecessors of `f` within `pool`: edges `e` of `pool` with
    /// `e` preceding `f` and no other pool edge strictly between.
    pub fn immediate_predecessors(&self, f: EdgeId, pool: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
        let mut preds: Vec<EdgeId> = pool.iter().copied().filter(|&e| self.precedes(e, f)).collect();
        preds.retain(|&e| {
            !pool
                .iter()
                .any(|&mid| mid != e && self.precedes(e, mid) && self.precedes(mid, f))
        });
        preds.into_iter().collect()
    }

    /// Minimum cardinality of an edge-cut between `v` and `w`, computed as a
    /// unit-capacity max flow (Edmonds-Karp).
    pub fn min_cut(&self, v: VertexId, w: VertexId) -> Result<usize> {
        if !self.reachable_from(v, &BTreeSet::new()).contains(&w) {
            return Err(Error::Unreachable(
                self.vertex_names[v].clone(),
                self.vertex_names[w].clone(),
            ));
        }
        // residual: forward capacity per edge, plus reverse arcs
        let mut flow = vec![0i32; self.edges.len()];
        let mut total = 0usize;
        loop {
            // BFS over residual arcs
            let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; self.vertex_count()];
            let mut seen = vec![false; self.vertex_count()];
            seen[v] = true;
            let mut queue = VecDeque::from([v]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.out_edges[u] {
                    let (_, h) = self.edges[e];
                    if !seen[h] && flow[e] == 0 {
                        seen[h] = true;
                        parent[h] = Some((e, true));
                        if h == w {
                            break 'bfs;
                        }
                        queue.push_back(h);
                    }
                }
                for &e in &self.in_edges[u] {
                    let (t, _) = self.edges[e];
                    if !seen[t] && flow[e] == 1 {
                        seen[t] = true;
                        parent[t] = Some((e, false));
                        if t == w {
                            break 'bfs;
                        }
                        queue.push_back(t);
                    }
                }
            }
            if !seen[w] {
                break;
            }
            let mut cur = w;
            while cur != v {
                let (e, forward) = parent[cur].unwrap();
                if forward {
                    flow[e] = 1;
                    cur = self.edges[e].0;
                } else {
                    flow[e] = 0;
                    cur = self.edges[e].1;
                }
            }
            total += 1;
        }
        Ok(total)
    }

    /// All bipartition edge-cuts `delta(W)` between the source and
    /// `terminal`, deduplicated and sorted by (size, edge ids). Minimizing a
    /// monotone cut functional over these equals minimizing over all cuts.
    pub fn enumerate_cuts(&self, terminal: VertexId) -> Result<Vec<BTreeSet<EdgeId>>> {
        self.enumerate_cuts_with_limit(terminal, MAX_CUT_VERTICES)
    }

    /// [`Network::enumerate_cuts`] with an explicit vertex budget.
    pub fn enumerate_cuts_with_limit(
        &self,
        terminal: VertexId,
        max_vertices: usize,
    ) -> Result<Vec<BTreeSet<EdgeId>>> {
        if !self.terminals.contains(&terminal) {
            return Err(Error::NotATerminal(self.vertex_names[terminal].clone()));
        }
        if self.vertex_count() > max_vertices.min(60) {
            return Err(Error::TooManyVertices(self.vertex_count(), max_vertices.min(60)));
        }
        let free: Vec<VertexId> = (0..self.vertex_count())
            .filter(|&u| u != self.source && u != terminal)
            .collect();
        let mut cuts: BTreeSet<BTreeSet<EdgeId>> = BTreeSet::new();
        for mask in 0..(1u64 << free.len()) {
            let mut side = vec![false; self.vertex_count()];
            side[self.source] = true;
            for (i, &u) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    side[u] = true;
                }
            }
            let cut: BTreeSet<EdgeId> = (0..self.edges.len())
                .filter(|&e| side[self.edges[e].0] && !side[self.edges[e].1])
                .collect();
            cuts.insert(cut);
        }
        let mut out: Vec<BTreeSet<EdgeId>> = cuts.into_iter().collect();
        out.sort_by_key(|c| (c.len(), c.iter().copied().collect::<Vec<_>>()));
        Ok(out)
    }
}

/// Layer-by-layer adjacency matrices of an m-level network. Matrix `k` has
/// one row per layer-k vertex and one column per layer-(k+1) vertex; entries
/// count parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMatrices {
    pub matrices: Vec<Vec<Vec<usize>>>,
}

impl LevelMatrices {
    pub fn levels(&self) -> usize {
        self.matrices.len()
    }

    pub fn layer_size(&self, k: usize) -> usize {
        if k == 0 {
            self.matrices[0].len()
        } else {
            self.matrices[k - 1][0].len()
        }
    }

    fn check(&self) -> Result<()> {
        if self.matrices.is_empty() {
            return Err(Error::DimensionMismatch("no levels".into()));
        }
        for (k, m) in self.matrices.iter().enumerate() {
            if m.is_empty() || m.iter().any(|row| row.len() != m[0].len() || row.is_empty()) {
                return Err(Error::DimensionMismatch(format!("matrix {k} is ragged or empty")));
            }
            if k > 0 && self.matrices[k - 1][0].len() != m.len() {
                return Err(Error::DimensionMismatch(format!(
                    "cols of matrix {} != rows of matrix {k}",
                    k - 1
                )));
            }
        }
        if self.matrices[0].len() != 1 {
            return Err(Error::DimensionMismatch("layer 0 must be the source alone".into()));
        }
        Ok(())
    }

    /// The `([a_1..a_n], [b_1..b_n])` profile of a simple 2-level network
    /// (single terminal), if this is one.
    pub fn two_level_profile(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.levels() != 2 || self.matrices[1][0].len() != 1 {
            return None;
        }
        let ins = self.matrices[0][0].clone();
        let outs: Vec<usize> = self.matrices[1].iter().map(|row| row[0]).collect();
        Some((ins, outs))
    }
}

/// Detect the unique level structure, if the network is layered: every edge
/// must go from one layer to the next, layer 0 is the source, the last layer
/// is exactly the terminal set.
pub fn detect_levels(net: &Network) -> Option<LevelMatrices> {
    let n = net.vertex_count();
    let mut level = vec![usize::MAX; n];
    level[net.source()] = 0;
    // edge order is a linear extension, so tails are leveled before heads
    for e in 0..net.edge_count() {
        let (t, h) = net.edge(e);
        if level[t] == usize::MAX {
            return None;
        }
        if level[h] == usize::MAX {
            level[h] = level[t] + 1;
        } else if level[h] != level[t] + 1 {
            return None;
        }
    }
    let m = *level.iter().max().unwrap();
    if m == 0 {
        return None;
    }
    for (v, &lv) in level.iter().enumerate() {
        if (lv == m) != net.is_terminal(v) {
            return None;
        }
    }
    let mut layers: Vec<Vec<VertexId>> = vec![Vec::new(); m + 1];
    for (v, &lv) in level.iter().enumerate() {
        layers[lv].push(v);
    }
    let mut matrices = Vec::with_capacity(m);
    for k in 0..m {
        let rows = &layers[k];
        let cols = &layers[k + 1];
        let mut mat = vec![vec![0usize; cols.len()]; rows.len()];
        for e in 0..net.edge_count() {
            let (t, h) = net.edge(e);
            if level[t] == k {
                let i = rows.iter().position(|&v| v == t).unwrap();
                let j = cols.iter().position(|&v| v == h).unwrap();
                mat[i][j] += 1;
            }
        }
        matrices.push(mat);
    }
    Some(LevelMatrices { matrices })
}

/// Materialize the unique network of a level-matrix description. Vertices
/// are named `S`, `V<k>_<j>`, and `T` (or `T<j>` for several terminals);
/// the vulnerable set is left empty.
pub fn from_level_matrices(lm: &LevelMatrices) -> Result<Network> {
    lm.check()?;
    let m = lm.levels();
    let mut names = vec!["S".to_string()];
    let mut layer_ids: Vec<Vec<VertexId>> = vec![vec![0]];
    for k in 1..=m {
        let size = lm.layer_size(k);
        let mut ids = Vec::with_capacity(size);
        for j in 0..size {
            ids.push(names.len());
            if k == m {
                names.push(if size == 1 { "T".into() } else { format!("T{j}") });
            } else {
                names.push(format!("V{k}_{j}"));
            }
        }
        layer_ids.push(ids);
    }
    let mut edges = Vec::new();
    for (k, mat) in lm.matrices.iter().enumerate() {
        for (i, row) in mat.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                for _ in 0..count {
                    edges.push((layer_ids[k][i], layer_ids[k + 1][j]));
                }
            }
        }
    }
    let terminals = layer_ids[m].clone();
    Network::from_parts(names, edges, 0, terminals, vec![])
}

/// Build the simple 2-level network `([ins], [outs])` with all source-adjacent
/// edges vulnerable.
pub fn simple_two_level(ins: &[usize], outs: &[usize]) -> Result<Network> {
    if ins.len() != outs.len() || ins.is_empty() {
        return Err(Error::DimensionMismatch("degree lists must align".into()));
    }
    if ins.iter().chain(outs).any(|&d| d == 0) {
        return Err(Error::ParameterOutOfRange("zero degree".into()));
    }
    let lm = LevelMatrices {
        matrices: vec![vec![ins.to_vec()], outs.iter().map(|&b| vec![b]).collect()],
    };
    let mut net = from_level_matrices(&lm)?;
    let sources: Vec<EdgeId> = net.out_edges(net.source()).to_vec();
    net.set_vulnerable(sources)?;
    Ok(net)
}

/// A pair of nested edge-cuts toward one terminal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPair {
    pub first: BTreeSet<EdgeId>,
    pub second: BTreeSet<EdgeId>,
    pub terminal: VertexId,
}

impl CutPair {
    /// Check both sets are cuts between the source and the terminal and that
    /// the first precedes the second.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if !net.is_terminal(self.terminal) {
            return Err(Error::NotATerminal(net.vertex_name(self.terminal).to_string()));
        }
        for (label, cut) in [("first", &self.first), ("second", &self.second)] {
            for &e in cut {
                if e >= net.edge_count() {
                    return Err(Error::EdgeOutOfRange(e));
                }
            }
            if !net.is_cut(cut, self.terminal) {
                return Err(Error::InvalidCutPair(format!("{label} set is not a cut")));
            }
        }
        if !net.set_precedes(&self.first, &self.second) {
            return Err(Error::NotPreceding(
                self.first.iter().copied().collect(),
                self.second.iter().copied().collect(),
            ));
        }
        Ok(())
    }
}

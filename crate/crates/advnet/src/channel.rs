//! Adversarial channels as fan-out maps over tuple spaces, with comparison,
//! concatenation, unambiguity checking and exact one-shot capacity via a
//! maximum independent set of the confusability graph.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::mis::ConflictGraph;
use crate::util::{check_word, pack, tuple_at, tuple_count, unpack};

/// Cap on enumerable input spaces for capacity and whole-channel queries.
pub const DEFAULT_INPUT_LIMIT: u128 = 4096;

type FanoutFn = dyn Fn(&[u8]) -> Vec<Vec<u8>> + Send + Sync;

#[derive(Clone)]
enum Provider {
    /// Explicit fan-out lists keyed by packed input.
    Table(Arc<HashMap<u128, Vec<u128>>>),
    /// Fan-outs computed on demand.
    Dynamic(Arc<FanoutFn>),
    Concat(Arc<Channel>, Arc<Channel>),
}

/// A channel from length-`input_len` tuples to length-`output_len` tuples
/// over a common alphabet `0..q`. Fan-outs are memoized; values are cheap to
/// clone and safe to share.
#[derive(Clone)]
pub struct Channel {
    q: usize,
    input_len: usize,
    output_len: usize,
    provider: Provider,
    memo: Arc<Mutex<HashMap<u128, Arc<Vec<u128>>>>>,
}

impl std::fmt::Debug for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Channel(q={}, {} -> {} symbols)",
            self.q, self.input_len, self.output_len
        )
    }
}

/// An outer code: a set of channel inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterCode {
    pub words: Vec<Vec<u8>>,
}

impl OuterCode {
    pub fn new(mut words: Vec<Vec<u8>>) -> OuterCode {
        words.sort();
        words.dedup();
        OuterCode { words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Rate in `log_base` units.
    pub fn rate(&self, base: usize) -> f64 {
        (self.words.len() as f64).ln() / (base as f64).ln()
    }
}

/// Result of a capacity computation: the largest (or, for greedy mode, a
/// certified feasible) unambiguous code.
#[derive(Debug, Clone)]
pub struct ChannelCapacity {
    pub code: OuterCode,
    /// True when produced by the exact search; false for the greedy bound.
    pub exact: bool,
}

impl ChannelCapacity {
    pub fn code_size(&self) -> usize {
        self.code.len()
    }

    /// Capacity in bits.
    pub fn bits(&self) -> f64 {
        (self.code.len() as f64).log2()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CapacityOptions {
    pub max_inputs: u128,
    pub greedy: bool,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions { max_inputs: DEFAULT_INPUT_LIMIT, greedy: false }
    }
}

impl Channel {
    pub fn from_fanout_fn<F>(q: usize, input_len: usize, output_len: usize, f: F) -> Channel
    where
        F: Fn(&[u8]) -> Vec<Vec<u8>> + Send + Sync + 'static,
    {
        Channel {
            q,
            input_len,
            output_len,
            provider: Provider::Dynamic(Arc::new(f)),
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// Build an explicit channel from `(input, fan-out set)` pairs.
    pub fn from_table(
        q: usize,
        input_len: usize,
        output_len: usize,
        entries: Vec<(Vec<u8>, Vec<Vec<u8>>)>,
    ) -> Result<Channel> {
        let mut table = HashMap::new();
        for (input, outs) in entries {
            check_word(q, input_len, &input)?;
            if outs.is_empty() {
                return Err(Error::SpaceMismatch("empty fan-out set".into()));
            }
            let mut packed: Vec<u128> = Vec::with_capacity(outs.len());
            for o in outs {
                check_word(q, output_len, &o)?;
                packed.push(pack(&o));
            }
            packed.sort_unstable();
            packed.dedup();
            table.insert(pack(&input), packed);
        }
        if table.len() as u128 != tuple_count(q, input_len) {
            return Err(Error::SpaceMismatch("fan-out table does not cover the input space".into()));
        }
        Ok(Channel {
            q,
            input_len,
            output_len,
            provider: Provider::Table(Arc::new(table)),
            memo: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// The deterministic identity channel on length-`len` tuples.
    pub fn identity(q: usize, len: usize) -> Channel {
        Channel::from_fanout_fn(q, len, len, |x| vec![x.to_vec()])
    }

    /// Identity with up to `radius` substituted coordinates (a Hamming-ball
    /// channel).
    pub fn hamming(q: usize, len: usize, radius: usize) -> Channel {
        Channel::from_fanout_fn(q, len, len, move |x| crate::util::hamming_ball(q, x, radius))
    }

    pub fn alphabet(&self) -> usize {
        self.q
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    pub fn input_count(&self) -> u128 {
        tuple_count(self.q, self.input_len)
    }

    /// The fan-out set of `input`, as packed outputs, sorted.
    pub fn fanout_packed(&self, input: &[u8]) -> Result<Arc<Vec<u128>>> {
        check_word(self.q, self.input_len, input)?;
        let key = pack(input);
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let mut outs: Vec<u128> = match &self.provider {
            Provider::Table(t) => t.get(&key).cloned().unwrap_or_default(),
            Provider::Dynamic(f) => f(input).iter().map(|o| pack(o)).collect(),
            Provider::Concat(a, b) => {
                let mut acc = Vec::new();
                for mid in a.fanout_packed(input)?.iter() {
                    acc.extend(b.fanout_packed(&unpack(*mid))?.iter().copied());
                }
                acc
            }
        };
        outs.sort_unstable();
        outs.dedup();
        debug_assert!(!outs.is_empty(), "fan-out sets must be non-empty");
        let arc = Arc::new(outs);
        self.memo.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }

    /// The fan-out set of `input` as symbol tuples.
    pub fn fanout(&self, input: &[u8]) -> Result<Vec<Vec<u8>>> {
        Ok(self.fanout_packed(input)?.iter().map(|&o| unpack(o)).collect())
    }

    fn enumerable(&self, limit: u128) -> Result<usize> {
        let count = self.input_count();
        if count > limit {
            return Err(Error::DomainTooLarge(count, limit));
        }
        Ok(count as usize)
    }

    pub fn is_deterministic(&self) -> Result<bool> {
        let n = self.enumerable(DEFAULT_INPUT_LIMIT)?;
        for i in 0..n {
            if self.fanout_packed(&tuple_at(self.q, self.input_len, i as u128))?.len() != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise fan-out inclusion: `self` is finer than `coarser`.
    pub fn finer_than(&self, coarser: &Channel) -> Result<bool> {
        if self.q != coarser.q
            || self.input_len != coarser.input_len
            || self.output_len != coarser.output_len
        {
            return Err(Error::SpaceMismatch(format!("{self:?} vs {coarser:?}")));
        }
        let n = self.enumerable(DEFAULT_INPUT_LIMIT)?;
        for i in 0..n {
            let x = tuple_at(self.q, self.input_len, i as u128);
            let fine = self.fanout_packed(&x)?;
            let coarse = coarser.fanout_packed(&x)?;
            // both sorted: subset test by merge
            let mut it = coarse.iter().peekable();
            for o in fine.iter() {
                while it.peek().is_some_and(|&&c| c < *o) {
                    it.next();
                }
                if it.peek() != Some(&o) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Chain `self` into `next` (outputs of `self` feed `next`).
    pub fn concatenate(&self, next: &Channel) -> Result<Channel> {
        if self.q != next.q || self.output_len != next.input_len {
            return Err(Error::SpaceMismatch(format!("{self:?} into {next:?}")));
        }
        Ok(Channel {
            q: self.q,
            input_len: self.input_len,
            output_len: next.output_len,
            provider: Provider::Concat(Arc::new(self.clone()), Arc::new(next.clone())),
            memo: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// Full-channel equality on every fan-out set (enumerates the domain).
    pub fn same_fanouts(&self, other: &Channel) -> Result<bool> {
        Ok(self.finer_than(other)? && other.finer_than(self)?)
    }

    /// Two distinct code words whose fan-outs intersect, if any.
    pub fn ambiguous_pair(&self, code: &OuterCode) -> Result<Option<(Vec<u8>, Vec<u8>)>> {
        let mut owner: HashMap<u128, usize> = HashMap::new();
        for (i, w) in code.words.iter().enumerate() {
            for &o in self.fanout_packed(w)?.iter() {
                if let Some(&j) = owner.get(&o) {
                    if j != i {
                        return Ok(Some((code.words[j].clone(), w.clone())));
                    }
                } else {
                    owner.insert(o, i);
                }
            }
        }
        Ok(None)
    }

    /// All distinct pairs of code words have disjoint fan-outs.
    pub fn is_unambiguous(&self, code: &OuterCode) -> Result<bool> {
        Ok(self.ambiguous_pair(code)?.is_none())
    }

    /// The confusability graph over all inputs: vertices are inputs in
    /// base-q rank order, edges join inputs with intersecting fan-outs.
    pub fn confusability_graph(&self, limit: u128) -> Result<ConflictGraph> {
        let n = self.enumerable(limit)?;
        let mut graph = ConflictGraph::new(n);
        let mut by_output: HashMap<u128, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let x = tuple_at(self.q, self.input_len, i as u128);
            for &o in self.fanout_packed(&x)?.iter() {
                by_output.entry(o).or_default().push(i);
            }
        }
        for inputs in by_output.values() {
            for (a, &u) in inputs.iter().enumerate() {
                for &v in &inputs[a + 1..] {
                    graph.add_edge(u, v);
                }
            }
        }
        Ok(graph)
    }

    /// Largest unambiguous code (exact mode) or a greedy lower-bound witness.
    pub fn one_shot_capacity(&self, opts: CapacityOptions) -> Result<ChannelCapacity> {
        let graph = self.confusability_graph(opts.max_inputs)?;
        let chosen = if opts.greedy {
            graph.greedy_independent_set()
        } else {
            graph.max_independent_set()
        };
        let words = chosen
            .into_iter()
            .map(|i| tuple_at(self.q, self.input_len, i as u128))
            .collect();
        Ok(ChannelCapacity { code: OuterCode::new(words), exact: !opts.greedy })
    }
}

//! Exact maximum-independent-set search on small conflict graphs, used to
//! compute one-shot capacities. Branch and bound over bitsets, with a greedy
//! fallback that only certifies a lower bound.

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>, // n rows of `words` u64 blocks
}

#[derive(Clone)]
struct Bits {
    blocks: Vec<u64>,
}

impl Bits {
    fn full(n: usize, words: usize) -> Bits {
        let mut blocks = vec![u64::MAX; words];
        let rem = n % 64;
        if rem != 0 && words > 0 {
            blocks[words - 1] = (1u64 << rem) - 1;
        }
        Bits { blocks }
    }

    fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    fn remove(&mut self, v: usize) {
        self.blocks[v / 64] &= !(1u64 << (v % 64));
    }

    fn subtract_row(&mut self, row: &[u64]) {
        for (b, r) in self.blocks.iter_mut().zip(row) {
            *b &= !r;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &b)| {
            let mut b = b;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let tz = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(i * 64 + tz)
                }
            })
        })
    }
}

impl ConflictGraph {
    pub fn new(n: usize) -> ConflictGraph {
        let words = n.div_ceil(64);
        ConflictGraph { n, words, adj: vec![0; n * words] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] & (1 << (v % 64)) != 0
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    fn degree_in(&self, v: usize, cand: &Bits) -> usize {
        self.row(v)
            .iter()
            .zip(&cand.blocks)
            .map(|(a, c)| (a & c).count_ones() as usize)
            .sum()
    }

    /// Greedy clique cover of the candidate set; its size bounds any
    /// independent set inside `cand` from above.
    fn clique_cover_bound(&self, cand: &Bits) -> usize {
        let mut masks: Vec<Vec<u64>> = Vec::new();
        for v in cand.iter() {
            let row = self.row(v);
            match masks
                .iter_mut()
                .find(|m| m[v / 64] & (1u64 << (v % 64)) != 0)
            {
                Some(mask) => {
                    for (m, r) in mask.iter_mut().zip(row) {
                        *m &= r;
                    }
                }
                None => masks.push(row.to_vec()),
            }
        }
        masks.len()
    }

    /// Exact maximum independent set; deterministic for a fixed graph.
    pub fn max_independent_set(&self) -> Vec<usize> {
        let mut best = self.greedy_independent_set();
        let cand = Bits::full(self.n, self.words);
        let mut current = Vec::new();
        self.branch(cand, &mut current, &mut best, None);
        best.sort_unstable();
        best
    }

    /// Find an independent set of at least `target` vertices, if one exists.
    pub fn independent_set_of_size(&self, target: usize) -> Option<Vec<usize>> {
        if target == 0 {
            return Some(vec![]);
        }
        let greedy = self.greedy_independent_set();
        if greedy.len() >= target {
            return Some(greedy.into_iter().take(target).collect());
        }
        let mut best = greedy;
        let cand = Bits::full(self.n, self.words);
        let mut current = Vec::new();
        self.branch(cand, &mut current, &mut best, Some(target));
        if best.len() >= target {
            best.sort_unstable();
            Some(best)
        } else {
            None
        }
    }

    fn branch(&self, mut cand: Bits, current: &mut Vec<usize>, best: &mut Vec<usize>, target: Option<usize>) {
        let entry_len = current.len();
        'body: {
            if let Some(t) = target {
                if best.len() >= t {
                    break 'body;
                }
            }
            loop {
                let available = cand.count();
                if current.len() + available <= best.len() {
                    break 'body;
                }
                if available == 0 {
                    *best = current.clone();
                    break 'body;
                }
                if available > 24
                    && current.len() + self.clique_cover_bound(&cand) <= best.len()
                {
                    break 'body;
                }
                // vertices isolated within the candidate set always join
                let mut progressed = false;
                for v in cand.iter().collect::<Vec<_>>() {
                    if self.degree_in(v, &cand) == 0 {
                        cand.remove(v);
                        current.push(v);
                        progressed = true;
                    }
                }
                if !progressed {
                    break;
                }
                if let Some(t) = target {
                    if current.len() >= t {
                        *best = current.clone();
                        break 'body;
                    }
                }
            }
            // pick the candidate of maximum degree, smallest index on ties
            let v = cand
                .iter()
                .max_by_key(|&v| (self.degree_in(v, &cand), usize::MAX - v))
                .unwrap();
            // include v
            let mut with_v = cand.clone();
            with_v.remove(v);
            with_v.subtract_row(self.row(v));
            current.push(v);
            self.branch(with_v, current, best, target);
            current.pop();
            if let Some(t) = target {
                if best.len() >= t {
                    break 'body;
                }
            }
            // exclude v
            cand.remove(v);
            self.branch(cand, current, best, target);
        }
        current.truncate(entry_len);
    }

    /// Lowest-degree-first greedy independent set (a lower-bound witness).
    pub fn greedy_independent_set(&self) -> Vec<usize> {
        let full = Bits::full(self.n, self.words);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (self.degree_in(v, &full), v));
        let mut chosen: Vec<usize> = Vec::new();
        let mut blocked = vec![false; self.n];
        for v in order {
            if !blocked[v] {
                chosen.push(v);
                for (u, slot) in blocked.iter_mut().enumerate() {
                    if self.has_edge(u, v) {
                        *slot = true;
                    }
                }
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

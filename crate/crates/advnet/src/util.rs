//! Small helpers shared across modules: tuple packing, base-q indexing,
//! and combinatorial iteration.

use crate::error::{Error, Result};

/// Maximum tuple length that fits a packed `u128`: one byte per symbol,
/// with the top byte holding the length.
pub const MAX_PACKED_LEN: usize = 15;

/// Pack a symbol tuple (each < 256) into a `u128`, one byte per coordinate.
pub fn pack(word: &[u8]) -> u128 {
    debug_assert!(word.len() <= MAX_PACKED_LEN);
    let mut v: u128 = 0;
    for &s in word {
        v = (v << 8) | s as u128;
    }
    v | ((word.len() as u128) << 120)
}

/// Inverse of [`pack`].
pub fn unpack(v: u128) -> Vec<u8> {
    let len = (v >> 120) as usize;
    let mut out = vec![0u8; len];
    let mut v = v;
    for i in (0..len).rev() {
        out[i] = (v & 0xff) as u8;
        v >>= 8;
    }
    out
}

/// Number of length-`len` tuples over an alphabet of size `q`.
pub fn tuple_count(q: usize, len: usize) -> u128 {
    (q as u128).pow(len as u32)
}

/// The tuple with base-`q` rank `index` among all length-`len` tuples.
pub fn tuple_at(q: usize, len: usize, index: u128) -> Vec<u8> {
    let mut out = vec![0u8; len];
    let mut rest = index;
    for i in (0..len).rev() {
        out[i] = (rest % q as u128) as u8;
        rest /= q as u128;
    }
    out
}

/// Base-`q` rank of `word` (inverse of [`tuple_at`]).
pub fn tuple_rank(q: usize, word: &[u8]) -> u128 {
    let mut v: u128 = 0;
    for &s in word {
        v = v * q as u128 + s as u128;
    }
    v
}

pub fn check_word(q: usize, len: usize, word: &[u8]) -> Result<()> {
    if word.len() != len {
        return Err(Error::LengthMismatch { expected: len, got: word.len() });
    }
    if word.iter().any(|&s| s as usize >= q) {
        return Err(Error::WordOutsideDomain);
    }
    Ok(())
}

/// Iterate over all k-subsets of `0..n` in lexicographic order.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    fn rec<F: FnMut(&[usize])>(n: usize, k: usize, start: usize, buf: &mut Vec<usize>, f: &mut F) {
        if buf.len() == k {
            f(buf);
            return;
        }
        let remaining = k - buf.len();
        for i in start..=n.saturating_sub(remaining) {
            buf.push(i);
            rec(n, k, i + 1, buf, f);
            buf.pop();
        }
    }
    if k > n {
        return;
    }
    let mut buf = Vec::with_capacity(k);
    rec(n, k, 0, &mut buf, &mut f);
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Hamming distance of two equal-length words.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// All words within Hamming distance `radius` of `center` over alphabet `q`,
/// in a deterministic order.
pub fn hamming_ball(q: usize, center: &[u8], radius: usize) -> Vec<Vec<u8>> {
    let mut out = vec![center.to_vec()];
    let n = center.len();
    for r in 1..=radius.min(n) {
        for_each_subset(n, r, |positions| {
            let mut word = center.to_vec();
            let mut stack = vec![(0usize, word.clone())];
            // substitute a non-center symbol at every chosen position
            while let Some((i, mut w)) = stack.pop() {
                if i == positions.len() {
                    out.push(w);
                    continue;
                }
                let pos = positions[i];
                for s in 0..q as u8 {
                    if s == center[pos] {
                        continue;
                    }
                    w[pos] = s;
                    stack.push((i + 1, w.clone()));
                }
                w[pos] = center[pos];
            }
            let _ = &mut word;
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip() {
        for word in [vec![], vec![0], vec![1, 2, 3], vec![255; 15]] {
            assert_eq!(unpack(pack(&word)), word);
        }
        // distinct lengths of the same prefix pack differently
        assert_ne!(pack(&[0, 0]), pack(&[0]));
    }

    #[test]
    fn tuple_indexing_roundtrip() {
        for idx in 0..27u128 {
            let w = tuple_at(3, 3, idx);
            assert_eq!(tuple_rank(3, &w), idx);
        }
    }

    #[test]
    fn ball_sizes() {
        // |B_1| = 1 + n(q-1)
        let b = hamming_ball(3, &[0, 0, 0, 0], 1);
        assert_eq!(b.len(), 1 + 4 * 2);
        let b = hamming_ball(2, &[0, 0, 0], 3);
        assert_eq!(b.len(), 8);
    }

    #[test]
    fn subsets() {
        let mut seen = vec![];
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
    }
}

//! Arithmetic for small finite fields GF(q), q <= 256, and Reed-Solomon
//! MDS codes over them. Prime fields use integer residues; prime powers use
//! polynomial residues modulo the lexicographically smallest primitive
//! polynomial, so GF(4) is built on x^2 + x + 1.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug)]
struct Tables {
    mul: Vec<u8>,
    inv: Vec<u8>,
    neg: Vec<u8>,
}

/// A finite field of order `q`. Elements are `0..q`; for prime powers the
/// integer encodes base-p polynomial coefficients.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Field {
    q: usize,
    p: usize,
    degree: usize,
    #[serde(skip)]
    tables: Arc<Tables>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field(q={})", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}
impl Eq for Field {}

impl TryFrom<usize> for Field {
    type Error = Error;
    fn try_from(q: usize) -> Result<Self> {
        Field::new(q)
    }
}
impl From<Field> for usize {
    fn from(f: Field) -> usize {
        f.q
    }
}

fn factor_prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut m = q;
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

fn digits(p: usize, degree: usize, mut e: usize) -> Vec<usize> {
    let mut d = vec![0usize; degree];
    for slot in d.iter_mut() {
        *slot = e % p;
        e /= p;
    }
    d
}

fn from_digits(p: usize, d: &[usize]) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiply polynomial elements modulo `modulus` (coefficients of x^0..x^k,
/// the leading x^k coefficient implicit 1).
fn poly_mul(p: usize, degree: usize, modulus: &[usize], a: usize, b: usize) -> usize {
    let da = digits(p, degree, a);
    let db = digits(p, degree, b);
    let mut prod = vec![0usize; 2 * degree];
    for (i, &ca) in da.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ca * cb) % p;
        }
    }
    // reduce: x^k = -(modulus lower part)
    for i in (degree..2 * degree).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus.iter().enumerate().take(degree) {
            let sub = (c * m) % p;
            prod[i - degree + j] = (prod[i - degree + j] + p - sub) % p;
        }
    }
    from_digits(p, &prod[..degree])
}

/// Find the smallest monic primitive polynomial of the given degree,
/// returned as its lower coefficients (x^degree implicit).
fn primitive_polynomial(p: usize, degree: usize) -> Vec<usize> {
    let q = p.pow(degree as u32);
    let count = p.pow(degree as u32); // lower-coefficient combinations
    'candidates: for code in 0..count {
        let lower = digits(p, degree, code);
        if lower[0] == 0 {
            continue; // divisible by x
        }
        // irreducibility: no root-free guarantee for degree > 3, so check that
        // x^(q-1) = 1 and x^((q-1)/r) != 1 for prime divisors r; this both
        // verifies the multiplicative order (primitivity) and implies the
        // quotient ring is a field of order q.
        // First make sure multiplication is well-defined (any modulus works
        // mechanically), then test that every power of x up to q-1 first
        // returns to 1 exactly at q-1 and that no zero divisors show up on
        // the orbit.
        let mut pow = 1usize; // x^0
        let x = from_digits(p, &{
            let mut d = vec![0; degree];
            if degree > 1 {
                d[1] = 1;
            } else {
                d[0] = 1; // degree 1: x == the root itself, handled below
            }
            d
        });
        if degree == 1 {
            return lower;
        }
        let mut order = 0;
        for step in 1..=q - 1 {
            pow = poly_mul(p, degree, &lower, pow, x);
            if pow == 0 {
                continue 'candidates; // zero divisor: reducible modulus
            }
            if pow == 1 {
                order = step;
                break;
            }
        }
        if order == q - 1 {
            return lower;
        }
    }
    unreachable!("a primitive polynomial exists for every prime power");
}

impl Field {
    pub fn new(q: usize) -> Result<Self> {
        if q > 256 {
            return Err(Error::NotPrimePower(q));
        }
        let (p, degree) = factor_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let mul_fn: Box<dyn Fn(usize, usize) -> usize> = if degree == 1 {
            Box::new(move |a, b| (a * b) % p)
        } else {
            let modulus = primitive_polynomial(p, degree);
            Box::new(move |a, b| poly_mul(p, degree, &modulus, a, b))
        };
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = mul_fn(a, b) as u8;
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                    break;
                }
            }
        }
        let mut neg = vec![0u8; q];
        for (a, slot) in neg.iter_mut().enumerate() {
            // additive inverse, digitwise mod p
            let d = digits(p, degree.max(1), a);
            let nd: Vec<usize> = d.iter().map(|&c| (p - c) % p).collect();
            *slot = from_digits(p, &nd) as u8;
        }
        Ok(Field { q, p, degree, tables: Arc::new(Tables { mul, inv, neg }) })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        if self.degree == 1 {
            ((a as usize + b as usize) % self.p) as u8
        } else if self.p == 2 {
            a ^ b
        } else {
            let da = digits(self.p, self.degree, a as usize);
            let db = digits(self.p, self.degree, b as usize);
            let sum: Vec<usize> =
                da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
            from_digits(self.p, &sum) as u8
        }
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.tables.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.tables.neg[a as usize]
    }

    /// Multiplicative inverse; `inv(0)` is undefined and returns 0.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.tables.inv[a as usize]
    }

    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    /// Evaluate a polynomial (coefficients low to high) at `x`.
    pub fn poly_eval(&self, coeffs: &[u8], x: u8) -> u8 {
        let mut acc = 0u8;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }
}

/// A Reed-Solomon code with parameters [n, k, n-k+1] over a small field,
/// evaluated at the points 0..n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdsCode {
    pub field: Field,
    pub n: usize,
    pub k: usize,
}

/// Brute-force decoding is used up to this length; Berlekamp-Welch above.
const BRUTE_FORCE_MAX_N: usize = 8;

impl MdsCode {
    pub fn new(field: Field, n: usize, k: usize) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::ParameterOutOfRange(format!("[{n},{k}] code")));
        }
        if n > field.order() {
            return Err(Error::SuggestedMinimumField { needed: n, have: field.order() });
        }
        Ok(MdsCode { field, n, k })
    }

    pub fn min_distance(&self) -> usize {
        self.n - self.k + 1
    }

    /// Number of correctable symbol errors.
    pub fn radius(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: message.len() });
        }
        Ok((0..self.n).map(|x| self.field.poly_eval(message, x as u8)).collect())
    }

    /// Decode to the unique message whose codeword lies within the error
    /// radius of `received`, or report failure.
    pub fn decode(&self, received: &[u8]) -> Result<Vec<u8>> {
        if received.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: received.len() });
        }
        let messages = (self.field.order() as u128).checked_pow(self.k as u32);
        if self.n <= BRUTE_FORCE_MAX_N && messages.is_some_and(|m| m <= 5_000_000) {
            self.decode_nearest(received)
        } else {
            self.decode_berlekamp_welch(received)
        }
    }

    /// Exhaustive nearest-codeword decoding.
    pub fn decode_nearest(&self, received: &[u8]) -> Result<Vec<u8>> {
        let q = self.field.order();
        let total = crate::util::tuple_count(q, self.k);
        let mut best: Option<(usize, Vec<u8>)> = None;
        for idx in 0..total {
            let msg = crate::util::tuple_at(q, self.k, idx);
            let cw = self.encode(&msg)?;
            let d = crate::util::hamming(&cw, received);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, msg));
                if d == 0 {
                    break;
                }
            }
        }
        match best {
            Some((d, msg)) if d <= self.radius() => Ok(msg),
            _ => Err(Error::DecodeFailure),
        }
    }

    /// Berlekamp-Welch decoding: solve for an error locator E (monic,
    /// degree e) and Q = message * E (degree < k + e) with
    /// Q(x_i) = y_i E(x_i), then recover the message as Q / E.
    pub fn decode_berlekamp_welch(&self, received: &[u8]) -> Result<Vec<u8>> {
        let f = &self.field;
        let e = self.radius();
        let qcols = self.k + e;
        let cols = qcols + e; // Q coefficients, then E lower coefficients
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(self.n);
        for (i, &y) in received.iter().enumerate() {
            let x = i as u8;
            let mut row = vec![0u8; cols + 1];
            let mut xp = 1u8;
            for slot in row.iter_mut().take(qcols) {
                *slot = xp;
                xp = f.mul(xp, x);
            }
            let mut xp = 1u8;
            for l in 0..e {
                row[qcols + l] = f.neg(f.mul(y, xp));
                xp = f.mul(xp, x);
            }
            // rhs: y * x^e
            let mut xe = 1u8;
            for _ in 0..e {
                xe = f.mul(xe, x);
            }
            row[cols] = f.mul(y, xe);
            rows.push(row);
        }
        let solution = solve(f, &mut rows, cols).ok_or(Error::DecodeFailure)?;
        let q_poly = &solution[..qcols];
        let mut e_poly = solution[qcols..].to_vec();
        e_poly.push(1); // monic

        let msg_poly = poly_div_exact(f, q_poly, &e_poly).ok_or(Error::DecodeFailure)?;
        if msg_poly.len() > self.k {
            return Err(Error::DecodeFailure);
        }
        let mut msg = msg_poly;
        msg.resize(self.k, 0);
        let cw = self.encode(&msg)?;
        if crate::util::hamming(&cw, received) <= self.radius() {
            Ok(msg)
        } else {
            Err(Error::DecodeFailure)
        }
    }
}

/// Gaussian elimination over the field; `rows` are augmented. Returns one
/// solution of a consistent system (free variables set to 0).
#[allow(clippy::needless_range_loop)]
fn solve(f: &Field, rows: &mut [Vec<u8>], cols: usize) -> Option<Vec<u8>> {
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][c]);
        for j in c..=cols {
            let scaled = f.mul(rows[r][j], inv);
            rows[r][j] = scaled;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in c..=cols {
                    let sub = f.mul(factor, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], sub);
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    // inconsistent if a zero row has nonzero rhs
    for row in rows[r..].iter() {
        if row[cols] != 0 {
            return None;
        }
    }
    let mut sol = vec![0u8; cols];
    for c in 0..cols {
        if pivot_of_col[c] != usize::MAX {
            sol[c] = rows[pivot_of_col[c]][cols];
        }
    }
    Some(sol)
}

/// Divide polynomials exactly; None when the remainder is nonzero or the
/// divisor is zero. Coefficients are low to high.
fn poly_div_exact(f: &Field, num: &[u8], den: &[u8]) -> Option<Vec<u8>> {
    let mut num: Vec<u8> = num.to_vec();
    while num.last() == Some(&0) {
        num.pop();
    }
    let mut den: Vec<u8> = den.to_vec();
    while den.last() == Some(&0) {
        den.pop();
    }
    if den.is_empty() {
        return None;
    }
    if num.is_empty() {
        return Some(vec![0]);
    }
    if num.len() < den.len() {
        return None;
    }
    let mut quot = vec![0u8; num.len() - den.len() + 1];
    let lead_inv = f.inv(*den.last().unwrap());
    for i in (0..quot.len()).rev() {
        let coeff = f.mul(num[i + den.len() - 1], lead_inv);
        quot[i] = coeff;
        if coeff == 0 {
            continue;
        }
        for (j, &d) in den.iter().enumerate() {
            let sub = f.mul(coeff, d);
            num[i + j] = f.sub(num[i + j], sub);
        }
    }
    if num.iter().any(|&c| c != 0) {
        return None;
    }
    Some(quot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{for_each_subset, tuple_at, tuple_count};

    #[test]
    fn gf2_addition() {
        let f = Field::new(2).unwrap();
        assert_eq!(f.add(1, 1), 0);
    }

    #[test]
    fn gf5_inverse() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.inv(2), 3);
        assert_eq!(f.mul(2, 3), 1);
    }

    #[test]
    fn gf4_polynomial_basis() {
        // x * x = x + 1 under x^2 + x + 1; x encodes as 2, x + 1 as 3
        let f = Field::new(4).unwrap();
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert!(matches!(Field::new(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(Field::new(1), Err(Error::NotPrimePower(1))));
        assert!(matches!(Field::new(257), Err(Error::NotPrimePower(257))));
    }

    fn field_laws(q: usize) {
        let f = Field::new(q).unwrap();
        for a in 0..q as u8 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1, "inverse of {a} in GF({q})");
            }
            for b in 0..q as u8 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q as u8 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_laws_small_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27] {
            field_laws(q);
        }
    }

    #[test]
    fn repetition_code_over_gf3() {
        let code = MdsCode::new(Field::new(3).unwrap(), 3, 1).unwrap();
        assert_eq!(code.encode(&[2]).unwrap(), vec![2, 2, 2]);
        assert_eq!(code.decode(&[2, 0, 2]).unwrap(), vec![2]);
    }

    /// Exhaustive error injection: every pattern of up to `radius` errors is
    /// corrected, for every message.
    fn assert_corrects_all(code: &MdsCode) {
        let q = code.field.order();
        let radius = code.radius();
        for m in 0..tuple_count(q, code.k) {
            let msg = tuple_at(q, code.k, m);
            let cw = code.encode(&msg).unwrap();
            for wt in 0..=radius {
                for_each_subset(code.n, wt, |positions| {
                    let mut vals = vec![0u8; wt];
                    loop {
                        let mut word = cw.clone();
                        for (i, &pos) in positions.iter().enumerate() {
                            word[pos] = vals[i];
                        }
                        assert_eq!(
                            code.decode(&word).unwrap(),
                            msg,
                            "[{},{}] over GF({q}): {word:?}",
                            code.n,
                            code.k
                        );
                        // next value assignment
                        let mut i = 0;
                        loop {
                            if i == wt {
                                return;
                            }
                            vals[i] += 1;
                            if (vals[i] as usize) < q {
                                break;
                            }
                            vals[i] = 0;
                            i += 1;
                        }
                    }
                });
            }
        }
    }

    #[test]
    fn corrects_two_errors_6_2_gf7() {
        let code = MdsCode::new(Field::new(7).unwrap(), 6, 2).unwrap();
        assert_eq!(code.radius(), 2);
        assert_corrects_all(&code);
    }

    #[test]
    fn corrects_two_errors_5_1_gf7() {
        let code = MdsCode::new(Field::new(7).unwrap(), 5, 1).unwrap();
        assert_eq!(code.radius(), 2);
        assert_corrects_all(&code);
    }

    /// The MDS property, checked as minimum weight over all nonzero
    /// codewords (the code is linear, so this equals the minimum distance).
    #[test]
    fn mds_distance_small_cases() {
        for q in [2usize, 3, 4, 5, 7, 8] {
            let f = Field::new(q).unwrap();
            for n in 1..=8.min(q) {
                for k in 1..=n {
                    let code = MdsCode::new(f.clone(), n, k).unwrap();
                    let mut min_wt = usize::MAX;
                    for m in 1..tuple_count(q, k) {
                        let msg = tuple_at(q, k, m);
                        let wt = code
                            .encode(&msg)
                            .unwrap()
                            .iter()
                            .filter(|&&s| s != 0)
                            .count();
                        min_wt = min_wt.min(wt);
                    }
                    if k < n || k > 0 {
                        assert_eq!(
                            min_wt,
                            n - k + 1,
                            "[{n},{k}] over GF({q}) is not MDS"
                        );
                    }
                }
            }
        }
    }

    /// Both decoders agree wherever the brute-force one is defined.
    #[test]
    fn decoders_agree_on_overlap() {
        for (q, n, k) in [(7usize, 6usize, 2usize), (5, 5, 1), (8, 7, 3), (7, 7, 3)] {
            let code = MdsCode::new(Field::new(q).unwrap(), n, k).unwrap();
            // every word of a thinned sweep over the whole space
            let total = tuple_count(q, n);
            let step = (total / 2000).max(1);
            let mut idx = 0u128;
            while idx < total {
                let word = tuple_at(q, n, idx);
                let brute = code.decode_nearest(&word);
                let bw = code.decode_berlekamp_welch(&word);
                match (&brute, &bw) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "{word:?}"),
                    (Err(_), Err(_)) => {}
                    _ => panic!("decoders disagree on {word:?}: {brute:?} vs {bw:?}"),
                }
                idx += step;
            }
        }
    }

    #[test]
    fn berlekamp_welch_large_length() {
        // [11,5] over GF(11) corrects 3 errors; spot-check around random-ish words
        let code = MdsCode::new(Field::new(11).unwrap(), 11, 5).unwrap();
        assert_eq!(code.radius(), 3);
        let msg = vec![3, 1, 4, 1, 5];
        let cw = code.encode(&msg).unwrap();
        let mut word = cw.clone();
        word[0] = (word[0] + 1) % 11;
        word[5] = (word[5] + 7) % 11;
        word[10] = (word[10] + 3) % 11;
        assert_eq!(code.decode(&word).unwrap(), msg);
        word[1] = (word[1] + 2) % 11;
        assert!(code.decode(&word).is_err() || code.decode(&word).is_ok());
    }
}

//! Bit strings, bit matrices and binary linear codes.
//!
//! Bit `i` of a [`BitString`] is the `i`-th character of its textual form
//! (`"0110"` has bit 1 and bit 2 set). Internally bits are packed
//! little-endian into `u64` words so Hamming distances reduce to popcounts.
//!
//! Codes are kept in systematic form `G = [I_k | P]`, `H = [Pᵀ | I_{n-k}]`.
//! The first `k` coordinates of a codeword are its message coordinates and
//! the coset of `x` is identified by its syndrome `H·xᵀ`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        s.clear_padding();
        s
    }

    /// Standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut s = Self::zeros(len);
        s.set(i, true);
        s
    }

    /// Bit `i` of the result is bit `i` of `value`; `len` may not exceed 64.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut s = Self {
            len,
            words: if len == 0 { vec![] } else { vec![value] },
        };
        s.clear_padding();
        s
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Parses a string over `{0,1}`.
    pub fn parse_binary(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty bit string".into()));
        }
        let mut s = Self::zeros(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => s.set(i, true),
                other => return Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(s)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self {
            len,
            words: (0..words_for(len)).map(|_| rng.gen()).collect(),
        };
        s.clear_padding();
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * WORD + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_assign_unchecked(other);
        Ok(out)
    }

    /// In-place XOR; panics on a length mismatch.
    pub fn xor_assign_unchecked(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = Self::zeros(len);
        let shift = start % WORD;
        for (j, word) in out.words.iter_mut().enumerate() {
            let w = start / WORD + j;
            let mut v = self.words[w] >> shift;
            if shift > 0 && w + 1 < self.words.len() {
                v |= self.words[w + 1] << (WORD - shift);
            }
            *word = v;
        }
        out.clear_padding();
        out
    }

    pub fn concat(&self, tail: &Self) -> Self {
        let mut out = Self::zeros(self.len + tail.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let shift = self.len % WORD;
        for (j, &t) in tail.words.iter().enumerate() {
            let w = self.len / WORD + j;
            out.words[w] |= t << shift;
            if shift > 0 && w + 1 < out.words.len() {
                out.words[w + 1] |= t >> (WORD - shift);
            }
        }
        out
    }

    /// Hex form: bits are read in order, four per digit, most significant
    /// bit of each digit first; the final digit is zero padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for j in 0..4 {
                let i = chunk * 4 + j;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> j;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(text: &str, len: usize) -> Result<Self> {
        let text = text.trim();
        if text.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "hex string of {} digits cannot hold exactly {len} bits",
                text.len()
            )));
        }
        let mut out = Self::zeros(len);
        for (chunk, c) in text.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for j in 0..4 {
                if nibble & (8 >> j) != 0 {
                    let i = chunk * 4 + j;
                    if i >= len {
                        return Err(Error::Parse("nonzero padding bits in hex string".into()));
                    }
                    out.set(i, true);
                }
            }
        }
        Ok(out)
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Serialized as `"<len>:<hex>"` so the length survives a round trip.
impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{}:{}", self.len, self.to_hex()))
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let (len, hex) = text
            .split_once(':')
            .ok_or_else(|| serde::de::Error::custom("expected \"<len>:<hex>\""))?;
        let len: usize = len.parse().map_err(serde::de::Error::custom)?;
        BitString::from_hex(hex, len).map_err(serde::de::Error::custom)
    }
}

pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<usize> {
    x.hamming_distance(y)
}

pub fn xor(x: &BitString, y: &BitString) -> Result<BitString> {
    x.xor(y)
}

/// Dense binary matrix stored as rows.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: Vec<BitString>,
    cols: usize,
}

impl BitMatrix {
    pub fn new(rows: Vec<BitString>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: cols,
            });
        }
        Ok(Self { rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitString::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            rows: (0..size).map(|i| BitString::unit(size, i)).collect(),
            cols: size,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            rows: (0..rows).map(|_| BitString::random(cols, rng)).collect(),
            cols,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.support() {
                out.set(c, r, true);
            }
        }
        out
    }

    /// `M·v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: self.cols,
            });
        }
        let mut out = BitString::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Rank over GF(2) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign_unchecked(&pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon form of `[M | rhs]`: the reduced rows, their
    /// pivot columns, and whether the system is consistent.
    fn eliminate(&self, rhs: &BitString) -> Result<(Vec<BitString>, Vec<usize>, bool)> {
        if rhs.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: rhs.len(),
                right: self.rows.len(),
            });
        }
        // Augment with the right-hand side as an extra column.
        let mut rows: Vec<BitString> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = r.concat(&BitString::zeros(1));
                a.set(self.cols, rhs.get(i));
                a
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign_unchecked(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let consistent = !rows[rank..].iter().any(|r| r.get(self.cols));
        Ok((rows, pivots, consistent))
    }

    /// Solves `M·u = rhs`. Returns a particular solution and a basis of the
    /// kernel, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &BitString) -> Result<Option<(BitString, Vec<BitString>)>> {
        let (rows, pivots, consistent) = self.eliminate(rhs)?;
        if !consistent {
            return Ok(None);
        }
        let mut particular = BitString::zeros(self.cols);
        for (r, &col) in pivots.iter().enumerate() {
            particular.set(col, rows[r].get(self.cols));
        }
        let mut is_pivot = vec![false; self.cols];
        pivots.iter().for_each(|&c| is_pivot[c] = true);
        let mut kernel = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitString::unit(self.cols, free);
            for (r, &col) in pivots.iter().enumerate() {
                if rows[r].get(free) {
                    v.set(col, true);
                }
            }
            kernel.push(v);
        }
        Ok(Some((particular, kernel)))
    }

    /// A uniformly random solution of `M·u = rhs`, or `None` if there is
    /// none. Free coordinates are drawn at random and each pivot coordinate
    /// is then fixed by its reduced row.
    pub fn solve_random<R: Rng + ?Sized>(&self, rhs: &BitString, rng: &mut R) -> Result<Option<BitString>> {
        let (rows, pivots, consistent) = self.eliminate(rhs)?;
        if !consistent {
            return Ok(None);
        }
        let mut u = BitString::random(self.cols, rng);
        for &col in &pivots {
            u.set(col, false);
        }
        // Reduced rows have no other pivot column, so each pivot only
        // depends on the free coordinates.
        let fixed: Vec<bool> = rows[..pivots.len()]
            .iter()
            .map(|row| row.get(self.cols) ^ row.slice(0, self.cols).dot(&u).unwrap())
            .collect();
        for (&col, bit) in pivots.iter().zip(fixed) {
            u.set(col, bit);
        }
        Ok(Some(u))
    }

    /// Text form: a `"rows cols"` header followed by one row of `0`/`1`
    /// characters per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows.len(), self.cols);
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing \"rows cols\" header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [nrows, ncols] = dims[..] else {
            return Err(Error::Parse(format!("header {header:?} must hold two numbers")));
        };
        let rows = lines
            .map(BitString::parse_binary)
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != nrows {
            return Err(Error::Parse(format!(
                "header announces {nrows} rows, found {}",
                rows.len()
            )));
        }
        Self::new(rows, ncols)
    }
}

/// Identifies a coset of a code by its syndrome.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct CosetId {
    pub syndrome: BitString,
}

impl CosetId {
    pub fn new(syndrome: BitString) -> Self {
        Self { syndrome }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Distance {
    pub value: usize,
    /// `true` when established by exhaustive enumeration.
    pub verified: bool,
}

/// Largest dimension for which the minimum distance is computed exactly.
pub const MAX_EXACT_DISTANCE_K: usize = 24;

/// Binary linear `[n, k]` code in systematic form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    /// Rows of `P`: `k` strings of length `n - k`.
    redundancy: Vec<BitString>,
    distance: Option<Distance>,
}

impl LinearCode {
    /// Builds the code generated by `[I_k | P]`.
    pub fn from_systematic(n: usize, redundancy: Vec<BitString>) -> Result<Self> {
        let k = redundancy.len();
        if k == 0 || k > n {
            return Err(invalid(format!("code dimension {k} must lie in 1..={n}")));
        }
        if let Some(bad) = redundancy.iter().find(|r| r.len() != n - k) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: n - k,
            });
        }
        Ok(Self {
            n,
            k,
            redundancy,
            distance: None,
        })
    }

    /// Row-reduces an arbitrary full-rank generator matrix to `[I_k | P]`.
    /// Fails if the first `k` columns are not an information set, since a
    /// column permutation would change the code.
    pub fn from_generator(gen: &BitMatrix) -> Result<Self> {
        let k = gen.num_rows();
        let n = gen.num_cols();
        if k == 0 || k > n {
            return Err(invalid(format!("generator must have 1..={n} rows, got {k}")));
        }
        let mut rows = gen.rows().to_vec();
        for col in 0..k {
            let pivot = (col..k).find(|&r| rows[r].get(col)).ok_or_else(|| {
                invalid("generator is rank deficient or not reducible to systematic form [I_k | P]")
            })?;
            rows.swap(col, pivot);
            let pivot_row = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && row.get(col) {
                    row.xor_assign_unchecked(&pivot_row);
                }
            }
        }
        let redundancy = rows.iter().map(|r| r.slice(k, n - k)).collect();
        Self::from_systematic(n, redundancy)
    }

    /// The `[7,4,3]` Hamming code with `P` rows `110, 011, 111, 101`.
    pub fn hamming_7_4() -> Self {
        let redundancy = ["110", "011", "111", "101"]
            .iter()
            .map(|r| BitString::parse_binary(r).unwrap())
            .collect();
        let mut code = Self::from_systematic(7, redundancy).unwrap();
        code.distance = Some(Distance {
            value: 3,
            verified: true,
        });
        code
    }

    pub fn repetition(n: usize) -> Result<Self> {
        Self::from_systematic(n, vec![BitString::ones(n - 1)])
    }

    pub fn full_space(n: usize) -> Result<Self> {
        Self::from_systematic(n, vec![BitString::zeros(0); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn redundancy(&self) -> &[BitString] {
        &self.redundancy
    }

    pub fn distance(&self) -> Option<Distance> {
        self.distance
    }

    pub fn set_distance(&mut self, distance: Option<Distance>) {
        self.distance = distance;
    }

    /// Computes the exact distance (for `k ≤ 24`) and records it.
    pub fn verify_distance(&mut self) -> Result<usize> {
        let d = self.min_distance_exact()?;
        self.distance = Some(Distance {
            value: d,
            verified: true,
        });
        Ok(d)
    }

    pub fn generator(&self) -> BitMatrix {
        let rows = (0..self.k)
            .map(|i| BitString::unit(self.k, i).concat(&self.redundancy[i]))
            .collect();
        BitMatrix::new(rows, self.n).unwrap()
    }

    pub fn parity_check(&self) -> BitMatrix {
        let r = self.n - self.k;
        let rows = (0..r)
            .map(|j| {
                let mut row = BitString::zeros(self.n);
                for (i, p) in self.redundancy.iter().enumerate() {
                    if p.get(j) {
                        row.set(i, true);
                    }
                }
                row.set(self.k + j, true);
                row
            })
            .collect();
        BitMatrix::new(rows, self.n).unwrap()
    }

    fn check_n(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        Ok(())
    }

    /// `u·G = u ‖ u·P`.
    pub fn encode(&self, u: &BitString) -> Result<BitString> {
        if u.len() != self.k {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: self.k,
            });
        }
        Ok(u.concat(&self.redundancy_of(u)))
    }

    fn redundancy_of(&self, u: &BitString) -> BitString {
        let mut acc = BitString::zeros(self.n - self.k);
        for i in u.support() {
            acc.xor_assign_unchecked(&self.redundancy[i]);
        }
        acc
    }

    /// `H·xᵀ`, computed as `x[k..] ⊕ x[..k]·P`.
    pub fn syndrome(&self, x: &BitString) -> Result<CosetId> {
        self.check_n(x)?;
        let mut s = x.slice(self.k, self.n - self.k);
        s.xor_assign_unchecked(&self.redundancy_of(&x.slice(0, self.k)));
        Ok(CosetId::new(s))
    }

    pub fn contains(&self, x: &BitString) -> Result<bool> {
        Ok(self.syndrome(x)?.syndrome.is_zero())
    }

    /// The systematic (message) coordinates `x[..k]`.
    pub fn message_coordinates(&self, x: &BitString) -> Result<BitString> {
        self.check_n(x)?;
        Ok(x.slice(0, self.k))
    }

    /// Fixed representative of a coset: the syndrome in the check positions
    /// and zeros in the message positions.
    pub fn coset_representative(&self, id: &CosetId) -> Result<BitString> {
        if id.syndrome.len() != self.n - self.k {
            return Err(Error::LengthMismatch {
                left: id.syndrome.len(),
                right: self.n - self.k,
            });
        }
        Ok(BitString::zeros(self.k).concat(&id.syndrome))
    }

    pub fn random_coset<R: Rng + ?Sized>(&self, rng: &mut R) -> CosetId {
        CosetId::new(BitString::random(self.n - self.k, rng))
    }

    /// Minimum weight over the `2^k - 1` nonzero codewords, visited in Gray
    /// code order so each step costs a single row XOR.
    pub fn min_distance_exact(&self) -> Result<usize> {
        if self.k > MAX_EXACT_DISTANCE_K {
            return Err(Error::TooLarge(format!(
                "exact distance needs k <= {MAX_EXACT_DISTANCE_K}, code has k = {}",
                self.k
            )));
        }
        let gen = self.generator();
        let mut word = BitString::zeros(self.n);
        let mut best = usize::MAX;
        for step in 1u64..(1u64 << self.k) {
            let flip = step.trailing_zeros() as usize;
            word.xor_assign_unchecked(gen.row(flip));
            best = best.min(word.weight());
        }
        Ok(best)
    }

    /// Code file format: `"n k"` header then `k` generator rows.
    pub fn to_text(&self) -> String {
        let gen = self.generator();
        let mut out = format!("{} {}\n", self.n, self.k);
        for row in gen.rows() {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the code file format. The exact distance is computed on load
    /// when `k ≤ 24`.
    pub fn from_text(text: &str) -> Result<Self> {
        // Same layout as a matrix file, but the header is "n k" (cols, rows).
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing \"n k\" header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [n, k] = dims[..] else {
            return Err(Error::Parse(format!("header {header:?} must hold two numbers")));
        };
        let rows = lines
            .map(BitString::parse_binary)
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != k {
            return Err(Error::Parse(format!("header announces {k} rows, found {}", rows.len())));
        }
        let gen = BitMatrix::new(rows, n)?;
        let mut code = Self::from_generator(&gen)?;
        if code.k <= MAX_EXACT_DISTANCE_K {
            code.verify_distance()?;
        }
        Ok(code)
    }
}

/// Draws random systematic codes until one reaches `target_d`.
///
/// For `k ≤ 24` every candidate's distance is checked exactly and the first
/// one meeting the target is returned. Larger codes cannot be checked; the
/// first draw is returned with `target_d` recorded as an unverified design
/// distance.
pub fn random_linear_code<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    target_d: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(invalid(format!("code dimension {k} must lie in 1..={n}")));
    }
    let draw = |rng: &mut R| {
        let redundancy = (0..k).map(|_| BitString::random(n - k, rng)).collect();
        LinearCode::from_systematic(n, redundancy)
    };
    if k > MAX_EXACT_DISTANCE_K {
        let mut code = draw(rng)?;
        code.distance = Some(Distance {
            value: target_d,
            verified: false,
        });
        return Ok(code);
    }
    let mut best = 0;
    for _ in 0..max_attempts.max(1) {
        let mut code = draw(rng)?;
        let d = code.verify_distance()?;
        if d >= target_d {
            return Ok(code);
        }
        best = best.max(d);
    }
    Err(Error::RetryBudgetExhausted {
        attempts: max_attempts.max(1),
        best,
    })
}

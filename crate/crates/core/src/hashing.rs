//! Balanced 2-universal hashing from codewords to messages.
//!
//! A seed is a full-rank `m×k` matrix `T`; a codeword hashes to `T·u` where
//! `u` holds its `k` message coordinates. Full rank makes every digest have
//! exactly `2^{k-m}` preimages, and a uniform full-rank `T` sends any fixed
//! nonzero difference to zero with probability below `2^{-m}`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMatrix, BitString, LinearCode};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HashSeed {
    matrix: BitMatrix,
}

impl HashSeed {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        if matrix.num_rows() > matrix.num_cols() || matrix.rank() != matrix.num_rows() {
            return Err(invalid(format!(
                "hash seed must be a full-rank m x k matrix with m <= k (got {}x{}, rank {})",
                matrix.num_rows(),
                matrix.num_cols(),
                matrix.rank()
            )));
        }
        Ok(Self { matrix })
    }

    /// Digest length.
    pub fn m(&self) -> usize {
        self.matrix.num_rows()
    }

    /// Number of message coordinates consumed.
    pub fn k(&self) -> usize {
        self.matrix.num_cols()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn to_text(&self) -> String {
        self.matrix.to_text()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::new(BitMatrix::from_text(text)?)
    }

    fn check_code(&self, code: &LinearCode) -> Result<()> {
        if code.k() != self.k() {
            return Err(Error::LengthMismatch {
                left: self.k(),
                right: code.k(),
            });
        }
        Ok(())
    }
}

/// Uniform full-rank `m×k` matrix by rejection.
pub fn sample_seed<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Result<HashSeed> {
    if m > k {
        return Err(invalid(format!("digest length {m} exceeds message coordinates {k}")));
    }
    if m == 0 {
        return Err(invalid("digest length must be at least 1"));
    }
    loop {
        let candidate = BitMatrix::random(m, k, rng);
        if candidate.rank() == m {
            return Ok(HashSeed { matrix: candidate });
        }
    }
}

pub fn hash(seed: &HashSeed, code: &LinearCode, c: &BitString) -> Result<BitString> {
    seed.check_code(code)?;
    if !code.contains(c)? {
        return Err(Error::NotACodeword);
    }
    seed.matrix.mul_vec(&code.message_coordinates(c)?)
}

/// Uniform codeword with digest `digest`.
pub fn preimage_sample<R: Rng + ?Sized>(
    seed: &HashSeed,
    code: &LinearCode,
    digest: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    seed.check_code(code)?;
    let u = seed
        .matrix
        .solve_random(digest, rng)?
        .expect("full-rank seed is surjective");
    code.encode(&u)
}

/// Hash of `c' - x_{C'}` for `c'` in the coset represented by `representative`.
pub fn shifted_hash(
    seed: &HashSeed,
    code: &LinearCode,
    representative: &BitString,
    c_in_coset: &BitString,
) -> Result<BitString> {
    if code.syndrome(representative)? != code.syndrome(c_in_coset)? {
        return Err(Error::SyndromeMismatch);
    }
    hash(seed, code, &c_in_coset.xor(representative)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    /// Preimage size of each digest, indexed by the digest as an integer.
    pub preimage_sizes: Vec<usize>,
    pub balanced: bool,
}

pub const MAX_BALANCE_K: usize = 20;

/// Counts preimages of every digest by enumerating the code. Takes a bare
/// matrix so rank-deficient maps can be inspected too.
pub fn verify_balanced(matrix: &BitMatrix, code: &LinearCode) -> Result<BalanceReport> {
    let k = code.k();
    if k > MAX_BALANCE_K {
        return Err(Error::TooLarge(format!(
            "balance check enumerates 2^k codewords; k = {k} exceeds {MAX_BALANCE_K}"
        )));
    }
    if matrix.num_cols() != k {
        return Err(Error::LengthMismatch {
            left: matrix.num_cols(),
            right: k,
        });
    }
    let m = matrix.num_rows();
    if m > 24 {
        return Err(Error::TooLarge(format!("digest length {m} too large to tabulate")));
    }
    let mut sizes = vec![0usize; 1 << m];
    for u in 0..1u64 << k {
        let c = code.encode(&BitString::from_u64(u, k))?;
        let digest = matrix.mul_vec(&code.message_coordinates(&c)?)?;
        sizes[digest.to_u64().unwrap() as usize] += 1;
    }
    let balanced = sizes.iter().all(|&s| s == sizes[0]);
    Ok(BalanceReport {
        preimage_sizes: sizes,
        balanced,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionEstimate {
    /// Largest empirical collision rate over the sampled pairs.
    pub max_rate: f64,
    /// Standard error of a rate equal to `2^{-m}` at this trial count.
    pub standard_error: f64,
    pub pairs: usize,
    pub trials: usize,
}

const COLLISION_PAIRS: usize = 8;

/// Empirical `Pr[T·u1 = T·u2]` over fresh full-rank seeds, for a handful of
/// fixed message pairs `u1 ≠ u2`.
pub fn estimate_collision_probability<R: Rng + ?Sized>(
    k: usize,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<CollisionEstimate> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    // A collision depends only on the difference u1 ⊕ u2.
    let differences: Vec<BitString> = (0..COLLISION_PAIRS)
        .map(|_| loop {
            let d = BitString::random(k, rng);
            if !d.is_zero() {
                break d;
            }
        })
        .collect();
    let mut hits = vec![0usize; differences.len()];
    for _ in 0..trials {
        let seed = sample_seed(k, m, rng)?;
        for (h, d) in hits.iter_mut().zip(&differences) {
            if seed.matrix.mul_vec(d)?.is_zero() {
                *h += 1;
            }
        }
    }
    let max_hits = *hits.iter().max().unwrap();
    let bound = (-(m as f64)).exp2();
    Ok(CollisionEstimate {
        max_rate: max_hits as f64 / trials as f64,
        standard_error: (bound * (1.0 - bound) / trials as f64).sqrt(),
        pairs: differences.len(),
        trials,
    })
}

/// Exact fraction of full-rank `m×k` matrices that annihilate `difference`,
/// by enumerating all `2^{mk}` matrices.
pub fn exact_collision_fraction(m: usize, difference: &BitString) -> Result<f64> {
    let k = difference.len();
    if m * k > 24 {
        return Err(Error::TooLarge(format!(
            "enumerating 2^{} matrices is too many",
            m * k
        )));
    }
    let mut full_rank = 0u64;
    let mut collide = 0u64;
    for bits in 0..1u64 << (m * k) {
        let rows = (0..m)
            .map(|r| BitString::from_u64((bits >> (r * k)) & ((1 << k) - 1), k))
            .collect();
        let t = BitMatrix::new(rows, k)?;
        if t.rank() != m {
            continue;
        }
        full_rank += 1;
        if t.mul_vec(difference)?.is_zero() {
            collide += 1;
        }
    }
    Ok(collide as f64 / full_rank as f64)
}

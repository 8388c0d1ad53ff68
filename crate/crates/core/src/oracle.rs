//! Brute-force ground truth for the combinatorial and entropic claims.
//!
//! Everything here enumerates. Counting uses its own window predicate and
//! plain integer arithmetic rather than the helpers in `channel`, so the
//! two can be compared.

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::lemma2_bound;
use crate::channel::BobChannel;
use crate::error::{invalid, Error, Result};
use crate::gf2::{BitString, LinearCode};
use crate::hashing::HashSeed;

const MAX_INTERSECTION_N: usize = 20;

/// Inclusive real-valued window `n(p−ε) ≤ d ≤ n(p+ε)` with the same
/// relative slack as the protocol.
fn in_window(d: u32, n: usize, p: f64, eps: f64) -> bool {
    let nf = n as f64;
    let slack = 1e-9 * nf;
    let d = d as f64;
    d >= nf * (p - eps) - slack && d <= nf * (p + eps) + slack
}

fn as_word(x: &BitString) -> u32 {
    x.to_u64().expect("short string") as u32
}

/// `|T(x) ∩ T(y)|` by testing all `2^n` strings.
pub fn typical_intersection_exact(p: f64, eps: f64, x: &BitString, y: &BitString) -> Result<u64> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if n > MAX_INTERSECTION_N {
        return Err(Error::TooLarge(format!(
            "intersection count enumerates 2^n strings; n = {n} exceeds {MAX_INTERSECTION_N}"
        )));
    }
    let (xw, yw) = (as_word(x), as_word(y));
    Ok((0u32..1 << n)
        .into_par_iter()
        .filter(|z| {
            in_window((z ^ xw).count_ones(), n, p, eps) && in_window((z ^ yw).count_ones(), n, p, eps)
        })
        .count() as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Row {
    pub weight: usize,
    /// Half the relative distance, `weight / 2n`.
    pub sigma: f64,
    pub exact: u64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub n: usize,
    pub p: f64,
    pub eps: f64,
    pub rows: Vec<Lemma2Row>,
    /// Largest `exact / bound` over rows with a nonzero bound.
    pub max_ratio: f64,
    /// First weight that breaks the bound or the empty-intersection case.
    pub witness: Option<usize>,
}

impl Lemma2Report {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

const MAX_LEMMA2_N: usize = 16;

/// Checks the intersection bound at every distance. By translation
/// invariance `x = 0` and one string of each weight cover all pairs.
pub fn verify_lemma2(n: usize, p: f64, eps: f64) -> Result<Lemma2Report> {
    if n == 0 || n > MAX_LEMMA2_N {
        return Err(Error::TooLarge(format!("verify_lemma2 supports 1 <= n <= {MAX_LEMMA2_N}")));
    }
    let zero = BitString::zeros(n);
    let mut rows = Vec::with_capacity(n + 1);
    let mut witness = None;
    let mut max_ratio: f64 = 0.0;
    for w in 0..=n {
        let y = BitString::from_u64((1u64 << w) - 1, n);
        let exact = typical_intersection_exact(p, eps, &zero, &y)?;
        let sigma = w as f64 / (2 * n) as f64;
        let bound = lemma2_bound(n as f64, p, eps, sigma)?;
        let empty_case = sigma > p + 2.0 * eps;
        if (exact as f64 > bound || (empty_case && exact != 0)) && witness.is_none() {
            witness = Some(w);
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(exact as f64 / bound);
        }
        rows.push(Lemma2Row {
            weight: w,
            sigma,
            exact,
            bound,
        });
    }
    Ok(Lemma2Report {
        n,
        p,
        eps,
        rows,
        max_ratio,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixBReport {
    pub n: usize,
    pub p: f64,
    pub eps: f64,
    /// Min-entropy of the clipped law for input `0`.
    pub min_entropy: f64,
    /// `n(h(p) − ε·log₂((1−p)/p))`.
    pub floor: f64,
    /// GTD between the clipped law and the BSC law for input `0`.
    pub gtd: f64,
    /// Conditional min-entropy of the clipped joint with uniform input,
    /// when the pair enumeration is affordable.
    pub cond_min_entropy: Option<f64>,
}

const MAX_APPENDIX_B_N: usize = 16;
const MAX_PAIR_ENUMERATION_N: usize = 14;

/// Clips the BSC output law to the typical set and measures what the
/// clipping costs and buys.
pub fn appendix_b_construction(n: usize, p: f64, eps: f64) -> Result<AppendixBReport> {
    if n == 0 || n > MAX_APPENDIX_B_N {
        return Err(Error::TooLarge(format!(
            "clipped-law construction supports 1 <= n <= {MAX_APPENDIX_B_N}"
        )));
    }
    if !(p > 0.0 && p < 0.5) || eps < 0.0 {
        return Err(invalid(format!("need p in (0, 1/2) and eps >= 0, got p={p}, eps={eps}")));
    }
    // Law and clipped law as functions of the distance to the input.
    let by_distance: Vec<(f64, f64)> = (0..=n as u32)
        .map(|d| {
            let w = p.powi(d as i32) * (1.0 - p).powi(n as i32 - d as i32);
            (w, if in_window(d, n, p, eps) { w } else { 0.0 })
        })
        .collect();
    let mut l1 = 0.0;
    let mut clipped_total = 0.0;
    let mut clipped_max: f64 = 0.0;
    for z in 0u32..1 << n {
        let (w, q) = by_distance[z.count_ones() as usize];
        l1 += (w - q).abs();
        clipped_total += q;
        clipped_max = clipped_max.max(q);
    }
    let gtd = 0.5 * l1 + 0.5 * (1.0 - clipped_total).abs();
    let min_entropy = -clipped_max.log2();
    let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    let floor = n as f64 * (h - eps * ((1.0 - p) / p).log2());
    let cond_min_entropy = (n <= MAX_PAIR_ENUMERATION_N).then(|| {
        let scale = (-(n as f64)).exp2();
        let guessing: f64 = (0u32..1 << n)
            .into_par_iter()
            .map(|z| {
                (0u32..1 << n)
                    .map(|x| by_distance[(x ^ z).count_ones() as usize].1)
                    .fold(0.0, f64::max)
                    * scale
            })
            .sum();
        -guessing.log2()
    });
    Ok(AppendixBReport {
        n,
        p,
        eps,
        min_entropy,
        floor,
        gtd,
        cond_min_entropy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhlReport {
    /// `E_{C'} E_S ‖P_{f(X),V} − U_M ⊗ P_V‖₁`.
    pub lhs: f64,
    /// `E_{C'} 2·2^{½(log|M| − H_min(X|V))}` with `X` uniform on `C'`.
    pub rhs: f64,
    /// Largest single `(seed, coset)` distance.
    pub worst_term: f64,
    pub seeds: usize,
}

impl LhlReport {
    pub fn passed(&self) -> bool {
        self.lhs <= self.rhs
    }
}

const MAX_LHL_N: usize = 10;
const MAX_LHL_K: usize = 6;

/// Exact leftover-hash comparison over every coset and the given seeds.
pub fn lhl_check(code: &LinearCode, view: &BobChannel, seeds: &[HashSeed]) -> Result<LhlReport> {
    let (n, k) = (code.n(), code.k());
    if n > MAX_LHL_N || k > MAX_LHL_K {
        return Err(Error::TooLarge(format!(
            "leftover-hash check needs n <= {MAX_LHL_N} and k <= {MAX_LHL_K}"
        )));
    }
    if view.n() != n {
        return Err(Error::LengthMismatch {
            left: view.n(),
            right: n,
        });
    }
    let Some(first) = seeds.first() else {
        return Err(invalid("need at least one seed"));
    };
    let m = first.m();
    if seeds.iter().any(|s| s.m() != m || s.k() != k) {
        return Err(invalid("all seeds must be m x k matrices for the same m and k"));
    }
    let views = view.views();
    let digests = 1usize << m;
    let cosets = 1u64 << (n - k);
    let weight = (-(k as f64)).exp2();
    let words: Vec<BitString> = (0..1u64 << k)
        .map(|u| code.encode(&BitString::from_u64(u, k)))
        .collect::<Result<_>>()?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut worst: f64 = 0.0;
    for c in 0..cosets {
        let rep = BitString::zeros(k).concat(&BitString::from_u64(c, n - k));
        let members: Vec<usize> = words
            .iter()
            .map(|w| w.xor(&rep).map(|x| x.to_u64().unwrap() as usize))
            .collect::<Result<_>>()?;
        let mut view_marginal = vec![0.0; views];
        let mut guessing = 0.0;
        for v in 0..views {
            let mut best: f64 = 0.0;
            for &x in &members {
                let q = weight * view.prob(x, v);
                view_marginal[v] += q;
                best = best.max(q);
            }
            guessing += best;
        }
        rhs += 2.0 * (0.5 * (m as f64 + guessing.log2())).exp2();
        for seed in seeds {
            let mut joint = vec![0.0; digests * views];
            for (u, &x) in members.iter().enumerate() {
                // The shift by the representative leaves the message coordinates u.
                let digest = seed
                    .matrix()
                    .mul_vec(&BitString::from_u64(u as u64, k))?
                    .to_u64()
                    .unwrap() as usize;
                for v in 0..views {
                    joint[digest * views + v] += weight * view.prob(x, v);
                }
            }
            let dist: f64 = (0..digests)
                .flat_map(|a| (0..views).map(move |v| (a, v)))
                .map(|(a, v)| (joint[a * views + v] - view_marginal[v] / digests as f64).abs())
                .sum();
            worst = worst.max(dist);
            lhs += dist;
        }
    }
    Ok(LhlReport {
        lhs: lhs / (cosets as f64 * seeds.len() as f64),
        rhs: rhs / cosets as f64,
        worst_term: worst,
        seeds: seeds.len(),
    })
}

const MAX_SEARCH_SUPPORT: usize = 1 << 12;

fn own_gtd(p: &[f64], q: &[f64]) -> f64 {
    let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    let dt = p.iter().sum::<f64>() - q.iter().sum::<f64>();
    0.5 * l1 + 0.5 * dt.abs()
}

/// Best min-entropy found among random subnormalized candidates inside the
/// GTD ball of radius `eps` around `p`.
///
/// Candidates outside the ball are pulled back along the segment towards
/// `p`; distance scales linearly along that segment, so the pulled-back
/// point sits exactly on the sphere.
pub fn smooth_entropy_search<R: Rng + ?Sized>(
    p: &[f64],
    eps: f64,
    proposals: usize,
    rng: &mut R,
) -> Result<f64> {
    if p.is_empty() || p.len() > MAX_SEARCH_SUPPORT {
        return Err(Error::TooLarge(format!(
            "search supports 1..={MAX_SEARCH_SUPPORT} outcomes"
        )));
    }
    if eps < 0.0 {
        return Err(invalid("eps must be non-negative"));
    }
    let len = p.len();
    let pmax = p.iter().copied().fold(0.0, f64::max);
    if pmax <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut best = -pmax.log2();
    let mut q = vec![0.0; len];
    for i in 0..proposals {
        match i % 3 {
            // Fresh random subnormalized law.
            0 => {
                let total: f64 = rng.gen();
                let mut s = 0.0;
                for v in q.iter_mut() {
                    *v = rng.gen::<f64>().powi(2);
                    s += *v;
                }
                q.iter_mut().for_each(|v| *v *= total / s);
            }
            // Random removals from p.
            1 => {
                for (v, &pv) in q.iter_mut().zip(p) {
                    *v = pv * (1.0 - rng.gen::<f64>().powi(4));
                }
            }
            // Cap at a random level, then jitter.
            _ => {
                let level = pmax * rng.gen::<f64>();
                for (v, &pv) in q.iter_mut().zip(p) {
                    *v = (pv.min(level) * (1.0 + 0.01 * (rng.gen::<f64>() - 0.5))).max(0.0);
                }
            }
        }
        let d = own_gtd(p, &q);
        if d > eps {
            let t = eps / d;
            for (v, &pv) in q.iter_mut().zip(p) {
                *v = pv + t * (*v - pv);
            }
        }
        let qmax = q.iter().copied().fold(0.0, f64::max);
        if qmax > 0.0 {
            best = best.max(-qmax.log2());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::sample_seed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn self_intersection_is_the_typical_set() {
        let x = BitString::from_u64(0b1011_0010_1101, 12);
        let exact = typical_intersection_exact(0.25, 0.125, &x, &x).unwrap();
        // Window [1.5, 4.5] at n = 12 holds d = 2, 3, 4.
        assert_eq!(exact, binomial(12, 2) + binomial(12, 3) + binomial(12, 4));
    }

    #[test]
    fn far_pairs_have_empty_intersection() {
        let zero = BitString::zeros(12);
        // σ = 10/24 > 0.25 + 0.125.
        let y = BitString::from_u64((1 << 10) - 1, 12);
        assert_eq!(typical_intersection_exact(0.25, 0.125, &zero, &y).unwrap(), 0);
        let big = BitString::zeros(21);
        assert!(typical_intersection_exact(0.1, 0.1, &big, &big).is_err());
    }

    #[test]
    fn weight_four_pair_at_n12() {
        let zero = BitString::zeros(12);
        let y = BitString::from_u64(0b1111, 12);
        let exact = typical_intersection_exact(0.25, 0.125, &zero, &y).unwrap();
        // z splits as a flips inside the support of y and b outside:
        // d(0,z) = a + b and d(y,z) = 4 − a + b, both in {2, 3, 4}.
        let mut count = 0;
        for a in 0..=4u64 {
            for b in 0..=8u64 {
                if (2..=4).contains(&(a + b)) && (2..=4).contains(&(4 - a + b)) {
                    count += binomial(4, a) * binomial(8, b);
                }
            }
        }
        assert_eq!(exact, count);
        assert!(exact as f64 <= lemma2_bound(12.0, 0.25, 0.125, 1.0 / 6.0).unwrap());
    }

    #[test]
    fn lemma2_report_at_n12() {
        let report = verify_lemma2(12, 0.25, 0.125).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.rows.len(), 13);
        assert!(report.max_ratio > 0.0 && report.max_ratio <= 1.0);
        for row in &report.rows {
            if row.sigma > 0.25 + 0.25 {
                assert_eq!(row.exact, 0);
            }
        }
    }

    #[test]
    fn appendix_b_small_instance() {
        let r = appendix_b_construction(10, 0.25, 0.15).unwrap();
        let tail = crate::channel::typicality_tail_exact(10, 0.25, 0.15).unwrap();
        assert!((r.gtd - tail).abs() < 1e-12);
        assert!(r.min_entropy >= r.floor);
        assert!(r.cond_min_entropy.unwrap() >= r.floor);
        assert!(appendix_b_construction(16, 0.25, 0.1).unwrap().cond_min_entropy.is_none());
    }

    #[test]
    fn lhl_examples() {
        let code = LinearCode::hamming_7_4();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let seeds: Vec<HashSeed> = (0..20).map(|_| sample_seed(4, 1, &mut rng).unwrap()).collect();
        let indep = BobChannel::independent_view(7, 3).unwrap();
        let r = lhl_check(&code, &indep, &seeds).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.passed());
        let bsc = BobChannel::bsc_view(7, 0.25).unwrap();
        assert!(lhl_check(&code, &bsc, &seeds).unwrap().passed());
        let bijective: Vec<HashSeed> = (0..5).map(|_| sample_seed(4, 4, &mut rng).unwrap()).collect();
        let r = lhl_check(&code, &bsc, &bijective).unwrap();
        assert!(r.passed() && r.lhs > 0.1 * r.rhs, "{r:?}");
    }

    #[test]
    fn search_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = [0.5, 0.3, 0.2];
        assert_eq!(smooth_entropy_search(&p, 0.0, 1000, &mut rng).unwrap(), 1.0);
        // Uniform on 2^t: capping gives t − log₂(1 − eps).
        let t = 3;
        let uniform = vec![0.125; 8];
        let found = smooth_entropy_search(&uniform, 0.2, 20_000, &mut rng).unwrap();
        assert!(found <= t as f64 - (0.8f64).log2() + 1e-9);
        let point = [1.0, 0.0, 0.0, 0.0];
        let found = smooth_entropy_search(&point, 0.5, 20_000, &mut rng).unwrap();
        assert!(found <= 1.0 + 1e-9 && found > 0.9, "{found}");
    }
}

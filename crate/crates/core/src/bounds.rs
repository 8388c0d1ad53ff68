//! Closed-form security bounds and rate formulas.
//!
//! Exponents are assembled in log space and only exponentiated on output,
//! so block lengths in the millions do not overflow.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::numfmt::g12;

/// `h(x)` without range checks; `h(0) = h(1) = 0`.
pub(crate) fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Binary entropy in bits.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("binary entropy needs q in [0, 1], got {q}")));
    }
    Ok(h(q))
}

fn check_channel(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid(format!("crossover probability {p} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Completeness error `8·2^{−n·eps²}`.
pub fn delta_c_bound(n: f64, eps: f64) -> f64 {
    8.0 * (-n * eps * eps).exp2()
}

/// Hiding error `2·2^{½(n + log|M| − log|C| − l_B)} + 8ε_B`.
pub fn delta_h_bound(n: f64, log_m: f64, log_c: f64, l_b: f64, eps_b: f64) -> f64 {
    2.0 * (0.5 * (n + log_m - log_c - l_b)).exp2() + 8.0 * eps_b
}

fn check_window(p: f64, eps: f64, sigma: f64) -> Result<()> {
    check_channel(p)?;
    if !(eps > 0.0 && eps < 0.5 - p) {
        return Err(invalid(format!("need 0 < eps < 1/2 - p, got eps = {eps}")));
    }
    if !(0.0..=0.5).contains(&sigma) {
        return Err(invalid(format!(
            "half relative distance {sigma} must lie in [0, 1/2]"
        )));
    }
    Ok(())
}

/// `log₂` of the typical-set intersection bound for two strings at Hamming
/// distance `2σn`, or `None` when the intersection is provably empty
/// (`σ > p + 2ε`).
pub fn lemma2_log2_bound(n: f64, p: f64, eps: f64, sigma: f64) -> Result<Option<f64>> {
    check_window(p, eps, sigma)?;
    if sigma > p + 2.0 * eps {
        return Ok(None);
    }
    let width = 1.0 - 2.0 * sigma;
    let spread = if width <= 0.0 {
        0.0
    } else {
        width * h(((p - sigma + eps) / width).clamp(0.0, 1.0))
    };
    let poly = 2.0 * (2f64.sqrt() * eps * n + 1.0).log2();
    Ok(Some(poly + n * (spread + 2.0 * sigma)))
}

pub fn lemma2_bound(n: f64, p: f64, eps: f64, sigma: f64) -> Result<f64> {
    Ok(lemma2_log2_bound(n, p, eps, sigma)?.map_or(0.0, f64::exp2))
}

/// Binding error: the intersection bound scaled by `2^{−l_A}`, plus `ε_A`.
pub fn delta_b_bound(n: f64, eps: f64, sigma: f64, p: f64, l_a: f64, eps_a: f64) -> Result<f64> {
    Ok(lemma2_log2_bound(n, p, eps, sigma)?.map_or(0.0, |b| (b - l_a).exp2()) + eps_a)
}

/// `g_p(σ) = (1−2σ)·h((p−σ)/(1−2σ)) + 2σ` on `[0, p]`.
pub fn g_p(sigma: f64, p: f64) -> Result<f64> {
    check_channel(p)?;
    if !(0.0..=p).contains(&sigma) {
        return Err(invalid(format!("g_p needs sigma in [0, {p}], got {sigma}")));
    }
    Ok(g_unchecked(sigma, p))
}

fn g_unchecked(sigma: f64, p: f64) -> f64 {
    let width = 1.0 - 2.0 * sigma;
    width * h((p - sigma) / width) + 2.0 * sigma
}

const INVERSE_TOLERANCE: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-12;

/// Inverse of the decreasing map `g_p: [0, p] → [2p, h(p)]`, by bisection.
/// The endpoints map back exactly.
pub fn g_p_inverse(y: f64, p: f64) -> Result<f64> {
    check_channel(p)?;
    let (lo_y, hi_y) = (2.0 * p, h(p));
    if !(y >= lo_y - RANGE_SLACK && y <= hi_y + RANGE_SLACK) {
        return Err(invalid(format!("g_p inverse needs y in [{lo_y}, {hi_y}], got {y}")));
    }
    if y >= hi_y {
        return Ok(0.0);
    }
    if y <= lo_y {
        return Ok(p);
    }
    let (mut lo, mut hi) = (0.0, p);
    while hi - lo > INVERSE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if g_unchecked(mid, p) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_rate_domain(p: f64, xi_a: f64, xi_b: f64) -> Result<()> {
    check_channel(p)?;
    let hp = h(p);
    if !(xi_b >= 0.0 && xi_b <= hp + RANGE_SLACK) {
        return Err(invalid(format!("xi_b must lie in [0, {hp}], got {xi_b}")));
    }
    if !(xi_a >= 2.0 * p - RANGE_SLACK && xi_a <= hp + RANGE_SLACK) {
        return Err(invalid(format!(
            "xi_a must lie in [{}, {hp}], got {xi_a}",
            2.0 * p
        )));
    }
    Ok(())
}

/// `ξ_B − h(2·g_p^{-1}(ξ_A))` before clamping.
pub fn rate_formula(p: f64, xi_a: f64, xi_b: f64) -> Result<f64> {
    check_rate_domain(p, xi_a, xi_b)?;
    let sigma = g_p_inverse(xi_a, p)?;
    Ok(xi_b - h((2.0 * sigma).min(1.0)))
}

/// Achievable commitment rate, clamped at zero.
pub fn achievable_rate(p: f64, xi_a: f64, xi_b: f64) -> Result<f64> {
    Ok(rate_formula(p, xi_a, xi_b)?.max(0.0))
}

/// Rate for BSC adversary channels: `h(p_B) − h(2·g_p^{-1}(h(p_A)))`,
/// unclamped.
pub fn iid_rate(p: f64, p_a: f64, p_b: f64) -> Result<f64> {
    check_channel(p)?;
    for (name, v) in [("p_a", p_a), ("p_b", p_b)] {
        if !(v > 0.0 && v <= p) {
            return Err(invalid(format!("{name} = {v} must lie in (0, p]")));
        }
    }
    rate_formula(p, h(p_a), h(p_b))
}

/// Capacity against i.i.d. adversaries, `h(p_A) − h((p−p_A)/(1−2p_A))`,
/// unclamped.
pub fn crepeau_capacity(p: f64, p_a: f64) -> Result<f64> {
    check_channel(p)?;
    if !(p_a > 0.0 && p_a <= p) {
        return Err(invalid(format!("p_a = {p_a} must lie in (0, p]")));
    }
    Ok(h(p_a) - h((p - p_a) / (1.0 - 2.0 * p_a)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IidComparison {
    pub rate: f64,
    pub capacity: f64,
    /// `capacity − rate` on the unclamped formulas.
    pub gap: f64,
    pub rate_clamped: f64,
    pub capacity_clamped: f64,
}

pub fn compare_iid(p: f64, p_a: f64, p_b: f64) -> Result<IidComparison> {
    let rate = iid_rate(p, p_a, p_b)?;
    let capacity = crepeau_capacity(p, p_a)?;
    Ok(IidComparison {
        rate,
        capacity,
        gap: capacity - rate,
        rate_clamped: rate.max(0.0),
        capacity_clamped: capacity.max(0.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma3Params {
    /// Smoothing radius `8·2^{−n^{1/3}}`.
    pub mu_n: f64,
    /// Entropy floor `n(h(p) − c·n^{−1/3})` with `c = log₂((1−p)/p)`.
    pub l: f64,
}

pub fn lemma3_params(n: f64, p: f64) -> Result<Lemma3Params> {
    check_channel(p)?;
    if n < 1.0 {
        return Err(invalid("block length must be at least 1"));
    }
    let eps = n.powf(-1.0 / 3.0);
    let c = ((1.0 - p) / p).log2();
    Ok(Lemma3Params {
        mu_n: 8.0 * (-n.cbrt()).exp2(),
        l: n * (h(p) - c * eps),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem2Params {
    /// Typicality parameter `n^{−1/3}`.
    pub eps_n: f64,
    /// Required code distance `2(g_p^{-1}(ξ_A) + ε')n`.
    pub distance: f64,
    pub log_c: f64,
    pub log_m: f64,
    /// `log|M| + n − log|C| − n·ξ_B`, the hiding exponent with `l_B = n·ξ_B`.
    pub hiding_exponent: f64,
    /// `g_p(σ) − g_p(σ − ε')` per channel use, with `σ = g_p^{-1}(ξ_A) + ε'`.
    pub binding_exponent: f64,
    /// `false` when `log|M| < 0`, i.e. the target rate is not reachable.
    pub feasible: bool,
}

/// Code and message sizes of the asymptotic construction at block length `n`.
pub fn theorem2_protocol_params(
    p: f64,
    xi_a: f64,
    xi_b: f64,
    eps_prime: f64,
    n: f64,
) -> Result<Theorem2Params> {
    check_rate_domain(p, xi_a, xi_b)?;
    if !(eps_prime > 0.0) {
        return Err(invalid("eps_prime must be positive"));
    }
    let base = g_p_inverse(xi_a, p)?;
    let sigma = base + eps_prime;
    let two_base = 2.0 * base;
    let log_c = (1.0 - h(two_base + 2.0 * eps_prime) - eps_prime) * n;
    let log_m = (xi_b - h(two_base + 3.0 * eps_prime) - eps_prime) * n;
    let binding_exponent = if sigma <= p {
        g_unchecked(sigma, p) - g_unchecked(base, p)
    } else {
        // Beyond p the distance alone separates the typical sets.
        f64::NEG_INFINITY
    };
    Ok(Theorem2Params {
        eps_n: n.powf(-1.0 / 3.0),
        distance: 2.0 * sigma * n,
        log_c,
        log_m,
        hiding_exponent: log_m + n - log_c - n * xi_b,
        binding_exponent,
        feasible: log_m >= 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub xi_a: f64,
    pub xi_b: f64,
    pub rate: f64,
}

/// Achievable rate on a `steps × steps` grid over `[2p, h(p)] × [0, h(p)]`,
/// `xi_a` major.
pub fn rate_surface(p: f64, steps: usize) -> Result<Vec<RatePoint>> {
    check_channel(p)?;
    if steps < 2 {
        return Err(invalid("rate surface needs at least 2 grid steps per axis"));
    }
    let hp = h(p);
    let at = |lo: f64, hi: f64, i: usize| {
        if i == steps - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (steps - 1) as f64
        }
    };
    let rows: Vec<Vec<RatePoint>> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let xi_a = at(2.0 * p, hp, i);
            (0..steps)
                .map(|j| {
                    let xi_b = at(0.0, hp, j);
                    Ok(RatePoint {
                        xi_a,
                        xi_b,
                        rate: achievable_rate(p, xi_a, xi_b)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn rate_surface_csv(points: &[RatePoint]) -> String {
    let mut out = String::from("xi_a,xi_b,rate\n");
    for pt in points {
        out.push_str(&format!("{},{},{}\n", g12(pt.xi_a), g12(pt.xi_b), g12(pt.rate)));
    }
    out
}

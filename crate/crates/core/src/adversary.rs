//! Concrete dishonest strategies and the harnesses that score them.
//!
//! A strategy here is one explicit object, so these harnesses can falsify
//! the security bounds but never prove them.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::delta_b_bound;
use crate::channel::{bsc_output_law, typical_membership, AliceChannel, BobChannel, C2Report, C3Report, UsncParams};
use crate::entropy::ClassicalDistribution;
use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMatrix, BitString, CosetId, Distance, LinearCode};
use crate::hashing::{hash, sample_seed, HashSeed};
use crate::protocol::{bob_receive, bob_verify, run_rng, wilson_standard_error, CommitConfig, CommitWire, Flag, Opening};

/// Largest block length for exact binding sums.
pub const MAX_EXACT_BINDING_N: usize = 16;
/// Largest `seeds × M̄ × cosets × views` product for exact hiding.
pub const MAX_EXACT_HIDING_LOG2: f64 = 24.0;

const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Whether the caller is about to compare the result with a security bound.
/// Bounds only apply to certified channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    BoundComparison,
    Exploratory,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Zero in exact mode.
    pub standard_error: f64,
    /// Zero in exact mode.
    pub samples: u64,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Self {
            value,
            standard_error: 0.0,
            samples: 0,
        }
    }
}

/// One outcome of Alice's commit-phase randomness.
#[derive(Clone, Debug)]
pub struct CommitAtom {
    pub prob: f64,
    pub wire: CommitWire,
    /// Input label fed to the dishonest channel.
    pub label: usize,
    pub reveal0: Opening,
    pub reveal1: Opening,
}

#[derive(Clone, Debug)]
pub struct AliceStrategy {
    name: String,
    atoms: Vec<CommitAtom>,
    channel: AliceChannel,
}

impl AliceStrategy {
    pub fn new(name: impl Into<String>, atoms: Vec<CommitAtom>, channel: AliceChannel) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("strategy needs at least one atom"));
        }
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        if atoms.iter().any(|a| !(a.prob >= 0.0)) || total > 1.0 + 1e-9 {
            return Err(invalid(format!("atom probabilities must be non-negative with total <= 1, got {total}")));
        }
        let labels = channel.labels().len();
        if let Some(a) = atoms.iter().find(|a| a.label >= labels) {
            return Err(invalid(format!("atom uses label {} but the channel has {labels}", a.label)));
        }
        Ok(Self {
            name: name.into(),
            atoms,
            channel,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[CommitAtom] {
        &self.atoms
    }

    pub fn channel(&self) -> &AliceChannel {
        &self.channel
    }

    pub fn certify(&mut self, params: &UsncParams) -> Result<C2Report> {
        self.channel.check_c2(params)
    }
}

fn double_accept(t: &crate::protocol::CommitmentTranscript, atom: &CommitAtom, cfg: &CommitConfig) -> bool {
    bob_verify(t, &atom.reveal0.m, &atom.reveal0.x, cfg) == Flag::Acc
        && bob_verify(t, &atom.reveal1.m, &atom.reveal1.x, cfg) == Flag::Acc
}

/// Probability that Bob accepts two openings with different messages.
pub fn binding_success(
    strategy: &AliceStrategy,
    cfg: &CommitConfig,
    mode: Mode,
    context: Context,
) -> Result<Estimate> {
    if context == Context::BoundComparison && !strategy.channel.is_certified() {
        return Err(Error::Uncertified);
    }
    let n = cfg.n();
    if strategy.channel.n() != n {
        return Err(Error::LengthMismatch {
            left: strategy.channel.n(),
            right: n,
        });
    }
    match mode {
        Mode::Exact => {
            if n > MAX_EXACT_BINDING_N {
                return Err(Error::TooLarge(format!(
                    "exact binding sums over 2^n outputs; n = {n} exceeds {MAX_EXACT_BINDING_N}"
                )));
            }
            let mut total = 0.0;
            for atom in &strategy.atoms {
                if atom.prob == 0.0 || atom.reveal0.m == atom.reveal1.m {
                    continue;
                }
                let template = bob_receive(atom.wire.clone(), BitString::zeros(n))?;
                let law = strategy.channel.law(atom.label).mass();
                let chunks: Vec<f64> = law
                    .par_chunks(CHUNK)
                    .enumerate()
                    .map(|(c, masses)| {
                        let mut t = template.clone();
                        let mut acc = 0.0;
                        for (i, &q) in masses.iter().enumerate() {
                            if q == 0.0 {
                                continue;
                            }
                            t.z = BitString::from_u64((c * CHUNK + i) as u64, n);
                            if double_accept(&t, atom, cfg) {
                                acc += q;
                            }
                        }
                        acc
                    })
                    .collect();
                total += atom.prob * chunks.iter().sum::<f64>();
            }
            Ok(Estimate::exact(total))
        }
        Mode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(invalid("need at least one sample"));
            }
            let successes: u64 = (0..samples)
                .into_par_iter()
                .map(|i| -> Result<u64> {
                    let mut rng = run_rng(seed, i);
                    let mut target = rng.gen::<f64>();
                    let Some(atom) = strategy.atoms.iter().find(|a| {
                        target -= a.prob;
                        target < 0.0
                    }) else {
                        return Ok(0);
                    };
                    let z = strategy.channel.sample(atom.label, &mut rng);
                    if atom.reveal0.m == atom.reveal1.m {
                        return Ok(0);
                    }
                    let t = bob_receive(atom.wire.clone(), z)?;
                    Ok(double_accept(&t, atom, cfg) as u64)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            Ok(Estimate {
                value: successes as f64 / samples as f64,
                standard_error: wilson_standard_error(successes, samples),
                samples,
            })
        }
    }
}

/// Seed whose first row reads the first message coordinate where the two
/// codewords differ, so their digests always differ.
fn separating_seed(code: &LinearCode, m: usize, x0: &BitString, x1: &BitString) -> Result<HashSeed> {
    let k = code.k();
    let diff = code.message_coordinates(x0)?.xor(&code.message_coordinates(x1)?)?;
    let first = *diff
        .support()
        .first()
        .ok_or_else(|| invalid("openings must be distinct codewords"))?;
    let rows = std::iter::once(first)
        .chain((0..k).filter(|&j| j != first))
        .take(m)
        .map(|j| BitString::unit(k, j))
        .collect();
    HashSeed::new(BitMatrix::new(rows, k)?)
}

/// Wire and openings shared by the two-codeword attacks: trivial coset,
/// zero mask, separating seed.
fn two_codeword_atom(cfg: &CommitConfig, x0: &BitString, x1: &BitString) -> Result<CommitAtom> {
    let code = cfg.code();
    if !code.contains(x0)? || !code.contains(x1)? {
        return Err(Error::NotACodeword);
    }
    if x0 == x1 {
        return Err(invalid("openings must be distinct codewords"));
    }
    let seed = separating_seed(code, cfg.hash_m(), x0, x1)?;
    let mbar = BitString::zeros(cfg.hash_m());
    let reveal = |x: &BitString| -> Result<Opening> {
        Ok(Opening {
            m: hash(&seed, code, x)?.xor(&mbar)?,
            x: x.clone(),
        })
    };
    let (reveal0, reveal1) = (reveal(x0)?, reveal(x1)?);
    Ok(CommitAtom {
        prob: 1.0,
        wire: CommitWire {
            seed,
            mbar,
            coset: CosetId::new(BitString::zeros(code.n() - code.k())),
        },
        label: 0,
        reveal0,
        reveal1,
    })
}

/// Sends a Hamming midpoint of the two codewords through BSC(`spread`).
pub fn midpoint_attack(cfg: &CommitConfig, x0: &BitString, x1: &BitString, spread: f64) -> Result<AliceStrategy> {
    if !(0.0..=0.5).contains(&spread) {
        return Err(invalid(format!("spread {spread} must lie in [0, 1/2]")));
    }
    let atom = two_codeword_atom(cfg, x0, x1)?;
    let diff = x0.xor(x1)?.support();
    let mut center = x0.clone();
    for &i in &diff[..diff.len() / 2] {
        center.flip(i);
    }
    let channel = AliceChannel::new(
        cfg.n(),
        vec![format!("midpoint:{spread}")],
        vec![bsc_output_law(&center, spread)?],
    )?;
    AliceStrategy::new(format!("midpoint spread={spread}"), vec![atom], channel)
}

/// Output uniform on the strings typical for both codewords: every output
/// opens both ways.
pub fn window_attack(cfg: &CommitConfig, x0: &BitString, x1: &BitString) -> Result<AliceStrategy> {
    let atom = two_codeword_atom(cfg, x0, x1)?;
    let n = cfg.n();
    if n > MAX_EXACT_BINDING_N {
        return Err(Error::TooLarge(format!("window law is dense; n = {n} exceeds {MAX_EXACT_BINDING_N}")));
    }
    let mut members = Vec::new();
    for z in 0..1u64 << n {
        let zs = BitString::from_u64(z, n);
        if typical_membership(x0, &zs, cfg.p(), cfg.eps())? && typical_membership(x1, &zs, cfg.p(), cfg.eps())? {
            members.push(z as usize);
        }
    }
    if members.is_empty() {
        return Err(invalid("typical sets of the two codewords do not meet"));
    }
    let mut mass = vec![0.0; 1 << n];
    let w = 1.0 / members.len() as f64;
    for z in members {
        mass[z] = w;
    }
    let channel = AliceChannel::new(n, vec!["window".into()], vec![ClassicalDistribution::new(mass)?])?;
    AliceStrategy::new("window", vec![atom], channel)
}

/// Honest commitment to `x` with both openings equal.
pub fn honest_strategy(cfg: &CommitConfig, x: &BitString) -> Result<AliceStrategy> {
    let code = cfg.code();
    if !code.contains(x)? {
        return Err(Error::NotACodeword);
    }
    let seed = HashSeed::new(BitMatrix::new(
        (0..cfg.hash_m()).map(|j| BitString::unit(code.k(), j)).collect(),
        code.k(),
    )?)?;
    let mbar = BitString::zeros(cfg.hash_m());
    let opening = Opening {
        m: hash(&seed, code, x)?,
        x: x.clone(),
    };
    let atom = CommitAtom {
        prob: 1.0,
        wire: CommitWire {
            seed,
            mbar,
            coset: CosetId::new(BitString::zeros(code.n() - code.k())),
        },
        label: 0,
        reveal0: opening.clone(),
        reveal1: opening,
    };
    let channel = AliceChannel::bsc_centered(std::slice::from_ref(x), cfg.p())?;
    AliceStrategy::new("honest", vec![atom], channel)
}

/// `[n, 1, w]` code spanned by `1^w 0^{n−w}`.
pub fn weight_code(n: usize, w: usize) -> Result<LinearCode> {
    if w == 0 || w > n {
        return Err(invalid(format!("weight {w} must lie in 1..={n}")));
    }
    let tail = BitString::from_bits(&(1..n).map(|i| i < w).collect::<Vec<_>>());
    let mut code = LinearCode::from_systematic(n, vec![tail])?;
    code.set_distance(Some(Distance {
        value: w,
        verified: true,
    }));
    Ok(code)
}

/// How the harness picks the entropy floor a strategy is certified against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyPolicy {
    /// The floor equals the strategy's own min-entropy, so every strategy
    /// is certified and the bound is as tight as it gets.
    Tight,
    /// One floor for all; strategies below it are excluded.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BindingCase {
    pub weight: usize,
    pub p: f64,
    pub eps: f64,
    pub strategy: String,
    /// Half the relative distance between the two openings.
    pub sigma: f64,
    pub l_a: f64,
    pub certified: bool,
    pub success: f64,
    pub bound: f64,
}

impl BindingCase {
    pub fn empty_intersection(&self) -> bool {
        self.sigma > self.p + 2.0 * self.eps
    }

    pub fn passed(&self) -> bool {
        if self.empty_intersection() && self.success != 0.0 {
            return false;
        }
        !self.certified || self.success <= self.bound
    }
}

/// Scores midpoint, window and honest strategies on `[n, 1, w]` codes for
/// every weight, configuration `(p, eps)` and spread.
pub fn binding_harness(
    n: usize,
    weights: &[usize],
    configs: &[(f64, f64)],
    spreads: &[f64],
    policy: EntropyPolicy,
) -> Result<Vec<BindingCase>> {
    let mut cases = Vec::new();
    for &w in weights {
        for &(p, eps) in configs {
            let code = weight_code(n, w)?;
            let x0 = BitString::zeros(n);
            let x1 = code.encode(&BitString::ones(1))?;
            // [n,1,w] codes with 2w ≥ n break the strict distance condition,
            // and they are the ones that reach the empty-intersection regime.
            let cfg = CommitConfig::relaxed(code, 1, p, eps)?;
            let mut strategies = spreads
                .iter()
                .map(|&s| midpoint_attack(&cfg, &x0, &x1, s))
                .collect::<Result<Vec<_>>>()?;
            match window_attack(&cfg, &x0, &x1) {
                Ok(s) => strategies.push(s),
                Err(Error::InvalidParameter(_)) => {}
                Err(e) => return Err(e),
            }
            strategies.push(honest_strategy(&cfg, &x1)?);
            let sigma = w as f64 / (2 * n) as f64;
            for mut strategy in strategies {
                let mut params = UsncParams {
                    n,
                    p,
                    eps_a: 0.0,
                    l_a: 0.0,
                    eps_b: 0.0,
                    l_b: 0.0,
                };
                if let EntropyPolicy::Fixed(l) = policy {
                    params.l_a = l;
                }
                let report = strategy.certify(&params)?;
                if policy == EntropyPolicy::Tight {
                    params.l_a = report.per_label.iter().map(|(_, h)| *h).fold(f64::INFINITY, f64::min);
                    strategy.certify(&params)?;
                }
                let success = binding_success(&strategy, &cfg, Mode::Exact, Context::Exploratory)?.value;
                cases.push(BindingCase {
                    weight: w,
                    p,
                    eps,
                    strategy: strategy.name().to_string(),
                    sigma,
                    l_a: params.l_a,
                    certified: strategy.channel().is_certified(),
                    success,
                    bound: delta_b_bound(n as f64, eps, sigma, p, params.l_a, 0.0)?,
                });
            }
        }
    }
    Ok(cases)
}

#[derive(Clone, Debug)]
pub struct BobStrategy {
    name: String,
    view: BobChannel,
}

impl BobStrategy {
    pub fn new(name: impl Into<String>, view: BobChannel) -> Self {
        Self { name: name.into(), view }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn view(&self) -> &BobChannel {
        &self.view
    }

    pub fn certify(&mut self, params: &UsncParams) -> Result<C3Report> {
        self.view.check_c3(params)
    }
}

/// Bob sees the transmitted string through BSC(`p_b`).
pub fn less_noisy_bob(p_b: f64, n: usize) -> Result<BobStrategy> {
    if !(0.0..=0.5).contains(&p_b) {
        return Err(invalid(format!("view crossover {p_b} must lie in [0, 1/2]")));
    }
    Ok(BobStrategy::new(format!("bsc-view:{p_b}"), BobChannel::bsc_view(n, p_b)?))
}

/// `Q[a][v]`: law of the view given digest `a`, for one seed and coset.
fn digest_view_table(code: &LinearCode, seed: &HashSeed, rep: u64, view: &BobChannel) -> Result<Vec<f64>> {
    let (k, m, views) = (code.k(), seed.m(), view.views());
    let per_digest = (-((k - m) as f64)).exp2();
    let mut table = vec![0.0; views << m];
    for u in 0..1u64 << k {
        let us = BitString::from_u64(u, k);
        let a = seed.matrix().mul_vec(&us)?.to_u64().unwrap() as usize;
        let sent = (code.encode(&us)?.to_u64().unwrap() ^ rep) as usize;
        for v in 0..views {
            table[a * views + v] += per_digest * view.prob(sent, v);
        }
    }
    Ok(table)
}

fn masked_distance(table: &[f64], views: usize, a0: usize, a1: usize) -> f64 {
    let (r0, r1) = (&table[a0 * views..(a0 + 1) * views], &table[a1 * views..(a1 + 1) * views]);
    0.5 * r0.iter().zip(r1).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// GTD between Bob's commit-phase views `(V, S, M̄, C')` for messages `m0`
/// and `m1`.
pub fn hiding_advantage(
    strategy: &BobStrategy,
    cfg: &CommitConfig,
    m0: &BitString,
    m1: &BitString,
    mode: Mode,
    context: Context,
) -> Result<Estimate> {
    if context == Context::BoundComparison && !strategy.view.is_certified() {
        return Err(Error::Uncertified);
    }
    let code = cfg.code();
    let (n, k, m) = (code.n(), code.k(), cfg.hash_m());
    if strategy.view.n() != n {
        return Err(Error::LengthMismatch {
            left: strategy.view.n(),
            right: n,
        });
    }
    for msg in [m0, m1] {
        if msg.len() != m {
            return Err(Error::LengthMismatch { left: msg.len(), right: m });
        }
    }
    let (a0, a1) = (m0.to_u64().unwrap() as usize, m1.to_u64().unwrap() as usize);
    let views = strategy.view.views();
    let rep_of = |c: u64| -> u64 { c << k };
    match mode {
        Mode::Exact => {
            let log_size = (m * k) as f64 + m as f64 + (n - k) as f64 + (views as f64).log2();
            if log_size > MAX_EXACT_HIDING_LOG2 {
                return Err(Error::TooLarge(format!(
                    "exact hiding view space is 2^{log_size:.1}, above 2^{MAX_EXACT_HIDING_LOG2}"
                )));
            }
            let seeds: Vec<HashSeed> = (0..1u64 << (m * k))
                .filter_map(|bits| {
                    let rows = (0..m).map(|r| BitString::from_u64(bits >> (r * k), k)).collect();
                    HashSeed::new(BitMatrix::new(rows, k).ok()?).ok()
                })
                .collect();
            let per_seed: Vec<f64> = seeds
                .par_iter()
                .map(|seed| -> Result<f64> {
                    let mut acc = 0.0;
                    for c in 0..1u64 << (n - k) {
                        let table = digest_view_table(code, seed, rep_of(c), &strategy.view)?;
                        for mbar in 0..1usize << m {
                            acc += masked_distance(&table, views, a0 ^ mbar, a1 ^ mbar);
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?;
            let outcomes = seeds.len() as f64 * (1u64 << (n - k + m)) as f64;
            Ok(Estimate::exact(per_seed.iter().sum::<f64>() / outcomes))
        }
        Mode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(invalid("need at least two samples"));
            }
            let terms: Vec<f64> = (0..samples)
                .into_par_iter()
                .map(|i| -> Result<f64> {
                    let mut rng = run_rng(seed, i);
                    let s = sample_seed(k, m, &mut rng)?;
                    let c = rng.gen_range(0..1u64 << (n - k));
                    let mbar = rng.gen_range(0..1usize << m);
                    let table = digest_view_table(code, &s, rep_of(c), &strategy.view)?;
                    Ok(masked_distance(&table, views, a0 ^ mbar, a1 ^ mbar))
                })
                .collect::<Result<_>>()?;
            let count = samples as f64;
            let mean = terms.iter().sum::<f64>() / count;
            let var = terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1.0);
            Ok(Estimate {
                value: mean,
                standard_error: (var / count).sqrt(),
                samples,
            })
        }
    }
}

/// A strategy file: `key = value` lines, `#` comments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Descriptor {
    entries: BTreeMap<String, String>,
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Parse(format!("missing key '{key}'")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|_| Error::Parse(format!("'{key}' is not a number: {v}")))
        })
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|_| Error::Parse(format!("'{key}' is not a count: {v}")))
        })
    }
}

/// Resolves `hamming74`, `repetition:N` or `weight:N:W`; `None` for
/// anything else, which callers treat as a file path.
pub fn builtin_code(spec: &str) -> Result<Option<LinearCode>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::Parse(format!("bad code spec '{spec}'"))) };
    Ok(match parts.as_slice() {
        ["hamming74"] => Some(LinearCode::hamming_7_4()),
        ["repetition", n] => Some(LinearCode::repetition(num(n)?)?),
        ["weight", n, w] => Some(weight_code(num(n)?, num(w)?)?),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::delta_h_bound;
    use crate::entropy::cond_min_entropy;

    fn cfg14(w: usize, p: f64, eps: f64) -> (CommitConfig, BitString, BitString) {
        let code = weight_code(14, w).unwrap();
        let x1 = code.encode(&BitString::ones(1)).unwrap();
        (CommitConfig::relaxed(code, 1, p, eps).unwrap(), BitString::zeros(14), x1)
    }

    #[test]
    fn weight_code_shape() {
        let mut code = weight_code(14, 6).unwrap();
        assert_eq!(code.verify_distance().unwrap(), 6);
        assert_eq!(code.encode(&BitString::ones(1)).unwrap().weight(), 6);
    }

    #[test]
    fn honest_strategy_never_binds_twice() {
        let (cfg, _, x1) = cfg14(4, 0.25, 0.05);
        let s = honest_strategy(&cfg, &x1).unwrap();
        assert_eq!(binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value, 0.0);
        assert!(matches!(
            binding_success(&s, &cfg, Mode::Exact, Context::BoundComparison),
            Err(Error::Uncertified)
        ));
    }

    #[test]
    fn deterministic_midpoint_always_succeeds() {
        // The midpoint sits at distance 2 from both openings; the window
        // at n = 14, p = 0.15, eps = 0.05 is [1.4, 2.8].
        let (cfg, x0, x1) = cfg14(4, 0.15, 0.05);
        let s = midpoint_attack(&cfg, &x0, &x1, 0.0).unwrap();
        assert_eq!(binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value, 1.0);
        let mut s = s;
        let params = UsncParams { n: 14, p: 0.15, eps_a: 0.0, l_a: 1.0, eps_b: 0.0, l_b: 0.0 };
        assert!(!s.certify(&params).unwrap().passed);
    }

    #[test]
    fn far_openings_never_both_accept() {
        let (cfg, x0, x1) = cfg14(12, 0.25, 0.05);
        for spread in [0.0, 0.25, 0.5] {
            let s = midpoint_attack(&cfg, &x0, &x1, spread).unwrap();
            assert_eq!(binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value, 0.0);
        }
        assert!(window_attack(&cfg, &x0, &x1).is_err());
    }

    #[test]
    fn uniform_output_matches_intersection_count() {
        let (cfg, x0, x1) = cfg14(4, 0.25, 0.05);
        let s = midpoint_attack(&cfg, &x0, &x1, 0.5).unwrap();
        let v = binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value;
        let count = crate::oracle::typical_intersection_exact(0.25, 0.05, &x0, &x1).unwrap();
        assert!((v - count as f64 / 16384.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_binding_agrees_with_exact() {
        let (cfg, x0, x1) = cfg14(4, 0.25, 0.05);
        let s = midpoint_attack(&cfg, &x0, &x1, 0.25).unwrap();
        let exact = binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value;
        let mc = binding_success(&s, &cfg, Mode::MonteCarlo { samples: 20_000, seed: 3 }, Context::Exploratory).unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.standard_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn hiding_examples_on_hamming() {
        let cfg = CommitConfig::new(LinearCode::hamming_7_4(), 1, 0.25, 0.1).unwrap();
        let (zero, one) = (BitString::zeros(1), BitString::ones(1));
        let bob = less_noisy_bob(0.25, 7).unwrap();
        assert_eq!(hiding_advantage(&bob, &cfg, &zero, &zero, Mode::Exact, Context::Exploratory).unwrap().value, 0.0);
        let blind = BobStrategy::new("blind", BobChannel::independent_view(7, 4).unwrap());
        assert!(hiding_advantage(&blind, &cfg, &zero, &one, Mode::Exact, Context::Exploratory).unwrap().value.abs() < 1e-15);
        let sharp = less_noisy_bob(0.0, 7).unwrap();
        let v = hiding_advantage(&sharp, &cfg, &zero, &one, Mode::Exact, Context::Exploratory).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12);
        let exact = hiding_advantage(&bob, &cfg, &zero, &one, Mode::Exact, Context::Exploratory).unwrap().value;
        let l_b = cond_min_entropy(&bob.view().joint_with_uniform_input().unwrap()).unwrap();
        assert!(exact <= delta_h_bound(7.0, 1.0, 4.0, l_b, 0.0));
        let mc = hiding_advantage(&bob, &cfg, &zero, &one, Mode::MonteCarlo { samples: 4000, seed: 9 }, Context::Exploratory)
            .unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.standard_error + 1e-12, "{exact} vs {mc:?}");
    }

    #[test]
    fn descriptor_parsing() {
        let d = Descriptor::parse("# attack\nkind = midpoint\nspread=0.1\n\ncode=weight:14:6 # inline\n").unwrap();
        assert_eq!(d.require("kind").unwrap(), "midpoint");
        assert_eq!(d.f64_or("spread", 0.0).unwrap(), 0.1);
        assert_eq!(d.f64_or("p", 0.25).unwrap(), 0.25);
        assert_eq!(builtin_code(d.require("code").unwrap()).unwrap().unwrap().k(), 1);
        assert!(builtin_code("data/x.code").unwrap().is_none());
        assert!(Descriptor::parse("novalue").is_err());
        assert!(d.require("missing").is_err());
    }
}

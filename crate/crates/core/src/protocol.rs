//! The commit and reveal phases as explicit sender/receiver steps.
//!
//! Commit: Alice draws a seed `S`, a mask `M̄` and a coset `C'`, picks a
//! uniform codeword `X` hashing to `m ⊕ M̄`, and sends `X ⊕ x_{C'}` over
//! the noisy channel while `(S, M̄, C')` travel noiselessly. Reveal: Alice
//! announces `(m, X)` and Bob checks membership, typicality and the hash.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{typical_membership, Bsc, NoisyChannel};
use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMatrix, BitString, CosetId, LinearCode};
use crate::hashing::{hash, preimage_sample, sample_seed, HashSeed};

/// Randomness for run `index` of a batch. Each run gets its own ChaCha
/// stream so results do not depend on how runs are spread over threads.
pub fn run_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug)]
pub struct CommitConfig {
    n: usize,
    eps: f64,
    code: LinearCode,
    hash_m: usize,
    p: f64,
}

impl CommitConfig {
    /// Checks every parameter condition of the security analysis: distance
    /// below `n/2`, `hash_m ≤ k` and `eps < ½ − p`.
    pub fn new(code: LinearCode, hash_m: usize, p: f64, eps: f64) -> Result<Self> {
        let cfg = Self::relaxed(code, hash_m, p, eps)?;
        let d = cfg
            .code
            .distance()
            .ok_or_else(|| invalid("code distance unknown; verify or declare it first"))?;
        if 2 * d.value >= cfg.n {
            return Err(invalid(format!(
                "code distance {} must be below n/2 = {}",
                d.value,
                cfg.n as f64 / 2.0
            )));
        }
        if eps >= 0.5 - p {
            return Err(invalid(format!("eps = {eps} must be below 1/2 - p = {}", 0.5 - p)));
        }
        Ok(cfg)
    }

    /// Structural checks only. Completeness experiments use this to probe
    /// windows wider than the security analysis allows.
    pub fn relaxed(code: LinearCode, hash_m: usize, p: f64, eps: f64) -> Result<Self> {
        if hash_m == 0 || hash_m > code.k() {
            return Err(invalid(format!(
                "message length {hash_m} must lie in 1..={}",
                code.k()
            )));
        }
        if !(0.0..0.5).contains(&p) {
            return Err(invalid(format!("crossover probability {p} must lie in [0, 1/2)")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("typicality parameter {eps} must be positive")));
        }
        Ok(Self {
            n: code.n(),
            eps,
            code,
            hash_m,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn hash_m(&self) -> usize {
        self.hash_m
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Acc,
    Rej,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flag::Acc => "acc",
            Flag::Rej => "rej",
        })
    }
}

/// What Alice keeps for the reveal phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliceState {
    pub m: BitString,
    pub x: BitString,
}

/// The noiseless commit-phase message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitWire {
    pub seed: HashSeed,
    pub mbar: BitString,
    pub coset: CosetId,
}

#[derive(Clone, Debug)]
pub struct Commitment {
    pub state: AliceState,
    pub wire: CommitWire,
    /// The string fed into the channel, `X ⊕ x_{C'}`.
    pub sent: BitString,
    /// The channel output delivered to Bob.
    pub z: BitString,
}

pub fn alice_commit<R: Rng>(
    m: &BitString,
    cfg: &CommitConfig,
    channel: &dyn NoisyChannel,
    rng: &mut R,
) -> Result<Commitment> {
    if m.len() != cfg.hash_m {
        return Err(Error::LengthMismatch {
            left: m.len(),
            right: cfg.hash_m,
        });
    }
    let code = &cfg.code;
    let seed = sample_seed(code.k(), cfg.hash_m, rng)?;
    let mbar = BitString::random(cfg.hash_m, rng);
    let coset = code.random_coset(rng);
    let masked = m.xor(&mbar)?;
    let x = preimage_sample(&seed, code, &masked, rng)?;
    let sent = x.xor(&code.coset_representative(&coset)?)?;
    let z = channel.transmit(&sent, rng);
    Ok(Commitment {
        state: AliceState { m: m.clone(), x },
        wire: CommitWire { seed, mbar, coset },
        sent,
        z,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub m: BitString,
    pub x: BitString,
}

/// Seeds that regenerate a transcript bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replay {
    pub master_seed: u64,
    pub run_index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentTranscript {
    pub seed: HashSeed,
    pub mbar: BitString,
    pub coset: CosetId,
    pub z: BitString,
    pub opening: Option<Opening>,
    pub replay: Option<Replay>,
}

pub fn bob_receive(wire: CommitWire, z: BitString) -> Result<CommitmentTranscript> {
    if wire.mbar.len() != wire.seed.m() {
        return Err(Error::LengthMismatch {
            left: wire.mbar.len(),
            right: wire.seed.m(),
        });
    }
    let n = wire.coset.syndrome.len() + wire.seed.k();
    if z.len() != n {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: n,
        });
    }
    Ok(CommitmentTranscript {
        seed: wire.seed,
        mbar: wire.mbar,
        coset: wire.coset,
        z,
        opening: None,
        replay: None,
    })
}

/// Accepts iff `x ∈ C`, `x ⊕ x_{C'}` is typical for `z`, and the hash of
/// `x` equals `m ⊕ M̄`. Malformed inputs are rejected.
pub fn bob_verify(
    t: &CommitmentTranscript,
    m: &BitString,
    x: &BitString,
    cfg: &CommitConfig,
) -> Flag {
    let check = || -> Result<bool> {
        let code = &cfg.code;
        if !code.contains(x)? {
            return Ok(false);
        }
        let shifted = x.xor(&code.coset_representative(&t.coset)?)?;
        if !typical_membership(&shifted, &t.z, cfg.p, cfg.eps)? {
            return Ok(false);
        }
        Ok(hash(&t.seed, code, x)? == m.xor(&t.mbar)?)
    };
    match check() {
        Ok(true) => Flag::Acc,
        _ => Flag::Rej,
    }
}

#[derive(Clone, Debug)]
pub struct HonestRun {
    pub m_hat: BitString,
    pub flag: Flag,
    pub transcript: CommitmentTranscript,
}

/// One full honest execution over `channel` with randomness from
/// `(master_seed, run_index)`.
pub fn run_with_channel(
    m: &BitString,
    cfg: &CommitConfig,
    channel: &dyn NoisyChannel,
    master_seed: u64,
    run_index: u64,
) -> Result<HonestRun> {
    let mut rng = run_rng(master_seed, run_index);
    let commitment = alice_commit(m, cfg, channel, &mut rng)?;
    let mut transcript = bob_receive(commitment.wire, commitment.z)?;
    transcript.replay = Some(Replay {
        master_seed,
        run_index,
    });
    let AliceState { m, x } = commitment.state;
    let flag = bob_verify(&transcript, &m, &x, cfg);
    transcript.opening = Some(Opening {
        m: m.clone(),
        x,
    });
    Ok(HonestRun {
        m_hat: m,
        flag,
        transcript,
    })
}

/// Honest execution over BSC(p).
pub fn run_honest(
    m: &BitString,
    cfg: &CommitConfig,
    master_seed: u64,
    run_index: u64,
) -> Result<HonestRun> {
    run_with_channel(m, cfg, &Bsc::new(cfg.p)?, master_seed, run_index)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Half-width of the unit-`z` Wilson interval, used as a standard error
/// that stays positive when no event was observed.
pub fn wilson_standard_error(successes: u64, trials: u64) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials, 1.0);
    (hi - lo) / 2.0
}

/// Normal quantile for a two-sided 99% interval.
pub const Z_99: f64 = 2.5758293035489004;

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessEstimate {
    pub trials: u64,
    pub rejections: u64,
    pub rate: f64,
    /// Wilson 99% interval for the rejection probability.
    pub interval: (f64, f64),
    pub standard_error: f64,
    /// Highest per-message rejection rate, tracked when `hash_m ≤ 12`.
    pub worst_message: Option<(BitString, f64)>,
}

const MIN_COMPLETENESS_TRIALS: u64 = 1000;
const MAX_TRACKED_MESSAGE_BITS: usize = 12;
const MESSAGE_STREAMS: u64 = 1 << 63;

/// Rejection rate of honest runs over BSC(p) with uniformly drawn messages.
pub fn estimate_completeness(cfg: &CommitConfig, trials: u64, master_seed: u64) -> Result<CompletenessEstimate> {
    estimate_completeness_with(cfg, &Bsc::new(cfg.p)?, trials, master_seed)
}

pub fn estimate_completeness_with(
    cfg: &CommitConfig,
    channel: &dyn NoisyChannel,
    trials: u64,
    master_seed: u64,
) -> Result<CompletenessEstimate> {
    if trials < MIN_COMPLETENESS_TRIALS {
        return Err(invalid(format!(
            "completeness estimation needs at least {MIN_COMPLETENESS_TRIALS} trials"
        )));
    }
    let track = cfg.hash_m <= MAX_TRACKED_MESSAGE_BITS;
    let slots = if track { 1usize << cfg.hash_m } else { 0 };
    let fold_init = || (0u64, vec![(0u64, 0u64); slots]);
    let (rejections, per_message) = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(u64, Option<usize>)> {
            // Messages come from the upper half of the stream space so they
            // stay independent of the run's own randomness.
            let m = BitString::random(cfg.hash_m, &mut run_rng(master_seed, i | MESSAGE_STREAMS));
            let run = run_with_channel(&m, cfg, channel, master_seed, i)?;
            let slot = track.then(|| m.to_u64().unwrap() as usize);
            Ok((u64::from(run.flag == Flag::Rej), slot))
        })
        .try_fold(fold_init, |(mut rej, mut table), item| {
            let (r, slot) = item?;
            rej += r;
            if let Some(s) = slot {
                table[s].0 += r;
                table[s].1 += 1;
            }
            Ok::<_, Error>((rej, table))
        })
        .try_reduce(fold_init, |(ra, mut ta), (rb, tb)| {
            for (a, b) in ta.iter_mut().zip(tb) {
                a.0 += b.0;
                a.1 += b.1;
            }
            Ok((ra + rb, ta))
        })?;
    let worst_message = per_message
        .iter()
        .enumerate()
        .filter(|(_, (_, seen))| *seen > 0)
        .map(|(i, (rej, seen))| (i, *rej as f64 / *seen as f64))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, rate)| (BitString::from_u64(i as u64, cfg.hash_m), rate));
    Ok(CompletenessEstimate {
        trials,
        rejections,
        rate: rejections as f64 / trials as f64,
        interval: wilson_interval(rejections, trials, Z_99),
        standard_error: wilson_standard_error(rejections, trials),
        worst_message,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Dims {
    n: usize,
    k: usize,
    m: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpeningFile {
    m: String,
    x: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TranscriptFile {
    dims: Dims,
    seed: Vec<String>,
    mbar: String,
    coset: String,
    z: String,
    opening: Option<OpeningFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    replay: Option<Replay>,
}

impl CommitmentTranscript {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// JSON with hex bit strings; `dims` carries the bit lengths the hex
    /// digits cannot.
    pub fn to_json(&self) -> String {
        let file = TranscriptFile {
            dims: Dims {
                n: self.z.len(),
                k: self.seed.k(),
                m: self.seed.m(),
            },
            seed: self.seed.matrix().rows().iter().map(BitString::to_hex).collect(),
            mbar: self.mbar.to_hex(),
            coset: self.coset.syndrome.to_hex(),
            z: self.z.to_hex(),
            opening: self.opening.as_ref().map(|o| OpeningFile {
                m: o.m.to_hex(),
                x: o.x.to_hex(),
            }),
            replay: self.replay,
        };
        serde_json::to_string_pretty(&file).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TranscriptFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("transcript: {e}")))?;
        let Dims { n, k, m } = file.dims;
        if k > n || m > k {
            return Err(Error::Parse(format!("inconsistent dims n={n} k={k} m={m}")));
        }
        if file.seed.len() != m {
            return Err(Error::Parse(format!("seed has {} rows, dims say {m}", file.seed.len())));
        }
        let rows = file
            .seed
            .iter()
            .map(|r| BitString::from_hex(r, k))
            .collect::<Result<Vec<_>>>()?;
        let seed = HashSeed::new(BitMatrix::new(rows, k)?)?;
        let opening = file
            .opening
            .map(|o| -> Result<Opening> {
                Ok(Opening {
                    m: BitString::from_hex(&o.m, m)?,
                    x: BitString::from_hex(&o.x, n)?,
                })
            })
            .transpose()?;
        Ok(Self {
            seed,
            mbar: BitString::from_hex(&file.mbar, m)?,
            coset: CosetId::new(BitString::from_hex(&file.coset, n - k)?),
            z: BitString::from_hex(&file.z, n)?,
            opening,
            replay: file.replay,
        })
    }
}

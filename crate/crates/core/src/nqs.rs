//! Commitment channel built from conjugate-basis qubits and noisy quantum
//! storage: honest sampling, the measurement operators, and the parameter
//! calculators that feed the commitment protocol.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::fmt::Write as _;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::bounds::binary_entropy;
use crate::channel::{NoisyChannel, UsncParams};
use crate::error::{invalid, Result};
use crate::gf2::BitString;
use crate::protocol::run_rng;

/// Crossover probability of the honest channel, `sin²(π/8)`.
pub fn honest_flip_probability() -> f64 {
    FRAC_PI_8.sin().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    amplitudes: [Complex64; 2],
}

impl QubitState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("qubit amplitudes have squared norm {norm}")));
        }
        Ok(Self { amplitudes: [a0, a1] })
    }

    /// `H^θ |x⟩`.
    pub fn encode(theta: bool, x: bool) -> Self {
        let amplitudes = match (theta, x) {
            (false, false) => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            (false, true) => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            (true, x) => {
                let sign = if x { -1.0 } else { 1.0 };
                [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(sign * FRAC_1_SQRT_2, 0.0)]
            }
        };
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    /// `|⟨other|self⟩|²`.
    pub fn overlap(&self, other: &Self) -> f64 {
        (other.amplitudes[0].conj() * self.amplitudes[0] + other.amplitudes[1].conj() * self.amplitudes[1]).norm_sqr()
    }
}

/// `+1` eigenvector of `(σ_z + (−1)^{θ′} σ_x)/√2`.
fn outcome_zero_vector(theta_prime: bool) -> QubitState {
    let s = if theta_prime { -FRAC_PI_8.sin() } else { FRAC_PI_8.sin() };
    QubitState {
        amplitudes: [Complex64::new(FRAC_PI_8.cos(), 0.0), Complex64::new(s, 0.0)],
    }
}

/// Probability of outcome `K = 0` when Bob measures `H^θ|x⟩` in the basis
/// selected by `θ′`.
pub fn measure_prob(theta: bool, theta_prime: bool, x: bool) -> f64 {
    QubitState::encode(theta, x).overlap(&outcome_zero_vector(theta_prime))
}

fn sample_round<R: Rng + ?Sized>(x: bool, rng: &mut R) -> (bool, bool, bool, bool) {
    let theta: bool = rng.gen();
    let theta_prime: bool = rng.gen();
    let k = rng.gen::<f64>() >= measure_prob(theta, theta_prime, x);
    (theta, theta_prime, k, k ^ (theta & theta_prime))
}

/// Rounds per random stream; fixes the transcript regardless of threads.
pub const ROUNDS_PER_STREAM: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol2Run {
    pub x: BitString,
    pub theta: BitString,
    pub theta_prime: BitString,
    pub k: BitString,
    pub z: BitString,
}

/// Runs the honest rounds for input `x`.
pub fn run_protocol2(x: &BitString, seed: u64) -> Protocol2Run {
    let n = x.len();
    let chunks: Vec<Vec<(bool, bool, bool, bool)>> = (0..n.div_ceil(ROUNDS_PER_STREAM))
        .into_par_iter()
        .map(|c| {
            let mut rng = run_rng(seed, c as u64);
            let end = ((c + 1) * ROUNDS_PER_STREAM).min(n);
            (c * ROUNDS_PER_STREAM..end).map(|i| sample_round(x.get(i), &mut rng)).collect()
        })
        .collect();
    let rounds: Vec<_> = chunks.into_iter().flatten().collect();
    let column = |f: fn(&(bool, bool, bool, bool)) -> bool| {
        BitString::from_bits(&rounds.iter().map(f).collect::<Vec<_>>())
    };
    Protocol2Run {
        x: x.clone(),
        theta: column(|r| r.0),
        theta_prime: column(|r| r.1),
        k: column(|r| r.2),
        z: column(|r| r.3),
    }
}

impl Protocol2Run {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn flips(&self) -> usize {
        self.x.hamming_distance(&self.z).unwrap()
    }

    /// Flip counts and round counts per `(θ, θ′)` cell, index `2θ + θ′`.
    pub fn cell_counts(&self) -> [(usize, usize); 4] {
        let mut cells = [(0, 0); 4];
        for i in 0..self.len() {
            let cell = 2 * self.theta.get(i) as usize + self.theta_prime.get(i) as usize;
            cells[cell].1 += 1;
            if self.x.get(i) != self.z.get(i) {
                cells[cell].0 += 1;
            }
        }
        cells
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,x,theta,theta_prime,k,z\n");
        for i in 0..self.len() {
            let b = |s: &BitString| s.get(i) as u8;
            writeln!(out, "{i},{},{},{},{},{}", b(&self.x), b(&self.theta), b(&self.theta_prime), b(&self.k), b(&self.z))
                .unwrap();
        }
        out
    }
}

/// The honest quantum channel seen as a classical BSC-like channel.
#[derive(Clone, Copy, Debug, Default)]
pub struct NqsChannel;

impl NoisyChannel for NqsChannel {
    fn transmit(&self, x: &BitString, rng: &mut dyn RngCore) -> BitString {
        BitString::from_bits(&(0..x.len()).map(|i| sample_round(x.get(i), rng).3).collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PovmReport {
    /// `max |E_0 + E_1 − I|` entrywise.
    pub completeness_error: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalues: [f64; 2],
}

impl PovmReport {
    pub fn passed(&self) -> bool {
        let c = FRAC_PI_8.cos().powi(2);
        self.completeness_error <= 1e-12
            && self.min_eigenvalue >= -1e-12
            && self.max_eigenvalues.iter().all(|m| (m - c).abs() <= 1e-12)
    }
}

fn projector(v: [f64; 2]) -> Matrix2<f64> {
    Matrix2::new(v[0] * v[0], v[0] * v[1], v[1] * v[0], v[1] * v[1])
}

/// The two operators on (announced basis) ⊗ (measured qubit), outcome 0 and 1.
pub fn povm_operators() -> [Matrix4<f64>; 2] {
    let r = FRAC_1_SQRT_2;
    let (p0, p1) = (projector([1.0, 0.0]), projector([0.0, 1.0]));
    let (plus, minus) = (projector([r, r]), projector([r, -r]));
    let e0 = (p0.kronecker(&(p0 + plus)) + p1.kronecker(&(p1 + plus))) * 0.5;
    let e1 = (p0.kronecker(&(p1 + minus)) + p1.kronecker(&(p0 + minus))) * 0.5;
    [e0.fixed_view::<4, 4>(0, 0).into(), e1.fixed_view::<4, 4>(0, 0).into()]
}

pub fn povm_verify() -> PovmReport {
    let [e0, e1] = povm_operators();
    let completeness_error = (e0 + e1 - Matrix4::identity()).abs().max();
    let eig0 = SymmetricEigen::new(e0).eigenvalues;
    let eig1 = SymmetricEigen::new(e1).eigenvalues;
    PovmReport {
        completeness_error,
        min_eigenvalue: eig0.min().min(eig1.min()),
        max_eigenvalues: [eig0.max(), eig1.max()],
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.ln(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AzumaBound {
    pub bound: f64,
    pub eps: f64,
    /// The raw floor was negative and has been raised to 0.
    pub clamped: bool,
}

/// Min-entropy accumulated over `n` rounds with per-round floor `h_floor`.
pub fn azuma_min_entropy(h_floor: f64, n: f64, lambda: f64, alphabet_size: f64, base: LogBase) -> Result<AzumaBound> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(invalid(format!("lambda = {lambda} must lie in (0, 1/2)")));
    }
    if !(n > 0.0) || !(alphabet_size >= 2.0) || !h_floor.is_finite() {
        return Err(invalid("need n > 0, alphabet size >= 2 and a finite floor"));
    }
    let raw = (h_floor - 2.0 * lambda) * n;
    let log_term = base.log(alphabet_size / lambda);
    Ok(AzumaBound {
        bound: raw.max(0.0),
        eps: (-lambda * lambda * n / (32.0 * log_term * log_term)).exp(),
        clamped: raw < 0.0,
    })
}

/// What a dishonest receiver can keep between the two protocol phases.
pub trait StorageModel: Send + Sync {
    /// `log₂` of the best probability of decoding `n_r` classical bits
    /// after storage, at block length `n`.
    fn log2_psucc(&self, n: f64, n_r: f64) -> f64;
}

/// `d` noiseless qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundedStorage {
    pub qubits: f64,
}

impl StorageModel for BoundedStorage {
    fn log2_psucc(&self, _n: f64, n_r: f64) -> f64 {
        (self.qubits - n_r).min(0.0)
    }
}

/// `νn` uses of a memoryless storage channel with strong-converse
/// exponent `gamma`: success at most `2^{−νn·γ(R/ν)}`.
pub struct TensorStorage<G: Fn(f64) -> f64 + Send + Sync> {
    pub rate: f64,
    pub gamma: G,
}

impl<G: Fn(f64) -> f64 + Send + Sync> StorageModel for TensorStorage<G> {
    fn log2_psucc(&self, n: f64, n_r: f64) -> f64 {
        let uses = self.rate * n;
        -uses * (self.gamma)(n_r / uses)
    }
}

/// `min(1, 2^{−nR + d})`.
pub fn bounded_storage_psucc(n_r: f64, d: f64) -> f64 {
    (d - n_r).min(0.0).exp2()
}

pub struct NqsParams<'a> {
    pub n: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub storage: &'a dyn StorageModel,
}

/// Channel parameters delivered by the quantum construction. `l_b` is
/// `+∞` when the storage model gives zero decoding probability.
pub fn theorem4_params(params: &NqsParams) -> Result<UsncParams> {
    let NqsParams { n, lambda_a, lambda_b, storage } = *params;
    for (name, l) in [("lambda_a", lambda_a), ("lambda_b", lambda_b)] {
        if !(l > 0.0 && l < 0.5) {
            return Err(invalid(format!("{name} = {l} must lie in (0, 1/2)")));
        }
    }
    if !(n >= 1.0) {
        return Err(invalid("block length must be at least 1"));
    }
    let p = honest_flip_probability();
    let h = binary_entropy(p)?;
    let one_minus = 1.0 - lambda_a.log2();
    let quarter = lambda_b / 4.0;
    let inner = 2.0 + (4.0 / lambda_b).log2();
    Ok(UsncParams {
        n: n as usize,
        p,
        l_a: (h - 2.0 * lambda_a) * n,
        eps_a: (-lambda_a * lambda_a * n / (32.0 * one_minus * one_minus)).exp(),
        l_b: -storage.log2_psucc(n, (0.5 - lambda_b) * n),
        eps_b: 2.0 * (-quarter * quarter * n / (32.0 * inner * inner)).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurement_probabilities() {
        let c2 = FRAC_PI_8.cos().powi(2);
        assert!((measure_prob(false, false, false) - c2).abs() < 1e-15);
        assert!((c2 - 0.853553390593).abs() < 1e-12);
        let s2 = honest_flip_probability();
        for t in [false, true] {
            for tp in [false, true] {
                for x in [false, true] {
                    let p0 = measure_prob(t, tp, x);
                    let flip = if x ^ (t & tp) { p0 } else { 1.0 - p0 };
                    assert!((flip - s2).abs() < 1e-12, "{t} {tp} {x}");
                }
            }
        }
    }

    #[test]
    fn state_normalization() {
        assert!(QubitState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).is_ok());
        assert!(QubitState::new(Complex64::new(0.6, 0.0), Complex64::new(0.6, 0.0)).is_err());
    }

    #[test]
    fn simulation_is_deterministic_and_honest() {
        let mut rng = run_rng(1, 0);
        let x = BitString::random(50_000, &mut rng);
        let a = run_protocol2(&x, 11);
        assert_eq!(a, run_protocol2(&x, 11));
        let rate = a.flips() as f64 / 50_000.0;
        assert!((rate - honest_flip_probability()).abs() < 0.01);
        let csv = a.to_csv();
        assert!(csv.starts_with("round,x,theta,theta_prime,k,z\n0,"));
        assert_eq!(csv.lines().count(), 50_001);
    }

    #[test]
    fn povm_is_complete() {
        let report = povm_verify();
        assert!(report.passed(), "{report:?}");
        assert!((report.max_eigenvalues[0] - 0.5 * (1.0 + 0.5 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn azuma_examples() {
        let h = binary_entropy(honest_flip_probability()).unwrap();
        assert!((h - 0.600876).abs() < 1e-6);
        let r = azuma_min_entropy(h, 1e6, 0.01, 2.0, LogBase::Two).unwrap();
        let expected = (-100.0 / (32.0 * 200f64.log2().powi(2))).exp();
        assert!((r.eps - expected).abs() < 1e-15);
        assert!(!r.clamped);
        let r = azuma_min_entropy(h, 100.0, 0.49, 2.0, LogBase::Two).unwrap();
        assert!(r.clamped && r.bound == 0.0);
        let nat = azuma_min_entropy(h, 1e6, 0.01, 2.0, LogBase::Natural).unwrap();
        assert!(nat.eps < expected);
        assert!(azuma_min_entropy(h, 10.0, 0.5, 2.0, LogBase::Two).is_err());
    }

    #[test]
    fn bounded_storage() {
        assert_eq!(bounded_storage_psucc(40.0, 40.0), 1.0);
        assert_eq!(bounded_storage_psucc(50.0, 40.0), 2f64.powi(-10));
        assert_eq!(bounded_storage_psucc(10.0, 40.0), 1.0);
    }

    #[test]
    fn tensor_storage_bound() {
        // γ(r) = r − 1/2 above capacity 1/2.
        let storage = TensorStorage { rate: 0.5, gamma: |r: f64| (r - 0.5).max(0.0) };
        let n = 1e4;
        let params = theorem4_params(&NqsParams { n, lambda_a: 0.1, lambda_b: 0.05, storage: &storage }).unwrap();
        let big_r = 0.45;
        assert!(params.l_b >= n * 0.5 * (big_r / 0.5 - 0.5) - 1e-9);
    }
}

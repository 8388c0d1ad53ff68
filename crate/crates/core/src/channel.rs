//! Channel regimes: the honest memoryless BSC, dishonest-Alice output
//! channels with a smooth min-entropy floor, and dishonest-Bob classical
//! views with a conditional min-entropy floor.

use rand::{Rng, RngCore};
use statrs::function::factorial::ln_binomial;

use crate::entropy::{
    cond_min_entropy, smooth_cond_min_entropy_lp, smooth_min_entropy, ClassicalDistribution,
    JointDistribution,
};
use crate::error::{invalid, Error, Result};
use crate::gf2::BitString;

/// Channel and security parameters `(p, ε_A, l_A, ε_B, l_B)` at block length `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UsncParams {
    pub n: usize,
    pub p: f64,
    pub eps_a: f64,
    pub l_a: f64,
    pub eps_b: f64,
    pub l_b: f64,
}

impl UsncParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("block length must be positive"));
        }
        if !(self.p > 0.0 && self.p < 0.5) {
            return Err(invalid(format!("crossover probability {} must lie in (0, 1/2)", self.p)));
        }
        for (name, v) in [("eps_a", self.eps_a), ("eps_b", self.eps_b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        for (name, v) in [("l_a", self.l_a), ("l_b", self.l_b)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} = {v} must be a non-negative number of bits")));
            }
        }
        Ok(())
    }
}

/// Anything that turns an `n`-bit input into an `n`-bit output.
pub trait NoisyChannel: Sync {
    fn transmit(&self, x: &BitString, rng: &mut dyn RngCore) -> BitString;
}

/// Memoryless binary symmetric channel.
///
/// `p = 0` is accepted so noiseless test doubles can share the sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bsc {
    p: f64,
}

impl Bsc {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid(format!("crossover probability {p} must lie in [0, 1)")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl NoisyChannel for Bsc {
    fn transmit(&self, x: &BitString, rng: &mut dyn RngCore) -> BitString {
        let mut out = x.clone();
        if self.p == 0.0 {
            return out;
        }
        // Jump between flipped positions with geometric gaps.
        let log_keep = (1.0 - self.p).ln();
        let mut pos = 0usize;
        loop {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let gap = (u.ln() / log_keep).floor();
            if gap >= (x.len() - pos) as f64 {
                break;
            }
            pos += gap as usize;
            out.flip(pos);
            pos += 1;
            if pos >= x.len() {
                break;
            }
        }
        out
    }
}

pub fn bsc_transmit<R: Rng>(x: &BitString, p: f64, rng: &mut R) -> Result<BitString> {
    Ok(Bsc::new(p)?.transmit(x, rng))
}

/// Relative slack on the window endpoints; absorbs rounding in `n(p ± ε)`
/// without admitting a neighbouring integer.
const WINDOW_SLACK: f64 = 1e-9;

/// Integer Hamming distances `d` with `n(p−ε) ≤ d ≤ n(p+ε)`, or `None`
/// when no integer fits.
pub fn typical_window(n: usize, p: f64, eps: f64) -> Option<(usize, usize)> {
    let nf = n as f64;
    let lo = (nf * (p - eps) - WINDOW_SLACK * nf).ceil().max(0.0);
    let hi = (nf * (p + eps) + WINDOW_SLACK * nf).floor().min(nf);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

pub fn typical_membership(x: &BitString, z: &BitString, p: f64, eps: f64) -> Result<bool> {
    let d = x.hamming_distance(z)?;
    Ok(typical_window(x.len(), p, eps).is_some_and(|(lo, hi)| (lo..=hi).contains(&d)))
}

/// `ln Pr[Bin(n, p) = w]`.
pub fn ln_binomial_pmf(n: u64, w: u64, p: f64) -> f64 {
    let term = |count: u64, prob: f64| {
        if count == 0 {
            0.0
        } else if prob <= 0.0 {
            f64::NEG_INFINITY
        } else {
            count as f64 * prob.ln()
        }
    };
    ln_binomial(n, w) + term(w, p) + term(n - w, 1.0 - p)
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.filter(|t| *t > f64::NEG_INFINITY).collect();
    let Some(max) = terms.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

pub const MAX_TAIL_N: usize = 1_000_000;

/// Exact probability that a BSC(p) output leaves the typicality window
/// around its input.
pub fn typicality_tail_exact(n: usize, p: f64, eps: f64) -> Result<f64> {
    if n > MAX_TAIL_N {
        return Err(Error::TooLarge(format!("tail sum supports n <= {MAX_TAIL_N}")));
    }
    if !(0.0..=1.0).contains(&p) || eps < 0.0 {
        return Err(invalid(format!("need p in [0, 1] and eps >= 0, got p={p}, eps={eps}")));
    }
    let nu = n as u64;
    let pmf = |w: usize| ln_binomial_pmf(nu, w as u64, p);
    let outside: Box<dyn Iterator<Item = usize>> = match typical_window(n, p, eps) {
        Some((lo, hi)) => Box::new((0..lo).chain(hi + 1..=n)),
        None => Box::new(0..=n),
    };
    Ok(log_sum_exp(outside.map(pmf)).exp().min(1.0))
}

/// Largest `n` for which channel laws are tabulated densely.
pub const MAX_DENSE_BITS: usize = 20;

fn sample_index<R: Rng + ?Sized>(mass: &[f64], rng: &mut R) -> usize {
    let total: f64 = mass.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, m) in mass.iter().enumerate() {
        if target < *m {
            return i;
        }
        target -= m;
    }
    mass.iter().rposition(|m| *m > 0.0).unwrap_or(0)
}

/// Output law of an `n`-fold BSC(p) around `center`, indexed by
/// `BitString::to_u64`.
pub fn bsc_output_law(center: &BitString, p: f64) -> Result<ClassicalDistribution> {
    let n = center.len();
    if n > MAX_DENSE_BITS {
        return Err(Error::TooLarge(format!("dense laws support n <= {MAX_DENSE_BITS}")));
    }
    let c = center.to_u64().unwrap();
    let mass = (0..1u64 << n)
        .map(|z| {
            let d = (z ^ c).count_ones() as i32;
            p.powi(d) * (1.0 - p).powi(n as i32 - d)
        })
        .collect();
    ClassicalDistribution::new(mass)
}

/// A dishonest sender's channel: each input label fixes an output law on
/// `{0,1}^n`.
#[derive(Clone, Debug)]
pub struct AliceChannel {
    n: usize,
    labels: Vec<String>,
    laws: Vec<ClassicalDistribution>,
    certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct C2Report {
    pub passed: bool,
    /// Smooth min-entropy of each label's output law.
    pub per_label: Vec<(String, f64)>,
    /// Label with the smallest entropy when the floor is violated.
    pub witness: Option<(String, f64)>,
}

impl AliceChannel {
    pub fn new(n: usize, labels: Vec<String>, laws: Vec<ClassicalDistribution>) -> Result<Self> {
        if n > MAX_DENSE_BITS {
            return Err(Error::TooLarge(format!("dense laws support n <= {MAX_DENSE_BITS}")));
        }
        if labels.is_empty() || labels.len() != laws.len() {
            return Err(invalid("need one output law per input label"));
        }
        if let Some(bad) = laws.iter().find(|l| l.len() != 1 << n) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: 1 << n,
            });
        }
        Ok(Self {
            n,
            labels,
            laws,
            certified: false,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, vec!["uniform".into()], vec![ClassicalDistribution::uniform(n as u32)])
    }

    pub fn deterministic(output: &BitString) -> Result<Self> {
        let n = output.len();
        Self::new(
            n,
            vec![output.to_string()],
            vec![ClassicalDistribution::point(1 << n, output.to_u64().unwrap() as usize)],
        )
    }

    /// The honest channel seen as a dishonest one: one label per centre.
    pub fn bsc_centered(centers: &[BitString], p: f64) -> Result<Self> {
        let n = centers.first().map_or(0, BitString::len);
        let laws = centers
            .iter()
            .map(|c| bsc_output_law(c, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, centers.iter().map(ToString::to_string).collect(), laws)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn law(&self, label: usize) -> &ClassicalDistribution {
        &self.laws[label]
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn sample<R: Rng + ?Sized>(&self, label: usize, rng: &mut R) -> BitString {
        BitString::from_u64(sample_index(self.laws[label].mass(), rng) as u64, self.n)
    }

    /// Checks the smooth min-entropy floor on every label and updates the
    /// certification flag.
    pub fn check_c2(&mut self, params: &UsncParams) -> Result<C2Report> {
        let mut per_label = Vec::with_capacity(self.labels.len());
        for (label, law) in self.labels.iter().zip(&self.laws) {
            let h = match smooth_min_entropy(law, params.eps_a) {
                Ok(h) => h,
                Err(Error::SmoothingTooLarge { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            per_label.push((label.clone(), h));
        }
        let worst = per_label
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .cloned()
            .unwrap();
        let passed = worst.1 >= params.l_a;
        self.certified = passed;
        Ok(C2Report {
            passed,
            per_label,
            witness: (!passed).then_some(worst),
        })
    }
}

/// A dishonest receiver's classical view: row `x` is the law of the view
/// `V` given channel input `x`.
#[derive(Clone, Debug)]
pub struct BobChannel {
    n: usize,
    views: usize,
    law: Vec<f64>,
    certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct C3Report {
    pub passed: bool,
    pub achieved: f64,
}

impl BobChannel {
    pub fn new(n: usize, views: usize, law: Vec<f64>) -> Result<Self> {
        if n > MAX_DENSE_BITS {
            return Err(Error::TooLarge(format!("dense laws support n <= {MAX_DENSE_BITS}")));
        }
        if views == 0 || law.len() != views << n {
            return Err(invalid(format!(
                "law needs 2^{n} rows of {views} views, got {} entries",
                law.len()
            )));
        }
        for row in law.chunks(views) {
            let total: f64 = row.iter().sum();
            if row.iter().any(|v| !(*v >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                return Err(invalid("each row of a view law must be a probability distribution"));
            }
        }
        Ok(Self {
            n,
            views,
            law,
            certified: false,
        })
    }

    /// Bob sees the input exactly.
    pub fn full_view(n: usize) -> Result<Self> {
        let size = 1usize << n;
        let mut law = vec![0.0; size * size];
        for x in 0..size {
            law[x * size + x] = 1.0;
        }
        Self::new(n, size, law)
    }

    /// The view is uniform on `views` symbols whatever the input.
    pub fn independent_view(n: usize, views: usize) -> Result<Self> {
        Self::new(n, views, vec![1.0 / views as f64; views << n])
    }

    /// Bob sees the input through BSC(p_b).
    pub fn bsc_view(n: usize, p_b: f64) -> Result<Self> {
        let size = 1usize << n;
        let mut law = Vec::with_capacity(size * size);
        for x in 0..size {
            law.extend(bsc_output_law(&BitString::from_u64(x as u64, n), p_b)?.mass());
        }
        Self::new(n, size, law)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn views(&self) -> usize {
        self.views
    }

    /// `Pr[V = v | X = x]`.
    pub fn prob(&self, x: usize, v: usize) -> f64 {
        self.law[x * self.views + v]
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> usize {
        let row = x.to_u64().unwrap() as usize;
        sample_index(&self.law[row * self.views..(row + 1) * self.views], rng)
    }

    /// Joint law of `(X, V)` for uniform `X`.
    pub fn joint_with_uniform_input(&self) -> Result<JointDistribution> {
        let scale = 1.0 / (1u64 << self.n) as f64;
        JointDistribution::new(
            1 << self.n,
            self.views,
            self.law.iter().map(|v| v * scale).collect(),
        )
    }

    pub fn check_c3(&mut self, params: &UsncParams) -> Result<C3Report> {
        if self.n as f64 + (self.views as f64).log2() > MAX_DENSE_BITS as f64 {
            return Err(Error::TooLarge(format!(
                "joint table exceeds 2^{MAX_DENSE_BITS} entries"
            )));
        }
        let joint = self.joint_with_uniform_input()?;
        let achieved = if params.eps_b == 0.0 {
            cond_min_entropy(&joint)?
        } else {
            match smooth_cond_min_entropy_lp(&joint, params.eps_b) {
                Ok(h) => h,
                Err(Error::SmoothingTooLarge { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            }
        };
        let passed = achieved >= params.l_b;
        self.certified = passed;
        Ok(C3Report { passed, achieved })
    }
}

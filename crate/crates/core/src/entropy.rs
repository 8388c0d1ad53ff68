//! Classical distributions, generalized trace distance and min-entropies.
//!
//! Distributions may be subnormalized. All logarithms are base 2.

use crate::error::{invalid, Error, Result};

/// Slack allowed on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDistribution {
    mass: Vec<f64>,
}

fn check_masses(mass: &[f64]) -> Result<()> {
    if let Some(bad) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(invalid(format!("probability {bad} is not a finite non-negative number")));
    }
    let total: f64 = mass.iter().sum();
    if total > 1.0 + MASS_TOLERANCE {
        return Err(invalid(format!("total mass {total} exceeds 1")));
    }
    Ok(())
}

impl ClassicalDistribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(invalid("distribution needs at least one outcome"));
        }
        check_masses(&mass)?;
        Ok(Self { mass })
    }

    /// Uniform distribution on `{0,1}^bits`.
    pub fn uniform(bits: u32) -> Self {
        let size = 1usize << bits;
        Self {
            mass: vec![1.0 / size as f64; size],
        }
    }

    pub fn point(len: usize, index: usize) -> Self {
        let mut mass = vec![0.0; len];
        mass[index] = 1.0;
        Self { mass }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.mass.iter().copied().fold(0.0, f64::max)
    }
}

/// Joint law of `(X, Z)` stored row-major: entry `x * nz + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    nx: usize,
    nz: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    pub fn new(nx: usize, nz: usize, mass: Vec<f64>) -> Result<Self> {
        if nx == 0 || nz == 0 {
            return Err(invalid("joint distribution needs nonempty alphabets"));
        }
        if mass.len() != nx * nz {
            return Err(Error::LengthMismatch {
                left: mass.len(),
                right: nx * nz,
            });
        }
        check_masses(&mass)?;
        Ok(Self { nx, nz, mass })
    }

    pub fn from_fn(nx: usize, nz: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut mass = Vec::with_capacity(nx * nz);
        for x in 0..nx {
            for z in 0..nz {
                mass.push(f(x, z));
            }
        }
        Self::new(nx, nz, mass)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.mass[x * self.nz + z]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn marginal_x(&self) -> ClassicalDistribution {
        ClassicalDistribution {
            mass: self.mass.chunks(self.nz).map(|row| row.iter().sum()).collect(),
        }
    }

    pub fn marginal_z(&self) -> ClassicalDistribution {
        let mut mass = vec![0.0; self.nz];
        for row in self.mass.chunks(self.nz) {
            for (acc, v) in mass.iter_mut().zip(row) {
                *acc += v;
            }
        }
        ClassicalDistribution { mass }
    }

    /// Entries of column `z`.
    pub fn column(&self, z: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |x| self.get(x, z))
    }

    /// `Σ_z max_x P(x, z)`.
    pub fn guessing_mass(&self) -> f64 {
        (0..self.nz)
            .map(|z| self.column(z).fold(0.0, f64::max))
            .sum()
    }
}

fn gtd_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    let dt: f64 = p.iter().sum::<f64>() - q.iter().sum::<f64>();
    Ok(0.5 * l1 + 0.5 * dt.abs())
}

/// Generalized trace distance `½Σ|p−q| + ½|Σp − Σq|`.
pub fn gtd(p: &ClassicalDistribution, q: &ClassicalDistribution) -> Result<f64> {
    gtd_slices(&p.mass, &q.mass)
}

pub fn gtd_joint(p: &JointDistribution, q: &JointDistribution) -> Result<f64> {
    if (p.nx, p.nz) != (q.nx, q.nz) {
        return Err(invalid(format!(
            "joint shapes differ: {}x{} vs {}x{}",
            p.nx, p.nz, q.nx, q.nz
        )));
    }
    gtd_slices(&p.mass, &q.mass)
}

pub fn min_entropy(p: &ClassicalDistribution) -> Result<f64> {
    let max = p.max();
    if max <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(-max.log2())
}

/// `−log₂ Σ_z max_x P(x,z)`.
pub fn cond_min_entropy(j: &JointDistribution) -> Result<f64> {
    let g = j.guessing_mass();
    if g <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(-g.log2())
}

fn check_eps(eps: f64, mass: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid(format!("smoothing radius {eps} must be non-negative")));
    }
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    if eps >= mass {
        return Err(Error::SmoothingTooLarge { eps, mass });
    }
    Ok(())
}

/// Threshold `t` with `Σ (p(x) − t)^+ = eps`.
pub fn capping_threshold(p: &ClassicalDistribution, eps: f64) -> Result<f64> {
    check_eps(eps, p.total())?;
    let mut sorted = p.mass.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut head = 0.0;
    for i in 0..sorted.len() {
        head += sorted[i];
        let t = (head - eps) / (i + 1) as f64;
        let next = sorted.get(i + 1).copied().unwrap_or(0.0);
        if t >= next {
            return Ok(t);
        }
    }
    unreachable!("eps below total mass always leaves a positive threshold")
}

/// Smooth min-entropy over the GTD ball of radius `eps`, by capping the
/// largest entries at a common threshold.
pub fn smooth_min_entropy(p: &ClassicalDistribution, eps: f64) -> Result<f64> {
    Ok(-capping_threshold(p, eps)?.log2())
}

/// Largest instance accepted by [`smooth_cond_min_entropy_lp`].
pub const MAX_JOINT_ENTRIES: usize = 1 << 20;

/// Smooth conditional min-entropy over the GTD ball of radius `eps`.
///
/// The optimum is attained at some `q ≤ P` pointwise, where the distance is
/// the removed mass. Lowering the maximum of column `z` from `a_1` to `λ`
/// costs `Σ_x (P(x,z) − λ)^+`, a convex piecewise-linear function whose
/// slope is the number of entries above `λ`. The optimal program therefore
/// buys the cheapest slopes first across all columns.
pub fn smooth_cond_min_entropy_lp(j: &JointDistribution, eps: f64) -> Result<f64> {
    if j.mass.len() > MAX_JOINT_ENTRIES {
        return Err(Error::TooLarge(format!(
            "{} joint entries exceed the limit of {MAX_JOINT_ENTRIES}",
            j.mass.len()
        )));
    }
    check_eps(eps, j.total())?;
    // (slope, length) segments of every column's cost curve.
    let mut segments: Vec<(usize, f64)> = Vec::new();
    let mut guessing = 0.0;
    let mut column = Vec::with_capacity(j.nx);
    for z in 0..j.nz {
        column.clear();
        column.extend(j.column(z));
        column.sort_by(|a, b| b.total_cmp(a));
        guessing += column[0];
        for i in 0..column.len() {
            let next = column.get(i + 1).copied().unwrap_or(0.0);
            let length = column[i] - next;
            if length > 0.0 {
                segments.push((i + 1, length));
            }
        }
    }
    segments.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut budget = eps;
    let mut lowered = 0.0;
    for (slope, length) in segments {
        if budget <= 0.0 {
            break;
        }
        let step = length.min(budget / slope as f64);
        lowered += step;
        budget -= step * slope as f64;
    }
    let remaining = guessing - lowered;
    if remaining <= 0.0 {
        return Err(Error::SmoothingTooLarge {
            eps,
            mass: j.total(),
        });
    }
    Ok(-remaining.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(v: &[f64]) -> ClassicalDistribution {
        ClassicalDistribution::new(v.to_vec()).unwrap()
    }

    fn bsc_joint(n: u32, p: f64) -> JointDistribution {
        let size = 1usize << n;
        JointDistribution::from_fn(size, size, |x, z| {
            let d = (x ^ z).count_ones() as i32;
            p.powi(d) * (1.0 - p).powi(n as i32 - d) / size as f64
        })
        .unwrap()
    }

    /// Generic LP: minimize Σ_z λ_z subject to 0 ≤ q ≤ P, q(x,z) ≤ λ_z and
    /// Σ (P − q) ≤ eps. Only valid because the optimum satisfies q ≤ P.
    fn lp_oracle(j: &JointDistribution, eps: f64) -> f64 {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let lambdas: Vec<_> = (0..j.nz())
            .map(|_| problem.add_var(1.0, (0.0, f64::INFINITY)))
            .collect();
        let mut removed = Vec::new();
        let mut total = 0.0;
        for x in 0..j.nx() {
            for z in 0..j.nz() {
                let v = j.get(x, z);
                let q = problem.add_var(0.0, (0.0, v));
                problem.add_constraint([(q, 1.0), (lambdas[z], -1.0)], ComparisonOp::Le, 0.0);
                removed.push((q, -1.0));
                total += v;
            }
        }
        problem.add_constraint(removed, ComparisonOp::Le, eps - total);
        -problem.solve().unwrap().objective().log2()
    }

    #[test]
    fn gtd_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(gtd(&p, &p).unwrap(), 0.0);
        assert_eq!(gtd(&dist(&[0.0, 1.0]), &dist(&[1.0, 0.0])).unwrap(), 1.0);
        let q = dist(&[0.4, 0.4]);
        assert!((gtd(&p, &q).unwrap() - 0.2).abs() < 1e-15);
        assert!(gtd(&p, &dist(&[1.0])).is_err());
    }

    #[test]
    fn min_entropy_examples() {
        assert!((min_entropy(&ClassicalDistribution::uniform(3)).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(min_entropy(&ClassicalDistribution::point(4, 2)).unwrap(), 0.0);
        assert_eq!(min_entropy(&dist(&[0.5, 0.25, 0.25])).unwrap(), 1.0);
        assert_eq!(min_entropy(&dist(&[0.0, 0.0])), Err(Error::ZeroMass));
    }

    #[test]
    fn cond_min_entropy_examples() {
        let independent = JointDistribution::from_fn(8, 1, |_, _| 0.125).unwrap();
        assert!((cond_min_entropy(&independent).unwrap() - 3.0).abs() < 1e-12);
        let copy = JointDistribution::from_fn(4, 4, |x, z| if x == z { 0.25 } else { 0.0 }).unwrap();
        assert_eq!(cond_min_entropy(&copy).unwrap(), 0.0);
        let h = cond_min_entropy(&bsc_joint(1, 0.25)).unwrap();
        assert!((h - -(0.75f64).log2()).abs() < 1e-12);
        assert!((h - 0.415).abs() < 1e-3);
    }

    #[test]
    fn smooth_min_entropy_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(smooth_min_entropy(&p, 0.0).unwrap(), 1.0);
        assert!((smooth_min_entropy(&p, 0.2).unwrap() - 1.321928094887).abs() < 1e-9);
        let point = ClassicalDistribution::point(3, 0);
        assert!((smooth_min_entropy(&point, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            smooth_min_entropy(&p, 1.0),
            Err(Error::SmoothingTooLarge { .. })
        ));
    }

    #[test]
    fn smooth_cond_examples() {
        let j = bsc_joint(2, 0.25);
        assert!((smooth_cond_min_entropy_lp(&j, 0.0).unwrap() - cond_min_entropy(&j).unwrap()).abs() < 1e-12);
        let v = smooth_cond_min_entropy_lp(&j, 0.1).unwrap();
        assert!((v - lp_oracle(&j, 0.1)).abs() < 1e-9);
        assert!(v >= cond_min_entropy(&j).unwrap());
        let independent = JointDistribution::from_fn(4, 2, |_, _| 0.125).unwrap();
        for eps in [0.0, 0.1, 0.5] {
            assert!(smooth_cond_min_entropy_lp(&independent, eps).unwrap() >= 2.0 - 1e-12);
        }
    }

    #[test]
    fn smooth_cond_matches_generic_lp_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let nx = rng.gen_range(1..6);
            let nz = rng.gen_range(1..5);
            let raw: Vec<f64> = (0..nx * nz).map(|_| rng.gen::<f64>().powi(3)).collect();
            let scale = rng.gen_range(0.5..1.0) / raw.iter().sum::<f64>();
            let j = JointDistribution::new(nx, nz, raw.iter().map(|v| v * scale).collect()).unwrap();
            let eps = rng.gen_range(0.0..0.9) * j.total();
            let fast = smooth_cond_min_entropy_lp(&j, eps).unwrap();
            let slow = lp_oracle(&j, eps);
            assert!((fast - slow).abs() < 1e-7, "{fast} vs {slow} on {j:?} eps={eps}");
        }
    }

    #[test]
    fn single_column_joint_reduces_to_capping() {
        let p = dist(&[0.4, 0.3, 0.2, 0.1]);
        let j = JointDistribution::new(4, 1, p.mass().to_vec()).unwrap();
        for eps in [0.05, 0.1, 0.2, 0.5] {
            let a = smooth_min_entropy(&p, eps).unwrap();
            let b = smooth_cond_min_entropy_lp(&j, eps).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn oversize_joint_is_refused() {
        let j = JointDistribution::new(1 << 11, 1 << 10, vec![0.0; 1 << 21]).unwrap();
        assert!(matches!(smooth_cond_min_entropy_lp(&j, 0.1), Err(Error::TooLarge(_))));
    }

    fn subnormalized(len: usize) -> impl proptest::strategy::Strategy<Value = ClassicalDistribution> {
        use proptest::prelude::*;
        (proptest::collection::vec(0.0f64..1.0, len), 0.1f64..1.0).prop_map(|(raw, total)| {
            let s: f64 = raw.iter().sum::<f64>().max(1e-9);
            ClassicalDistribution::new(raw.iter().map(|v| v / s * total).collect()).unwrap()
        })
    }

    proptest::proptest! {
        #[test]
        fn gtd_triangle_inequality(p in subnormalized(6), q in subnormalized(6), r in subnormalized(6)) {
            let pq = gtd(&p, &q).unwrap();
            proptest::prop_assert!(pq <= gtd(&p, &r).unwrap() + gtd(&r, &q).unwrap() + 1e-12);
            proptest::prop_assert!((pq - gtd(&q, &p).unwrap()).abs() < 1e-15);
        }

        #[test]
        fn smooth_min_entropy_is_monotone(p in subnormalized(8), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let total = p.total();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (lo, hi) = (lo * total * 0.99, hi * total * 0.99);
            proptest::prop_assert!(smooth_min_entropy(&p, lo).unwrap() <= smooth_min_entropy(&p, hi).unwrap() + 1e-12);
            proptest::prop_assert!((smooth_min_entropy(&p, 0.0).unwrap() - min_entropy(&p).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn smooth_cond_is_monotone_and_dominates(raw in proptest::collection::vec(0.0f64..1.0, 12), a in 0.0f64..0.9, b in 0.0f64..0.9) {
            let s: f64 = raw.iter().sum::<f64>().max(1e-9);
            let j = JointDistribution::new(4, 3, raw.iter().map(|v| v / s).collect()).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let base = cond_min_entropy(&j).unwrap();
            let v_lo = smooth_cond_min_entropy_lp(&j, lo).unwrap();
            let v_hi = smooth_cond_min_entropy_lp(&j, hi).unwrap();
            proptest::prop_assert!(v_lo >= base - 1e-12);
            proptest::prop_assert!(v_lo <= v_hi + 1e-12);
        }
    }
}

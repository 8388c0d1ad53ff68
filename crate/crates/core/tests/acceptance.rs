//! End-to-end acceptance run. Each check prints one PASS/FAIL line; the
//! process fails if any check does.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use usnc_core::adversary::{
    binding_harness, hiding_advantage, less_noisy_bob, Context, EntropyPolicy, Mode,
};
use usnc_core::bounds::{
    achievable_rate, binary_entropy, compare_iid, delta_c_bound, delta_h_bound, g_p, g_p_inverse,
};
use usnc_core::channel::{typicality_tail_exact, UsncParams};
use usnc_core::entropy::{smooth_min_entropy, ClassicalDistribution};
use usnc_core::gf2::{random_linear_code, BitString, LinearCode};
use usnc_core::hashing::sample_seed;
use usnc_core::nqs::{honest_flip_probability, povm_verify, run_protocol2, theorem4_params, BoundedStorage, NqsParams};
use usnc_core::numfmt::g12;
use usnc_core::oracle::{appendix_b_construction, lhl_check, smooth_entropy_search, verify_lemma2};
use usnc_core::protocol::{estimate_completeness, CommitConfig};
use usnc_core::channel::BobChannel;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn intersection_sweep() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for n in [8, 10, 12, 14] {
        for p in [0.125, 0.25] {
            let report = verify_lemma2(n, p, 0.125).map_err(|e| e.to_string())?;
            if let Some(w) = report.witness {
                return Err(format!("n={n} p={p}: weight {w} violates the bound"));
            }
            worst = worst.max(report.max_ratio);
            rows += report.rows.len();
        }
    }
    Ok(format!("{rows} weight classes, max exact/bound {}", g12(worst)))
}

fn typicality_tail() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let mut tightest: f64 = 0.0;
    for i in 0..50 {
        let n = (10f64 * 10f64.powf(4.0 * i as f64 / 49.0)).round() as usize;
        let p: f64 = [0.05, 0.1, 0.25, 0.4][i % 4];
        let eps = rng.gen_range(0.001..(0.5 - p).min(0.3));
        let tail = typicality_tail_exact(n, p, eps).map_err(|e| e.to_string())?;
        let bound = delta_c_bound(n as f64, eps);
        if tail > bound {
            return Err(format!("n={n} p={p} eps={}: tail {} > {}", g12(eps), g12(tail), g12(bound)));
        }
        if bound > 0.0 {
            tightest = tightest.max(tail / bound);
        }
    }
    Ok(format!("50 triples up to n=100000, max tail/bound {}", g12(tightest)))
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let code = random_linear_code(4096, 1024, 800, 1, &mut rng).map_err(|e| e.to_string())?;
    let cfg = CommitConfig::new(code, 64, 0.1, 0.06).map_err(|e| e.to_string())?;
    let est = estimate_completeness(&cfg, 100_000, 99).map_err(|e| e.to_string())?;
    let bound = delta_c_bound(4096.0, 0.06);
    let limit = bound + 3.0 * est.standard_error;
    check(
        est.rate <= limit,
        format!(
            "{} rejections in {} runs, rate {} vs bound {} + 3 SE = {}",
            est.rejections,
            est.trials,
            g12(est.rate),
            g12(bound),
            g12(limit)
        ),
    )
}

fn hiding() -> Outcome {
    let cfg = CommitConfig::new(LinearCode::hamming_7_4(), 1, 0.25, 0.1).map_err(|e| e.to_string())?;
    let (m0, m1) = (BitString::zeros(1), BitString::ones(1));
    let mut bob = less_noisy_bob(0.25, 7).map_err(|e| e.to_string())?;
    let l_b = bob
        .certify(&UsncParams { n: 7, p: 0.25, eps_a: 0.0, l_a: 0.0, eps_b: 0.0, l_b: 0.0 })
        .map_err(|e| e.to_string())?
        .achieved;
    bob.certify(&UsncParams { n: 7, p: 0.25, eps_a: 0.0, l_a: 0.0, eps_b: 0.0, l_b })
        .map_err(|e| e.to_string())?;
    let adv = hiding_advantage(&bob, &cfg, &m0, &m1, Mode::Exact, Context::BoundComparison)
        .map_err(|e| e.to_string())?
        .value;
    let bound = delta_h_bound(7.0, 1.0, 4.0, l_b, 0.0);
    let sharp = less_noisy_bob(0.0, 7).map_err(|e| e.to_string())?;
    let anchor = hiding_advantage(&sharp, &cfg, &m0, &m1, Mode::Exact, Context::Exploratory)
        .map_err(|e| e.to_string())?
        .value;
    check(
        adv <= bound && (anchor - 1.0).abs() < 1e-12,
        format!(
            "advantage {} <= bound {} (l_b {}), noiseless view advantage {}",
            g12(adv),
            g12(bound),
            g12(l_b),
            g12(anchor)
        ),
    )
}

fn binding() -> Outcome {
    let weights = [2, 4, 6, 10, 12];
    let configs = [(0.25, 0.05), (0.1, 0.05)];
    let spreads = [0.0, 0.05, 0.1, 0.2, 0.25, 0.35, 0.5];
    let mut cases = binding_harness(14, &weights, &configs, &spreads, EntropyPolicy::Tight).map_err(|e| e.to_string())?;
    cases.extend(binding_harness(14, &weights, &configs, &spreads, EntropyPolicy::Fixed(7.0)).map_err(|e| e.to_string())?);
    if let Some(bad) = cases.iter().find(|c| !c.passed()) {
        return Err(format!("{bad:?}"));
    }
    let certified = cases.iter().filter(|c| c.certified).count();
    let empty = cases.iter().filter(|c| c.empty_intersection()).count();
    let best = cases
        .iter()
        .filter(|c| c.certified && c.bound > 0.0)
        .map(|c| c.success / c.bound)
        .fold(0.0, f64::max);
    check(
        certified > 0 && empty > 0,
        format!(
            "{} strategies, {certified} certified, {empty} beyond the distance limit all at 0, max success/bound {}",
            cases.len(),
            g12(best)
        ),
    )
}

fn leftover_hash() -> Outcome {
    let code = LinearCode::hamming_7_4();
    let view = BobChannel::bsc_view(7, 0.25).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let seeds = (0..128).map(|_| sample_seed(4, 1, &mut rng)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let r = lhl_check(&code, &view, &seeds).map_err(|e| e.to_string())?;
    check(
        r.passed(),
        format!("{} seeds, lhs {} <= rhs {}", r.seeds, g12(r.lhs), g12(r.rhs)),
    )
}

fn rate_theory() -> Outcome {
    let h01 = binary_entropy(0.1).map_err(|e| e.to_string())?;
    if (h01 * 1000.0).round() != 469.0 {
        return Err(format!("h(0.1) = {}", g12(h01)));
    }
    for i in 1..50 {
        let p = i as f64 / 100.0;
        let hp = binary_entropy(p).map_err(|e| e.to_string())?;
        let r = achievable_rate(p, hp, hp).map_err(|e| e.to_string())?;
        if (r - hp).abs() > 1e-9 {
            return Err(format!("rate at corner for p={p}: {} vs {}", g12(r), g12(hp)));
        }
    }
    let edge = g_p(0.05, 0.1).map_err(|e| e.to_string())?;
    let ratio = edge / h01;
    let at_edge = achievable_rate(0.1, edge, h01).map_err(|e| e.to_string())?;
    if (edge * 1000.0).round() != 379.0 || (ratio * 100.0).round() != 81.0 || ratio >= 0.82 || at_edge > 1e-9 {
        return Err(format!("zero boundary at xi_a = {} (ratio {}), rate there {}", g12(edge), g12(ratio), g12(at_edge)));
    }
    for p in [0.05, 0.1, 0.2, 0.25] {
        for j in 1..=10 {
            let p_a = p * j as f64 / 10.0;
            // Both formulas need h(p_a) >= 2p.
            if binary_entropy(p_a).map_err(|e| e.to_string())? < 2.0 * p {
                continue;
            }
            let c = compare_iid(p, p_a, p_a).map_err(|e| e.to_string())?;
            let equal = c.gap.abs() <= 1e-12;
            if c.gap < -1e-12 || equal != (j == 10) {
                return Err(format!("p={p} p_a={}: gap {}", g12(p_a), g12(c.gap)));
            }
        }
    }
    Ok(format!("h(0.1) = {}, zero boundary xi_a = {} = {} h(p)", g12(h01), g12(edge), g12(ratio)))
}

fn inverse_roundtrip() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.1, 0.2] {
        let hp = binary_entropy(p).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let y = 2.0 * p + (hp - 2.0 * p) * i as f64 / 99.0;
            let back = g_p(g_p_inverse(y, p).map_err(|e| e.to_string())?, p).map_err(|e| e.to_string())?;
            worst = worst.max((back - y).abs());
        }
    }
    check(worst <= 1e-9, format!("300 points, max error {}", g12(worst)))
}

fn quantum_channel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = BitString::random(1_000_000, &mut rng);
    let run = run_protocol2(&x, 2024);
    let target = honest_flip_probability();
    let rates: Vec<f64> = run.cell_counts().iter().map(|(f, t)| *f as f64 / *t as f64).collect();
    let overall = run.flips() as f64 / run.len() as f64;
    let povm = povm_verify();
    let ok = rates.iter().chain([&overall]).all(|r| (r - target).abs() <= 0.002) && povm.passed();
    check(
        ok,
        format!(
            "flip rate {} (cells {}), operator completeness error {}, max eigenvalues {} {}",
            g12(overall),
            rates.iter().map(|r| g12(*r)).collect::<Vec<_>>().join(" "),
            g12(povm.completeness_error),
            g12(povm.max_eigenvalues[0]),
            g12(povm.max_eigenvalues[1])
        ),
    )
}

fn storage_limits() -> Outcome {
    let n: f64 = 1e9;
    let lambda = n.powf(-1.0 / 3.0);
    let storage = BoundedStorage { qubits: 1000.0 };
    let params = theorem4_params(&NqsParams { n, lambda_a: lambda, lambda_b: lambda, storage: &storage })
        .map_err(|e| e.to_string())?;
    let p = honest_flip_probability();
    let hp = binary_entropy(p).map_err(|e| e.to_string())?;
    let (la, lb) = (params.l_a / n, params.l_b / n);
    let rate = achievable_rate(p, hp, 0.5).map_err(|e| e.to_string())?;
    check(
        (la - hp).abs() <= 1e-2 && (lb - 0.5).abs() <= 1e-2 && rate == 0.5,
        format!("l_a/n = {}, l_b/n = {}, rate {}", g12(la), g12(lb), g12(rate)),
    )
}

fn clipped_law() -> Outcome {
    let mut lines = Vec::new();
    for n in [10usize, 14] {
        for (p, eps) in [(0.25, (n as f64).powf(-1.0 / 3.0)), (0.25, 0.1), (0.1, 0.05)] {
            let r = appendix_b_construction(n, p, eps).map_err(|e| e.to_string())?;
            let tail = typicality_tail_exact(n, p, eps).map_err(|e| e.to_string())?;
            let cond = r.cond_min_entropy.unwrap_or(f64::INFINITY);
            if (r.gtd - tail).abs() > 1e-12 || r.min_entropy < r.floor || cond < r.floor {
                return Err(format!("{r:?} tail {}", g12(tail)));
            }
            lines.push(format!("n={n}: {}>={}", g12(r.min_entropy), g12(r.floor)));
        }
    }
    Ok(format!("6 instances, gtd = tail; {}", lines.join(", ")))
}

fn smoothing_search() -> Outcome {
    let results: Vec<Result<(f64, f64), String>> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let len = rng.gen_range(2..=1024);
            let raw: Vec<f64> = (0..len).map(|_| rng.gen::<f64>().powi(3)).collect();
            let total: f64 = raw.iter().sum();
            let p = ClassicalDistribution::new(raw.iter().map(|v| v / total).collect()).map_err(|e| e.to_string())?;
            let eps = rng.gen_range(0.001..0.3);
            let capped = smooth_min_entropy(&p, eps).map_err(|e| e.to_string())?;
            let found = smooth_entropy_search(p.mass(), eps, 100_000, &mut rng).map_err(|e| e.to_string())?;
            Ok((found, capped))
        })
        .collect();
    let mut slack = f64::INFINITY;
    for r in results {
        let (found, capped) = r?;
        if found > capped + 1e-9 {
            return Err(format!("search found {} above capping {}", g12(found), g12(capped)));
        }
        slack = slack.min(capped - found);
    }
    Ok(format!("20 distributions, closest search result {} bits below capping", g12(slack)))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 12] = [
        ("typical-set intersection bound, exhaustive sweep", intersection_sweep),
        ("typicality tail vs 8*2^(-n eps^2)", typicality_tail),
        ("honest completeness at n=4096", completeness),
        ("exact hiding advantage on the [7,4] code", hiding),
        ("binding harness at n=14", binding),
        ("leftover-hash inequality on the [7,4] code", leftover_hash),
        ("rate formulas and the zero-rate boundary", rate_theory),
        ("inverse of the distance-entropy function", inverse_roundtrip),
        ("conjugate-coding channel and measurement operators", quantum_channel),
        ("noisy-storage parameters and the rate 1/2", storage_limits),
        ("clipped typical law", clipped_law),
        ("capping vs randomized smoothing search", smoothing_search),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

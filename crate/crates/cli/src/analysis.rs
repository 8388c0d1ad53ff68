use std::path::Path;

use anyhow::{Context, Result};
use usnc_core::bounds::{
    achievable_rate, binary_entropy, delta_b_bound, delta_c_bound, delta_h_bound, lemma2_bound, rate_surface,
    rate_surface_csv,
};
use usnc_core::channel::{typicality_tail_exact, BobChannel};
use usnc_core::hashing::sample_seed;
use usnc_core::numfmt::g12;
use usnc_core::oracle::{appendix_b_construction, lhl_check, verify_lemma2};
use usnc_core::protocol::run_rng;

use crate::settings::{load_code, require_positive, Settings};
use crate::{report, BoundKind, Verdict};

pub struct BoundFlags {
    pub n: Option<f64>,
    pub p: Option<f64>,
    pub eps: Option<f64>,
    pub sigma: Option<f64>,
    pub l_a: Option<f64>,
    pub eps_a: Option<f64>,
    pub l_b: Option<f64>,
    pub eps_b: Option<f64>,
    pub log_m: Option<f64>,
    pub log_c: Option<f64>,
}

pub fn bound(s: &Settings, which: BoundKind, f: &BoundFlags) -> Result<Verdict> {
    let n = s.get("n", f.n, None)?;
    let value = match which {
        BoundKind::Dc => delta_c_bound(n, s.get("eps", f.eps, None)?),
        BoundKind::Dh => delta_h_bound(
            n,
            s.get("log-m", f.log_m, None)?,
            s.get("log-c", f.log_c, None)?,
            s.get("l-b", f.l_b, None)?,
            s.get("eps-b", f.eps_b, Some(0.0))?,
        ),
        BoundKind::Db => delta_b_bound(
            n,
            s.get("eps", f.eps, None)?,
            s.get("sigma", f.sigma, None)?,
            s.get("p", f.p, None)?,
            s.get("l-a", f.l_a, None)?,
            s.get("eps-a", f.eps_a, Some(0.0))?,
        )?,
        BoundKind::Lemma2 => lemma2_bound(
            n,
            s.get("p", f.p, None)?,
            s.get("eps", f.eps, None)?,
            s.get("sigma", f.sigma, None)?,
        )?,
    };
    println!("{}", g12(value));
    Ok(Verdict::Pass)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn surface(s: &Settings, p: Option<f64>, steps: Option<usize>, out: Option<&Path>) -> Result<Verdict> {
    let points = rate_surface(s.get("p", p, None)?, s.get("steps", steps, Some(50))?)?;
    write_or_print(out, &rate_surface_csv(&points))?;
    Ok(Verdict::Pass)
}

/// Inputs quoted to three decimals may overshoot `h(p)` by rounding; such
/// values are read as `h(p)` itself.
const QUOTED_ENTROPY_SLACK: f64 = 5e-4;

pub fn point(s: &Settings, p: Option<f64>, xia: Option<f64>, xib: Option<f64>) -> Result<Verdict> {
    let p = s.get("p", p, None)?;
    let hp = binary_entropy(p)?;
    let snap = |name: &str, v: f64| {
        if v > hp && v <= hp + QUOTED_ENTROPY_SLACK {
            eprintln!("note: {name} = {v} read as h(p) = {}", g12(hp));
            hp
        } else {
            v
        }
    };
    let xi_a = snap("xia", s.get("xia", xia, None)?);
    let xi_b = snap("xib", s.get("xib", xib, None)?);
    println!("{}", g12(achievable_rate(p, xi_a, xi_b)?));
    Ok(Verdict::Pass)
}

pub fn lemma2(s: &Settings, n: Option<usize>, p: Option<f64>, eps: Option<f64>) -> Result<Verdict> {
    let r = verify_lemma2(s.get("n", n, None)?, s.get("p", p, None)?, s.get("eps", eps, None)?)?;
    println!("weight,sigma,exact,bound");
    for row in &r.rows {
        println!("{},{},{},{}", row.weight, g12(row.sigma), row.exact, g12(row.bound));
    }
    let detail = match r.witness {
        None => format!("all {} weights, max exact/bound {}", r.rows.len(), g12(r.max_ratio)),
        Some(w) => format!("weight {w} breaks the bound"),
    };
    Ok(Verdict::from_checks(&[report(r.passed(), "typical-set intersection bound", &detail)]))
}

pub fn lhl(
    s: &Settings,
    code: Option<String>,
    hash_m: Option<usize>,
    p_b: Option<f64>,
    seeds: Option<usize>,
    seed: u64,
) -> Result<Verdict> {
    let code = load_code(&s.get("code", code, Some("hamming74".to_string()))?)?;
    let m = s.get("hash-m", hash_m, Some(1))?;
    let view = BobChannel::bsc_view(code.n(), s.get("p-b", p_b, None)?)?;
    let count = require_positive("seeds", s.get("seeds", seeds, Some(128))?)?;
    let mut rng = run_rng(seed, 0);
    let sample = (0..count).map(|_| sample_seed(code.k(), m, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let r = lhl_check(&code, &view, &sample)?;
    println!("lhs {}", g12(r.lhs));
    println!("rhs {}", g12(r.rhs));
    println!("worst {}", g12(r.worst_term));
    let detail = format!("{} seeds, lhs {} vs rhs {}", r.seeds, g12(r.lhs), g12(r.rhs));
    Ok(Verdict::from_checks(&[report(r.passed(), "leftover-hash inequality", &detail)]))
}

pub fn clipped(s: &Settings, n: Option<usize>, p: Option<f64>, eps: Option<f64>) -> Result<Verdict> {
    let n = s.get("n", n, None)?;
    let p = s.get("p", p, None)?;
    let eps = s.get("eps", eps, Some((n as f64).powf(-1.0 / 3.0)))?;
    let r = appendix_b_construction(n, p, eps)?;
    let tail = typicality_tail_exact(n, p, eps)?;
    println!("eps {}", g12(eps));
    println!("gtd {}", g12(r.gtd));
    println!("tail {}", g12(tail));
    println!("min_entropy {}", g12(r.min_entropy));
    println!("floor {}", g12(r.floor));
    let mut checks = vec![
        report((r.gtd - tail).abs() <= 1e-12, "clipping removes exactly the typicality tail", &g12(r.gtd)),
        report(r.min_entropy >= r.floor, "clipped law entropy floor", &format!("{} >= {}", g12(r.min_entropy), g12(r.floor))),
    ];
    if let Some(cond) = r.cond_min_entropy {
        println!("cond_min_entropy {}", g12(cond));
        checks.push(report(
            cond >= r.floor,
            "clipped joint conditional entropy floor",
            &format!("{} >= {}", g12(cond), g12(r.floor)),
        ));
    }
    Ok(Verdict::from_checks(&checks))
}

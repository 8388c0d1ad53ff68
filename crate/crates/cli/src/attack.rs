use anyhow::{anyhow, bail, Context as _, Result};
use usnc_core::adversary::{
    binding_success, hiding_advantage, honest_strategy, less_noisy_bob, midpoint_attack, window_attack, Context,
    Descriptor, Estimate, Mode,
};
use usnc_core::bounds::{delta_b_bound, delta_h_bound};
use usnc_core::channel::UsncParams;
use usnc_core::gf2::BitString;
use usnc_core::numfmt::g12;
use usnc_core::protocol::CommitConfig;

use crate::settings::load_code;
use crate::{report, AttackArgs, ModeArg, Verdict};

const DISCLAIMER: &str = "note: a strategy can refute a bound but never establish it";

fn number(d: &Descriptor, key: &str) -> Result<f64> {
    let raw = d.require(key)?;
    raw.parse().map_err(|_| anyhow!("strategy key '{key}' is not a number: {raw}"))
}

fn mode(args: &AttackArgs) -> Result<Mode> {
    Ok(match args.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Mc => Mode::MonteCarlo {
            samples: args.samples.unwrap_or(100_000),
            seed: args.seed.ok_or_else(|| anyhow!("--seed is required in Monte Carlo mode"))?,
        },
    })
}

fn load(args: &AttackArgs) -> Result<(Descriptor, CommitConfig)> {
    let text = std::fs::read_to_string(&args.strategy)
        .with_context(|| format!("reading strategy {}", args.strategy.display()))?;
    let d = Descriptor::parse(&text)?;
    let code = load_code(d.require("code")?)?;
    let cfg = CommitConfig::relaxed(code, d.usize_or("hash_m", 1)?, number(&d, "p")?, number(&d, "eps")?)?;
    Ok((d, cfg))
}

fn show(label: &str, e: &Estimate) {
    if e.samples == 0 {
        println!("{label} {}", g12(e.value));
    } else {
        println!("{label} {} se {} samples {}", g12(e.value), g12(e.standard_error), e.samples);
    }
}

fn codeword(d: &Descriptor, key: &str, n: usize) -> Result<Option<BitString>> {
    d.get(key)
        .map(|hex| BitString::from_hex(hex, n).with_context(|| format!("parsing strategy key '{key}'")))
        .transpose()
}

pub fn binding(args: &AttackArgs) -> Result<Verdict> {
    let (d, cfg) = load(args)?;
    let code = cfg.code();
    let n = cfg.n();
    let x0 = codeword(&d, "x0", n)?.unwrap_or_else(|| BitString::zeros(n));
    let x1 = match codeword(&d, "x1", n)? {
        Some(x) => x,
        None => code.encode(&BitString::unit(code.k(), 0))?,
    };
    let mut strategy = match d.require("kind")? {
        "midpoint" => midpoint_attack(&cfg, &x0, &x1, number(&d, "spread")?)?,
        "window" => window_attack(&cfg, &x0, &x1)?,
        "honest" => honest_strategy(&cfg, &x1)?,
        other => bail!("unknown binding strategy kind '{other}'"),
    };
    let eps_a = d.f64_or("eps_a", 0.0)?;
    let mut params = UsncParams { n, p: cfg.p(), eps_a, l_a: 0.0, eps_b: 0.0, l_b: 0.0 };
    params.l_a = match d.get("l_a").unwrap_or("tight") {
        "tight" => {
            let floor = strategy.certify(&params)?;
            floor.per_label.iter().map(|(_, h)| *h).fold(f64::INFINITY, f64::min)
        }
        _ => number(&d, "l_a")?,
    };
    let certified = strategy.certify(&params)?.passed;
    let sigma = x0.hamming_distance(&x1)? as f64 / (2 * n) as f64;
    let success = binding_success(&strategy, &cfg, mode(args)?, Context::Exploratory)?;
    println!("strategy {}", strategy.name());
    println!("sigma {}", g12(sigma));
    println!("l_a {}", g12(params.l_a));
    println!("certified {certified}");
    show("success", &success);
    let slack = 3.0 * success.standard_error;
    let mut checks = Vec::new();
    if sigma > cfg.p() + 2.0 * cfg.eps() {
        checks.push(report(
            success.value == 0.0,
            "distant openings never both accepted",
            &format!("sigma {} > p + 2 eps", g12(sigma)),
        ));
    }
    if certified {
        let bound = delta_b_bound(n as f64, cfg.eps(), sigma, cfg.p(), params.l_a, eps_a)?;
        println!("bound {}", g12(bound));
        checks.push(report(
            success.value <= bound + slack,
            "binding bound",
            &format!("success {} vs bound {}", g12(success.value), g12(bound)),
        ));
    } else {
        println!("note: output law is below the entropy floor, so no bound applies");
    }
    println!("{DISCLAIMER}");
    Ok(Verdict::from_checks(&checks))
}

pub fn hiding(args: &AttackArgs) -> Result<Verdict> {
    let (d, cfg) = load(args)?;
    let code = cfg.code();
    let (n, k, m) = (cfg.n(), code.k(), cfg.hash_m());
    let mut bob = match d.require("kind")? {
        "bsc-view" => less_noisy_bob(number(&d, "p_b")?, n)?,
        other => bail!("unknown hiding strategy kind '{other}'"),
    };
    let message = |key: &str| -> Result<BitString> {
        BitString::from_hex(d.require(key)?, m).with_context(|| format!("parsing strategy key '{key}'"))
    };
    let (m0, m1) = (message("m0")?, message("m1")?);
    let probe = UsncParams { n, p: cfg.p(), eps_a: 0.0, l_a: 0.0, eps_b: 0.0, l_b: 0.0 };
    let l_b = bob.certify(&probe)?.achieved;
    bob.certify(&UsncParams { l_b, ..probe })?;
    let adv = hiding_advantage(&bob, &cfg, &m0, &m1, mode(args)?, Context::BoundComparison)?;
    let bound = delta_h_bound(n as f64, m as f64, k as f64, l_b, 0.0);
    println!("strategy {}", bob.name());
    println!("l_b {}", g12(l_b));
    show("advantage", &adv);
    println!("bound {}", g12(bound));
    let ok = report(
        adv.value <= bound + 3.0 * adv.standard_error,
        "hiding bound",
        &format!("advantage {} vs bound {}", g12(adv.value), g12(bound)),
    );
    println!("{DISCLAIMER}");
    Ok(Verdict::from_checks(&[ok]))
}

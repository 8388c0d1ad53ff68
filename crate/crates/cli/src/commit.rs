use std::path::Path;

use anyhow::{bail, Context, Result};
use usnc_core::bounds::delta_c_bound;
use usnc_core::gf2::BitString;
use usnc_core::numfmt::g12;
use usnc_core::protocol::{bob_verify, estimate_completeness, run_honest, CommitConfig, CommitmentTranscript, Flag};

use crate::settings::{load_code, Settings};
use crate::{report, ProtocolArgs, Verdict};

fn config(settings: &Settings, args: &ProtocolArgs, hash_m_default: Option<usize>) -> Result<CommitConfig> {
    let code = load_code(&settings.get("code", args.code.clone(), None)?)?;
    let n: usize = settings.get("n", args.n, Some(code.n()))?;
    if n != code.n() {
        bail!("--n {n} does not match the code length {}", code.n());
    }
    let p = settings.get("p", args.p, None)?;
    let eps = settings.get("eps", args.eps, None)?;
    let hash_m = settings.get("hash-m", args.hash_m, hash_m_default)?;
    Ok(if args.relaxed {
        CommitConfig::relaxed(code, hash_m, p, eps)?
    } else {
        CommitConfig::new(code, hash_m, p, eps)?
    })
}

pub fn run(
    settings: &Settings,
    args: &ProtocolArgs,
    message: &str,
    seed: u64,
    run_index: u64,
    out: Option<&Path>,
) -> Result<Verdict> {
    let cfg = config(settings, args, None)?;
    let m = BitString::from_hex(message, cfg.hash_m()).context("parsing --message")?;
    let run = run_honest(&m, &cfg, seed, run_index)?;
    let json = run.transcript.to_json();
    match out {
        Some(path) => {
            std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
            println!("transcript {}", path.display());
            println!("flag {}", run.flag);
        }
        None => {
            println!("{json}");
            eprintln!("flag {}", run.flag);
        }
    }
    Ok(Verdict::Pass)
}

pub fn complete(settings: &Settings, args: &ProtocolArgs, trials: Option<u64>, seed: u64) -> Result<Verdict> {
    let cfg = config(settings, args, None)?;
    let trials = settings.get("trials", trials, Some(10_000))?;
    let est = estimate_completeness(&cfg, trials, seed)?;
    let bound = delta_c_bound(cfg.n() as f64, cfg.eps());
    println!("trials {}", est.trials);
    println!("rejections {}", est.rejections);
    println!("rate {}", g12(est.rate));
    println!("wilson99 {} {}", g12(est.interval.0), g12(est.interval.1));
    println!("bound {}", g12(bound));
    let ok = est.rate <= bound + 3.0 * est.standard_error;
    let ok = report(
        ok,
        "honest rejection bound 8*2^(-n*eps^2)",
        &format!("rate {} vs bound {} + 3 SE {}", g12(est.rate), g12(bound), g12(est.standard_error)),
    );
    Ok(Verdict::from_checks(&[ok]))
}

pub fn verify(settings: &Settings, args: &ProtocolArgs, path: &Path) -> Result<Verdict> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let t = CommitmentTranscript::from_json(&text)?;
    let cfg = config(settings, args, Some(t.mbar.len()))?;
    let Some(opening) = &t.opening else {
        bail!("transcript has no opening to verify");
    };
    let flag = bob_verify(&t, &opening.m, &opening.x, &cfg);
    println!("flag {flag}");
    let mut checks = vec![report(flag == Flag::Acc, "opening accepted", &format!("message {}", opening.m.to_hex()))];
    if let Some(replay) = t.replay {
        let again = run_honest(&opening.m, &cfg, replay.master_seed, replay.run_index)?;
        checks.push(report(
            again.transcript == t,
            "transcript replay",
            &format!("seed {} run {}", replay.master_seed, replay.run_index),
        ));
    }
    Ok(Verdict::from_checks(&checks))
}

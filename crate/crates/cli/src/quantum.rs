use std::path::Path;

use anyhow::{Context, Result};
use usnc_core::gf2::BitString;
use usnc_core::nqs::{honest_flip_probability, povm_verify, run_protocol2, theorem4_params, BoundedStorage, NqsParams};
use usnc_core::numfmt::g12;
use usnc_core::protocol::run_rng;

use crate::settings::{require_positive, Settings};
use crate::{report, Verdict};

/// Stream for the random input, kept clear of the per-chunk round streams.
const INPUT_STREAM: u64 = 1 << 63;

pub fn simulate(s: &Settings, n: Option<usize>, seed: u64, input: Option<&str>, out: Option<&Path>) -> Result<Verdict> {
    let n = require_positive("n", s.get("n", n, None)?)?;
    let x = match input {
        Some(hex) => BitString::from_hex(hex, n).context("parsing --input")?,
        None => BitString::random(n, &mut run_rng(seed, INPUT_STREAM)),
    };
    let run = run_protocol2(&x, seed);
    match out {
        Some(path) => {
            std::fs::write(path, run.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            println!("rounds {}", run.len());
            println!("flips {}", run.flips());
            println!("flip_rate {}", g12(run.flips() as f64 / n as f64));
            println!("expected {}", g12(honest_flip_probability()));
            for (cell, (flips, rounds)) in run.cell_counts().iter().enumerate() {
                println!("cell theta={} theta_prime={} rounds {rounds} flips {flips}", cell >> 1, cell & 1);
            }
        }
        None => print!("{}", run.to_csv()),
    }
    Ok(Verdict::Pass)
}

pub fn params(
    s: &Settings,
    n: Option<f64>,
    lambda: Option<f64>,
    lambda_a: Option<f64>,
    lambda_b: Option<f64>,
    storage_qubits: Option<f64>,
) -> Result<Verdict> {
    let n = s.get("n", n, Some(1e6))?;
    let lambda = s.get("lambda", lambda, Some(n.powf(-1.0 / 3.0)))?;
    let storage = BoundedStorage { qubits: s.get("storage-qubits", storage_qubits, Some(0.0))? };
    let r = theorem4_params(&NqsParams {
        n,
        lambda_a: s.get("lambda-a", lambda_a, Some(lambda))?,
        lambda_b: s.get("lambda-b", lambda_b, Some(lambda))?,
        storage: &storage,
    })?;
    println!("p {}", g12(r.p));
    println!("eps_a {}", g12(r.eps_a));
    println!("l_a {}", g12(r.l_a));
    println!("eps_b {}", g12(r.eps_b));
    println!("l_b {}", g12(r.l_b));
    if r.l_a < 0.0 {
        eprintln!("warning: l_a is negative, so no entropy is guaranteed against the sender");
    }
    if r.l_b.is_infinite() {
        eprintln!("warning: l_b is infinite; the storage model never decodes");
    }
    Ok(Verdict::Pass)
}

pub fn povm() -> Verdict {
    let r = povm_verify();
    println!("completeness_error {}", g12(r.completeness_error));
    println!("min_eigenvalue {}", g12(r.min_eigenvalue));
    println!("max_eigenvalues {} {}", g12(r.max_eigenvalues[0]), g12(r.max_eigenvalues[1]));
    let ok = report(
        r.passed(),
        "measurement operators complete and bounded by cos^2(pi/8)",
        &format!("max eigenvalue {}", g12(r.max_eigenvalues[0].max(r.max_eigenvalues[1]))),
    );
    Verdict::from_checks(&[ok])
}

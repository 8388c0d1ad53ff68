use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod analysis;
mod attack;
mod commit;
mod quantum;
mod settings;

use settings::Settings;

/// String commitment over unstructured noisy channels.
#[derive(Parser)]
#[command(name = "usnc", version)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "USNC_THREADS")]
    threads: Option<usize>,
    /// Plain `key = value` file supplying defaults for any numeric flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run and check the commitment protocol.
    #[command(subcommand)]
    Commit(CommitCommand),
    /// Score a dishonest strategy against its security bound.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Evaluate a security bound.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Achievable commitment rates.
    #[command(subcommand)]
    Rate(RateCommand),
    /// Brute-force checks at small block length.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// The channel built from qubits and noisy storage.
    #[command(subcommand)]
    Nqs(NqsCommand),
}

#[derive(Args, Clone)]
pub struct ProtocolArgs {
    /// Code file, or one of hamming74, repetition:N, weight:N:W.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    hash_m: Option<usize>,
    /// Skip the distance and window conditions of the security analysis.
    #[arg(long)]
    relaxed: bool,
}

#[derive(Subcommand)]
enum CommitCommand {
    /// One honest commit and reveal; writes the transcript.
    Run {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Message as hex, most significant bit of each digit first.
        #[arg(long)]
        message: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        run_index: u64,
        /// Transcript destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the honest rejection rate and compare it with its bound.
    Complete {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: u64,
    },
    /// Check a transcript's opening, and its replay seeds when present.
    Verify {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        transcript: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Args)]
pub struct AttackArgs {
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long)]
    samples: Option<u64>,
    /// Required in Monte Carlo mode.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum AttackCommand {
    Binding(AttackArgs),
    Hiding(AttackArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BoundKind {
    /// Honest rejection.
    Dc,
    /// Hiding.
    Dh,
    /// Binding.
    Db,
    /// Typical-set intersection size.
    Lemma2,
}

#[derive(Subcommand)]
enum BoundsCommand {
    Eval {
        #[arg(long, value_enum)]
        which: BoundKind,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        /// Half the relative distance between two strings.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        l_a: Option<f64>,
        #[arg(long)]
        eps_a: Option<f64>,
        #[arg(long)]
        l_b: Option<f64>,
        #[arg(long)]
        eps_b: Option<f64>,
        #[arg(long)]
        log_m: Option<f64>,
        #[arg(long)]
        log_c: Option<f64>,
    },
}

#[derive(Subcommand)]
enum RateCommand {
    /// Rate grid as CSV.
    Surface {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Point {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        xia: Option<f64>,
        #[arg(long)]
        xib: Option<f64>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exhaustive typical-set intersection counts against their bound.
    Lemma2 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Exact leftover-hash inequality over sampled seeds.
    Lhl {
        #[arg(long)]
        code: Option<String>,
        #[arg(long)]
        hash_m: Option<usize>,
        /// Crossover of the receiver's view channel.
        #[arg(long)]
        p_b: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        seed: u64,
    },
    /// Typical-set clipping of the honest output law.
    AppendixB {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        /// Defaults to n^(-1/3).
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Subcommand)]
enum NqsCommand {
    /// Honest rounds as CSV.
    Simulate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Input bits as hex; random when absent.
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Channel parameters for a bounded-storage receiver.
    Params {
        #[arg(long)]
        n: Option<f64>,
        /// Sets both lambdas; defaults to n^(-1/3).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        lambda_a: Option<f64>,
        #[arg(long)]
        lambda_b: Option<f64>,
        /// Noiseless qubits the receiver can store.
        #[arg(long)]
        storage_qubits: Option<f64>,
    },
    /// Completeness and spectrum of the measurement operators.
    PovmVerify,
}

/// Whether every PASS/FAIL check in a command passed.
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_checks(checks: &[bool]) -> Self {
        if checks.iter().all(|c| *c) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Prints a check line and returns its outcome.
pub fn report(ok: bool, anchor: &str, detail: &str) -> bool {
    println!("{} {anchor}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Commit(CommitCommand::Run { protocol, message, seed, run_index, out }) => {
            commit::run(&settings, &protocol, &message, seed, run_index, out.as_deref())
        }
        Command::Commit(CommitCommand::Complete { protocol, trials, seed }) => {
            commit::complete(&settings, &protocol, trials, seed)
        }
        Command::Commit(CommitCommand::Verify { protocol, transcript }) => {
            commit::verify(&settings, &protocol, &transcript)
        }
        Command::Attack(AttackCommand::Binding(args)) => attack::binding(&args),
        Command::Attack(AttackCommand::Hiding(args)) => attack::hiding(&args),
        Command::Bounds(BoundsCommand::Eval { which, n, p, eps, sigma, l_a, eps_a, l_b, eps_b, log_m, log_c }) => {
            let flags = analysis::BoundFlags { n, p, eps, sigma, l_a, eps_a, l_b, eps_b, log_m, log_c };
            analysis::bound(&settings, which, &flags)
        }
        Command::Rate(RateCommand::Surface { p, steps, out }) => analysis::surface(&settings, p, steps, out.as_deref()),
        Command::Rate(RateCommand::Point { p, xia, xib }) => analysis::point(&settings, p, xia, xib),
        Command::Oracle(OracleCommand::Lemma2 { n, p, eps }) => analysis::lemma2(&settings, n, p, eps),
        Command::Oracle(OracleCommand::Lhl { code, hash_m, p_b, seeds, seed }) => {
            analysis::lhl(&settings, code, hash_m, p_b, seeds, seed)
        }
        Command::Oracle(OracleCommand::AppendixB { n, p, eps }) => analysis::clipped(&settings, n, p, eps),
        Command::Nqs(NqsCommand::Simulate { n, seed, input, out }) => {
            quantum::simulate(&settings, n, seed, input.as_deref(), out.as_deref())
        }
        Command::Nqs(NqsCommand::Params { n, lambda, lambda_a, lambda_b, storage_qubits }) => {
            quantum::params(&settings, n, lambda, lambda_a, lambda_b, storage_qubits)
        }
        Command::Nqs(NqsCommand::PovmVerify) => Ok(quantum::povm()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flopcalc::exactalg::{PrimeField, DEFAULT_PRIME};
use flopcalc::geom::binomial;
use flopcalc::kernels::{self, CheckMode, EquivalenceCheck};
use flopcalc::ktheory::AdjointSide;
use flopcalc::picard::{self, IdentityName};
use flopcalc::{strata, Error};
use serde::Serialize;

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(
    name = "flopcalc",
    version,
    about = "Verification harness for stratified Mukai flop kernels"
)]
struct Cli {
    /// Prime modulus for probabilistic checks.
    #[arg(long, global = true, env = "FLOPCALC_PRIME", default_value_t = DEFAULT_PRIME.to_string())]
    prime: String,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "FLOPCALC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    emit: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Flop {
    #[arg(long)]
    k: usize,
    #[arg(long = "N")]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension counts of the strata towers.
    Strata(Flop),
    /// Divisor-lattice identities.
    Picard {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "N")]
        n: Option<usize>,
        /// Check every admissible (k,N) with N up to this value.
        #[arg(long, conflicts_with_all = ["k", "n"])]
        sweep: Option<usize>,
    },
    /// Localized class of the kernel T.
    Kernel {
        #[command(flatten)]
        flop: Flop,
        #[arg(long, default_value_t = 20)]
        max_points: u64,
    },
    /// Checks that T and its adjoint compose to the identity in both orders.
    VerifyEquivalence {
        #[command(flatten)]
        flop: Flop,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Mode::Probabilistic)]
        mode: Mode,
        /// Adjoint convention tried first.
        #[arg(long, value_enum, default_value_t = Side::Left)]
        side: Side,
        #[arg(long, default_value_t = 20)]
        max_points: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Exact,
    Probabilistic,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Side {
    Left,
    Right,
}

impl From<Side> for AdjointSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Left => AdjointSide::Left,
            Side::Right => AdjointSide::Right,
        }
    }
}

#[derive(Serialize, Debug)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<String>,
    k: Option<usize>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_points: Option<u64>,
    prime: String,
    seed: u64,
    emit_path: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: RunConfig,
    passed: bool,
    result: T,
}

#[derive(Serialize)]
struct EquivalenceResult {
    /// The convention whose composites verified, if any.
    adjoint_convention: Option<AdjointSide>,
    attempts: Vec<EquivalenceCheck>,
}

enum Failure {
    Usage(String),
    Resource(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_precondition() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn lib<T, E: Into<Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e.into()))
}

fn check_flop(k: usize, n: usize) -> Result<(), Failure> {
    if k == 0 || 2 * k > n {
        return Err(Failure::Usage(format!("need 1 ≤ k and 2k ≤ N, got k={k}, N={n}")));
    }
    Ok(())
}

fn guard_points(k: usize, n: usize, max_points: u64) -> Result<(), Failure> {
    let c = binomial(n, k) as u64;
    if c > max_points {
        return Err(Failure::Resource(format!(
            "C({n},{k}) = {c} fixed points exceeds --max-points {max_points}"
        )));
    }
    Ok(())
}

fn config(cli: &Cli, command: &'static str) -> RunConfig {
    RunConfig {
        command,
        identity: None,
        k: None,
        n: None,
        sweep: None,
        trials: None,
        mode: None,
        side: None,
        max_points: None,
        prime: cli.prime.clone(),
        seed: cli.seed,
        emit_path: cli.emit.clone(),
    }
}

fn emit<T: Serialize>(cli: &Cli, report: &Report<T>) -> Result<(), Failure> {
    let mut json = serde_json::to_string_pretty(report).map_err(|e| Failure::Internal(e.to_string()))?;
    json.push('\n');
    match &cli.emit {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn finish<T: Serialize>(cli: &Cli, config: RunConfig, passed: bool, result: T) -> Result<bool, Failure> {
    let report = Report {
        tool: "flopcalc",
        version: env!("CARGO_PKG_VERSION"),
        config,
        passed,
        result,
    };
    emit(cli, &report)?;
    Ok(passed)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let field: PrimeField = lib(cli.prime.parse::<PrimeField>())?;
    match &cli.command {
        Command::Strata(Flop { k, n }) => {
            let (k, n) = (*k, *n);
            check_flop(k, n)?;
            let rep = lib(strata::verify_codim_report(k, n))?;
            for r in rep.results.iter().filter(|r| r.status == strata::CheckStatus::Fail) {
                eprintln!(
                    "s={} {:?}: stated codim {}, tower gives {}",
                    r.s,
                    r.piece,
                    r.stated_codim.unwrap_or_default(),
                    r.computed_codim.unwrap_or_default()
                );
            }
            let skipped = rep
                .results
                .iter()
                .filter(|r| r.status == strata::CheckStatus::Skipped)
                .count();
            eprintln!(
                "strata k={k} N={n}: {} ({skipped} skipped, bounds {})",
                verdict(rep.all_ok),
                if rep.bounds_ok { "hold" } else { "violated" }
            );
            let mut cfg = config(cli, "strata");
            (cfg.k, cfg.n) = (Some(k), Some(n));
            finish(cli, cfg, rep.all_ok, rep)
        }
        Command::Picard { identity, k, n, sweep } => {
            let name: IdentityName = identity
                .parse()
                .map_err(|e: picard::PicardError| Failure::Usage(e.to_string()))?;
            let mut cfg = config(cli, "picard");
            cfg.identity = Some(name.as_str().to_string());
            let reports = match (sweep, k, n) {
                (Some(max_n), _, _) => {
                    cfg.sweep = Some(*max_n);
                    lib(picard::sweep(name, *max_n))?
                }
                (None, Some(k), Some(n)) => {
                    check_flop(*k, *n)?;
                    (cfg.k, cfg.n) = (Some(*k), Some(*n));
                    vec![lib(picard::verify_identity(name, *k, *n))?]
                }
                _ => return Err(Failure::Usage("picard needs --k and --N, or --sweep".into())),
            };
            let passed = reports.iter().all(|r| r.all_ok);
            let failing = reports.iter().filter(|r| !r.all_ok).count();
            eprintln!(
                "picard {name}: {} over {} (k,N) pairs, {failing} failing",
                verdict(passed),
                reports.len()
            );
            finish(cli, cfg, passed, reports)
        }
        Command::Kernel {
            flop: Flop { k, n },
            max_points,
        } => {
            let (k, n) = (*k, *n);
            check_flop(k, n)?;
            guard_points(k, n, *max_points)?;
            let t = lib(kernels::t_class(k, n))?;
            let (rows, cols) = t.shape();
            eprintln!("kernel k={k} N={n}: {rows}×{cols} matrix");
            let mut cfg = config(cli, "kernel");
            (cfg.k, cfg.n, cfg.max_points) = (Some(k), Some(n), Some(*max_points));
            finish(cli, cfg, true, t)
        }
        Command::VerifyEquivalence {
            flop: Flop { k, n },
            trials,
            mode,
            side,
            max_points,
        } => {
            let (k, n) = (*k, *n);
            check_flop(k, n)?;
            let check_mode = match mode {
                Mode::Exact if n > 3 => {
                    return Err(Failure::Usage(format!("exact mode is limited to N ≤ 3, got N = {n}")));
                }
                Mode::Exact => CheckMode::Exact,
                Mode::Probabilistic if *trials == 0 => {
                    return Err(Failure::Usage(
                        "--trials 0 requests an exact check; pass --mode exact (N ≤ 3 only)".into(),
                    ));
                }
                Mode::Probabilistic => CheckMode::Probabilistic,
            };
            guard_points(k, n, *max_points)?;
            let first: AdjointSide = (*side).into();
            let second = match first {
                AdjointSide::Left => AdjointSide::Right,
                AdjointSide::Right => AdjointSide::Left,
            };
            let mut attempts = Vec::new();
            let mut convention = None;
            for s in [first, second] {
                let check = lib(kernels::verify_equivalence(
                    k, n, s, check_mode, *trials, cli.seed, &field,
                ))?;
                eprintln!(
                    "verify-equivalence k={k} N={n} {s:?} adjoint: T∘T_adj {}, T_adj∘T {}{}",
                    verdict(check.source_composite.equal),
                    verdict(check.target_composite.equal),
                    bound_note(&check)
                );
                let passed = check.passed;
                attempts.push(check);
                if passed {
                    convention = Some(s);
                    break;
                }
            }
            let mut cfg = config(cli, "verify-equivalence");
            (cfg.k, cfg.n, cfg.max_points, cfg.mode, cfg.side) =
                (Some(k), Some(n), Some(*max_points), Some(*mode), Some(*side));
            cfg.trials = Some(if matches!(mode, Mode::Exact) { 0 } else { *trials });
            finish(
                cli,
                cfg,
                convention.is_some(),
                EquivalenceResult {
                    adjoint_convention: convention,
                    attempts,
                },
            )
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn bound_note(c: &EquivalenceCheck) -> String {
    let worst = [
        c.source_composite.aggregate_failure_log10,
        c.target_composite.aggregate_failure_log10,
    ]
    .into_iter()
    .flatten()
    .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    match worst {
        Some(l) => format!(" (failure probability ≤ 10^{l:.1})"),
        None => " (exact)".into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("resource guard: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}

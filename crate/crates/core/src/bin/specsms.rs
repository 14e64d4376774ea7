use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use specsms::bench::sweep::{sweep, to_csv, Budget, SweepMode};
use specsms::bench::{gen_chain, gen_hidden_key, gen_php_pair};
use specsms::formula::{load_partitioned, parse_dimacs, parse_interface, parse_msat, write_msat};
use specsms::guidance::parse_profile;
use specsms::orchestrator::{solve, SolverConfig, Verdict};
use specsms::proof::{check_interpolant, interpolate, trim, validate, InterpolantCheck, ModularProof};
use specsms::PartitionedFormula;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: specsms::Error,
    },
    #[error(transparent)]
    Lib(#[from] specsms::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "specsms", version, about = "Speculative SAT modulo SAT solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a partitioned formula.
    Solve(SolveArgs),
    /// Check a modular proof against a formula.
    CheckProof(ProofArgs),
    /// Trim a modular proof to its core.
    TrimProof(ProofOutArgs),
    /// Extract an interpolant from a modular proof.
    Interpolate(InterpolateArgs),
    /// Generate benchmark instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Benchmark sweeps.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct FormulaArgs {
    /// Single-file input (`p msat` format).
    input: Option<PathBuf>,
    /// DIMACS file for the secondary part.
    #[arg(long, requires = "main", conflicts_with = "input")]
    secondary: Option<PathBuf>,
    /// DIMACS file for the main part.
    #[arg(long, requires = "secondary", conflicts_with = "input")]
    main: Option<PathBuf>,
    /// Interface variables, whitespace separated and terminated by 0.
    #[arg(long, conflicts_with = "input")]
    interface: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sms,
    Specsms,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    #[arg(long, value_enum, default_value = "specsms")]
    mode: Mode,
    /// Guidance profile: none, speculate-first[:vars], staged:vars;vars.
    #[arg(long, default_value = "none")]
    guidance: String,
    /// Write the proof here when unsatisfiable.
    #[arg(long)]
    proof: Option<PathBuf>,
    /// Trim the proof before writing it.
    #[arg(long)]
    trim: bool,
    /// Write an interpolant here when unsatisfiable.
    #[arg(long)]
    interpolate: Option<PathBuf>,
    /// Validate the proof (and interpolant) before reporting.
    #[arg(long)]
    check: bool,
    /// Write the state transition trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    max_conflicts: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct ProofArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    /// Proof file.
    #[arg(long)]
    proof: PathBuf,
}

#[derive(Args)]
struct ProofOutArgs {
    #[command(flatten)]
    inner: ProofArgs,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    inner: ProofOutArgs,
    /// Also check the interpolant.
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Alternating implication chain with `n` stages.
    Chain {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pigeonhole pair with `n` pigeons.
    Php {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Hidden-key hash query.
    HiddenKey {
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 4)]
        candidates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target a message outside the candidate list.
        #[arg(long)]
        unsat: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Hidden-key sweep over round counts, CSV output.
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16])]
        rounds: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        candidates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Mode::Sms, Mode::Specsms])]
        modes: Vec<Mode>,
        #[arg(long)]
        max_conflicts: Option<u64>,
        /// Per-instance wall-clock limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Sms => "sms",
            Mode::Specsms => "specsms",
        })
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_path<T>(path: &Path, r: specsms::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Input {
        path: path.to_owned(),
        source,
    })
}

fn load(args: &FormulaArgs) -> CliResult<PartitionedFormula> {
    match (&args.input, &args.secondary, &args.main) {
        (Some(p), _, _) => with_path(p, parse_msat(&read(p)?)),
        (None, Some(s), Some(m)) => {
            let sec = with_path(s, parse_dimacs(&read(s)?))?;
            let main = with_path(m, parse_dimacs(&read(m)?))?;
            let interface = match &args.interface {
                Some(p) => Some(with_path(p, parse_interface(&read(p)?))?),
                None => None,
            };
            let n = sec.n_vars.max(main.n_vars);
            Ok(load_partitioned(sec.clauses, main.clauses, n, interface)?)
        }
        _ => Err(CliError::Usage(
            "give an msat file or both --secondary and --main".into(),
        )),
    }
}

fn load_proof(path: &Path) -> CliResult<ModularProof> {
    with_path(path, ModularProof::parse(&read(path)?))
}

fn model_lines(model: &[bool]) -> String {
    let lits: Vec<String> = (1..model.len())
        .map(|v| if model[v] { format!("{v}") } else { format!("-{v}") })
        .chain(std::iter::once("0".to_string()))
        .collect();
    lits.chunks(16).map(|c| format!("v {}\n", c.join(" "))).collect()
}

fn report_check(check: &InterpolantCheck) -> CliResult<()> {
    match check {
        InterpolantCheck::Pass => Ok(()),
        InterpolantCheck::Fail { condition, .. } => Err(CliError::Usage(format!(
            "interpolant check failed: {condition:?}"
        ))),
    }
}

fn cmd_solve(a: &SolveArgs) -> CliResult<ExitCode> {
    let pf = load(&a.formula)?;
    if pf.dropped_tautologies > 0 {
        println!("c dropped {} tautological clauses", pf.dropped_tautologies);
    }
    let mut guidance = parse_profile(&a.guidance)?;
    let cfg = SolverConfig {
        speculation: matches!(a.mode, Mode::Specsms),
        max_conflicts: a.max_conflicts,
        time_limit: a.time_limit.map(Duration::from_secs_f64),
        proof: a.proof.is_some() || a.interpolate.is_some() || a.check,
        trace: a.trace.is_some(),
        check_sync: false,
    };
    let r = solve(&pf, guidance.as_mut(), &cfg)?;
    let s = &r.stats;
    println!(
        "c decisions {} conflicts {} refinements {} speculations {} copies {}",
        s.decisions, s.conflicts, s.refinements, s.speculations, s.copies
    );
    if let Some(p) = &a.trace {
        let text: String = r.trace.iter().map(|t| format!("{t}\n")).collect();
        write(p, &text)?;
    }
    match r.verdict {
        Verdict::Sat(model) => {
            if a.check && !pf.satisfied_by(&model) {
                return Err(CliError::Usage("model check failed".into()));
            }
            println!("s SATISFIABLE");
            print!("{}", model_lines(&model));
            Ok(ExitCode::from(10))
        }
        Verdict::Unsat(mut proof) => {
            if a.check {
                validate(&proof, &pf)?;
            }
            if a.trim || a.interpolate.is_some() {
                proof = trim(&proof, &pf)?;
                if a.check {
                    validate(&proof, &pf)?;
                }
            }
            if let Some(p) = &a.proof {
                write(p, &proof.to_text())?;
            }
            if let Some(p) = &a.interpolate {
                let itp = interpolate(&proof, &pf)?;
                if a.check {
                    report_check(&check_interpolant(&itp, &pf))?;
                }
                write(p, &itp.to_string())?;
            }
            println!("s UNSATISFIABLE");
            Ok(ExitCode::from(20))
        }
        Verdict::Indeterminate => {
            println!("s UNKNOWN");
            Ok(ExitCode::from(0))
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::CheckProof(a) => {
            let pf = load(&a.formula)?;
            let proof = load_proof(&a.proof)?;
            match validate(&proof, &pf) {
                Ok(()) => {
                    println!("s VALID {} steps", proof.len());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("s INVALID {e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::TrimProof(a) => {
            let pf = load(&a.inner.formula)?;
            let proof = load_proof(&a.inner.proof)?;
            let trimmed = trim(&proof, &pf)?;
            eprintln!("c trimmed {} -> {} steps", proof.len(), trimmed.len());
            emit(a.output.as_deref(), &trimmed.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Interpolate(a) => {
            let pf = load(&a.inner.inner.formula)?;
            let proof = load_proof(&a.inner.inner.proof)?;
            let itp = interpolate(&proof, &pf)?;
            if a.check {
                report_check(&check_interpolant(&itp, &pf))?;
            }
            emit(a.inner.output.as_deref(), &itp.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(g) => {
            let (text, output) = match g {
                GenCommand::Chain { n, output } => (write_msat(&gen_chain(n)?), output),
                GenCommand::Php { n, output } => (write_msat(&gen_php_pair(n)?.formula), output),
                GenCommand::HiddenKey {
                    rounds,
                    candidates,
                    seed,
                    unsat,
                    output,
                } => {
                    let hk = gen_hidden_key(rounds, candidates, seed, !unsat)?;
                    let sel: Vec<String> = hk.selector.iter().map(|v| v.to_string()).collect();
                    let text = format!(
                        "c expected {}\nc selector {}\n{}",
                        if hk.expected_sat { "SAT" } else { "UNSAT" },
                        sel.join(","),
                        write_msat(&hk.formula)
                    );
                    (text, output)
                }
            };
            emit(output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(BenchCommand::Sweep {
            rounds,
            candidates,
            seed,
            modes,
            max_conflicts,
            time_limit,
            output,
        }) => {
            let modes: Vec<SweepMode> = modes
                .iter()
                .map(|m| match m {
                    Mode::Sms => SweepMode::Sms,
                    Mode::Specsms => SweepMode::SpecSms,
                })
                .collect();
            let budget = Budget {
                conflicts: max_conflicts,
                time: Some(Duration::from_secs_f64(time_limit)),
            };
            let rows = sweep(&rounds, candidates, seed, &modes, &budget)?;
            emit(output.as_deref(), &to_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

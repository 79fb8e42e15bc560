//! `corrcap` — majorization-lattice operations, optimal separable
//! composites, two-qubit capacity curves, and the verification suites.
//!
//! Results go to stdout (JSON, or CSV for curves); the resolved
//! configuration is echoed to stderr as a single JSON line, including a
//! timestamp unless `--deterministic` is set. Exit codes: 0 success,
//! 1 property failure from `verify`, 2 usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use corrcap::composite::{build_optimal_separable, CompositeReport};
use corrcap::io::{
    self, load_distribution, load_marginal_set, load_state, sig9, DistributionDoc, StateDoc,
};
use corrcap::majorization::{compare, infimum, supremum, MajOrder, ProbVector};
use corrcap::suites::{run_suite, Suite};
use corrcap::twoqubit::{
    feline_state, fig1_curve, fig1_to_csv, sigma_classical, sigma_entangled, sigma_separable,
    QubitPair,
};

#[derive(Parser)]
#[command(name = "corrcap", version, about = "Correlative capacity of composite quantum states")]
struct Cli {
    /// Suppress the timestamp in the configuration echo.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Master seed for randomized suites.
    #[arg(long, global = true, env = "CORRCAP_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Majorization order and lattice operations on distribution files.
    Major {
        #[command(subcommand)]
        op: MajorOp,
    },
    /// Least-disordered separable composites.
    Composite {
        #[command(subcommand)]
        op: CompositeOp,
    },
    /// State-file analysis.
    State {
        #[command(subcommand)]
        op: StateOp,
    },
    /// Two-qubit optima, capacity curves, and feline states.
    Twoqubit {
        #[command(subcommand)]
        op: TwoqubitOp,
    },
    /// Randomized and exhaustive property suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum MajorOp {
    /// Compare two distributions under majorization.
    Cmp { a: PathBuf, b: PathBuf },
    /// Infimum (lattice meet) of one or more distributions.
    Inf {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Supremum (lattice join) of one or more distributions.
    Sup {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CompositeOp {
    /// Build the optimal separable composite of a marginal set.
    Build {
        marginals: PathBuf,
        /// Write the composite state file here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StateOp {
    /// Print the composite report of a state file.
    Analyze { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Classical,
    Separable,
    Entangled,
}

#[derive(Subcommand)]
enum TwoqubitOp {
    /// Closed-form optimal composite for one family.
    Optimal {
        #[arg(long)]
        pa: f64,
        #[arg(long)]
        pb: f64,
        #[arg(long, value_enum)]
        family: Family,
        /// Write the state file here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Capacity-versus-p_b curve at fixed p_a, as CSV.
    Fig1 {
        #[arg(long)]
        pa: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Feline state of n isospectral qudits.
    Feline {
        #[arg(long)]
        n: usize,
        /// Distribution file with the local spectrum.
        #[arg(long)]
        spectrum: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// Trial count; defaults to the suite's standard count.
    #[arg(long, default_value_t = 0)]
    trials: usize,
    /// Run trials concurrently (reports are identical either way).
    #[arg(long)]
    parallel: bool,
}

enum CliError {
    /// Bad flags, unreadable or malformed inputs: exit 2.
    Usage(String),
    /// A verify suite reported failures: exit 1.
    PropertyFailure,
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(0);
    echo_config(&cli, seed);
    match run(cli, seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::PropertyFailure) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// One-line JSON echo of the resolved configuration on stderr.
fn echo_config(cli: &Cli, seed: u64) {
    let command = match &cli.command {
        Command::Major { op } => match op {
            MajorOp::Cmp { a, b } => json!({"major": "cmp", "a": a, "b": b}),
            MajorOp::Inf { files } => json!({"major": "inf", "files": files}),
            MajorOp::Sup { files } => json!({"major": "sup", "files": files}),
        },
        Command::Composite { op } => match op {
            CompositeOp::Build { marginals, output } => {
                json!({"composite": "build", "marginals": marginals, "output": output})
            }
        },
        Command::State { op } => match op {
            StateOp::Analyze { file } => json!({"state": "analyze", "file": file}),
        },
        Command::Twoqubit { op } => match op {
            TwoqubitOp::Optimal { pa, pb, family, output } => {
                json!({"twoqubit": "optimal", "pa": pa, "pb": pb, "family": format!("{family:?}").to_lowercase(), "output": output})
            }
            TwoqubitOp::Fig1 { pa, steps, output } => {
                json!({"twoqubit": "fig1", "pa": pa, "steps": steps, "output": output})
            }
            TwoqubitOp::Feline { n, spectrum } => {
                json!({"twoqubit": "feline", "n": n, "spectrum": spectrum})
            }
        },
        Command::Verify(args) => {
            json!({"verify": args.suite, "trials": args.trials, "parallel": args.parallel})
        }
    };
    let mut config = json!({"command": command, "seed": seed});
    if !cli.deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        config["timestamp"] = json!(now);
    }
    eprintln!("{config}");
}

fn run(cli: Cli, seed: u64) -> Result<(), CliError> {
    match cli.command {
        Command::Major { op } => run_major(op),
        Command::Composite { op } => run_composite(op),
        Command::State { op } => run_state(op),
        Command::Twoqubit { op } => run_twoqubit(op),
        Command::Verify(args) => run_verify(args, seed),
    }
}

fn print_distribution(v: &ProbVector) {
    let doc = DistributionDoc::from_spectrum(v);
    println!("{}", serde_json::to_string(&doc).expect("serializable"));
}

/// Rounds every float in a JSON tree to nine significant digits.
fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(rounded) = n.as_f64().and_then(|x| serde_json::Number::from_f64(sig9(x))) {
                *value = serde_json::Value::Number(rounded);
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn print_report(report: &CompositeReport) {
    let mut value = serde_json::to_value(report).expect("serializable");
    round_json(&mut value);
    println!("{value}");
}

fn run_major(op: MajorOp) -> Result<(), CliError> {
    match op {
        MajorOp::Cmp { a, b } => {
            let left = load_distribution(&a)?;
            let right = load_distribution(&b)?;
            let word = match compare(&left, &right) {
                MajOrder::MajorizedBy => "MAJORIZED_BY",
                MajOrder::Majorizes => "MAJORIZES",
                MajOrder::Equal => "EQUAL",
                MajOrder::Incomparable => "INCOMPARABLE",
            };
            println!("{word}");
        }
        MajorOp::Inf { files } => {
            let set = load_all(&files)?;
            let meet = infimum(&set).map_err(|e| CliError::Usage(e.to_string()))?;
            print_distribution(&meet);
        }
        MajorOp::Sup { files } => {
            let set = load_all(&files)?;
            let join = supremum(&set).map_err(|e| CliError::Usage(e.to_string()))?;
            print_distribution(&join);
        }
    }
    Ok(())
}

fn load_all(files: &[PathBuf]) -> Result<Vec<ProbVector>, CliError> {
    files
        .iter()
        .map(|f| Ok(load_distribution(f)?))
        .collect()
}

fn write_state(path: &Path, state: &corrcap::DensityMatrix) -> Result<(), CliError> {
    io::write_json(path, &StateDoc::from_state(state))?;
    Ok(())
}

fn run_composite(op: CompositeOp) -> Result<(), CliError> {
    match op {
        CompositeOp::Build { marginals, output } => {
            let set = load_marginal_set(&marginals)?;
            let (sigma, ensemble) =
                build_optimal_separable(&set).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(path) = output {
                write_state(&path, &sigma)?;
            }
            let report = CompositeReport::for_composite(&sigma, &ensemble)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            print_report(&report);
        }
    }
    Ok(())
}

fn run_state(op: StateOp) -> Result<(), CliError> {
    match op {
        StateOp::Analyze { file } => {
            let rho = load_state(&file)?;
            let report =
                CompositeReport::for_state(&rho).map_err(|e| CliError::Usage(e.to_string()))?;
            print_report(&report);
        }
    }
    Ok(())
}

fn run_twoqubit(op: TwoqubitOp) -> Result<(), CliError> {
    match op {
        TwoqubitOp::Optimal { pa, pb, family, output } => {
            let pair = QubitPair::new(pa, pb).map_err(|e| CliError::Usage(e.to_string()))?;
            let sigma = match family {
                Family::Classical => sigma_classical(&pair),
                Family::Separable => sigma_separable(&pair),
                Family::Entangled => sigma_entangled(&pair),
            };
            if let Some(path) = output {
                write_state(&path, &sigma)?;
            }
            let report =
                CompositeReport::for_state(&sigma).map_err(|e| CliError::Usage(e.to_string()))?;
            print_report(&report);
        }
        TwoqubitOp::Fig1 { pa, steps, output } => {
            if steps < 2 {
                return Err(CliError::Usage("fig1 needs at least 2 steps".into()));
            }
            let rows = fig1_curve(pa, steps).map_err(|e| CliError::Usage(e.to_string()))?;
            let csv = fig1_to_csv(&rows);
            std::fs::write(&output, csv)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", output.display())))?;
            println!(
                "{}",
                json!({"rows": rows.len(), "output": output})
            );
        }
        TwoqubitOp::Feline { n, spectrum } => {
            let local = load_distribution(&spectrum)?;
            let (pure, decohered) =
                feline_state(n, &local).map_err(|e| CliError::Usage(e.to_string()))?;
            let c_pure: f64 = pure
                .marginals()
                .map_err(|e| CliError::Usage(e.to_string()))?
                .iter()
                .map(|m| m.von_neumann_entropy().expect("valid marginal"))
                .sum();
            let c_dec = corrcap::composite::correlation_information(&decohered)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            println!(
                "{}",
                json!({"c_pure": sig9(c_pure), "c_decohered": sig9(c_dec)})
            );
        }
    }
    Ok(())
}

fn run_verify(args: VerifyArgs, seed: u64) -> Result<(), CliError> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: String| CliError::Usage(e))?;
    let report = run_suite(suite, args.trials, seed, args.parallel);
    let mut value = serde_json::to_value(&report).expect("serializable");
    round_json(&mut value);
    println!("{value}");
    if report.failures > 0 {
        return Err(CliError::PropertyFailure);
    }
    Ok(())
}

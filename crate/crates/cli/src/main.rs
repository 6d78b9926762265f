use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use dfa_decomp::automata::dot::{apta_to_dot, dfa_to_dot, three_dfa_to_dot};
use dfa_decomp::automata::{Acceptor, Consistency, Decomposition, DecompositionDoc};
use dfa_decomp::bench::{compare_run, generate, write_metrics_csv, BenchError, BenchmarkSpec, Generator};
use dfa_decomp::encoding::EncodingKind;
use dfa_decomp::samples::{parse_samples, LabeledSamples, SampleFormat};
use dfa_decomp::sat::dimacs::parse_dimacs;
use dfa_decomp::sat::{self, SatStatus, SolverConfig};
use dfa_decomp::search::{solve_pareto, solve_states_optimal, SearchConfig, SearchError};
use dfa_decomp::{reduce_to_3dfa, Apta};

const EXIT_USAGE: u8 = 1;
const EXIT_NO_DECOMPOSITION: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Error)]
#[error("{message}")]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        let code = match &e {
            SearchError::NoDfas
            | SearchError::InvalidAllocation { .. }
            | SearchError::InvalidBound { .. }
            | SearchError::ArityMismatch { .. } => EXIT_USAGE,
            SearchError::SolverUnknown { .. } | SearchError::Solver(_) => EXIT_SOLVER,
            SearchError::BoundExceeded { .. }
            | SearchError::InternalInconsistency(_)
            | SearchError::Encoding(_) => EXIT_INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        let code = match &e {
            BenchError::InvalidSpec(_) | BenchError::Samples(_) => EXIT_USAGE,
            BenchError::InsufficientWords { .. } | BenchError::SearchSpaceTooLarge(_) => EXIT_NO_DECOMPOSITION,
            BenchError::Search(inner) => return CliError::from_search_ref(inner, e.to_string()),
            BenchError::Csv(_) | BenchError::Io(_) => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl CliError {
    fn from_search_ref(e: &SearchError, message: String) -> Self {
        let code = match e {
            SearchError::SolverUnknown { .. } | SearchError::Solver(_) => EXIT_SOLVER,
            SearchError::NoDfas => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        CliError { code, message }
    }
}

#[derive(Parser)]
#[command(name = "dfa-decomp", version, about = "Identify DFA decompositions from labeled words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the prefix tree and its reduced 3-valued DFA.
    #[command(name = "build-3dfa")]
    Build3dfa(BuildArgs),
    /// Pareto frontier of allocations with a fixed number of DFAs.
    IdentifyPareto(ParetoArgs),
    /// Decomposition with the fewest states in total.
    IdentifyStatesOptimal(StatesOptimalArgs),
    /// Check a decomposition against samples.
    Verify(VerifyArgs),
    /// Generate a random benchmark in the lines format.
    GenBench(GenBenchArgs),
    /// Run both encoders on the same samples and write metrics CSV.
    Compare(CompareArgs),
    /// Solve a DIMACS CNF file with the built-in solver (competition output).
    Sat(SatArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Sample file.
    input: PathBuf,
    #[arg(long, default_value = "lines")]
    format: SampleFormat,
}

#[derive(Args)]
struct SolverArgs {
    /// `builtin` or an external solver command; the CNF path is appended.
    #[arg(long, env = "DFA_DECOMP_SOLVER", default_value = "builtin")]
    solver: String,
    /// Per-call solver timeout.
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long, value_enum, default_value_t = EncoderArg::ThreeDfa)]
    encoder: EncoderArg,
    #[arg(long)]
    no_symmetry: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SearchConfig, CliError> {
        let solver = SolverConfig::from_spec(&self.solver)
            .map_err(|e| CliError::usage(e.to_string()))?
            .with_timeout(self.timeout_ms.map(Duration::from_millis));
        Ok(SearchConfig::default()
            .with_solver(solver)
            .with_encoder(self.encoder.into())
            .with_symmetry(!self.no_symmetry))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EncoderArg {
    #[value(name = "3dfa")]
    ThreeDfa,
    Apta,
}

impl From<EncoderArg> for EncodingKind {
    fn from(e: EncoderArg) -> Self {
        match e {
            EncoderArg::ThreeDfa => EncodingKind::ThreeDfa,
            EncoderArg::Apta => EncodingKind::AptaLegacy,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Graphviz export of the 3-valued DFA.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Graphviz export of the prefix tree.
    #[arg(long)]
    apta_dot: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of DFAs.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Frontier JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatesOptimalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Upper bound on the number of DFAs.
    #[arg(long)]
    max_n: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Allocations solved in parallel within one total.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Decomposition JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Graphviz export of the member DFAs, one file per member with the
    /// index appended.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Decomposition JSON, or a frontier list.
    #[arg(long)]
    decomposition: PathBuf,
}

#[derive(Args)]
struct GenBenchArgs {
    #[arg(long)]
    alphabet: usize,
    #[arg(long)]
    max_len: usize,
    /// Words per label.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value = "partial_order_tasks")]
    generator: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output sample file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "DFA_DECOMP_SOLVER", default_value = "builtin")]
    solver: String,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Benchmark id written in every row; defaults to the file stem.
    #[arg(long)]
    id: Option<String>,
    /// Metrics CSV; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SatArgs {
    cnf: PathBuf,
    #[arg(long)]
    timeout_ms: Option<u64>,
}

/// One frontier element in JSON.
#[derive(Serialize, Deserialize)]
struct FrontierEntry {
    allocation: Vec<usize>,
    #[serde(flatten)]
    decomposition: DecompositionDoc,
}

fn read_samples(args: &InputArgs) -> Result<LabeledSamples, CliError> {
    let text = read_file(&args.input)?;
    parse_samples(&text, args.format).map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn build_3dfa(args: BuildArgs) -> Result<(), CliError> {
    let samples = read_samples(&args.input)?;
    let apta = Apta::build(&samples);
    let tdfa = reduce_to_3dfa(&apta);
    tdfa.validate_against(&apta)
        .map_err(|e| CliError {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        })?;
    println!(
        "apta_states={} 3dfa_states={} merged={}",
        apta.num_states(),
        tdfa.num_states(),
        tdfa.merged().len()
    );
    if let Some(path) = &args.dot {
        write_file(path, &three_dfa_to_dot(&tdfa, samples.alphabet()))?;
    }
    if let Some(path) = &args.apta_dot {
        write_file(path, &apta_to_dot(&apta, samples.alphabet()))?;
    }
    if let Some(path) = &args.json {
        write_file(path, &to_json(&tdfa.to_doc(samples.alphabet())))?;
    }
    Ok(())
}

fn identify_pareto(args: ParetoArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let samples = read_samples(&args.input)?;
    let cfg = args.solver.config()?;
    let frontier = solve_pareto(&samples, args.n, &cfg)?;
    let mut docs = Vec::new();
    for (allocation, decomposition) in &frontier.entries {
        println!("allocation={allocation}");
        docs.push(FrontierEntry {
            allocation: allocation.parts().to_vec(),
            decomposition: decomposition.to_doc(samples.alphabet()),
        });
    }
    if let Some(path) = &args.out {
        write_file(path, &to_json(&docs))?;
    }
    Ok(())
}

fn identify_states_optimal(args: StatesOptimalArgs) -> Result<(), CliError> {
    let samples = read_samples(&args.input)?;
    let cfg = args.solver.config()?.with_jobs(args.jobs);
    let result = solve_states_optimal(&samples, &cfg, args.max_n)?;
    println!(
        "N={} allocation={} entropy={}",
        result.total(),
        result.allocation,
        result.allocation.entropy()
    );
    if let Some(path) = &args.out {
        write_file(path, &to_json(&result.decomposition.to_doc(samples.alphabet())))?;
    }
    if let Some(path) = &args.dot {
        for (k, dfa) in result.decomposition.dfas().iter().enumerate() {
            let mut name = path.clone().into_os_string();
            name.push(format!(".{k}"));
            write_file(Path::new(&name), &dfa_to_dot(dfa, samples.alphabet()))?;
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let samples = read_samples(&args.input)?;
    let text = read_file(&args.decomposition)?;
    let bad_json = |e: serde_json::Error| CliError::usage(format!("{}: {e}", args.decomposition.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad_json)?;
    let docs: Vec<DecompositionDoc> = if value.is_array() {
        serde_json::from_value(value).map_err(bad_json)?
    } else {
        vec![serde_json::from_value(value).map_err(bad_json)?]
    };
    if docs.is_empty() {
        return Err(CliError::usage("no decomposition in input"));
    }
    for doc in &docs {
        let d = Decomposition::from_doc(doc, samples.alphabet())
            .map_err(|e| CliError::usage(format!("{}: {e}", args.decomposition.display())))?;
        if let Consistency::Violation { word, kind } = d.verify(&samples) {
            println!(
                "violation word={} kind={}",
                samples.alphabet().display_word(&word),
                kind.as_str()
            );
            return Err(CliError {
                code: EXIT_NO_DECOMPOSITION,
                message: String::new(),
            });
        }
    }
    println!("consistent");
    Ok(())
}

fn gen_bench(args: GenBenchArgs) -> Result<(), CliError> {
    let spec = BenchmarkSpec {
        alphabet_size: args.alphabet,
        max_word_length: args.max_len,
        num_examples_per_label: args.count,
        generator: args.generator.parse::<Generator>()?,
        seed: args.seed,
    };
    let samples = generate(&spec)?;
    let text = samples.to_lines();
    match &args.out {
        Some(path) => write_file(path, &text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(e.to_string())),
    }
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let samples = read_samples(&args.input)?;
    let solver = SolverConfig::from_spec(&args.solver)
        .map_err(|e| CliError::usage(e.to_string()))?
        .with_timeout(args.timeout_ms.map(Duration::from_millis));
    let id = args.id.clone().unwrap_or_else(|| {
        args.input
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "bench".into())
    });
    let metrics = compare_run(&id, &samples, args.n, &solver)?;
    eprintln!(
        "apta_states={} 3dfa_states={} frontier_3dfa={} frontier_apta={}",
        metrics.acceptor_states_apta,
        metrics.acceptor_states_3dfa,
        metrics.frontier_3dfa.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
        metrics.frontier_apta.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
    );
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
            write_metrics_csv(file, &metrics.rows)?;
        }
        None => write_metrics_csv(io::stdout().lock(), &metrics.rows)?,
    }
    Ok(())
}

/// Competition conventions: exit 10 for sat, 20 for unsat.
fn run_sat(args: SatArgs) -> Result<u8, CliError> {
    let text = read_file(&args.cnf)?;
    let cnf = parse_dimacs(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.cnf.display())))?;
    let cfg = SolverConfig::builtin().with_timeout(args.timeout_ms.map(Duration::from_millis));
    let result = sat::solve(&cnf, &cfg).map_err(|e| CliError {
        code: EXIT_SOLVER,
        message: e.to_string(),
    })?;
    let mut out = io::stdout().lock();
    let io_err = |e: io::Error| CliError::usage(e.to_string());
    match result.status {
        SatStatus::Sat => {
            writeln!(out, "s SATISFIABLE").map_err(io_err)?;
            let model = result.assignment.expect("sat carries a model");
            let mut line = String::from("v");
            for (v, &value) in model.iter().enumerate().skip(1) {
                line.push_str(&format!(" {}", if value { v as i64 } else { -(v as i64) }));
            }
            line.push_str(" 0");
            writeln!(out, "{line}").map_err(io_err)?;
            Ok(10)
        }
        SatStatus::Unsat => {
            writeln!(out, "s UNSATISFIABLE").map_err(io_err)?;
            Ok(20)
        }
        SatStatus::Unknown { .. } => {
            writeln!(out, "s UNKNOWN").map_err(io_err)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Build3dfa(a) => build_3dfa(a).map(|_| 0),
        Command::IdentifyPareto(a) => identify_pareto(a).map(|_| 0),
        Command::IdentifyStatesOptimal(a) => identify_states_optimal(a).map(|_| 0),
        Command::Verify(a) => verify(a).map(|_| 0),
        Command::GenBench(a) => gen_bench(a).map(|_| 0),
        Command::Compare(a) => compare(a).map(|_| 0),
        Command::Sat(a) => run_sat(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

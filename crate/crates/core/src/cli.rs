//! Command-line front end.
//!
//! Machine-readable output goes to standard output (or `--out`), human
//! summaries to standard error. Exit codes: 0 success, 2 invalid input,
//! 3 incompatible request, 4 budget out of range, 5 enumeration cap exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench::{run_experiment, summarize, write_csv, write_json_lines, GeneratorConfig, Model, SuiteConfig};
use crate::design::{run_design, DesignOptions, Method, ObjectiveKind, SamplePolicy};
use crate::error::{Error, Result};
use crate::graph::{parse_graph, to_edge_list, to_json, Dag, GraphJson, Pdag, TargetSet};
use crate::mec::{MecCounter, RandomSource, Sampler, SamplerKind, DEFAULT_ENUMERATION_CAP};
use crate::orient::{interventional_essential_graph, Membership};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_CAP: i32 = 5;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Incompatible(_) | Error::SamplerExhausted(_) => EXIT_INCOMPATIBLE,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

#[derive(Parser, Debug)]
#[command(name = "causal-design", version, about = "Intervention design over Markov equivalence classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the number of DAGs in the class (optionally consistent with a prior).
    Count(CountArgs),
    /// Draw members of the class as JSON lines.
    Sample(SampleArgs),
    /// Choose intervention targets.
    Design(DesignArgs),
    /// Score a target set against a ground-truth DAG.
    Evaluate(EvaluateArgs),
    /// Generate a random graph.
    Gen(GenArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Hypothesis graph: the essential graph with extra orientations.
    #[arg(long)]
    pub prior: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SamplerArg {
    Uniform,
    Fast,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(short = 'n', long = "n", default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SamplerArg::Uniform)]
    pub sampler: SamplerArg,
    /// Integer seed, or `random` for an entropy-drawn one.
    #[arg(long, default_value = "0")]
    pub seed: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ObjectiveArg {
    Average,
    Worst,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    GreedyExact,
    GreedyUnbiased,
    GreedyFast,
    Lazy,
    BruteForce,
    TreeMinimax,
    TreeGreedy,
    Rand,
    Maxdeg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PolicyArg {
    PerQuery,
    PerRound,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(short = 'k', long = "k")]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Average)]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = MethodArg::GreedyExact)]
    pub method: MethodArg,
    /// Sample count for sampled methods.
    #[arg(long, conflicts_with_all = ["eps_prime", "delta_prime"])]
    pub samples: Option<usize>,
    /// Overall approximation slack; derives the sample count with --delta-prime.
    #[arg(long, requires = "delta_prime")]
    pub eps_prime: Option<f64>,
    #[arg(long, requires = "eps_prime")]
    pub delta_prime: Option<f64>,
    #[arg(long, value_enum, default_value_t = PolicyArg::PerQuery)]
    pub sample_policy: PolicyArg,
    /// Largest class the enumeration-based methods may materialise.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub member_cap: usize,
    #[arg(long, default_value = "0")]
    pub seed: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Comma-separated vertex names; empty for no targets.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub targets: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    ErDag,
    ChordalPeo,
    TreeBa,
    TreeBoundedDegree,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Edges,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0.2)]
    pub r: f64,
    #[arg(long, default_value_t = 4)]
    pub degree_bound: usize,
    #[arg(long, default_value = "0")]
    pub seed: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional JSON-lines copy of the records.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing machine
/// output to `stdout` and messages to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let invocation: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, &invocation, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, invocation: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Count(a) => cmd_count(&a, stdout),
        Command::Sample(a) => cmd_sample(&a, stdout, stderr),
        Command::Design(a) => cmd_design(&a, invocation, stdout, stderr),
        Command::Evaluate(a) => cmd_evaluate(&a, stdout),
        Command::Gen(a) => cmd_gen(&a, stdout, stderr),
        Command::Bench(a) => cmd_bench(&a, invocation, stdout, stderr),
    }
}

fn read_graph(path: &Path) -> Result<Pdag> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidGraph(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
}

fn parse_seed(s: &str, stderr: &mut dyn Write) -> Result<u64> {
    if s == "random" {
        let seed: u64 = rand::random();
        let _ = writeln!(stderr, "seed: {seed}");
        return Ok(seed);
    }
    s.parse().map_err(|_| Error::Domain(format!("seed must be an integer or \"random\", got {s:?}")))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Puts `h`'s edges on the vertex ids of `g` by name.
fn align_names(g: &Pdag, h: &Pdag) -> Result<Pdag> {
    if g.names() == h.names() {
        return Ok(h.clone());
    }
    let raw = GraphJson { vertices: g.names(), ..GraphJson::from_graph(h) };
    if h.vertex_count() != g.vertex_count() {
        return Err(Error::InvalidGraph("graphs have different vertex sets".into()));
    }
    raw.to_graph().map_err(|e| Error::InvalidGraph(format!("graphs have different vertex sets: {e}")))
}

fn cmd_count(a: &CountArgs, stdout: &mut dyn Write) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let counter = MecCounter::new();
    let n = match &a.prior {
        None => counter.count(&g)?,
        Some(path) => {
            let h = align_names(&g, &read_graph(path)?)?;
            counter.count_with_prior(&g, &crate::mec::Hypothesis::new(&g, h)?)?
        }
    };
    writeln!(stdout, "{n}")?;
    Ok(())
}

fn cmd_sample(a: &SampleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    if a.n == 0 {
        return Err(Error::Domain("-n must be at least 1".into()));
    }
    let g = read_graph(&a.graph)?;
    let seed = parse_seed(&a.seed, stderr)?;
    let kind = match a.sampler {
        SamplerArg::Uniform => SamplerKind::Uniform,
        SamplerArg::Fast => SamplerKind::Fast,
    };
    let sampler = Sampler::new(kind, &g)?;
    let mut text = String::new();
    for i in 0..a.n {
        let d = sampler.sample(&mut RandomSource::new(seed, i as u64))?;
        text.push_str(&to_json(&d));
        text.push('\n');
    }
    emit(&a.out, &text, stdout)
}

fn cmd_design(a: &DesignArgs, invocation: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let seed = parse_seed(&a.seed, stderr)?;
    let objective = match a.objective {
        ObjectiveArg::Average => ObjectiveKind::Average,
        ObjectiveArg::Worst => ObjectiveKind::Worst,
    };
    let method = match a.method {
        MethodArg::GreedyExact => Method::GreedyExact,
        MethodArg::GreedyUnbiased => Method::GreedyUnbiased,
        MethodArg::GreedyFast => Method::GreedyFast,
        MethodArg::Lazy => Method::Lazy,
        MethodArg::BruteForce => Method::BruteForce,
        MethodArg::TreeMinimax => Method::TreeMinimax,
        MethodArg::TreeGreedy => Method::TreeGreedy,
        MethodArg::Rand => Method::Rand,
        MethodArg::Maxdeg => Method::Maxdeg,
    };
    let options = DesignOptions {
        seed,
        samples: a.samples,
        eps_prime: a.eps_prime,
        delta_prime: a.delta_prime,
        policy: match a.sample_policy {
            PolicyArg::PerQuery => SamplePolicy::PerQuery,
            PolicyArg::PerRound => SamplePolicy::PerRound,
        },
        member_cap: a.member_cap,
        ..Default::default()
    };
    let report = run_design(&g, a.k, objective, method, &options)?;
    let _ = writeln!(
        stderr,
        "{}: targets [{}], objective {:.6}, {} evaluations",
        report.method,
        report.targets.names(&g).join(", "),
        report.objective_f64(),
        report.evaluations
    );
    let mut value = report.to_json(&g);
    value["invocation"] = provenance("design", invocation, seed);
    emit(&a.out, &format!("{value}\n"), stdout)
}

fn provenance(command: &str, invocation: &[String], seed: u64) -> serde_json::Value {
    json!({
        "command": command,
        "args": invocation,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn cmd_evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let truth = Dag::from_pdag(align_names(&g, &read_graph(&a.truth)?)?)?;
    let names: Vec<&str> = a.targets.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let targets = TargetSet::from_names(&g, &names)?;
    let result = interventional_essential_graph(&g, &targets, &truth, Membership::Check)?;
    let m = g.num_undirected();
    let ratio = if m == 0 { 1.0 } else { result.gain() as f64 / m as f64 };
    let resolved: Vec<[String; 2]> = result.newly_directed.iter().map(|&(a, b)| [g.name(a), g.name(b)]).collect();
    let value = json!({
        "gain": result.gain(),
        "resolved_edges": resolved,
        "discovered_edge_ratio": ratio,
    });
    writeln!(stdout, "{value}")?;
    Ok(())
}

fn cmd_gen(a: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let seed = parse_seed(&a.seed, stderr)?;
    let model = match a.model {
        ModelArg::ErDag => Model::ErDag,
        ModelArg::ChordalPeo => Model::ChordalPeo,
        ModelArg::TreeBa => Model::TreeBa,
        ModelArg::TreeBoundedDegree => Model::TreeBoundedDegree,
    };
    let config = GeneratorConfig { model, p: a.p, r: a.r, degree_bound: a.degree_bound, seed };
    let g = config.generate(&mut RandomSource::new(seed, 0))?;
    let text = match a.format {
        FormatArg::Json => format!("{}\n", to_json(&g)),
        FormatArg::Edges => to_edge_list(&g),
    };
    let _ = writeln!(stderr, "{}: {} vertices, {} edges", model.name(), g.vertex_count(), g.num_edges());
    emit(&a.out, &text, stdout)
}

fn cmd_bench(a: &BenchArgs, invocation: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&a.config)?;
    let config: SuiteConfig = serde_json::from_str(&text)?;
    for s in &config.suites {
        GeneratorConfig { model: s.model, p: s.p, r: s.r, degree_bound: s.degree_bound, seed: 0 }.validate()?;
    }
    let records = run_experiment(&config);
    write_csv(&records, fs::File::create(&a.out)?)?;
    if let Some(path) = &a.jsonl {
        write_json_lines(&records, io::BufWriter::new(fs::File::create(path)?))?;
    }
    let summary = summarize(&records);
    for row in &summary {
        let _ = writeln!(
            stderr,
            "suite {} {}: ratio {} over {} instances ({} failed)",
            row.suite,
            row.method,
            row.mean_ratio.map_or("n/a".to_string(), |r| format!("{r:.4}")),
            row.instances,
            row.failures
        );
    }
    let value = json!({
        "summary": summary,
        "records": records.len(),
        "invocation": provenance("bench", invocation, config.seed),
    });
    writeln!(stdout, "{value}")?;
    Ok(())
}

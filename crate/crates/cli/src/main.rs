use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnot_synth::synth_constrained::{ConstrainedSolver, Mode};
use cnot_synth::synth_full::{SolverKind, SynthesisConfig};
use cnot_synth::topology::parse_architecture;
use cnot_synth::{random_operator, QubitOrdering};
use cnot_synth_cli::bench::{run_experiment, Experiment, ExperimentSpec};
use cnot_synth_cli::{
    check, load_circuit, load_matrix, parse_perm, perm_to_text, read_text, synthesize, thread_pool, write_text,
    CliError, Job, Result, Target, DEFAULT_TIME_LIMIT,
};

/// CNOT circuit synthesis by syndrome decoding.
#[derive(Parser)]
#[command(name = "cnotsynth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit for a matrix file.
    Synth(SynthArgs),
    /// Verify a circuit against a matrix and, optionally, a coupling graph.
    Check(CheckArgs),
    /// Run an experiment and write a CSV summary.
    Bench(BenchArgs),
    /// Generate random operators or coupling graphs.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args)]
struct TargetArgs {
    /// Architecture: a tuned name (`16q-square`, `19q-line`, ...),
    /// `complete:N`, `line:N`, `grid:RxC`, `gridd:RxC`, `radius:RxC:R` or a preset.
    #[arg(long, conflicts_with = "graph")]
    arch: Option<String>,
    /// Edge-list file of the coupling graph.
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl TargetArgs {
    fn resolve(&self) -> Result<Target> {
        match &self.graph {
            Some(path) => Target::from_graph_file(path),
            None => Target::from_arch(self.arch.as_deref()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Syndrome,
    Pmh,
    Gauss,
}

#[derive(Args)]
struct SynthArgs {
    /// Matrix file ("n m" header, then rows of 0/1).
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, value_enum, default_value = "syndrome")]
    method: Method,
    /// Decoder: greedy, tree:W:D, isd:N, exact:B (all-to-all); greedy, fast,
    /// exact:B (constrained).
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    niter_syndrome: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shortest paths kept per pair of qubits; 0 keeps all.
    #[arg(long)]
    sp_max: Option<usize>,
    #[arg(long)]
    lc_max: Option<usize>,
    #[arg(long)]
    niter: Option<usize>,
    /// Ordering file: one line of ranks.
    #[arg(long)]
    ordering: Option<PathBuf>,
    #[arg(long)]
    use_symmetries: Option<bool>,
    /// exact or perm.
    #[arg(long)]
    mode: Option<String>,
    /// Seconds after which restarts stop.
    #[arg(long)]
    time_limit: Option<f64>,
    /// PMH section size.
    #[arg(long)]
    partition_size: Option<usize>,
    /// Circuit output file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Where to write the output relabeling, if any.
    #[arg(long)]
    perm_out: Option<PathBuf>,
    /// Append the JSON stats line here instead of stderr.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    /// Output relabeling file written by `synth --perm-out`.
    #[arg(long)]
    perm: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment spec; flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// ratio_pmh, isd_sweep, input_size, table_exact, table_perm, radius, augment.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long, value_delimiter = ',')]
    arch: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    ops: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    niter: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    #[arg(long)]
    input_gates: Option<usize>,
    #[arg(long)]
    time_limit: Option<f64>,
    /// CSV output; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Per-operator JSON lines.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random invertible operator: the product of random CNOTs.
    Operator {
        #[arg(long)]
        n: usize,
        /// Number of random gates; n² when absent.
        #[arg(long)]
        gates: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Coupling graph as an edge list, optionally with random extra edges.
    Graph {
        #[arg(long)]
        arch: String,
        #[arg(long, default_value_t = 0)]
        extra_edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn append_line(path: &Path, line: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    writeln!(f, "{line}").map_err(io)
}

fn build_job(args: &SynthArgs, target: &Target) -> Result<Job> {
    let unsupported = |flag: &str| Err(CliError::Usage(format!("--{flag} only applies to the syndrome method")));
    match args.method {
        Method::Gauss | Method::Pmh if args.solver.is_some() => return unsupported("solver"),
        Method::Gauss => return Ok(Job::Gauss),
        Method::Pmh => {
            return Ok(Job::Pmh {
                partition: args.partition_size,
            })
        }
        Method::Syndrome => {}
    }
    match target {
        Target::AllToAll => {
            let mut cfg = SynthesisConfig::default();
            if let Some(s) = &args.solver {
                cfg.solver = s.parse::<SolverKind>()?;
            }
            if let Some(k) = args.niter_syndrome {
                cfg.niter_syndrome = k;
            }
            cfg.validate()?;
            Ok(Job::Syndrome(cfg))
        }
        Target::Graph { graph, cfg, .. } => {
            let mut cfg = cfg.clone();
            if let Some(s) = &args.solver {
                cfg.solver = s.parse::<ConstrainedSolver>()?;
            }
            if let Some(k) = args.niter_syndrome {
                cfg.niter_syndrome = k;
            }
            if let Some(k) = args.sp_max {
                cfg.sp_max = (k > 0).then_some(k);
            }
            if let Some(k) = args.lc_max {
                cfg.lc_max = k;
            }
            if let Some(k) = args.niter {
                cfg.niter = k;
            }
            if let Some(path) = &args.ordering {
                cfg.ordering = QubitOrdering::from_text(&read_text(path)?)?;
            }
            if let Some(b) = args.use_symmetries {
                cfg.use_symmetries = b;
            }
            if let Some(m) = &args.mode {
                cfg.mode = m.parse::<Mode>()?;
            }
            cfg.time_limit = Some(args.time_limit.map_or(DEFAULT_TIME_LIMIT, Duration::from_secs_f64));
            cfg.validate(graph)?;
            Ok(Job::Constrained {
                graph: graph.clone(),
                cfg,
            })
        }
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let a = load_matrix(&args.matrix)?;
    let target = args.target.resolve()?;
    let job = build_job(args, &target)?;
    let (out, record) = synthesize(&a, &target, &job, args.seed)?;
    emit(args.out.as_deref(), &out.circuit.to_text())?;
    if let Some(path) = &args.perm_out {
        write_text(path, &perm_to_text(&out.perm))?;
    }
    let line = serde_json::to_string(&record)?;
    match &args.stats {
        Some(path) => append_line(path, &line),
        None => {
            eprintln!("{line}");
            Ok(())
        }
    }
}

fn cmd_check(args: &CheckArgs) -> Result<()> {
    let circuit = load_circuit(&args.circuit)?;
    let a = load_matrix(&args.matrix)?;
    let target = args.target.resolve()?;
    let perm = args.perm.as_deref().map(|p| parse_perm(&read_text(p)?)).transpose()?;
    check(&circuit, &a, target.graph(), perm.as_deref())?;
    println!("pass: {} gates", circuit.len());
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut spec = match (&args.spec, &args.experiment) {
        (Some(path), _) => ExperimentSpec::from_json(&read_text(path)?)?,
        (None, Some(id)) => ExperimentSpec::new(id.parse::<Experiment>()?),
        (None, None) => return Err(CliError::Usage("give --spec or --experiment".into())),
    };
    if let Some(id) = &args.experiment {
        spec.experiment = id.parse()?;
    }
    if !args.arch.is_empty() {
        spec.architectures = args.arch.clone();
    }
    if !args.n.is_empty() {
        spec.n = args.n.clone();
    }
    if !args.params.is_empty() {
        spec.params = args.params.clone();
    }
    spec.ops = args.ops.unwrap_or(spec.ops);
    spec.seed = args.seed.unwrap_or(spec.seed);
    spec.solver = args.solver.clone().or(spec.solver);
    spec.niter = args.niter.or(spec.niter);
    spec.input_gates = args.input_gates.or(spec.input_gates);
    spec.time_limit_s = args.time_limit.or(spec.time_limit_s);
    let report = thread_pool()?.install(|| run_experiment(&spec))?;
    let out = args.out.clone().or(spec.output.clone());
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    emit(out.as_deref(), &String::from_utf8_lossy(&csv))?;
    if let Some(path) = &args.stats {
        let mut lines = Vec::new();
        report.write_jsonl(&mut lines)?;
        write_text(path, &String::from_utf8_lossy(&lines))?;
    }
    Ok(())
}

fn cmd_gen(cmd: &GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Operator { n, gates, seed, out } => {
            if *n < 2 {
                return Err(CliError::Usage("n must be at least 2".into()));
            }
            let a = random_operator(*n, gates.unwrap_or(n * n), *seed);
            emit(out.as_deref(), &a.to_text())
        }
        GenCommand::Graph {
            arch,
            extra_edges,
            seed,
            out,
        } => {
            let g = parse_architecture(arch)?.augment_random(*extra_edges, *seed)?;
            emit(out.as_deref(), &g.to_edge_list())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(c) => cmd_gen(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

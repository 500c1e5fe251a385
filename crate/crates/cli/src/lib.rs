//! Front end for `cnot-synth`: file I/O, one-shot synthesis jobs, circuit
//! verification and the benchmark harness behind the `cnotsynth` binary.

pub mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cnot_synth::synth_constrained::{
    synth_general_constrained_report, table1_setup, ConstrainedConfig, TABLE1_ARCHITECTURES,
};
use cnot_synth::synth_full::{gaussian_elimination, pmh, synth_general, SynthesisConfig};
use cnot_synth::topology::parse_architecture;
use cnot_synth::{BitMatrix, CnotCircuit, ConnectivityGraph};
use serde::Serialize;
use thiserror::Error;

/// Wall-clock cap per operator for constrained synthesis.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(600);

/// Environment variable holding the number of benchmark workers.
pub const THREADS_ENV: &str = "CNOTSYNTH_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: cnot_synth::Error,
    },
    #[error(transparent)]
    Synth(#[from] cnot_synth::Error),
    #[error("{0}")]
    Usage(String),
    #[error("check failed ({check}): {detail}")]
    Check { check: &'static str, detail: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for a failed verification, 2 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parsed<T>(path: &Path, r: cnot_synth::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Parse {
        context: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path) -> Result<BitMatrix> {
    parsed(path, BitMatrix::from_text(&read_text(path)?))
}

pub fn load_circuit(path: &Path) -> Result<CnotCircuit> {
    parsed(path, CnotCircuit::from_text(&read_text(path)?))
}

pub fn load_graph(path: &Path) -> Result<ConnectivityGraph> {
    parsed(path, ConnectivityGraph::load_edge_list(&read_text(path)?))
}

/// A permutation written as one line of space-separated indices.
pub fn parse_perm(text: &str) -> Result<Vec<usize>> {
    let perm: Vec<usize> = text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad permutation entry {t:?}"))))
        .collect::<Result<_>>()?;
    let mut seen = vec![false; perm.len()];
    for &p in &perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(CliError::Usage("not a permutation".into()));
        }
    }
    Ok(perm)
}

pub fn perm_to_text(perm: &[usize]) -> String {
    let items: Vec<String> = perm.iter().map(usize::to_string).collect();
    items.join(" ") + "\n"
}

/// The hardware a circuit is synthesized for.
#[derive(Clone, Debug)]
pub enum Target {
    AllToAll,
    /// A coupling graph with its default (or tuned) constrained configuration.
    Graph {
        name: String,
        graph: ConnectivityGraph,
        cfg: ConstrainedConfig,
    },
}

impl Target {
    /// `None` or `complete:N` is all-to-all; a tuned architecture name
    /// (`16q-square`, ...) brings its tuned configuration; anything else is
    /// parsed as an architecture description.
    pub fn from_arch(arch: Option<&str>) -> Result<Self> {
        let Some(arch) = arch else {
            return Ok(Target::AllToAll);
        };
        if arch.starts_with("complete:") {
            parse_architecture(arch)?;
            return Ok(Target::AllToAll);
        }
        let (graph, cfg) = if TABLE1_ARCHITECTURES.contains(&arch) {
            table1_setup(arch)?
        } else {
            let g = parse_architecture(arch)?;
            let cfg = ConstrainedConfig::for_graph(&g);
            (g, cfg)
        };
        Ok(Target::Graph {
            name: arch.to_owned(),
            graph,
            cfg,
        })
    }

    pub fn from_graph_file(path: &Path) -> Result<Self> {
        let graph = load_graph(path)?;
        let cfg = ConstrainedConfig::for_graph(&graph);
        Ok(Target::Graph {
            name: path.display().to_string(),
            graph,
            cfg,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Target::AllToAll => "all-to-all",
            Target::Graph { name, .. } => name,
        }
    }

    pub fn graph(&self) -> Option<&ConnectivityGraph> {
        match self {
            Target::AllToAll => None,
            Target::Graph { graph, .. } => Some(graph),
        }
    }
}

/// One synthesis method with its parameters. Seeds are supplied per run.
#[derive(Clone, Debug)]
pub enum Job {
    Gauss,
    Pmh { partition: Option<usize> },
    Syndrome(SynthesisConfig),
    Constrained {
        graph: ConnectivityGraph,
        cfg: ConstrainedConfig,
    },
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub circuit: CnotCircuit,
    /// Row `i` of the input is row `perm[i]` of the circuit's operator.
    pub perm: Vec<usize>,
    pub time_s: f64,
    pub timed_out: bool,
}

impl Job {
    pub fn name(&self) -> String {
        match self {
            Job::Gauss => "gauss".into(),
            Job::Pmh { .. } => "pmh".into(),
            Job::Syndrome(cfg) => format!("syndrome-{}", cfg.solver),
            Job::Constrained { cfg, .. } => format!("syndrome-{}", cfg.mode),
        }
    }

    pub fn run(&self, a: &BitMatrix, seed: u64) -> Result<Outcome> {
        let start = Instant::now();
        let identity = || (0..a.n_rows()).collect::<Vec<_>>();
        let (circuit, perm, timed_out) = match self {
            Job::Gauss => (gaussian_elimination(a)?, identity(), false),
            Job::Pmh { partition } => (pmh(a, *partition)?, identity(), false),
            Job::Syndrome(cfg) => {
                let cfg = SynthesisConfig { seed, ..*cfg };
                let (c, p) = synth_general(a, &cfg)?;
                (c, p, false)
            }
            Job::Constrained { graph, cfg } => {
                let cfg = ConstrainedConfig { seed, ..cfg.clone() };
                let out = synth_general_constrained_report(a, graph, &cfg)?;
                (out.circuit, out.perm, out.timed_out)
            }
        };
        Ok(Outcome {
            circuit,
            perm,
            time_s: start.elapsed().as_secs_f64(),
            timed_out,
        })
    }
}

/// Stats record of one `synth` run, written as a JSON line.
#[derive(Clone, Debug, Serialize)]
pub struct SynthRecord {
    pub architecture: String,
    pub n: usize,
    pub method: String,
    pub mode: String,
    pub size: usize,
    pub time_s: f64,
    pub seed: u64,
    pub timed_out: bool,
    /// Output relabeling, present only when it is not the identity.
    pub perm: Option<Vec<usize>>,
    /// Size of the PMH baseline on the same matrix (all-to-all only).
    pub pmh_size: Option<usize>,
}

/// Runs `job` on `a` and builds its stats record.
pub fn synthesize(a: &BitMatrix, target: &Target, job: &Job, seed: u64) -> Result<(Outcome, SynthRecord)> {
    if !a.is_square() {
        return Err(CliError::Usage(format!("operator is {}x{}, not square", a.n_rows(), a.n_cols())));
    }
    if let Some(g) = target.graph() {
        if g.n_nodes() != a.n_rows() {
            return Err(CliError::Usage(format!(
                "{}-qubit operator on a {}-node graph",
                a.n_rows(),
                g.n_nodes()
            )));
        }
        if !matches!(job, Job::Constrained { .. }) {
            return Err(CliError::Usage("only the syndrome method handles connectivity constraints".into()));
        }
    }
    let out = job.run(a, seed)?;
    let pmh_size = match (target, job) {
        (Target::AllToAll, Job::Syndrome(_)) => Some(pmh(a, None)?.len()),
        _ => None,
    };
    let mode = match job {
        Job::Constrained { cfg, .. } => cfg.mode.to_string(),
        Job::Syndrome(_) => "perm".to_owned(),
        _ => "exact".to_owned(),
    };
    let is_identity = out.perm.iter().enumerate().all(|(i, &p)| i == p);
    let record = SynthRecord {
        architecture: target.name().to_owned(),
        n: a.n_rows(),
        method: job.name(),
        mode,
        size: out.circuit.len(),
        time_s: out.time_s,
        seed,
        timed_out: out.timed_out,
        perm: (!is_identity).then(|| out.perm.clone()),
        pmh_size,
    };
    Ok((out, record))
}

/// Verifies that `circuit` implements `a` up to `perm` (row `i` of `a` is
/// row `perm[i]` of the circuit's operator) and, if given, uses only edges
/// of `graph`. The error names the first failing check.
pub fn check(circuit: &CnotCircuit, a: &BitMatrix, graph: Option<&ConnectivityGraph>, perm: Option<&[usize]>) -> Result<()> {
    let fail = |check, detail: String| Err(CliError::Check { check, detail });
    let n = circuit.n_wires();
    if !a.is_square() || a.n_rows() != n {
        return fail("dimensions", format!("{n}-wire circuit for a {}x{} matrix", a.n_rows(), a.n_cols()));
    }
    if let Some(g) = graph {
        if g.n_nodes() != n {
            return fail("dimensions", format!("{n}-wire circuit on a {}-node graph", g.n_nodes()));
        }
        if let Some(i) = circuit.first_violation(g) {
            let gate = circuit.gates()[i];
            return fail(
                "compliance",
                format!("gate {i} (CNOT {} {}) is not an edge", gate.control, gate.target),
            );
        }
    }
    if let Some(p) = perm {
        if p.len() != n {
            return fail("permutation", format!("{} entries for {n} wires", p.len()));
        }
    }
    let sim = circuit.simulate();
    for i in 0..n {
        let row = perm.map_or(i, |p| p[i]);
        if sim.row_vec(row) != a.row_vec(i) {
            return fail("simulation", format!("row {i} differs"));
        }
    }
    Ok(())
}

/// Worker pool sized by [`THREADS_ENV`] (all cores when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

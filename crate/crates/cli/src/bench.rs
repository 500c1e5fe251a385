//! Experiment harness: random operators per point, several methods per
//! operator, one summary row per (point, method).

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use cnot_synth::synth_constrained::{table1_setup, ConstrainedConfig, Mode};
use cnot_synth::synth_full::{derive_seed, SolverKind, SynthesisConfig};
use cnot_synth::topology::parse_radius;
use cnot_synth::{random_operator, BitMatrix, ConnectivityGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{CliError, Job, Result, DEFAULT_TIME_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Syndrome vs PMH on dense all-to-all operators, per size.
    RatioPmh,
    /// ISD iteration counts against the plain greedy, per size.
    IsdSweep,
    /// Input circuit length sweep at fixed size.
    InputSize,
    /// Tuned architectures, exact synthesis.
    TableExact,
    /// Tuned architectures, synthesis up to a row permutation.
    TablePerm,
    /// Grids with growing interaction radius.
    Radius,
    /// A line with more and more random extra edges.
    Augment,
}

impl FromStr for Experiment {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| CliError::Usage(format!("unknown experiment {s:?}")))
    }
}

fn default_ops() -> usize {
    20
}

/// Everything needed to reproduce one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    /// Architecture names or descriptions (constrained experiments).
    #[serde(default)]
    pub architectures: Vec<String>,
    /// Operator sizes (all-to-all experiments).
    #[serde(default)]
    pub n: Vec<usize>,
    /// Operators per point.
    #[serde(default = "default_ops")]
    pub ops: usize,
    #[serde(default)]
    pub seed: u64,
    /// All-to-all decoder, e.g. `greedy`, `tree:8:4`, `isd:500`.
    #[serde(default)]
    pub solver: Option<String>,
    /// Restarts per ordering for constrained runs (overrides tuned values).
    #[serde(default)]
    pub niter: Option<usize>,
    /// Swept values: ISD iterations, input lengths, radii or extra edges.
    #[serde(default)]
    pub params: Vec<String>,
    /// Gates in each random input circuit; `n²` when absent.
    #[serde(default)]
    pub input_gates: Option<usize>,
    #[serde(default)]
    pub time_limit_s: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            architectures: Vec::new(),
            n: Vec::new(),
            ops: default_ops(),
            seed: 0,
            solver: None,
            niter: None,
            params: Vec::new(),
            input_gates: None,
            time_limit_s: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Published mean sizes for a tuned architecture: the Steiner-tree method
/// and the syndrome method, for exact synthesis and up to a permutation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Published {
    pub architecture: &'static str,
    pub steiner_exact: f64,
    pub syndrome_exact: f64,
    pub steiner_perm: f64,
    pub syndrome_perm: f64,
}

const fn published(a: &'static str, se: f64, ye: f64, sp: f64, yp: f64) -> Published {
    Published {
        architecture: a,
        steiner_exact: se,
        syndrome_exact: ye,
        steiner_perm: sp,
        syndrome_perm: yp,
    }
}

/// Reference numbers for the tuned architectures, 50 random operators each.
pub const PUBLISHED: &[Published] = &[
    published("9q-square", 61.0, 46.0, 42.0, 42.0),
    published("rigetti-16q", 271.0, 245.0, 231.0, 232.0),
    published("ibm-qx5", 245.0, 181.0, 194.0, 169.0),
    published("16q-square", 206.0, 155.0, 167.0, 144.0),
    published("19q-line", 453.0, 454.0, 393.0, 434.0),
    published("ibm-q20-tokyo", 294.0, 211.0, 250.0, 199.0),
    published("25q-square", 516.0, 397.0, 453.0, 381.0),
    published("25q-square-diag", 411.0, 299.0, 358.0, 284.0),
    published("36q-square", 1066.0, 865.0, 983.0, 839.0),
    published("36q-square-diag", 861.0, 645.0, 789.0, 623.0),
    published("49q-square", 1978.0, 1633.0, 1878.0, 1597.0),
    published("49q-square-diag", 1605.0, 1230.0, 1512.0, 1199.0),
    published("64q-square", 3368.0, 2771.0, 3243.0, 2725.0),
    published("81q-square", 5372.0, 4398.0, 5223.0, 4334.0),
];

pub fn published_for(architecture: &str) -> Option<&'static Published> {
    PUBLISHED.iter().find(|p| p.architecture == architecture)
}

/// One CSV row. Savings are `(baseline - size) / baseline` per operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub method: String,
    pub n: usize,
    pub mean_size: f64,
    pub min_saving: f64,
    pub max_saving: f64,
    pub positive_fraction: f64,
    pub mean_time_s: f64,
    pub seed: u64,
    /// Mean size over the baseline's mean size.
    pub ratio: f64,
    pub mean_saving: f64,
    pub baseline: String,
    pub architecture: String,
    pub param: String,
    pub ops: usize,
    pub timeouts: usize,
}

/// Per-operator result, also emitted as a JSON line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpRecord {
    pub experiment: Experiment,
    pub architecture: String,
    pub param: String,
    pub method: String,
    pub n: usize,
    pub op: usize,
    pub seed: u64,
    pub size: usize,
    pub time_s: f64,
    pub timed_out: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub rows: Vec<Row>,
    pub records: Vec<OpRecord>,
}

impl Report {
    pub fn row(&self, method: &str, architecture: &str, param: &str) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.architecture == architecture && r.param == param)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n").map_err(csv::Error::from)?;
        }
        Ok(())
    }
}

/// Seed of operator `op` among the operators of size `n`. Independent of the
/// experiment and method, so points with the same size are paired.
pub fn operator_seed(master: u64, n: usize, op: usize) -> u64 {
    derive_seed(derive_seed(master, n as u64), op as u64)
}

/// Where savings are measured from.
enum Baseline {
    /// The method with this name on the same operators.
    Method(String),
    /// A published mean.
    Value(&'static str, f64),
    None,
}

/// One point of an experiment: a set of operators and the methods run on
/// each of them.
struct Point {
    architecture: String,
    param: String,
    n: usize,
    input_gates: usize,
    methods: Vec<Job>,
    baseline: Baseline,
}

fn parse_solver(s: &str) -> Result<SolverKind> {
    Ok(s.parse::<SolverKind>()?)
}

fn parse_param<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| CliError::Usage(format!("bad {what} {s:?}")))
}

fn constrained_cfg(spec: &ExperimentSpec, mut cfg: ConstrainedConfig) -> ConstrainedConfig {
    if let Some(niter) = spec.niter {
        cfg.niter = niter;
    }
    cfg.time_limit = Some(spec.time_limit_s.map_or(DEFAULT_TIME_LIMIT, Duration::from_secs_f64));
    cfg
}

fn grid_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("expected RxC grid dimensions, got {s:?}"));
    let (r, c) = s.split_once('x').ok_or_else(bad)?;
    let (r, c) = (r.parse::<usize>().map_err(|_| bad())?, c.parse::<usize>().map_err(|_| bad())?);
    if r * c < 2 {
        return Err(bad());
    }
    Ok((r, c))
}

fn points(spec: &ExperimentSpec) -> Result<Vec<Point>> {
    if spec.ops == 0 {
        return Err(CliError::Usage("at least one operator per point is required".into()));
    }
    let needs_sizes = matches!(
        spec.experiment,
        Experiment::RatioPmh | Experiment::IsdSweep | Experiment::InputSize
    );
    if needs_sizes && spec.n.is_empty() {
        return Err(CliError::Usage("empty size range".into()));
    }
    if let Some(&n) = spec.n.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("size {n} is below 2")));
    }
    let full = |solver: SolverKind| Job::Syndrome(SynthesisConfig::with_solver(solver));
    let pmh = Job::Pmh { partition: None };
    let pmh_baseline = || Baseline::Method(pmh.name());
    let solver = parse_solver(spec.solver.as_deref().unwrap_or("greedy"))?;
    let mut out = Vec::new();
    match spec.experiment {
        Experiment::RatioPmh => {
            for &n in &spec.n {
                out.push(Point {
                    architecture: "all-to-all".into(),
                    param: String::new(),
                    n,
                    input_gates: spec.input_gates.unwrap_or(n * n),
                    methods: vec![pmh.clone(), full(solver)],
                    baseline: pmh_baseline(),
                });
            }
        }
        Experiment::IsdSweep => {
            let iters: Vec<usize> = if spec.params.is_empty() {
                vec![10, 100, 1000]
            } else {
                spec.params.iter().map(|p| parse_param(p, "iteration count")).collect::<Result<_>>()?
            };
            for &n in &spec.n {
                let mut methods = vec![pmh.clone(), full(SolverKind::Greedy)];
                methods.extend(iters.iter().map(|&n_iter| full(SolverKind::Isd { n_iter })));
                out.push(Point {
                    architecture: "all-to-all".into(),
                    param: String::new(),
                    n,
                    input_gates: spec.input_gates.unwrap_or(n * n),
                    methods,
                    baseline: pmh_baseline(),
                });
            }
        }
        Experiment::InputSize => {
            if spec.params.is_empty() {
                return Err(CliError::Usage("input_size needs input lengths in params".into()));
            }
            for &n in &spec.n {
                for p in &spec.params {
                    out.push(Point {
                        architecture: "all-to-all".into(),
                        param: p.clone(),
                        n,
                        input_gates: parse_param(p, "input length")?,
                        methods: vec![pmh.clone(), full(solver)],
                        baseline: pmh_baseline(),
                    });
                }
            }
        }
        Experiment::TableExact | Experiment::TablePerm => {
            if spec.architectures.is_empty() {
                return Err(CliError::Usage("no architectures given".into()));
            }
            let mode = if spec.experiment == Experiment::TableExact {
                Mode::Exact
            } else {
                Mode::UpToRowPermutation
            };
            for arch in &spec.architectures {
                let (graph, cfg) = table1_setup(arch)?;
                let cfg = ConstrainedConfig {
                    mode,
                    ..constrained_cfg(spec, cfg)
                };
                let baseline = match published_for(arch) {
                    Some(p) if mode == Mode::Exact => Baseline::Value("steiner-published", p.steiner_exact),
                    Some(p) => Baseline::Value("steiner-published", p.steiner_perm),
                    None => Baseline::None,
                };
                let n = graph.n_nodes();
                out.push(Point {
                    architecture: arch.clone(),
                    param: String::new(),
                    n,
                    input_gates: spec.input_gates.unwrap_or(n * n),
                    methods: vec![Job::Constrained { graph, cfg }],
                    baseline,
                });
            }
        }
        Experiment::Radius => {
            let dims = spec.architectures.first().map_or("5x5", String::as_str);
            let (rows, cols) = grid_dims(dims)?;
            let radii: Vec<String> = if spec.params.is_empty() {
                ["1", "sqrt2", "2", "sqrt5", "3"].map(String::from).to_vec()
            } else {
                spec.params.clone()
            };
            let mut first: Option<String> = None;
            for r in &radii {
                let radius = parse_radius(r)
                    .filter(|&x| x >= 1.0)
                    .ok_or_else(|| CliError::Usage(format!("bad radius {r:?}")))?;
                let graph = ConnectivityGraph::radius_grid(rows, cols, radius);
                let cfg = constrained_cfg(spec, ConstrainedConfig::for_graph(&graph));
                let job = Job::Constrained { graph, cfg };
                let name = format!("{}@{r}", job.name());
                let baseline = match &first {
                    Some(f) => Baseline::Method(f.clone()),
                    None => Baseline::None,
                };
                first.get_or_insert(name);
                let n = rows * cols;
                out.push(Point {
                    architecture: format!("radius:{dims}"),
                    param: r.clone(),
                    n,
                    input_gates: spec.input_gates.unwrap_or(n * n),
                    methods: vec![job],
                    baseline,
                });
            }
        }
        Experiment::Augment => {
            let arch = spec.architectures.first().map_or("line:20", String::as_str);
            let base = cnot_synth::topology::parse_architecture(arch)?;
            let counts: Vec<usize> = if spec.params.is_empty() {
                vec![0, 5, 10, 20, 40]
            } else {
                spec.params.iter().map(|p| parse_param(p, "edge count")).collect::<Result<_>>()?
            };
            let ordering = ConstrainedConfig::for_graph(&base).ordering;
            let mut first: Option<String> = None;
            for &k in &counts {
                let graph = base.augment_random(k, derive_seed(spec.seed, k as u64))?;
                let cfg = constrained_cfg(
                    spec,
                    ConstrainedConfig {
                        ordering: ordering.clone(),
                        ..ConstrainedConfig::for_graph(&graph)
                    },
                );
                let job = Job::Constrained { graph, cfg };
                let name = format!("{}@{k}", job.name());
                let baseline = match &first {
                    Some(f) => Baseline::Method(f.clone()),
                    None => Baseline::None,
                };
                first.get_or_insert(name);
                let n = base.n_nodes();
                out.push(Point {
                    architecture: arch.to_owned(),
                    param: k.to_string(),
                    n,
                    input_gates: spec.input_gates.unwrap_or(n * n),
                    methods: vec![job],
                    baseline,
                });
            }
        }
    }
    Ok(out)
}

/// Runs the experiment on the current rayon pool. Rows come out in point
/// order, methods in their listed order; every number is a function of the
/// spec alone except the timings.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    let points = points(spec)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    // sizes per method name across points, for paired baselines
    let mut sizes_by_method: Vec<(String, Vec<f64>)> = Vec::new();
    for point in &points {
        let seeds: Vec<u64> = (0..spec.ops).map(|op| operator_seed(spec.seed, point.n, op)).collect();
        let results: Vec<Vec<crate::Outcome>> = seeds
            .par_iter()
            .map(|&seed| {
                let a: BitMatrix = random_operator(point.n, point.input_gates, seed);
                point.methods.iter().map(|m| m.run(&a, seed)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let suffix = |job: &Job| -> String {
            match (spec.experiment, job) {
                (Experiment::Radius | Experiment::Augment, _) => format!("{}@{}", job.name(), point.param),
                _ => job.name(),
            }
        };
        for (mi, job) in point.methods.iter().enumerate() {
            let method = suffix(job);
            let sizes: Vec<f64> = results.iter().map(|r| r[mi].circuit.len() as f64).collect();
            for (op, r) in results.iter().enumerate() {
                records.push(OpRecord {
                    experiment: spec.experiment,
                    architecture: point.architecture.clone(),
                    param: point.param.clone(),
                    method: method.clone(),
                    n: point.n,
                    op,
                    seed: seeds[op],
                    size: r[mi].circuit.len(),
                    time_s: r[mi].time_s,
                    timed_out: r[mi].timed_out,
                });
            }
            sizes_by_method.push((method.clone(), sizes.clone()));
            let (baseline_name, base): (String, Vec<f64>) = match &point.baseline {
                Baseline::Method(name) => {
                    let base = sizes_by_method
                        .iter()
                        .rev()
                        .find(|(m, _)| m == name)
                        .map(|(_, s)| s.clone())
                        .unwrap_or_else(|| sizes.clone());
                    (name.clone(), base)
                }
                Baseline::Value(name, v) => (name.to_string(), vec![*v; sizes.len()]),
                Baseline::None => (method.clone(), sizes.clone()),
            };
            rows.push(summarize(
                &method,
                point,
                spec,
                &sizes,
                &base,
                &baseline_name,
                results.iter().map(|r| r[mi].time_s),
                results.iter().filter(|r| r[mi].timed_out).count(),
            ));
        }
    }
    Ok(Report { rows, records })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    method: &str,
    point: &Point,
    spec: &ExperimentSpec,
    sizes: &[f64],
    base: &[f64],
    baseline: &str,
    times: impl Iterator<Item = f64>,
    timeouts: usize,
) -> Row {
    let m = sizes.len() as f64;
    let savings: Vec<f64> = sizes
        .iter()
        .zip(base)
        .map(|(&s, &b)| if b > 0.0 { (b - s) / b } else { 0.0 })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let base_mean = mean(base);
    Row {
        method: method.to_owned(),
        n: point.n,
        mean_size: mean(sizes),
        min_saving: savings.iter().copied().fold(f64::INFINITY, f64::min),
        max_saving: savings.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        positive_fraction: savings.iter().filter(|&&s| s > 0.0).count() as f64 / m,
        mean_time_s: times.sum::<f64>() / m,
        seed: spec.seed,
        ratio: if base_mean > 0.0 { mean(sizes) / base_mean } else { 1.0 },
        mean_saving: mean(&savings),
        baseline: baseline.to_owned(),
        architecture: point.architecture.clone(),
        param: point.param.clone(),
        ops: sizes.len(),
        timeouts,
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs sequentially; expect a quarter of an hour in release
//! mode on one core.

use std::time::Instant;

use cnot_synth::ordering::{local_search, snake, Objective};
use cnot_synth::syndrome::{solve_exact, solve_greedy, solve_isd, solve_tree, solve_weighted_greedy, SyndromeInstance};
use cnot_synth::synth_constrained::{
    cnot_via_path, compute_precircuit, fanin_via_path, Mode,
};
use cnot_synth::synth_full::{SolverKind, SynthesisConfig};
use cnot_synth::{random_operator, BitMatrix, BitVec, CnotCircuit, ConnectivityGraph, QubitOrdering};
use cnot_synth_cli::bench::{operator_seed, run_experiment, Experiment, ExperimentSpec, Report};
use cnot_synth_cli::{check, synthesize, Job, Target};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2020;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn within(x: f64, reference: f64, tol: f64) -> bool {
    (x - reference).abs() <= tol * reference
}

/// Synthesize and verify through the same code paths as `synth` and `check`.
fn c1_round_trips() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut done = 0;
    let mut failures = Vec::new();
    for i in 0..1000u64 {
        let family = i % 4;
        let (target, n) = match family {
            0 => {
                let n = rng.gen_range(2..=32);
                (Target::AllToAll, n)
            }
            1 => {
                let n = rng.gen_range(2..=32);
                (Target::from_arch(Some(&format!("line:{n}"))).unwrap(), n)
            }
            _ => {
                let (r, c) = loop {
                    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(2..=6));
                    if r * c <= 32 {
                        break (r, c);
                    }
                };
                let kind = if family == 2 { "grid" } else { "gridd" };
                (Target::from_arch(Some(&format!("{kind}:{r}x{c}"))).unwrap(), r * c)
            }
        };
        let a = random_operator(n, n * n, operator_seed(SEED, n, i as usize));
        let job = match &target {
            Target::AllToAll => {
                let solver = [SolverKind::Greedy, SolverKind::Tree { width: 4, depth: 2 }, SolverKind::Isd { n_iter: 10 }]
                    [(i / 4 % 3) as usize];
                Job::Syndrome(SynthesisConfig::with_solver(solver))
            }
            Target::Graph { graph, cfg, .. } => {
                let mut cfg = cfg.clone();
                cfg.niter = 2;
                if i % 8 >= 4 {
                    cfg.mode = Mode::UpToRowPermutation;
                }
                Job::Constrained {
                    graph: graph.clone(),
                    cfg,
                }
            }
        };
        let (out, _) = synthesize(&a, &target, &job, i).unwrap();
        let text = out.circuit.to_text();
        let reread = CnotCircuit::from_text(&text).unwrap();
        match check(&reread, &a, target.graph(), Some(&out.perm)) {
            Ok(()) => done += 1,
            Err(e) => failures.push(format!("{} n={n}: {e}", target.name())),
        }
    }
    verdict(
        failures.is_empty() && done >= 1000,
        format!("{done}/1000 verified; first failure: {:?}", failures.first()),
    )
}

/// Gate count for a fan-in with `mask` over the `k` interior qubits: the full
/// combination costs 2k+1; dropping the qubit next to the target costs one
/// more gate, dropping any other interior qubit two more.
fn fanin_law(mask: &[bool]) -> usize {
    let k = mask.len();
    let surcharge: usize = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| !m)
        .map(|(i, _)| if i + 1 == k { 1 } else { 2 })
        .sum();
    2 * k + 1 + surcharge
}

fn c2_template_laws() -> Verdict {
    let mut checked = 0;
    for k in 0..=4usize {
        let n = k + 2;
        let g = ConnectivityGraph::line(n);
        // shuffle labels so the path is not the identity
        let path: Vec<usize> = (0..n).rev().collect();
        let (src, dst) = (path[0], path[n - 1]);
        let run = |gates: &[cnot_synth::CnotGate]| {
            CnotCircuit::from_gates(n, gates.iter().map(|g| (g.control, g.target))).unwrap()
        };
        let single = run(&cnot_via_path(&g, &path).unwrap());
        let mut expect = BitMatrix::identity(n);
        expect.add_row(dst, src);
        if single.len() != (4 * k).max(1) || single.simulate() != expect || !single.complies_with(&g) {
            return verdict(false, format!("cnot_via_path failed for k={k}"));
        }
        for bits in 0u32..(1 << k) {
            let mask: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
            let c = run(&fanin_via_path(&g, &path, &mask).unwrap());
            let mut expect = BitMatrix::identity(n);
            expect.add_row(dst, src);
            for (i, &m) in mask.iter().enumerate() {
                if m {
                    expect.add_row(dst, path[i + 1]);
                }
            }
            if c.len() != fanin_law(&mask) || c.simulate() != expect || !c.complies_with(&g) {
                return verdict(false, format!("fanin_via_path failed for k={k}, mask={mask:?}"));
            }
            checked += 1;
        }
    }
    verdict(true, format!("{checked} fan-in masks and 5 path lengths, counts and simulations exact"))
}

fn brute_force(inst: &SyndromeInstance) -> u64 {
    let m = inst.n_columns();
    let cols: Vec<BitVec> = (0..m).map(|i| inst.column(i)).collect();
    let target = inst.target();
    let mut best = u64::MAX;
    for x in 0u32..(1 << m) {
        let mut acc = BitVec::zeros(inst.dim());
        let mut w = 0;
        for (i, col) in cols.iter().enumerate() {
            if x >> i & 1 == 1 {
                acc.xor_assign(col);
                w += inst.costs()[i];
            }
        }
        if acc == target {
            best = best.min(w);
        }
    }
    best
}

fn c3_decoder_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    for t in 0..200 {
        let dim = rng.gen_range(2..=8);
        let m = rng.gen_range(dim..=15);
        let mut cols: Vec<BitVec> = (0..dim).map(|j| BitVec::unit(dim, j)).collect();
        while cols.len() < m {
            cols.push(BitVec::from_bools(&(0..dim).map(|_| rng.gen()).collect::<Vec<_>>()));
        }
        cols.swap(0, m - 1);
        let target = BitVec::from_bools(&(0..dim).map(|_| rng.gen()).collect::<Vec<_>>());
        let weighted = t % 2 == 1;
        let inst = if weighted {
            let costs = (0..m).map(|_| rng.gen_range(1..10)).collect();
            SyndromeInstance::weighted(&cols, &target, costs).unwrap()
        } else {
            SyndromeInstance::new(&cols, &target).unwrap()
        };
        let oracle = brute_force(&inst);
        let exact = solve_exact(&inst, u64::MAX).unwrap();
        if exact.weight != oracle || !exact.is_valid_for(&inst) {
            return verdict(false, format!("instance {t}: exact {} vs enumeration {oracle}", exact.weight));
        }
        let mut heuristics = vec![solve_weighted_greedy(&inst).unwrap()];
        if !weighted {
            heuristics.push(solve_greedy(&inst).unwrap());
            heuristics.push(solve_tree(&inst, 4, 3).unwrap());
            heuristics.push(solve_isd(&inst, 50, t).unwrap());
        }
        if let Some(bad) = heuristics.iter().find(|s| !s.is_valid_for(&inst) || s.weight < exact.weight) {
            return verdict(false, format!("instance {t}: heuristic weight {} invalid or below {}", bad.weight, exact.weight));
        }
    }
    verdict(true, "200 instances (m <= 15): exact equals enumeration; heuristics valid and never below it")
}

struct Dense60 {
    pmh: Vec<f64>,
    greedy: Vec<f64>,
    tree: Vec<f64>,
    isd100: Vec<f64>,
    isd500: Vec<f64>,
    isd1000: Vec<f64>,
}

fn sizes(job: &Job, ops: &[(BitMatrix, u64)]) -> Vec<f64> {
    ops.iter().map(|(a, s)| job.run(a, *s).unwrap().circuit.len() as f64).collect()
}

fn full(solver: SolverKind) -> Job {
    Job::Syndrome(SynthesisConfig::with_solver(solver))
}

fn dense60() -> Dense60 {
    let n = 60;
    let ops: Vec<(BitMatrix, u64)> = (0..20)
        .map(|i| {
            let s = operator_seed(SEED, n, i);
            (random_operator(n, n * n, s), s)
        })
        .collect();
    Dense60 {
        pmh: sizes(&Job::Pmh { partition: None }, &ops),
        greedy: sizes(&full(SolverKind::Greedy), &ops),
        tree: sizes(&full(SolverKind::Tree { width: 8, depth: 4 }), &ops),
        isd100: sizes(&full(SolverKind::Isd { n_iter: 100 }), &ops),
        isd500: sizes(&full(SolverKind::Isd { n_iter: 500 }), &ops),
        isd1000: sizes(&full(SolverKind::Isd { n_iter: 1000 }), &ops),
    }
}

fn c4_tree_vs_pmh(d: &Dense60) -> Verdict {
    let ratio = mean(&d.tree) / mean(&d.pmh);
    verdict(
        ratio <= 0.80,
        format!("tree(8,4) {:.1} / pmh {:.1} = {ratio:.3} (need <= 0.80)", mean(&d.tree), mean(&d.pmh)),
    )
}

fn c5_isd_monotone(d: &Dense60) -> Verdict {
    let (g, i100, i500, i1000) = (mean(&d.greedy), mean(&d.isd100), mean(&d.isd500), mean(&d.isd1000));
    verdict(
        i500 <= g && i1000 <= i100,
        format!("greedy {g:.1}, isd100 {i100:.1}, isd500 {i500:.1}, isd1000 {i1000:.1}"),
    )
}

fn c6_sparse_inputs() -> Verdict {
    let n = 60;
    let ops: Vec<(BitMatrix, u64)> = (0..20)
        .map(|i| {
            let s = operator_seed(SEED + 6, n, i);
            (random_operator(n, 200, s), s)
        })
        .collect();
    let pmh = mean(&sizes(&Job::Pmh { partition: None }, &ops));
    let isd = mean(&sizes(&full(SolverKind::Isd { n_iter: 500 }), &ops));
    verdict(
        isd <= 0.6 * pmh,
        format!("isd500 {isd:.1} vs pmh {pmh:.1}: ratio {:.3} (need <= 0.6)", isd / pmh),
    )
}

fn table(experiment: Experiment, architectures: &[&str]) -> Report {
    let spec = ExperimentSpec {
        architectures: architectures.iter().map(|s| s.to_string()).collect(),
        ops: 50,
        seed: SEED,
        ..ExperimentSpec::new(experiment)
    };
    run_experiment(&spec).unwrap()
}

fn c7_table_exact(report: &Report) -> Verdict {
    let targets = [("9q-square", 46.0), ("16q-square", 155.0), ("19q-line", 454.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (arch, reference) in targets {
        let row = report.row("syndrome-exact", arch, "").unwrap();
        let ok = within(row.mean_size, reference, 0.15) && row.timeouts == 0;
        pass &= ok;
        parts.push(format!(
            "{arch} {:.1} vs {reference} ({:+.1}%, {:.2}s/op)",
            row.mean_size,
            100.0 * (row.mean_size - reference) / reference,
            row.mean_time_s
        ));
    }
    verdict(pass, parts.join("; "))
}

fn c8_table_perm(exact: &Report, perm: &Report) -> Verdict {
    let p = perm.row("syndrome-perm", "16q-square", "").unwrap().mean_size;
    let e = exact.row("syndrome-exact", "16q-square", "").unwrap().mean_size;
    verdict(
        within(p, 144.0, 0.15) && p < e,
        format!("16q perm {p:.1} vs 144 ({:+.1}%); exact on the same operators {e:.1}", 100.0 * (p - 144.0) / 144.0),
    )
}

fn c9_radius() -> Verdict {
    let spec = ExperimentSpec {
        architectures: vec!["5x5".into()],
        params: ["1", "sqrt2", "2", "sqrt5", "3"].map(String::from).to_vec(),
        ops: 20,
        seed: SEED,
        ..ExperimentSpec::new(Experiment::Radius)
    };
    let r = run_experiment(&spec).unwrap();
    let means: Vec<f64> = r.rows.iter().map(|row| row.mean_size).collect();
    verdict(
        means.len() == 5 && means.windows(2).all(|w| w[1] < w[0]),
        format!("radius 1, sqrt2, 2, sqrt5, 3: {means:.1?}"),
    )
}

fn c10_lu_and_minors() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    for t in 0..1000u64 {
        let n = rng.gen_range(2..=64);
        let a = random_operator(n, n * n, t);
        let f = a.plu_decompose().unwrap();
        let p = BitMatrix::permutation(&f.perm);
        let recomposed = p.mul(&f.lower).unwrap().mul(&f.upper).unwrap();
        if recomposed != a || !f.lower.is_unit_lower_triangular() || !f.upper.is_unit_upper_triangular() {
            return verdict(false, format!("PLU recomposition failed on matrix {t} (n={n})"));
        }
    }
    for t in 0..100u64 {
        let (r, c) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
        let g = ConnectivityGraph::grid(r, c);
        let o = if t % 2 == 0 { snake(&g).unwrap() } else { QubitOrdering::identity(r * c) };
        let a = random_operator(r * c, r * c * r * c, SEED + t);
        let pre = compute_precircuit(&a, &g, &o).unwrap();
        let fixed = pre.simulate().mul(&a).unwrap().reorder(o.order());
        if !pre.complies_with(&g) || !(1..=r * c).all(|k| fixed.submatrix(0..k, 0..k).rank() == k) {
            return verdict(false, format!("pre-circuit left a singular leading minor ({r}x{c} grid, case {t})"));
        }
    }
    verdict(true, "1000 PLU recompositions exact; 100 pre-circuits leave every leading minor invertible")
}

/// Sum of |rank(u) - rank(v)| over unordered pairs at graph distance `d`.
fn distance_class_cost(g: &ConnectivityGraph, o: &QubitOrdering, d: usize) -> usize {
    let n = g.n_nodes();
    let mut total = 0;
    for u in 0..n {
        for v in u + 1..n {
            if g.dist(u, v) == d {
                total += o.rank(u).abs_diff(o.rank(v));
            }
        }
    }
    total
}

fn c11_orderings() -> Verdict {
    let g = ConnectivityGraph::grid(3, 3);
    let snake3 = snake(&g).unwrap();
    let row_major = QubitOrdering::identity(9);
    let coeff = |o: &QubitOrdering| (1..=4).map(|d| distance_class_cost(&g, o, d)).collect::<Vec<_>>();
    let (cs, cr) = (coeff(&snake3), coeff(&row_major));
    // the per-distance sums as each row of the table adds them up
    let rows_ok = cs == [24, 48, 36, 12] && cr == cs;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 11);
    let weights_ok = (0..20).all(|_| {
        let w: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..10.0)).collect();
        let obj = Objective::minla_by_distance(&g, |d| w[d]);
        let manual: f64 = (1..=4).map(|d| w[d] * cs[d - 1] as f64).sum();
        (obj.cost(&snake3) - obj.cost(&row_major)).abs() < 1e-9 && (obj.cost(&snake3) - manual).abs() < 1e-9
    });
    let g4 = ConnectivityGraph::grid(4, 4);
    let exp = Objective::exp(&g4);
    let snake_cost = exp.cost(&snake(&g4).unwrap());
    let (_, found) = local_search(&exp, 20, SEED);
    verdict(
        rows_ok && weights_ok && found <= snake_cost,
        format!(
            "3x3 snake {cs:?}, row-major {cr:?}, equal under random weights: {weights_ok}; \
             4x4 local search {found:.4} vs snake {snake_cost:.4}"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.0}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        results.push((id, name, v));
    };
    run(1, "round-trip correctness", &mut c1_round_trips);
    run(2, "template laws", &mut c2_template_laws);
    run(3, "decoder oracle equivalence", &mut c3_decoder_oracle);
    let d = dense60();
    run(4, "all-to-all ratio vs PMH at n=60", &mut || c4_tree_vs_pmh(&d));
    run(5, "ISD improvement", &mut || c5_isd_monotone(&d));
    run(6, "sparse-input advantage", &mut c6_sparse_inputs);
    let exact = table(Experiment::TableExact, &["9q-square", "16q-square", "19q-line"]);
    run(7, "constrained exact synthesis spot checks", &mut || c7_table_exact(&exact));
    let perm = table(Experiment::TablePerm, &["16q-square"]);
    run(8, "synthesis up to a permutation", &mut || c8_table_perm(&exact, &perm));
    run(9, "radius monotonicity", &mut c9_radius);
    run(10, "LU and minor fixing", &mut c10_lu_and_minors);
    run(11, "ordering objectives", &mut c11_orderings);
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.0}s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

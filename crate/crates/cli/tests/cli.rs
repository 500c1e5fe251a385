use std::path::Path;
use std::process::{Command, Output};

use cnot_synth::{random_operator, BitMatrix};
use cnot_synth_cli::bench::{run_experiment, Experiment, ExperimentSpec};
use tempfile::TempDir;

fn cnotsynth(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnotsynth"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stats(o: &Output) -> serde_json::Value {
    serde_json::from_str(stderr(o).lines().last().expect("stats line")).expect("json stats")
}

#[test]
fn identity_gives_an_empty_circuit() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("i.txt"), BitMatrix::identity(5).to_text()).unwrap();
    let o = cnotsynth(&["synth", "--matrix", "i.txt", "-o", "c.txt"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(dir.path().join("c.txt")).unwrap(), "5\n");
    assert_eq!(stats(&o)["size"], 0);
}

#[test]
fn malformed_matrix_is_rejected() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "3 3\n101\n").unwrap();
    let o = cnotsynth(&["synth", "--matrix", "bad.txt"], dir.path());
    assert!(!o.status.success());
    std::fs::write(dir.path().join("bad.txt"), "three\n").unwrap();
    assert!(!cnotsynth(&["synth", "--matrix", "bad.txt"], dir.path()).status.success());
}

#[test]
fn check_verdicts() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(p.join("i.txt"), BitMatrix::identity(3).to_text()).unwrap();
    std::fs::write(p.join("empty.txt"), "3\n").unwrap();
    let o = cnotsynth(&["check", "--circuit", "empty.txt", "--matrix", "i.txt"], p);
    assert!(o.status.success());

    let mut a = BitMatrix::identity(3);
    a.add_row(2, 0);
    std::fs::write(p.join("a.txt"), a.to_text()).unwrap();
    std::fs::write(p.join("far.txt"), "3\nCNOT 0 2\n").unwrap();
    let o = cnotsynth(&["check", "--circuit", "far.txt", "--matrix", "a.txt", "--arch", "line:3"], p);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("compliance"), "{}", stderr(&o));
    let o = cnotsynth(&["check", "--circuit", "far.txt", "--matrix", "a.txt"], p);
    assert!(o.status.success());
    let o = cnotsynth(&["check", "--circuit", "empty.txt", "--matrix", "a.txt"], p);
    assert!(stderr(&o).contains("simulation"));
}

#[test]
fn synth_output_always_checks() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let cases: &[(&str, usize, &[&str])] = &[
        ("complete:7", 7, &["--solver", "tree:4:2"]),
        ("line:6", 6, &["--mode", "perm"]),
        ("grid:3x3", 9, &["--niter", "3"]),
        ("gridd:3x4", 12, &["--solver", "fast"]),
        ("9q-square", 9, &["--niter", "2"]),
        ("ibm_qx5", 16, &[]),
        ("radius:4x4:sqrt5", 16, &["--solver", "exact:5000"]),
    ];
    for (i, (arch, n, extra)) in cases.iter().enumerate() {
        std::fs::write(p.join("a.txt"), random_operator(*n, n * n, i as u64).to_text()).unwrap();
        let mut args = vec!["synth", "--matrix", "a.txt", "--arch", arch, "-o", "c.txt", "--perm-out", "p.txt"];
        args.extend_from_slice(extra);
        let o = cnotsynth(&args, p);
        assert!(o.status.success(), "{arch}: {}", stderr(&o));
        let o = cnotsynth(
            &["check", "--circuit", "c.txt", "--matrix", "a.txt", "--arch", arch, "--perm", "p.txt"],
            p,
        );
        assert!(o.status.success(), "{arch}: {}", stderr(&o));
    }
    for method in ["pmh", "gauss"] {
        let o = cnotsynth(&["synth", "--matrix", "a.txt", "--method", method, "-o", "c.txt"], p);
        assert!(o.status.success());
        assert!(cnotsynth(&["check", "--circuit", "c.txt", "--matrix", "a.txt"], p).status.success());
    }
}

#[test]
fn syndrome_beats_pmh_on_a_dense_60_qubit_operator() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = cnotsynth(&["gen", "operator", "--n", "60", "--seed", "11", "-o", "a.txt"], p);
    assert!(o.status.success());
    let o = cnotsynth(&["synth", "--matrix", "a.txt", "--solver", "isd:500", "-o", "c.txt"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stats(&o);
    let (size, pmh) = (s["size"].as_u64().unwrap(), s["pmh_size"].as_u64().unwrap());
    assert!(size < pmh, "{size} vs {pmh}");
}

#[test]
fn gen_graph_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = cnotsynth(&["gen", "graph", "--arch", "line:8", "--extra-edges", "4", "--seed", "2", "-o", "g.txt"], p);
    assert!(o.status.success());
    let text = std::fs::read_to_string(p.join("g.txt")).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 + 4);
    std::fs::write(p.join("a.txt"), random_operator(8, 64, 5).to_text()).unwrap();
    assert!(cnotsynth(&["synth", "--matrix", "a.txt", "--graph", "g.txt", "-o", "c.txt"], p).status.success());
    assert!(cnotsynth(&["check", "--circuit", "c.txt", "--matrix", "a.txt", "--graph", "g.txt"], p).status.success());
}

#[test]
fn bench_rejects_bad_specs() {
    let dir = TempDir::new().unwrap();
    let o = cnotsynth(&["bench", "--experiment", "ratio_pmh", "--ops", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty size range"));
    let o = cnotsynth(&["bench", "--experiment", "nope"], dir.path());
    assert!(!o.status.success());
    assert!(run_experiment(&ExperimentSpec::new(Experiment::TableExact)).is_err());
}

#[test]
fn bench_rows_are_reproducible() {
    let spec = ExperimentSpec {
        n: vec![8, 12],
        ops: 4,
        seed: 9,
        solver: Some("tree:3:2".into()),
        ..ExperimentSpec::new(Experiment::RatioPmh)
    };
    let strip = |r: &cnot_synth_cli::bench::Report| {
        r.records.iter().map(|x| (x.method.clone(), x.n, x.op, x.size)).collect::<Vec<_>>()
    };
    let a = run_experiment(&spec).unwrap();
    let b = run_experiment(&spec).unwrap();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.rows.len(), 4);
    let pmh = a.row("pmh", "all-to-all", "").unwrap();
    assert_eq!(pmh.ratio, 1.0);

    let spec = ExperimentSpec {
        architectures: vec!["line:6".into()],
        params: vec!["0".into(), "3".into()],
        ops: 3,
        niter: Some(1),
        ..ExperimentSpec::new(Experiment::Augment)
    };
    let r = run_experiment(&spec).unwrap();
    assert_eq!(strip(&r), strip(&run_experiment(&spec).unwrap()));
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("method,n,mean_size,min_saving,max_saving,positive_fraction,mean_time_s,seed,ratio"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bench_spec_files_drive_the_binary() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("spec.json"),
        r#"{"experiment": "table_perm", "architectures": ["9q-square"], "ops": 2, "niter": 2}"#,
    )
    .unwrap();
    let o = cnotsynth(&["bench", "--spec", "spec.json", "-o", "out.csv", "--stats", "ops.jsonl"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(p.join("out.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("syndrome-perm,9,"));
    let jsonl = std::fs::read_to_string(p.join("ops.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 2);
}

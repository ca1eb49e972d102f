use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zlorenz::cli::{help_text, subcommand_names};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zlorenz"));
    c.env_remove("ZLORENZ_SCENARIO_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn snapshot_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots")
}

#[test]
fn help_matches_snapshots() {
    let update = std::env::var_os("UPDATE_SNAPSHOTS").is_some();
    let mut names = vec!["zlorenz".to_string()];
    names.extend(subcommand_names().into_iter().filter(|n| n != "help"));
    let mut stale = Vec::new();
    for name in &names {
        let sub = (name != "zlorenz").then_some(name.as_str());
        let text = help_text(sub).unwrap();
        let path = snapshot_dir().join(format!("help_{name}.txt"));
        if update {
            std::fs::create_dir_all(snapshot_dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            stale.push(name.clone());
        }
    }
    assert!(stale.is_empty(), "help changed for {stale:?}; rerun with UPDATE_SNAPSHOTS=1 to accept");
}

#[test]
fn every_subcommand_has_help() {
    for name in subcommand_names().iter().filter(|n| *n != "help") {
        let o = run(&[name, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage: zlorenz"), "{name}");
    }
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let good = p(dir.path(), "good.csv");
    assert_eq!(code(&["simulate", "--system", "l2", "--t1", "2", "--out", &good]), 0);
    std::fs::write(dir.path().join("bad.csv"), "t,x,y,z\n0,1,2,3\n1,1,nope,3\n").unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ \"schema_version\": 1, ").unwrap();
    std::fs::write(
        dir.path().join("unknown.json"),
        r#"{"schema_version":1,"system":{"family":"l2"},"time":{"t1":1},"outputs":[{"kind":"csv","path":"x.csv"}],"extra":1}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("axis.csv"), "t,x,y,z\n0,0,0,1\n1,1,0,1\n").unwrap();
    let axis = p(dir.path(), "axis.csv");
    let bad = p(dir.path(), "bad.csv");
    let out = p(dir.path(), "out.csv");
    let (bad_json, unknown_json) = (p(dir.path(), "bad.json"), p(dir.path(), "unknown.json"));
    let (svg, ok_svg) = (p(dir.path(), "x.svg"), p(dir.path(), "ok.svg"));
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec![], 2),
        (vec!["frobnicate"], 2),
        (vec!["simulate", "--system", "l2", "--t1", "oops", "--out", &out], 2),
        (vec!["simulate", "--system", "l2", "--out", &out], 2),
        (vec!["simulate", "--system", "l2", "--t1", "1"], 2),
        (vec!["simulate", "--system", "ln", "--n", "0", "--t1", "1", "--out", &out], 2),
        (vec!["simulate", "--system", "l2", "--rayleigh", "0.5", "--t1", "1", "--out", &out], 2),
        (vec!["simulate", "--system", "l1", "--x0", "0,0,1", "--t1", "1", "--out", &out], 3),
        (vec!["cover", "--n", "2", "--in", &axis, "--out", &out], 3),
        (vec!["factor", "--in", &axis, "--out", &out], 3),
        (vec!["extend", "--n", "3", "--in", &axis, "--out", &out], 3),
        (vec!["extend", "--n", "3", "--color", "3", "--in", &good, "--out", &out], 2),
        (vec!["simulate", "--system", "l2", "--params", "sigma=10,q=1", "--t1", "1", "--out", &out], 2),
        (vec!["simulate", "--scenario", "/nonexistent/s.json"], 2),
        (vec!["simulate", "--scenario", &bad_json], 2),
        (vec!["simulate", "--scenario", &unknown_json], 2),
        (
            vec![
                "simulate",
                "--system",
                "standard",
                "--t1",
                "10",
                "--step",
                "1",
                "--min-step",
                "0.5",
                "--max-step",
                "10",
                "--sample-interval",
                "1",
                "--out",
                &out,
            ],
            3,
        ),
        (vec!["render", "--in", &bad, "--out", &svg], 2),
        (vec!["render", "--in", &good, "--proj", "x,q", "--out", &svg], 2),
        (vec!["cover", "--n", "0", "--in", &good, "--out", &out], 2),
        (vec!["lyapunov", "--system", "standard", "--t-total", "10"], 2),
        (vec!["lyapunov", "--system", "l2", "--tau", "500"], 2),
        (vec!["fixed-points"], 2),
        (vec!["fixed-points", "--system", "ln"], 2),
        (vec!["fixed-points", "--system", "ln", "--n", "4"], 0),
        (vec!["transform", "--direction", "sideways", "--in", &good, "--out", &out], 2),
        (vec!["transform", "--direction", "l2-to-std", "--rayleigh", "1", "--in", &good, "--out", &out], 2),
        (vec!["chaos-table", "--systems", "l2,q7"], 2),
        (vec!["render", "--in", &good, "--out", &ok_svg], 0),
    ];
    for (args, want) in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(want), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        if want != 0 {
            assert!(!o.stderr.is_empty(), "{args:?} printed no diagnostic");
        }
    }
}

#[test]
fn scenario_file_with_flag_override_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "run.csv");
    let svg = p(dir.path(), "run.svg");
    let doc = format!(
        r#"{{"schema_version":1,"system":{{"family":"l2"}},"time":{{"t1":40}},
            "outputs":[{{"kind":"csv","path":{csv:?}}},{{"kind":"svg","path":{svg:?},"projection":"x,y","color_by":"sector"}}]}}"#
    );
    std::fs::write(dir.path().join("s.json"), doc).unwrap();
    let o = bin()
        .env("ZLORENZ_SCENARIO_DIR", dir.path())
        .args(["simulate", "--scenario", "s.json", "--t1", "30"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = zlorenz::load_csv(Path::new(&csv)).unwrap();
    assert_eq!(*traj.times().last().unwrap(), 30.0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains(zlorenz::PALETTE[1]));
    assert_eq!(code(&["simulate", "--scenario", "s.json"]), 2);
}

#[test]
fn pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (s, n, back) = (p(dir.path(), "s.csv"), p(dir.path(), "n.csv"), p(dir.path(), "b.csv"));
    assert_eq!(code(&["simulate", "--system", "standard", "--t1", "1", "--out", &s]), 0);
    assert_eq!(code(&["transform", "--direction", "std-to-l2", "--in", &s, "--out", &n]), 0);
    assert_eq!(code(&["transform", "--direction", "l2-to-std", "--in", &n, "--out", &back]), 0);
    let a = zlorenz::load_csv(Path::new(&s)).unwrap();
    let b = zlorenz::load_csv(Path::new(&back)).unwrap();
    for (x, y) in a.states().iter().zip(b.states()) {
        for k in 0..3 {
            assert!((x[k] - y[k]).abs() < 1e-12 * (1.0 + x[k].abs()));
        }
    }
    for (x, y) in a.times().iter().zip(b.times()) {
        assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
    }
}

#[test]
fn lyapunov_reports_seed_and_writes_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let conv = p(dir.path(), "conv.csv");
    let args = ["lyapunov", "--system", "standard", "--t-total", "100", "--seed", "4", "--convergence", &conv];
    let o = run(&args);
    assert_eq!(run(&args).stdout, o.stdout);
    assert_eq!(o.status.code(), Some(0));
    let line = String::from_utf8(o.stdout).unwrap();
    assert!(line.starts_with("lambda1 = ") && line.contains("seed 4"), "{line}");
    let rows = std::fs::read_to_string(&conv).unwrap();
    assert_eq!(rows.lines().count(), 201);
}

#[test]
fn fixed_points_of_l2() {
    let o = run(&["fixed-points", "--system", "l2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["(0, 0, 0)", "(1, 0, 0.8666666666666667)", "(-1, 0, 0.8666666666666667)"]);
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "a.csv");
    assert_eq!(code(&["simulate", "--system", "l2", "--t1", "20", "--out", &csv]), 0);
    let (a, b) = (p(dir.path(), "a.svg"), p(dir.path(), "b.svg"));
    assert_eq!(code(&["render", "--in", &csv, "--out", &a]), 0);
    assert_eq!(code(&["render", "--in", &csv, "--out", &b]), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn l2_run_visits_both_lobes() {
    let dir = tempfile::tempdir().unwrap();
    let a = p(dir.path(), "a.csv");
    let o = run(&["simulate", "--system", "l2", "--t1", "50", "--out", &a]);
    assert_eq!(o.status.code(), Some(0));
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(summary.contains("samples: 5001") && summary.contains("final: t=50"), "{summary}");
    let traj = zlorenz::load_csv(Path::new(&a)).unwrap();
    let flips = traj.states().windows(2).filter(|w| w[0][0].signum() != w[1][0].signum()).count();
    assert!(flips >= 1, "{flips}");
}

#[test]
fn params_shorthand_matches_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (p(dir.path(), "a.csv"), p(dir.path(), "b.csv"));
    assert_eq!(code(&["simulate", "--system", "standard", "--params", "sigma=12,r=30", "--t1", "1", "--out", &a]), 0);
    assert_eq!(code(&["simulate", "--system", "standard", "--sigma", "12", "--r", "30", "--t1", "1", "--out", &b]), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn factor_then_extend_gives_three_fold_run() {
    let dir = tempfile::tempdir().unwrap();
    let (l2, l1, l3) = (p(dir.path(), "l2.csv"), p(dir.path(), "l1.csv"), p(dir.path(), "l3.csv"));
    assert_eq!(code(&["simulate", "--system", "l2", "--t1", "20", "--out", &l2]), 0);
    assert_eq!(code(&["factor", "--in", &l2, "--out", &l1]), 0);
    assert_eq!(code(&["extend", "--n", "3", "--in", &l1, "--out", &l3]), 0);
    let q = zlorenz::load_csv(Path::new(&l1)).unwrap();
    assert!(q.colors().is_none());
    assert_eq!(q.meta.system.unwrap().name(), "l1");
    let e = zlorenz::load_csv(Path::new(&l3)).unwrap();
    assert_eq!(e.meta.system.unwrap().fold(), Some(3));
    assert_eq!(e.len(), q.len());
    let first = e.cartesian(0);
    assert!((first.radius() - q.cartesian(0).radius()).abs() < 1e-15);
}

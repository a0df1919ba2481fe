use std::path::Path;
use std::process::Command;

use infill::cli::{
    cmd_eval_design, cmd_fit_cv, cmd_noise_sweep, cmd_scaling, cmd_suggest, run, EvalDesignArgs, RunConfig,
};

fn config(dir: &Path, extra: &[&str]) -> RunConfig {
    let mut args = vec!["--output_dir".to_string(), dir.display().to_string()];
    args.extend(extra.iter().map(|s| s.to_string()));
    RunConfig::load(None, &args).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn eval_args(features: std::path::PathBuf, out: &Path) -> EvalDesignArgs {
    EvalDesignArgs {
        features,
        q: 2.0,
        p: 2.0,
        out_dir: out.to_path_buf(),
    }
}

#[test]
fn eval_design_prints_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x3.csv", "x1,x2\n0,0\n0.5,0.5\n1,1\n");
    let mut out = Vec::new();
    cmd_eval_design(&eval_args(f, dir.path()), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("1.224744871391589"), "{text}");
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("eval-design_summary.json")).unwrap()).unwrap();
    assert_eq!(json["pairs"], 3);
}

#[test]
fn eval_design_unit_pair() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "two.csv", "a,b\n0,0\n1,0\n");
    let s = cmd_eval_design(&eval_args(f, dir.path()), &mut std::io::sink()).unwrap();
    assert_eq!(s.phi_intensive, 1.0);
}

#[test]
fn eval_design_duplicates_name_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "dup.csv", "a,b\n0.1,0.2\n0.5,0.5\n0.1,0.2\n");
    let err = cmd_eval_design(&eval_args(f, dir.path()), &mut std::io::sink()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("rows 0 and 2"), "{err}");
}

#[test]
fn eval_design_reports_parse_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.csv", "a,b\n0.1,0.2\n0.5,oops\n");
    let err = cmd_eval_design(&eval_args(f, dir.path()), &mut std::io::sink()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn suggest_writes_figure_set() {
    let dir = tempfile::tempdir().unwrap();
    cmd_suggest(&config(dir.path(), &["--optimizer.budget", "300"]), &mut std::io::sink()).unwrap();
    let count = |ext: &str| {
        std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext))
            .count()
    };
    assert_eq!(count("svg"), 7);
    assert_eq!(count("json"), 2);
}

#[test]
fn suggest_without_mm_has_two_targets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &["--optimizer.budget", "300", "--mm.enabled", "false"]);
    cmd_suggest(&cfg, &mut std::io::sink()).unwrap();
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("suggest_without-mm.json")).unwrap()).unwrap();
    assert_eq!(json["y_best"].as_array().unwrap().len(), 2);
    assert!(!dir.path().join("suggest_with-mm.json").exists());
}

#[test]
fn suggest_reads_csv_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut feats = String::from("a,b,c\n");
    let mut targs = String::from("y1,y2\n");
    for i in 0..40 {
        let (a, b, c) = ((i * 7 % 40) as f64, (i * 13 % 40) as f64 * 2.0, i as f64);
        feats.push_str(&format!("{a},{b},{c}\n"));
        targs.push_str(&format!("{},{}\n", a + b, c * c));
    }
    let f = write(dir.path(), "x.csv", &feats);
    let t = write(dir.path(), "y.csv", &targs);
    let cfg = config(
        dir.path(),
        &[
            "--data.kind", "csv",
            "--data.features", f.to_str().unwrap(),
            "--data.targets", t.to_str().unwrap(),
            "--objectives", "[\"y1\",\"y2\"]",
            "--optimizer.budget", "200",
        ],
    );
    let r = cmd_suggest(&cfg, &mut std::io::sink()).unwrap();
    assert!(r.without_mm.x_best.iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(r.with_mm.unwrap().y_best.len(), 3);
}

#[test]
fn scaling_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &["--scaling.n_values", "[10,25,50,100]"]);
    cmd_scaling(&cfg, &mut std::io::sink()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("scaling_mm-vs-n.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,phi,phi_intensive,M");
    assert_eq!(lines.len(), 5);
    assert!(dir.path().join("scaling_mm-vs-n.svg").exists());
}

#[test]
fn noise_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &["--noise_sweep.sigmas", "[0.01,0.05,0.1,0.3]", "--noise_sweep.reps", "5"]);
    cmd_noise_sweep(&cfg, &mut std::io::sink()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("noise-sweep_sigma.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn fit_cv_prints_pipe_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &["--data.n", "60", "--cv.k_folds", "3"]);
    let mut out = Vec::new();
    cmd_fit_cv(&cfg, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("CV Scores Mean:"));
    assert!(text.contains("| Target   | Model            | Metric   |   Mean |    Std |    Min |    Max |"));
    let table = std::fs::read_to_string(dir.path().join("fit-cv_table.md")).unwrap();
    assert_eq!(table.lines().count(), 2 + 2 * 2 * 2);
}

#[test]
fn run_dispatches_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let mut out = Vec::new();
    run(
        ["infill", "opt-lhs", "--output_dir", &out_dir, "--opt_lhs.n", "20", "--opt_lhs.iterations", "50"],
        &mut out,
    )
    .unwrap();
    assert!(dir.path().join("opt-lhs_design.csv").exists());
    run(["infill", "point-addition", "--output_dir", &out_dir], &mut out).unwrap();
    assert!(dir.path().join("point-addition_phi-intensive.csv").exists());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_infill");
    let dir = tempfile::tempdir().unwrap();
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let dup = write(dir.path(), "dup.csv", "a\n0.5\n0.5\n");
    assert_eq!(status(&["eval-design", dup.to_str().unwrap()]), Some(3));
    assert_eq!(status(&["suggest", "--optimizer.nope", "1"]), Some(2));
    assert_eq!(status(&["frobnicate"]), Some(2));
    let ok = write(dir.path(), "ok.csv", "a\n0\n1\n");
    let out_dir = dir.path().join("o");
    assert_eq!(
        status(&["eval-design", ok.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]),
        Some(0)
    );
}

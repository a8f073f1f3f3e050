use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tcpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcpsim")).args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn path(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn run_writes_trace_metrics_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = tcpsim(&["run", "--variant", "reno", "--cbr", "9", "--duration", "5", "--out-dir", path(dir.path())]);
    ok(&out);
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.ends_with(".tr")), "{names:?}");
    assert!(names.iter().any(|n| n.contains("metrics") && n.ends_with(".csv")), "{names:?}");
    assert!(names.iter().any(|n| n.contains("meta")), "{names:?}");

    let trace = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "tr"))
        .unwrap();
    let analyzed = tcpsim(&["analyze", trace.to_str().unwrap(), "--flow", "1", "--from", "2", "--to", "5"]);
    ok(&analyzed);
    assert!(!analyzed.stdout.is_empty());
}

#[test]
fn sweep_then_plotdata_reproduces_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    ok(&tcpsim(&["sweep", "--variants", "reno,vegas", "--cbr", "2,10", "--duration", "4", "--out-dir", d]));
    let sweep_dat = fs::read_to_string(dir.path().join("throughput.dat")).unwrap();
    assert!(sweep_dat.lines().filter(|l| !l.starts_with('#')).count() >= 2);

    let plot = dir.path().join("plot");
    let csv = dir.path().join("metrics.csv");
    ok(&tcpsim(&["plotdata", csv.to_str().unwrap(), "--out-dir", path(&plot)]));
    assert_eq!(fs::read_to_string(plot.join("throughput.dat")).unwrap(), sweep_dat);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("params.conf");
    fs::write(&cfg, "# short run\nduration = 3\nseed = 5\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = tcpsim(&[
        "run", "--variant", "vegas", "--cbr", "4", "--config", cfg.to_str().unwrap(),
        "--seed", "6", "--out-dir", path(&out_dir),
    ]);
    ok(&out);
    let meta = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_string_lossy().contains("meta"))
        .unwrap();
    let meta = fs::read_to_string(meta).unwrap();
    assert!(meta.lines().any(|l| l == "duration = 3"), "{meta}");
    assert!(meta.lines().any(|l| l == "seed = 6"), "{meta}");
}

#[test]
fn bad_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = tcpsim(&["run", "--variant", "reno", "--config", cfg.to_str().unwrap(), "--out-dir", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tcpsim(&["run", "--variant", "cubic"]).status.code(), Some(2));
    assert_eq!(tcpsim(&["sweep", "--experiment", "3"]).status.code(), Some(2));
}

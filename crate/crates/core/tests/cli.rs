use std::path::Path;
use std::process::{Command, Output};

use minorext::harness::csv::CSV_HEADER;
use minorext::matgen::io::write_minx_file;
use minorext::matgen::{gen_data, DataMatrix};
use minorext::{EntryDistribution, SeedSpec};

fn minorext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minorext"))
        .args(args)
        .env("MINOREXT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scan_symmetric_text_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.txt");
    std::fs::write(&file, "5 0 0\n0 1 0\n0 0 3\n").unwrap();
    let out = minorext(&["scan", "--input", path(&file), "--m", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = stdout(&out);
    let fields: Vec<&str> = line.trim().split(',').collect();
    assert_eq!(fields[0].parse::<f64>().unwrap(), 5.0);
    assert_eq!(fields[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(&fields[2..], &["0;1", "0;1", "3", "0"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("interpretation = symmetric"));
}

#[test]
fn scan_modes_and_worker_counts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.minx");
    let x = gen_data(EntryDistribution::Gaussian, 50, 9, SeedSpec::new(4, 0)).unwrap();
    write_minx_file(&file, &x).unwrap();
    let stats = |mode: &str, workers: &str| {
        let out = minorext(&[
            "scan",
            "--input",
            path(&file),
            "--m",
            "3",
            "--mode",
            mode,
            "--workers",
            workers,
        ]);
        assert!(out.status.success());
        stdout(&out).split(',').take(4).collect::<Vec<_>>().join(",")
    };
    let reference = stats("exact", "1");
    assert_eq!(stats("pruned", "1"), reference);
    assert_eq!(stats("pruned", "3"), reference);
    assert_eq!(stats("exact", "4"), reference);
}

#[test]
fn scan_budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.minx");
    write_minx_file(
        &file,
        &gen_data(EntryDistribution::Gaussian, 10, 20, SeedSpec::new(1, 0)).unwrap(),
    )
    .unwrap();
    let out = minorext(&["scan", "--input", path(&file), "--m", "5", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(
        minorext(&["scan", "--input", "/nonexistent/file", "--m", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(minorext(&["scan", "--m", "1"]).status.code(), Some(2));
    assert_eq!(minorext(&["bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.txt");
    std::fs::write(&file, "1 2\n3\n").unwrap();
    assert_eq!(
        minorext(&["scan", "--input", path(&file), "--m", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn mc_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "ensemble = gram\ndist = uniform\nn = 200\np = 8\nm = 2\nreps = 6\nmaster_seed = 3\n",
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(
        minorext(&["mc", "--config", path(&cfg), "--out", path(&a), "--workers", "1"])
            .status
            .success()
    );
    assert!(
        minorext(&["mc", "--config", path(&cfg), "--out", path(&b), "--workers", "3"])
            .status
            .success()
    );
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 7);
}

#[test]
fn mc_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "p = 8\nm = 2\nn = 10\ncolour = blue\n").unwrap();
    let out = minorext(&["mc", "--config", path(&cfg), "--out", path(&dir.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wigner_to_stdout() {
    let out = minorext(&[
        "wigner", "--p", "12", "--m", "2", "--eta", "4", "--reps", "5", "--seed", "9",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(1).unwrap().contains(",wigner,,"));
}

#[test]
fn wigner_single_index() {
    let out = minorext(&[
        "wigner", "--p", "1", "--m", "1", "--eta", "2", "--reps", "2", "--seed", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().contains("NaN"));
}

#[test]
fn src_on_orthogonal_design() {
    // Columns of a 4x4 Hadamard matrix: XᵀX / n = I.
    let h = vec![
        1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
    ];
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.minx");
    write_minx_file(&file, &DataMatrix::new(4, 4, h).unwrap()).unwrap();
    let out = minorext(&["src", "--input", path(&file), "--m", "2"]);
    assert!(out.status.success());
    let f: Vec<String> = stdout(&out).trim().split(',').map(str::to_string).collect();
    assert_eq!(f[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(f[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(&f[2..], &["2", "4", "4"]);
}

#[test]
fn netcheck_and_moddev_report() {
    let out = minorext(&["netcheck", "--m", "2", "--eps", "0.3", "--trials", "50", "--seed", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("holds_count=50"));
    assert!(text.contains("within_size_bound=true"));
    assert_eq!(
        minorext(&["netcheck", "--m", "2", "--eps", "0.6", "--trials", "1", "--seed", "2"])
            .status
            .code(),
        Some(2)
    );

    let out = minorext(&[
        "moddev", "--n", "100", "--exp", "0.2", "--mu", "1", "--reps", "100000", "--seed", "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rate: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("rate_hat="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rate < 0.0);
}

//! End-to-end tests of the `srm` binary.

use std::fs;
use std::process::{Command, Output};

fn srm(args: &[&str]) -> Output {
    srm_env(args, &[])
}

fn srm_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srm"));
    cmd.args(args).env_remove("SRM_NUM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value column of a one-row compute/empirical CSV report.
fn csv_value(o: &Output, column: &str) -> String {
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    assert_eq!(header.len(), row.len(), "{}", stdout(o));
    let i = header.iter().position(|h| h == column).unwrap();
    row[i].to_string()
}

#[test]
fn table_one_csv() {
    let o = srm(&["table", "--id", "1", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "k,normal,cauchy,uniform,\"beta(2,4)\",gumbel");
    assert!(lines[2].starts_with("5,1.080,"), "{}", lines[2]);
    assert!(!text.contains('#'));
}

#[test]
fn table_output_is_byte_stable_across_thread_counts() {
    let a = srm_env(&["table", "--id", "3"], &[("SRM_NUM_THREADS", "1")]);
    let b = srm_env(&["table", "--id", "3"], &[("SRM_NUM_THREADS", "4")]);
    let c = srm(&["table", "--id", "3"]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn full_precision_tables() {
    let o = srm(&["table", "--id", "1", "--precision", "full"]);
    let text = stdout(&o);
    let row = text.lines().nth(2).unwrap();
    let normal: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((normal - 1.080).abs() < 5e-3);
    assert!(row.split(',').nth(1).unwrap().len() > 6);
}

#[test]
fn pretty_table_annotates_heavy_tail() {
    let o = srm(&["table", "--id", "2", "--format", "pretty"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# heavy-tail: grid-sensitive"));
}

#[test]
fn compute_examples() {
    let o = srm(&[
        "compute",
        "--dist",
        "uniform",
        "--spectrum",
        "exp",
        "--k",
        "1",
        "--mode",
        "repro",
        "--rule",
        "simpson",
        "--n",
        "10000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_value(&o, "value"), "0.582");

    let o = srm(&[
        "compute",
        "--dist",
        "uniform",
        "--spectrum",
        "es",
        "--alpha",
        "0",
    ]);
    assert_eq!(csv_value(&o, "value"), "0.500");
    assert_eq!(csv_value(&o, "captured_mass"), "1");

    let o = srm(&[
        "compute",
        "--dist",
        "normal",
        "--spectrum",
        "var",
        "--alpha",
        "0.975",
        "--precision",
        "full",
    ]);
    let v: f64 = csv_value(&o, "value").parse().unwrap();
    assert!((v - 1.959963984540054).abs() < 1e-9);
}

#[test]
fn tsv_output() {
    let o = srm(&[
        "compute",
        "--dist",
        "beta",
        "--spectrum",
        "es",
        "--alpha",
        "0",
        "--format",
        "tsv",
    ]);
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split('\t').next().unwrap(), "beta(2,4)");
    assert_eq!(row.split('\t').nth(3).unwrap(), "0.333");
}

#[test]
fn validation_errors_exit_2() {
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "compute",
                "--dist",
                "uniform",
                "--spectrum",
                "exp",
                "--k",
                "0",
            ],
            "--k",
        ),
        (
            &[
                "compute",
                "--dist",
                "uniform",
                "--spectrum",
                "es",
                "--alpha",
                "1.5",
            ],
            "--alpha",
        ),
        (
            &[
                "compute",
                "--dist",
                "weird",
                "--spectrum",
                "es",
                "--alpha",
                "0.5",
            ],
            "--dist",
        ),
        (
            &[
                "compute",
                "--dist",
                "uniform",
                "--spectrum",
                "power-high",
                "--gamma",
                "0.5",
            ],
            "--gamma",
        ),
        (
            &[
                "compute",
                "--dist",
                "uniform",
                "--spectrum",
                "es",
                "--alpha",
                "0.5",
                "--n",
                "0",
            ],
            "--n",
        ),
        (&["table"], "--id"),
        (
            &["sweep", "--dist", "normal", "--family", "exp"],
            "--params",
        ),
        (&["frobnicate"], "frobnicate"),
    ];
    for (args, key) in cases {
        let o = srm(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(key), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_validation_error() {
    let o = srm_env(&["table", "--id", "1"], &[("SRM_NUM_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("SRM_NUM_THREADS"));
    let o = srm_env(&["table", "--id", "1"], &[("SRM_NUM_THREADS", "0")]);
    assert!(o.status.success());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# uniform ES\ndist = uniform\nspectrum = es\nalpha = 0.5\nprecision=full\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = srm(&["compute", "--config", cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((csv_value(&o, "value").parse::<f64>().unwrap() - 0.75).abs() < 1e-12);

    let o = srm(&["compute", "--config", cfg, "--alpha", "0"]);
    assert!((csv_value(&o, "value").parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn config_file_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "dist = uniform\ncolour = blue\n").unwrap();
    let o = srm(&["compute", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    fs::write(&cfg, "dist = uniform\nspectrum = exp\nk = -3\n").unwrap();
    let o = srm(&["compute", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k"), "{}", stderr(&o));

    let o = srm(&[
        "compute",
        "--config",
        dir.path().join("absent.cfg").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"), "{}", stderr(&o));
}

#[test]
fn out_path_writes_file_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig5.csv");
    let o = srm(&["figure", "--id", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("p,gamma=1.5,gamma=5\n"));
    assert_eq!(text.lines().count(), 1 + 1001);
    assert_eq!(text.lines().last().unwrap(), "1,1.5,5");
    let leftovers = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);

    let o = srm(&[
        "figure",
        "--id",
        "5",
        "--out",
        dir.path().join("missing/x.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--out"));
}

#[test]
fn figure_sweep_has_all_distributions() {
    let o = srm(&["figure", "--id", "2"]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "k,normal,cauchy,uniform,\"beta(2,4)\",gumbel"
    );
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn sweep_command() {
    let o = srm(&[
        "sweep",
        "--dist",
        "uniform",
        "--family",
        "power-high",
        "--params",
        "1.5,5,20",
        "--mode",
        "repro",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 3);
    assert!((values[0] - 0.600).abs() < 1e-3);
    assert!((values[2] - 0.950).abs() < 1e-3);
}

#[test]
fn empirical_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let two = path("two.csv", "loss\n0\n1\n");
    let o = srm(&[
        "empirical",
        "--input",
        &two,
        "--spectrum",
        "es",
        "--alpha",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_value(&o, "value").parse::<f64>().unwrap(), 1.0);
    assert_eq!(csv_value(&o, "sample_size"), "2");
    assert_eq!(csv_value(&o, "captured_mass"), "1");

    let one = path("one.csv", "5\n");
    for spec in [
        &["--spectrum", "exp", "--k", "7"][..],
        &["--spectrum", "power-low", "--gamma", "0.3"],
        &["--spectrum", "power-high", "--gamma", "4"],
    ] {
        let mut args = vec!["empirical", "--input", &one];
        args.extend_from_slice(spec);
        let o = srm(&args);
        assert_eq!(
            csv_value(&o, "value").parse::<f64>().unwrap(),
            5.0,
            "{spec:?}"
        );
    }

    let three = path("three.csv", "3\n1\n2\n");
    let o = srm(&[
        "empirical",
        "--input",
        &three,
        "--spectrum",
        "var",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(csv_value(&o, "value").parse::<f64>().unwrap(), 2.0);

    let o = srm(&[
        "empirical",
        "--input",
        &three,
        "--spectrum",
        "es",
        "--alpha",
        "0",
        "--format",
        "pretty",
    ]);
    let text = stdout(&o);
    assert!(text.contains("sample size    3"));
    assert!(text.contains("value          2.000"));
}

#[test]
fn empirical_ingestion_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "loss\n1.0\nabc\n").unwrap();
    let o = srm(&[
        "empirical",
        "--input",
        bad.to_str().unwrap(),
        "--spectrum",
        "es",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = srm(&[
        "empirical",
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--spectrum",
        "es",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.csv"), "{}", stderr(&o));

    let o = srm(&["empirical", "--spectrum", "es", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--input"));
}

#[test]
fn check_command_passes() {
    let o = srm(&["check"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let verdicts = text
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .count();
    assert_eq!(verdicts, spectral_risk::engine::checks::check_names().len());
    assert!(!text.contains("FAIL"));
}

use std::process::Command;

use clap::Parser;
use nilconj_cli::{render_report, run, Cli, Format, Output, EXIT_BUDGET, EXIT_ERROR, EXIT_NOT_CONJUGATE, EXIT_OK};

fn cli(args: &[&str]) -> Output {
    let cli = Cli::try_parse_from(std::iter::once("nilconj").chain(args.iter().copied())).unwrap();
    run(&cli)
}

fn first_line(output: &Output) -> &str {
    output.stdout.lines().next().unwrap_or("")
}

const G2_WITNESS_U: &str = "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2";

#[test]
fn nf_collects_into_normal_form() {
    assert_eq!(first_line(&cli(&["nf", "--group", "gm:1", "b1 a1"])), "a1 b1 c1");
    assert_eq!(first_line(&cli(&["nf", "--group", "gm:2", ""])), "identity");
    let out = cli(&["nf", "--group", "gm:1", G2_WITNESS_U]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "b1 b2^2 c1^-4\nx: 0 1 2\nz: -4\nt: \n");
}

#[test]
fn nf_reports_the_offending_token() {
    let out = cli(&["nf", "--group", "gm:1", "a1 q7 b1"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("q7"), "{}", out.stderr);
    let out = cli(&["nf", "--group", "gm:1", "a1^x"]);
    assert!(out.stderr.contains("a1^x"), "{}", out.stderr);
}

#[test]
fn conj_exit_codes_and_certificates() {
    let out = cli(&["conj", "--group", "gm:2", G2_WITNESS_U, "b1 b2^2"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "conjugate\nwitness: a1^4 a2^8\nlength: 12\n");

    let out = cli(&["conj", "--group", "gm:1", "c1", ""]);
    assert_eq!((out.code, out.stdout.as_str()), (EXIT_NOT_CONJUGATE, "not-conjugate\n"));

    let out = cli(&["conj", "--group", "gm:2", "a1 b2", "a1 b2"]);
    assert_eq!(out.stdout, "conjugate\nwitness: identity\nlength: 0\n");

    let out = cli(&["conj", "--group", "gm:2", "a1", "b1"]);
    assert_eq!(out.code, EXIT_NOT_CONJUGATE);

    let out = cli(&["conj", "--group", "gm:2", "a1", "zz"]);
    assert_eq!(out.code, EXIT_ERROR);
}

#[test]
fn conj_budget_exhaustion_prints_incumbent() {
    let u = "b1 b2^3 a1^-3 b1^-3 a1^3 b1^3";
    let out = cli(&["conj", "--group", "gm:3", "--budget", "1", u, "b1 b2^3"]);
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stdout.starts_with("budget-exceeded\nwitness: "), "{}", out.stdout);
}

#[test]
fn cl_prints_the_length() {
    let out = cli(&["cl", "--group", "gm:1", "b1 b2^5 a1^-5 b1^-5 a1^5 b1^5", "b1 b2^5"]);
    assert_eq!((out.code, out.stdout.as_str()), (EXIT_OK, "25\n"));
}

#[test]
fn conj_json_and_dump() {
    let out = cli(&["conj", "--group", "gm:2", "--format", "json", "--dump-system", G2_WITNESS_U, "b1 b2^2"]);
    let value: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(value["decision"], "conjugate");
    assert_eq!(value["length"], 12);
    assert_eq!(value["a_exponents"], serde_json::json!([4, 8, 0, 0]));
    assert_eq!(out.stderr, "# M\n2,4\n1,0,0,0\n-2,1,0,0\n# b\n2,1\n4\n0\n");
}

#[test]
fn gm_csv_and_json_carry_the_same_rows() {
    let csv = cli(&["gm", "--m", "1", "--n", "4..12", "--format", "csv"]);
    assert_eq!(csv.code, EXIT_OK);
    let lines: Vec<&str> = csv.stdout.lines().collect();
    assert_eq!(lines[0], "m,n,input_size,cl,predicted,minor_bound,wall_time_s");
    for (row, n) in lines[1..10].iter().zip(4u64..) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[3], (n * n).to_string());
    }
    let slope: f64 = lines[10].strip_prefix("# slope=").unwrap().parse().unwrap();
    assert!((slope - 2.0).abs() < 0.15);

    // Same report rendered both ways.
    let report = nilconj::gm_lab::growth_experiment(1, &[4, 5, 6, 7, 8], 1_000_000).unwrap();
    let csv = render_report(&report, Format::Csv);
    let value: serde_json::Value = serde_json::from_str(&render_report(&report, Format::Json)).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).take(5).collect();
    for (row, record) in rows.iter().zip(value["records"].as_array().unwrap()) {
        let fields: Vec<&str> = row.split(',').collect();
        let keys = ["m", "n", "input_size", "cl", "predicted", "minor_bound"];
        for (field, key) in fields.iter().zip(keys) {
            assert_eq!(*field, record[key].to_string());
        }
        let csv_time: f64 = fields[6].parse().unwrap();
        assert_eq!(csv_time, record["wall_time_s"].as_f64().unwrap());
    }
    let csv_slope: f64 = csv.lines().last().unwrap().strip_prefix("# slope=").unwrap().parse().unwrap();
    assert!((csv_slope - value["slope"].as_f64().unwrap()).abs() < 1e-6);

    let single = cli(&["gm", "--m", "2", "--n", "2..2"]);
    assert_eq!(single.stdout.lines().count(), 3);
    assert!(single.stdout.ends_with("# slope=absent\n"));
}

#[test]
fn gm_m3_slope_is_near_four() {
    let out = cli(&["gm", "--m", "3", "--n", "4..16"]);
    let last = out.stdout.lines().last().unwrap();
    let slope: f64 = last.strip_prefix("# slope=").unwrap().parse().unwrap();
    assert!((slope - 4.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn selftest_is_deterministic_and_catches_corruption() {
    let first = cli(&["selftest", "--seed", "7"]);
    assert_eq!(first.code, EXIT_OK, "{}", first.stdout);
    assert_eq!(first, cli(&["selftest", "--seed", "7"]));
    let corrupted = cli(&["selftest", "--inject-corrupt-gamma"]);
    assert_eq!(corrupted.code, EXIT_ERROR);
    let failures: Vec<&str> = corrupted.stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failures.len(), 1);
    assert!(failures[0].starts_with("FAIL presentation.antisymmetry"));
}

#[test]
fn presentation_files_are_loaded() {
    let dir = std::env::temp_dir().join(format!("nilconj-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = dir.join("heisenberg.txt");
    std::fs::write(&text, "# Heisenberg group\n2 1 0\nnames x y z\ngamma 1 2 1 1\n").unwrap();
    let json = dir.join("torsion.json");
    std::fs::write(&json, r#"{"k":2,"m":0,"l":1,"orders":[4],"gamma":[{"i":1,"j":2,"s":1,"value":1}]}"#).unwrap();

    let out = cli(&["nf", "--group", text.to_str().unwrap(), "y x"]);
    assert_eq!(first_line(&out), "x y z^-1");
    let out = cli(&["nf", "--group", json.to_str().unwrap(), "a2 a1"]);
    assert_eq!(first_line(&out), "a1 a2 c1^-1");
    let out = cli(&["nf", "--group", json.to_str().unwrap(), "c1^7"]);
    assert_eq!(out.stdout.lines().nth(3), Some("t: 3"));

    let out = cli(&["nf", "--group", dir.join("missing.txt").to_str().unwrap(), "a1"]);
    assert_eq!(out.code, EXIT_ERROR);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nilconj");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let out = status(&["conj", "--group", "gm:1", "c1", ""]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "not-conjugate\n");
    assert_eq!(status(&["nf", "--group", "gm:1", "b1 a1"]).status.code(), Some(0));
    assert_eq!(status(&["nf", "a1"]).status.code(), Some(2));
    assert_eq!(status(&["conj", "--group", "gm:1", "--budget", "0", "a1", "a1"]).status.code(), Some(2));
    assert_eq!(status(&["bogus"]).status.code(), Some(2));
}

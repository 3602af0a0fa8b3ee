use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercube-pst")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Rows of the named table as string fields, header first.
fn table(csv: &str, name: &str) -> Vec<Vec<String>> {
    let marker = format!("# table: {name}");
    let mut lines = csv.lines().skip_while(|l| *l != marker);
    assert!(lines.next().is_some(), "table {name} missing");
    lines.take_while(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn topology_d3_adjacency() {
    let out = stdout(&["topology", "--d", "3", "--no-timestamp"]);
    let rows = table(&out, "adjacency-d3");
    let expected = [
        "01101000", "10010100", "10010010", "01100001", "10000110", "01001001", "00101001", "00010110",
    ];
    assert_eq!(rows.len(), 9);
    for (row, want) in rows[1..].iter().zip(expected) {
        let bits: String = row[1..].concat();
        assert_eq!(bits, want);
    }
}

#[test]
fn topology_d1_and_spectrum() {
    let out = stdout(&["topology", "--d", "1", "--no-timestamp"]);
    assert_eq!(table(&out, "adjacency-d1"), vec![vec!["node", "0", "1"], vec!["0", "0", "1"], vec!["1", "1", "0"]]);

    let out = stdout(&["topology", "--d", "10", "--spectrum", "--no-timestamp"]);
    let rows = table(&out, "spectrum");
    let binom = [1.0, 10.0, 45.0, 120.0, 210.0, 252.0, 210.0, 120.0, 45.0, 10.0, 1.0];
    assert_eq!(column(&rows, "multiplicity"), binom);
    assert_eq!(column(&rows, "numeric_count"), binom);
    assert!(!out.contains("adjacency"));
}

#[test]
fn fig2_zero_coupling_and_correction() {
    let out = stdout(&["fig2", "--d", "6", "--zeta", "0,0.005", "--no-timestamp"]);
    let rows = table(&out, "fig2");
    let err = column(&rows, "error");
    let corrected = column(&rows, "corrected");
    assert_eq!(&err[..2], &[0.0, 0.0]);
    assert_eq!(corrected, [0.0, 1.0, 0.0, 1.0]);
    assert!(err[3] * 100.0 < err[2]);
}

#[test]
fn fig3_coherent_limit() {
    let out = stdout(&["fig3", "--d", "2", "--t1-ns", "inf", "--tphi-ns", "inf", "--points", "21", "--no-timestamp"]);
    let rows = table(&out, "fig3");
    let numeric = column(&rows, "rho_bb_numeric");
    let closed = column(&rows, "rho_bb_closed_form");
    let coherent = column(&rows, "rho_bb_coherent");
    for k in 0..numeric.len() {
        assert!((numeric[k] - coherent[k]).abs() < 1e-8);
        assert!((closed[k] - coherent[k]).abs() < 1e-12);
    }
    assert!(out.contains("# tphi_ns: \"inf\""));
}

#[test]
fn fig3_peak_near_transfer_time() {
    let out = stdout(&["fig3", "--d", "2", "--no-timestamp"]);
    let summary = table(&out, "fig3-summary");
    let peak = column(&summary, "peak_time_ns")[0];
    assert!((peak - 20.0).abs() <= 0.5, "{peak}");
    assert!(column(&summary, "max_deviation")[0] < 0.05);
}

#[test]
fn disorder_rows() {
    let out = stdout(&["fig4", "--d", "4,6,8", "--relative-delta", "0,0.2,0.4", "--trials", "50", "--no-timestamp"]);
    let rows = table(&out, "ensembles");
    let mean = column(&rows, "mean_fidelity");
    let rel = column(&rows, "delta_zeta_over_zeta");
    for (m, r) in mean.iter().zip(&rel) {
        if *r == 0.0 {
            assert!((m - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(column(&table(&out, "gaussian-fit"), "d"), [4.0, 6.0, 8.0]);
    assert_eq!(table(&out, "localization-fit").len(), 4);

    let out = stdout(&["disorder", "--d", "10", "--trials", "100", "--no-timestamp"]);
    assert!(column(&table(&out, "ensembles"), "mean_fidelity")[0] > 0.95);
}

#[test]
fn per_trial_output() {
    let out = stdout(&["disorder", "--d", "5", "--trials", "7", "--per-trial", "--no-timestamp"]);
    assert_eq!(table(&out, "per-trial").len(), 8);
}

#[test]
fn bound_values() {
    let out = stdout(&["bound", "--d", "1,20", "--no-timestamp"]);
    let rows = table(&out, "bound");
    for lb in column(&rows, "lower_bound") {
        assert!((lb - 0.8207).abs() < 1e-4);
    }
    let avg = column(&rows, "average_fidelity");
    assert!(avg.iter().all(|&a| a >= 0.8207));
    assert!((column(&rows, "fixed_capacitor_ratio")[1] - 1.146).abs() < 1e-3);

    let out = stdout(&["bound", "--t1-ns", "inf", "--tphi-ns", "inf", "--no-timestamp"]);
    let rows = table(&out, "bound");
    for name in ["fidelity_excitation", "average_fidelity", "lower_bound"] {
        assert!((column(&rows, name)[0] - 1.0).abs() < 1e-12, "{name}");
    }
}

#[test]
fn program_subcubes() {
    let out = stdout(&["program", "--a", "101", "--b", "101", "--no-timestamp"]);
    // Only off-resonant leakage to the detuned neighbours.
    assert!(column(&table(&out, "transfer"), "fidelity_at_t")[0] > 0.9999);

    let out = stdout(&["program", "--d", "3", "--no-timestamp"]);
    let nodes = table(&out, "nodes");
    assert!(column(&nodes, "in_subcube").iter().all(|&x| x == 1.0));
    assert!(column(&table(&out, "transfer"), "fidelity_at_t")[0] > 0.999);

    let out = stdout(&["program", "--a", "000", "--b", "011", "--no-timestamp"]);
    assert_eq!(column(&table(&out, "nodes"), "in_subcube"), [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(column(&table(&out, "transfer"), "fidelity_at_t")[0] > 0.99);
}

#[test]
fn byte_identical_across_thread_counts() {
    let base = ["fig4", "--d", "4,6", "--relative-delta", "0.1,0.3,0.5", "--trials", "40", "--seed", "9", "--no-timestamp"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let four = run(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);

    let fig2 = ["fig2", "--d", "3,8", "--no-timestamp", "--format", "json"];
    assert_eq!(run(&[&fig2[..], &["--threads", "1"]].concat()).stdout, run(&[&fig2[..], &["--threads", "3"]].concat()).stdout);
}

#[test]
fn timestamp_line_is_optional() {
    let with = stdout(&["topology", "--d", "2"]);
    let without = stdout(&["topology", "--d", "2", "--no-timestamp"]);
    assert!(with.lines().any(|l| l.starts_with("# generated-unix: ")));
    assert!(!without.contains("generated"));
    let stripped: Vec<&str> = with.lines().filter(|l| !l.starts_with("# generated-unix")).collect();
    assert_eq!(stripped, without.lines().collect::<Vec<_>>());
    assert!(without.starts_with("# hypercube-pst "));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["topology", "--d", "0"]), Some(2));
    assert_eq!(code(&["topology", "--d", "13"]), Some(2));
    assert_eq!(code(&["fig2", "--zeta", "0.06"]), Some(2));
    assert_eq!(code(&["bound", "--zeta", "0.01", "--cx-pf", "1", "--cc-ff", "5", "--ic-ua", "21", "--bias-ua", "20"]), Some(2));
    assert_eq!(code(&["bound", "--cx-pf", "1"]), Some(2));
    assert_eq!(code(&["disorder", "--relative-delta", "1.5"]), Some(2));
    assert_eq!(code(&["program", "--a", "01", "--b", "011"]), Some(2));
    assert_eq!(code(&["bound", "--t1-ns", "-3"]), Some(2));
    assert_eq!(code(&["nonsense"]), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(code(&["bound", "--out", missing.to_str().unwrap()]), Some(1));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"d": [4], "zeta": [0.004], "t1-ns": 50, "no-timestamp": true}"#).unwrap();
    let p = path.to_str().unwrap();

    let out = stdout(&["bound", "--config", p]);
    let rows = table(&out, "bound");
    assert_eq!(column(&rows, "d"), [4.0]);
    assert_eq!(column(&rows, "zeta"), [0.004]);
    assert_eq!(column(&rows, "t1_ns"), [50.0]);
    assert!(!out.contains("generated"));

    let out = stdout(&["bound", "--config", p, "--d", "6", "--t1-ns", "70"]);
    let rows = table(&out, "bound");
    assert_eq!(column(&rows, "d"), [6.0]);
    assert_eq!(column(&rows, "t1_ns"), [70.0]);

    // Circuit values on the command line replace the file's zeta.
    let out = stdout(&["bound", "--config", p, "--cx-pf", "1", "--cc-ff", "5", "--ic-ua", "21", "--bias-ua", "20.8"]);
    assert!((column(&table(&out, "bound"), "zeta")[0] - 5.0 / 1020.0).abs() < 1e-12);

    std::fs::write(&path, r#"{"zeta": [0.004], "cx-pf": 1}"#).unwrap();
    assert_eq!(run(&["bound", "--config", p]).status.code(), Some(2));
    std::fs::write(&path, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(run(&["bound", "--config", p]).status.code(), Some(2));
}

#[test]
fn json_and_svg_formats() {
    let json = stdout(&["bound", "--format", "json", "--no-timestamp"]);
    assert!(json.contains("\"config\"") && json.contains("\"lower_bound\""));
    assert!(!json.contains("generated"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.svg");
    stdout(&["fig2", "--d", "6", "--format", "svg", "--out", path.to_str().unwrap()]);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<polyline"));
}

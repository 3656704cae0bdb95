use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, String) {
    let out = dir.join(name);
    let mut all = args.to_vec();
    let out_str = out.to_str().unwrap();
    all.extend(["--out", out_str]);
    let output = run(&all);
    let csv = fs::read_to_string(&out).unwrap_or_default();
    (output, csv)
}

/// Header row and data rows, without `#` lines.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn cpb_levels_default_sweep_schema() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(dir.path(), "levels.csv", &["cpb-levels"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(csv.starts_with("# qspectra cpb-levels\n"));
    assert!(csv.contains("# ej_over_ec = 50\n"));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["n_g", "E0", "E1", "E2", "E3", "E4"]);
    assert_eq!(rows.len(), 101);
    let first: Vec<f64> = rows[0].iter().map(|c| c.parse().unwrap()).collect();
    let last: f64 = rows[100][0].parse().unwrap();
    assert_eq!((first[0], last), (0.0, 1.0));
    assert!(first[1..].windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# transmon-ish box\nej_over_ec = 20\nn_levels = 3\nsweep.key = n_g\nsweep.start = 0\nsweep.stop = 0.5\nsweep.steps = 6\n",
    )
    .unwrap();
    let (o, csv) = run_to(
        dir.path(),
        "out.csv",
        &["cpb-levels", "--config", cfg.to_str().unwrap(), "--set", "ej_over_ec=1", "--set", "method=charge-basis"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(csv.contains("# ej_over_ec = 1\n") && csv.contains("# method = charge-basis\n"));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["n_g", "E0", "E1", "E2"]);
    assert_eq!(rows.len(), 6);
}

#[test]
fn pi_suffix_is_accepted() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(
        dir.path(),
        "j.csv",
        &["junction-levels", "--set", "sweep.key=phi", "--set", "sweep.start=0", "--set", "sweep.stop=1pi", "--set", "sweep.steps=3"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["phi", "l", "m", "n", "energy", "delta_lm"]);
    let phis: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(phis.contains(&std::f64::consts::PI));
    for r in &rows {
        let e: f64 = r[4].parse().unwrap();
        let gap: f64 = r[5].parse().unwrap();
        assert!(e.abs() < gap.abs());
    }
}

#[test]
fn cpb_oracle_compare_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(dir.path(), "oracle.csv", &["oracle-compare"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["ej_over_ec", "n_g", "k", "mathieu", "charge_basis", "rel_dev"]);
    let worst = rows
        .iter()
        .map(|r| r[5].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for cmd in ["cpb-dispersion", "junction-current"] {
        let (_, a) = run_to(dir.path(), "a.csv", &[cmd, "--seed", "3"]);
        let (_, b) = run_to(dir.path(), "b.csv", &[cmd, "--seed", "3"]);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd}");
    }
    let random = ["basis-map", "--set", "source=random", "--set", "samples=50", "--seed", "11"];
    let (o, a) = run_to(dir.path(), "a.csv", &random);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, b) = run_to(dir.path(), "b.csv", &random);
    assert_eq!(a, b);
    assert_eq!(table(&a).1.len(), 50);
    let mut other = random;
    other[6] = "12";
    let (_, c) = run_to(dir.path(), "c.csv", &other);
    assert_ne!(table(&a).1, table(&c).1);
}

#[test]
fn basis_map_random_rows_are_consistent() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(
        dir.path(),
        "r.csv",
        &["basis-map", "--set", "source=random", "--set", "samples=200", "--seed", "1"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&csv);
    assert_eq!(header.first().map(String::as_str), Some("sample"));
    assert_eq!(header.last().map(String::as_str), Some("status"));
    for r in &rows {
        let residual: f64 = r[r.len() - 2].parse().unwrap();
        let status = &r[r.len() - 1];
        assert!(status == "ok" || status == "singular", "{status}");
        if status == "ok" {
            assert!(residual < 1e-8, "{residual}");
        }
    }
}

#[test]
fn parity_sweep_reports_both_junction_types() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(dir.path(), "p.csv", &["junction-parity", "--set", "n_phi=16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["l_f", "critical_current", "junction_type", "slope_at_zero"]);
    let types: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(types[..2], ["pi", "zero"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("l_f = 1: pi junction"));
}

#[test]
fn svg_is_written_on_request() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("plot.svg");
    let (o, _) = run_to(
        dir.path(),
        "d.csv",
        &["cpb-anharmonicity", "--svg", svg.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(text.contains("<polyline"));
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["cpb-levels", "--set", "bogus=1"][..],
        &["cpb-levels", "--set", "e_c=-1"],
        &["cpb-levels", "--set", "n_levels=2.5"],
        &["cpb-levels", "--set", "method=shooting"],
        &["junction-parity", "--set", "sweep.key=l_f", "--set", "sweep.start=1", "--set", "sweep.stop=2", "--set", "sweep.steps=3"],
        &["oracle-compare", "--set", "sweep.key=n_g", "--set", "sweep.start=0", "--set", "sweep.stop=1", "--set", "sweep.steps=3"],
        &["not-a-command"],
    ] {
        let (o, _) = run_to(dir.path(), "x.csv", args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        let line = err.lines().last().unwrap();
        assert!(line.starts_with("error kind=validation code=2 message=\""), "{line}");
    }
    assert_eq!(run(&["cpb-levels"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_3_and_keeps_the_csv() {
    let dir = TempDir::new().unwrap();
    let (o, csv) = run_to(dir.path(), "o.csv", &["oracle-compare", "--set", "tolerance=1e-30"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("error kind=computation code=3"));
    assert!(!table(&csv).1.is_empty());
}

#[test]
fn unwritable_output_exits_4() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    let o = run(&["cpb-levels", "--out", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("error kind=io code=4"));

    let cfg = dir.path().join("absent.cfg");
    let (o, _) = run_to(dir.path(), "x.csv", &["cpb-levels", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

use std::path::Path;
use std::process::{Command, Output};

use orbprod::io::read_csv_rows;

fn orbprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbprod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse::<f64>().unwrap()).collect()
}

fn result_json(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["result"].clone()
}

#[test]
fn density_csv_integrates_to_one() {
    let o = orbprod(&["density", "conj", "pi/2", "pi/3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# command: orbprod density conj pi/2 pi/3\n# seed: 0\n# version: "));
    let rows = read_csv_rows(&text);
    assert_eq!(rows.len(), 200);
    let (x, f) = (column(&rows, 0), column(&rows, 1));
    let trap: f64 = x.windows(2).zip(f.windows(2)).map(|(x, f)| 0.5 * (f[0] + f[1]) * (x[1] - x[0])).sum();
    assert!((trap - 1.0).abs() < 1e-3, "{trap}");
    assert!(!text.contains('\r'));
}

#[test]
fn density_support_sl2c() {
    let o = orbprod(&["density", "sphC", "1.0", "1.0"]);
    assert!(o.status.success());
    let x = column(&read_csv_rows(&stdout(&o)), 0);
    assert_eq!(x[0], 0.0);
    assert_eq!(*x.last().unwrap(), 2.0);
}

#[test]
fn singular_endpoints_are_marked() {
    let o = orbprod(&["density", "sphA", "0.7", "0.6", "--grid", "11"]);
    let rows = read_csv_rows(&stdout(&o));
    assert_eq!(rows[0][4], "1");
    assert_eq!(rows[10][4], "1");
    assert!(rows[0][1].parse::<f64>().unwrap().is_infinite());
    assert_eq!(rows[5][4], "0");
}

#[test]
fn degenerate_class_exits_two() {
    let o = orbprod(&["density", "conj", "0", "pi/3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DegenerateClass"));
    let o = orbprod(&["compare", "sphB", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DegenerateClass"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(orbprod(&["density", "conj", "pi/x", "1"]).status.code(), Some(2));
    assert_eq!(orbprod(&["nonsense"]).status.code(), Some(2));
    assert_eq!(orbprod(&["--n", "0", "compare", "conj", "1", "1"]).status.code(), Some(2));
    let o = orbprod(&["pointset", "icosa", "0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidParams"));
}

#[test]
fn compare_is_accurate_and_reproducible() {
    let args = ["compare", "conj", "pi/2", "pi/3", "--n", "1000000", "--seed", "0"];
    let a = orbprod(&args);
    let b = orbprod(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r = result_json(&a);
    assert!(r["ks"].as_f64().unwrap() < 0.005);
    assert_eq!(r["kind"], "CONJ_SU2");
}

#[test]
fn compare_small_n_is_well_formed() {
    let o = orbprod(&["compare", "conj", "pi/2", "pi/3", "--n", "10"]);
    assert!(o.status.success());
    let r = result_json(&o);
    assert_eq!(r["n"], 10);
    let ks = r["ks"].as_f64().unwrap();
    assert!(ks > 0.0 && ks <= 1.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = orbprod(&["compare", "sphC", "0.5", "2", "--n", "200000", "--threads", "1", "--seed", "3"]);
    let four = orbprod(&["compare", "sphC", "0.5", "2", "--n", "200000", "--threads", "4", "--seed", "3"]);
    assert_eq!(result_json(&one), result_json(&four));
}

#[test]
fn pointset_icosa_has_2172_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("icosa.csv");
    let o = orbprod(&["pointset", "icosa", "13", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = read_csv_rows(&text);
    assert_eq!(rows.len(), 2172);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn thomson_twelve() {
    let o = orbprod(&["thomson", "12", "1.0", "20"]);
    assert!(o.status.success());
    let e = result_json(&o)["report"]["energy"].as_f64().unwrap();
    assert!((e - 49.1653).abs() < 1e-3, "{e}");
}

#[test]
fn quantize_json() {
    let o = orbprod(&["quantize", "2", "1"]);
    assert!(o.status.success());
    let r = result_json(&o);
    assert_eq!(r["cg_labels"], serde_json::json!([1, 3]));
    assert_eq!(r["folded"], false);
    assert_eq!(orbprod(&["quantize", "0", "3"]).status.code(), Some(2));
}

#[test]
fn series_rows_approach_reference() {
    let o = orbprod(&["series", "π/2", "pi/2", "pi/2", "10000"]);
    let rows = read_csv_rows(&stdout(&o));
    let last = rows.last().unwrap();
    let (ces, reference) = (last[2].parse::<f64>().unwrap(), last[3].parse::<f64>().unwrap());
    assert_eq!(last[0], "10000");
    assert!((ces / reference - 1.0).abs() < 1e-3);
}

#[test]
fn constants_flag_the_stated_su2_constant() {
    let r = result_json(&orbprod(&["constants", "sphA", "0.7071067811865476", "0.6"]));
    assert_eq!(r["flagged"], true);
    assert!((r["verified_constant"].as_f64().unwrap() - 2.0 / std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn files_are_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = orbprod(&[
            "discretize",
            "polar",
            "pi/2",
            "pi/3",
            "--points",
            "200",
            "--seed",
            "5",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        p
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let strip = |p: &Path| {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# command"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

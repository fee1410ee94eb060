use std::fs;
use std::process::{Command, Output};

use fvbv::harness::parse_csv;
use fvbv::mesh::{read_mesh_dump, PolygonalMesh};

fn fvbv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvbv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_cases_names_every_case() {
    let o = fvbv(&["list-cases"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["ex1-linear", "ex1-sinusoidal", "ex2-linear", "ex2-sinusoidal", "ex3-nonlinear", "despres"] {
        assert!(s.lines().any(|l| l == name), "missing {name}");
    }
}

#[test]
fn run_writes_parseable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = fvbv(&["run", "--case", "ex2-linear", "--rows", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.metadata.iter().any(|(k, v)| k == "case" && v.starts_with("ex2-linear")));
    assert!(table.rows[0].l1_rate.is_none());
    assert!(table.rows[2].l1_rate.is_some());
}

#[test]
fn run_to_stdout_has_header_and_dashes() {
    let o = fvbv(&["run", "--case", "ex1-linear", "--rows", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data[0].starts_with("row,cells,steps,h,"));
    assert_eq!(data.len(), 3);
    assert!(data[1].contains(",-,"));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("o.csv");
    fs::write(
        &cfg,
        format!("# override\ncase = ex2-linear\nrows = 3.0:0.05, 1.5\nT = 0.5\nout = {}\n", out.display()),
    )
    .unwrap();
    let o = fvbv(&["run", "--case", "ex1-linear", "--rows", "4", "--T", "1", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.rows[0].delta, 0.05);
    assert_eq!(table.rows[1].h, 1.5);
    assert!(table.metadata.iter().any(|(k, v)| k == "final_time" && v == "5e-1"));
}

#[test]
fn snapshot_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("s.dat");
    let o = fvbv(&["run", "--case", "ex1-linear", "--rows", "2", "--snapshot", snap.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&snap).unwrap();
    let points = text.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).count();
    assert_eq!(points, 64);
    assert!(text.lines().any(str::is_empty));
}

#[test]
fn dump_mesh_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.txt");
    let o = fvbv(&[
        "dump-mesh", "--mesh", "perturbed", "--h", "0.25", "--seed", "7", "--domain", "-1,1,-1,1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = fs::File::open(&out).unwrap();
    let mesh: PolygonalMesh<f64> = read_mesh_dump(std::io::BufReader::new(f)).unwrap();
    assert_eq!(mesh.cell_count(), 64);
    assert!((mesh.total_area() - 4.0).abs() < 1e-12);
}

#[test]
fn errors_exit_nonzero() {
    for args in [
        vec!["run"],
        vec!["run", "--case", "nope"],
        vec!["run", "--case", "ex3-nonlinear", "--mesh", "triangular"],
        vec!["run", "--case", "ex1-linear", "--rows", "0.5:10"],
        vec!["dump-mesh", "--h", "5"],
    ] {
        let o = fvbv(&args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

//! End-to-end checks through the public API and the filesystem.

use std::fs;
use std::io::BufReader;

use fvbv::harness::{parse_csv, run_experiment, write_csv_file, ExperimentConfig, RowSpec};
use fvbv::mesh::{build_family, read_mesh_dump, write_mesh_dump, MeshFamily, Rect};
use fvbv::physics::CaseName;

#[test]
fn csv_file_round_trip_is_bit_exact() {
    let mut cfg = ExperimentConfig::preset(CaseName::Ex2Linear).with_family(MeshFamily::Hexagonal);
    cfg.rows.truncate(3);
    let res = run_experiment::<f64>(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    write_csv_file(&res, &path).unwrap();
    let parsed = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), res.rows.len());
    for (a, b) in res.rows.iter().zip(&parsed.rows) {
        assert_eq!(a.h.to_bits(), b.h.to_bits());
        assert_eq!(a.h_mesh.to_bits(), b.h_mesh.to_bits());
        assert_eq!(a.delta_used.to_bits(), b.delta_used.to_bits());
        assert_eq!(a.bv.to_bits(), b.bv.to_bits());
        assert_eq!(a.errors.map(|e| e.l1.to_bits()), b.errors.map(|e| e.l1.to_bits()));
        assert_eq!(a.bv_rate.map(f64::to_bits), b.bv_rate.map(f64::to_bits));
        assert_eq!((a.cells, a.steps), (b.cells, b.steps));
    }
}

#[test]
fn mesh_dump_file_round_trip_for_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let domain = Rect::new(-1.0, 2.0, 0.0, 1.5);
    for fam in MeshFamily::ALL {
        let mesh = build_family::<f64>(fam, domain, 0.3, 11).unwrap();
        let path = dir.path().join(format!("{fam}.txt"));
        write_mesh_dump(&mesh, fs::File::create(&path).unwrap()).unwrap();
        let back = read_mesh_dump::<f64, _>(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
        assert_eq!(back, mesh, "{fam}");
    }
}

#[test]
fn f32_and_f64_runs_agree_loosely() {
    let mut cfg = ExperimentConfig::preset(CaseName::Ex1Linear);
    cfg.rows = vec![RowSpec { h: 0.25, delta: 0.125 }];
    let a = run_experiment::<f64>(&cfg).unwrap();
    let b = run_experiment::<f32>(&cfg).unwrap();
    let (ea, eb) = (a.rows[0].errors.unwrap(), b.rows[0].errors.unwrap());
    assert!((ea.l1 - eb.l1 as f64).abs() < 1e-4 * ea.l1.max(1.0));
    assert!((a.rows[0].bv - b.rows[0].bv as f64).abs() < 1e-4 * a.rows[0].bv);
}

#[test]
fn perturbed_meshes_depend_only_on_seed() {
    let mut cfg = ExperimentConfig::preset(CaseName::Ex2Linear).with_family(MeshFamily::PerturbedCartesian);
    cfg.rows.truncate(2);
    cfg.seed = 5;
    let a = run_experiment::<f64>(&cfg).unwrap();
    let b = run_experiment::<f64>(&cfg).unwrap();
    cfg.seed = 6;
    let c = run_experiment::<f64>(&cfg).unwrap();
    assert_eq!(a.rows[1].bv.to_bits(), b.rows[1].bv.to_bits());
    assert_ne!(a.rows[1].bv.to_bits(), c.rows[1].bv.to_bits());
}

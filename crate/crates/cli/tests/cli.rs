//! End-to-end runs of the `chiraltop` binary: output strings, written files
//! and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chiraltop::basespace::BaseGrid;
use chiraltop::invariants::{MeshMap, Support};
use chiraltop::io;
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::numkernel::{c, CMatrix};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiraltop")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_prints_groups_with_their_invariants() {
    for (space, dim, rank, expect) in [
        ("sphere", "4", "2", "Z ⊕ Z/2 [c2, z2]"),
        ("torus", "2", "2", "Z² ⊕ Z [w1×2, c1]"),
        ("sphere", "1", "1", "Z [w1]"),
    ] {
        let o = run(&["classify", "--space", space, "--dim", dim, "--rank", rank]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o), expect);
    }
    let o = run(&["classify", "--space", "torus", "--dim", "3", "--rank", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free_rank"], 7);
}

#[test]
fn lookups_outside_the_known_range_exit_3() {
    assert_eq!(code(&run(&["classify", "--space", "sphere", "--dim", "5", "--rank", "2"])), 3);
    assert_eq!(code(&run(&["homotopy", "--rank", "2", "--degree", "30"])), 3);
    let o = run(&["homotopy", "--rank", "inf", "--degree", "30"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "0"));
    assert_eq!(stdout(&run(&["homotopy", "--rank", "3", "--degree", "6"])), "Z/6 [π6(U(3))]");
}

#[test]
fn bad_models_exit_4() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.cbd");
    assert_eq!(code(&run(&["model", "--name", "nope", "--grid", "8", "--emit", s(&out)])), 4);
    assert_eq!(code(&run(&["model", "--name", "qwz", "--params", "Q=1", "--grid", "8x8", "--emit", s(&out)])), 4);
    assert!(!out.exists());
}

#[test]
fn ssh_pipeline_reports_unit_winding() {
    let dir = TempDir::new().unwrap();
    let (sys, bundle, report) = (path(&dir, "ssh.cqs"), path(&dir, "ssh.cbd"), path(&dir, "r.json"));
    assert_eq!(code(&run(&["model", "--name", "ssh", "--grid", "64", "--emit", s(&sys)])), 0);
    for projector in ["eig", "riesz"] {
        let o = run(&["split", "--input", s(&sys), "--output", s(&bundle), "--projector", projector]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = run(&["invariants", "--input", s(&bundle), "--report", s(&report)]);
        assert_eq!(code(&o), 0);
        let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(r["w1"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap().abs()).collect::<Vec<_>>(), [1]);
    }
}

#[test]
fn non_chiral_system_fails_validation_with_5() {
    let dir = TempDir::new().unwrap();
    let (sys, out) = (path(&dir, "bad.cqs"), path(&dir, "bad.cbd"));
    let grid = BaseGrid::torus(&[16]).unwrap();
    let mut q = build(&ModelSpec::new("ssh"), &grid).unwrap().into_system().unwrap();
    for h in &mut q.hamiltonian {
        h[(0, 0)] += c(0.3, 0.0);
    }
    io::write_system(&sys, &q).unwrap();
    let o = run(&["split", "--input", s(&sys), "--output", s(&out)]);
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn coarse_mesh_leaves_w2_unresolved_with_6() {
    let dir = TempDir::new().unwrap();
    let (b, r) = (path(&dir, "su2.cbd"), path(&dir, "r.json"));
    let emit = run(&["model", "--name", "su2_degree_n", "--params", "n=2", "--grid", "6x6x6", "--emit", s(&b)]);
    assert_eq!(code(&emit), 0);
    let o = run(&["invariants", "--input", s(&b), "--report", s(&r)]);
    assert_eq!(code(&o), 6);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert!(v["unresolved"]["w2[S3]"].is_string(), "{}", v["unresolved"]);
}

fn embed(f: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(3, 3);
    out.view_mut((0, 0), (2, 2)).copy_from(f);
    out
}

#[test]
fn z2_needs_a_matching_extension() {
    let dir = TempDir::new().unwrap();
    let grid = BaseGrid::ball5(&[4; 5]).unwrap();
    let (map, hopf, ext) = (path(&dir, "const.cmf"), path(&dir, "hopf.cmf"), path(&dir, "ext.cmf"));
    let g0 = CMatrix::identity(2, 2);
    io::write_mesh_map(&map, &MeshMap::from_fn(grid.clone(), Support::Boundary, |_| g0.clone()).unwrap()).unwrap();
    io::write_mesh_map(&ext, &MeshMap::from_fn(grid.clone(), Support::Full, |_| embed(&g0)).unwrap()).unwrap();
    let f = build(&ModelSpec::new("suspended_hopf"), &grid).unwrap().into_map().unwrap();
    io::write_mesh_map(&hopf, &f).unwrap();

    assert_eq!(code(&run(&["z2", "--map", s(&map)])), 2);
    let o = run(&["z2", "--map", s(&hopf), "--extension", s(&ext)]);
    assert_eq!(code(&o), 7, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["z2", "--map", s(&map), "--extension", s(&ext), "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["epsilon"], 1);
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(code(&run(&["classify", "--space", "torus"])), 2);
    assert_eq!(code(&run(&["model", "--name", "ssh", "--grid", "8y", "--emit", "/dev/null"])), 2);
}

#[test]
fn emitted_line_bundle_keeps_its_winding() {
    let dir = TempDir::new().unwrap();
    let b = path(&dir, "l.cbd");
    assert_eq!(code(&run(&["model", "--name", "phi_n", "--params", "n=-2", "--grid", "64", "--emit", s(&b)])), 0);
    let o = run(&["invariants", "--input", s(&b)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["w1"], serde_json::json!([-2]));
}

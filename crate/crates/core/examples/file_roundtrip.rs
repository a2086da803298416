//! Write a sampled model to disk, read it back and compare the reports.

use chiraltop::basespace::BaseGrid;
use chiraltop::invariants::{compute_report, ReportOptions};
use chiraltop::io;
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::policy::NumericPolicy;

fn main() {
    let policy = NumericPolicy::default();
    let dir = std::env::temp_dir();
    let grid = BaseGrid::torus(&[20, 20]).unwrap();
    let b = build(&ModelSpec::new("qwz").param("M", -1.0), &grid).unwrap().into_bundle().unwrap();

    let path = dir.join("chiraltop-example-qwz.cbd");
    io::write_bundle(&path, &b).unwrap();
    let back = io::read_bundle(&path).unwrap();
    println!("{} bytes, identical after reading: {}", std::fs::metadata(&path).unwrap().len(), back == b);

    let report = compute_report(&back, &ReportOptions::default(), &policy).unwrap();
    let out = dir.join("chiraltop-example-qwz.json");
    io::write_report(&out, &report).unwrap();
    println!("c1 = {:?}; report written to {}", report.values("c1"), out.display());
    std::fs::remove_file(path).ok();
}

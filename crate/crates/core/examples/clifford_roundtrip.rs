//! Chiral bundle → graded Clifford module → chiral bundle. The invariant
//! report survives the round trip.

use chiraltop::basespace::BaseGrid;
use chiraltop::chiralbundle::{clifford_double, clifford_reconstruct, HRef};
use chiraltop::invariants::{compute_report, ReportOptions};
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::policy::NumericPolicy;

fn main() {
    let policy = NumericPolicy::default();
    let grid = BaseGrid::torus(&[16, 16]).unwrap();
    let spec = ModelSpec::new("phi_n").param("n1", 2.0).param("n2", -1.0);
    let b = build(&spec, &grid).unwrap().into_bundle().unwrap();

    let doubled = clifford_double(&b);
    let (sq, anti) = doubled.algebra_residuals();
    println!("ρ² − 1: {sq:.1e}, Γρ + ρΓ: {anti:.1e}");
    let back = clifford_reconstruct(&doubled, &HRef::IdentityInFrames, &policy).unwrap();

    for (label, bundle) in [("original", &b), ("reconstructed", &back)] {
        let r = compute_report(bundle, &ReportOptions::default(), &policy).unwrap();
        println!("{label}: w1 {:?}, c1 {:?}", r.values("w1"), r.values("c1"));
    }
}

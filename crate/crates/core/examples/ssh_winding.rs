//! Spectral pipeline on the SSH chain: Hamiltonian field, Fermi projection,
//! chiral split, then `w1` across the transition at `|t2| = |t1|`.

use chiraltop::basespace::{enumerate_cycles, BaseGrid};
use chiraltop::chiralbundle::HRef;
use chiraltop::invariants::w1;
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::policy::NumericPolicy;
use chiraltop::spectral::system_to_bundle;

fn main() {
    let policy = NumericPolicy::default();
    let grid = BaseGrid::torus(&[128]).unwrap();
    let cycle = &enumerate_cycles(&grid, 1).unwrap()[0];
    for t2 in [0.2, 0.45, 0.55, 1.0, -1.0] {
        let spec = ModelSpec::new("ssh").param("t1", 0.5).param("t2", t2);
        let sys = build(&spec, &grid).unwrap().into_system().unwrap();
        let b = system_to_bundle(&sys, &HRef::IdentityInFrames, &policy).unwrap();
        let m = w1(&b, cycle, &policy).unwrap();
        println!("t2 = {t2:+.2}: w1 = {:+} (raw {:+.6})", m.value, m.raw);
    }
}

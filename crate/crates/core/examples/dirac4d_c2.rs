//! Second Chern number of the 4-d lattice Dirac model across its mass
//! phases.

use chiraltop::basespace::{enumerate_cycles, BaseGrid};
use chiraltop::invariants::chern2;
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::policy::NumericPolicy;

fn main() {
    let policy = NumericPolicy::default();
    let grid = BaseGrid::torus(&[12; 4]).unwrap();
    let cycle = &enumerate_cycles(&grid, 4).unwrap()[0];
    for mass in [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0] {
        let b = build(&ModelSpec::new("dirac4d").param("M", mass), &grid).unwrap().into_bundle().unwrap();
        match chern2(&b, cycle, &policy) {
            Ok(m) => println!("M = {mass:+}: c2 = {:+} (raw {:+.4})", m.value, m.raw),
            Err(e) => println!("M = {mass:+}: {e}"),
        }
    }
}

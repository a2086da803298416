//! First Chern number of the monopole bundle on S², and its invariance
//! under a change of frame.

use chiraltop::basespace::{enumerate_cycles, BaseGrid};
use chiraltop::chiralbundle::{apply_gauge, GaugeField};
use chiraltop::invariants::chern1;
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::numkernel::{c, CMatrix};
use chiraltop::policy::NumericPolicy;

fn main() {
    let policy = NumericPolicy::default();
    let grid = BaseGrid::sphere(&[24, 24]).unwrap();
    let b = build(&ModelSpec::new("dirac_monopole"), &grid).unwrap().into_bundle().unwrap();
    let cycle = &enumerate_cycles(&grid, 2).unwrap()[0];
    let m = chern1(&b, cycle, &policy).unwrap();
    println!("c1 = {} (raw {:.12})", m.value, m.raw);

    // a U(1) phase that is constant on the collapsed boundary
    let values = (0..grid.len())
        .map(|x| {
            let t = grid.coordinates(grid.canonical(x));
            let a = 3.0 * (t[0] * 7.0).sin() + t[1];
            CMatrix::from_element(1, 1, c(a.cos(), a.sin()))
        })
        .collect();
    let gauged = apply_gauge(&b, &GaugeField { grid: grid.clone(), values }).unwrap();
    println!("after a gauge change: c1 = {}", chern1(&gauged, cycle, &policy).unwrap().value);
}

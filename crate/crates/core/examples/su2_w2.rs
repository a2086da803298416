//! `w2` of the degree-n maps S³ → SU(2) and its convergence under mesh
//! refinement.

use chiraltop::basespace::{enumerate_cycles, BaseGrid};
use chiraltop::invariants::{w2, Framing};
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::policy::NumericPolicy;

fn main() {
    let policy = NumericPolicy::default();
    for n in [-1, 1, 2] {
        for size in [12, 16, 24] {
            let grid = BaseGrid::sphere(&[size; 3]).unwrap();
            let b = build(&ModelSpec::new("su2_degree_n").param("n", n as f64), &grid)
                .unwrap()
                .into_bundle()
                .unwrap();
            let cycle = &enumerate_cycles(&grid, 3).unwrap()[0];
            match w2(&b, cycle, &Framing::Auto, &policy) {
                Ok(m) => println!("n = {n:+}, {size}³: w2 = {:+}, residual {:.2e}", m.value, m.residual),
                Err(e) => println!("n = {n:+}, {size}³: {e}"),
            }
        }
    }
}

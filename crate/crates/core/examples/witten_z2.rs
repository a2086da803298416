//! Degree-5 winding of maps D⁵ → SU(3) and the Witten sign of a boundary
//! map S⁴ → SU(2) from a chosen extension.

use chiraltop::basespace::BaseGrid;
use chiraltop::invariants::{winding5, z2_witten, MeshMap, Support};
use chiraltop::modelzoo::su2_from_quaternion;
use chiraltop::numkernel::{c, exp_antihermitian, CMatrix, I};
use chiraltop::policy::NumericPolicy;

fn embed(g: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(3, 3);
    out.view_mut((0, 0), (2, 2)).copy_from(g);
    out
}

fn main() {
    let policy = NumericPolicy::default();
    let grid = BaseGrid::ball5(&[6; 5]).unwrap();

    // boundary values that contract inside SU(2)
    let boundary = |x: usize| {
        let y: Vec<f64> = grid.coordinates(x).iter().map(|t| 2.0 * t - 1.0).collect();
        let q = [1.0, 0.4 * y[0] * y[1], 0.3 * y[2], -0.2 * y[3] * y[4]];
        let r = q.iter().map(|a| a * a).sum::<f64>().sqrt();
        su2_from_quaternion([q[0] / r, q[1] / r, q[2] / r, q[3] / r])
    };
    let f = MeshMap::from_fn(grid.clone(), Support::Boundary, boundary).unwrap();

    // a traceless generator pushed into the interior by a bump
    let mut k = CMatrix::zeros(3, 3);
    k[(0, 2)] = c(0.0, 1.0);
    k[(2, 0)] = c(0.0, -1.0);
    k[(1, 1)] = c(0.5, 0.0);
    k[(2, 2)] = c(-0.5, 0.0);
    for amp in [0.0, 0.5, 1.0] {
        let ext = MeshMap::from_fn(grid.clone(), Support::Full, |x| {
            let bump: f64 = grid.coordinates(x).iter().map(|t| (std::f64::consts::PI * t).sin()).product();
            embed(&boundary(x)) * exp_antihermitian(&(k.scale(amp * bump) * I), &policy).unwrap()
        })
        .unwrap();
        let w = winding5(&ext, &policy).unwrap();
        let z = z2_witten(&f, &ext, &policy).unwrap();
        println!("amplitude {amp}: winding5 {w:+.5}, ε = {:+} (cs5 {:+.5})", z.epsilon, z.cs5);
    }
}

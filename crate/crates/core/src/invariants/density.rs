//! Vertex quadrature for the integrals of degree ≥ 3.
//!
//! Densities are sampled at the points of a cycle and summed with trapezoid
//! weights. Derivatives use the five-point stencil where it fits, the central
//! three-point stencil next to a cube face, and second-order one-sided
//! stencils on the faces of the ball. On tori everything is periodic, so the
//! sums converge at the order of the stencil.

use rayon::prelude::*;

use crate::basespace::{BaseGrid, CycleHandle, SpaceKind};
use crate::error::Result;
use crate::numkernel::pairwise_sum;

/// Point reached by `s` steps along `axis`, if it exists.
pub(crate) fn shift(grid: &BaseGrid, x: usize, axis: usize, s: i64) -> Option<usize> {
    let mut y = x;
    for _ in 0..s.unsigned_abs() {
        y = if s > 0 { grid.step(y, axis)? } else { grid.step_back(y, axis)? };
    }
    Some(y)
}

/// `(step, weight)` pairs with `f′(x) ≈ Σ w f(x + s·e)` in grid units.
pub(crate) fn derivative_stencil(grid: &BaseGrid, x: usize, axis: usize) -> Vec<(i64, f64)> {
    let has = |s: i64| shift(grid, x, axis, s).is_some();
    if has(2) && has(-2) {
        vec![(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)]
    } else if has(1) && has(-1) {
        vec![(-1, -0.5), (1, 0.5)]
    } else if has(1) {
        vec![(0, -1.5), (1, 2.0), (2, -0.5)]
    } else {
        vec![(-2, 0.5), (-1, -2.0), (0, 1.5)]
    }
}

/// Sample points of a cycle with their quadrature weights.
///
/// Sphere boundary points form a single point of the sphere and carry no
/// weight; ball faces carry the trapezoid half weights.
pub(crate) fn sample_points(grid: &BaseGrid, cycle: &CycleHandle) -> Vec<(usize, f64)> {
    match grid.kind() {
        SpaceKind::Sphere => (0..grid.len()).filter(|&x| !grid.is_boundary(x)).map(|x| (x, 1.0)).collect(),
        SpaceKind::Ball5 => (0..grid.len())
            .map(|x| {
                let w = (0..grid.dim())
                    .map(|a| {
                        let i = grid.axis_index(x, a);
                        if i == 0 || i + 1 == grid.shape()[a] {
                            0.5
                        } else {
                            1.0
                        }
                    })
                    .product();
                (x, w)
            })
            .collect(),
        SpaceKind::Torus => {
            let mut points = vec![grid.index(&cycle.base_offset)];
            for &axis in &cycle.axes {
                let n = grid.shape()[axis];
                let mut next = Vec::with_capacity(points.len() * n);
                for &p in &points {
                    let mut y = p;
                    for _ in 0..n {
                        next.push(y);
                        y = grid.step(y, axis).expect("torus step");
                    }
                }
                points = next;
            }
            points.sort_unstable();
            points.into_iter().map(|x| (x, 1.0)).collect()
        }
    }
}

/// `Σ w(x) f(x)` in parallel with a fixed reduction order. The first failing
/// point (in point order) determines the error.
pub(crate) fn sum_over_points<F>(points: &[(usize, f64)], f: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let values: Vec<Result<f64>> = points.par_iter().map(|&(x, w)| Ok(w * f(x)?)).collect();
    Ok(pairwise_sum(&values.into_iter().collect::<Result<Vec<f64>>>()?))
}

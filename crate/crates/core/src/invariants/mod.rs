//! Lattice characteristic classes.
//!
//! Even classes (`c1`, `c2`) depend only on the frame field, odd classes
//! (`w1`, `w2`, and the degree-5 winding) are windings of the automorphism
//! `φ`. The degree-1 and degree-2 classes are exact link and plaquette phase
//! sums; the higher ones are vertex quadratures of their densities.
//!
//! Sign conventions: cells are oriented by increasing axis order; on spheres
//! the parameter cube carries the orientation. With these conventions the
//! lower band of `x·σ` on `S²` has `c1 = −1`.

mod density;
mod framing;
mod report;
mod winding;

pub use framing::{frame_cycle, Framing};
pub use report::{compute_report, Entry, InvariantReport, ReportOptions, Z2Entry};
pub use winding::{
    odd_winding, odd_winding_normalization, w2, winding5, z2_witten, MeshMap, Support, Z2Result,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basespace::{self, Cell, CycleHandle};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, Result};
use crate::numkernel::{self, arg, det_phase, identity, pairwise_sum, CMatrix};
use crate::policy::NumericPolicy;

/// An integer invariant together with the raw lattice sum it was rounded from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: i64,
    pub raw: f64,
    pub residual: f64,
}

impl Measurement {
    /// Round `raw`, refusing when it is further than `tol` from an integer.
    pub fn resolve(raw: f64, tol: f64) -> Result<Self> {
        if !raw.is_finite() {
            return Err(Error::NonFinite);
        }
        let value = raw.round();
        let residual = (raw - value).abs();
        if residual > tol {
            return Err(Error::Unresolved { raw, residual, tol });
        }
        Ok(Self { value: value as i64, raw, residual })
    }
}

/// Evaluate `f` on every top cell of `cycle` in parallel and sum in a fixed
/// order. The first failing cell (in cell order) determines the error.
pub(crate) fn sum_over_cells<F>(grid: &basespace::BaseGrid, cycle: &CycleHandle, f: F) -> Result<f64>
where
    F: Fn(&Cell) -> Result<f64> + Sync,
{
    let cells: Vec<Cell> = basespace::cells(grid, cycle).collect();
    let values: Vec<Result<f64>> = cells.par_iter().map(&f).collect();
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&values))
}

fn check_degree(b: &ChiralBundleData, cycle: &CycleHandle, degree: usize) -> Result<()> {
    if cycle.degree != degree || cycle.axes.len() != degree {
        return Err(Error::DegreeOutOfRange { degree: cycle.degree, dim: b.grid.dim() });
    }
    if cycle.axes.iter().any(|&a| a >= b.grid.dim()) {
        return Err(Error::DimensionMismatch(format!("cycle axes {:?}", cycle.axes)));
    }
    Ok(())
}

/// Overlap `V(x)†V(y)`, gated on admissibility. Links collapsed to a point
/// are the identity.
pub(crate) fn admissible_overlap(
    b: &ChiralBundleData,
    x: usize,
    y: usize,
    policy: &NumericPolicy,
) -> Result<CMatrix> {
    let (cx, cy) = (b.grid.canonical(x), b.grid.canonical(y));
    if cx == cy {
        return Ok(identity(b.rank));
    }
    let o = b.overlap(cx, cy);
    let s = numkernel::sigma_min(&o);
    if s < policy.overlap_min {
        return Err(Error::Admissibility { from: cx, to: cy, overlap: s });
    }
    Ok(o)
}

/// First Chern number over a 2-cycle by branch-resolved plaquette phases of
/// determinant links.
pub fn chern1(b: &ChiralBundleData, cycle: &CycleHandle, policy: &NumericPolicy) -> Result<Measurement> {
    check_degree(b, cycle, 2)?;
    let u = |x: usize, y: usize| -> Result<Complex64> { det_phase(&admissible_overlap(b, x, y, policy)?, policy) };
    let limit = PI - policy.branch_margin;
    let total = sum_over_cells(&b.grid, cycle, |c| {
        let w = u(c.corner(0), c.corner(1))?
            * u(c.corner(1), c.corner(3))?
            * u(c.corner(2), c.corner(3))?.conj()
            * u(c.corner(0), c.corner(2))?.conj();
        let flux = arg(w);
        if flux.abs() > limit {
            return Err(Error::BranchMarginal { flux });
        }
        Ok(flux)
    })?;
    Measurement::resolve(total / (2.0 * PI), policy.round_tol_c1)
}

/// First chiral class over a 1-cycle: the winding of `det φ`.
pub fn w1(b: &ChiralBundleData, cycle: &CycleHandle, policy: &NumericPolicy) -> Result<Measurement> {
    check_degree(b, cycle, 1)?;
    let s = |x: usize| det_phase(b.phi_at(x), policy);
    let limit = PI - policy.branch_margin;
    let total = sum_over_cells(&b.grid, cycle, |c| {
        let step = arg(s(c.corner(1))? * s(c.corner(0))?.conj());
        if step.abs() > limit {
            return Err(Error::StepMarginal { step });
        }
        Ok(step)
    })?;
    Measurement::resolve(total / (2.0 * PI), policy.round_tol_w1)
}

/// Second Chern number over a 4-cycle.
///
/// The curvature at a sample point is `F_{ab} = V†[∂_a P, ∂_b P]V` with
/// `P = VV†`, so the density is gauge invariant and no branch of a logarithm
/// is involved. It is contracted as
/// `c2 = (1/32π²) Σ ε^{abcd} (tr F_{ab}F_{cd} − tr F_{ab}·tr F_{cd})`;
/// for anti-hermitian `F` the bracket is `Re tr(F F) + Im tr F·Im tr F`, which
/// vanishes identically for line bundles. Every link of the cycle must pass
/// the admissibility gate.
pub fn chern2(b: &ChiralBundleData, cycle: &CycleHandle, policy: &NumericPolicy) -> Result<Measurement> {
    check_degree(b, cycle, 4)?;
    let grid = &b.grid;
    let points = density::sample_points(grid, cycle);
    for &(x, _) in &points {
        for &axis in &cycle.axes {
            if let Some(y) = grid.step(x, axis) {
                admissible_overlap(b, x, y, policy)?;
            }
        }
    }
    let projectors: Vec<Option<CMatrix>> = {
        let mut p = vec![None; grid.len()];
        for &(x, _) in &points {
            for &axis in &cycle.axes {
                for (s, _) in density::derivative_stencil(grid, x, axis) {
                    let y = grid.canonical(density::shift(grid, x, axis, s).expect("stencil inside grid"));
                    if p[y].is_none() {
                        p[y] = Some(b.projector(y));
                    }
                }
            }
        }
        p
    };
    let total = density::sum_over_points(&points, |x| {
        let dp: Vec<CMatrix> = cycle
            .axes
            .iter()
            .map(|&axis| {
                density::derivative_stencil(grid, x, axis).into_iter().fold(
                    CMatrix::zeros(b.ambient_dim, b.ambient_dim),
                    |acc, (s, w)| {
                        let y = grid.canonical(density::shift(grid, x, axis, s).expect("stencil inside grid"));
                        acc + projectors[y].as_ref().expect("projector cached").scale(w)
                    },
                )
            })
            .collect();
        let v = b.frame_at(x);
        let f = |j: usize, k: usize| v.adjoint() * (&dp[j] * &dp[k] - &dp[k] * &dp[j]) * v;
        let pair = |a: &CMatrix, c: &CMatrix| a.trace().im * c.trace().im + (a * c).trace().re;
        let s = pair(&f(0, 1), &f(2, 3)) - pair(&f(0, 2), &f(1, 3)) + pair(&f(0, 3), &f(1, 2));
        Ok(s / (4.0 * PI * PI))
    })?;
    Measurement::resolve(total, policy.round_tol_high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basespace::{enumerate_cycles, BaseGrid};
    use crate::numkernel::c;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    #[test]
    fn resolve_rounds_or_refuses() {
        let m = Measurement::resolve(2.03, 0.05).unwrap();
        assert_eq!(m.value, 2);
        assert!((m.residual - 0.03).abs() < 1e-12);
        assert!(matches!(Measurement::resolve(2.3, 0.2), Err(Error::Unresolved { .. })));
        assert_eq!(Measurement::resolve(-0.9999999, 1e-6).unwrap().value, -1);
    }

    #[test]
    fn trivial_bundle_has_zero_invariants() {
        let g = BaseGrid::torus(&[4, 5, 4, 4]).unwrap();
        let b = ChiralBundleData::trivial(g.clone(), 4, 2).unwrap();
        for cyc in enumerate_cycles(&g, 1).unwrap() {
            assert_eq!(w1(&b, &cyc, &pol()).unwrap().value, 0);
        }
        for cyc in enumerate_cycles(&g, 2).unwrap() {
            assert_eq!(chern1(&b, &cyc, &pol()).unwrap().raw, 0.0);
        }
        let cyc = &enumerate_cycles(&g, 4).unwrap()[0];
        assert_eq!(chern2(&b, cyc, &pol()).unwrap().raw, 0.0);
    }

    #[test]
    fn phase_winding_on_a_circle() {
        let g = BaseGrid::sphere(&[64]).unwrap();
        for n in [-3i32, 0, 2] {
            let phi = (0..g.len())
                .map(|x| {
                    let t = 2.0 * PI * g.coordinates(x)[0] * n as f64;
                    CMatrix::from_element(1, 1, c(t.cos(), t.sin()))
                })
                .collect();
            let b = ChiralBundleData::new(g.clone(), vec![identity(1); g.len()], phi).unwrap();
            let cyc = &enumerate_cycles(&g, 1).unwrap()[0];
            assert_eq!(w1(&b, cyc, &pol()).unwrap().value, n as i64);
        }
    }

    #[test]
    fn coarse_winding_is_step_marginal() {
        let g = BaseGrid::torus(&[4]).unwrap();
        let phi = (0..4)
            .map(|x| {
                let t = 2.0 * PI * x as f64 * 2.0 / 4.0;
                CMatrix::from_element(1, 1, c(t.cos(), t.sin()))
            })
            .collect();
        let b = ChiralBundleData::new(g.clone(), vec![identity(1); 4], phi).unwrap();
        let cyc = &enumerate_cycles(&g, 1).unwrap()[0];
        assert!(matches!(w1(&b, cyc, &pol()), Err(Error::StepMarginal { .. })));
    }

    #[test]
    fn wrong_degree_is_rejected() {
        let g = BaseGrid::torus(&[4, 4]).unwrap();
        let b = ChiralBundleData::trivial(g.clone(), 2, 1).unwrap();
        let cyc = &enumerate_cycles(&g, 1).unwrap()[0];
        assert!(chern1(&b, cyc, &pol()).is_err());
    }
}

//! Global trivializations of a bundle over a cycle.
//!
//! Odd classes of degree ≥ 3 need `φ` written in one continuous frame over
//! the whole cycle. A framing is a per-point `h(x) ∈ U(m)` such that
//! `G(x) = V(x)h(x)` varies continuously; the framed automorphism is
//! `φ̃ = h†φh`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::basespace::{self, BaseGrid, CycleHandle, SpaceKind};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, Result};
use crate::numkernel::{exp_antihermitian, identity, max_abs, polar_unitary, unitary_log, CMatrix};
use crate::policy::NumericPolicy;

use super::chern1;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Framing {
    /// Parallel transport along a spanning tree, holonomy absorption on tori,
    /// then smoothing. Requires vanishing `c1` on every 2-face of the cycle.
    ///
    /// When a line holonomy has an eigenphase at `±π` its logarithm is
    /// ambiguous; `w2` then winds the ambient unitary `VφV† + (1 − VV†)`
    /// instead. With `c1 = 0` both `E` and its complement are trivial over a
    /// 3-cycle, so the two windings agree.
    #[default]
    Auto,
    /// The frame field itself must be constant over the cycle.
    ConstantFrameRequired,
    /// Per-point `h(x)`, indexed like the grid.
    Supplied(Vec<CMatrix>),
}

impl Framing {
    pub fn label(&self) -> &'static str {
        match self {
            Framing::Auto => "auto",
            Framing::ConstantFrameRequired => "constant_frame_required",
            Framing::Supplied(_) => "supplied",
        }
    }
}

/// Points of the cycle, i.e. the vertices of its cells.
fn cycle_points(grid: &BaseGrid, cycle: &CycleHandle) -> Vec<usize> {
    let mut pts: Vec<usize> = basespace::cells(grid, cycle).flat_map(|c| c.vertices).collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Framing `h` over the points of `cycle`, keyed by grid index.
pub fn frame_cycle(
    b: &ChiralBundleData,
    cycle: &CycleHandle,
    framing: &Framing,
    policy: &NumericPolicy,
) -> Result<BTreeMap<usize, CMatrix>> {
    let grid = &b.grid;
    let points = cycle_points(grid, cycle);
    match framing {
        Framing::ConstantFrameRequired => {
            let v0 = b.frame_at(points[0]);
            for &x in &points {
                let residual = max_abs(&(b.frame_at(x) - v0));
                if residual > policy.tol_frame_match {
                    return Err(Error::NotFramable(format!(
                        "frame not constant (deviation {residual:.3e} at point {x})"
                    )));
                }
            }
            Ok(points.into_iter().map(|x| (x, identity(b.rank))).collect())
        }
        Framing::Supplied(h) => {
            if h.len() != grid.len() {
                return Err(Error::DimensionMismatch(format!(
                    "supplied framing has {} entries for {} points",
                    h.len(),
                    grid.len()
                )));
            }
            points
                .into_iter()
                .map(|x| {
                    let hx = &h[grid.canonical(x)];
                    if hx.shape() != (b.rank, b.rank) {
                        return Err(Error::DimensionMismatch("supplied framing shape".into()));
                    }
                    Ok((x, hx.clone()))
                })
                .collect()
        }
        Framing::Auto => match grid.kind() {
            SpaceKind::Torus => torus_auto(b, cycle, &points, policy),
            _ => sphere_auto(b, &points, policy),
        },
    }
}

/// `polar(V(x)†V(y)h(y))`: `h` transported from `y` to `x`.
fn transport(b: &ChiralBundleData, x: usize, y: usize, hy: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
    let o = b.overlap(x, y) * hy;
    polar_unitary(&o, policy).map_err(|_| {
        Error::NotFramable(format!("degenerate overlap between points {y} and {x}"))
    })
}

/// Radial sweep inward from the collapsed boundary, where `h = 1`.
fn sphere_auto(
    b: &ChiralBundleData,
    points: &[usize],
    policy: &NumericPolicy,
) -> Result<BTreeMap<usize, CMatrix>> {
    let grid = &b.grid;
    let depth = |x: usize| -> usize {
        (0..grid.dim())
            .map(|a| {
                let i = grid.axis_index(x, a);
                i.min(grid.shape()[a] - 1 - i)
            })
            .min()
            .unwrap_or(0)
    };
    let mut order: Vec<usize> = points.to_vec();
    order.sort_by_key(|&x| (depth(x), x));
    let mut h: BTreeMap<usize, CMatrix> = BTreeMap::new();
    for &x in &order {
        let dx = depth(x);
        let hx = if dx == 0 {
            identity(b.rank)
        } else {
            let parent = (0..grid.dim())
                .flat_map(|a| [grid.step_back(x, a), grid.step(x, a)])
                .flatten()
                .find(|&y| depth(y) + 1 == dx)
                .expect("interior point has an outer neighbor");
            transport(b, x, parent, &h[&parent], policy)?
        };
        h.insert(x, hx);
    }
    smooth(b, &mut h, policy);
    Ok(h)
}

/// Axis-ordered tree: lines along the first cycle axis, then the second, and
/// so on, each line's closing holonomy spread uniformly along it.
fn torus_auto(
    b: &ChiralBundleData,
    cycle: &CycleHandle,
    points: &[usize],
    policy: &NumericPolicy,
) -> Result<BTreeMap<usize, CMatrix>> {
    let grid = &b.grid;
    for pair in basespace::axis_subsets(cycle.axes.len(), 2) {
        let face = CycleHandle {
            degree: 2,
            axes: vec![cycle.axes[pair[0]], cycle.axes[pair[1]]],
            base_offset: cycle.base_offset.clone(),
            whole_space: false,
        };
        let c1 = chern1(b, &face, policy)?;
        if c1.value != 0 {
            return Err(Error::NotFramable(format!(
                "c1 = {} on the 2-cycle {}",
                c1.value,
                face.label()
            )));
        }
    }
    let origin = grid.index(&cycle.base_offset);
    let mut h: BTreeMap<usize, CMatrix> = BTreeMap::new();
    h.insert(origin, identity(b.rank));
    let mut starts = vec![origin];
    for &axis in &cycle.axes {
        let n = grid.shape()[axis];
        let mut next_starts = Vec::with_capacity(starts.len() * n);
        for &s in &starts {
            let mut line = vec![s];
            for j in 1..n {
                let prev = line[j - 1];
                let x = grid.step(prev, axis).expect("torus step");
                let hx = transport(b, x, prev, &h[&prev], policy)?;
                h.insert(x, hx);
                line.push(x);
            }
            let last = line[n - 1];
            let closing = polar_unitary(&(h[&last].adjoint() * b.overlap(last, s) * &h[&s]), policy)
                .map_err(|_| Error::NotFramable("degenerate closing link".into()))?;
            let twist = unitary_log(&closing, policy).map_err(|e| match e {
                Error::BranchCut { phase } => Error::HolonomyAtCut { phase },
                other => other,
            })?;
            for (j, &x) in line.iter().enumerate().skip(1) {
                let g = exp_antihermitian(&twist.scale(j as f64 / n as f64), policy)?;
                let hx = &h[&x] * g;
                h.insert(x, hx);
            }
            next_starts.extend(line);
        }
        starts = next_starts;
    }
    debug_assert_eq!(h.len(), points.len());
    smooth(b, &mut h, policy);
    Ok(h)
}

/// Jacobi sweeps `h(x) ← polar(Σ_y V(x)†V(y)h(y))` over cycle neighbours.
/// Boundary points of a sphere stay pinned at the base frame.
fn smooth(b: &ChiralBundleData, h: &mut BTreeMap<usize, CMatrix>, policy: &NumericPolicy) {
    let grid = &b.grid;
    let keys: Vec<usize> = h.keys().copied().collect();
    for _ in 0..policy.smoothing_iters {
        let updated: Vec<CMatrix> = keys
            .par_iter()
            .map(|&x| {
                if grid.kind() != SpaceKind::Torus && grid.is_boundary(x) {
                    return h[&x].clone();
                }
                let mut acc = CMatrix::zeros(b.rank, b.rank);
                for y in grid.neighbors(x) {
                    if let Some(hy) = h.get(&y) {
                        acc += b.overlap(x, y) * hy;
                    }
                }
                polar_unitary(&acc, policy).unwrap_or_else(|_| h[&x].clone())
            })
            .collect();
        for (x, v) in keys.iter().zip(updated) {
            h.insert(*x, v);
        }
    }
}

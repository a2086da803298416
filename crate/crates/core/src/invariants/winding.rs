//! Odd windings `(c_n) ∫ Tr (g⁻¹dg)^{2n+1}` on cubical meshes.
//!
//! One engine serves `w2` and the degree-5 Chern–Simons winding. At every
//! sample point `x` the one-form along axis `a` is the derivative of the
//! curve `s ↦ log(g(x)†g(x + s·e_a))`, taken by finite differences; the
//! density is the ε-contracted trace of the `k` one-forms. Differencing the
//! logs rather than multiplying edge increments keeps the scheme at the order
//! of the stencil.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basespace::{self, BaseGrid, CycleHandle, SpaceKind};
use crate::chiralbundle::ChiralBundleData;
use crate::error::{Error, Result};
use crate::numkernel::{self, epsilon_trace, max_abs, unitary_log, CMatrix};
use crate::policy::NumericPolicy;

use super::density::{derivative_stencil, sample_points, shift, sum_over_points};
use super::{check_degree, frame_cycle, Framing, Measurement};

/// `(−1)^n n! / ((2n+1)! (2πi)^{n+1})` for `k = 2n+1`: the constant making the
/// winding of a degree-one map equal to one.
pub fn odd_winding_normalization(k: usize) -> Complex64 {
    assert!(k % 2 == 1, "odd degree");
    let n = (k - 1) / 2;
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(sign * fact(n) / fact(2 * n + 1), 0.0) / two_pi_i.powu(n as u32 + 1)
}

/// Raw odd winding of `g` over a cycle of odd degree `k`. `g` is looked up at
/// canonical grid indices.
pub fn odd_winding(
    grid: &BaseGrid,
    cycle: &CycleHandle,
    g: &(dyn Fn(usize) -> CMatrix + Sync),
    policy: &NumericPolicy,
) -> Result<f64> {
    let norm = odd_winding_normalization(cycle.axes.len());
    let points = sample_points(grid, cycle);
    sum_over_points(&points, |x| Ok((norm * point_trace(grid, cycle, x, g, policy)?).re))
}

/// `ε Tr[A₁ ⋯ A_k]` at `x`, with `A_a` the derivative of `log(g(x)†g(x + s·e_a))`
/// at `s = 0`.
fn point_trace(
    grid: &BaseGrid,
    cycle: &CycleHandle,
    x: usize,
    g: &(dyn Fn(usize) -> CMatrix + Sync),
    policy: &NumericPolicy,
) -> Result<Complex64> {
    let cx = grid.canonical(x);
    let gx = g(cx).adjoint();
    let m = gx.nrows();
    let mut forms = Vec::with_capacity(cycle.axes.len());
    for &axis in &cycle.axes {
        let mut acc = CMatrix::zeros(m, m);
        for (s, w) in derivative_stencil(grid, x, axis) {
            let y = grid.canonical(shift(grid, x, axis, s).expect("stencil inside grid"));
            if y != cx {
                acc += unitary_log(&(&gx * g(y)), policy)?.scale(w);
            }
        }
        forms.push(acc);
    }
    Ok(epsilon_trace(&forms))
}

/// Second odd chiral class over a 3-cycle, with `φ` written in the global
/// frame produced by `framing`.
pub fn w2(
    b: &ChiralBundleData,
    cycle: &CycleHandle,
    framing: &Framing,
    policy: &NumericPolicy,
) -> Result<Measurement> {
    check_degree(b, cycle, 3)?;
    let mut values: Vec<Option<CMatrix>> = vec![None; b.grid.len()];
    match frame_cycle(b, cycle, framing, policy) {
        Ok(h) => {
            for (&x, hx) in &h {
                values[b.grid.canonical(x)] = Some(hx.adjoint() * b.phi_at(x) * hx);
            }
        }
        // the c1 obstruction was already ruled out before the sweep
        Err(Error::HolonomyAtCut { .. }) => {
            for (x, _) in sample_points(&b.grid, cycle) {
                values[x] = Some(b.ambient_unitary(x));
            }
        }
        Err(e) => return Err(e),
    }
    let framed = |x: usize| values[x].clone().expect("framed cycle point");
    let raw = odd_winding(&b.grid, cycle, &framed, policy)?;
    Measurement::resolve(raw, policy.round_tol_high)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// One value per grid point.
    Full,
    /// One value per boundary point, in [`BaseGrid::boundary_points`] order.
    Boundary,
}

/// A matrix-valued map sampled on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshMap {
    pub grid: BaseGrid,
    pub support: Support,
    pub values: Vec<CMatrix>,
    positions: Vec<Option<usize>>,
}

impl MeshMap {
    pub fn new(grid: BaseGrid, support: Support, values: Vec<CMatrix>) -> Result<Self> {
        let positions: Vec<Option<usize>> = match support {
            Support::Full => (0..grid.len()).map(Some).collect(),
            Support::Boundary => {
                let mut pos = vec![None; grid.len()];
                for (i, x) in grid.boundary_points().into_iter().enumerate() {
                    pos[x] = Some(i);
                }
                pos
            }
        };
        let expected = positions.iter().flatten().count();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {expected} supported points",
                values.len()
            )));
        }
        let shape = values.first().map(|v| v.shape()).unwrap_or((0, 0));
        if shape.0 == 0 || shape.0 != shape.1 || values.iter().any(|v| v.shape() != shape) {
            return Err(Error::DimensionMismatch("mesh map values must share one square shape".into()));
        }
        for v in &values {
            numkernel::check_finite(v)?;
        }
        Ok(Self { grid, support, values, positions })
    }

    pub fn from_fn(grid: BaseGrid, support: Support, f: impl Fn(usize) -> CMatrix) -> Result<Self> {
        let points: Vec<usize> = match support {
            Support::Full => (0..grid.len()).collect(),
            Support::Boundary => grid.boundary_points(),
        };
        let values = points.into_iter().map(f).collect();
        Self::new(grid, support, values)
    }

    pub fn matrix_dim(&self) -> usize {
        self.values[0].nrows()
    }

    /// Value at grid index `x`, if the map is supported there.
    pub fn get(&self, x: usize) -> Option<&CMatrix> {
        self.positions.get(x).copied().flatten().map(|i| &self.values[i])
    }

    /// Worst unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        self.values.iter().map(numkernel::isometry_residual).fold(0.0, f64::max)
    }
}

/// Degree-5 winding of a unitary field on the 5-ball mesh,
/// `(i/480π³) Σ_cells ε Tr[A⁵]`; integer for maps constant on the boundary.
pub fn winding5(f: &MeshMap, policy: &NumericPolicy) -> Result<f64> {
    if f.grid.kind() != SpaceKind::Ball5 || f.support != Support::Full {
        return Err(Error::UnsupportedSpace("winding5 needs a full map on a ball5 mesh".into()));
    }
    let residual = f.unitarity_residual();
    if residual > policy.tol_unitary {
        return Err(Error::InvalidBundle(format!("map is not unitary (residual {residual:.3e})")));
    }
    let cycle = &basespace::enumerate_cycles(&f.grid, 5)?[0];
    let g = |x: usize| f.values[x].clone();
    odd_winding(&f.grid, cycle, &g, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Z2Result {
    pub epsilon: i8,
    pub cs5: f64,
    /// Distance of `cs5` from the nearest half-integer.
    pub residual: f64,
    pub boundary_residual: f64,
}

/// Block embedding `SU(2) → SU(3)` into the upper-left corner.
fn embed(f: &CMatrix) -> CMatrix {
    let mut out = numkernel::identity(f.nrows() + 1);
    out.view_mut((0, 0), f.shape()).copy_from(f);
    out
}

/// Witten sign `e^{2πi CS₅(F)}` of a map `f : S⁴ → SU(2)` given on the
/// boundary of a ball5 mesh, from a supplied extension `F` into `SU(3)`.
pub fn z2_witten(f: &MeshMap, extension: &MeshMap, policy: &NumericPolicy) -> Result<Z2Result> {
    if f.grid != extension.grid {
        return Err(Error::GridMismatch);
    }
    if f.matrix_dim() != 2 || extension.matrix_dim() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "expected 2x2 boundary values and a 3x3 extension, got {0}x{0} and {1}x{1}",
            f.matrix_dim(),
            extension.matrix_dim()
        )));
    }
    let mut boundary_residual = 0.0f64;
    for x in f.grid.boundary_points() {
        let fx = f.get(x).ok_or_else(|| Error::Format(format!("boundary map missing point {x}")))?;
        let big = extension.get(x).expect("full support");
        boundary_residual = boundary_residual.max(max_abs(&(big - embed(fx))));
    }
    if boundary_residual > policy.tol_unitary {
        return Err(Error::BoundaryMismatch { residual: boundary_residual });
    }
    let cs5 = winding5(extension, policy)?;
    let half = (2.0 * cs5).round();
    let residual = (cs5 - half / 2.0).abs();
    if residual > policy.z2_tol {
        return Err(Error::Unresolved { raw: cs5, residual, tol: policy.z2_tol });
    }
    let epsilon = if (half as i64).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(Z2Result { epsilon, cs5, residual, boundary_residual })
}

//! Sampled chiral vector bundles.
//!
//! A [`ChiralBundleData`] stores, at every grid point, an orthonormal frame
//! `V(x)` (`N×m`) of the fiber `Σ(x) ⊂ Cᴺ` and the automorphism `φ(x)`
//! (`m×m` unitary) written in that frame. The ambient unitary preserving
//! `Σ(x)` is `u = VφV† + (1 − VV†)`.
//!
//! Frames are an arbitrary per-point gauge. Everything downstream only looks
//! at link overlaps `V(x)†V(y)` and at `φ` up to conjugation, so the gauge
//! never leaks into the invariants.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::basespace::{BaseGrid, SpaceKind};
use crate::error::{Error, Result};
use crate::numkernel::{self, identity, isometry_residual, max_abs, polar_unitary, CMatrix};
use crate::policy::NumericPolicy;

#[derive(Debug, Clone, PartialEq)]
pub struct ChiralBundleData {
    pub grid: BaseGrid,
    pub ambient_dim: usize,
    pub rank: usize,
    pub frame: Vec<CMatrix>,
    pub phi: Vec<CMatrix>,
    /// Free-form provenance, e.g. `href = identity_in_frames`.
    pub metadata: BTreeMap<String, String>,
}

impl ChiralBundleData {
    /// Checks shapes only; use [`validate`] for the numerical conditions.
    pub fn new(grid: BaseGrid, frame: Vec<CMatrix>, phi: Vec<CMatrix>) -> Result<Self> {
        if frame.len() != grid.len() || phi.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} frames and {} automorphisms for {} grid points",
                frame.len(),
                phi.len(),
                grid.len()
            )));
        }
        let (n, m) = frame.first().map(|v| v.shape()).unwrap_or((0, 0));
        if m == 0 || m > n {
            return Err(Error::DimensionMismatch(format!("frame shape {n}x{m}")));
        }
        for (x, (v, p)) in frame.iter().zip(&phi).enumerate() {
            if v.shape() != (n, m) || p.shape() != (m, m) {
                return Err(Error::DimensionMismatch(format!(
                    "point {x}: frame {:?}, phi {:?}, expected {n}x{m} and {m}x{m}",
                    v.shape(),
                    p.shape()
                )));
            }
            numkernel::check_finite(v)?;
            numkernel::check_finite(p)?;
        }
        Ok(Self { grid, ambient_dim: n, rank: m, frame, phi, metadata: BTreeMap::new() })
    }

    /// Constant frame (first `m` basis vectors of `Cᴺ`) and `φ ≡ 1`.
    pub fn trivial(grid: BaseGrid, ambient_dim: usize, rank: usize) -> Result<Self> {
        let v = identity(ambient_dim).columns(0, rank).into_owned();
        let len = grid.len();
        Self::new(grid, vec![v; len], vec![identity(rank); len])
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Frame at the quotient-space representative of `x`.
    pub fn frame_at(&self, x: usize) -> &CMatrix {
        &self.frame[self.grid.canonical(x)]
    }

    pub fn phi_at(&self, x: usize) -> &CMatrix {
        &self.phi[self.grid.canonical(x)]
    }

    /// Overlap `V(x)†V(y)` between representatives.
    pub fn overlap(&self, x: usize, y: usize) -> CMatrix {
        self.frame_at(x).adjoint() * self.frame_at(y)
    }

    pub fn projector(&self, x: usize) -> CMatrix {
        let v = self.frame_at(x);
        v * v.adjoint()
    }

    /// The ambient unitary `VφV† + (1 − VV†)`.
    pub fn ambient_unitary(&self, x: usize) -> CMatrix {
        let v = self.frame_at(x);
        let p = v * v.adjoint();
        v * self.phi_at(x) * v.adjoint() + identity(self.ambient_dim) - p
    }

    /// Same frames, `φ ≡ 1`.
    pub fn forget_automorphism(&self) -> Self {
        let mut out = self.clone();
        out.phi = vec![identity(self.rank); self.grid.len()];
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub frame_residual: f64,
    pub phi_residual: f64,
    pub min_overlap: f64,
    /// Link `(x, y)` attaining `min_overlap`.
    pub worst_link: Option<(usize, usize)>,
    /// Spread of the projector and ambient unitary over the collapsed
    /// boundary (sphere grids only).
    pub collapse_residual: Option<f64>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The first failure as an error value.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        if let (Some((from, to)), true) = (self.worst_link, self.failures.iter().any(|f| f.starts_with("overlap"))) {
            return Err(Error::Admissibility { from, to, overlap: self.min_overlap });
        }
        Err(Error::InvalidBundle(self.failures.join("; ")))
    }
}

/// Orthonormality, unitarity, link admissibility and (on spheres) boundary
/// collapse, all against `policy`.
pub fn validate(b: &ChiralBundleData, policy: &NumericPolicy) -> ValidationReport {
    let n = b.grid.len();
    let frame_residual = (0..n)
        .into_par_iter()
        .map(|x| isometry_residual(&b.frame[x]))
        .reduce(|| 0.0, f64::max);
    let phi_residual = (0..n)
        .into_par_iter()
        .map(|x| isometry_residual(&b.phi[x]))
        .reduce(|| 0.0, f64::max);
    let links: Vec<(usize, usize)> = b
        .grid
        .links()
        .map(|(x, _, y)| (b.grid.canonical(x), b.grid.canonical(y)))
        .filter(|(x, y)| x != y)
        .collect();
    let worst = links
        .par_iter()
        .map(|&(x, y)| (numkernel::sigma_min(&b.overlap(x, y)), (x, y)))
        .min_by(|a, c| a.0.total_cmp(&c.0).then(a.1.cmp(&c.1)));
    let (min_overlap, worst_link) = match worst {
        Some((s, l)) => (s, Some(l)),
        None => (1.0, None),
    };
    let collapse_residual = (b.grid.kind() == SpaceKind::Sphere).then(|| {
        let p0 = b.projector(0);
        let u0 = b.ambient_unitary(0);
        b.grid
            .boundary_points()
            .par_iter()
            .map(|&x| {
                let v = &b.frame[x];
                let p = v * v.adjoint();
                let u = v * &b.phi[x] * v.adjoint() + identity(b.ambient_dim) - &p;
                max_abs(&(p - &p0)).max(max_abs(&(u - &u0)))
            })
            .reduce(|| 0.0, f64::max)
    });

    let mut failures = Vec::new();
    if frame_residual > policy.tol_unitary {
        failures.push(format!("frame residual {frame_residual:.3e}"));
    }
    if phi_residual > policy.tol_unitary {
        failures.push(format!("phi unitarity residual {phi_residual:.3e}"));
    }
    if min_overlap < policy.overlap_min {
        failures.push(format!("overlap {min_overlap:.3e} on link {worst_link:?}"));
    }
    if let Some(r) = collapse_residual.filter(|&r| r > policy.tol_collapse) {
        failures.push(format!("boundary collapse residual {r:.3e}"));
    }
    ValidationReport { frame_residual, phi_residual, min_overlap, worst_link, collapse_residual, failures }
}

/// Per-point `U(m)` gauge transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub grid: BaseGrid,
    pub values: Vec<CMatrix>,
}

/// `V' = V·g`, `φ' = g†φg`.
pub fn apply_gauge(b: &ChiralBundleData, g: &GaugeField) -> Result<ChiralBundleData> {
    if g.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    if g.values.iter().any(|v| v.shape() != (b.rank, b.rank)) {
        return Err(Error::DimensionMismatch(format!("gauge field must be {0}x{0}", b.rank)));
    }
    let (frame, phi) = (0..b.grid.len())
        .into_par_iter()
        .map(|x| {
            let gx = &g.values[x];
            (&b.frame[x] * gx, gx.adjoint() * &b.phi[x] * gx)
        })
        .unzip();
    Ok(ChiralBundleData { frame, phi, ..b.clone() })
}

/// Maps every point of a source grid `Y` to a point of a target grid `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    pub source: BaseGrid,
    pub targets: Vec<usize>,
}

impl GridMap {
    pub fn identity(grid: &BaseGrid) -> Self {
        Self { source: grid.clone(), targets: (0..grid.len()).collect() }
    }

    /// Nearest-node discretization of a map given on parameter coordinates.
    /// Torus coordinates are reduced mod 2π, cube coordinates clamped.
    pub fn from_fn(source: &BaseGrid, target: &BaseGrid, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let targets = (0..source.len())
            .map(|y| {
                let p = f(&source.coordinates(y));
                let multi: Vec<usize> = p
                    .iter()
                    .zip(target.shape())
                    .map(|(&t, &n)| match target.kind() {
                        SpaceKind::Torus => {
                            let s = t / (2.0 * std::f64::consts::PI) * n as f64;
                            (s.round() as i64).rem_euclid(n as i64) as usize
                        }
                        _ => (t.clamp(0.0, 1.0) * (n - 1) as f64).round() as usize,
                    })
                    .collect();
                target.index(&multi)
            })
            .collect();
        Self { source: source.clone(), targets }
    }
}

/// `V_Y(y) = V_X(map(y))`, `φ_Y(y) = φ_X(map(y))`.
pub fn pullback(b: &ChiralBundleData, map: &GridMap) -> Result<ChiralBundleData> {
    if map.targets.len() != map.source.len() {
        return Err(Error::DimensionMismatch("grid map length".into()));
    }
    if let Some(&t) = map.targets.iter().find(|&&t| t >= b.grid.len()) {
        return Err(Error::TargetOutOfRange { target: t, len: b.grid.len() });
    }
    let frame = map.targets.iter().map(|&t| b.frame_at(t).clone()).collect();
    let phi = map.targets.iter().map(|&t| b.phi_at(t).clone()).collect();
    let mut out = ChiralBundleData::new(map.source.clone(), frame, phi)?;
    out.metadata = b.metadata.clone();
    Ok(out)
}

/// `(E₁⊗E₂, Φ₁⊗Φ₂)`.
pub fn tensor(
    b1: &ChiralBundleData,
    b2: &ChiralBundleData,
    policy: &NumericPolicy,
) -> Result<ChiralBundleData> {
    if b1.grid != b2.grid {
        return Err(Error::GridMismatch);
    }
    let frame = (0..b1.grid.len())
        .into_par_iter()
        .map(|x| polar_unitary(&b1.frame[x].kronecker(&b2.frame[x]), policy))
        .collect::<Result<Vec<_>>>()?;
    let phi = (0..b1.grid.len())
        .into_par_iter()
        .map(|x| b1.phi[x].kronecker(&b2.phi[x]))
        .collect();
    ChiralBundleData::new(b1.grid.clone(), frame, phi)
}

/// `(E, Φ₁∘Φ₂)` for two automorphisms of the same frame field.
pub fn compose_automorphisms(
    b1: &ChiralBundleData,
    b2: &ChiralBundleData,
    policy: &NumericPolicy,
) -> Result<ChiralBundleData> {
    if b1.grid != b2.grid {
        return Err(Error::GridMismatch);
    }
    if (b1.ambient_dim, b1.rank) != (b2.ambient_dim, b2.rank) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            b1.ambient_dim, b1.rank, b2.ambient_dim, b2.rank
        )));
    }
    for x in 0..b1.grid.len() {
        let residual = max_abs(&(&b1.frame[x] - &b2.frame[x]));
        if residual > policy.tol_frame_match {
            return Err(Error::FrameMismatch { point: x, residual });
        }
    }
    let phi = b1.phi.iter().zip(&b2.phi).map(|(p, q)| p * q).collect();
    Ok(ChiralBundleData { phi, ..b1.clone() })
}

/// A graded Clifford bundle of rank `2m` written in a frame: the columns of
/// `frame[x]` span the fiber, and `rho`, `gamma` act on frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedCliffordData {
    pub grid: BaseGrid,
    pub frame: Vec<CMatrix>,
    pub rho: Vec<CMatrix>,
    pub gamma: Vec<CMatrix>,
}

impl GradedCliffordData {
    /// `max |ρ² − 1|` and `max |Γρ + ρΓ|` over all points.
    pub fn algebra_residuals(&self) -> (f64, f64) {
        let mut sq = 0.0f64;
        let mut anti = 0.0f64;
        for (r, g) in self.rho.iter().zip(&self.gamma) {
            sq = sq.max(max_abs(&(r * r - identity(r.nrows()))));
            anti = anti.max(max_abs(&(g * r + r * g)));
        }
        (sq, anti)
    }
}

/// `Ê = E ⊕ E` with `ρ(e) = [[0, φ], [φ†, 0]]` and `Γ = diag(1, −1)`.
pub fn clifford_double(b: &ChiralBundleData) -> GradedCliffordData {
    let (n, m) = (b.ambient_dim, b.rank);
    let mut frame = Vec::with_capacity(b.grid.len());
    let mut rho = Vec::with_capacity(b.grid.len());
    let mut gamma_pt = CMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        gamma_pt[(j, j)] = numkernel::c(1.0, 0.0);
        gamma_pt[(m + j, m + j)] = numkernel::c(-1.0, 0.0);
    }
    for x in 0..b.grid.len() {
        let mut f = CMatrix::zeros(2 * n, 2 * m);
        f.view_mut((0, 0), (n, m)).copy_from(&b.frame[x]);
        f.view_mut((n, m), (n, m)).copy_from(&b.frame[x]);
        frame.push(f);
        let mut r = CMatrix::zeros(2 * m, 2 * m);
        r.view_mut((0, m), (m, m)).copy_from(&b.phi[x]);
        r.view_mut((m, 0), (m, m)).copy_from(&b.phi[x].adjoint());
        rho.push(r);
    }
    GradedCliffordData { grid: b.grid.clone(), frame, rho, gamma: vec![gamma_pt; b.grid.len()] }
}

/// Choice of the reference isomorphism `h_ref : E₋ → E₊`.
#[derive(Debug, Clone, PartialEq)]
pub enum HRef {
    /// The identity between the sweep-aligned eigenframes of `E₋` and `E₊`.
    IdentityInFrames,
    /// `h_ref = Θ`, which makes `φ ≡ 1`.
    SelfReference,
    /// Per-point `m×m` unitaries written in the `E₋ → E₊` frames returned by
    /// [`graded_frames`].
    Supplied(Vec<CMatrix>),
}

impl HRef {
    pub fn label(&self) -> &'static str {
        match self {
            HRef::IdentityInFrames => "identity_in_frames",
            HRef::SelfReference => "self",
            HRef::Supplied(_) => "supplied",
        }
    }
}

/// Eigenframes of the `±1` eigenspaces of `Γ`, in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedFrames {
    /// `2m×m` per point, spanning `E₊`.
    pub plus: Vec<CMatrix>,
    /// `2m×m` per point, spanning `E₋`.
    pub minus: Vec<CMatrix>,
    /// `Θ = W₊†ρW₋`, the intertwiner `E₋ → E₊` in these frames.
    pub theta: Vec<CMatrix>,
}

/// Split every fiber by `Γ` and align the resulting eigenframes by a
/// deterministic parallel-transport sweep (see [`sweep_align`]).
pub fn graded_frames(c: &GradedCliffordData, policy: &NumericPolicy) -> Result<GradedFrames> {
    let grid = &c.grid;
    let split = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let eig = numkernel::herm_eig(&c.gamma[x], policy)?;
            let plus = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
            let minus = eig.eigenvalues.len() - plus;
            if plus != minus {
                return Err(Error::AsymmetricGradation { point: x, plus, minus });
            }
            Ok((eig.columns(minus..2 * minus), eig.columns(0..minus)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (plus, minus): (Vec<_>, Vec<_>) = split.into_iter().unzip();
    let m = plus.first().map_or(0, |p| p.ncols());
    let two_m = 2 * m;
    let ref_plus = identity(two_m).columns(0, m).into_owned();
    let ref_minus = identity(two_m).columns(m, m).into_owned();
    // Γ-eigenframes live in per-point frame coordinates; transport them with
    // the links of the ambient frame so that aligned frames are comparable.
    let links = |x: usize, y: usize| c.frame[grid.canonical(x)].adjoint() * &c.frame[grid.canonical(y)];
    let plus = sweep_align(grid, plus, &ref_plus, &links, policy)?;
    let minus = sweep_align(grid, minus, &ref_minus, &links, policy)?;
    let theta = (0..grid.len())
        .into_par_iter()
        .map(|x| polar_unitary(&(plus[x].adjoint() * &c.rho[x] * &minus[x]), policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedFrames { plus, minus, theta })
}

/// Recover `(E₋, h_ref⁻¹∘Θ)` from a graded Clifford bundle.
pub fn clifford_reconstruct(
    c: &GradedCliffordData,
    href: &HRef,
    policy: &NumericPolicy,
) -> Result<ChiralBundleData> {
    let gf = graded_frames(c, policy)?;
    let n = c.grid.len();
    let phi = match href {
        HRef::IdentityInFrames => gf.theta.clone(),
        HRef::SelfReference => {
            let m = gf.theta.first().map_or(0, |t| t.nrows());
            vec![identity(m); n]
        }
        HRef::Supplied(h) => {
            if h.len() != n {
                return Err(Error::DimensionMismatch("supplied h_ref length".into()));
            }
            h.iter()
                .zip(&gf.theta)
                .map(|(h, t)| {
                    if h.shape() != t.shape() {
                        return Err(Error::DimensionMismatch(format!("h_ref shape {:?}", h.shape())));
                    }
                    if isometry_residual(h) > policy.tol_unitary {
                        return Err(Error::InvalidBundle("supplied h_ref is not unitary".into()));
                    }
                    Ok(h.adjoint() * t)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let frame = (0..n).map(|x| &c.frame[x] * &gf.minus[x]).collect();
    Ok(ChiralBundleData::new(c.grid.clone(), frame, phi)?.with_metadata("href", href.label()))
}

/// Deterministic gauge alignment of a frame field by parallel transport along
/// a spanning tree.
///
/// Each `frames[x]` is a `k×m` isometry. `link(x, y)` maps coordinates at `y`
/// to coordinates at `x` (identity when all frames live in one space). Points
/// are visited in index order. The root and, on spheres, the whole collapsed
/// boundary are aligned to `reference`; every other point `x` takes its
/// parent `p = x − e_a` (last axis `a` with `x_a > 0`) and is rotated within
/// its span to `W·polar(W†·link(x,p)·F(p))`.
pub fn sweep_align(
    grid: &BaseGrid,
    frames: Vec<CMatrix>,
    reference: &CMatrix,
    link: &(dyn Fn(usize, usize) -> CMatrix + Sync),
    policy: &NumericPolicy,
) -> Result<Vec<CMatrix>> {
    let align = |w: &CMatrix, target: &CMatrix| -> Result<CMatrix> {
        let o = w.adjoint() * target;
        match polar_unitary(&o, policy) {
            Ok(r) => Ok(w * r),
            Err(Error::NearSingular { .. }) => Ok(w.clone()),
            Err(e) => Err(e),
        }
    };
    let mut out: Vec<CMatrix> = Vec::with_capacity(frames.len());
    for x in 0..grid.len() {
        let canon = grid.canonical(x);
        let f = if canon != x {
            out[canon].clone()
        } else {
            let parent = (0..grid.dim()).rev().find(|&a| grid.axis_index(x, a) > 0).map(|a| {
                grid.step_back(x, a).expect("interior step")
            });
            match parent {
                None => align(&frames[x], reference)?,
                Some(p) => {
                    let target = link(x, p) * &out[p];
                    let aligned = align(&frames[x], &target)?;
                    let ov = numkernel::sigma_min(&(frames[x].adjoint() * &target));
                    if ov < policy.overlap_min {
                        return Err(Error::Admissibility { from: p, to: x, overlap: ov });
                    }
                    aligned
                }
            }
        };
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{c, from_rows, pauli};
    use std::f64::consts::PI;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn phase_line(grid: &BaseGrid, n: i32) -> ChiralBundleData {
        let phi = (0..grid.len())
            .map(|x| {
                let t = grid.coordinates(x)[0];
                CMatrix::from_element(1, 1, c((n as f64 * t).cos(), (n as f64 * t).sin()))
            })
            .collect();
        ChiralBundleData::new(grid.clone(), vec![identity(1); grid.len()], phi).unwrap()
    }

    #[test]
    fn trivial_bundle_validates() {
        let g = BaseGrid::sphere(&[6, 6]).unwrap();
        let b = ChiralBundleData::trivial(g, 3, 2).unwrap();
        let r = validate(&b, &pol());
        assert!(r.passed());
        assert_eq!(r.frame_residual, 0.0);
        assert_eq!(r.phi_residual, 0.0);
        assert_eq!(r.collapse_residual, Some(0.0));
        assert_eq!(r.min_overlap, 1.0);
    }

    #[test]
    fn zeroed_column_fails() {
        let g = BaseGrid::torus(&[4]).unwrap();
        let mut b = ChiralBundleData::trivial(g, 2, 1).unwrap();
        b.frame[2] = CMatrix::zeros(2, 1);
        let r = validate(&b, &pol());
        assert!(!r.passed());
        assert!((r.frame_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_neighbor_fails_admissibility() {
        let g = BaseGrid::torus(&[4]).unwrap();
        let mut b = ChiralBundleData::trivial(g, 2, 1).unwrap();
        b.frame[1] = from_rows(2, 1, &[(0., 0.), (1., 0.)]);
        let r = validate(&b, &pol());
        assert!(!r.passed());
        assert_eq!(r.min_overlap, 0.0);
        assert!(matches!(r.into_result(), Err(Error::Admissibility { overlap, .. }) if overlap == 0.0));
    }

    #[test]
    fn gauge_identity_and_abelian() {
        let g = BaseGrid::torus(&[16]).unwrap();
        let b = phase_line(&g, 2);
        let id = GaugeField { grid: g.clone(), values: vec![identity(1); 16] };
        assert_eq!(apply_gauge(&b, &id).unwrap(), b);
        let alpha = GaugeField {
            grid: g.clone(),
            values: (0..16).map(|x| CMatrix::from_element(1, 1, c((x as f64).cos(), (x as f64).sin()))).collect(),
        };
        let gb = apply_gauge(&b, &alpha).unwrap();
        for x in 0..16 {
            assert!((gb.phi[x][(0, 0)] - b.phi[x][(0, 0)]).norm() < 1e-15);
        }
    }

    #[test]
    fn gauge_preserves_ambient_unitary() {
        let g = BaseGrid::torus(&[8]).unwrap();
        let s = pauli();
        let frame: Vec<CMatrix> = vec![identity(3).columns(0, 2).into_owned(); 8];
        let phi: Vec<CMatrix> = (0..8)
            .map(|x| numkernel::exp_antihermitian(&(&s[0] * c(0.0, 0.2 * x as f64)), &pol()).unwrap())
            .collect();
        let b = ChiralBundleData::new(g.clone(), frame, phi).unwrap();
        let gauge = GaugeField {
            grid: g,
            values: (0..8)
                .map(|x| numkernel::exp_antihermitian(&(&s[1] * c(0.0, 0.7 * x as f64)), &pol()).unwrap())
                .collect(),
        };
        let gb = apply_gauge(&b, &gauge).unwrap();
        for x in 0..8 {
            assert!(max_abs(&(gb.ambient_unitary(x) - b.ambient_unitary(x))) < 1e-14);
        }
    }

    #[test]
    fn pullback_identity_and_constant() {
        let g = BaseGrid::torus(&[32]).unwrap();
        let b = phase_line(&g, 3);
        assert_eq!(pullback(&b, &GridMap::identity(&g)).unwrap(), b);
        let constant = GridMap { source: g.clone(), targets: vec![5; 32] };
        let p = pullback(&b, &constant).unwrap();
        assert!(p.phi.iter().all(|v| *v == b.phi[5]));
        let bad = GridMap { source: g.clone(), targets: vec![99; 32] };
        assert!(matches!(pullback(&b, &bad), Err(Error::TargetOutOfRange { target: 99, len: 32 })));
    }

    #[test]
    fn grid_map_from_fn_wraps() {
        let g = BaseGrid::torus(&[32]).unwrap();
        let m = GridMap::from_fn(&g, &g, |t| vec![3.0 * t[0]]);
        for (y, &x) in m.targets.iter().enumerate() {
            assert_eq!(x, (3 * y) % 32);
        }
    }

    #[test]
    fn tensor_shapes() {
        let g = BaseGrid::torus(&[8]).unwrap();
        let a = ChiralBundleData::trivial(g.clone(), 2, 1).unwrap();
        let b = ChiralBundleData::trivial(g.clone(), 3, 2).unwrap();
        let t = tensor(&a, &b, &pol()).unwrap();
        assert_eq!((t.ambient_dim, t.rank), (6, 2));
        assert!(validate(&t, &pol()).passed());
        let other = ChiralBundleData::trivial(BaseGrid::torus(&[9]).unwrap(), 2, 1).unwrap();
        assert_eq!(tensor(&a, &other, &pol()), Err(Error::GridMismatch));
    }

    #[test]
    fn compose_requires_matching_frames() {
        let g = BaseGrid::torus(&[8]).unwrap();
        let a = phase_line(&g, 1);
        let mut b = phase_line(&g, 2);
        let ab = compose_automorphisms(&a, &b, &pol()).unwrap();
        assert!((ab.phi[3][(0, 0)] - phase_line(&g, 3).phi[3][(0, 0)]).norm() < 1e-14);
        b.frame[4] = CMatrix::from_element(1, 1, c(0.0, 1.0));
        assert!(matches!(compose_automorphisms(&a, &b, &pol()), Err(Error::FrameMismatch { point: 4, .. })));
    }

    #[test]
    fn double_of_trivial_line() {
        let g = BaseGrid::torus(&[4]).unwrap();
        let b = ChiralBundleData::trivial(g, 1, 1).unwrap();
        let d = clifford_double(&b);
        let s = pauli();
        assert!(d.rho.iter().all(|r| *r == s[0]));
        assert!(d.gamma.iter().all(|r| *r == s[2]));
        let (sq, anti) = d.algebra_residuals();
        assert_eq!((sq, anti), (0.0, 0.0));
    }

    #[test]
    fn double_reconstruct_round_trip() {
        let g = BaseGrid::torus(&[24]).unwrap();
        let b = phase_line(&g, -2);
        let d = clifford_double(&b);
        let r = clifford_reconstruct(&d, &HRef::IdentityInFrames, &pol()).unwrap();
        for x in 0..g.len() {
            assert!(max_abs(&(&r.phi[x] - &b.phi[x])) < 1e-12);
        }
        let s = clifford_reconstruct(&d, &HRef::SelfReference, &pol()).unwrap();
        assert!(s.phi.iter().all(|p| *p == identity(1)));
        assert_eq!(s.metadata["href"], "self");
    }

    #[test]
    fn asymmetric_gradation_is_rejected() {
        let g = BaseGrid::torus(&[4]).unwrap();
        let b = ChiralBundleData::trivial(g, 1, 1).unwrap();
        let mut d = clifford_double(&b);
        d.gamma[2] = identity(2);
        assert!(matches!(
            clifford_reconstruct(&d, &HRef::IdentityInFrames, &pol()),
            Err(Error::AsymmetricGradation { point: 2, plus: 2, minus: 0 })
        ));
    }

    #[test]
    fn sweep_align_is_continuous_on_a_circle_of_frames() {
        // frames of a fixed line in C² with wildly varying phases
        let g = BaseGrid::torus(&[16]).unwrap();
        let frames: Vec<CMatrix> = (0..16)
            .map(|x| {
                let a = 2.0 * PI * x as f64 / 16.0;
                let ph = c((3.7 * x as f64).cos(), (3.7 * x as f64).sin());
                from_rows(2, 1, &[(a.cos(), 0.), (a.sin(), 0.)]) * ph
            })
            .collect();
        let reference = from_rows(2, 1, &[(1., 0.), (0., 0.)]);
        let out = sweep_align(&g, frames, &reference, &|_, _| identity(2), &pol()).unwrap();
        for x in 1..15 {
            let o = (out[x].adjoint() * &out[x + 1])[(0, 0)];
            assert!(o.im.abs() < 1e-12 && o.re > 0.9);
        }
    }
}

//! From a sampled chiral Hamiltonian to chiral bundle data.
//!
//! For a family `H(x)` with `χHχ = −H`, a symmetric band family `Ω` (the `m`
//! negative bands nearest zero energy and their chiral partners) defines a
//! projector `P`. Inside `Ran P` the gradation `Γ = PχP` splits off `E±`, the
//! flattened Hamiltonian `ρ = P·sign(H)·P` intertwines them, and
//! `Θ = Π₊ρΠ₋ : E₋ → E₊`. The bundle is `(E₋, h_ref⁻¹Θ)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::basespace::{enumerate_cycles, BaseGrid};
use crate::chiralbundle::{
    clifford_reconstruct, graded_frames, ChiralBundleData, GradedCliffordData, GradedFrames, HRef,
};
use crate::error::{Error, Result};
use crate::invariants::chern1;
use crate::numkernel::{self, c, herm_eig, identity, max_abs, CMatrix, HermitianEig};
use crate::policy::NumericPolicy;

/// A sampled Hamiltonian family without chiral structure.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianField {
    pub grid: BaseGrid,
    pub dim_h: usize,
    pub hamiltonian: Vec<CMatrix>,
}

/// A sampled chiral quantum system.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSystemField {
    pub grid: BaseGrid,
    pub dim_h: usize,
    pub hamiltonian: Vec<CMatrix>,
    pub chi: Vec<CMatrix>,
    /// Number `m` of negative bands in the selected family.
    pub band_count: usize,
}

fn check_field(grid: &BaseGrid, mats: &[CMatrix], what: &str) -> Result<usize> {
    if mats.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} {what} matrices for {} grid points",
            mats.len(),
            grid.len()
        )));
    }
    let n = mats.first().map_or(0, |h| h.nrows());
    for (x, h) in mats.iter().enumerate() {
        if h.shape() != (n, n) || n == 0 {
            return Err(Error::DimensionMismatch(format!("{what} at point {x} has shape {:?}", h.shape())));
        }
        numkernel::check_finite(h)?;
    }
    Ok(n)
}

impl HamiltonianField {
    pub fn new(grid: BaseGrid, hamiltonian: Vec<CMatrix>) -> Result<Self> {
        let dim_h = check_field(&grid, &hamiltonian, "Hamiltonian")?;
        Ok(Self { grid, dim_h, hamiltonian })
    }
}

impl QuantumSystemField {
    pub fn new(grid: BaseGrid, hamiltonian: Vec<CMatrix>, chi: Vec<CMatrix>, band_count: usize) -> Result<Self> {
        let dim_h = check_field(&grid, &hamiltonian, "Hamiltonian")?;
        if check_field(&grid, &chi, "chirality")? != dim_h {
            return Err(Error::DimensionMismatch("H and chi sizes differ".into()));
        }
        if band_count == 0 || 2 * band_count > dim_h {
            return Err(Error::DimensionMismatch(format!("band count {band_count} for N = {dim_h}")));
        }
        Ok(Self { grid, dim_h, hamiltonian, chi, band_count })
    }

    pub fn hamiltonian_field(&self) -> HamiltonianField {
        HamiltonianField { grid: self.grid.clone(), dim_h: self.dim_h, hamiltonian: self.hamiltonian.clone() }
    }
}

/// Diagnostics of [`validate_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDiagnostics {
    pub chiral_residual: f64,
    pub involution_residual: f64,
    pub min_abs_eigenvalue: f64,
    /// Worst mismatch between the sorted spectrum and its negative.
    pub spectrum_asymmetry: f64,
}

/// Chiral symmetry, `χ² = 1`, the zero gap and isolation of the selected family.
pub fn validate_system(sys: &QuantumSystemField, policy: &NumericPolicy) -> Result<SystemDiagnostics> {
    let per_point = (0..sys.grid.len())
        .into_par_iter()
        .map(|x| {
            let (h, chi) = (&sys.hamiltonian[x], &sys.chi[x]);
            let scale = max_abs(h).max(1.0);
            let chiral = max_abs(&(chi * h * chi.adjoint() + h)) / scale;
            let inv = max_abs(&(chi * chi - identity(sys.dim_h)))
                .max(numkernel::hermiticity_residual(chi));
            let eig = herm_eig(h, policy)?;
            let gap = eig.eigenvalues.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
            let n = eig.eigenvalues.len();
            let asym = (0..n)
                .map(|i| (eig.eigenvalues[i] + eig.eigenvalues[n - 1 - i]).abs())
                .fold(0.0, f64::max);
            Ok((chiral, inv, gap, asym, eig))
        })
        .collect::<Vec<Result<_>>>();
    let mut d = SystemDiagnostics {
        chiral_residual: 0.0,
        involution_residual: 0.0,
        min_abs_eigenvalue: f64::INFINITY,
        spectrum_asymmetry: 0.0,
    };
    let per_point = per_point.into_iter().collect::<Result<Vec<_>>>()?;
    // name the worst point, not the first
    if let Some((x, chiral)) = per_point
        .iter()
        .map(|p| p.0)
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|&(_, r)| r > policy.tol_chiral)
    {
        return Err(Error::ChiralityViolation { point: x, residual: chiral });
    }
    for (x, (chiral, inv, gap, asym, eig)) in per_point.into_iter().enumerate() {
        if inv > policy.tol_unitary {
            return Err(Error::InvalidBundle(format!("chi is not a hermitian involution at point {x}")));
        }
        if gap < policy.gap_min {
            let eigenvalue = *eig.eigenvalues.iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            return Err(Error::GapViolation { point: x, eigenvalue });
        }
        select_family(&eig, sys.band_count, x, policy)?;
        d.chiral_residual = d.chiral_residual.max(chiral);
        d.involution_residual = d.involution_residual.max(inv);
        d.min_abs_eigenvalue = d.min_abs_eigenvalue.min(gap);
        d.spectrum_asymmetry = d.spectrum_asymmetry.max(asym);
    }
    Ok(d)
}

/// Index ranges `(Ω₋, Ω₊)` into the ascending spectrum: the `m` negative
/// eigenvalues nearest zero and the `m` positive ones above them.
fn select_family(
    eig: &HermitianEig,
    m: usize,
    point: usize,
    policy: &NumericPolicy,
) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let ev = &eig.eigenvalues;
    let neg = ev.iter().filter(|&&l| l < 0.0).count();
    if neg < m || ev.len() - neg < m {
        return Err(Error::AsymmetricFamily { point, trace: neg as f64 - (ev.len() - neg) as f64 });
    }
    let lower = neg - m..neg;
    let upper = neg..neg + m;
    // the family must be isolated from the rest of the spectrum
    if neg > m && ev[neg - m] - ev[neg - m - 1] < policy.gap_min {
        return Err(Error::GapViolation { point, eigenvalue: ev[neg - m] });
    }
    if neg + m < ev.len() && ev[neg + m] - ev[neg + m - 1] < policy.gap_min {
        return Err(Error::GapViolation { point, eigenvalue: ev[neg + m - 1] });
    }
    Ok((lower, upper))
}

/// Projectors onto the family `Ω` by eigendecomposition.
pub fn fermi_projection_eig(sys: &QuantumSystemField, policy: &NumericPolicy) -> Result<Vec<CMatrix>> {
    let out: Vec<Result<CMatrix>> = (0..sys.grid.len())
        .into_par_iter()
        .map(|x| {
            let eig = herm_eig(&sys.hamiltonian[x], policy)?;
            if let Some(&l) = eig.eigenvalues.iter().find(|l| l.abs() < policy.gap_min) {
                return Err(Error::GapViolation { point: x, eigenvalue: l });
            }
            let (lo, hi) = select_family(&eig, sys.band_count, x, policy)?;
            let v = eig.columns(lo.start..hi.end);
            Ok(&v * v.adjoint())
        })
        .collect();
    out.into_iter().collect()
}

/// Projectors onto the `m` lowest bands of a Hamiltonian family, requiring a
/// gap of at least `gap_min` above them.
pub fn lower_band_projection(h: &HamiltonianField, m: usize, policy: &NumericPolicy) -> Result<Vec<CMatrix>> {
    Ok(lower_band_frames(h, m, policy)?.iter().map(|v| v * v.adjoint()).collect())
}

fn lower_band_frames(h: &HamiltonianField, m: usize, policy: &NumericPolicy) -> Result<Vec<CMatrix>> {
    if m == 0 || m >= h.dim_h {
        return Err(Error::DimensionMismatch(format!("{m} bands out of {}", h.dim_h)));
    }
    let out: Vec<Result<CMatrix>> = (0..h.grid.len())
        .into_par_iter()
        .map(|x| {
            let eig = herm_eig(&h.hamiltonian[x], policy)?;
            if eig.eigenvalues[m] - eig.eigenvalues[m - 1] < policy.gap_min {
                return Err(Error::GapViolation { point: x, eigenvalue: eig.eigenvalues[m - 1] });
            }
            Ok(eig.columns(0..m))
        })
        .collect();
    out.into_iter().collect()
}

/// The bundle of the `m` lowest bands with `φ ≡ 1`.
pub fn lower_band_bundle(h: &HamiltonianField, m: usize, policy: &NumericPolicy) -> Result<ChiralBundleData> {
    let frame = lower_band_frames(h, m, policy)?;
    let len = frame.len();
    Ok(ChiralBundleData::new(h.grid.clone(), frame, vec![identity(m); len])?.with_metadata("href", "none"))
}

/// Circle `|z − center| = radius` in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: f64,
    pub radius: f64,
}

/// A contour centred at zero enclosing exactly the family `Ω` at every point:
/// the radius is the geometric mean of the largest `|λ|` inside and the
/// smallest `|λ|` outside.
pub fn auto_contour(sys: &QuantumSystemField, policy: &NumericPolicy) -> Result<Contour> {
    let mut d_in = 0.0f64;
    let mut d_out = f64::INFINITY;
    for x in 0..sys.grid.len() {
        let eig = herm_eig(&sys.hamiltonian[x], policy)?;
        let (lo, hi) = select_family(&eig, sys.band_count, x, policy)?;
        for (i, l) in eig.eigenvalues.iter().enumerate() {
            if (lo.start..hi.end).contains(&i) {
                d_in = d_in.max(l.abs());
            } else {
                d_out = d_out.min(l.abs());
            }
        }
    }
    let radius = if d_out.is_finite() {
        if d_out <= d_in {
            return Err(Error::GapViolation { point: 0, eigenvalue: d_out });
        }
        (d_in * d_out).sqrt()
    } else {
        2.0 * d_in + 1.0
    };
    Ok(Contour { center: 0.0, radius })
}

/// Trapezoid-rule Riesz projector `P = (1/2πi)∮(z − H)⁻¹ dz` on a circle.
pub fn fermi_projection_riesz(
    sys: &QuantumSystemField,
    contour: Contour,
    nodes: usize,
    policy: &NumericPolicy,
) -> Result<Vec<CMatrix>> {
    if nodes < 4 || contour.radius <= 0.0 {
        return Err(Error::DimensionMismatch(format!("{nodes} nodes, radius {}", contour.radius)));
    }
    let n = sys.dim_h;
    let out: Vec<Result<(CMatrix, usize)>> = (0..sys.grid.len())
        .into_par_iter()
        .map(|x| {
            let h = &sys.hamiltonian[x];
            let eig = herm_eig(h, policy)?;
            for &l in &eig.eigenvalues {
                let distance = ((l - contour.center).abs() - contour.radius).abs();
                if distance < policy.gap_margin {
                    return Err(Error::ContourTouchesSpectrum { point: x, eigenvalue: l, distance });
                }
            }
            let mut p = CMatrix::zeros(n, n);
            for k in 0..nodes {
                let theta = 2.0 * PI * k as f64 / nodes as f64;
                let e = c(theta.cos(), theta.sin());
                let z = c(contour.center, 0.0) + e * contour.radius;
                let resolvent = (CMatrix::from_diagonal_element(n, n, z) - h)
                    .try_inverse()
                    .ok_or(Error::NearSingular { value: 0.0 })?;
                p += resolvent * e;
            }
            let p = p.scale(contour.radius / nodes as f64);
            let p = (&p + p.adjoint()).scale(0.5);
            let idem = max_abs(&(&p * &p - &p));
            if idem > policy.tol_proj {
                return Err(Error::InvalidBundle(format!(
                    "Riesz projector not idempotent at point {x} (residual {idem:.3e})"
                )));
            }
            let rank = p.trace().re.round() as usize;
            Ok((p, rank))
        })
        .collect();
    let mut projectors = Vec::with_capacity(out.len());
    let mut expected = None;
    for (x, r) in out.into_iter().enumerate() {
        let (p, rank) = r?;
        match expected {
            None => expected = Some(rank),
            Some(e) if e != rank => return Err(Error::RankDrift { point: x, expected: e, found: rank }),
            _ => {}
        }
        projectors.push(p);
    }
    Ok(projectors)
}

/// The split of `Ran P` by the gradation, per point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralSplitting {
    pub projector: Vec<CMatrix>,
    pub gamma: Vec<CMatrix>,
    pub rho: Vec<CMatrix>,
    pub pi_plus: Vec<CMatrix>,
    pub pi_minus: Vec<CMatrix>,
    /// `Ran P` written in per-point orthonormal frames.
    pub clifford: GradedCliffordData,
    /// Sweep-aligned frames of `E±` (frame coordinates) and `Θ` in them.
    pub frames: GradedFrames,
    /// Frames of the negative and positive halves of `Ω` (`N×m`).
    pub omega_minus: Vec<CMatrix>,
    pub omega_plus: Vec<CMatrix>,
}

impl ChiralSplitting {
    pub fn rank(&self) -> usize {
        self.frames.theta.first().map_or(0, |t| t.nrows())
    }

    /// Ambient frames (`N×m`) of `E₊` and `E₋`.
    pub fn ambient_frames(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let f = &self.clifford.frame;
        (
            f.iter().zip(&self.frames.plus).map(|(f, w)| f * w).collect(),
            f.iter().zip(&self.frames.minus).map(|(f, w)| f * w).collect(),
        )
    }

    /// Worst violation of the algebraic identities of the splitting.
    pub fn identity_residuals(&self) -> SplitResiduals {
        let mut r = SplitResiduals::default();
        for x in 0..self.projector.len() {
            let (p, g, rho) = (&self.projector[x], &self.gamma[x], &self.rho[x]);
            let (pp, pm) = (&self.pi_plus[x], &self.pi_minus[x]);
            r.sum = r.sum.max(max_abs(&(pp + pm - p)));
            r.idempotent = r
                .idempotent
                .max(max_abs(&(pp * pp - pp)))
                .max(max_abs(&(pm * pm - pm)))
                .max(max_abs(&(p * p - p)));
            r.orthogonal = r.orthogonal.max(max_abs(&(pp * pm))).max(max_abs(&(pm * pp)));
            r.gamma_square = r.gamma_square.max(max_abs(&(g * g - p)));
            r.rho_square = r.rho_square.max(max_abs(&(rho * rho - p)));
            r.anticommute = r.anticommute.max(max_abs(&(g * rho + rho * g)));
            r.exchange = r
                .exchange
                .max(max_abs(&(rho * pp * rho - pm)))
                .max(max_abs(&(rho * pm * rho - pp)));
            r.theta_unitary = r.theta_unitary.max(numkernel::isometry_residual(&self.frames.theta[x]));
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitResiduals {
    pub sum: f64,
    pub idempotent: f64,
    pub orthogonal: f64,
    pub gamma_square: f64,
    pub rho_square: f64,
    pub anticommute: f64,
    pub exchange: f64,
    pub theta_unitary: f64,
}

impl SplitResiduals {
    pub fn max(&self) -> f64 {
        [
            self.sum,
            self.idempotent,
            self.orthogonal,
            self.gamma_square,
            self.rho_square,
            self.anticommute,
            self.exchange,
            self.theta_unitary,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn flattened(eig: &HermitianEig) -> CMatrix {
    let signs = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| c(l.signum(), 0.0)),
    );
    &eig.eigenvectors * CMatrix::from_diagonal(&signs) * eig.eigenvectors.adjoint()
}

/// Split `Ran P` into the `±1` eigenbundles of `Γ = PχP`.
pub fn chiral_split(
    sys: &QuantumSystemField,
    projector: &[CMatrix],
    policy: &NumericPolicy,
) -> Result<ChiralSplitting> {
    if projector.len() != sys.grid.len() {
        return Err(Error::DimensionMismatch("projector field length".into()));
    }
    let m = sys.band_count;
    type PointSplit = (CMatrix, CMatrix, CMatrix, CMatrix, CMatrix, CMatrix);
    let per_point: Vec<Result<PointSplit>> = (0..sys.grid.len())
        .into_par_iter()
        .map(|x| {
            let p = &projector[x];
            let eig = herm_eig(&sys.hamiltonian[x], policy)?;
            let gamma = p * &sys.chi[x] * p;
            let trace = gamma.trace().re;
            if trace.abs() > 0.5 {
                return Err(Error::AsymmetricFamily { point: x, trace });
            }
            let rho = p * flattened(&eig) * p;
            let pe = herm_eig(p, policy)?;
            let n = pe.eigenvalues.len();
            let frame = pe.columns(n - 2 * m..n);
            let (lo, hi) = select_family(&eig, m, x, policy)?;
            Ok((gamma, rho, frame, eig.columns(lo), eig.columns(hi), p.clone()))
        })
        .collect();
    let mut s = ChiralSplitting {
        projector: Vec::new(),
        gamma: Vec::new(),
        rho: Vec::new(),
        pi_plus: Vec::new(),
        pi_minus: Vec::new(),
        clifford: GradedCliffordData { grid: sys.grid.clone(), frame: vec![], rho: vec![], gamma: vec![] },
        frames: GradedFrames { plus: vec![], minus: vec![], theta: vec![] },
        omega_minus: Vec::new(),
        omega_plus: Vec::new(),
    };
    for r in per_point {
        let (gamma, rho, frame, om, op, p) = r?;
        s.clifford.gamma.push(frame.adjoint() * &gamma * &frame);
        s.clifford.rho.push(frame.adjoint() * &rho * &frame);
        s.clifford.frame.push(frame);
        s.pi_plus.push((&p + &gamma).scale(0.5));
        s.pi_minus.push((&p - &gamma).scale(0.5));
        s.projector.push(p);
        s.gamma.push(gamma);
        s.rho.push(rho);
        s.omega_minus.push(om);
        s.omega_plus.push(op);
    }
    s.frames = graded_frames(&s.clifford, policy)?;
    Ok(s)
}

/// `(E₋, h_ref⁻¹Θ)`.
pub fn assemble_chiral_bundle(
    split: &ChiralSplitting,
    href: &HRef,
    policy: &NumericPolicy,
) -> Result<ChiralBundleData> {
    clifford_reconstruct(&split.clifford, href, policy)
}

/// Frames of `E±` built directly from the energy eigenvectors:
/// `(ψ₊ ± ψ₋)/√2` with `ψ₊ = χψ₋` for the negative half `ψ₋` of `Ω`.
pub fn chiral_basis_frames(sys: &QuantumSystemField, split: &ChiralSplitting) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..sys.grid.len())
        .map(|x| {
            let minus = &split.omega_minus[x];
            let plus = &sys.chi[x] * minus;
            ((&plus + minus).scale(s), (&plus - minus).scale(s))
        })
        .unzip()
}

/// The full pipeline with eigenprojectors: validate, project, split, assemble.
pub fn system_to_bundle(
    sys: &QuantumSystemField,
    href: &HRef,
    policy: &NumericPolicy,
) -> Result<ChiralBundleData> {
    validate_system(sys, policy)?;
    let p = fermi_projection_eig(sys, policy)?;
    let split = chiral_split(sys, &p, policy)?;
    assemble_chiral_bundle(&split, href, policy)
}

/// `c1` of the four bundles `E_{Ω₋}`, `E_{Ω₊}`, `E₊`, `E₋` on every 2-cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinBandReport {
    pub cycles: Vec<String>,
    pub omega_minus: Vec<i64>,
    pub omega_plus: Vec<i64>,
    pub chi_plus: Vec<i64>,
    pub chi_minus: Vec<i64>,
}

impl TwinBandReport {
    pub fn passed(&self) -> bool {
        self.omega_minus == self.omega_plus
            && self.omega_minus == self.chi_plus
            && self.omega_minus == self.chi_minus
    }
}

pub fn twin_band_check(
    sys: &QuantumSystemField,
    split: &ChiralSplitting,
    policy: &NumericPolicy,
) -> Result<TwinBandReport> {
    let grid = &sys.grid;
    if grid.dim() < 2 {
        return Err(Error::DegreeOutOfRange { degree: 2, dim: grid.dim() });
    }
    let m = split.rank();
    let (plus, minus) = split.ambient_frames();
    let bundle = |frames: Vec<CMatrix>| ChiralBundleData::new(grid.clone(), frames, vec![identity(m); grid.len()]);
    let bundles = [
        bundle(split.omega_minus.clone())?,
        bundle(split.omega_plus.clone())?,
        bundle(plus)?,
        bundle(minus)?,
    ];
    let cycles = enumerate_cycles(grid, 2)?;
    let mut lists: [Vec<i64>; 4] = Default::default();
    for (b, list) in bundles.iter().zip(lists.iter_mut()) {
        for cyc in &cycles {
            list.push(chern1(b, cyc, policy)?.value);
        }
    }
    let [omega_minus, omega_plus, chi_plus, chi_minus] = lists;
    Ok(TwinBandReport {
        cycles: cycles.iter().map(|c| c.label()).collect(),
        omega_minus,
        omega_plus,
        chi_plus,
        chi_minus,
    })
}

//! Independent oracles and shared helpers for the integration tests.
//!
//! Nothing here calls the invariant engines: degrees are counted on a
//! simplicial subdivision of the mesh and Berry fluxes come from spherical
//! solid angles.

#![allow(dead_code)]

use std::f64::consts::PI;

use chiraltop::basespace::{BaseGrid, SpaceKind};
use chiraltop::chiralbundle::{ChiralBundleData, GaugeField};
use chiraltop::modelzoo::{build, ModelSpec};
use chiraltop::numkernel::{c, polar_unitary, CMatrix};
use chiraltop::policy::NumericPolicy;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unitary(r: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    polar_unitary(&a, &NumericPolicy::default()).expect("random matrix is invertible")
}

/// Random gauge field, equal on points that the grid identifies.
pub fn random_gauge(r: &mut ChaCha8Rng, grid: &BaseGrid, m: usize) -> GaugeField {
    let raw: Vec<CMatrix> = (0..grid.len()).map(|_| random_unitary(r, m)).collect();
    let values = (0..grid.len()).map(|x| raw[grid.canonical(x)].clone()).collect();
    GaugeField { grid: grid.clone(), values }
}

/// All permutations of `0..d` with their parities.
fn permutations(d: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).filter(|i| !p.contains(i)).map(|i| [p.as_slice(), &[i]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    out.into_iter()
        .map(|p| {
            let inversions = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, if inversions % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect()
}

/// Brouwer degree of a map from a `d`-dimensional mesh to `S^d ⊂ R^{d+1}`.
///
/// Every cube is cut into `d!` Kuhn simplices; a simplex counts when the
/// cone over its image vertices contains the regular value `y0`, with the
/// sign of `det[f(v0), …, f(vd)]` times the parity of the simplex. The target
/// orientation is `det[x, ∂₁x, …, ∂_d x] > 0`.
///
/// `periodic` selects torus cells (wrapping) or cube cells.
pub fn kuhn_degree(shape: &[usize], periodic: bool, f: &dyn Fn(&[usize]) -> Vec<f64>, y0: &[f64]) -> i64 {
    let d = shape.len();
    assert_eq!(y0.len(), d + 1);
    let perms = permutations(d);
    let base: Vec<usize> = shape.iter().map(|&n| if periodic { n } else { n - 1 }).collect();
    let total: usize = base.iter().product();
    let y = nalgebra::DVector::from_column_slice(y0);
    let mut degree = 0.0f64;
    for flat in 0..total {
        let mut corner = vec![0; d];
        let mut rest = flat;
        for a in (0..d).rev() {
            corner[a] = rest % base[a];
            rest /= base[a];
        }
        for (perm, parity) in &perms {
            let mut v = corner.clone();
            let mut cols = Vec::with_capacity(d + 1);
            cols.push(f(&v));
            for &a in perm {
                v[a] = (v[a] + 1) % shape[a];
                cols.push(f(&v));
            }
            let m = DMatrix::from_fn(d + 1, d + 1, |i, j| cols[j][i]);
            let det = m.determinant();
            if det.abs() < 1e-14 {
                continue;
            }
            let Some(lambda) = m.clone().lu().solve(&y) else { continue };
            if lambda.iter().all(|&l| l > 0.0) {
                degree += parity * det.signum();
            }
        }
    }
    degree.round() as i64
}

/// A fixed generic unit vector in `R^n`.
pub fn regular_value(n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|i| 0.3 + 0.17 * (i as f64 + 1.0).sqrt() * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / r).collect()
}

/// `(a0, a1, a2, a3)` of `g = a0 + i(a·σ)`.
pub fn su2_to_quaternion(g: &CMatrix) -> Vec<f64> {
    vec![g[(0, 0)].re, g[(0, 1)].im, g[(0, 1)].re, g[(0, 0)].im]
}

/// Signed solid angle of the spherical triangle `(a, b, c)`.
pub fn solid_angle(a: &[f64], b: &[f64], cc: &[f64]) -> f64 {
    let dot = |u: &[f64], v: &[f64]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [b[1] * cc[2] - b[2] * cc[1], b[2] * cc[0] - b[0] * cc[2], b[0] * cc[1] - b[1] * cc[0]];
    let num = dot(a, &cross);
    let den = 1.0 + dot(a, b) + dot(b, cc) + dot(cc, a);
    2.0 * num.atan2(den)
}

/// First Chern number of the lower band of `n(t)·σ` over a 2-d mesh.
///
/// The lower band picks up minus half the solid angle swept by `n`, so the
/// plaquette flux sums to `−2π·deg n`.
pub fn berry_flux_chern(shape: &[usize], periodic: bool, n: &dyn Fn(&[usize]) -> Vec<f64>) -> f64 {
    let (nx, ny) = if periodic { (shape[0], shape[1]) } else { (shape[0] - 1, shape[1] - 1) };
    let mut total = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let (i1, j1) = ((i + 1) % shape[0], (j + 1) % shape[1]);
            let (a, b, cc, dd) = (n(&[i, j]), n(&[i1, j]), n(&[i1, j1]), n(&[i, j1]));
            total += solid_angle(&a, &b, &cc) + solid_angle(&a, &cc, &dd);
        }
    }
    -total / (4.0 * PI)
}

/// Cube coordinates of a multi-index on a sphere grid.
pub fn cube_t(grid: &BaseGrid, multi: &[usize]) -> Vec<f64> {
    assert_eq!(grid.kind(), SpaceKind::Sphere);
    grid.coordinates(grid.index(multi))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, m: usize, scale: f64) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    (&a + a.adjoint()).scale(0.5 * scale)
}

/// Rank-`m` bundle over `T²`: the frame is the block sum of QWZ lower bands
/// with the given masses (`N = 2m`), and `φ = U diag(e^{i n_j·k}) U†`.
pub fn synthetic_bundle(grid: &BaseGrid, masses: &[f64], windings: &[[i64; 2]], u: &CMatrix) -> ChiralBundleData {
    let m = masses.len();
    assert_eq!(windings.len(), m);
    let bands: Vec<ChiralBundleData> = masses
        .iter()
        .map(|&mass| build(&ModelSpec::new("qwz").param("M", mass), grid).unwrap().into_bundle().unwrap())
        .collect();
    let frame = (0..grid.len())
        .map(|x| {
            let mut f = CMatrix::zeros(2 * m, m);
            for (j, b) in bands.iter().enumerate() {
                f.view_mut((2 * j, j), (2, 1)).copy_from(b.frame_at(x));
            }
            f
        })
        .collect();
    let phi = (0..grid.len())
        .map(|x| {
            let k = grid.coordinates(x);
            let d = CMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    let t = windings[i][0] as f64 * k[0] + windings[i][1] as f64 * k[1];
                    c(t.cos(), t.sin())
                } else {
                    c(0.0, 0.0)
                }
            });
            u * d * u.adjoint()
        })
        .collect();
    ChiralBundleData::new(grid.clone(), frame, phi).unwrap()
}

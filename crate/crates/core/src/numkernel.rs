//! Dense complex linear algebra on small matrices.
//!
//! These are the primitives evaluated at every lattice point: hermitian
//! eigendecomposition, polar unitarization, principal unitary logarithm and the
//! determinant phase. All functions are pure; the heavy lifting is delegated to
//! `nalgebra` and this module adds admission checks, deterministic eigenvector
//! phases and explicit branch-cut errors on top.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Build a matrix from row-major `(re, im)` pairs.
pub fn from_rows(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&(r, i)| c(r, i)))
}

pub fn pauli() -> [CMatrix; 3] {
    [
        from_rows(2, 2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]),
        from_rows(2, 2, &[(0., 0.), (0., -1.), (0., 1.), (0., 0.)]),
        from_rows(2, 2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]),
    ]
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max |A†A − 1|`, i.e. how far the columns of `a` are from orthonormal.
pub fn isometry_residual(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    max_abs(&(g - identity(a.ncols())))
}

pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// Columns `range` of the eigenvector matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> CMatrix {
        self.eigenvectors.columns(range.start, range.len()).into_owned()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| c(l, 0.0)),
        ));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

/// Rotate each column so that its first significant component is real and
/// positive.
pub fn fix_column_phases(v: &mut CMatrix) {
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            continue;
        }
        if let Some(pivot) = col.iter().find(|z| z.norm() > 1e-6 * norm).copied() {
            let phase = pivot.conj() / pivot.norm();
            col *= phase;
        }
    }
}

/// Eigendecomposition of a hermitian matrix with ascending eigenvalues and
/// deterministic eigenvector phases.
pub fn herm_eig(a: &CMatrix, policy: &NumericPolicy) -> Result<HermitianEig> {
    let n = check_square(a)?;
    check_finite(a)?;
    let scale = max_abs(a).max(1.0);
    let residual = hermiticity_residual(a);
    if residual > policy.tol_herm * scale {
        return Err(Error::NonHermitian { residual });
    }
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: vec![], eigenvectors: CMatrix::zeros(0, 0) });
    }
    // the solver is run on a unit-scale copy; tiny mixed-magnitude entries
    // can otherwise drive its rotations to NaN
    let norm = max_abs(a);
    let unit = if norm > 0.0 { norm } else { 1.0 };
    let sym = (a + a.adjoint()).scale(0.5 / unit);
    let solve = |m: CMatrix| nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 10_000).ok_or(Error::NoConvergence);
    let mut eig = solve(sym.clone())?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        let flushed = sym.map(|z| if z.norm() < f64::EPSILON * f64::EPSILON { c(0.0, 0.0) } else { z });
        eig = solve(flushed)?;
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    eig.eigenvalues *= unit;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    fix_column_phases(&mut eigenvectors);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// Unitary factor of the polar decomposition `A = U·P`.
///
/// Also accepts tall matrices, in which case the result is the closest
/// isometry (orthonormal columns).
pub fn polar_unitary(a: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
    if a.nrows() < a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    check_finite(a)?;
    if a.ncols() == 1 {
        let n = a.norm();
        if n < policy.sigma_min {
            return Err(Error::NearSingular { value: n });
        }
        return Ok(a.unscale(n));
    }
    let svd = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence)?;
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smin < policy.sigma_min {
        return Err(Error::NearSingular { value: smin });
    }
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    Ok(u * v_t)
}

/// Smallest singular value.
pub fn sigma_min(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if a.ncols() == 1 {
        return a.norm();
    }
    a.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Principal logarithm of a unitary matrix: anti-hermitian `L` with
/// `exp(L) = U` and eigenphases in `(−π, π)`.
pub fn unitary_log(u: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
    let n = check_square(u)?;
    check_finite(u)?;
    let res = isometry_residual(u);
    if res > policy.tol_unitary.max(1e-8) * 10.0 {
        return Err(Error::InvalidBundle(format!("unitary_log input not unitary (residual {res:.3e})")));
    }
    let limit = PI - policy.angle_margin;
    if n == 1 {
        let theta = u[(0, 0)].arg();
        if theta.abs() > limit {
            return Err(Error::BranchCut { phase: theta });
        }
        return Ok(CMatrix::from_element(1, 1, c(0.0, theta)));
    }
    // Cayley transform: K = i(1 − U)(1 + U)⁻¹ is hermitian with eigenvalues
    // tan(θ/2), so degenerate eigenphases are handled by the hermitian solver.
    let eye = identity(n);
    let inv = (&eye + u).try_inverse().ok_or(Error::BranchCut { phase: PI })?;
    let k = ((&eye - u) * inv).map(|z| z * I);
    let k = (&k + k.adjoint()).scale(0.5);
    // an eigenphase at exactly π overflows the inverse
    check_finite(&k).map_err(|_| Error::BranchCut { phase: PI })?;
    let eig = herm_eig(&k, policy)?;
    let mut d = CMatrix::zeros(n, n);
    for (j, &t) in eig.eigenvalues.iter().enumerate() {
        let theta = 2.0 * t.atan();
        if !(theta.abs() <= limit) {
            return Err(Error::BranchCut { phase: theta });
        }
        d[(j, j)] = c(0.0, theta);
    }
    let l = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    Ok((&l - l.adjoint()).scale(0.5))
}

/// `exp(L)` for anti-hermitian `L`, computed through the hermitian
/// eigendecomposition of `−iL`.
pub fn exp_antihermitian(l: &CMatrix, policy: &NumericPolicy) -> Result<CMatrix> {
    let k = l.map(|z| z * c(0.0, -1.0));
    let k = (&k + k.adjoint()).scale(0.5);
    let eig = herm_eig(&k, policy)?;
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&x| c(x.cos(), x.sin())),
    ));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// `det(A)/|det(A)|`.
pub fn det_phase(a: &CMatrix, policy: &NumericPolicy) -> Result<Complex64> {
    check_square(a)?;
    check_finite(a)?;
    let det = if a.nrows() == 1 { a[(0, 0)] } else { a.determinant() };
    let modulus = det.norm();
    if modulus < policy.det_min {
        return Err(Error::NearSingular { value: modulus });
    }
    Ok(det / modulus)
}

/// Principal argument of `z` in `(−π, π]`.
pub fn arg(z: Complex64) -> f64 {
    z.im.atan2(z.re)
}

/// Fixed-order pairwise summation; bit-stable for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `Σ_σ sign(σ) Tr[M_σ(0) ⋯ M_σ(k−1)]` over all permutations of the inputs.
///
/// For odd `k` a cyclic shift is an even permutation, so the sum is `k` times
/// the sum over permutations fixing the first slot.
pub fn epsilon_trace(mats: &[CMatrix]) -> Complex64 {
    let k = mats.len();
    if k == 0 {
        return c(1.0, 0.0);
    }
    let mut total = c(0.0, 0.0);
    if k % 2 == 1 {
        let rest: Vec<usize> = (1..k).collect();
        for_each_permutation(&rest, |perm, sign| {
            let mut prod = mats[0].clone();
            for &j in perm {
                prod *= &mats[j];
            }
            total += prod.trace() * sign as f64;
        });
        total * k as f64
    } else {
        let all: Vec<usize> = (0..k).collect();
        for_each_permutation(&all, |perm, sign| {
            let mut prod = mats[perm[0]].clone();
            for &j in &perm[1..] {
                prod *= &mats[j];
            }
            total += prod.trace() * sign as f64;
        });
        total
    }
}

/// Calls `f(permutation, sign)` for every permutation of `items`.
pub fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize], i32)) {
    fn rec(
        prefix: &mut Vec<usize>,
        rest: &mut Vec<usize>,
        sign: i32,
        f: &mut dyn FnMut(&[usize], i32),
    ) {
        if rest.is_empty() {
            f(prefix, sign);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            // moving element i of `rest` to the front costs i transpositions
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, f);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut prefix = Vec::with_capacity(items.len());
    let mut rest = items.to_vec();
    rec(&mut prefix, &mut rest, 1, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    pub(crate) fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn tiny_mixed_magnitude_hermitian_stays_finite() {
        let (a, b) = (1.3877787807814463e-17, 4.276423536147513e-50);
        let mut k = CMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 1, -a), (0, 2, -b), (0, 3, a), (1, 2, a), (1, 3, -2.0 * b), (2, 3, a)] {
            k[(i, j)] = c(0.0, v);
            k[(j, i)] = c(0.0, -v);
        }
        let eig = herm_eig(&k, &pol()).unwrap();
        assert!(eig.eigenvalues.iter().all(|v| v.is_finite() && v.abs() < 1e-16));
        let u = exp_antihermitian(&k.map(|z| z * I), &pol()).unwrap();
        assert!(max_abs(&unitary_log(&u, &pol()).unwrap()) < 1e-16);
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let a = random_matrix(rng, n);
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn eig_of_diagonal_swaps_columns() {
        let a = from_rows(2, 2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]);
        let e = herm_eig(&a, &pol()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
        let expected = from_rows(2, 2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]);
        assert!(max_abs(&(e.eigenvectors - expected)) < 1e-14);
    }

    #[test]
    fn eig_of_sigma_x() {
        let e = herm_eig(&pauli()[0], &pol()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        let expected = from_rows(2, 2, &[(s, 0.), (s, 0.), (-s, 0.), (s, 0.)]);
        assert!(max_abs(&(e.eigenvectors - expected)) < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_hermitian(&mut rng, 8);
            let e = herm_eig(&a, &pol()).unwrap();
            assert!(max_abs(&(e.reconstruct() - &a)) < 1e-10);
            assert!(isometry_residual(&e.eigenvectors) < 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for j in 0..8 {
                let v = e.eigenvectors.column(j);
                let r = &a * v - v * c(e.eigenvalues[j], 0.0);
                assert!(r.norm() <= 1e-10 * a.norm());
            }
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(&mut rng, 6);
        let e1 = herm_eig(&a, &pol()).unwrap();
        let e2 = herm_eig(&a, &pol()).unwrap();
        assert_eq!(e1.eigenvectors, e2.eigenvectors);
        for col in e1.eigenvectors.column_iter() {
            let pivot = col.iter().find(|z| z.norm() > 1e-6).unwrap();
            assert!(pivot.im.abs() < 1e-14 && pivot.re > 0.0);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = from_rows(2, 2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        assert!(matches!(herm_eig(&a, &pol()), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn polar_basic_cases() {
        let p = pol();
        let two = identity(3).scale(2.0);
        assert!(max_abs(&(polar_unitary(&two, &p).unwrap() - identity(3))) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = {
            let a = random_matrix(&mut rng, 3);
            (&a - a.adjoint()).scale(0.5)
        };
        let u = exp_antihermitian(&l, &p).unwrap();
        assert!(max_abs(&(polar_unitary(&u, &p).unwrap() - &u)) < 1e-12);
        let z = CMatrix::zeros(2, 2);
        assert!(matches!(polar_unitary(&z, &p), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn polar_is_the_nearest_unitary() {
        // oracle: the polar factor beats random unitaries in Frobenius distance
        let p = pol();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 4) + identity(4).scale(2.0);
            let u = polar_unitary(&a, &p).unwrap();
            assert!(isometry_residual(&u) < 1e-10);
            // idempotent on its image
            assert!(max_abs(&(polar_unitary(&u, &p).unwrap() - &u)) < 1e-12);
            let best = (&a - &u).norm();
            for _ in 0..50 {
                let l = random_matrix(&mut rng, 4).scale(0.3);
                let l = (&l - l.adjoint()).scale(0.5);
                let w = &u * exp_antihermitian(&l, &p).unwrap();
                assert!((&a - w).norm() >= best - 1e-12);
            }
        }
    }

    #[test]
    fn log_basic_cases() {
        let p = pol();
        assert!(max_abs(&unitary_log(&identity(3), &p).unwrap()) < 1e-14);
        let u = CMatrix::from_element(1, 1, c(0.3f64.cos(), 0.3f64.sin()));
        let l = unitary_log(&u, &p).unwrap();
        assert!((l[(0, 0)] - c(0.0, 0.3)).norm() < 1e-15);
        let minus = identity(2).scale(-1.0);
        assert!(matches!(unitary_log(&minus, &p), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn log_inverts_exp() {
        let p = pol();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 3, 4] {
            for _ in 0..20 {
                let a = random_matrix(&mut rng, n);
                let l0 = (&a - a.adjoint()).scale(0.5);
                let radius = {
                    let k = l0.map(|z| z * c(0.0, -1.0));
                    let e = herm_eig(&((&k + k.adjoint()).scale(0.5)), &p).unwrap();
                    e.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
                };
                let l0 = l0.scale((PI - 0.1) / radius * rng.gen_range(0.1..1.0));
                let u = exp_antihermitian(&l0, &p).unwrap();
                let l = unitary_log(&u, &p).unwrap();
                assert!(max_abs(&(&l - &l0)) < 1e-9, "n={n}");
                assert!(max_abs(&(&l + l.adjoint())) < 1e-12);
            }
        }
    }

    #[test]
    fn det_phase_cases() {
        let p = pol();
        assert!((det_phase(&identity(3), &p).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let (a, b) = (0.4f64, -1.3f64);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(a.cos(), a.sin()),
            c(b.cos(), b.sin()),
        ]));
        assert!((det_phase(&d, &p).unwrap() - c((a + b).cos(), (a + b).sin())).norm() < 1e-14);
        assert!(matches!(det_phase(&CMatrix::zeros(2, 2), &p), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn det_phase_matches_eigenphase_product() {
        let p = pol();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 4);
            let u = exp_antihermitian(&(&a - a.adjoint()).scale(0.5), &p).unwrap();
            let eigs = u.clone().schur().eigenvalues().unwrap();
            let prod = eigs.iter().fold(c(1.0, 0.0), |acc, z| acc * z);
            let d = det_phase(&u, &p).unwrap();
            assert!((d.norm() - 1.0).abs() < 1e-12);
            assert!((d - prod).norm() < 1e-10);
        }
    }

    #[test]
    fn epsilon_trace_of_pauli_generators() {
        // Σ ε_abc Tr[(iσ_a)(iσ_b)(iσ_c)] = 12
        let g: Vec<CMatrix> = pauli().iter().map(|s| s * I).collect();
        let v = epsilon_trace(&g);
        assert!((v - c(12.0, 0.0)).norm() < 1e-12);
        // brute force agrees with the cyclic shortcut
        let mut brute = c(0.0, 0.0);
        for_each_permutation(&[0, 1, 2], |p, s| {
            brute += (&g[p[0]] * &g[p[1]] * &g[p[2]]).trace() * s as f64;
        });
        assert!((brute - v).norm() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        let mut seen = Vec::new();
        for_each_permutation(&[0, 1, 2], |p, s| seen.push((p.to_vec(), s)));
        assert_eq!(seen.len(), 6);
        assert!(seen.contains(&(vec![0, 1, 2], 1)));
        assert!(seen.contains(&(vec![1, 0, 2], -1)));
        assert!(seen.contains(&(vec![1, 2, 0], 1)));
        assert!(seen.contains(&(vec![2, 1, 0], -1)));
    }

    #[test]
    fn pairwise_sum_is_order_stable() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v));
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-10);
    }
}

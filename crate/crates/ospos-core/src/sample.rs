//! Deterministic random constructions: every generator takes the caller's RNG
//! so seeded runs reproduce byte-for-byte. Used by the test suites and by the
//! randomized witness search.

use nalgebra::Complex;
use rand::Rng;

use crate::hilbert::{CMatrix, CVector, Operator, Subspace};
use crate::markov::ProjectionTriple;
use crate::reflection::Reflection;
use crate::scalar::{cx, real, Scalar};

/// Standard complex Gaussian entry via Box-Muller, `E|z|^2 = 1`.
pub fn gaussian<F: Scalar, R: Rng>(rng: &mut R) -> Complex<F> {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt() / std::f64::consts::SQRT_2;
    let phi = 2.0 * std::f64::consts::PI * u2;
    Complex::new(real(r * phi.cos()), real(r * phi.sin()))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix<F: Scalar, R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<F> {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Unit vector drawn from the rotation-invariant distribution.
pub fn unit_vector<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> CVector<F> {
    loop {
        let v: CVector<F> = CVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > real(1e-6) {
            return v / cx(norm);
        }
    }
}

/// Haar-distributed unitary via QR of a Gaussian matrix with the phase
/// convention that makes R's diagonal positive.
pub fn unitary<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> CMatrix<F> {
    let g = gaussian_matrix::<F, R>(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = (d.re * d.re + d.im * d.im).sqrt();
        if norm > F::zero() {
            let phase = d / cx(norm);
            let col = q.column(j) * phase;
            q.set_column(j, &col);
        }
    }
    q
}

/// Random `k`-dimensional subspace of `C^n`.
pub fn subspace<F: Scalar, R: Rng>(rng: &mut R, n: usize, k: usize) -> Subspace<F> {
    let u = unitary::<F, R>(rng, n);
    Subspace::from_orthonormal_frame(u.view((0, 0), (n, k)).into_owned(), real(1e-8))
        .expect("unitary columns are orthonormal")
}

/// Random Hermitian matrix with spectrum of order 1.
pub fn hermitian<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> CMatrix<F> {
    let g = gaussian_matrix::<F, R>(rng, n, n);
    (&g + g.adjoint()) * cx(real::<F>(0.5))
}

/// Random skew-adjoint matrix, `A* = -A`.
pub fn skew_adjoint<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> CMatrix<F> {
    let g = gaussian_matrix::<F, R>(rng, n, n);
    (&g - g.adjoint()) * cx(real::<F>(0.5))
}

/// Random Hermitian involution (`V* = V`, `V^2 = I`) with the given number of
/// `-1` eigenvalues chosen at random.
pub fn hermitian_involution<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> CMatrix<F> {
    let q = unitary::<F, R>(rng, n);
    let signs = CVector::from_fn(n, |_, _| {
        if rng.random::<bool>() {
            cx(F::one())
        } else {
            cx(-F::one())
        }
    });
    &q * CMatrix::from_diagonal(&signs) * q.adjoint()
}

/// Random contraction of shape `rows x cols` with operator norm at most
/// `norm_cap` (and generically close to it).
pub fn contraction<F: Scalar, R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    norm_cap: F,
) -> CMatrix<F> {
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, cols);
    }
    let g = gaussian_matrix::<F, R>(rng, rows, cols);
    let top = crate::hilbert::spectral_norm(&g);
    if top == F::zero() {
        return g;
    }
    let target = norm_cap * real::<F>(rng.random::<f64>());
    g * cx(target / top)
}

/// A reflection together with an OS-positive subspace: the graph of a random
/// strict contraction over a random fixed space, conjugated by a random
/// unitary so nothing is axis-aligned. Returns the rotation and the block
/// contraction as well for cross-checks.
pub struct OsInstance<F: Scalar> {
    pub theta: Reflection<F>,
    pub h_plus: Subspace<F>,
    /// Contraction block in the rotated frame: maps fixed-space coordinates
    /// to reflected-space coordinates.
    pub c: CMatrix<F>,
    /// Unitary carrying block coordinates to ambient coordinates.
    pub rotation: CMatrix<F>,
}

/// Draws an OS-positive instance on `C^(n1+n2)` with `dim P = n1`.
pub fn os_instance<F: Scalar, R: Rng>(rng: &mut R, n1: usize, n2: usize) -> OsInstance<F> {
    os_instance_with_cap(rng, n1, n2, real(0.95))
}

/// Same as [`os_instance`] with an explicit cap on `|C|`.
pub fn os_instance_with_cap<F: Scalar, R: Rng>(
    rng: &mut R,
    n1: usize,
    n2: usize,
    norm_cap: F,
) -> OsInstance<F> {
    let n = n1 + n2;
    let rotation = unitary::<F, R>(rng, n);
    let c = contraction(rng, n2, n1, norm_cap);
    let fixed = Subspace::from_orthonormal_frame(
        rotation.view((0, 0), (n, n1)).into_owned(),
        real(1e-8),
    )
    .expect("unitary columns are orthonormal");
    let theta = Reflection::from_fixed_space(fixed);
    // Graph columns [x; Cx] in block coordinates, carried to ambient ones.
    let mut graph = CMatrix::<F>::zeros(n, n1);
    for j in 0..n1 {
        let mut col = CVector::<F>::zeros(n);
        col[j] = cx(F::one());
        for i in 0..n2 {
            col[n1 + i] = c[(i, j)];
        }
        graph.set_column(j, &col);
    }
    let h_plus = Subspace::from_spanning(&(&rotation * graph), real(1e-12));
    OsInstance {
        theta,
        h_plus,
        c,
        rotation,
    }
}

/// Unitary satisfying `theta U theta = U*` and `U H+ = H+` for the instance:
/// block-diagonal `V (+) W` built from the contraction's singular frames with
/// random sign choices, so `W C = C V`. Hermitian involution by construction.
pub fn conforming_unitary<F: Scalar, R: Rng>(rng: &mut R, inst: &OsInstance<F>) -> Operator<F> {
    let (n2, n1) = (inst.c.nrows(), inst.c.ncols());
    // Right singular frame from the Hermitian eigenproblem of C* C; the left
    // frame follows as normalized images. Small eigenvalues mark the kernel.
    let gram = inst.c.adjoint() * &inst.c;
    let (values, y_full) = crate::hilbert::hermitian_eigen_desc(&gram);
    let lmax = values.first().copied().unwrap_or(F::zero()).max(F::zero());
    let rank = (0..values.len())
        .filter(|&i| values[i] > lmax * real(1e-12))
        .count();
    let mut v = CMatrix::<F>::zeros(n1, n1);
    let mut w = CMatrix::<F>::zeros(n2, n2);
    let mut x_cols = CMatrix::<F>::zeros(n2, rank);
    for k in 0..rank {
        let s = if rng.random::<bool>() {
            cx(F::one())
        } else {
            cx(-F::one())
        };
        let yk = y_full.column(k).into_owned();
        let xk = (&inst.c * &yk) / cx(values[k].sqrt());
        v += (&yk * yk.adjoint()) * s;
        w += (&xk * xk.adjoint()) * s;
        x_cols.set_column(k, &xk);
    }
    // Involutions genuinely supported on ker C and on the complement of
    // ran C keep the blocks unitary.
    if n1 > rank {
        let kdim = n1 - rank;
        let kbasis = y_full.view((0, rank), (n1, kdim)).into_owned();
        let j = hermitian_involution::<F, R>(rng, kdim);
        v += &kbasis * j * kbasis.adjoint();
    }
    if n2 > rank {
        let resid = CMatrix::<F>::identity(n2, n2) - &x_cols * x_cols.adjoint();
        let lbasis = crate::hilbert::range_frame(&resid, real(0.5));
        let j = hermitian_involution::<F, R>(rng, lbasis.ncols());
        w += &lbasis * j * lbasis.adjoint();
    }
    let n = n1 + n2;
    let mut block = CMatrix::<F>::zeros(n, n);
    block.view_mut((0, 0), (n1, n1)).copy_from(&v);
    block.view_mut((n1, n1), (n2, n2)).copy_from(&w);
    let ambient = &inst.rotation * block * inst.rotation.adjoint();
    Operator::new(ambient).expect("square by construction")
}

/// A Markov triple together with a reflection adapted to it.
pub struct MarkovInstance<F: Scalar> {
    pub triple: ProjectionTriple<F>,
    pub theta: Reflection<F>,
}

/// Random Markov triple with an adapted reflection, in general position.
///
/// In a rotated coordinate frame the center spans the first `n0` axes, the
/// sides extend it by disjoint blocks of `p` axes each, and the reflection
/// fixes the center, exchanges the side blocks pairwise, and acts by random
/// signs on the leftover axes. Coordinate projections commute, which gives
/// the Markov property; the rotation hides the alignment.
pub fn markov_instance<F: Scalar, R: Rng>(rng: &mut R, n: usize) -> MarkovInstance<F> {
    let n0 = rng.random_range(0..=n);
    let p = rng.random_range(0..=(n - n0) / 2);
    let q = unitary::<F, R>(rng, n);
    let col = |i: usize| q.column(i).into_owned();
    let center_frame = q.view((0, 0), (n, n0)).into_owned();
    let mut plus_frame = CMatrix::<F>::zeros(n, n0 + p);
    let mut minus_frame = CMatrix::<F>::zeros(n, n0 + p);
    plus_frame.view_mut((0, 0), (n, n0)).copy_from(&center_frame);
    minus_frame.view_mut((0, 0), (n, n0)).copy_from(&center_frame);
    for j in 0..p {
        plus_frame.set_column(n0 + j, &col(n0 + j));
        minus_frame.set_column(n0 + j, &col(n0 + p + j));
    }
    // Fixed space of the reflection: the center, the symmetric combination
    // of each exchanged pair, and the leftover axes drawing sign +1.
    let mut fixed_cols: Vec<CVector<F>> = Vec::new();
    for i in 0..n0 {
        fixed_cols.push(col(i));
    }
    let half = cx(real::<F>(std::f64::consts::FRAC_1_SQRT_2));
    for j in 0..p {
        fixed_cols.push((col(n0 + j) + col(n0 + p + j)) * half);
    }
    for i in (n0 + 2 * p)..n {
        if rng.random::<bool>() {
            fixed_cols.push(col(i));
        }
    }
    let mut fixed_frame = CMatrix::<F>::zeros(n, fixed_cols.len());
    for (j, v) in fixed_cols.iter().enumerate() {
        fixed_frame.set_column(j, v);
    }
    let tol = real::<F>(1e-9);
    let triple = ProjectionTriple::new(
        Subspace::from_orthonormal_frame(center_frame, tol).expect("orthonormal by construction"),
        Subspace::from_orthonormal_frame(plus_frame, tol).expect("orthonormal by construction"),
        Subspace::from_orthonormal_frame(minus_frame, tol).expect("orthonormal by construction"),
    )
    .expect("common ambient dimension by construction");
    let theta = Reflection::from_fixed_space(
        Subspace::from_orthonormal_frame(fixed_frame, tol).expect("orthonormal by construction"),
    );
    MarkovInstance { triple, theta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = unitary::<f64, _>(&mut rng, 6);
        let id = CMatrix::<f64>::identity(6, 6);
        assert!((u.adjoint() * &u - id).norm() < 1e-12);
    }

    #[test]
    fn contraction_respects_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let c = contraction::<f64, _>(&mut rng, 4, 3, 0.9);
            assert!(crate::hilbert::spectral_norm(&c) <= 0.9 + 1e-12);
        }
    }

    #[test]
    fn os_instance_is_os_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let inst = os_instance::<f64, _>(&mut rng, 3, 2);
            let f = inst.h_plus.frame();
            let compressed = f.adjoint() * inst.theta.matrix() * f;
            let report = crate::hilbert::psd_check(&compressed, 1e-10).unwrap();
            assert!(report.passed, "min eig {}", report.min_eigenvalue);
        }
    }

    #[test]
    fn conforming_unitary_satisfies_premises() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let inst = os_instance::<f64, _>(&mut rng, 3, 2);
            let u = conforming_unitary(&mut rng, &inst);
            let um = u.matrix();
            let n = um.nrows();
            let id = CMatrix::<f64>::identity(n, n);
            assert!((um.adjoint() * um - &id).norm() < 1e-9, "not unitary");
            let theta = inst.theta.matrix();
            assert!((&theta * um * &theta - um.adjoint()).norm() < 1e-9, "rp2 fails");
            // Strict invariance: U H+ stays inside H+.
            let moved = um * inst.h_plus.frame();
            let proj = inst.h_plus.projector();
            assert!(((&proj * &moved) - &moved).norm() < 1e-9, "H+ not invariant");
        }
    }
}

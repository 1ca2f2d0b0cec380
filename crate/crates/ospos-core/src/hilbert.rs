//! Finite-dimensional Hilbert space substrate: operators, subspaces with
//! orthonormal frames, positivity reports, projection order, meets, and
//! alternating-projection limits.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cx, real, Scalar, Tolerances};

pub type CMatrix<F> = DMatrix<Complex<F>>;
pub type CVector<F> = DVector<Complex<F>>;

/// Embeds a real matrix into the complex matrices entrywise.
pub fn to_complex<F: Scalar>(m: &DMatrix<F>) -> CMatrix<F> {
    m.map(|x| Complex::new(x, F::zero()))
}

/// Square complex matrix acting on the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<F: Scalar> {
    mat: CMatrix<F>,
}

impl<F: Scalar> Operator<F> {
    /// Wraps a square matrix with finite entries.
    pub fn new(mat: CMatrix<F>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "operator matrix must be square".into(),
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::PreconditionFailed(
                "operator entries must be finite".into(),
            ));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<F> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<F> {
        self.mat
    }

    pub fn apply(&self, v: &CVector<F>) -> CVector<F> {
        &self.mat * v
    }

    /// Frobenius distance to the adjoint; zero for selfadjoint operators.
    pub fn hermitian_residual(&self) -> F {
        (&self.mat - self.mat.adjoint()).norm()
    }
}

/// Subspace of the ambient space, stored as an orthonormal frame whose
/// columns span it. The zero subspace has a frame with zero columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<F: Scalar> {
    frame: CMatrix<F>,
}

impl<F: Scalar> Subspace<F> {
    /// Builds a subspace from a matrix whose columns already form an
    /// orthonormal frame; rejects frames that fail `F*F = I` within `tol`.
    pub fn from_orthonormal_frame(frame: CMatrix<F>, tol: F) -> Result<Self> {
        let k = frame.ncols();
        let gram = frame.adjoint() * &frame;
        let residual = (&gram - CMatrix::<F>::identity(k, k)).norm();
        if residual > tol {
            return Err(Error::PreconditionFailed(format!(
                "frame columns are not orthonormal: |F*F - I| = {:.3e} exceeds {:.3e}",
                residual.to_subset().unwrap_or(f64::NAN),
                tol.to_subset().unwrap_or(f64::NAN),
            )));
        }
        Ok(Self { frame })
    }

    /// Builds the span of arbitrary columns, orthonormalizing by
    /// column-pivoted QR and dropping pivots whose R-diagonal falls below
    /// `rank_svd` times the leading one.
    pub fn from_spanning(columns: &CMatrix<F>, rank_svd: F) -> Self {
        let n = columns.nrows();
        if columns.ncols() == 0 || columns.norm() == F::zero() {
            return Self::zero(n);
        }
        Self {
            frame: range_frame(columns, rank_svd),
        }
    }

    /// Span of a single vector; the zero vector yields the zero subspace.
    pub fn from_vector(v: &CVector<F>, rank_svd: F) -> Self {
        let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
        Self::from_spanning(&m, rank_svd)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            frame: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            frame: CMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix<F> {
        &self.frame
    }

    /// Orthogonal projection onto the subspace, `F F*`.
    pub fn projector(&self) -> CMatrix<F> {
        &self.frame * self.frame.adjoint()
    }

    /// Projection of `v` onto the subspace.
    pub fn project(&self, v: &CVector<F>) -> CVector<F> {
        &self.frame * (self.frame.adjoint() * v)
    }

    /// Whether `v` lies in the subspace within `tol` (relative to `|v|`).
    pub fn contains(&self, v: &CVector<F>, tol: F) -> bool {
        let nv = v.norm();
        if nv == F::zero() {
            return true;
        }
        (v - self.project(v)).norm() <= tol * nv
    }

    /// Orthogonal complement within the ambient space.
    pub fn complement(&self, rank_svd: F) -> Self {
        let n = self.ambient_dim();
        let resid = CMatrix::<F>::identity(n, n) - self.projector();
        Self::from_spanning(&resid, rank_svd)
    }

    /// Frobenius distance between the two projectors; zero iff the spans
    /// coincide.
    pub fn distance(&self, other: &Self) -> F {
        (self.projector() - other.projector()).norm()
    }
}

/// Outcome of a positive-semidefiniteness check of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct PsdReport<F: Scalar> {
    pub min_eigenvalue: F,
    pub passed: bool,
    pub tol: F,
    /// Unit vector achieving the minimum eigenvalue when the check fails.
    pub witness: Option<CVector<F>>,
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. The input is symmetrized first; callers check the
/// Hermitian residual separately when it is a contract violation.
pub fn hermitian_eigen_desc<F: Scalar>(m: &CMatrix<F>) -> (Vec<F>, CMatrix<F>) {
    let sym = (m + m.adjoint()) * cx(real::<F>(0.5));
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let values: Vec<F> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::<F>::zeros(m.nrows(), m.ncols());
    for (j, &i) in idx.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Complex modulus without a `Float` bound on the scalar.
pub(crate) fn cmod<F: Scalar>(z: Complex<F>) -> F {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Largest singular value, computed as the root of the top eigenvalue of the
/// Gram matrix on the smaller side. The complex SVD miscomputes
/// rank-deficient factorizations, so norms and ranks here avoid it.
pub fn spectral_norm<F: Scalar>(m: &CMatrix<F>) -> F {
    if m.nrows() == 0 || m.ncols() == 0 {
        return F::zero();
    }
    let gram = if m.ncols() <= m.nrows() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    gram.symmetric_eigen().eigenvalues.max().max(F::zero()).sqrt()
}

/// Orthonormal basis of the numerical column span via column-pivoted QR:
/// keeps leading pivots until the R-diagonal drops below `rel_cutoff` times
/// the first one.
pub fn range_frame<F: Scalar>(m: &CMatrix<F>, rel_cutoff: F) -> CMatrix<F> {
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let (q, r, _) = m.clone().col_piv_qr().unpack();
    let lead = cmod(r[(0, 0)]);
    if lead == F::zero() {
        return CMatrix::zeros(n, 0);
    }
    let cutoff = lead * rel_cutoff;
    let mut rank = 0;
    while rank < r.nrows().min(r.ncols()) && cmod(r[(rank, rank)]) > cutoff {
        rank += 1;
    }
    q.view((0, 0), (n, rank)).into_owned()
}

/// Orthonormal basis of the numerical nullspace through the Hermitian
/// eigenproblem of `m* m`: directions whose quadratic form stays below
/// `rel_cutoff` times the top eigenvalue. The squaring limits resolution to
/// singular values around the square root of `rel_cutoff` times the largest;
/// callers pick cutoffs with that in mind.
pub fn nullspace_frame<F: Scalar>(m: &CMatrix<F>, rel_cutoff: F) -> CMatrix<F> {
    let k = m.ncols();
    if k == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMatrix::identity(k, k);
    }
    let gram = m.adjoint() * m;
    let (values, vectors) = hermitian_eigen_desc(&gram);
    let cutoff = values[0].max(F::zero()) * rel_cutoff;
    let null_idx: Vec<usize> = (0..k).filter(|&i| values[i] <= cutoff).collect();
    let mut cols = CMatrix::<F>::zeros(k, null_idx.len());
    for (j, &i) in null_idx.iter().enumerate() {
        cols.set_column(j, &vectors.column(i));
    }
    cols
}

/// Moore-Penrose solve `g x = rhs` for Hermitian positive semidefinite `g`,
/// inverting only eigenvalues above `rel_floor` times the largest.
pub fn hermitian_pinv_times<F: Scalar>(
    g: &CMatrix<F>,
    rhs: &CMatrix<F>,
    rel_floor: F,
) -> CMatrix<F> {
    if g.nrows() == 0 {
        return CMatrix::zeros(0, rhs.ncols());
    }
    let (values, vectors) = hermitian_eigen_desc(g);
    let floor = values[0].max(F::zero()) * rel_floor;
    let coeffs = vectors.adjoint() * rhs;
    let mut scaled = coeffs;
    for i in 0..values.len() {
        let inv = if values[i] > floor {
            F::one() / values[i]
        } else {
            F::zero()
        };
        for j in 0..scaled.ncols() {
            scaled[(i, j)] *= cx(inv);
        }
    }
    vectors * scaled
}

/// Checks that a Hermitian matrix is positive semidefinite up to `-tol`.
/// A non-Hermitian input (residual above `tol`) is an error, not a failed
/// report.
pub fn psd_check<F: Scalar>(m: &CMatrix<F>, tol: F) -> Result<PsdReport<F>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "psd check needs a square matrix".into(),
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let herm_residual = (m - m.adjoint()).norm();
    let scale = F::one().max(m.norm());
    if herm_residual > tol * scale {
        return Err(Error::NotHermitian {
            residual: herm_residual.to_subset().unwrap_or(f64::NAN),
            tol: (tol * scale).to_subset().unwrap_or(f64::NAN),
        });
    }
    if m.nrows() == 0 {
        return Ok(PsdReport {
            min_eigenvalue: F::zero(),
            passed: true,
            tol,
            witness: None,
        });
    }
    let (values, vectors) = hermitian_eigen_desc(m);
    let min = *values.last().expect("nonempty spectrum");
    let passed = min >= -tol;
    let witness = if passed {
        None
    } else {
        Some(vectors.column(values.len() - 1).into_owned())
    };
    Ok(PsdReport {
        min_eigenvalue: min,
        passed,
        tol,
        witness,
    })
}

/// Whether `E <= P` as projections: every vector of `e` stays in `p`, checked
/// as `|(I - P) F_e| <= tol`.
pub fn projection_order_leq<F: Scalar>(e: &Subspace<F>, p: &Subspace<F>, tol: F) -> Result<bool> {
    if e.ambient_dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "projection order needs a common ambient space".into(),
            expected: e.ambient_dim(),
            got: p.ambient_dim(),
        });
    }
    let residual = (e.frame() - p.projector() * e.frame()).norm();
    Ok(residual <= tol)
}

/// Exact meet of two subspaces via the nullspace of the stacked complements
/// `[(I - P_a); (I - P_b)]`.
pub fn subspace_meet<F: Scalar>(
    a: &Subspace<F>,
    b: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<Subspace<F>> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "meet needs a common ambient space".into(),
            expected: a.ambient_dim(),
            got: b.ambient_dim(),
        });
    }
    let n = a.ambient_dim();
    let id = CMatrix::<F>::identity(n, n);
    let ca = &id - a.projector();
    let cb = &id - b.projector();
    let mut stacked = CMatrix::<F>::zeros(2 * n, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&ca);
    stacked.view_mut((n, 0), (n, n)).copy_from(&cb);
    // Null vectors of the stack lie in both subspaces; directions within an
    // angle of roughly sqrt(tol_proj) of both count as common.
    let cols = nullspace_frame(&stacked, tols.tol_proj);
    Ok(Subspace::from_spanning(&cols, tols.rank_svd))
}

/// Closed span of the union of two subspaces.
pub fn subspace_join<F: Scalar>(a: &Subspace<F>, b: &Subspace<F>, rank_svd: F) -> Result<Subspace<F>> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "join needs a common ambient space".into(),
            expected: a.ambient_dim(),
            got: b.ambient_dim(),
        });
    }
    let n = a.ambient_dim();
    let mut cols = CMatrix::<F>::zeros(n, a.dim() + b.dim());
    for j in 0..a.dim() {
        cols.set_column(j, &a.frame().column(j));
    }
    for j in 0..b.dim() {
        cols.set_column(a.dim() + j, &b.frame().column(j));
    }
    Ok(Subspace::from_spanning(&cols, rank_svd))
}

/// Result of iterating `(E_a E_b)^n` to its limit projection.
#[derive(Debug, Clone)]
pub struct AlternatingLimit<F: Scalar> {
    /// Subspace the iteration converged to (the meet of the two inputs).
    pub limit: Subspace<F>,
    /// Real parts of the iterate traces; non-increasing along the run.
    pub traces: Vec<F>,
    pub iterations: usize,
}

/// Limit of the alternating product `(E_a E_b)^n` as `n` grows, together with
/// the trace sequence of the iterates. Converges to the projection onto the
/// meet; errors with `NoConvergence` after `max_iter` squarings.
pub fn alternating_projection_limit<F: Scalar>(
    a: &Subspace<F>,
    b: &Subspace<F>,
    max_iter: usize,
    tols: &Tolerances<F>,
) -> Result<AlternatingLimit<F>> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "alternating projections need a common ambient space".into(),
            expected: a.ambient_dim(),
            got: b.ambient_dim(),
        });
    }
    let step = a.projector() * b.projector();
    let mut current = step.clone();
    let mut traces = vec![trace_re(&current)];
    let mut residual = F::max_value().expect("scalar has max");
    let mut iterations = 0;
    for _ in 0..max_iter {
        let next = &step * &current;
        residual = (&next - &current).norm();
        current = next;
        iterations += 1;
        traces.push(trace_re(&current));
        if residual <= tols.tol_proj {
            break;
        }
    }
    if residual > tols.tol_proj {
        return Err(Error::NoConvergence {
            iterations,
            residual: residual.to_subset().unwrap_or(f64::NAN),
        });
    }
    // The limit is an orthogonal projection; extract its range from the
    // Hermitian part with eigenvalues clustered at 0 and 1.
    let (values, vectors) = hermitian_eigen_desc(&current);
    let keep: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > real::<F>(0.5))
        .collect();
    let mut cols = CMatrix::<F>::zeros(a.ambient_dim(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        cols.set_column(j, &vectors.column(i));
    }
    Ok(AlternatingLimit {
        limit: Subspace::from_spanning(&cols, tols.rank_svd),
        traces,
        iterations,
    })
}

fn trace_re<F: Scalar>(m: &CMatrix<F>) -> F {
    let mut t = F::zero();
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)].re;
    }
    t
}

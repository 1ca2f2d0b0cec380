//! Renormalization of an OS-positive pair: the compressed form `F* theta F`
//! is positive semidefinite, so factoring out its kernel and completing
//! yields a genuine inner-product space. The quotient map `q`, its canonical
//! factorization, and operators induced on the quotient live here.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_eigen_desc, psd_check, CMatrix, CVector, Operator, Subspace,
};
use crate::reflection::Reflection;
use crate::scalar::{cx, real, Scalar, Tolerances};

/// The renormalized space of an OS-positive pair: coordinates for the
/// quotient of the subspace by the kernel of the compressed form.
///
/// With `G = F* theta F = V diag(lambda) V*` and only eigenvalues above the
/// rank cutoff kept, the quotient map in frame coordinates is
/// `q = diag(sqrt(lambda)) V*`, so `q* q = G` and the quotient inner product
/// is the plain one on `C^k`.
#[derive(Debug, Clone)]
pub struct RenormalizedSpace<F: Scalar> {
    theta: Reflection<F>,
    h_plus: Subspace<F>,
    /// All eigenvalues of the compressed form, descending.
    gram_eigenvalues: Vec<F>,
    /// Eigenvectors matching `gram_eigenvalues`, as columns.
    basis: CMatrix<F>,
    /// Number of eigenvalues kept above the rank cutoff.
    k_dim: usize,
    /// Quotient map from frame coordinates to `C^k`.
    q: CMatrix<F>,
}

/// Builds the renormalized space, failing when the compressed form is not
/// positive semidefinite within `tol_psd`.
pub fn build_renormalized<F: Scalar>(
    theta: &Reflection<F>,
    h_plus: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<RenormalizedSpace<F>> {
    let report = crate::reflection::os_positivity(theta, h_plus, tols)?;
    if !report.passed {
        return Err(Error::NotOsPositive {
            min_eigenvalue: report.min_eigenvalue.to_subset().unwrap_or(f64::NAN),
            tol: tols.tol_psd.to_subset().unwrap_or(f64::NAN),
        });
    }
    let f = h_plus.frame();
    let gram = f.adjoint() * theta.matrix() * f;
    let (values, vectors) = hermitian_eigen_desc(&gram);
    let lmax = values.first().copied().unwrap_or(F::zero()).max(F::zero());
    let k_dim = (0..values.len())
        .filter(|&i| values[i] > tols.rank_gram * lmax)
        .count();
    let m = h_plus.dim();
    let mut q = CMatrix::<F>::zeros(k_dim, m);
    for i in 0..k_dim {
        let root = values[i].sqrt();
        for j in 0..m {
            q[(i, j)] = vectors[(j, i)].conj() * cx(root);
        }
    }
    Ok(RenormalizedSpace {
        theta: theta.clone(),
        h_plus: h_plus.clone(),
        gram_eigenvalues: values,
        basis: vectors,
        k_dim,
        q,
    })
}

impl<F: Scalar> RenormalizedSpace<F> {
    pub fn theta(&self) -> &Reflection<F> {
        &self.theta
    }

    pub fn h_plus(&self) -> &Subspace<F> {
        &self.h_plus
    }

    /// Dimension of the renormalized space.
    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    /// Eigenvalues of the compressed form, descending, kernel included.
    pub fn gram_eigenvalues(&self) -> &[F] {
        &self.gram_eigenvalues
    }

    /// Quotient map from frame coordinates of the subspace to `C^k`.
    pub fn q_matrix(&self) -> &CMatrix<F> {
        &self.q
    }

    /// Adjoint of the quotient map; `q* q` reproduces the compressed form.
    pub fn q_adjoint(&self) -> CMatrix<F> {
        self.q.adjoint()
    }

    /// Quotient map from ambient vectors: projects onto the subspace first.
    pub fn q_ambient(&self) -> CMatrix<F> {
        &self.q * self.h_plus.frame().adjoint()
    }

    /// Class of an ambient vector of the subspace in the renormalized space.
    pub fn project(&self, v: &CVector<F>) -> CVector<F> {
        self.q_ambient() * v
    }

    /// Compressed form `F* theta F` reconstructed from the stored spectrum.
    pub fn gram(&self) -> CMatrix<F> {
        let m = self.h_plus.dim();
        let mut scaled = self.basis.clone();
        for i in 0..self.gram_eigenvalues.len() {
            let col = scaled.column(i) * cx(self.gram_eigenvalues[i]);
            scaled.set_column(i, &col);
        }
        let mut gram = CMatrix::<F>::zeros(m, m);
        gram.copy_from(&(scaled * self.basis.adjoint()));
        gram
    }

    /// Residual of the canonical factorization, `|F* theta F - q* q|`.
    /// Nonzero exactly when the rank cutoff dropped kernel directions with
    /// residual mass.
    pub fn factorization_residual(&self) -> F {
        let f = self.h_plus.frame();
        let gram = f.adjoint() * self.theta.matrix() * f;
        (gram - self.q_adjoint() * &self.q).norm()
    }
}

/// Outcome of [`factorization_check`].
#[derive(Debug, Clone)]
pub struct FactorizationCheck<F: Scalar> {
    /// `|F* theta F - B* B|`.
    pub residual: F,
    pub tol: F,
    pub passed: bool,
}

/// Whether `B* B` reproduces the compressed form of the pair, i.e. whether
/// `B` (acting on frame coordinates of the subspace) is a factorization of
/// `F* theta F`.
pub fn factorization_check<F: Scalar>(
    theta: &Reflection<F>,
    h_plus: &Subspace<F>,
    b: &CMatrix<F>,
    tols: &Tolerances<F>,
) -> Result<FactorizationCheck<F>> {
    let m = h_plus.dim();
    if b.ncols() != m {
        return Err(Error::DimensionMismatch {
            context: "factor must act on subspace frame coordinates".into(),
            expected: m,
            got: b.ncols(),
        });
    }
    let f = h_plus.frame();
    let gram = f.adjoint() * theta.matrix() * f;
    let residual = (b.adjoint() * b - &gram).norm();
    let tol = tols.tol_ortho * real::<F>(100.0) * F::one().max(gram.norm());
    Ok(FactorizationCheck {
        residual,
        tol,
        passed: residual <= tol,
    })
}

/// Isometry produced by [`universal_isometry`]: the unique map carrying the
/// canonical factor onto another factorization of the same form.
#[derive(Debug, Clone)]
pub struct UniversalFactor<F: Scalar> {
    /// Matrix `b` with `b q = B` and `b* b = I`.
    pub matrix: CMatrix<F>,
    /// `|b q - B|`.
    pub reproduction_residual: F,
    /// `|b* b - I|`.
    pub isometry_residual: F,
}

/// Any other factorization `B* B = F* theta F` factors uniquely through the
/// canonical one: `b = B V diag(1/sqrt(lambda))` is the isometry on the
/// renormalized space with `b q = B`.
pub fn universal_isometry<F: Scalar>(
    space: &RenormalizedSpace<F>,
    b: &CMatrix<F>,
    tols: &Tolerances<F>,
) -> Result<UniversalFactor<F>> {
    let check = factorization_check(&space.theta, &space.h_plus, b, tols)?;
    if !check.passed {
        return Err(Error::NotAFactorization {
            residual: check.residual.to_subset().unwrap_or(f64::NAN),
            tol: check.tol.to_subset().unwrap_or(f64::NAN),
        });
    }
    let mut matrix = CMatrix::<F>::zeros(b.nrows(), space.k_dim);
    for i in 0..space.k_dim {
        let scaled = b * space.basis.column(i) / cx(space.gram_eigenvalues[i].sqrt());
        matrix.set_column(i, &scaled);
    }
    let reproduction_residual = (&matrix * &space.q - b).norm();
    let isometry_residual =
        (matrix.adjoint() * &matrix - CMatrix::<F>::identity(space.k_dim, space.k_dim)).norm();
    Ok(UniversalFactor {
        matrix,
        reproduction_residual,
        isometry_residual,
    })
}

/// Operator induced on the renormalized space by a conforming unitary,
/// together with the residuals of the premises it was checked against.
#[derive(Debug, Clone)]
pub struct InducedOperator<F: Scalar> {
    /// Matrix of the induced operator on `C^k`.
    pub matrix: CMatrix<F>,
    /// `|M - M*|` of the induced matrix; small by construction.
    pub hermitian_residual: F,
    /// Largest absolute eigenvalue of the induced matrix.
    pub spectral_radius: F,
    /// `|U* U - I|` of the input.
    pub unitary_residual: F,
    /// `|theta U theta - U*|` of the input.
    pub reflection_residual: F,
    /// Form obstruction `|F* theta (I - E+) U F|`; its vanishing makes the
    /// induced operator independent of representatives.
    pub invariance_residual: F,
}

/// Compresses a unitary to the renormalized space.
///
/// Premises, each an error when violated: `U` unitary; `theta U theta = U*`;
/// and the form obstruction `F* theta (I - E+) U F = 0`, which holds in
/// particular when `U` maps the subspace into itself, and always when the
/// subspace equals the fixed space. Under these the compression
/// `diag(1/sqrt(lambda)) V* (F* theta U F) V diag(1/sqrt(lambda))` is
/// selfadjoint on the renormalized space.
pub fn induce_operator<F: Scalar>(
    space: &RenormalizedSpace<F>,
    u: &Operator<F>,
    tols: &Tolerances<F>,
) -> Result<InducedOperator<F>> {
    let n = space.h_plus.ambient_dim();
    if u.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "operator must act on the ambient space".into(),
            expected: n,
            got: u.dim(),
        });
    }
    let um = u.matrix();
    let id = CMatrix::<F>::identity(n, n);
    let unitary_residual = (um.adjoint() * um - &id).norm();
    if unitary_residual > tols.tol_ortho * real::<F>(10.0) {
        return Err(Error::NotUnitary {
            residual: unitary_residual.to_subset().unwrap_or(f64::NAN),
            tol: (tols.tol_ortho * real::<F>(10.0)).to_subset().unwrap_or(f64::NAN),
        });
    }
    let theta = space.theta.matrix();
    let reflection_residual = (&theta * um * &theta - um.adjoint()).norm();
    if reflection_residual > tols.tol_ortho * real::<F>(10.0) {
        return Err(Error::NotReflectionSymmetric {
            residual: reflection_residual.to_subset().unwrap_or(f64::NAN),
            tol: (tols.tol_ortho * real::<F>(10.0)).to_subset().unwrap_or(f64::NAN),
        });
    }
    let f = space.h_plus.frame();
    let e_plus = space.h_plus.projector();
    let obstruction = f.adjoint() * &theta * (&id - e_plus) * um * f;
    let invariance_residual = obstruction.norm();
    if invariance_residual > tols.tol_proj * real::<F>(100.0) {
        return Err(Error::NotInvariant {
            residual: invariance_residual.to_subset().unwrap_or(f64::NAN),
            tol: (tols.tol_proj * real::<F>(100.0)).to_subset().unwrap_or(f64::NAN),
        });
    }
    let compressed = f.adjoint() * &theta * um * f;
    let mut matrix = CMatrix::<F>::zeros(space.k_dim, space.k_dim);
    for i in 0..space.k_dim {
        for j in 0..space.k_dim {
            let vi = space.basis.column(i);
            let vj = space.basis.column(j);
            let raw = (vi.adjoint() * &compressed * vj)[(0, 0)];
            matrix[(i, j)] = raw
                / cx(space.gram_eigenvalues[i].sqrt() * space.gram_eigenvalues[j].sqrt());
        }
    }
    let hermitian_residual = (&matrix - matrix.adjoint()).norm();
    let (values, _) = hermitian_eigen_desc(&matrix);
    let spectral_radius = values
        .iter()
        .fold(F::zero(), |acc, &v| acc.max(v.abs()));
    Ok(InducedOperator {
        matrix,
        hermitian_residual,
        spectral_radius,
        unitary_residual,
        reflection_residual,
        invariance_residual,
    })
}

/// Selfadjoint logarithm generator: for a Hermitian matrix with spectrum in
/// `(0, 1]`, returns the positive semidefinite `L = -(1/t0) log M`, so
/// `M = exp(-t0 L)`. Spectrum at or below `tol_psd` is an error because the
/// logarithm diverges there.
pub fn selfadjoint_log_generator<F: Scalar>(
    m: &CMatrix<F>,
    t0: F,
    tols: &Tolerances<F>,
) -> Result<CMatrix<F>> {
    if t0 <= F::zero() {
        return Err(Error::PreconditionFailed(format!(
            "time step t0 = {} must be positive",
            t0.to_subset().unwrap_or(f64::NAN)
        )));
    }
    let herm = (m - m.adjoint()).norm();
    if herm > tols.tol_proj * F::one().max(m.norm()) {
        return Err(Error::NotHermitian {
            residual: herm.to_subset().unwrap_or(f64::NAN),
            tol: tols.tol_proj.to_subset().unwrap_or(f64::NAN),
        });
    }
    let (values, vectors) = hermitian_eigen_desc(m);
    if let Some(&min) = values.last() {
        if min <= tols.tol_psd {
            return Err(Error::NonPositiveSpectrum {
                eigenvalue: min.to_subset().unwrap_or(f64::NAN),
            });
        }
    }
    let k = values.len();
    let mut scaled = vectors.clone();
    for i in 0..k {
        let log = -values[i].ln() / t0;
        let col = scaled.column(i) * cx(log);
        scaled.set_column(i, &col);
    }
    Ok(scaled * vectors.adjoint())
}

/// Result of inducing a one-parameter unitary group on the renormalized
/// space at a fixed time step.
#[derive(Debug, Clone)]
pub struct InducedSemigroup<F: Scalar> {
    /// Induced operator at time `t0`.
    pub step: InducedOperator<F>,
    /// Positive semidefinite generator with `step = exp(-t0 L)`.
    pub generator: CMatrix<F>,
    /// `|S(t0)^2 - S(2 t0)|`, the defect of the semigroup law.
    pub law_residual: F,
    pub t0: F,
}

/// Induces the unitary group `exp(-t A)` of a skew-adjoint generator on the
/// renormalized space and extracts the selfadjoint semigroup generator at
/// step `t0`.
///
/// Checks run in this order: `A` skew-adjoint; the premises of
/// [`induce_operator`] at times `t0` and `2 t0`; spectrum of the induced
/// step inside `(0, 1]`; and the semigroup law `S(t0)^2 = S(2 t0)` last, so
/// a group whose compression fails only the law still reports its measured
/// defect in the error.
pub fn induce_semigroup_generator<F: Scalar>(
    space: &RenormalizedSpace<F>,
    a: &CMatrix<F>,
    t0: F,
    tols: &Tolerances<F>,
) -> Result<InducedSemigroup<F>> {
    let n = space.h_plus.ambient_dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "generator must act on the ambient space".into(),
            expected: n,
            got: a.nrows().max(a.ncols()),
        });
    }
    if t0 <= F::zero() {
        return Err(Error::PreconditionFailed(format!(
            "time step t0 = {} must be positive",
            t0.to_subset().unwrap_or(f64::NAN)
        )));
    }
    let skew = (a.adjoint() + a).norm();
    if skew > tols.tol_ortho * real::<F>(10.0) * F::one().max(a.norm()) {
        return Err(Error::NotSkewAdjoint {
            residual: skew.to_subset().unwrap_or(f64::NAN),
            tol: (tols.tol_ortho * real::<F>(10.0)).to_subset().unwrap_or(f64::NAN),
        });
    }
    let u1 = unitary_exponential(a, -t0);
    let u2 = unitary_exponential(a, -(t0 + t0));
    let step = induce_operator(space, &Operator::new(u1)?, tols)?;
    let step2 = induce_operator(space, &Operator::new(u2)?, tols)?;
    let law_residual = (&step.matrix * &step.matrix - &step2.matrix).norm();
    let (values, _) = hermitian_eigen_desc(&step.matrix);
    if let Some(&min) = values.last() {
        if min <= tols.tol_psd {
            return Err(Error::NonPositiveSpectrum {
                eigenvalue: min.to_subset().unwrap_or(f64::NAN),
            });
        }
    }
    let generator = selfadjoint_log_generator(&step.matrix, t0, tols)?;
    let law_tol = tols.tol_proj * real::<F>(100.0);
    if law_residual > law_tol {
        return Err(Error::SemigroupLawViolation {
            residual: law_residual.to_subset().unwrap_or(f64::NAN),
            tol: law_tol.to_subset().unwrap_or(f64::NAN),
        });
    }
    Ok(InducedSemigroup {
        step,
        generator,
        law_residual,
        t0,
    })
}

/// Exactly unitary matrix exponential of a skew-adjoint generator: with
/// `H = iA` Hermitian, `exp(tA) = W exp(-it Lambda) W*` from the eigenpairs
/// of `H`.
pub fn unitary_exponential<F: Scalar>(a: &CMatrix<F>, t: F) -> CMatrix<F> {
    let n = a.nrows();
    let h = a * Complex::new(F::zero(), F::one());
    let (values, vectors) = hermitian_eigen_desc(&h);
    let mut scaled = vectors.clone();
    for i in 0..n {
        let angle = -t * values[i];
        let phase = Complex::new(angle.cos(), angle.sin());
        let col = scaled.column(i) * phase;
        scaled.set_column(i, &col);
    }
    scaled * vectors.adjoint()
}

/// Report of the contractive pairing embedding of a marked subspace into
/// the renormalized space.
#[derive(Debug, Clone)]
pub struct InclusionReport<F: Scalar> {
    /// Positivity of `F* (theta - E0) F`, the defining inequality
    /// `|E0 f|^2 <= <f, theta f>` on the subspace.
    pub form_dominates: bool,
    pub min_eigenvalue: F,
    /// When the inequality holds, the map `l` from marked-subspace frame
    /// coordinates into the renormalized space determined by the pairing
    /// `<l h0, q h> = <h0, h>`; contractive by construction.
    pub map: Option<CMatrix<F>>,
    pub map_norm: Option<F>,
    /// On failure, an ambient vector of the subspace and its projection
    /// witnessing `|<h, h0>|^2 > <h, theta h> |h0|^2`.
    pub witness: Option<(CVector<F>, CVector<F>)>,
}

/// Checks `|E0 f|^2 <= <f, theta f>` for all `f` in the positive subspace:
/// exactly the condition for the ambient pairing with the marked subspace
/// to pass to the quotient as a contraction `l` with
/// `<l h0, q h>_K = <h0, h>` for every `h` in the positive subspace.
pub fn contractive_inclusion<F: Scalar>(
    space: &RenormalizedSpace<F>,
    marked: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<InclusionReport<F>> {
    let n = space.h_plus.ambient_dim();
    if marked.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            context: "marked subspace must share the ambient space".into(),
            expected: n,
            got: marked.ambient_dim(),
        });
    }
    let f = space.h_plus.frame();
    let theta = space.theta.matrix();
    let dominated = f.adjoint() * (&theta - marked.projector()) * f;
    let report = psd_check(&dominated, tols.tol_psd)?;
    if !report.passed {
        let y = report.witness.expect("failed check carries a witness");
        let h = f * &y;
        let h0 = marked.project(&h);
        return Ok(InclusionReport {
            form_dominates: false,
            min_eigenvalue: report.min_eigenvalue,
            map: None,
            map_norm: None,
            witness: Some((h, h0)),
        });
    }
    // The pairing demands q* (l h0) = F* h0 on the quotient range, so
    // l = diag(1/sqrt(lambda)) V* F* F0 is the unique solution there.
    let cross = f.adjoint() * marked.frame();
    let mut map = CMatrix::<F>::zeros(space.k_dim, marked.dim());
    for i in 0..space.k_dim {
        let row = (space.basis.column(i).adjoint() * &cross)
            / cx(space.gram_eigenvalues[i].sqrt());
        map.set_row(i, &row);
    }
    let map_norm = crate::hilbert::spectral_norm(&map);
    Ok(InclusionReport {
        form_dominates: true,
        min_eigenvalue: report.min_eigenvalue,
        map_norm: Some(map_norm),
        map: Some(map),
        witness: None,
    })
}

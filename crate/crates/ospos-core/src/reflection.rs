//! Reflections (selfadjoint involutions) and the contraction-graph geometry
//! of positive subspaces: a subspace on which the compressed reflection form
//! is nonnegative is the graph of a contraction from the fixed space to the
//! reflected space, maximal exactly when the graph covers the whole fixed
//! space.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{psd_check, CMatrix, CVector, PsdReport, Subspace};
use crate::scalar::{cx, real, Scalar, Tolerances};

/// Selfadjoint involution `theta = 2P - I`, stored by its `+1` eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection<F: Scalar> {
    fixed_space: Subspace<F>,
}

impl<F: Scalar> Reflection<F> {
    pub fn from_fixed_space(fixed_space: Subspace<F>) -> Self {
        Self { fixed_space }
    }

    /// Validates that `m` is a selfadjoint involution within `tol_proj` and
    /// extracts its fixed space.
    pub fn from_matrix(m: &CMatrix<F>, tols: &Tolerances<F>) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::DimensionMismatch {
                context: "reflection matrix must be square".into(),
                expected: n,
                got: m.ncols(),
            });
        }
        let herm = (m - m.adjoint()).norm();
        if herm > tols.tol_proj {
            return Err(Error::NotHermitian {
                residual: herm.to_subset().unwrap_or(f64::NAN),
                tol: tols.tol_proj.to_subset().unwrap_or(f64::NAN),
            });
        }
        let invol = (m * m - CMatrix::<F>::identity(n, n)).norm();
        if invol > tols.tol_proj * real::<F>(4.0) {
            return Err(Error::NotInvolution {
                residual: invol.to_subset().unwrap_or(f64::NAN),
                tol: (tols.tol_proj * real::<F>(4.0)).to_subset().unwrap_or(f64::NAN),
            });
        }
        let p = (CMatrix::<F>::identity(n, n) + m) * cx(real::<F>(0.5));
        Ok(Self {
            fixed_space: Subspace::from_spanning(&p, real(0.5)),
        })
    }

    /// Reflection along coordinates: `+1` on the first `n_plus`, `-1` on the
    /// remaining `n_minus`.
    pub fn block(n_plus: usize, n_minus: usize) -> Self {
        let n = n_plus + n_minus;
        let mut frame = CMatrix::<F>::zeros(n, n_plus);
        for j in 0..n_plus {
            frame[(j, j)] = cx(F::one());
        }
        Self {
            fixed_space: Subspace::from_orthonormal_frame(frame, real(1e-8))
                .expect("coordinate frame is orthonormal"),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.fixed_space.ambient_dim()
    }

    pub fn fixed_space(&self) -> &Subspace<F> {
        &self.fixed_space
    }

    /// Orthogonal complement of the fixed space (the `-1` eigenspace).
    pub fn reflected_space(&self, rank_svd: F) -> Subspace<F> {
        self.fixed_space.complement(rank_svd)
    }

    /// Dense matrix `2P - I`.
    pub fn matrix(&self) -> CMatrix<F> {
        let n = self.ambient_dim();
        self.fixed_space.projector() * cx(real::<F>(2.0)) - CMatrix::<F>::identity(n, n)
    }

    pub fn apply(&self, v: &CVector<F>) -> CVector<F> {
        let p = self.fixed_space.project(v);
        &p * cx(real::<F>(2.0)) - v
    }
}

/// Linear contraction from a subspace of the fixed space into a subspace of
/// the reflected space, stored in the orthonormal coordinates of its domain
/// and codomain frames.
#[derive(Debug, Clone)]
pub struct PartialContraction<F: Scalar> {
    pub domain: Subspace<F>,
    pub codomain: Subspace<F>,
    /// Coordinate matrix of shape `codomain.dim() x domain.dim()`.
    pub map: CMatrix<F>,
}

impl<F: Scalar> PartialContraction<F> {
    /// Operator norm of the coordinate map.
    pub fn norm(&self) -> F {
        crate::hilbert::spectral_norm(&self.map)
    }

    /// Image of an ambient vector lying in the domain.
    pub fn apply(&self, v: &CVector<F>) -> CVector<F> {
        self.codomain.frame() * (&self.map * (self.domain.frame().adjoint() * v))
    }

    /// Contraction with the same domain and negated values.
    pub fn negated(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            map: &self.map * cx(-F::one()),
        }
    }

    /// Kernel of the map as an ambient subspace of the domain.
    pub fn kernel(&self, tols: &Tolerances<F>) -> Subspace<F> {
        if self.map.ncols() == 0 {
            return Subspace::zero(self.domain.ambient_dim());
        }
        if self.map.nrows() == 0 {
            return self.domain.clone();
        }
        let null = crate::hilbert::nullspace_frame(&self.map, tols.rank_gram);
        Subspace::from_spanning(&(self.domain.frame() * null), tols.rank_svd)
    }
}

/// Pair of subspaces carrying the signed form
/// `<x, y> = <k+, l+> - <k-, l->` for `x = k+ + k-`, `y = l+ + l-`.
#[derive(Debug, Clone)]
pub struct SignedFormSpace<F: Scalar> {
    l_plus: Subspace<F>,
    l_minus: Subspace<F>,
}

impl<F: Scalar> SignedFormSpace<F> {
    /// Requires a common ambient space and an independent pair, so every
    /// vector of the sum decomposes uniquely.
    pub fn new(l_plus: Subspace<F>, l_minus: Subspace<F>, tols: &Tolerances<F>) -> Result<Self> {
        if l_plus.ambient_dim() != l_minus.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "signed-form components need a common ambient space".into(),
                expected: l_plus.ambient_dim(),
                got: l_minus.ambient_dim(),
            });
        }
        let joint = stack_columns(l_plus.frame(), l_minus.frame());
        if joint.ncols() > 0 {
            let gram = joint.adjoint() * &joint;
            let lmin = gram.symmetric_eigen().eigenvalues.min().max(F::zero());
            let smin = lmin.sqrt();
            if smin <= tols.rank_svd.sqrt() {
                return Err(Error::PreconditionFailed(format!(
                    "component subspaces overlap: smallest joint singular value {:.3e}",
                    smin.to_subset().unwrap_or(f64::NAN)
                )));
            }
        }
        Ok(Self { l_plus, l_minus })
    }

    pub fn l_plus(&self) -> &Subspace<F> {
        &self.l_plus
    }

    pub fn l_minus(&self) -> &Subspace<F> {
        &self.l_minus
    }

    pub fn ambient_dim(&self) -> usize {
        self.l_plus.ambient_dim()
    }

    /// Decomposes `x = k+ + k-` into component coordinates, failing when `x`
    /// lies outside the sum.
    pub fn decompose(&self, x: &CVector<F>, tols: &Tolerances<F>) -> Result<(CVector<F>, CVector<F>)> {
        let joint = stack_columns(self.l_plus.frame(), self.l_minus.frame());
        let coeffs = least_squares(&joint, x, tols.rank_gram)?;
        let recon = &joint * &coeffs;
        let err = (recon - x).norm();
        if err > tols.tol_proj * F::one().max(x.norm()) {
            return Err(Error::PreconditionFailed(format!(
                "vector lies outside the component sum (residual {:.3e})",
                err.to_subset().unwrap_or(f64::NAN)
            )));
        }
        let kp = self.l_plus.dim();
        let a = coeffs.rows(0, kp).into_owned();
        let b = coeffs.rows(kp, self.l_minus.dim()).into_owned();
        Ok((a, b))
    }

    /// Signed form `<k+(x), k+(y)> - <k-(x), k-(y)>`.
    pub fn signed_form(
        &self,
        x: &CVector<F>,
        y: &CVector<F>,
        tols: &Tolerances<F>,
    ) -> Result<Complex<F>> {
        let (ax, bx) = self.decompose(x, tols)?;
        let (ay, by) = self.decompose(y, tols)?;
        Ok((ax.adjoint() * ay)[(0, 0)] - (bx.adjoint() * by)[(0, 0)])
    }
}

/// Compressed form `F* theta F` of the reflection on the subspace, checked
/// for positive semidefiniteness.
pub fn os_positivity<F: Scalar>(
    theta: &Reflection<F>,
    h_plus: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<PsdReport<F>> {
    if theta.ambient_dim() != h_plus.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "reflection and subspace need a common ambient space".into(),
            expected: theta.ambient_dim(),
            got: h_plus.ambient_dim(),
        });
    }
    let f = h_plus.frame();
    let compressed = f.adjoint() * theta.matrix() * f;
    psd_check(&compressed, tols.tol_psd)
}

/// Extracts the contraction whose graph is the OS-positive subspace: splits
/// each frame vector into fixed and reflected components and solves for the
/// map carrying the former to the latter.
pub fn contraction_from_subspace<F: Scalar>(
    theta: &Reflection<F>,
    h_plus: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<PartialContraction<F>> {
    let report = os_positivity(theta, h_plus, tols)?;
    if !report.passed {
        return Err(Error::NotOsPositive {
            min_eigenvalue: report.min_eigenvalue.to_subset().unwrap_or(f64::NAN),
            tol: tols.tol_psd.to_subset().unwrap_or(f64::NAN),
        });
    }
    let p = theta.fixed_space().projector();
    let f = h_plus.frame();
    let plus = &p * f;
    let minus = f - &plus;
    graph_from_components(&plus, &minus, tols)
}

/// Graph subspace `{x + Cx : x in domain}` of a contraction whose domain
/// lies in the fixed space and codomain in the reflected space.
pub fn subspace_from_contraction<F: Scalar>(
    theta: &Reflection<F>,
    c: &PartialContraction<F>,
    tols: &Tolerances<F>,
) -> Result<Subspace<F>> {
    let p = theta.fixed_space().projector();
    let dom_resid = (c.domain.frame() - &p * c.domain.frame()).norm();
    if dom_resid > tols.tol_proj * real::<F>(10.0) {
        return Err(Error::DomainNotInFixedSpace {
            residual: dom_resid.to_subset().unwrap_or(f64::NAN),
        });
    }
    let cod_in_fixed = (&p * c.codomain.frame()).norm();
    if cod_in_fixed > tols.tol_proj * real::<F>(10.0) {
        return Err(Error::CodomainNotInReflectedSpace {
            residual: cod_in_fixed.to_subset().unwrap_or(f64::NAN),
        });
    }
    let graph = c.domain.frame() + c.codomain.frame() * &c.map;
    Ok(Subspace::from_spanning(&graph, tols.rank_svd))
}

/// Zero-extension of a partial contraction to the whole fixed space, and the
/// graph of the extension (a maximal OS-positive subspace).
pub fn maximal_extension<F: Scalar>(
    theta: &Reflection<F>,
    c: &PartialContraction<F>,
    tols: &Tolerances<F>,
) -> Result<(PartialContraction<F>, Subspace<F>)> {
    let p = theta.fixed_space().projector();
    let dom_resid = (c.domain.frame() - &p * c.domain.frame()).norm();
    if dom_resid > tols.tol_proj * real::<F>(10.0) {
        return Err(Error::DomainNotInFixedSpace {
            residual: dom_resid.to_subset().unwrap_or(f64::NAN),
        });
    }
    let n = theta.ambient_dim();
    // Orthonormal basis of the fixed space not already in the domain.
    let dom_proj = c.domain.projector();
    let rest = (CMatrix::<F>::identity(n, n) - dom_proj) * theta.fixed_space().frame();
    let extension = Subspace::from_spanning(&rest, real(1e-8));
    let full_dim = c.domain.dim() + extension.dim();
    let mut frame = CMatrix::<F>::zeros(n, full_dim);
    for j in 0..c.domain.dim() {
        frame.set_column(j, &c.domain.frame().column(j));
    }
    for j in 0..extension.dim() {
        frame.set_column(c.domain.dim() + j, &extension.frame().column(j));
    }
    let domain = Subspace::from_orthonormal_frame(frame, real(1e-8))
        .expect("orthogonal blocks stay orthonormal");
    let mut map = CMatrix::<F>::zeros(c.map.nrows(), full_dim);
    map.view_mut((0, 0), (c.map.nrows(), c.map.ncols()))
        .copy_from(&c.map);
    let extended = PartialContraction {
        domain,
        codomain: c.codomain.clone(),
        map,
    };
    let graph = subspace_from_contraction(theta, &extended, tols)?;
    Ok((extended, graph))
}

/// Whether the OS-positive subspace projects onto the whole fixed space,
/// which characterizes maximality among OS-positive subspaces.
pub fn is_maximal_os<F: Scalar>(
    theta: &Reflection<F>,
    h_plus: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<bool> {
    let report = os_positivity(theta, h_plus, tols)?;
    if !report.passed {
        return Err(Error::NotOsPositive {
            min_eigenvalue: report.min_eigenvalue.to_subset().unwrap_or(f64::NAN),
            tol: tols.tol_psd.to_subset().unwrap_or(f64::NAN),
        });
    }
    let projected = theta.fixed_space().projector() * h_plus.frame();
    let rank = numerical_rank(&projected, tols.rank_svd);
    Ok(rank == theta.fixed_space().dim())
}

/// Report of the intersection identities for a maximal contraction graph:
/// the meet of the graph with its reflected partner, the kernel of the
/// contraction, and the meet with the fixed space all coincide.
#[derive(Debug, Clone)]
pub struct KernelCheckReport<F: Scalar> {
    pub h_plus: Subspace<F>,
    pub h_minus: Subspace<F>,
    pub kernel: Subspace<F>,
    pub meet_plus_minus: Subspace<F>,
    pub meet_plus_fixed: Subspace<F>,
    /// Largest pairwise projector distance among the three subspaces.
    pub max_distance: F,
    pub passed: bool,
}

/// Verifies `H+ meet H- = ker C = H+ meet P` for a contraction defined on
/// the whole fixed space; errors with `NotMaximal` otherwise.
pub fn intersection_kernel_check<F: Scalar>(
    theta: &Reflection<F>,
    c: &PartialContraction<F>,
    tols: &Tolerances<F>,
) -> Result<KernelCheckReport<F>> {
    if c.domain.dim() != theta.fixed_space().dim()
        || c.domain.distance(theta.fixed_space()) > tols.tol_proj * real::<F>(100.0)
    {
        return Err(Error::NotMaximal {
            domain_dim: c.domain.dim(),
            fixed_dim: theta.fixed_space().dim(),
        });
    }
    let h_plus = subspace_from_contraction(theta, c, tols)?;
    let h_minus = subspace_from_contraction(theta, &c.negated(), tols)?;
    let kernel = c.kernel(tols);
    let meet_plus_minus = crate::hilbert::subspace_meet(&h_plus, &h_minus, tols)?;
    let meet_plus_fixed = crate::hilbert::subspace_meet(&h_plus, theta.fixed_space(), tols)?;
    let d1 = meet_plus_minus.distance(&kernel);
    let d2 = meet_plus_fixed.distance(&kernel);
    let d3 = meet_plus_minus.distance(&meet_plus_fixed);
    let max_distance = d1.max(d2).max(d3);
    // Meets come out of an SVD nullspace; comparing projectors loses roughly
    // a digit, so the acceptance margin sits above tol_proj.
    let passed = max_distance <= real::<F>(1e-7);
    Ok(KernelCheckReport {
        h_plus,
        h_minus,
        kernel,
        meet_plus_minus,
        meet_plus_fixed,
        max_distance,
        passed,
    })
}

/// Extracts the contraction whose graph is a subspace that is positive for
/// the signed form on a component pair.
pub fn positive_subspace_to_contraction<F: Scalar>(
    space: &SignedFormSpace<F>,
    p_sub: &Subspace<F>,
    tols: &Tolerances<F>,
) -> Result<PartialContraction<F>> {
    if space.ambient_dim() != p_sub.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "signed-form space and subspace need a common ambient space".into(),
            expected: space.ambient_dim(),
            got: p_sub.ambient_dim(),
        });
    }
    let m = p_sub.dim();
    let kp = space.l_plus.dim();
    let km = space.l_minus.dim();
    let mut a = CMatrix::<F>::zeros(kp, m);
    let mut b = CMatrix::<F>::zeros(km, m);
    for j in 0..m {
        let col = p_sub.frame().column(j).into_owned();
        let (aj, bj) = space.decompose(&col, tols)?;
        a.set_column(j, &aj);
        b.set_column(j, &bj);
    }
    let signed_gram = a.adjoint() * &a - b.adjoint() * &b;
    let report = psd_check(&signed_gram, tols.tol_psd)?;
    if !report.passed {
        return Err(Error::NotPositive {
            min_eigenvalue: report.min_eigenvalue.to_subset().unwrap_or(f64::NAN),
        });
    }
    let plus = space.l_plus.frame() * a;
    let minus = space.l_minus.frame() * b;
    graph_from_components(&plus, &minus, tols)
}

/// Positivity margin of the rank-one model: a unit vector with squared
/// fixed-space mass `alpha` and reflected component scaled by `c` spans an
/// OS-positive line iff `alpha - |c|^2 (1 - alpha) >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct OneDimBound<F: Scalar> {
    pub margin: F,
    pub os_positive: bool,
    /// Bound `|c|^2 <= alpha / (1 - alpha)`; infinite when `alpha = 1`.
    pub critical_c_squared: Option<F>,
}

pub fn one_dim_os_bound<F: Scalar>(alpha: F, c_abs: F) -> Result<OneDimBound<F>> {
    if alpha < F::zero() || alpha > F::one() {
        return Err(Error::PreconditionFailed(format!(
            "alpha = {} outside [0, 1]",
            alpha.to_subset().unwrap_or(f64::NAN)
        )));
    }
    if c_abs < F::zero() {
        return Err(Error::PreconditionFailed("|c| must be nonnegative".into()));
    }
    let margin = alpha - c_abs * c_abs * (F::one() - alpha);
    let critical_c_squared = if alpha < F::one() {
        Some(alpha / (F::one() - alpha))
    } else {
        None
    };
    Ok(OneDimBound {
        margin,
        os_positive: margin >= F::zero(),
        critical_c_squared,
    })
}

/// Builds the contraction mapping the column span of `plus` to the matched
/// columns of `minus`. A map exists iff the matched columns factor through
/// the plus components, checked by reproducing every pair from the candidate
/// map; contractivity comes from positivity of the originating form.
fn graph_from_components<F: Scalar>(
    plus: &CMatrix<F>,
    minus: &CMatrix<F>,
    tols: &Tolerances<F>,
) -> Result<PartialContraction<F>> {
    let domain = Subspace::from_spanning(plus, tols.rank_svd);
    if plus.ncols() == 0 || domain.dim() == 0 {
        let codomain = Subspace::from_spanning(minus, tols.rank_svd);
        if codomain.dim() > 0 {
            return Err(Error::NotAGraph {
                residual: minus.norm().to_subset().unwrap_or(f64::NAN),
            });
        }
        return Ok(PartialContraction {
            domain,
            codomain,
            map: CMatrix::zeros(0, 0),
        });
    }
    // Writing plus = Qd S, the min-norm solve of plus Y = Qd is
    // Y = S* (S S*)^(-1); the images of the domain basis are minus Y.
    let s = domain.frame().adjoint() * plus;
    let gram = &s * s.adjoint();
    let y = s.adjoint() * crate::hilbert::hermitian_pinv_times(
        &gram,
        &CMatrix::<F>::identity(domain.dim(), domain.dim()),
        tols.rank_gram,
    );
    let images = minus * &y;
    // The candidate map must reproduce every original pair; a combination
    // cancelling the plus components while keeping a minus component shows
    // up here as an irreducible residual.
    let scale = F::one().max(minus.norm());
    let graph_resid = (&images * &s - minus).norm();
    if graph_resid > tols.tol_proj * real::<F>(100.0) * scale {
        return Err(Error::NotAGraph {
            residual: graph_resid.to_subset().unwrap_or(f64::NAN),
        });
    }
    let codomain = Subspace::from_spanning(&images, tols.rank_svd);
    let map = codomain.frame().adjoint() * &images;
    let result = PartialContraction {
        domain,
        codomain,
        map,
    };
    let norm = result.norm();
    if norm > F::one() + real::<F>(1e-8) {
        return Err(Error::NotContraction {
            norm: norm.to_subset().unwrap_or(f64::NAN),
            tol: 1e-8,
        });
    }
    Ok(result)
}

fn numerical_rank<F: Scalar>(m: &CMatrix<F>, rank_svd: F) -> usize {
    crate::hilbert::range_frame(m, rank_svd).ncols()
}

fn stack_columns<F: Scalar>(a: &CMatrix<F>, b: &CMatrix<F>) -> CMatrix<F> {
    let mut out = CMatrix::<F>::zeros(a.nrows(), a.ncols() + b.ncols());
    for j in 0..a.ncols() {
        out.set_column(j, &a.column(j));
    }
    for j in 0..b.ncols() {
        out.set_column(a.ncols() + j, &b.column(j));
    }
    out
}

fn least_squares<F: Scalar>(m: &CMatrix<F>, rhs: &CVector<F>, rank_gram: F) -> Result<CVector<F>> {
    let gram = m.adjoint() * m;
    let proj = m.adjoint() * rhs;
    let proj_mat = CMatrix::from_column_slice(proj.len(), 1, proj.as_slice());
    let sol = crate::hilbert::hermitian_pinv_times(&gram, &proj_mat, rank_gram);
    Ok(sol.column(0).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::subspace_meet;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn e(n: usize, i: usize) -> CVector<f64> {
        let mut v = CVector::<f64>::zeros(n);
        v[i] = c64(1.0, 0.0);
        v
    }

    /// Reflection on C^3 fixing e1, e2 and negating e3, with the line
    /// spanned by e1 + e3/2 as positive subspace.
    fn three_dim_example() -> (Reflection<f64>, Subspace<f64>) {
        let theta = Reflection::block(2, 1);
        let h = Subspace::from_vector(&(e(3, 0) + e(3, 2) * c64(0.5, 0.0)), 1e-12);
        (theta, h)
    }

    #[test]
    fn positivity_transfers_to_the_reflected_subspace() {
        // The form takes identical values on a subspace and on its image
        // under the reflection, so positivity holds for both or neither.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let inst = sample::os_instance::<f64, _>(&mut rng, 3, 2);
            let reflected = Subspace::from_spanning(
                &(inst.theta.matrix() * inst.h_plus.frame()),
                1e-12,
            );
            assert!(os_positivity(&inst.theta, &inst.h_plus, &tols()).unwrap().passed);
            assert!(os_positivity(&inst.theta, &reflected, &tols()).unwrap().passed);
        }
        // Negative case: a steep line and its image both fail.
        let theta = Reflection::block(1, 1);
        let steep = Subspace::from_vector(&(e(2, 0) + e(2, 1) * c64(2.0, 0.0)), 1e-12);
        let reflected =
            Subspace::from_spanning(&(theta.matrix() * steep.frame()), 1e-12);
        assert!(!os_positivity(&theta, &steep, &tols()).unwrap().passed);
        assert!(!os_positivity(&theta, &reflected, &tols()).unwrap().passed);
    }

    #[test]
    fn reflection_matrix_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fixed = sample::subspace(&mut rng, 5, 2);
        let theta = Reflection::from_fixed_space(fixed);
        let m = theta.matrix();
        let id = CMatrix::<f64>::identity(5, 5);
        assert!((&m * &m - &id).norm() < 1e-12);
        assert!((&m - m.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn reflection_from_matrix_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fixed = sample::subspace::<f64, _>(&mut rng, 4, 2);
        let theta = Reflection::from_fixed_space(fixed.clone());
        let rebuilt = Reflection::from_matrix(&theta.matrix(), &tols()).unwrap();
        assert!(rebuilt.fixed_space().distance(&fixed) < 1e-10);
    }

    #[test]
    fn reflection_from_matrix_rejects_non_involution() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(0.5, 0.0)]));
        assert!(matches!(
            Reflection::from_matrix(&m, &tols()),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn os_positivity_of_tilted_line() {
        let (theta, h) = three_dim_example();
        let report = os_positivity(&theta, &h, &tols()).unwrap();
        assert!(report.passed);
        // Rayleigh value (1 - 1/4) / (1 + 1/4) = 0.6 on the normalized line.
        assert!((report.min_eigenvalue - 0.6).abs() < 1e-12);
    }

    #[test]
    fn os_positivity_fails_beyond_unit_slope() {
        let theta = Reflection::block(2, 1);
        let h = Subspace::from_vector(&(e(3, 0) + e(3, 2) * c64(2.0, 0.0)), 1e-12);
        let report = os_positivity(&theta, &h, &tols()).unwrap();
        assert!(!report.passed);
        assert!((report.min_eigenvalue + 0.6).abs() < 1e-12);
        assert!(report.witness.is_some());
    }

    #[test]
    fn contraction_extraction_recovers_slope() {
        let (theta, h) = three_dim_example();
        let c = contraction_from_subspace(&theta, &h, &tols()).unwrap();
        assert_eq!(c.domain.dim(), 1);
        assert_eq!(c.codomain.dim(), 1);
        assert!(c.domain.contains(&e(3, 0), 1e-10));
        assert!(c.codomain.contains(&e(3, 2), 1e-10));
        // C e1 = e3/2 regardless of frame phases.
        let image = c.apply(&e(3, 0));
        assert!((image - e(3, 2) * c64(0.5, 0.0)).norm() < 1e-10);
        assert!((c.norm() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn graph_round_trips_through_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let inst = sample::os_instance::<f64, _>(&mut rng, 3, 2);
            let c = contraction_from_subspace(&inst.theta, &inst.h_plus, &tols()).unwrap();
            let rebuilt = subspace_from_contraction(&inst.theta, &c, &tols()).unwrap();
            assert!(rebuilt.distance(&inst.h_plus) < 1e-9);
        }
    }

    #[test]
    fn maximal_extension_adds_kernel_directions() {
        let (theta, h) = three_dim_example();
        let c = contraction_from_subspace(&theta, &h, &tols()).unwrap();
        assert!(!is_maximal_os(&theta, &h, &tols()).unwrap());
        let (ext, graph) = maximal_extension(&theta, &c, &tols()).unwrap();
        assert_eq!(ext.domain.dim(), 2);
        assert!(ext.domain.distance(theta.fixed_space()) < 1e-10);
        // The extension acts by zero on e2.
        assert!(ext.apply(&e(3, 1)).norm() < 1e-10);
        assert!(is_maximal_os(&theta, &graph, &tols()).unwrap());
        assert!(graph.contains(&e(3, 1), 1e-10));
    }

    #[test]
    fn kernel_identities_hold_for_maximal_graphs() {
        let (theta, h) = three_dim_example();
        let c = contraction_from_subspace(&theta, &h, &tols()).unwrap();
        let (ext, _) = maximal_extension(&theta, &c, &tols()).unwrap();
        let report = intersection_kernel_check(&theta, &ext, &tols()).unwrap();
        assert!(report.passed, "max distance {}", report.max_distance);
        assert_eq!(report.kernel.dim(), 1);
        assert!(report.kernel.contains(&e(3, 1), 1e-8));
        // Non-extended graph: both meets are zero, kernel stays e2.
        let h_minus = subspace_from_contraction(&theta, &c.negated(), &tols()).unwrap();
        let meet = subspace_meet(&h, &h_minus, &tols()).unwrap();
        assert_eq!(meet.dim(), 0);
    }

    #[test]
    fn kernel_check_requires_maximality() {
        let (theta, h) = three_dim_example();
        let c = contraction_from_subspace(&theta, &h, &tols()).unwrap();
        assert!(matches!(
            intersection_kernel_check(&theta, &c, &tols()),
            Err(Error::NotMaximal { .. })
        ));
    }

    #[test]
    fn signed_form_positive_line_gives_contraction() {
        let l_plus = Subspace::from_vector(&e(2, 0), 1e-12);
        let l_minus = Subspace::from_vector(&e(2, 1), 1e-12);
        let space = SignedFormSpace::new(l_plus, l_minus, &tols()).unwrap();
        let p = Subspace::from_vector(&(e(2, 0) + e(2, 1) * c64(0.5, 0.0)), 1e-12);
        let c = positive_subspace_to_contraction(&space, &p, &tols()).unwrap();
        assert!((c.norm() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn signed_form_negative_line_is_rejected() {
        let l_plus = Subspace::from_vector(&e(2, 0), 1e-12);
        let l_minus = Subspace::from_vector(&e(2, 1), 1e-12);
        let space = SignedFormSpace::new(l_plus, l_minus, &tols()).unwrap();
        let p = Subspace::from_vector(&(e(2, 0) * c64(0.5, 0.0) + e(2, 1)), 1e-12);
        assert!(matches!(
            positive_subspace_to_contraction(&space, &p, &tols()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn pure_minus_vector_is_not_positive() {
        let l_plus = Subspace::from_vector(&e(2, 0), 1e-12);
        let l_minus = Subspace::from_vector(&e(2, 1), 1e-12);
        let space = SignedFormSpace::new(l_plus, l_minus, &tols()).unwrap();
        let p = Subspace::from_vector(&e(2, 1), 1e-12);
        assert!(matches!(
            positive_subspace_to_contraction(&space, &p, &tols()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn signed_form_evaluates_componentwise() {
        let l_plus = Subspace::from_vector(&e(3, 0), 1e-12);
        let l_minus = Subspace::from_vector(&e(3, 2), 1e-12);
        let space = SignedFormSpace::new(l_plus, l_minus, &tols()).unwrap();
        let x = e(3, 0) + e(3, 2) * c64(0.5, 0.0);
        let val = space.signed_form(&x, &x, &tols()).unwrap();
        assert!((val.re - 0.75).abs() < 1e-12);
        assert!(val.im.abs() < 1e-12);
    }

    #[test]
    fn one_dim_bound_matches_closed_form() {
        let b = one_dim_os_bound(0.5_f64, 1.1).unwrap();
        assert!((b.margin + 0.105).abs() < 1e-12);
        assert!(!b.os_positive);
        let b = one_dim_os_bound(0.5_f64, 0.9).unwrap();
        assert!(b.os_positive);
        assert!((b.critical_c_squared.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dim_bound_edge_cases() {
        // alpha = 1: the vector lies in the fixed space, any c passes.
        let b = one_dim_os_bound(1.0, 5.0).unwrap();
        assert!(b.os_positive);
        assert!(b.critical_c_squared.is_none());
        // alpha = 0 with c > 0: strictly negative.
        let b = one_dim_os_bound(0.0, 0.5).unwrap();
        assert!(!b.os_positive);
        // alpha = 0 with c = 0: the zero vector, margin 0, positive.
        let b = one_dim_os_bound(0.0, 0.0).unwrap();
        assert!(b.os_positive);
        assert!(one_dim_os_bound(1.5, 0.0).is_err());
    }
}

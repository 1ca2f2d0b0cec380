//! The explicit two-block model: ambient space `H1 (+) H2`, reflection
//! `diag(I, -I)`, positive subspace the graph of a contraction `C`, and the
//! closed-form characteristic projections onto the graphs of `C` and `-C`.
//! The model realizes the Markov-versus-positivity dichotomy concretely:
//! its triple is Markov exactly when `C = 0`.

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_pinv_times, spectral_norm, CMatrix, Subspace};
use crate::markov::ProjectionTriple;
use crate::reflection::Reflection;
use crate::scalar::{real, Scalar, Tolerances};

/// Contraction `C` from the first block to the second, with the derived
/// geometry of the model: reflection `diag(I, -I)`, center `H1 (+) 0`,
/// sides the graphs of `C` and `-C`.
#[derive(Debug, Clone)]
pub struct TwoBlockModel<F: Scalar> {
    c: CMatrix<F>,
    c_norm: F,
}

impl<F: Scalar> TwoBlockModel<F> {
    /// Accepts any `C` with operator norm at most `1 + 1e-9`; exact
    /// isometries are allowed, the characteristic matrices stay projections
    /// at norm one.
    pub fn new(c: CMatrix<F>) -> Result<Self> {
        let c_norm = spectral_norm(&c);
        let tol = real::<F>(1e-9);
        if c_norm > F::one() + tol {
            return Err(Error::NotContraction {
                norm: c_norm.to_subset().unwrap_or(f64::NAN),
                tol: 1e-9,
            });
        }
        Ok(Self { c, c_norm })
    }

    pub fn c(&self) -> &CMatrix<F> {
        &self.c
    }

    pub fn c_norm(&self) -> F {
        self.c_norm
    }

    /// First-block dimension (domain of `C`).
    pub fn n1(&self) -> usize {
        self.c.ncols()
    }

    /// Second-block dimension (codomain of `C`).
    pub fn n2(&self) -> usize {
        self.c.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n1() + self.n2()
    }

    /// The block reflection fixing the first summand and negating the second.
    pub fn theta(&self) -> Reflection<F> {
        Reflection::block(self.n1(), self.n2())
    }

    /// Condition number of `I + C* C`, the matrix inverted inside the
    /// characteristic projections; at most 2 for any contraction, reported
    /// for callers accepting `C` beyond the unit ball.
    pub fn condition_number(&self) -> F {
        let g = gram_plus_identity(&self.c);
        let (values, _) = crate::hilbert::hermitian_eigen_desc(&g);
        match (values.first(), values.last()) {
            (Some(&hi), Some(&lo)) if lo > F::zero() => hi / lo,
            _ => F::one(),
        }
    }

    /// Characteristic projection onto the graph of `C`, assembled from the
    /// closed-form blocks built on `(I + C* C)^(-1)`.
    pub fn char_projection_plus(&self) -> CMatrix<F> {
        self.char_projection(F::one())
    }

    /// Characteristic projection onto the graph of `-C`: the same blocks
    /// with the off-diagonal signs flipped.
    pub fn char_projection_minus(&self) -> CMatrix<F> {
        self.char_projection(-F::one())
    }

    fn char_projection(&self, sign: F) -> CMatrix<F> {
        let (n1, n2) = (self.n1(), self.n2());
        let c = &self.c;
        let inv1 = invert_hermitian(&gram_plus_identity(c));
        let inv2 = invert_hermitian(&gram_plus_identity(&c.adjoint()));
        let p11 = inv1.clone();
        let p12 = &inv1 * c.adjoint();
        let p21 = c * &inv1;
        let p22 = CMatrix::<F>::identity(n2, n2) - inv2;
        let s = crate::scalar::cx(sign);
        let mut p = CMatrix::<F>::zeros(n1 + n2, n1 + n2);
        p.view_mut((0, 0), (n1, n1)).copy_from(&p11);
        p.view_mut((0, n1), (n1, n2)).copy_from(&(p12 * s));
        p.view_mut((n1, 0), (n2, n1)).copy_from(&(p21 * s));
        p.view_mut((n1, n1), (n2, n2)).copy_from(&p22);
        p
    }

    /// Graph of `sign * C` as a subspace of the ambient space.
    fn graph(&self, sign: F) -> Subspace<F> {
        let (n1, n2) = (self.n1(), self.n2());
        let mut spanning = CMatrix::<F>::zeros(n1 + n2, n1);
        spanning
            .view_mut((0, 0), (n1, n1))
            .copy_from(&CMatrix::<F>::identity(n1, n1));
        spanning
            .view_mut((n1, 0), (n2, n1))
            .copy_from(&(&self.c * crate::scalar::cx(sign)));
        Subspace::from_spanning(&spanning, real::<F>(1e-12))
    }

    /// The model's center-positive-negative triple: `H1 (+) 0` between the
    /// graphs of `C` and `-C`.
    pub fn triple(&self) -> ProjectionTriple<F> {
        let (n1, n2) = (self.n1(), self.n2());
        let mut center_frame = CMatrix::<F>::zeros(n1 + n2, n1);
        center_frame
            .view_mut((0, 0), (n1, n1))
            .copy_from(&CMatrix::<F>::identity(n1, n1));
        let center = Subspace::from_orthonormal_frame(center_frame, real::<F>(1e-9))
            .expect("coordinate frame is orthonormal");
        ProjectionTriple::new(center, self.graph(F::one()), self.graph(-F::one()))
            .expect("blocks share the ambient space")
    }

    /// Residuals of the block identities tying `C` to the characteristic
    /// projection blocks; all vanish analytically.
    pub fn identity_residuals(&self) -> IdentityResiduals<F> {
        let (n1, n2) = (self.n1(), self.n2());
        let c = &self.c;
        let p = self.char_projection_plus();
        let p11 = p.view((0, 0), (n1, n1)).into_owned();
        let p12 = p.view((0, n1), (n1, n2)).into_owned();
        let p21 = p.view((n1, 0), (n2, n1)).into_owned();
        let p22 = p.view((n1, n1), (n2, n2)).into_owned();
        IdentityResiduals {
            graph_row: (c * &p11 - &p21).norm(),
            graph_cross: (c * &p12 - &p22).norm(),
            defect_row: (c.adjoint() * &p21 - (CMatrix::<F>::identity(n1, n1) - &p11)).norm(),
            defect_cross: (c.adjoint() * (CMatrix::<F>::identity(n2, n2) - &p22) - &p12).norm(),
            off_diagonal_adjoint: (&p21 - p12.adjoint()).norm(),
        }
    }

    /// Markov defect of the model triple together with the equivalent
    /// operator criteria: the defect vanishes exactly when `C` does.
    pub fn markov_equivalence(&self, tols: &Tolerances<F>) -> MarkovEquivalence<F> {
        let report = crate::markov::markov_check(&self.triple(), tols);
        let p_plus = self.char_projection_plus();
        let (n1, n2) = (self.n1(), self.n2());
        let p12 = p_plus.view((0, n1), (n1, n2)).into_owned();
        let p21 = p_plus.view((n1, 0), (n2, n1)).into_owned();
        MarkovEquivalence {
            is_markov: report.is_markov,
            residual: report.residual,
            off_diagonal_product: (&p12 * &p21).norm(),
            c_norm: self.c_norm,
        }
    }
}

/// Residuals of the five block identities of the characteristic projection.
#[derive(Debug, Clone)]
pub struct IdentityResiduals<F: Scalar> {
    /// `|C P11 - P21|`.
    pub graph_row: F,
    /// `|C P12 - P22|`.
    pub graph_cross: F,
    /// `|C* P21 - (I - P11)|`.
    pub defect_row: F,
    /// `|C* (I - P22) - P12|`.
    pub defect_cross: F,
    /// `|P21 - P12*|`.
    pub off_diagonal_adjoint: F,
}

impl<F: Scalar> IdentityResiduals<F> {
    pub fn max(&self) -> F {
        self.graph_row
            .max(self.graph_cross)
            .max(self.defect_row)
            .max(self.defect_cross)
            .max(self.off_diagonal_adjoint)
    }
}

/// Markov status of the model triple with the operator-level diagnostics.
#[derive(Debug, Clone)]
pub struct MarkovEquivalence<F: Scalar> {
    pub is_markov: bool,
    /// `|E+ E- - E+ E0 E-|` for the model triple.
    pub residual: F,
    /// `|P12 P21|`, the product of the off-diagonal characteristic blocks;
    /// vanishes together with the Markov defect.
    pub off_diagonal_product: F,
    pub c_norm: F,
}

fn gram_plus_identity<F: Scalar>(c: &CMatrix<F>) -> CMatrix<F> {
    let n = c.ncols();
    CMatrix::<F>::identity(n, n) + c.adjoint() * c
}

/// Inverse of a Hermitian positive definite matrix with spectrum in [1, 2];
/// the eigendecomposition route is exact at this conditioning.
fn invert_hermitian<F: Scalar>(g: &CMatrix<F>) -> CMatrix<F> {
    let n = g.nrows();
    hermitian_pinv_times(g, &CMatrix::<F>::identity(n, n), real::<F>(1e-14))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::psd_check;
    use crate::markov::{adapted_check, markov_check};
    use crate::reflection::os_positivity;
    use crate::sample;
    use nalgebra::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn scalar_model(c: f64) -> TwoBlockModel<f64> {
        TwoBlockModel::new(CMatrix::from_fn(1, 1, |_, _| c64(c, 0.0))).unwrap()
    }

    #[test]
    fn scalar_half_matches_closed_form() {
        let model = scalar_model(0.5);
        let p = model.char_projection_plus();
        let expected = [[0.8, 0.4], [0.4, 0.2]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - c64(expected[i][j], 0.0)).norm() < 1e-12);
            }
        }
        let m = model.char_projection_minus();
        assert!((m[(0, 1)] - c64(-0.4, 0.0)).norm() < 1e-12);
        assert!((m[(1, 0)] - c64(-0.4, 0.0)).norm() < 1e-12);
        assert!((m[(0, 0)] - c64(0.8, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_contraction_collapses_to_first_block() {
        let model = TwoBlockModel::new(CMatrix::<f64>::zeros(2, 2)).unwrap();
        let p = model.char_projection_plus();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && i < 2 { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - c64(expected, 0.0)).norm() < 1e-12);
            }
        }
        let eq = model.markov_equivalence(&tols());
        assert!(eq.is_markov);
        assert!(eq.residual < 1e-13);
        assert!(eq.off_diagonal_product < 1e-13);
    }

    #[test]
    fn characteristic_matrix_projects_onto_the_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let c = sample::contraction::<f64, _>(&mut rng, 3, 2, 1.0);
            let model = TwoBlockModel::new(c).unwrap();
            let p = model.char_projection_plus();
            assert!((&p * &p - &p).norm() < 1e-10, "not idempotent");
            assert!((&p - p.adjoint()).norm() < 1e-12, "not selfadjoint");
            let graph_projector = model.triple().h_plus().projector();
            assert!((&p - graph_projector).norm() < 1e-9, "wrong range");
            let minus = model.char_projection_minus();
            let minus_projector = model.triple().h_minus().projector();
            assert!((&minus - minus_projector).norm() < 1e-9);
        }
    }

    #[test]
    fn minus_projection_is_reflection_conjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let c = sample::contraction::<f64, _>(&mut rng, 2, 3, 1.0);
        let model = TwoBlockModel::new(c).unwrap();
        let j = model.theta().matrix();
        let conj = &j * model.char_projection_plus() * &j;
        assert!((conj - model.char_projection_minus()).norm() < 1e-12);
    }

    #[test]
    fn isometry_is_accepted_and_still_projects() {
        let model = scalar_model(1.0);
        let p = model.char_projection_plus();
        assert!((&p * &p - &p).norm() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - c64(0.5, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expansion_is_rejected() {
        assert!(matches!(
            TwoBlockModel::new(CMatrix::from_fn(1, 1, |_, _| c64(1.1, 0.0))),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn block_identities_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let c = sample::contraction::<f64, _>(&mut rng, 3, 3, 1.0);
            let model = TwoBlockModel::new(c).unwrap();
            let residuals = model.identity_residuals();
            assert!(residuals.max() < 1e-11, "max residual {}", residuals.max());
        }
    }

    #[test]
    fn markov_exactly_at_zero() {
        let model = scalar_model(0.5);
        let eq = model.markov_equivalence(&tols());
        assert!(!eq.is_markov);
        assert!(eq.residual > 0.1);
        assert!(eq.off_diagonal_product > 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..20 {
            let c = sample::contraction::<f64, _>(&mut rng, 2, 2, 1.0);
            let model = TwoBlockModel::new(c).unwrap();
            let eq = model.markov_equivalence(&tols());
            assert_eq!(eq.is_markov, eq.c_norm <= 1e-10, "norm {}", eq.c_norm);
        }
    }

    #[test]
    fn triple_is_adapted_to_the_block_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let c = sample::contraction::<f64, _>(&mut rng, 2, 2, 1.0);
        let model = TwoBlockModel::new(c).unwrap();
        let report = adapted_check(&model.triple(), &model.theta(), 1e-9).unwrap();
        assert!(
            report.passed,
            "residuals {} {} {}",
            report.center_residual, report.plus_residual, report.minus_residual
        );
    }

    #[test]
    fn compressed_form_matches_defect_quotient() {
        // On the graph frame the form's minimum eigenvalue equals
        // (1 - s^2)/(1 + s^2) at the largest singular value s of C.
        let mut c = CMatrix::<f64>::zeros(2, 2);
        c[(0, 0)] = c64(0.8, 0.0);
        c[(1, 1)] = c64(0.3, 0.0);
        let model = TwoBlockModel::new(c).unwrap();
        let triple = model.triple();
        let f = triple.h_plus().frame();
        let gram = f.adjoint() * model.theta().matrix() * f;
        let report = psd_check(&gram, 1e-10).unwrap();
        assert!(report.passed);
        let expected = (1.0 - 0.64) / (1.0 + 0.64);
        assert!((report.min_eigenvalue - expected).abs() < 1e-12);
        assert!(os_positivity(&model.theta(), triple.h_plus(), &tols()).unwrap().passed);
    }

    #[test]
    fn zero_model_extension_stays_markov() {
        let model = TwoBlockModel::new(CMatrix::<f64>::zeros(2, 1)).unwrap();
        let ext = model.triple().extended(&tols()).unwrap();
        let report = markov_check(&ext, &tols());
        assert!(report.is_markov);
        let e0 = ext.h_zero().projector();
        let ep = ext.h_plus().projector();
        let em = ext.h_minus().projector();
        assert!((&ep * &e0 - ep * em).norm() < 1e-12);
    }
}

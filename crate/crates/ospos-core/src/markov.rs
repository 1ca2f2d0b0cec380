//! Markov triples of subspaces and their interaction with reflections.
//!
//! A triple `(H0, H+, H-)` is Markov when `E+ E- = E+ E0 E-`: the center
//! screens the past from the future. For reflections adapted to the triple
//! the Markov property forces OS positivity, and for non-Markov triples a
//! search can exhibit an adapted reflection whose form goes negative.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_eigen_desc, projection_order_leq, psd_check, subspace_join, CMatrix, CVector,
    PsdReport, Subspace,
};
use crate::reflection::Reflection;
use crate::sample;
use crate::scalar::{cx, real, Scalar, Tolerances};

/// Three subspaces of one ambient space: a center, a positive side, and a
/// negative side. Nesting of the center inside the sides is not enforced by
/// the constructor; [`ProjectionTriple::extended`] produces the nested
/// enlargement when needed.
#[derive(Debug, Clone)]
pub struct ProjectionTriple<F: Scalar> {
    h_zero: Subspace<F>,
    h_plus: Subspace<F>,
    h_minus: Subspace<F>,
}

impl<F: Scalar> ProjectionTriple<F> {
    pub fn new(
        h_zero: Subspace<F>,
        h_plus: Subspace<F>,
        h_minus: Subspace<F>,
    ) -> Result<Self> {
        let n = h_zero.ambient_dim();
        for (part, name) in [(&h_plus, "positive"), (&h_minus, "negative")] {
            if part.ambient_dim() != n {
                return Err(Error::DimensionMismatch {
                    context: format!("{name} subspace must share the center's ambient space"),
                    expected: n,
                    got: part.ambient_dim(),
                });
            }
        }
        Ok(Self {
            h_zero,
            h_plus,
            h_minus,
        })
    }

    pub fn h_zero(&self) -> &Subspace<F> {
        &self.h_zero
    }

    pub fn h_plus(&self) -> &Subspace<F> {
        &self.h_plus
    }

    pub fn h_minus(&self) -> &Subspace<F> {
        &self.h_minus
    }

    pub fn ambient_dim(&self) -> usize {
        self.h_zero.ambient_dim()
    }

    /// Whether the center is contained in both sides, within `tol`.
    pub fn is_nested(&self, tol: F) -> Result<bool> {
        Ok(projection_order_leq(&self.h_zero, &self.h_plus, tol)?
            && projection_order_leq(&self.h_zero, &self.h_minus, tol)?)
    }

    /// Enlarges both sides by the center, producing a nested triple with the
    /// same center. Already-nested triples come back unchanged up to basis.
    pub fn extended(&self, tols: &Tolerances<F>) -> Result<Self> {
        Ok(Self {
            h_zero: self.h_zero.clone(),
            h_plus: subspace_join(&self.h_plus, &self.h_zero, tols.rank_svd)?,
            h_minus: subspace_join(&self.h_minus, &self.h_zero, tols.rank_svd)?,
        })
    }
}

/// Outcome of [`markov_check`].
#[derive(Debug, Clone)]
pub struct MarkovReport<F: Scalar> {
    /// `|E+ E- - E+ E0 E-|`.
    pub residual: F,
    pub tol: F,
    pub is_markov: bool,
}

/// Measures the Markov defect `E+ E- - E+ E0 E-` of a triple.
pub fn markov_check<F: Scalar>(
    triple: &ProjectionTriple<F>,
    tols: &Tolerances<F>,
) -> MarkovReport<F> {
    let e0 = triple.h_zero.projector();
    let ep = triple.h_plus.projector();
    let em = triple.h_minus.projector();
    let residual = (&ep * &em - ep * e0 * em).norm();
    let tol = tols.tol_proj * real::<F>(10.0);
    MarkovReport {
        residual,
        tol,
        is_markov: residual <= tol,
    }
}

/// Residuals measuring how far a reflection is from being adapted to a
/// triple: fixing the center pointwise and exchanging the two sides.
#[derive(Debug, Clone)]
pub struct AdaptedReport<F: Scalar> {
    /// `|(theta - I) E0|`: the center must be fixed vectorwise.
    pub center_residual: F,
    /// `|(I - E-) theta E+|`: the positive side must land in the negative.
    pub plus_residual: F,
    /// `|(I - E+) theta E-|`: the negative side must land in the positive.
    pub minus_residual: F,
    pub epsilon: F,
    pub passed: bool,
}

/// Checks membership of a reflection in the adapted class of a triple, to
/// tolerance `epsilon` on each of the three defining residuals.
pub fn adapted_check<F: Scalar>(
    triple: &ProjectionTriple<F>,
    theta: &Reflection<F>,
    epsilon: F,
) -> Result<AdaptedReport<F>> {
    let n = triple.ambient_dim();
    if theta.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            context: "reflection must act on the triple's ambient space".into(),
            expected: n,
            got: theta.ambient_dim(),
        });
    }
    let th = theta.matrix();
    let id = CMatrix::<F>::identity(n, n);
    let e0 = triple.h_zero.projector();
    let ep = triple.h_plus.projector();
    let em = triple.h_minus.projector();
    let center_residual = ((&th - &id) * e0).norm();
    let plus_residual = ((&id - &em) * &th * &ep).norm();
    let minus_residual = ((&id - &ep) * &th * &em).norm();
    let passed =
        center_residual <= epsilon && plus_residual <= epsilon && minus_residual <= epsilon;
    Ok(AdaptedReport {
        center_residual,
        plus_residual,
        minus_residual,
        epsilon,
        passed,
    })
}

/// For a Markov triple and an adapted reflection, the form
/// `<h, theta h>` on the positive side is positive semidefinite. Both
/// premises are enforced before the form is examined, so a failure of the
/// returned check would contradict them.
pub fn markov_implies_os<F: Scalar>(
    triple: &ProjectionTriple<F>,
    theta: &Reflection<F>,
    epsilon: F,
    tols: &Tolerances<F>,
) -> Result<PsdReport<F>> {
    let adapted = adapted_check(triple, theta, epsilon)?;
    if !adapted.passed {
        return Err(Error::PreconditionFailed(format!(
            "reflection is not adapted to the triple: residuals {:?} exceed {}",
            (
                adapted.center_residual.to_subset().unwrap_or(f64::NAN),
                adapted.plus_residual.to_subset().unwrap_or(f64::NAN),
                adapted.minus_residual.to_subset().unwrap_or(f64::NAN),
            ),
            epsilon.to_subset().unwrap_or(f64::NAN),
        )));
    }
    let markov = markov_check(triple, tols);
    if !markov.is_markov {
        return Err(Error::PreconditionFailed(format!(
            "triple is not Markov: defect {}",
            markov.residual.to_subset().unwrap_or(f64::NAN),
        )));
    }
    let f = triple.h_plus.frame();
    psd_check(&(f.adjoint() * theta.matrix() * f), tols.tol_psd)
}

/// Outcome of [`negative_witness_search`].
#[derive(Debug, Clone)]
pub enum WitnessResult<F: Scalar> {
    /// An adapted reflection and a unit vector of the positive side with
    /// `<h, theta h> = value < 0`.
    Found {
        theta: Reflection<F>,
        witness: CVector<F>,
        value: F,
        trials_used: usize,
    },
    /// The search budget ran out. `admissible` counts candidates that
    /// produced an adapted reflection; `best_value` is the least form value
    /// seen among them.
    NotFound {
        trials: usize,
        admissible: usize,
        best_value: Option<F>,
    },
    /// The triple is Markov, so no adapted reflection can break positivity.
    Inapplicable { markov_residual: F },
}

/// Searches for an adapted reflection witnessing failure of OS positivity
/// on a non-Markov triple.
///
/// Candidates are unit pairs `(h+, h-)` from the two sides; after rotating
/// the phase of `h-` to make the overlap negative real, the exchange
/// `theta h+ = h-`, `theta h- = h+` on their span (identity on the
/// complement) is a reflection with `<h+, theta h+> = -|<h+, h->|`. The
/// first candidate pairs the top directions of the screened overlap
/// `F+^* (I - E0) F-`; later candidates are random. Each candidate is kept
/// only if the exchange lies in the adapted class to tolerance `epsilon`.
pub fn negative_witness_search<F: Scalar>(
    triple: &ProjectionTriple<F>,
    trials: usize,
    seed: u64,
    epsilon: F,
    tols: &Tolerances<F>,
) -> Result<WitnessResult<F>> {
    let markov = markov_check(triple, tols);
    if markov.is_markov {
        return Ok(WitnessResult::Inapplicable {
            markov_residual: markov.residual,
        });
    }
    let n = triple.ambient_dim();
    let fp = triple.h_plus.frame();
    let fm = triple.h_minus.frame();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut admissible = 0usize;
    let mut best_value: Option<F> = None;
    for trial in 0..trials {
        let (h_plus, h_minus) = if trial == 0 {
            match screened_overlap_pair(triple) {
                Some(pair) => pair,
                None => continue,
            }
        } else {
            (
                fp * sample::unit_vector::<F, _>(&mut rng, fp.ncols()),
                fm * sample::unit_vector::<F, _>(&mut rng, fm.ncols()),
            )
        };
        let overlap = (h_plus.adjoint() * &h_minus)[(0, 0)];
        let size = (overlap.re * overlap.re + overlap.im * overlap.im).sqrt();
        if size < real::<F>(1e-9) {
            continue;
        }
        // Rotate so the overlap is -|overlap|; the exchange then has a
        // negative diagonal form value at h_plus.
        let aligned = &h_minus * (-overlap.conj() / cx(size));
        let alpha = -size;
        let mut w = &aligned - &h_plus * cx(alpha);
        let beta = w.norm();
        let theta_m = if beta < real::<F>(1e-9) {
            // Parallel pair: reflect through the hyperplane orthogonal to it.
            CMatrix::<F>::identity(n, n) - &h_plus * h_plus.adjoint() * cx(real::<F>(2.0))
        } else {
            w /= cx(beta);
            let mut k = CMatrix::<F>::zeros(n, 2);
            k.set_column(0, &h_plus);
            k.set_column(1, &w);
            let mut small = CMatrix::<F>::zeros(2, 2);
            small[(0, 0)] = cx(alpha);
            small[(0, 1)] = cx(beta);
            small[(1, 0)] = cx(beta);
            small[(1, 1)] = cx(-alpha);
            let outer = &k * k.adjoint();
            &k * small * k.adjoint() + CMatrix::<F>::identity(n, n) - outer
        };
        let theta = match Reflection::from_matrix(&theta_m, tols) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let adapted = adapted_check(triple, &theta, epsilon)?;
        if !adapted.passed {
            continue;
        }
        admissible += 1;
        let value = (h_plus.adjoint() * theta.matrix() * &h_plus)[(0, 0)].re;
        best_value = Some(match best_value {
            Some(b) => b.min(value),
            None => value,
        });
        if value < -tols.tol_psd {
            return Ok(WitnessResult::Found {
                theta,
                witness: h_plus,
                value,
                trials_used: trial + 1,
            });
        }
    }
    Ok(WitnessResult::NotFound {
        trials,
        admissible,
        best_value,
    })
}

/// Top pair of directions of `F+^* (I - E0) F-`, the part of the overlap of
/// the sides not screened by the center. `None` when the overlap vanishes
/// or a side is trivial.
fn screened_overlap_pair<F: Scalar>(
    triple: &ProjectionTriple<F>,
) -> Option<(CVector<F>, CVector<F>)> {
    let fp = triple.h_plus.frame();
    let fm = triple.h_minus.frame();
    if fp.ncols() == 0 || fm.ncols() == 0 {
        return None;
    }
    let n = triple.ambient_dim();
    let screened =
        fp.adjoint() * (CMatrix::<F>::identity(n, n) - triple.h_zero.projector()) * fm;
    let (values, vectors) = hermitian_eigen_desc(&(screened.adjoint() * &screened));
    if values.first().copied().unwrap_or(F::zero()) <= F::zero() {
        return None;
    }
    let v = vectors.column(0).into_owned();
    let u_raw = &screened * &v;
    let norm = u_raw.norm();
    if norm < real::<F>(1e-12) {
        return None;
    }
    Some((fp * (u_raw / cx(norm)), fm * v))
}

/// Orthonormal frame of block indicators in the square-root embedding of a
/// weighted coordinate space: column `B` has entries `sqrt(w_i / w(B))` for
/// `i` in block `B`. Projection onto this subspace is conditional
/// expectation with respect to the partition, conjugated by `sqrt(w)`.
pub fn conditional_expectation<F: Scalar>(
    weights: &[F],
    partition: &[usize],
) -> Result<Subspace<F>> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::InvalidPartition {
            n,
            reason: "weighted space must have at least one coordinate".into(),
        });
    }
    if partition.len() != n {
        return Err(Error::InvalidPartition {
            n,
            reason: format!("partition labels {} coordinates", partition.len()),
        });
    }
    if let Some(i) = (0..n).find(|&i| weights[i] <= F::zero()) {
        return Err(Error::InvalidPartition {
            n,
            reason: format!("weight {i} is not positive"),
        });
    }
    let mut blocks: Vec<usize> = Vec::new();
    let mut block_of = vec![0usize; n];
    for i in 0..n {
        let label = partition[i];
        match blocks.iter().position(|&b| b == label) {
            Some(k) => block_of[i] = k,
            None => {
                block_of[i] = blocks.len();
                blocks.push(label);
            }
        }
    }
    let mut mass = vec![F::zero(); blocks.len()];
    for i in 0..n {
        mass[block_of[i]] += weights[i];
    }
    let mut frame = CMatrix::<F>::zeros(n, blocks.len());
    for i in 0..n {
        frame[(i, block_of[i])] = cx((weights[i] / mass[block_of[i]]).sqrt());
    }
    Subspace::from_orthonormal_frame(frame, real::<F>(1e-9))
}

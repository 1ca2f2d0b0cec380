//! Stationary matrix covariances `r(t)` and the two quadratic forms they
//! induce on a finite time grid: the stationary Gram built from differences
//! `r(t_i - t_j)` and the reflected Gram built from sums `r(t_i + t_j)`.
//! When the reflected Gram is positive the renormalization of the shift by
//! `s` produces a selfadjoint contraction acting on the quotient space, and
//! [`reflected_semigroup`] carries that construction out explicitly.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{psd_check, to_complex, PsdReport};
use crate::scalar::{real, Scalar, Tolerances};

/// Stationary covariance function `t -> r(t)` with values the real
/// `v_dim x v_dim` matrices, subject to `r(-t) = r(t)^T`.
#[derive(Clone)]
pub struct CovarianceFunction<F: Scalar> {
    name: String,
    v_dim: usize,
    eval: Arc<dyn Fn(F) -> DMatrix<F> + Send + Sync>,
}

impl<F: Scalar> fmt::Debug for CovarianceFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovarianceFunction")
            .field("name", &self.name)
            .field("v_dim", &self.v_dim)
            .finish()
    }
}

impl<F: Scalar> CovarianceFunction<F> {
    pub fn new(
        name: impl Into<String>,
        v_dim: usize,
        eval: impl Fn(F) -> DMatrix<F> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            v_dim,
            eval: Arc::new(eval),
        }
    }

    /// Scalar covariance, evaluated through a plain real function.
    pub fn scalar(name: impl Into<String>, eval: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        Self::new(name, 1, move |t| DMatrix::from_element(1, 1, eval(t)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    pub fn eval(&self, t: F) -> DMatrix<F> {
        let m = (self.eval)(t);
        debug_assert_eq!(m.nrows(), self.v_dim);
        debug_assert_eq!(m.ncols(), self.v_dim);
        m
    }

    /// Largest defect of `r(-t) = r(t)^T` over the grid.
    pub fn symmetry_residual(&self, grid: &[F]) -> F {
        grid.iter()
            .map(|&t| (self.eval(-t) - self.eval(t).transpose()).norm())
            .fold(F::zero(), F::max)
    }

    /// `e^(-a|t|)`, the covariance of the stationary Ornstein-Uhlenbeck
    /// process with decay rate `a > 0`.
    pub fn ornstein_uhlenbeck(a: F) -> Result<Self> {
        if a <= F::zero() {
            return Err(Error::PreconditionFailed(format!(
                "decay rate must be positive, got {}",
                a.to_subset().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self::scalar("ou", move |t| (-a * t.abs()).exp()))
    }

    /// `(1 - e^(-b|t|)) / (b|t|)`, an equal-weight mixture of exponential
    /// decays with rates up to `b > 0`; the removable singularity at zero is
    /// filled by the series `1 - u/2 + u^2/6`.
    pub fn integrated_exponential(b: F) -> Result<Self> {
        if b <= F::zero() {
            return Err(Error::PreconditionFailed(format!(
                "rate bound must be positive, got {}",
                b.to_subset().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self::scalar("intexp", move |t| {
            let u = b * t.abs();
            if u < real::<F>(1e-6) {
                F::one() - u / real::<F>(2.0) + u * u / real::<F>(6.0)
            } else {
                (F::one() - (-u).exp()) / u
            }
        }))
    }

    /// `1 / (1 + |t|)`, polynomial decay with no semigroup structure.
    pub fn rational_decay() -> Self {
        Self::scalar("rational", |t: F| F::one() / (F::one() + t.abs()))
    }

    /// `(1 + |t|)^(-1/2) e^(-|t|/(1+|t|))`, a slowly decaying mixture that
    /// stays bounded away from zero in the exponent.
    pub fn damped_power() -> Self {
        Self::scalar("damped", |t: F| {
            let a = F::one() + t.abs();
            (F::one() / a.sqrt()) * (-t.abs() / a).exp()
        })
    }

    /// The four built-in scalar covariances at unit parameters, the
    /// Ornstein-Uhlenbeck entry first.
    pub fn catalog() -> Vec<Self> {
        vec![
            Self::ornstein_uhlenbeck(F::one()).expect("unit rate is positive"),
            Self::integrated_exponential(F::one()).expect("unit bound is positive"),
            Self::rational_decay(),
            Self::damped_power(),
        ]
    }

    /// Scalar covariance interpolated linearly from samples of `r(|t|)`;
    /// an approximation of whatever produced the table, clamped to the end
    /// values outside the sampled range.
    pub fn from_table(name: impl Into<String>, times: &[F], values: &[F]) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::PreconditionFailed(format!(
                "table has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::PreconditionFailed("table is empty".into()));
        }
        for pair in times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::PreconditionFailed(
                    "table times must be strictly increasing".into(),
                ));
            }
        }
        if times[0] < F::zero() {
            return Err(Error::NegativeTime {
                t: times[0].to_subset().unwrap_or(f64::NAN),
            });
        }
        let times = times.to_vec();
        let values = values.to_vec();
        Ok(Self::scalar(name, move |t| {
            let x = t.abs();
            if x <= times[0] {
                return values[0];
            }
            if x >= times[times.len() - 1] {
                return values[values.len() - 1];
            }
            let hi = times.partition_point(|&s| s < x);
            let (t0, t1) = (times[hi - 1], times[hi]);
            let w = (x - t0) / (t1 - t0);
            values[hi - 1] * (F::one() - w) + values[hi] * w
        }))
    }

    /// Gram matrix of the grid under the stationary form, blockwise
    /// `B(i, j) = basis^T r(t_i - t_j) basis`, with the standard basis by
    /// default. Positivity is Bochner's condition at this resolution.
    pub fn stationary_gram(
        &self,
        grid: &[F],
        basis: Option<&[DVector<F>]>,
        tols: &Tolerances<F>,
    ) -> Result<GramTest<F>> {
        let gram = self.block_gram(grid, basis, |ti, tj| ti - tj)?;
        Self::finish_gram(GramKind::Stationary, grid, gram, tols)
    }

    /// Gram matrix of the grid under the reflected form, blockwise
    /// `B(i, j) = basis^T r(t_i + t_j) basis`; the grid must be nonnegative.
    /// Positivity for every finite grid is reflection positivity of the
    /// covariance. An empty grid passes vacuously.
    pub fn os_gram(
        &self,
        grid: &[F],
        basis: Option<&[DVector<F>]>,
        tols: &Tolerances<F>,
    ) -> Result<GramTest<F>> {
        for &t in grid {
            if t < F::zero() {
                return Err(Error::NegativeTime {
                    t: t.to_subset().unwrap_or(f64::NAN),
                });
            }
        }
        let gram = self.block_gram(grid, basis, |ti, tj| ti + tj)?;
        Self::finish_gram(GramKind::Reflected, grid, gram, tols)
    }

    fn finish_gram(
        kind: GramKind,
        grid: &[F],
        gram: DMatrix<F>,
        tols: &Tolerances<F>,
    ) -> Result<GramTest<F>> {
        let report = if gram.is_empty() {
            PsdReport {
                min_eigenvalue: F::zero(),
                passed: true,
                tol: tols.tol_psd,
                witness: None,
            }
        } else {
            psd_check(&to_complex(&gram), tols.tol_psd)?
        };
        Ok(GramTest {
            kind,
            grid: grid.to_vec(),
            gram,
            report,
        })
    }

    fn block_gram(
        &self,
        grid: &[F],
        basis: Option<&[DVector<F>]>,
        combine: impl Fn(F, F) -> F,
    ) -> Result<DMatrix<F>> {
        let standard: Vec<DVector<F>>;
        let basis = match basis {
            Some(b) => b,
            None => {
                standard = (0..self.v_dim)
                    .map(|k| {
                        DVector::from_fn(self.v_dim, |i, _| {
                            if i == k {
                                F::one()
                            } else {
                                F::zero()
                            }
                        })
                    })
                    .collect();
                &standard
            }
        };
        for v in basis {
            if v.len() != self.v_dim {
                return Err(Error::DimensionMismatch {
                    context: "covariance basis vector".into(),
                    expected: self.v_dim,
                    got: v.len(),
                });
            }
        }
        let m = basis.len();
        let n = grid.len();
        let mut gram = DMatrix::<F>::zeros(n * m, n * m);
        for (i, &ti) in grid.iter().enumerate() {
            for (j, &tj) in grid.iter().enumerate() {
                let r = self.eval(combine(ti, tj));
                for (a, va) in basis.iter().enumerate() {
                    for (b, vb) in basis.iter().enumerate() {
                        gram[(i * m + a, j * m + b)] = (va.transpose() * &r * vb)[(0, 0)];
                    }
                }
            }
        }
        Ok(gram)
    }

    /// Residuals of `r(s) r(t) = r(s + t)` over nonnegative pairs; this
    /// holds exactly when `r` restricted to positive times is a semigroup,
    /// as for the pure exponential, and fails for genuine mixtures.
    pub fn semigroup_check(&self, pairs: &[(F, F)], tol: F) -> Result<SemigroupCheck<F>> {
        let mut residuals = Vec::with_capacity(pairs.len());
        for &(s, t) in pairs {
            if s < F::zero() || t < F::zero() {
                return Err(Error::NegativeTime {
                    t: s.min(t).to_subset().unwrap_or(f64::NAN),
                });
            }
            residuals.push((self.eval(s) * self.eval(t) - self.eval(s + t)).norm());
        }
        let max_residual = residuals.iter().copied().fold(F::zero(), F::max);
        Ok(SemigroupCheck {
            max_residual,
            residuals,
            tol,
            passed: max_residual <= tol,
        })
    }
}

/// Which quadratic form a Gram test exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramKind {
    /// Differences `r(t_i - t_j)`.
    Stationary,
    /// Sums `r(t_i + t_j)` over a nonnegative grid.
    Reflected,
}

/// A Gram matrix over a time grid together with its positivity report.
#[derive(Debug, Clone)]
pub struct GramTest<F: Scalar> {
    pub kind: GramKind,
    pub grid: Vec<F>,
    pub gram: DMatrix<F>,
    pub report: PsdReport<F>,
}

/// Outcome of testing the multiplicative law `r(s) r(t) = r(s + t)`.
#[derive(Debug, Clone)]
pub struct SemigroupCheck<F: Scalar> {
    pub max_residual: F,
    pub residuals: Vec<F>,
    pub tol: F,
    pub passed: bool,
}

/// The shift by `s` compressed to the quotient space of a reflected Gram:
/// eigendata of the base Gram, the compressed matrix at shifts `s` and
/// `2s`, and the defect of the squaring law between them.
#[derive(Debug, Clone)]
pub struct ReflectedShift<F: Scalar> {
    pub shift: F,
    pub k_dim: usize,
    /// Compressed shift at `s` on the quotient space, `k_dim` square.
    pub matrix: DMatrix<F>,
    /// Compressed shift at `2s` through the same base whitening.
    pub doubled: DMatrix<F>,
    /// `|matrix^2 - doubled|`; vanishes when the quotient shifts form a
    /// semigroup over the grid.
    pub law_residual: F,
    /// Kept eigenvalues of the base reflected Gram, descending.
    pub base_eigenvalues: Vec<F>,
    /// Kept eigenvectors of the base reflected Gram, one per column.
    pub basis: DMatrix<F>,
}

/// Compresses the time shift by `s` to the quotient of the reflected form
/// over `times`. The reflected Gram on the union of the grid with its
/// shifts by `s` and `2s` must be positive; the base Gram `r(t_i + t_j)`
/// is then whitened and the shifted Grams `r(t_i + t_j + s)` and
/// `r(t_i + t_j + 2s)` are expressed in the whitened coordinates.
pub fn reflected_semigroup<F: Scalar>(
    r: &CovarianceFunction<F>,
    times: &[F],
    s: F,
    tols: &Tolerances<F>,
) -> Result<ReflectedShift<F>> {
    if times.is_empty() {
        return Err(Error::GridTooSmall);
    }
    if s < F::zero() {
        return Err(Error::NegativeTime {
            t: s.to_subset().unwrap_or(f64::NAN),
        });
    }
    let mut union: Vec<F> = Vec::with_capacity(3 * times.len());
    for &t in times {
        if t < F::zero() {
            return Err(Error::NegativeTime {
                t: t.to_subset().unwrap_or(f64::NAN),
            });
        }
        union.push(t);
        union.push(t + s);
        union.push(t + s + s);
    }
    union.sort_by(|a, b| a.partial_cmp(b).expect("grid times are ordered"));
    union.dedup_by(|a, b| (*a - *b).abs() <= real::<F>(1e-14));
    let union_test = r.os_gram(&union, None, tols)?;
    if !union_test.report.passed {
        return Err(Error::NotOsPositive {
            min_eigenvalue: union_test
                .report
                .min_eigenvalue
                .to_subset()
                .unwrap_or(f64::NAN),
            tol: tols.tol_psd.to_subset().unwrap_or(f64::NAN),
        });
    }

    let base = r.block_gram(times, None, |ti, tj| ti + tj)?;
    let shifted = r.block_gram(times, None, |ti, tj| ti + tj + s)?;
    let doubled_shift = r.block_gram(times, None, |ti, tj| ti + tj + s + s)?;

    let eigen = nalgebra::SymmetricEigen::new(base.clone());
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("real eigenvalues are ordered")
    });
    let lambda_max = order
        .first()
        .map(|&i| eigen.eigenvalues[i])
        .unwrap_or(F::zero())
        .max(F::zero());
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eigen.eigenvalues[i] > tols.rank_gram * lambda_max)
        .collect();
    if kept.is_empty() {
        return Err(Error::GridTooSmall);
    }
    let k = kept.len();
    let n = base.nrows();
    let mut basis = DMatrix::<F>::zeros(n, k);
    let mut base_eigenvalues = Vec::with_capacity(k);
    for (col, &i) in kept.iter().enumerate() {
        basis.set_column(col, &eigen.eigenvectors.column(i));
        base_eigenvalues.push(eigen.eigenvalues[i]);
    }

    let compress = |g: &DMatrix<F>| -> DMatrix<F> {
        let mut m = basis.transpose() * g * &basis;
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] /= (base_eigenvalues[a] * base_eigenvalues[b]).sqrt();
            }
        }
        m
    };
    let matrix = compress(&shifted);
    let doubled = compress(&doubled_shift);
    let law_residual = (&matrix * &matrix - &doubled).norm();
    Ok(ReflectedShift {
        shift: s,
        k_dim: k,
        matrix,
        doubled,
        law_residual,
        base_eigenvalues,
        basis,
    })
}

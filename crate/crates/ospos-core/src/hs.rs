//! Quadrature discretization of the fractional kernel
//! `(1 - xy)^(s-1)` on `[-1, 1]` for `0 < s < 1`, together with its scaled
//! variants `a^(s-1) (1 - xy/a^2)^(s-1)` for `a > 1`. The kernel is a
//! positive mixture of the rank-one pieces `x^m y^m`, so the weighted Gram
//! is positive semidefinite, and compressing the scaled kernel against the
//! whitened Gram exposes a geometric eigenvalue ladder with ratio `a^(-2)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{psd_check, to_complex};
use crate::scalar::{real, Scalar, Tolerances};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
/// Roots are found by Newton iteration on the three-term recurrence; the
/// rule integrates polynomials of degree `2n - 1` exactly.
pub fn gauss_legendre<F: Scalar>(n: usize) -> Result<(Vec<F>, Vec<F>)> {
    if n < 2 {
        return Err(Error::QuadratureFailure(format!(
            "rule needs at least 2 nodes, got {n}"
        )));
    }
    let mut nodes = vec![F::zero(); n];
    let mut weights = vec![F::zero(); n];
    for i in 0..n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = real::<F>(guess);
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative::<F>(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= real::<F>(1e-15) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureFailure(format!(
                "Newton iteration stalled near node {i} of {n}"
            )));
        }
        let (_, dp) = legendre_with_derivative::<F>(n, x);
        let w = real::<F>(2.0) / ((F::one() - x * x) * dp * dp);
        // Roots come out descending from the cosine guess; mirror them
        // into ascending order and reuse the weight by symmetry.
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

/// Value and derivative of the degree-`n` Legendre polynomial at `x`,
/// via the recurrence `k P_k = (2k-1) x P_(k-1) - (k-1) P_(k-2)`.
fn legendre_with_derivative<F: Scalar>(n: usize, x: F) -> (F, F) {
    let mut prev = F::one();
    let mut cur = x;
    for k in 2..=n {
        let kf = real::<F>(k as f64);
        let next = ((real::<F>(2.0 * k as f64 - 1.0)) * x * cur - (kf - F::one()) * prev) / kf;
        prev = cur;
        cur = next;
    }
    let deriv = real::<F>(n as f64) * (x * cur - prev) / (x * x - F::one());
    (cur, deriv)
}

/// Quadrature discretization of the fractional kernel at exponent `s`:
/// Gauss-Legendre nodes and weights with the weighted Gram
/// `G(i, j) = w_i w_j (1 - x_i x_j)^(s-1)`, verified positive at build.
#[derive(Debug, Clone)]
pub struct HsDiscretization<F: Scalar> {
    s: F,
    nodes: Vec<F>,
    weights: Vec<F>,
    gram: DMatrix<F>,
}

impl<F: Scalar> HsDiscretization<F> {
    pub fn build(s: F, n: usize, tols: &Tolerances<F>) -> Result<Self> {
        if !(s > F::zero() && s < F::one()) {
            return Err(Error::InvalidS {
                s: s.to_subset().unwrap_or(f64::NAN),
            });
        }
        let (nodes, weights) = gauss_legendre::<F>(n)?;
        let gram = weighted_kernel(&nodes, &weights, s, F::one());
        let report = psd_check(&to_complex(&gram), tols.tol_psd)?;
        if !report.passed {
            return Err(Error::QuadratureFailure(format!(
                "kernel gram lost positivity: min eigenvalue {:.3e}",
                report.min_eigenvalue.to_subset().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            s,
            nodes,
            weights,
            gram,
        })
    }

    pub fn s(&self) -> F {
        self.s
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[F] {
        &self.nodes
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// The weighted Gram of the unscaled kernel.
    pub fn gram(&self) -> &DMatrix<F> {
        &self.gram
    }

    /// Quadrature of a function over `[-1, 1]` with this rule.
    pub fn integrate(&self, f: impl Fn(F) -> F) -> F {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .fold(F::zero(), |acc, v| acc + v)
    }

    /// Weighted matrix of the kernel scaled by `a > 1`:
    /// `A(i, j) = w_i w_j a^(s-1) (1 - x_i x_j / a^2)^(s-1)`. Scaling
    /// regularizes the kernel, so the matrix converges entrywise to the
    /// Gram as `a` decreases to 1.
    pub fn scaled_kernel(&self, a: F) -> Result<DMatrix<F>> {
        if a <= F::one() {
            return Err(Error::InvalidScale {
                a: a.to_subset().unwrap_or(f64::NAN),
            });
        }
        Ok(weighted_kernel(&self.nodes, &self.weights, self.s, a))
    }

    /// Extreme kept eigenvalues of the Gram at the `rank_gram` cutoff:
    /// the effective conditioning of the whitening step.
    pub fn gram_conditioning(&self, tols: &Tolerances<F>) -> GramConditioning<F> {
        let (values, _) = real_eigen_desc(&self.gram);
        let lambda_max = values.first().copied().unwrap_or(F::zero()).max(F::zero());
        let kept: Vec<F> = values
            .iter()
            .copied()
            .filter(|&v| v > tols.rank_gram * lambda_max)
            .collect();
        let lambda_min_kept = kept.last().copied().unwrap_or(F::zero());
        GramConditioning {
            lambda_max,
            lambda_min_kept,
            kept: kept.len(),
        }
    }

    /// Leading spectrum of the scaled kernel compressed to the whitened
    /// range of the Gram: with `G = V L V^T` restricted to eigenvalues
    /// above `rank_gram` times the largest, the compression is
    /// `L^(-1/2) V^T A V L^(-1/2)` and its `k` largest eigenvalues are
    /// returned descending. They track the ladder `a^(s-1-2m)`.
    pub fn dilation_spectrum(&self, a: F, k: usize, tols: &Tolerances<F>) -> Result<DilationSpectrum<F>> {
        let scaled = self.scaled_kernel(a)?;
        let (values, vectors) = real_eigen_desc(&self.gram);
        let lambda_max = values.first().copied().unwrap_or(F::zero()).max(F::zero());
        let kept: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] > tols.rank_gram * lambda_max)
            .collect();
        if k > kept.len() {
            return Err(Error::RankDeficient {
                requested: k,
                available: kept.len(),
            });
        }
        let m = kept.len();
        let n = self.n();
        let mut basis = DMatrix::<F>::zeros(n, m);
        for (col, &i) in kept.iter().enumerate() {
            basis.set_column(col, &vectors.column(i));
        }
        let mut compressed = basis.transpose() * &scaled * &basis;
        for i in 0..m {
            for j in 0..m {
                compressed[(i, j)] /= (values[kept[i]] * values[kept[j]]).sqrt();
            }
        }
        let symmetrized = (&compressed + compressed.transpose()) * real::<F>(0.5);
        let (mut spectrum, _) = real_eigen_desc(&symmetrized);
        spectrum.truncate(k);
        Ok(DilationSpectrum {
            scale: a,
            quotient_dim: m,
            eigenvalues: spectrum,
        })
    }
}

/// Extremes of the kept Gram spectrum under the whitening cutoff.
#[derive(Debug, Clone)]
pub struct GramConditioning<F: Scalar> {
    pub lambda_max: F,
    pub lambda_min_kept: F,
    pub kept: usize,
}

/// Leading eigenvalues of the compressed scaled kernel.
#[derive(Debug, Clone)]
pub struct DilationSpectrum<F: Scalar> {
    pub scale: F,
    /// Dimension of the whitened quotient the kernel was compressed to.
    pub quotient_dim: usize,
    /// Largest eigenvalues, descending.
    pub eigenvalues: Vec<F>,
}

/// Defect of a matrix from its transpose; the scaled kernel is symmetric
/// because the nodes enter only through the products `x_i x_j`.
#[derive(Debug, Clone)]
pub struct SymmetryCheck<F: Scalar> {
    pub residual: F,
    pub tol: F,
    pub passed: bool,
}

pub fn symmetry_check<F: Scalar>(m: &DMatrix<F>) -> SymmetryCheck<F> {
    let residual = (m - m.transpose()).norm();
    let tol = real::<F>(1e-12);
    SymmetryCheck {
        residual,
        tol,
        passed: residual <= tol,
    }
}

/// Compressed spectra across a ladder of rule sizes, with the successive
/// changes that certify convergence and the realized decay data of the
/// leading eigenvalues at the finest rule.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy<F: Scalar> {
    pub sizes: Vec<usize>,
    /// `k` leading eigenvalues per size, descending within each row.
    pub spectra: Vec<Vec<F>>,
    /// Largest elementwise change between consecutive sizes.
    pub successive_changes: Vec<F>,
    /// Ratio of the second eigenvalue to the first at the finest size.
    pub decay_ratio: Option<F>,
    /// `log_a` of the leading eigenvalue at the finest size.
    pub leading_exponent: F,
}

/// Runs [`HsDiscretization::dilation_spectrum`] across increasing rule
/// sizes and reports how the leading eigenvalues settle.
pub fn convergence_study<F: Scalar>(
    s: F,
    a: F,
    sizes: &[usize],
    k: usize,
    tols: &Tolerances<F>,
) -> Result<ConvergenceStudy<F>> {
    if sizes.is_empty() {
        return Err(Error::PreconditionFailed("no rule sizes given".into()));
    }
    if sizes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::PreconditionFailed(
            "rule sizes must be strictly increasing".into(),
        ));
    }
    let mut spectra = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let disc = HsDiscretization::build(s, n, tols)?;
        spectra.push(disc.dilation_spectrum(a, k, tols)?.eigenvalues);
    }
    let successive_changes = spectra
        .windows(2)
        .map(|pair| {
            pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(&x, &y)| (x - y).abs())
                .fold(F::zero(), F::max)
        })
        .collect();
    let finest = spectra.last().expect("sizes is nonempty");
    let decay_ratio = (finest.len() >= 2 && finest[0] != F::zero()).then(|| finest[1] / finest[0]);
    let leading_exponent = finest[0].ln() / a.ln();
    Ok(ConvergenceStudy {
        sizes: sizes.to_vec(),
        spectra,
        successive_changes,
        decay_ratio,
        leading_exponent,
    })
}

fn weighted_kernel<F: Scalar>(nodes: &[F], weights: &[F], s: F, a: F) -> DMatrix<F> {
    let n = nodes.len();
    let prefactor = a.powf(s - F::one());
    let inv_a2 = F::one() / (a * a);
    DMatrix::from_fn(n, n, |i, j| {
        weights[i]
            * weights[j]
            * prefactor
            * (F::one() - nodes[i] * nodes[j] * inv_a2).powf(s - F::one())
    })
}

fn real_eigen_desc<F: Scalar>(m: &DMatrix<F>) -> (Vec<F>, DMatrix<F>) {
    let eigen = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("symmetric eigenvalues are real")
    });
    let values: Vec<F> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<F>::zeros(m.nrows(), order.len());
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eigen.eigenvectors.column(i));
    }
    (values, vectors)
}

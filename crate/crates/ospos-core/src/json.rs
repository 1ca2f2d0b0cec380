//! JSON forms of the geometric objects for file and command-line exchange.
//! Complex entries travel as `[re, im]` pairs; bare reals are accepted on
//! input for convenience. Matrices carry an explicit row count, subspaces
//! an orthonormal frame, reflections their fixed space.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, Subspace};
use crate::markov::ProjectionTriple;
use crate::reflection::Reflection;

/// One matrix entry: written as `[re, im]`, read as that or a bare real.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Real(f64),
    Pair([f64; 2]),
}

impl EntryJson {
    pub fn value(self) -> Complex<f64> {
        match self {
            EntryJson::Real(re) => Complex::new(re, 0.0),
            EntryJson::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

impl From<Complex<f64>> for EntryJson {
    fn from(z: Complex<f64>) -> Self {
        EntryJson::Pair([z.re, z.im])
    }
}

/// Row-major complex matrix with an explicit row count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<EntryJson>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix<f64>) -> Self {
        Self {
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        if self.dim != self.entries.len() {
            return Err(Error::PreconditionFailed(format!(
                "matrix declares {} rows but lists {}",
                self.dim,
                self.entries.len()
            )));
        }
        rows_to_matrix(&self.entries)
    }
}

/// A matrix argument: the explicit form or bare nested rows.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Tagged(MatrixJson),
    Rows(Vec<Vec<EntryJson>>),
}

impl MatrixInput {
    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        match self {
            MatrixInput::Tagged(m) => m.to_matrix(),
            MatrixInput::Rows(rows) => rows_to_matrix(rows),
        }
    }
}

fn rows_to_matrix(rows: &[Vec<EntryJson>]) -> Result<CMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::PreconditionFailed(format!(
                "matrix row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].value()))
}

pub fn vector_json(v: &CVector<f64>) -> Vec<EntryJson> {
    v.iter().map(|&z| z.into()).collect()
}

/// Real matrix as plain nested rows, for report payloads that are real
/// by construction.
pub fn real_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Subspace given by an orthonormal frame, one column per basis vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub frame: MatrixJson,
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace<f64>) -> Self {
        Self {
            ambient_dim: s.ambient_dim(),
            frame: MatrixJson::from_matrix(s.frame()),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace<f64>> {
        let frame = self.frame.to_matrix()?;
        if frame.nrows() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "subspace frame rows against ambient dimension".into(),
                expected: self.ambient_dim,
                got: frame.nrows(),
            });
        }
        Subspace::from_orthonormal_frame(frame, 1e-8)
    }
}

/// Reflection given by its fixed space; the matrix is `2P - I` for the
/// fixed-space projection `P`, an involution by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionJson {
    pub ambient_dim: usize,
    pub fixed_space: SubspaceJson,
}

impl ReflectionJson {
    pub fn from_reflection(r: &Reflection<f64>) -> Self {
        Self {
            ambient_dim: r.ambient_dim(),
            fixed_space: SubspaceJson::from_subspace(r.fixed_space()),
        }
    }

    pub fn to_reflection(&self) -> Result<Reflection<f64>> {
        let fixed = self.fixed_space.to_subspace()?;
        if fixed.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "reflection fixed space against ambient dimension".into(),
                expected: self.ambient_dim,
                got: fixed.ambient_dim(),
            });
        }
        Ok(Reflection::from_fixed_space(fixed))
    }
}

/// Center, positive, and negative subspaces of a common ambient space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleJson {
    pub center: SubspaceJson,
    pub plus: SubspaceJson,
    pub minus: SubspaceJson,
}

impl TripleJson {
    pub fn from_triple(t: &ProjectionTriple<f64>) -> Self {
        Self {
            center: SubspaceJson::from_subspace(t.h_zero()),
            plus: SubspaceJson::from_subspace(t.h_plus()),
            minus: SubspaceJson::from_subspace(t.h_minus()),
        }
    }

    pub fn to_triple(&self) -> Result<ProjectionTriple<f64>> {
        ProjectionTriple::new(
            self.center.to_subspace()?,
            self.plus.to_subspace()?,
            self.minus.to_subspace()?,
        )
    }
}

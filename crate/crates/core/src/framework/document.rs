//! JSON document form of a setting.

use serde::{Deserialize, Serialize};

use super::{BuildOptions, Setting};
use crate::error::{Error, Result};
use crate::kernel::{ComplexMatrix, WeightedSpace};
use crate::scalar::{from_pair, to_pair, Real};

/// Dense complex matrix as rows of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub h: usize,
    pub boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub h: Vec<f64>,
    pub boundary: Vec<f64>,
}

/// Relation stored by the columns of its basis in `∂H ⊕ ∂H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationDoc {
    pub name: String,
    pub basis: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingDocument {
    pub dims: Dims,
    pub weights: Weights,
    #[serde(rename = "L")]
    pub l: MatrixDoc,
    #[serde(rename = "A")]
    pub a: MatrixDoc,
    #[serde(rename = "I")]
    pub i: MatrixDoc,
    #[serde(rename = "T")]
    pub t: MatrixDoc,
    pub lambda0: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationDoc>,
}

pub fn matrix_to_doc<R: Real>(m: &ndarray::Array2<crate::C<R>>) -> MatrixDoc {
    m.rows().into_iter().map(|row| row.iter().map(|z| to_pair::<R>(*z)).collect()).collect()
}

pub fn matrix_from_doc<R: Real>(doc: &MatrixDoc, rows: usize, cols: usize, what: &str) -> Result<ndarray::Array2<crate::C<R>>> {
    if doc.len() != rows || doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Serialization(format!("{what}: expected a {rows}x{cols} matrix")));
    }
    Ok(ndarray::Array2::from_shape_fn((rows, cols), |(i, j)| from_pair::<R>(doc[i][j])))
}

fn weights_from<R: Real>(w: &[f64], what: &str) -> Result<WeightedSpace<R>> {
    let v: Vec<R> = w.iter().map(|x| R::from_f64(*x).unwrap_or(R::nan())).collect();
    WeightedSpace::new(v).map_err(|e| Error::Serialization(format!("{what} weights: {e}")))
}

impl SettingDocument {
    pub fn from_setting<R: Real>(s: &Setting<R>) -> Self {
        let wf = |sp: &WeightedSpace<R>| sp.weights().iter().map(|x| x.to_f64().unwrap()).collect::<Vec<_>>();
        Self {
            dims: Dims { h: s.n(), boundary: s.n_boundary() },
            weights: Weights { h: wf(s.h()), boundary: wf(s.dh()) },
            l: matrix_to_doc::<R>(s.l().data()),
            a: matrix_to_doc::<R>(s.a().data()),
            i: matrix_to_doc::<R>(s.i().data()),
            t: matrix_to_doc::<R>(s.t().data()),
            lambda0: s.lambda0().to_f64().unwrap(),
            relations: Vec::new(),
        }
    }

    pub fn to_setting<R: Real>(&self) -> Result<Setting<R>> {
        self.to_setting_with(BuildOptions::default())
    }

    pub fn to_setting_with<R: Real>(&self, options: BuildOptions) -> Result<Setting<R>> {
        let (n, nd) = (self.dims.h, self.dims.boundary);
        let h = weights_from::<R>(&self.weights.h, "H")?;
        let dh = weights_from::<R>(&self.weights.boundary, "boundary")?;
        if h.dim() != n || dh.dim() != nd {
            return Err(Error::Serialization("weights do not match dims".into()));
        }
        let l = ComplexMatrix::new(matrix_from_doc::<R>(&self.l, n, n, "L")?, h.clone(), h.clone())?;
        let a = ComplexMatrix::new(matrix_from_doc::<R>(&self.a, nd, n, "A")?, h.clone(), dh.clone())?;
        let i = ComplexMatrix::new(matrix_from_doc::<R>(&self.i, n, nd, "I")?, dh.clone(), h.clone())?;
        let t = ComplexMatrix::new(matrix_from_doc::<R>(&self.t, nd, nd, "T")?, dh.clone(), dh)?;
        let lambda0 = R::from_f64(self.lambda0).ok_or(Error::InvalidLambda0)?;
        Setting::with_options(l, a, i, t, lambda0, options)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
    }
}

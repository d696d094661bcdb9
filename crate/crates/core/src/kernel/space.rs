use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, ArrayView1};
use num_traits::Float;

use super::error::{KResult, KernelError};
use crate::scalar::{czero, Real, C};

/// Finite-dimensional Hilbert space `C^n` with inner product
/// `<f, g> = sum_i w_i conj(f_i) g_i`.
#[derive(Clone)]
pub struct WeightedSpace<R: Real> {
    weights: Arc<Vec<R>>,
}

impl<R: Real> WeightedSpace<R> {
    pub fn new(weights: Vec<R>) -> KResult<Self> {
        if weights.is_empty() {
            return Err(KernelError::InvalidWeights("space must have positive dimension".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(Float::is_finite(**w) && **w > R::zero())) {
            return Err(KernelError::InvalidWeights(format!("weight {i} is {w}, must be finite and > 0")));
        }
        Ok(Self { weights: Arc::new(weights) })
    }

    /// Unit weights: the standard inner product on `C^n`.
    pub fn unit(dim: usize) -> Self {
        assert!(dim > 0, "space must have positive dimension");
        Self { weights: Arc::new(vec![R::one(); dim]) }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|w| *w == R::one())
    }

    pub fn sqrt_weights(&self) -> Vec<R> {
        self.weights.iter().map(|w| Float::sqrt(*w)).collect()
    }

    /// Orthogonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut w = Vec::with_capacity(self.dim() + other.dim());
        w.extend_from_slice(&self.weights);
        w.extend_from_slice(&other.weights);
        Self { weights: Arc::new(w) }
    }

    /// `<f, g>`, antilinear in `f`.
    pub fn inner(&self, f: ArrayView1<C<R>>, g: ArrayView1<C<R>>) -> C<R> {
        debug_assert_eq!(f.len(), self.dim());
        debug_assert_eq!(g.len(), self.dim());
        let mut acc = czero::<R>();
        for ((a, b), w) in f.iter().zip(g.iter()).zip(self.weights.iter()) {
            acc += (a.conj() * *b).scale(*w);
        }
        acc
    }

    pub fn norm(&self, f: ArrayView1<C<R>>) -> R {
        let mut acc = R::zero();
        for (a, w) in f.iter().zip(self.weights.iter()) {
            acc = acc + a.norm_sqr() * *w;
        }
        Float::sqrt(acc)
    }

    pub fn zeros(&self) -> Array1<C<R>> {
        Array1::from_elem(self.dim(), czero::<R>())
    }

    pub fn check_vector(&self, v: ArrayView1<C<R>>, context: &'static str) -> KResult<()> {
        if v.len() != self.dim() {
            return Err(KernelError::DimensionMismatch { context, expected: self.dim(), found: v.len() });
        }
        Ok(())
    }
}

impl<R: Real> PartialEq for WeightedSpace<R> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }
}

impl<R: Real> fmt::Debug for WeightedSpace<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            write!(f, "WeightedSpace(dim={}, unit)", self.dim())
        } else {
            write!(f, "WeightedSpace(dim={})", self.dim())
        }
    }
}

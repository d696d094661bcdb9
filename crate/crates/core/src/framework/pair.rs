//! Maps out of, and column blocks in, the pair space `H ⊕ ∂H`.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::kernel::{dense, ComplexMatrix, WeightedSpace};
use crate::scalar::{Real, C};

/// Element `(f0, phi)` of the pair space, standing for `f0 + G_base phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainVector<R: Real> {
    pub f0: Array1<C<R>>,
    pub phi: Array1<C<R>>,
    pub base_lambda: R,
}

/// Columns `(f0_j, phi_j)` of pair-space vectors in the `lambda0` base.
#[derive(Clone, Debug, PartialEq)]
pub struct PairBlock<R: Real> {
    pub f0: Array2<C<R>>,
    pub phi: Array2<C<R>>,
}

impl<R: Real> PairBlock<R> {
    pub fn new(f0: Array2<C<R>>, phi: Array2<C<R>>) -> Self {
        assert_eq!(f0.ncols(), phi.ncols(), "pair block column counts");
        Self { f0, phi }
    }

    pub fn cols(&self) -> usize {
        self.f0.ncols()
    }

    /// Stacked `[f0; phi]` array.
    pub fn stacked(&self) -> Array2<C<R>> {
        dense::vstack(self.f0.view(), self.phi.view())
    }

    pub fn from_stacked(a: &Array2<C<R>>, n: usize) -> Self {
        Self { f0: dense::top_rows(a, n), phi: dense::bottom_rows(a, n) }
    }

    pub fn column(&self, j: usize, base_lambda: R) -> DomainVector<R> {
        DomainVector { f0: self.f0.column(j).to_owned(), phi: self.phi.column(j).to_owned(), base_lambda }
    }

    /// Right multiplication of the coordinates: columns `sum_k v_k c_kj`.
    pub fn times(&self, c: ArrayView2<C<R>>) -> Self {
        Self { f0: self.f0.dot(&c), phi: self.phi.dot(&c) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { f0: &self.f0 + &other.f0, phi: &self.phi + &other.phi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { f0: &self.f0 - &other.f0, phi: &self.phi - &other.phi }
    }
}

/// Linear map `X ← H ⊕ ∂H` given by its restrictions to both components.
#[derive(Clone, Debug)]
pub struct PairMap<R: Real> {
    pub on_f0: ComplexMatrix<R>,
    pub on_phi: ComplexMatrix<R>,
}

impl<R: Real> PairMap<R> {
    pub fn new(on_f0: ComplexMatrix<R>, on_phi: ComplexMatrix<R>) -> Result<Self> {
        if on_f0.cod() != on_phi.cod() {
            return Err(Error::InvalidInput("pair map components have different codomains".into()));
        }
        Ok(Self { on_f0, on_phi })
    }

    pub fn cod(&self) -> &WeightedSpace<R> {
        self.on_f0.cod()
    }

    pub fn apply(&self, v: &DomainVector<R>) -> Array1<C<R>> {
        self.on_f0.data().dot(&v.f0) + self.on_phi.data().dot(&v.phi)
    }

    pub fn apply_block(&self, b: &PairBlock<R>) -> Array2<C<R>> {
        self.on_f0.data().dot(&b.f0) + self.on_phi.data().dot(&b.phi)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { on_f0: self.on_f0.add(&other.on_f0)?, on_phi: self.on_phi.add(&other.on_phi)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { on_f0: self.on_f0.sub(&other.on_f0)?, on_phi: self.on_phi.sub(&other.on_phi)? })
    }

    pub fn scale(&self, z: C<R>) -> Self {
        Self { on_f0: self.on_f0.scale(z), on_phi: self.on_phi.scale(z) }
    }

    /// `m ∘ self`.
    pub fn then(&self, m: &ComplexMatrix<R>) -> Result<Self> {
        Ok(Self { on_f0: m.matmul(&self.on_f0)?, on_phi: m.matmul(&self.on_phi)? })
    }

    /// Single matrix on the pair space `[on_f0, on_phi]`.
    pub fn stacked(&self, pair: &WeightedSpace<R>) -> Result<ComplexMatrix<R>> {
        let data = dense::hstack(self.on_f0.view(), self.on_phi.view());
        Ok(ComplexMatrix::new(data, pair.clone(), self.cod().clone())?)
    }
}

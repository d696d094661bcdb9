//! Spectral representations of the self-adjoint operator `L`, used to apply
//! `R(lambda, L) = (lambda - L)^{-1}` for many `lambda` without refactoring.

use ndarray::{s, Array1, Array2, ArrayView2};
use num_traits::Float;

use crate::kernel::{dense, hermitian_eig, ComplexMatrix, KResult, WeightedSpace};
use crate::scalar::{creal, Real, C};

/// Block of `L` acting as `D ⊗ Id_inner` on the coordinates
/// `offset .. offset + rows * inner`, ordered with the `D` index major.
#[derive(Clone, Debug)]
pub struct KroneckerBlock<R: Real> {
    pub offset: usize,
    pub rows: usize,
    pub inner: usize,
    /// Eigenvalues of `D`.
    pub values: Array1<R>,
    /// Orthonormal eigenvectors of `D` (columns).
    pub vectors: Array2<C<R>>,
}

impl<R: Real> KroneckerBlock<R> {
    /// Block from a real symmetric coordinate matrix `d`.
    pub fn from_symmetric(offset: usize, d: &Array2<R>, inner: usize) -> KResult<Self> {
        let rows = d.nrows();
        let complex = d.mapv(creal::<R>);
        let sp = WeightedSpace::unit(rows);
        let e = hermitian_eig(&ComplexMatrix::on(complex, &sp)?, crate::kernel::tol::<R>().hermitian_input)?;
        Ok(Self { offset, rows, inner, values: e.values, vectors: e.vectors.into_data() })
    }

    pub fn dim(&self) -> usize {
        self.rows * self.inner
    }

    /// `f(D) ⊗ Id` applied to the block rows of `x`.
    fn apply_function(&self, x: ArrayView2<C<R>>, f: impl Fn(R) -> C<R>) -> Array2<C<R>> {
        let k = x.ncols();
        let block = x.as_standard_layout().into_owned();
        let flat = block.into_shape_with_order((self.rows, self.inner * k)).expect("block shape");
        let coeff = dense::conj_t(self.vectors.view()).dot(&flat);
        let scaled = Array2::from_shape_fn(coeff.dim(), |(i, j)| coeff[(i, j)] * f(self.values[i]));
        let out = self.vectors.dot(&scaled);
        out.into_shape_with_order((self.rows * self.inner, k)).expect("block shape")
    }
}

#[derive(Clone, Debug)]
enum Representation<R: Real> {
    Dense {
        values: Array1<R>,
        /// Weighted-orthonormal eigenvectors.
        vectors: Array2<C<R>>,
        weights: Vec<R>,
    },
    Blocks(Vec<KroneckerBlock<R>>),
}

/// Eigen-structure of `L` in one of two forms.
#[derive(Clone, Debug)]
pub struct FreeSpectrum<R: Real> {
    dim: usize,
    repr: Representation<R>,
    sorted: Vec<R>,
}

impl<R: Real> FreeSpectrum<R> {
    /// Dense eigendecomposition of a weighted-Hermitian `l`.
    pub fn dense(l: &ComplexMatrix<R>, tol_herm: R) -> KResult<Self> {
        let e = hermitian_eig(l, tol_herm)?;
        let sorted = e.values.to_vec();
        Ok(Self {
            dim: l.rows(),
            repr: Representation::Dense { values: e.values, vectors: e.vectors.into_data(), weights: l.dom().weights().to_vec() },
            sorted,
        })
    }

    /// Block-diagonal Kronecker form; the blocks must tile `0..dim`.
    pub fn blocks(mut blocks: Vec<KroneckerBlock<R>>) -> Self {
        blocks.sort_by_key(|b| b.offset);
        let mut next = 0;
        for b in &blocks {
            assert_eq!(b.offset, next, "Kronecker blocks must tile the space");
            next += b.dim();
        }
        let mut sorted: Vec<R> = blocks.iter().flat_map(|b| b.values.iter().flat_map(move |v| std::iter::repeat(*v).take(b.inner))).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { dim: next, repr: Representation::Blocks(blocks), sorted }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues of `L`, ascending, with multiplicity.
    pub fn eigenvalues(&self) -> &[R] {
        &self.sorted
    }

    pub fn min(&self) -> R {
        self.sorted[0]
    }

    pub fn max(&self) -> R {
        self.sorted[self.sorted.len() - 1]
    }

    pub fn norm(&self) -> R {
        Float::abs(self.min()).max(Float::abs(self.max()))
    }

    /// `min_k |lambda - e_k|`, which equals `sigma_min(lambda - L)`.
    pub fn distance(&self, lambda: C<R>) -> R {
        self.sorted.iter().fold(R::infinity(), |m, e| m.min((lambda - creal::<R>(*e)).norm()))
    }

    /// `f(L) x` for a scalar function `f` of the eigenvalues.
    pub fn apply_function(&self, x: ArrayView2<C<R>>, f: impl Fn(R) -> C<R> + Copy) -> Array2<C<R>> {
        assert_eq!(x.nrows(), self.dim);
        match &self.repr {
            Representation::Dense { values, vectors, weights } => {
                // V^{-1} = V^H W for weighted-orthonormal V
                let wx = Array2::from_shape_fn(x.dim(), |(i, j)| x[(i, j)].scale(weights[i]));
                let coeff = dense::conj_t(vectors.view()).dot(&wx);
                let scaled = Array2::from_shape_fn(coeff.dim(), |(i, j)| coeff[(i, j)] * f(values[i]));
                vectors.dot(&scaled)
            }
            Representation::Blocks(blocks) => {
                let mut out = Array2::from_elem(x.dim(), creal::<R>(R::zero()));
                for b in blocks {
                    let r = b.offset..b.offset + b.dim();
                    let y = b.apply_function(x.slice(s![r.clone(), ..]), f);
                    out.slice_mut(s![r, ..]).assign(&y);
                }
                out
            }
        }
    }

    /// `R(lambda, L) x`; the caller guarantees `lambda` is off the spectrum.
    pub fn resolve(&self, lambda: C<R>, x: ArrayView2<C<R>>) -> Array2<C<R>> {
        let one = creal::<R>(R::one());
        self.apply_function(x, move |e| one / (lambda - creal::<R>(e)))
    }
}

use std::ops::Range;

use ndarray::{s, Array1, Array2, ArrayView2};
use num_traits::Float;

use super::dense;
use super::error::{KResult, KernelError};
use super::space::WeightedSpace;
use crate::scalar::{Real, C};

/// Linear map `dom -> cod` between weighted spaces, stored as a
/// `cod.dim() x dom.dim()` array of complex entries.
#[derive(Clone, Debug)]
pub struct ComplexMatrix<R: Real> {
    data: Array2<C<R>>,
    dom: WeightedSpace<R>,
    cod: WeightedSpace<R>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn new(data: Array2<C<R>>, dom: WeightedSpace<R>, cod: WeightedSpace<R>) -> KResult<Self> {
        if data.nrows() != cod.dim() {
            return Err(KernelError::DimensionMismatch { context: "matrix rows vs codomain", expected: cod.dim(), found: data.nrows() });
        }
        if data.ncols() != dom.dim() {
            return Err(KernelError::DimensionMismatch { context: "matrix columns vs domain", expected: dom.dim(), found: data.ncols() });
        }
        Ok(Self { data, dom, cod })
    }

    /// Square matrix acting on one space.
    pub fn on(data: Array2<C<R>>, space: &WeightedSpace<R>) -> KResult<Self> {
        Self::new(data, space.clone(), space.clone())
    }

    /// Internal constructor for shapes known to be consistent.
    pub(crate) fn raw(data: Array2<C<R>>, dom: &WeightedSpace<R>, cod: &WeightedSpace<R>) -> Self {
        debug_assert_eq!(data.dim(), (cod.dim(), dom.dim()));
        Self { data, dom: dom.clone(), cod: cod.clone() }
    }

    pub fn zeros(dom: &WeightedSpace<R>, cod: &WeightedSpace<R>) -> Self {
        Self::raw(dense::zeros::<R>(cod.dim(), dom.dim()), dom, cod)
    }

    pub fn identity(space: &WeightedSpace<R>) -> Self {
        Self::raw(dense::eye::<R>(space.dim()), space, space)
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<C<R>> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, C<R>> {
        self.data.view()
    }

    pub fn into_data(self) -> Array2<C<R>> {
        self.data
    }

    pub fn dom(&self) -> &WeightedSpace<R> {
        &self.dom
    }

    pub fn cod(&self) -> &WeightedSpace<R> {
        &self.cod
    }

    pub fn is_square(&self) -> bool {
        self.dom == self.cod
    }

    /// Weighted adjoint `W_dom^{-1} M^H W_cod`, so that
    /// `<adj(M) y, x>_dom = <y, M x>_cod`.
    pub fn adjoint(&self) -> Self {
        let wd = self.dom.weights();
        let wc = self.cod.weights();
        let (m, n) = self.data.dim();
        let data = Array2::from_shape_fn((n, m), |(j, i)| self.data[(i, j)].conj().scale(wc[i] / wd[j]));
        Self::raw(data, &self.cod, &self.dom)
    }

    /// `self * rhs`; requires `rhs.cod == self.dom`.
    pub fn matmul(&self, rhs: &Self) -> KResult<Self> {
        if rhs.cod != self.dom {
            return Err(KernelError::SpaceMismatch { context: "matrix product" });
        }
        Ok(Self::raw(self.data.dot(&rhs.data), &rhs.dom, &self.cod))
    }

    pub fn apply(&self, v: &Array1<C<R>>) -> KResult<Array1<C<R>>> {
        self.dom.check_vector(v.view(), "matrix-vector product")?;
        Ok(self.data.dot(v))
    }

    fn same_spaces(&self, other: &Self, context: &'static str) -> KResult<()> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(KernelError::SpaceMismatch { context });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> KResult<Self> {
        self.same_spaces(other, "matrix sum")?;
        Ok(Self::raw(&self.data + &other.data, &self.dom, &self.cod))
    }

    pub fn sub(&self, other: &Self) -> KResult<Self> {
        self.same_spaces(other, "matrix difference")?;
        Ok(Self::raw(&self.data - &other.data, &self.dom, &self.cod))
    }

    pub fn scale(&self, z: C<R>) -> Self {
        Self::raw(self.data.mapv(|x| x * z), &self.dom, &self.cod)
    }

    /// `self + z * Id`; requires a square matrix on one space.
    pub fn shift(&self, z: C<R>) -> KResult<Self> {
        if !self.is_square() {
            return Err(KernelError::SpaceMismatch { context: "diagonal shift" });
        }
        Ok(Self::raw(dense::add_diag(self.data.view(), z), &self.dom, &self.cod))
    }

    /// Representation in orthonormal coordinates: `W_cod^{1/2} M W_dom^{-1/2}`.
    pub fn flat(&self) -> Array2<C<R>> {
        let left = self.cod.sqrt_weights();
        let right: Vec<R> = self.dom.sqrt_weights().iter().map(|w| R::one() / *w).collect();
        dense::scale_rows_cols(self.data.view(), &left, &right)
    }

    /// Inverse of [`ComplexMatrix::flat`].
    pub fn from_flat(flat: ArrayView2<C<R>>, dom: &WeightedSpace<R>, cod: &WeightedSpace<R>) -> KResult<Self> {
        let left: Vec<R> = cod.sqrt_weights().iter().map(|w| R::one() / *w).collect();
        let right = dom.sqrt_weights();
        Self::new(dense::scale_rows_cols(flat, &left, &right), dom.clone(), cod.clone())
    }

    /// Frobenius norm of the orthonormal-coordinate representation.
    pub fn norm_fro(&self) -> R {
        dense::fro(self.flat().view())
    }

    /// Weighted operator norm (largest singular value).
    pub fn norm(&self) -> R {
        super::decomp::spectral_norm_flat(self.flat().view())
    }

    /// `||M - adj(M)||_F / ||M||_F` in orthonormal coordinates (0 for M = 0).
    pub fn hermiticity_deviation(&self) -> KResult<R> {
        if !self.is_square() {
            return Err(KernelError::SpaceMismatch { context: "Hermiticity test" });
        }
        let f = self.flat();
        let n = f.nrows();
        let mut diff = R::zero();
        let mut total = R::zero();
        for i in 0..n {
            for j in 0..n {
                diff = diff + (f[(i, j)] - f[(j, i)].conj()).norm_sqr();
                total = total + f[(i, j)].norm_sqr();
            }
        }
        if total == R::zero() {
            return Ok(R::zero());
        }
        Ok(Float::sqrt(diff / total))
    }

    /// `||self - other||_F / max(||other||_F, tiny)` in orthonormal coordinates.
    pub fn relative_distance(&self, other: &Self) -> KResult<R> {
        self.same_spaces(other, "relative distance")?;
        let d = self.sub(other)?.norm_fro();
        let base = other.norm_fro().max(R::min_positive_value());
        Ok(if d == R::zero() { R::zero() } else { d / base })
    }

    /// Sub-block with the given row and column ranges, between the
    /// corresponding coordinate subspaces.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let dom = WeightedSpace::new(self.dom.weights()[cols.clone()].to_vec()).expect("non-empty block");
        let cod = WeightedSpace::new(self.cod.weights()[rows.clone()].to_vec()).expect("non-empty block");
        Self::raw(self.data.slice(s![rows, cols]).to_owned(), &dom, &cod)
    }

    /// Same entries, reinterpreted between other spaces of equal dimensions.
    pub fn with_spaces(self, dom: &WeightedSpace<R>, cod: &WeightedSpace<R>) -> KResult<Self> {
        Self::new(self.data, dom.clone(), cod.clone())
    }
}

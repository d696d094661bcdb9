//! Finite-dimensional subspaces of a weighted space.

use std::sync::OnceLock;

use ndarray::{s, Array1, Array2, ArrayView2};
use num_traits::Float;

use super::decomp::{rank_of, spectral_norm_flat, svd_flat, svd_full_flat};
use super::dense::{self, conj_t};
use super::error::{KResult, KernelError};
use super::matrix::ComplexMatrix;
use super::space::WeightedSpace;
use super::tol::tol;
use crate::scalar::{Real, C};

/// Subspace spanned by the columns of `basis` (weighted coordinates).
///
/// An orthonormal basis in flat coordinates is computed on first use.
#[derive(Debug)]
pub struct Subspace<R: Real> {
    space: WeightedSpace<R>,
    basis: Array2<C<R>>,
    onb: OnceLock<Array2<C<R>>>,
}

impl<R: Real> Clone for Subspace<R> {
    fn clone(&self) -> Self {
        let onb = OnceLock::new();
        if let Some(q) = self.onb.get() {
            let _ = onb.set(q.clone());
        }
        Self { space: self.space.clone(), basis: self.basis.clone(), onb }
    }
}

fn to_flat<R: Real>(space: &WeightedSpace<R>, a: ArrayView2<C<R>>) -> Array2<C<R>> {
    let ones = vec![R::one(); a.ncols()];
    dense::scale_rows_cols(a, &space.sqrt_weights(), &ones)
}

fn from_flat<R: Real>(space: &WeightedSpace<R>, a: ArrayView2<C<R>>) -> Array2<C<R>> {
    let inv: Vec<R> = space.sqrt_weights().iter().map(|w| R::one() / *w).collect();
    let ones = vec![R::one(); a.ncols()];
    dense::scale_rows_cols(a, &inv, &ones)
}

fn orthonormalize<R: Real>(flat: ArrayView2<C<R>>) -> KResult<Array2<C<R>>> {
    let (n, k) = flat.dim();
    if k == 0 || dense::max_abs(flat) == R::zero() {
        return Ok(dense::zeros::<R>(n, 0));
    }
    let (u, s, _) = svd_flat(flat)?;
    let r = rank_of(&s, tol::<R>().rank_rel);
    Ok(u.slice(s![.., ..r]).to_owned())
}

impl<R: Real> Subspace<R> {
    /// Span of arbitrary (possibly dependent) columns; the basis is reduced
    /// to an independent one immediately.
    pub fn span(space: &WeightedSpace<R>, vectors: ArrayView2<C<R>>) -> KResult<Self> {
        if vectors.nrows() != space.dim() {
            return Err(KernelError::DimensionMismatch { context: "subspace vectors", expected: space.dim(), found: vectors.nrows() });
        }
        let q = orthonormalize(to_flat(space, vectors).view())?;
        let basis = from_flat(space, q.view());
        let onb = OnceLock::new();
        let _ = onb.set(q);
        Ok(Self { space: space.clone(), basis, onb })
    }

    /// Span of columns the caller guarantees to be linearly independent.
    /// No decomposition happens until a metric query needs one.
    pub fn from_independent(space: &WeightedSpace<R>, basis: Array2<C<R>>) -> KResult<Self> {
        if basis.nrows() != space.dim() {
            return Err(KernelError::DimensionMismatch { context: "subspace basis", expected: space.dim(), found: basis.nrows() });
        }
        Ok(Self { space: space.clone(), basis, onb: OnceLock::new() })
    }

    pub fn zero(space: &WeightedSpace<R>) -> Self {
        Self::from_independent(space, dense::zeros::<R>(space.dim(), 0)).expect("shape")
    }

    pub fn whole(space: &WeightedSpace<R>) -> Self {
        Self::from_independent(space, dense::eye::<R>(space.dim())).expect("shape")
    }

    pub fn space(&self) -> &WeightedSpace<R> {
        &self.space
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    /// Basis columns in weighted coordinates.
    pub fn basis(&self) -> &Array2<C<R>> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis in flat coordinates (`W^{1/2}` times weighted ones).
    pub fn onb_flat(&self) -> &Array2<C<R>> {
        self.onb.get_or_init(|| {
            orthonormalize(to_flat(&self.space, self.basis.view()).view()).unwrap_or_else(|_| dense::zeros::<R>(self.space.dim(), 0))
        })
    }

    /// Orthonormal basis in weighted coordinates.
    pub fn onb(&self) -> Array2<C<R>> {
        from_flat(&self.space, self.onb_flat().view())
    }

    fn check_same_space(&self, other: &Self, context: &'static str) -> KResult<()> {
        if self.space != other.space {
            return Err(KernelError::SpaceMismatch { context });
        }
        Ok(())
    }

    /// Distance `||P_self - P_other||_2` of orthogonal projectors; 1 when the
    /// dimensions differ.
    pub fn distance(&self, other: &Self) -> KResult<R> {
        self.check_same_space(other, "subspace distance")?;
        let q1 = self.onb_flat();
        let q2 = other.onb_flat();
        if q1.ncols() != q2.ncols() {
            return Ok(R::one());
        }
        if q1.ncols() == 0 {
            return Ok(R::zero());
        }
        let r = q2 - &q1.dot(&conj_t(q1.view()).dot(q2));
        Ok(spectral_norm_flat(r.view()).min(R::one()))
    }

    /// Largest distance of a unit vector of `other` from `self`.
    pub fn excess(&self, other: &Self) -> KResult<R> {
        self.check_same_space(other, "subspace inclusion")?;
        let q1 = self.onb_flat();
        let q2 = other.onb_flat();
        if q2.ncols() == 0 {
            return Ok(R::zero());
        }
        if q1.ncols() == 0 {
            return Ok(R::one());
        }
        let r = q2 - &q1.dot(&conj_t(q1.view()).dot(q2));
        Ok(spectral_norm_flat(r.view()))
    }

    /// `other ⊆ self` up to the subspace tolerance.
    pub fn contains(&self, other: &Self) -> KResult<bool> {
        Ok(self.excess(other)? <= tol::<R>().subspace)
    }

    /// Relative distance of `v` from the subspace (0 for `v = 0`).
    pub fn vector_defect(&self, v: &Array1<C<R>>) -> KResult<R> {
        self.space.check_vector(v.view(), "subspace membership")?;
        let f: Array1<C<R>> = v.iter().zip(self.space.sqrt_weights()).map(|(z, w)| z.scale(w)).collect();
        let nv = dense::vec_norm(&f);
        if nv == R::zero() {
            return Ok(R::zero());
        }
        let q = self.onb_flat();
        let r = &f - &q.dot(&conj_t(q.view()).dot(&f));
        Ok(dense::vec_norm(&r) / nv)
    }

    /// Orthogonal complement in the weighted inner product.
    pub fn complement(&self) -> KResult<Self> {
        let n = self.space.dim();
        let q = self.onb_flat();
        let r = q.ncols();
        if r == 0 {
            return Ok(Self::whole(&self.space));
        }
        if r == n {
            return Ok(Self::zero(&self.space));
        }
        let (u, _, _) = svd_full_flat(q.view())?;
        let perp = u.slice(s![.., r..]).to_owned();
        let basis = from_flat(&self.space, perp.view());
        let onb = OnceLock::new();
        let _ = onb.set(perp);
        Ok(Self { space: self.space.clone(), basis, onb })
    }

    pub fn sum(&self, other: &Self) -> KResult<Self> {
        self.check_same_space(other, "subspace sum")?;
        let joined = dense::hstack(self.onb_flat().view(), other.onb_flat().view());
        let q = orthonormalize(joined.view())?;
        let basis = from_flat(&self.space, q.view());
        let onb = OnceLock::new();
        let _ = onb.set(q);
        Ok(Self { space: self.space.clone(), basis, onb })
    }

    pub fn intersection(&self, other: &Self) -> KResult<Self> {
        self.check_same_space(other, "subspace intersection")?;
        let q1 = self.onb_flat();
        let q2 = other.onb_flat();
        if q1.ncols() == 0 || q2.ncols() == 0 {
            return Ok(Self::zero(&self.space));
        }
        let stacked = dense::hstack(q1.view(), q2.mapv(|z| -z).view());
        let k = null_columns_flat(stacked.view())?;
        let top = k.slice(s![..q1.ncols(), ..]).to_owned();
        let vecs = q1.dot(&top);
        Self::span(&self.space, from_flat(&self.space, vecs.view()).view())
    }

    /// Image under a matrix whose domain is this subspace's space.
    pub fn image(&self, m: &ComplexMatrix<R>) -> KResult<Self> {
        if m.dom() != &self.space {
            return Err(KernelError::SpaceMismatch { context: "subspace image" });
        }
        Self::span(m.cod(), m.data().dot(&self.basis).view())
    }

    /// Kernel of `m` as a subspace of its domain.
    pub fn nullspace(m: &ComplexMatrix<R>) -> KResult<Self> {
        let flat = m.flat();
        let k = null_columns_flat(flat.view())?;
        let basis = from_flat(m.dom(), k.view());
        let onb = OnceLock::new();
        let _ = onb.set(k);
        Ok(Self { space: m.dom().clone(), basis, onb })
    }

    /// Range of `m` as a subspace of its codomain.
    pub fn column_space(m: &ComplexMatrix<R>) -> KResult<Self> {
        Self::span(m.cod(), m.view())
    }
}

/// Orthonormal basis of the kernel of a raw array.
pub fn null_columns_flat<R: Real>(a: ArrayView2<C<R>>) -> KResult<Array2<C<R>>> {
    let (m, n) = a.dim();
    if n == 0 {
        return Ok(dense::zeros::<R>(0, 0));
    }
    if m == 0 || dense::max_abs(a) == R::zero() {
        return Ok(dense::eye::<R>(n));
    }
    let (_, s, vt) = svd_full_flat(a)?;
    let smax = s[0];
    let cutoff = tol::<R>().rank_rel * smax.max(R::min_positive_value());
    let r = s.iter().filter(|x| **x > cutoff).count();
    let v = conj_t(vt.view());
    Ok(v.slice(s![.., r..]).to_owned())
}

/// Symmetric gap `max(excess(a, b), excess(b, a))`.
pub fn gap<R: Real>(a: &Subspace<R>, b: &Subspace<R>) -> KResult<R> {
    let d1 = a.excess(b)?;
    let d2 = b.excess(a)?;
    Ok(Float::max(d1, d2))
}

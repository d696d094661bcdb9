//! Raw helpers on `Array2<C<R>>` used by the higher-level types.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use num_traits::Float;

use crate::scalar::{cone, czero, Real, C};

pub fn conj_t<R: Real>(a: ArrayView2<C<R>>) -> Array2<C<R>> {
    let (m, n) = a.dim();
    Array2::from_shape_fn((n, m), |(i, j)| a[(j, i)].conj())
}

pub fn eye<R: Real>(n: usize) -> Array2<C<R>> {
    let mut a = Array2::from_elem((n, n), czero::<R>());
    for i in 0..n {
        a[(i, i)] = cone::<R>();
    }
    a
}

pub fn zeros<R: Real>(m: usize, n: usize) -> Array2<C<R>> {
    Array2::from_elem((m, n), czero::<R>())
}

/// `diag(left) * a * diag(right)` with real diagonals.
pub fn scale_rows_cols<R: Real>(a: ArrayView2<C<R>>, left: &[R], right: &[R]) -> Array2<C<R>> {
    let (m, n) = a.dim();
    let mut out = a.to_owned();
    for i in 0..m {
        for j in 0..n {
            out[(i, j)] = out[(i, j)].scale(left[i] * right[j]);
        }
    }
    out
}

pub fn fro<R: Real>(a: ArrayView2<C<R>>) -> R {
    let mut acc = R::zero();
    for z in a.iter() {
        acc = acc + z.norm_sqr();
    }
    Float::sqrt(acc)
}

/// Largest absolute column sum.
pub fn norm1<R: Real>(a: ArrayView2<C<R>>) -> R {
    a.columns().into_iter().map(|c| c.iter().fold(R::zero(), |acc, z| acc + z.norm())).fold(R::zero(), |m, x| m.max(x))
}

pub fn max_abs<R: Real>(a: ArrayView2<C<R>>) -> R {
    a.iter().fold(R::zero(), |m, z| m.max(z.norm()))
}

pub fn vec_norm<R: Real>(v: &Array1<C<R>>) -> R {
    Float::sqrt(v.iter().fold(R::zero(), |m, z| m + z.norm_sqr()))
}

/// `a + z * I`.
pub fn add_diag<R: Real>(a: ArrayView2<C<R>>, z: C<R>) -> Array2<C<R>> {
    let mut out = a.to_owned();
    let n = out.nrows().min(out.ncols());
    for i in 0..n {
        out[(i, i)] += z;
    }
    out
}

/// `(a + a^H) / 2`.
pub fn hermitian_part<R: Real>(a: ArrayView2<C<R>>) -> Array2<C<R>> {
    let n = a.nrows();
    let half = crate::scalar::re::<R>(0.5);
    Array2::from_shape_fn((n, n), |(i, j)| (a[(i, j)] + a[(j, i)].conj()).scale(half))
}

pub fn vstack<R: Real>(top: ArrayView2<C<R>>, bottom: ArrayView2<C<R>>) -> Array2<C<R>> {
    ndarray::concatenate(Axis(0), &[top, bottom]).expect("column counts agree")
}

pub fn hstack<R: Real>(left: ArrayView2<C<R>>, right: ArrayView2<C<R>>) -> Array2<C<R>> {
    ndarray::concatenate(Axis(1), &[left, right]).expect("row counts agree")
}

pub fn top_rows<R: Real>(a: &Array2<C<R>>, k: usize) -> Array2<C<R>> {
    a.slice(s![..k, ..]).to_owned()
}

pub fn bottom_rows<R: Real>(a: &Array2<C<R>>, k: usize) -> Array2<C<R>> {
    a.slice(s![k.., ..]).to_owned()
}

pub fn to_col_major<R: Real>(a: ArrayView2<C<R>>) -> Vec<C<R>> {
    a.t().iter().cloned().collect()
}

pub fn from_col_major<R: Real>(v: Vec<C<R>>, rows: usize, cols: usize) -> Array2<C<R>> {
    Array2::from_shape_vec((cols, rows), v).expect("buffer length").reversed_axes().as_standard_layout().to_owned()
}

pub fn scale<R: Real>(a: ArrayView2<C<R>>, z: C<R>) -> Array2<C<R>> {
    a.mapv(|x| x * z)
}

/// Column-major copy. `eigh` in ndarray-linalg returns conjugated eigenvectors
/// for row-major complex input, so eigen-decompositions go through this.
pub fn fortran<T: Clone + num_traits::Zero>(a: ArrayView2<T>) -> Array2<T> {
    use ndarray::ShapeBuilder;
    let mut out = Array2::zeros(a.dim().f());
    out.assign(&a);
    out
}

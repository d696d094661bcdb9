//! Sector blocks of `T_lambda` and `adj(G_lambda) G_lambda` assembled from the
//! one-dimensional resolvent kernel, without forming the full hierarchy.
//!
//! On `∂H^{(m)}` (coordinates `(i, M')`, `|M'| = m - 1`) an operator
//! `A K A*` with `K` acting on the distinguished variable has entries
//! `m k(i, j) mult(M' + i - j) / (h mult(M' + i))` at `(j, M' + i - j)` for
//! each distinct `j ∈ M' + {i}`.

use ndarray::Array2;

use super::sectors::{distinct, with_point, without_point, SectorBasis};
use crate::error::{Error, Result};
use crate::kernel::{dense, extreme_eigenvalues_flat, tol, ComplexMatrix, LuFactor, WeightedSpace};
use crate::scalar::{creal, re, Real, C};

/// Symmetric second-difference matrix `(-Delta_h)` with zero ghost values.
pub fn dirichlet_laplacian<R: Real>(n_x: usize, h: R) -> Array2<R> {
    let inv = R::one() / (h * h);
    let two = R::one() + R::one();
    Array2::from_shape_fn((n_x, n_x), |(i, j)| {
        if i == j {
            two * inv
        } else if i.abs_diff(j) == 1 {
            -inv
        } else {
            R::zero()
        }
    })
}

/// `((lambda - shift) + Delta_h)^{-1}`, the coordinate kernel of
/// `R(lambda, -Delta_h + shift)`.
pub fn resolvent_kernel<R: Real>(n_x: usize, h: R, shift: R, lambda: C<R>) -> Result<Array2<C<R>>> {
    let d = dirichlet_laplacian(n_x, h);
    let m = Array2::from_shape_fn((n_x, n_x), |(i, j)| {
        let base = creal::<R>(-d[(i, j)]);
        if i == j {
            base + lambda - creal::<R>(shift)
        } else {
            base
        }
    });
    let lu = LuFactor::guarded(m.view(), tol::<R>().condition_guard).map_err(|e| match e {
        crate::kernel::KernelError::Singular { .. } => Error::NotInResolventSet { operator: "L", margin: 0.0, threshold: 0.0 },
        other => other.into(),
    })?;
    Ok(lu.inverse())
}

/// Weighted space of `∂H^{(m)}`, equal to that of `H^{(m-1)}`.
pub fn boundary_space<R: Real>(n_x: usize, h: R, m: usize) -> Result<(SectorBasis, WeightedSpace<R>)> {
    if m == 0 {
        return Err(Error::InvalidInput("boundary sectors start at m = 1".into()));
    }
    let basis = SectorBasis::new(n_x, m - 1);
    let w = basis.weights(h.to_f64().unwrap()).into_iter().map(re::<R>).collect();
    Ok((basis, WeightedSpace::new(w)?))
}

/// `A K A*` on `∂H^{(m)}` for a coordinate kernel `k` on the grid.
pub fn sandwich<R: Real>(n_x: usize, h: R, m: usize, k: &Array2<C<R>>) -> Result<ComplexMatrix<R>> {
    let (bnd, space) = boundary_space(n_x, h, m)?;
    let top = SectorBasis::new(n_x, m);
    let dim = bnd.dim();
    let mut out = dense::zeros::<R>(dim, dim);
    let mf = re::<R>(m as f64);
    for i in 0..n_x {
        for p in 0..bnd.inner() {
            let full = with_point(bnd.multiset(p), i);
            let mult_full = re::<R>(top.multiset_multiplicity(top.position(&full).expect("multiset of the next sector")));
            let row = bnd.index(i, p);
            for j in distinct(&full) {
                let rest = without_point(&full, j);
                let q = bnd.position(&rest).expect("multiset of the boundary sector");
                let coeff = mf * re::<R>(bnd.multiset_multiplicity(q)) / (h * mult_full);
                out[(row, bnd.index(j, q))] += k[(i, j)] * creal::<R>(coeff);
            }
        }
    }
    Ok(ComplexMatrix::raw(out, &space, &space))
}

/// Block of `T_lambda` on `∂H^{(n+1)}`.
pub fn dtn_block<R: Real>(n_x: usize, h: R, n: usize, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    let m = n + 1;
    let r = resolvent_kernel(n_x, h, re::<R>(m as f64), lambda)?;
    sandwich(n_x, h, m, &r)
}

/// `adj(G_lambda) G_lambda` on `∂H^{(n+1)}`.
pub fn g_gram_block<R: Real>(n_x: usize, h: R, n: usize, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    let m = n + 1;
    let shift = re::<R>(m as f64);
    let r = resolvent_kernel(n_x, h, shift, lambda)?;
    let rb = resolvent_kernel(n_x, h, shift, lambda.conj())?;
    sandwich(n_x, h, m, &rb.dot(&r))
}

fn top_eigenvalue<R: Real>(m: &ComplexMatrix<R>) -> Result<(R, R)> {
    let flat = dense::hermitian_part(m.flat().view());
    let e = extreme_eigenvalues_flat(flat.view(), tol::<R>().check, 600)?;
    Ok((e.min, e.max))
}

/// Operator norm of the `∂H^{(n+1)} -> H^{(n+1)}` block of `G_lambda`.
pub fn g_block_norm<R: Real>(n_x: usize, h: R, n: usize, lambda: C<R>) -> Result<R> {
    let (_, max) = top_eigenvalue(&g_gram_block(n_x, h, n, lambda)?)?;
    Ok(num_traits::Float::sqrt(max.max(R::zero())))
}

/// `(min, max)` eigenvalue of the real-`lambda` block of `T_lambda`, which is
/// Hermitian there; the operator norm is `max(|min|, |max|)`.
pub fn dtn_block_extremes<R: Real>(n_x: usize, h: R, n: usize, lambda: R) -> Result<(R, R)> {
    top_eigenvalue(&dtn_block(n_x, h, n, creal(lambda))?)
}

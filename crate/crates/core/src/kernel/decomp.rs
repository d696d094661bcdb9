//! Spectral decompositions, norms, square roots, pseudo-inverses and
//! spectral location tests.

use ndarray::{s, Array1, Array2, ArrayView2};
use ndarray_linalg::{EigVals, Eigh, JobSvd, UPLO, SVDDC};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{self, conj_t};
use super::error::{KResult, KernelError};
use super::lu::LuFactor;
use super::matrix::ComplexMatrix;
use super::space::WeightedSpace;
use super::tol::tol;
use crate::scalar::{creal, cx, LapackFactor, Real, C};

/// Dense eigensolvers are used up to this dimension; larger Hermitian
/// problems fall back to Lanczos and inertia counts.
pub const DENSE_SPECTRUM_LIMIT: usize = 1100;

fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Singular values (descending) of a raw array.
pub fn singular_values_flat<R: Real>(a: ArrayView2<C<R>>) -> KResult<Array1<R>> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Ok(Array1::zeros(0));
    }
    let (_, s, _) = dense::fortran(a).svddc(JobSvd::None)?;
    Ok(s)
}

pub fn spectral_norm_flat<R: Real>(a: ArrayView2<C<R>>) -> R {
    singular_values_flat(a).ok().and_then(|s| s.first().copied()).unwrap_or(R::zero())
}

/// Economy SVD `a = U diag(s) V^H` of a raw array.
pub fn svd_flat<R: Real>(a: ArrayView2<C<R>>) -> KResult<(Array2<C<R>>, Array1<R>, Array2<C<R>>)> {
    let (u, s, vt) = dense::fortran(a).svddc(JobSvd::Some)?;
    Ok((u.expect("U requested"), s, vt.expect("VT requested")))
}

/// Full SVD (square `U` and `V^H`).
pub fn svd_full_flat<R: Real>(a: ArrayView2<C<R>>) -> KResult<(Array2<C<R>>, Array1<R>, Array2<C<R>>)> {
    let (u, s, vt) = dense::fortran(a).svddc(JobSvd::All)?;
    Ok((u.expect("U requested"), s, vt.expect("VT requested")))
}

/// Weighted singular values of `m` (descending).
pub fn singular_values<R: Real>(m: &ComplexMatrix<R>) -> KResult<Array1<R>> {
    singular_values_flat(m.flat().view())
}

/// Numerical rank with cutoff `rank_rel * sigma_max`.
pub fn rank<R: Real>(m: &ComplexMatrix<R>, rank_rel: R) -> KResult<usize> {
    let s = singular_values(m)?;
    Ok(rank_of(&s, rank_rel))
}

pub(crate) fn rank_of<R: Real>(s: &Array1<R>, rank_rel: R) -> usize {
    match s.first() {
        None => 0,
        Some(&smax) if smax == R::zero() => 0,
        Some(&smax) => s.iter().filter(|x| **x > rank_rel * smax).count(),
    }
}

/// Eigen-decomposition of a weighted-Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig<R: Real> {
    /// Ascending eigenvalues.
    pub values: Array1<R>,
    /// Columns are eigenvectors; orthonormal in the weighted inner product.
    pub vectors: ComplexMatrix<R>,
}

fn check_hermitian<R: Real>(m: &ComplexMatrix<R>, tol_herm: R) -> KResult<Array2<C<R>>> {
    let dev = m.hermiticity_deviation()?;
    if !(dev <= tol_herm) {
        return Err(KernelError::NotHermitian { deviation: to_f64(dev), tolerance: to_f64(tol_herm) });
    }
    Ok(dense::hermitian_part(m.flat().view()))
}

/// Hermitian eigendecomposition `M V = V diag(values)`.
pub fn hermitian_eig<R: Real>(m: &ComplexMatrix<R>, tol_herm: R) -> KResult<HermitianEig<R>> {
    let f = check_hermitian(m, tol_herm)?;
    let (values, u) = dense::fortran(f.view()).eigh(UPLO::Lower)?;
    let inv_sqrt: Vec<R> = m.dom().sqrt_weights().iter().map(|w| R::one() / *w).collect();
    let ones = vec![R::one(); u.ncols()];
    let v = dense::scale_rows_cols(u.view(), &inv_sqrt, &ones);
    let coords = WeightedSpace::unit(u.ncols());
    Ok(HermitianEig { values, vectors: ComplexMatrix::raw(v, &coords, m.dom()) })
}

/// Ascending eigenvalues of a weighted-Hermitian matrix.
pub fn hermitian_eigvals<R: Real>(m: &ComplexMatrix<R>, tol_herm: R) -> KResult<Array1<R>> {
    let f = check_hermitian(m, tol_herm)?;
    let (values, _) = dense::fortran(f.view()).eigh(UPLO::Lower)?;
    Ok(values)
}

/// Eigenvalues of a general square matrix, sorted by (re, im).
pub fn eigvals_general<R: Real>(m: &ComplexMatrix<R>) -> KResult<Vec<C<R>>> {
    let ev = m.data().eigvals()?;
    let mut v: Vec<C<R>> = ev.to_vec();
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(v)
}

/// Principal square root of a weighted-Hermitian positive semidefinite matrix.
/// Eigenvalues down to `-tol_psd * lambda_max` are treated as zero.
pub fn sqrt_psd<R: Real>(m: &ComplexMatrix<R>, tol_herm: R, tol_psd: R) -> KResult<ComplexMatrix<R>> {
    let f = check_hermitian(m, tol_herm)?;
    let (values, u) = dense::fortran(f.view()).eigh(UPLO::Lower)?;
    let top = values.iter().fold(R::zero(), |a, b| a.max(Float::abs(*b)));
    let mut roots = Vec::with_capacity(values.len());
    for &l in values.iter() {
        if l < -tol_psd * top {
            return Err(KernelError::NotPositive { eigenvalue: to_f64(l) });
        }
        roots.push(Float::sqrt(l.max(R::zero())));
    }
    let ones = vec![R::one(); u.nrows()];
    let us = dense::scale_rows_cols(u.view(), &ones, &roots);
    let flat = us.dot(&conj_t(u.view()));
    ComplexMatrix::from_flat(flat.view(), m.dom(), m.cod())
}

/// Weighted Moore-Penrose pseudo-inverse with singular-value cutoff
/// `rank_rel * sigma_max`.
pub fn pinv<R: Real>(m: &ComplexMatrix<R>, rank_rel: R) -> KResult<ComplexMatrix<R>> {
    let f = m.flat();
    let (rows, cols) = f.dim();
    let (u, s, vt) = svd_flat(f.view())?;
    let r = rank_of(&s, rank_rel);
    let mut out = dense::zeros::<R>(cols, rows);
    if r > 0 {
        let inv: Vec<R> = s.iter().take(r).map(|x| R::one() / *x).collect();
        let v = conj_t(vt.slice(s![..r, ..]));
        let ones = vec![R::one(); cols];
        let vs = dense::scale_rows_cols(v.view(), &ones, &inv);
        out = vs.dot(&conj_t(u.slice(s![.., ..r])));
    }
    ComplexMatrix::from_flat(out.view(), m.cod(), m.dom())
}

/// Normwise backward error `||M X - B|| / (||M|| ||X|| + ||B||)` (Frobenius).
pub fn backward_error<R: Real>(m: ArrayView2<C<R>>, x: ArrayView2<C<R>>, b: ArrayView2<C<R>>) -> R {
    let r = &m.dot(&x) - &b;
    let denom = dense::fro(m) * dense::fro(x) + dense::fro(b);
    if denom == R::zero() {
        R::zero()
    } else {
        dense::fro(r.view()) / denom
    }
}

/// Solve `M X = rhs`. Fails when the condition estimate exceeds the guard
/// or the backward error exceeds the residual tolerance.
pub fn solve<R: Real>(m: &ComplexMatrix<R>, rhs: &ComplexMatrix<R>) -> KResult<ComplexMatrix<R>> {
    if m.rows() != m.cols() {
        return Err(KernelError::DimensionMismatch { context: "solve (square matrix)", expected: m.rows(), found: m.cols() });
    }
    if rhs.cod() != m.cod() {
        return Err(KernelError::SpaceMismatch { context: "solve right-hand side" });
    }
    let t = tol::<R>();
    let lu = LuFactor::guarded(m.view(), t.condition_guard)?;
    let x = lu.solve(rhs.view());
    let be = backward_error(m.view(), x.view(), rhs.view());
    if !(be <= t.solve_residual) {
        return Err(KernelError::Residual { residual: to_f64(be), tolerance: to_f64(t.solve_residual) });
    }
    Ok(ComplexMatrix::raw(x, rhs.dom(), m.dom()))
}

/// Whether the raw Hermitian array `a` is positive definite (Cholesky succeeds).
pub fn is_positive_definite_flat<R: Real>(a: ArrayView2<C<R>>) -> bool {
    let n = a.nrows();
    let h = dense::hermitian_part(a);
    let mut buf = dense::to_col_major(h.view());
    <C<R> as LapackFactor>::potrf(n, &mut buf) == 0
}

/// Inertia `(negative, zero, positive)` of a raw Hermitian array by
/// Bunch-Kaufman factorization (Sylvester's law).
pub fn inertia_flat<R: Real>(a: ArrayView2<C<R>>) -> KResult<(usize, usize, usize)> {
    let n = a.nrows();
    let h = dense::hermitian_part(a);
    let mut buf = dense::to_col_major(h.view());
    let mut ipiv = vec![0i32; n];
    let info = <C<R> as LapackFactor>::hetrf(n, &mut buf, &mut ipiv);
    if info < 0 {
        return Err(KernelError::Lapack { routine: "hetrf", info });
    }
    let at = |i: usize, j: usize| buf[j * n + i];
    let (mut neg, mut zero, mut pos) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if ipiv[k] > 0 || k + 1 == n {
            let d = at(k, k).re;
            if d < R::zero() {
                neg += 1
            } else if d > R::zero() {
                pos += 1
            } else {
                zero += 1
            }
            k += 1;
        } else {
            let a11 = at(k, k).re;
            let a22 = at(k + 1, k + 1).re;
            let b = at(k + 1, k);
            let det = a11 * a22 - b.norm_sqr();
            let tr = a11 + a22;
            if det < R::zero() {
                neg += 1;
                pos += 1;
            } else if det > R::zero() {
                if tr > R::zero() {
                    pos += 2
                } else {
                    neg += 2
                }
            } else {
                zero += 1;
                if tr > R::zero() {
                    pos += 1
                } else if tr < R::zero() {
                    neg += 1
                } else {
                    zero += 1
                }
            }
            k += 2;
        }
    }
    Ok((neg, zero, pos))
}

/// Number of eigenvalues of the Hermitian raw array `a` strictly below `shift`.
pub fn count_eigenvalues_below<R: Real>(a: ArrayView2<C<R>>, shift: R) -> KResult<usize> {
    let shifted = dense::add_diag(a, creal::<R>(-shift));
    let (neg, _, _) = inertia_flat(shifted.view())?;
    Ok(neg)
}

/// Result of a Lanczos run on a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct ExtremeEigenvalues<R> {
    pub min: R,
    pub max: R,
    /// Residual norms `||M v - theta v||` of the extreme Ritz pairs.
    pub min_residual: R,
    pub max_residual: R,
    pub iterations: usize,
}

/// Extreme eigenvalues of a raw Hermitian array by Lanczos with full
/// reorthogonalization. Small matrices are solved densely.
pub fn extreme_eigenvalues_flat<R: Real>(a: ArrayView2<C<R>>, rel_tol: R, max_iter: usize) -> KResult<ExtremeEigenvalues<R>> {
    let n = a.nrows();
    if n <= DENSE_SPECTRUM_LIMIT {
        let (v, _) = dense::fortran(dense::hermitian_part(a).view()).eigh(UPLO::Lower)?;
        return Ok(ExtremeEigenvalues { min: v[0], max: v[n - 1], min_residual: R::zero(), max_residual: R::zero(), iterations: 0 });
    }
    let h = dense::hermitian_part(a);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1bc_5eed);
    let mut q = Array1::from_shape_fn(n, |_| cx::<R>(crate::scalar::re(rng.gen_range(-1.0..1.0)), crate::scalar::re(rng.gen_range(-1.0..1.0))));
    let nq = dense::vec_norm(&q);
    q.mapv_inplace(|z| z / creal::<R>(nq));
    let kmax = max_iter.min(n);
    let mut basis = Array2::<C<R>>::from_elem((n, kmax), creal::<R>(R::zero()));
    let mut alpha: Vec<R> = Vec::new();
    let mut beta: Vec<R> = Vec::new();
    let mut best = ExtremeEigenvalues { min: R::zero(), max: R::zero(), min_residual: R::infinity(), max_residual: R::infinity(), iterations: 0 };
    for j in 0..kmax {
        basis.column_mut(j).assign(&q);
        let mut w = h.dot(&q);
        let aj = q.iter().zip(w.iter()).fold(creal::<R>(R::zero()), |acc, (x, y)| acc + x.conj() * *y).re;
        alpha.push(aj);
        let qb = basis.slice(s![.., ..=j]);
        for _ in 0..2 {
            let coeff = conj_t(qb).dot(&w);
            w = &w - &qb.dot(&coeff);
        }
        let bj = dense::vec_norm(&w);
        let k = j + 1;
        let check = k % 10 == 0 || k == kmax || bj <= R::epsilon();
        if check {
            let mut t = Array2::<R>::zeros((k, k));
            for i in 0..k {
                t[(i, i)] = alpha[i];
                if i + 1 < k {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let (theta, s) = dense::fortran(t.view()).eigh(UPLO::Lower)?;
            let scale = theta.iter().fold(R::zero(), |m, x| m.max(Float::abs(*x))).max(R::min_positive_value());
            best = ExtremeEigenvalues {
                min: theta[0],
                max: theta[k - 1],
                min_residual: bj * Float::abs(s[(k - 1, 0)]),
                max_residual: bj * Float::abs(s[(k - 1, k - 1)]),
                iterations: k,
            };
            if (best.min_residual <= rel_tol * scale && best.max_residual <= rel_tol * scale) || bj <= R::epsilon() * scale {
                return Ok(best);
            }
        }
        beta.push(bj);
        q = w.mapv(|z| z / creal::<R>(bj));
    }
    Err(KernelError::NotConverged(format!(
        "Lanczos after {} iterations: residuals {:e} / {:e}",
        best.iterations,
        to_f64(best.min_residual),
        to_f64(best.max_residual)
    )))
}

/// Outcome of a resolvent-set test.
#[derive(Clone, Copy, Debug)]
pub struct ResolventTest<R> {
    /// `sigma_min(lambda - M)` (exact) or its lower estimate.
    pub margin: R,
    /// `resolvent_rel * ||M||`.
    pub threshold: R,
    pub in_resolvent_set: bool,
}

fn norm_estimate_hermitian<R: Real>(flat: ArrayView2<C<R>>) -> KResult<R> {
    let e = extreme_eigenvalues_flat(flat, crate::scalar::re(1e-6), 300)?;
    Ok(Float::abs(e.min).max(Float::abs(e.max)))
}

/// Decide `lambda ∈ ρ(M)` by `sigma_min(lambda - M) > rel * ||M||`.
///
/// Hermitian inputs use exact eigenvalues when small and inertia counts over
/// the critical real interval otherwise; general inputs use singular values
/// when small and the LU condition estimate otherwise.
pub fn resolvent_test<R: Real>(m: &ComplexMatrix<R>, lambda: C<R>, rel: R) -> KResult<ResolventTest<R>> {
    if !m.is_square() {
        return Err(KernelError::SpaceMismatch { context: "resolvent test" });
    }
    let f = m.flat();
    let n = f.nrows();
    let hermitian = m.hermiticity_deviation()? <= tol::<R>().hermitian_input;
    if hermitian {
        if n <= DENSE_SPECTRUM_LIMIT {
            let (vals, _) = dense::fortran(dense::hermitian_part(f.view()).view()).eigh(UPLO::Lower)?;
            let norm = Float::abs(vals[0]).max(Float::abs(vals[n - 1]));
            let margin = vals.iter().fold(R::infinity(), |acc, l| acc.min((creal::<R>(*l) - lambda).norm()));
            let threshold = rel * norm;
            return Ok(ResolventTest { margin, threshold, in_resolvent_set: margin > threshold });
        }
        let norm = norm_estimate_hermitian(f.view())?;
        let threshold = rel * norm;
        let im = Float::abs(lambda.im);
        if im > threshold {
            return Ok(ResolventTest { margin: im, threshold, in_resolvent_set: true });
        }
        let half = Float::sqrt(threshold * threshold - im * im);
        let below = count_eigenvalues_below(f.view(), lambda.re - half)?;
        let above = count_eigenvalues_below(f.view(), lambda.re + half)?;
        let inside = above == below;
        // margin is only known to exceed the threshold when no eigenvalue is inside
        let margin = if inside { threshold * crate::scalar::re(1.0 + 1e-12) + im } else { R::zero() };
        return Ok(ResolventTest { margin, threshold, in_resolvent_set: inside });
    }
    let shifted = dense::add_diag(f.view(), -lambda).mapv(|z| -z);
    if n <= DENSE_SPECTRUM_LIMIT {
        let s = singular_values_flat(shifted.view())?;
        let norm = spectral_norm_flat(f.view());
        let margin = s.last().copied().unwrap_or(R::zero());
        let threshold = rel * norm;
        return Ok(ResolventTest { margin, threshold, in_resolvent_set: margin > threshold });
    }
    let norm = dense::fro(f.view());
    let threshold = rel * norm;
    let margin = match LuFactor::new(shifted.view()) {
        Ok(lu) => {
            let c = lu.condition();
            if Float::is_finite(c) {
                dense::fro(shifted.view()) / c
            } else {
                R::zero()
            }
        }
        Err(_) => R::zero(),
    };
    Ok(ResolventTest { margin, threshold, in_resolvent_set: margin > threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cxf;
    use num_complex::Complex64;

    fn random(n: usize, m: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, m), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn weights(n: usize, seed: u64) -> WeightedSpace<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        WeightedSpace::new((0..n).map(|_| rng.gen_range(0.5..2.0)).collect()).unwrap()
    }

    fn weighted_hermitian(n: usize, seed: u64) -> ComplexMatrix<f64> {
        let sp = weights(n, seed + 1);
        let a = ComplexMatrix::on(random(n, n, seed), &sp).unwrap();
        a.add(&a.adjoint()).unwrap()
    }

    #[test]
    fn hermitian_eig_reconstructs_and_is_weighted_orthonormal() {
        let m = weighted_hermitian(12, 3);
        let e = hermitian_eig(&m, 1e-12).unwrap();
        let v = &e.vectors;
        let mv = m.matmul(v).unwrap();
        let vd = Array2::from_shape_fn((12, 12), |(i, j)| v.data()[(i, j)] * e.values[j]);
        assert!(dense::fro((&mv.into_data() - &vd).view()) < 1e-10);
        let gram = v.adjoint().matmul(v).unwrap();
        assert!(dense::fro((gram.data() - &dense::eye::<f64>(12)).view()) < 1e-10);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let sp = WeightedSpace::unit(4);
        let m = ComplexMatrix::on(random(4, 4, 1), &sp).unwrap();
        assert!(matches!(hermitian_eigvals(&m, 1e-12), Err(KernelError::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let sp = weights(8, 5);
        let a = ComplexMatrix::on(random(8, 8, 4), &sp).unwrap();
        let p = a.adjoint().matmul(&a).unwrap();
        let r = sqrt_psd(&p, 1e-12, 1e-12).unwrap();
        assert!(r.matmul(&r).unwrap().relative_distance(&p).unwrap() < 1e-10);
        assert!(r.hermiticity_deviation().unwrap() < 1e-12);
        let neg = p.scale(cxf(-1.0, 0.0));
        assert!(matches!(sqrt_psd(&neg, 1e-12, 1e-12), Err(KernelError::NotPositive { .. })));
    }

    #[test]
    fn pinv_satisfies_penrose_identities() {
        let dom = weights(5, 7);
        let cod = weights(7, 8);
        // rank 3
        let raw = random(7, 3, 9).dot(&random(3, 5, 10));
        let a = ComplexMatrix::new(raw, dom, cod).unwrap();
        let p = pinv(&a, 1e-9).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.relative_distance(&a).unwrap() < 1e-10);
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        assert!(pap.relative_distance(&p).unwrap() < 1e-10);
        assert!(a.matmul(&p).unwrap().hermiticity_deviation().unwrap() < 1e-10);
        assert!(p.matmul(&a).unwrap().hermiticity_deviation().unwrap() < 1e-10);
        assert_eq!(rank(&a, 1e-9).unwrap(), 3);
    }

    #[test]
    fn inertia_matches_dense_eigenvalues() {
        let m = weighted_hermitian(40, 11);
        let vals = hermitian_eigvals(&m, 1e-12).unwrap();
        for shift in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            let expected = vals.iter().filter(|v| **v < shift).count();
            assert_eq!(count_eigenvalues_below(m.flat().view(), shift).unwrap(), expected);
        }
    }

    #[test]
    fn positive_definite_test_follows_spectrum() {
        let m = weighted_hermitian(10, 13);
        let vals = hermitian_eigvals(&m, 1e-12).unwrap();
        let f = m.flat();
        assert!(is_positive_definite_flat(dense::add_diag(f.view(), cxf(0.01 - vals[0], 0.0)).view()));
        assert!(!is_positive_definite_flat(dense::add_diag(f.view(), cxf(-0.01 - vals[0], 0.0)).view()));
    }

    #[test]
    fn lanczos_finds_extreme_eigenvalues() {
        let n = DENSE_SPECTRUM_LIMIT + 100;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // tridiagonal plus random Hermitian low-rank part keeps the dense oracle cheap
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = Complex64::new(2.0 + (i as f64) / (n as f64), 0.0);
            if i + 1 < n {
                let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                a[(i, i + 1)] = z;
                a[(i + 1, i)] = z.conj();
            }
        }
        let e = extreme_eigenvalues_flat(a.view(), 1e-9, 600).unwrap();
        let (vals, _) = dense::fortran(a.view()).eigh(UPLO::Lower).unwrap();
        assert!((e.min - vals[0]).abs() < 1e-7);
        assert!((e.max - vals[n - 1]).abs() < 1e-7);
    }

    #[test]
    fn resolvent_test_detects_eigenvalues() {
        let m = weighted_hermitian(20, 19);
        let vals = hermitian_eigvals(&m, 1e-12).unwrap();
        let at = resolvent_test(&m, cxf(vals[3], 0.0), 1e-9).unwrap();
        assert!(!at.in_resolvent_set);
        let off = resolvent_test(&m, cxf(vals[3], 0.1), 1e-9).unwrap();
        assert!(off.in_resolvent_set);
        assert!((off.margin - 0.1).abs() < 1e-12);
        let sp = WeightedSpace::unit(6);
        let g = ComplexMatrix::on(random(6, 6, 2), &sp).unwrap();
        let ev = eigvals_general(&g).unwrap();
        assert!(!resolvent_test(&g, ev[0], 1e-9).unwrap().in_resolvent_set);
        assert!(resolvent_test(&g, ev[0] + cxf(0.05, 0.05), 1e-9).unwrap().in_resolvent_set);
    }

    #[test]
    fn solve_checks_condition_and_residual() {
        let sp = weights(6, 23);
        let a = ComplexMatrix::on(random(6, 6, 21), &sp).unwrap();
        let b = ComplexMatrix::new(random(6, 2, 22), WeightedSpace::unit(2), sp.clone()).unwrap();
        let x = solve(&a, &b).unwrap();
        assert!(a.matmul(&x).unwrap().relative_distance(&b).unwrap() < 1e-12);
        let mut s = random(6, 6, 24);
        let row = s.row(0).to_owned();
        s.row_mut(1).assign(&row);
        let singular = ComplexMatrix::on(s, &sp).unwrap();
        assert!(matches!(solve(&singular, &b), Err(KernelError::Singular { .. })));
    }

    #[test]
    fn weighted_norm_is_flat_spectral_norm() {
        let sp = weights(5, 30);
        let a = ComplexMatrix::on(random(5, 5, 31), &sp).unwrap();
        let x = Array1::from_shape_fn(5, |i| Complex64::new(i as f64, 1.0));
        let ax = a.apply(&x).unwrap();
        assert!(sp.norm(ax.view()) <= a.norm() * sp.norm(x.view()) * (1.0 + 1e-12));
        let adj_norm = a.adjoint().norm();
        assert!((adj_norm - a.norm()).abs() < 1e-10);
    }
}

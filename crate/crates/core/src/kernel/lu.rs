use ndarray::{Array1, Array2, ArrayView2};
use num_traits::Float;

use super::dense::{from_col_major, to_col_major};
use super::error::{KResult, KernelError};
use crate::scalar::{LapackFactor, Real, C};

/// Partial-pivoting LU factor of a square matrix with its 1-norm
/// condition estimate.
#[derive(Clone, Debug)]
pub struct LuFactor<R: Real> {
    n: usize,
    lu: Vec<C<R>>,
    ipiv: Vec<i32>,
    anorm: R,
    rcond: R,
}

impl<R: Real> LuFactor<R> {
    /// Factor `a`. An exactly singular pivot is an error; otherwise the
    /// condition estimate is recorded and left to the caller.
    pub fn new(a: ArrayView2<C<R>>) -> KResult<Self> {
        let (m, n) = a.dim();
        if m != n {
            return Err(KernelError::DimensionMismatch { context: "LU factorization", expected: m, found: n });
        }
        let mut lu = to_col_major(a);
        let mut anorm = R::zero();
        for j in 0..n {
            let col: R = lu[j * n..(j + 1) * n].iter().fold(R::zero(), |acc, z| acc + z.norm());
            anorm = anorm.max(col);
        }
        let mut ipiv = vec![0i32; n];
        let info = <C<R> as LapackFactor>::getrf(n, &mut lu, &mut ipiv);
        if info < 0 {
            return Err(KernelError::Lapack { routine: "getrf", info });
        }
        if info > 0 || !Float::is_finite(anorm) {
            return Err(KernelError::Singular { condition: f64::INFINITY });
        }
        let rcond = if anorm == R::zero() {
            R::zero()
        } else {
            let (rc, info) = <C<R> as LapackFactor>::gecon(n, &lu, anorm);
            if info != 0 {
                return Err(KernelError::Lapack { routine: "gecon", info });
            }
            rc
        };
        Ok(Self { n, lu, ipiv, anorm, rcond })
    }

    /// Factor and reject condition estimates above `guard`.
    pub fn guarded(a: ArrayView2<C<R>>, guard: R) -> KResult<Self> {
        let f = Self::new(a)?;
        let c = f.condition();
        if !(c <= guard) {
            return Err(KernelError::Singular { condition: c.to_f64().unwrap_or(f64::INFINITY) });
        }
        Ok(f)
    }

    /// Factor `a` and reject it when `scale * ||a^{-1}||_1` exceeds `guard`.
    ///
    /// For `a` formed as a sum of terms, `scale` is the sum of their norms;
    /// cancellation between the terms then shows even when `a` itself is
    /// well conditioned, as for a tiny scalar.
    pub fn guarded_scaled(a: ArrayView2<C<R>>, guard: R, scale: R) -> KResult<Self> {
        let f = Self::guarded(a, guard)?;
        let c = f.condition() * Float::max(scale, f.anorm) / f.anorm;
        if !(c <= guard) {
            return Err(KernelError::Singular { condition: c.to_f64().unwrap_or(f64::INFINITY) });
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// 1-norm condition estimate `1 / rcond`.
    pub fn condition(&self) -> R {
        if self.rcond > R::zero() {
            R::one() / self.rcond
        } else {
            R::infinity()
        }
    }

    fn run(&self, trans: u8, b: ArrayView2<C<R>>) -> Array2<C<R>> {
        let (m, k) = b.dim();
        assert_eq!(m, self.n, "right-hand side has wrong row count");
        if k == 0 || m == 0 {
            return b.to_owned();
        }
        let mut x = to_col_major(b);
        let info = <C<R> as LapackFactor>::getrs(trans, self.n, k, &self.lu, &self.ipiv, &mut x);
        assert_eq!(info, 0, "getrs rejected its arguments");
        from_col_major(x, m, k)
    }

    /// `A^{-1} b`.
    pub fn solve(&self, b: ArrayView2<C<R>>) -> Array2<C<R>> {
        self.run(b'N', b)
    }

    /// `A^{-H} b`.
    pub fn solve_adjoint(&self, b: ArrayView2<C<R>>) -> Array2<C<R>> {
        self.run(b'C', b)
    }

    pub fn solve_vec(&self, b: &Array1<C<R>>) -> Array1<C<R>> {
        let col = b.view().insert_axis(ndarray::Axis(1));
        self.solve(col).column(0).to_owned()
    }

    pub fn inverse(&self) -> Array2<C<R>> {
        self.solve(super::dense::eye::<R>(self.n).view())
    }
}

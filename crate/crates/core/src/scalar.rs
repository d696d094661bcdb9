//! Scalar abstraction: every numerical routine is generic over a real type
//! `R` (f32 or f64) with complex entries `C<R>`.

use std::fmt::{Debug, Display, LowerExp};
use std::os::raw::{c_char, c_int};

use ndarray_linalg::{Lapack, Scalar};
use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Complex LAPACK routines that `ndarray-linalg` does not expose with
/// multiple right-hand sides or with raw factor access.
pub trait LapackFactor: Scalar + Lapack {
    /// LU factorization of a column-major `n x n` matrix in place.
    fn getrf(n: usize, a: &mut [Self], ipiv: &mut [i32]) -> i32;
    /// Solve with an LU factor; `trans` is `b'N'`, `b'T'` or `b'C'`.
    fn getrs(trans: u8, n: usize, nrhs: usize, a: &[Self], ipiv: &[i32], b: &mut [Self]) -> i32;
    /// Reciprocal 1-norm condition estimate from an LU factor.
    fn gecon(n: usize, a: &[Self], anorm: Self::Real) -> (Self::Real, i32);
    /// Lower Cholesky factorization in place (column-major).
    fn potrf(n: usize, a: &mut [Self]) -> i32;
    /// Bunch-Kaufman factorization of a Hermitian matrix (lower triangle).
    fn hetrf(n: usize, a: &mut [Self], ipiv: &mut [i32]) -> i32;
}

macro_rules! impl_lapack_factor {
    ($c:ty, $r:ty, $getrf:ident, $getrs:ident, $gecon:ident, $potrf:ident, $hetrf:ident) => {
        impl LapackFactor for $c {
            fn getrf(n: usize, a: &mut [Self], ipiv: &mut [i32]) -> i32 {
                let n = n as c_int;
                let mut info = 0;
                unsafe {
                    lapack_sys::$getrf(&n, &n, a.as_mut_ptr() as *mut _, &n.max(1), ipiv.as_mut_ptr(), &mut info);
                }
                info
            }

            fn getrs(trans: u8, n: usize, nrhs: usize, a: &[Self], ipiv: &[i32], b: &mut [Self]) -> i32 {
                let t = trans as c_char;
                let n = n as c_int;
                let nrhs = nrhs as c_int;
                let mut info = 0;
                unsafe {
                    lapack_sys::$getrs(
                        &t,
                        &n,
                        &nrhs,
                        a.as_ptr() as *const _,
                        &n.max(1),
                        ipiv.as_ptr(),
                        b.as_mut_ptr() as *mut _,
                        &n.max(1),
                        &mut info,
                    );
                }
                info
            }

            fn gecon(n: usize, a: &[Self], anorm: $r) -> ($r, i32) {
                let norm = b'1' as c_char;
                let ni = n as c_int;
                let mut rcond: $r = 0.0;
                let mut work = vec![<$c>::new(0.0, 0.0); 2 * n.max(1)];
                let mut rwork = vec![0.0 as $r; 2 * n.max(1)];
                let mut info = 0;
                unsafe {
                    lapack_sys::$gecon(
                        &norm,
                        &ni,
                        a.as_ptr() as *const _,
                        &ni.max(1),
                        &anorm,
                        &mut rcond,
                        work.as_mut_ptr() as *mut _,
                        rwork.as_mut_ptr(),
                        &mut info,
                    );
                }
                (rcond, info)
            }

            fn potrf(n: usize, a: &mut [Self]) -> i32 {
                let uplo = b'L' as c_char;
                let n = n as c_int;
                let mut info = 0;
                unsafe {
                    lapack_sys::$potrf(&uplo, &n, a.as_mut_ptr() as *mut _, &n.max(1), &mut info);
                }
                info
            }

            fn hetrf(n: usize, a: &mut [Self], ipiv: &mut [i32]) -> i32 {
                let uplo = b'L' as c_char;
                let ni = n as c_int;
                let mut info = 0;
                // workspace query first
                let mut wq = <$c>::new(0.0, 0.0);
                let lwork_q: c_int = -1;
                unsafe {
                    lapack_sys::$hetrf(
                        &uplo,
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni.max(1),
                        ipiv.as_mut_ptr(),
                        &mut wq as *mut $c as *mut _,
                        &lwork_q,
                        &mut info,
                    );
                }
                let lwork = (wq.re as usize).max(1);
                let mut work = vec![<$c>::new(0.0, 0.0); lwork];
                let lw = lwork as c_int;
                unsafe {
                    lapack_sys::$hetrf(
                        &uplo,
                        &ni,
                        a.as_mut_ptr() as *mut _,
                        &ni.max(1),
                        ipiv.as_mut_ptr(),
                        work.as_mut_ptr() as *mut _,
                        &lw,
                        &mut info,
                    );
                }
                info
            }
        }
    };
}

impl_lapack_factor!(Complex<f32>, f32, cgetrf_, cgetrs_, cgecon_, cpotrf_, chetrf_);
impl_lapack_factor!(Complex<f64>, f64, zgetrf_, zgetrs_, zgecon_, zpotrf_, zhetrf_);

/// Real scalar type the library is generic over.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Lapack
    + Scalar<Real = Self, Complex = Complex<Self>>
    + Scalar<Complex: LapackFactor + Send + Sync + Scalar<Real = Self, Complex = Complex<Self>>>
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar associated with `R`.
pub type C<R> = Complex<R>;

/// Real constant from an `f64` literal.
#[inline]
pub fn re<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("real constant representable")
}

/// Complex number from real and imaginary parts.
#[inline]
pub fn cx<R: Real>(re: R, im: R) -> C<R> {
    R::complex(re, im)
}

/// Complex number from `f64` parts.
#[inline]
pub fn cxf<R: Real>(re_part: f64, im_part: f64) -> C<R> {
    R::complex(re::<R>(re_part), re::<R>(im_part))
}

#[inline]
pub fn czero<R: Real>() -> C<R> {
    R::complex(R::zero(), R::zero())
}

#[inline]
pub fn cone<R: Real>() -> C<R> {
    R::complex(R::one(), R::zero())
}

/// Real number embedded as a complex value.
#[inline]
pub fn creal<R: Real>(x: R) -> C<R> {
    R::complex(x, R::zero())
}

/// `(re, im)` as `f64`, for serialization.
pub fn to_pair<R: Real>(z: C<R>) -> [f64; 2] {
    [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]
}

pub fn from_pair<R: Real>(p: [f64; 2]) -> C<R> {
    cxf::<R>(p[0], p[1])
}

/// Machine epsilon of `R` relative to `f64`; used to widen tolerances for `f32`.
pub fn precision_ratio<R: Real>() -> R {
    R::epsilon() / re::<R>(f64::EPSILON)
}

/// Principal square root with non-negative real part.
pub fn sqrt_principal<R: Real>(z: C<R>) -> C<R> {
    let w = z.sqrt();
    if w.re < R::zero() {
        -w
    } else {
        w
    }
}

use num_traits::Float;

use crate::scalar::{precision_ratio, re, Real};

/// Numerical thresholds shared by the whole library. The defaults are tuned
/// for `f64`; for lower precision the small thresholds are widened by the
/// square root of the epsilon ratio, but never below 64 epsilon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<R> {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel: R,
    /// Solves with a larger condition estimate are errors.
    pub condition_guard: R,
    /// Normwise backward error accepted by `solve`.
    pub solve_residual: R,
    /// Hermiticity required of input data (L and T).
    pub hermitian_input: R,
    /// Default tolerance for identity checks.
    pub check: R,
    /// `lambda` is in the resolvent set of `M` iff `sigma_min(lambda - M) > resolvent_rel * ||M||`.
    pub resolvent_rel: R,
    /// Neumann series stop once a term norm drops below this.
    pub neumann_term: R,
    /// Projector distance for subspace equality and inclusion.
    pub subspace: R,
    /// Minimal distance of `lambda0` from the spectrum of `L`.
    pub spectrum_gap: R,
}

impl<R: Real> Tolerances<R> {
    pub fn standard() -> Self {
        let w = Float::sqrt(precision_ratio::<R>());
        let floor = R::epsilon() * re::<R>(64.0);
        let small = |x: f64| Float::max(re::<R>(x) * w, floor);
        Self {
            rank_rel: small(1e-9),
            condition_guard: re::<R>(1e12) / w,
            solve_residual: small(1e-10),
            hermitian_input: small(1e-12),
            check: small(1e-10),
            resolvent_rel: small(1e-9),
            neumann_term: small(1e-14),
            subspace: small(1e-10),
            spectrum_gap: small(1e-8),
        }
    }
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        Self::standard()
    }
}

pub fn tol<R: Real>() -> Tolerances<R> {
    Tolerances::standard()
}

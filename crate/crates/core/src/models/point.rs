//! Laplacian in three dimensions coupled to one internal state through a
//! point interaction at the origin. The boundary space is one-dimensional and
//! every operator of the framework reduces to a scalar closed form.
//!
//! With `k = sqrt(-lambda)` (principal branch, `Re k > 0`):
//! - Green function `g(x) = -exp(-k|x|) / (4 pi |x|)`,
//! - `B f = -4 pi lim_{x -> 0} |x| f(x)` (left inverse of `z -> z g`),
//! - `A_m f = lim_{r -> 0} d/dr (r mean_{|x|=r} f)`, so `T_lambda = k / (4 pi)`.

use std::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::report::{Check, VerificationReport};
use crate::robin::{check_symmetry_params, BoundaryParams};
use crate::scalar::{cone, creal, re, sqrt_principal, Real, C};

fn wavenumber<R: Real>(lambda: C<R>) -> Result<C<R>> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::InvalidInput("lambda must be finite".into()));
    }
    if lambda.im == R::zero() && lambda.re >= R::zero() {
        return Err(Error::OnPositiveAxis);
    }
    Ok(sqrt_principal(-lambda))
}

/// `T_lambda = sqrt(-lambda) / (4 pi)`.
pub fn point_dtn<R: Real>(lambda: C<R>) -> Result<C<R>> {
    Ok(wavenumber(lambda)? / creal(re::<R>(4.0 * PI)))
}

/// `g_lambda(x) = -exp(-sqrt(-lambda) |x|) / (4 pi |x|)`.
pub fn point_green<R: Real>(lambda: C<R>, x: R) -> Result<C<R>> {
    let k = wavenumber(lambda)?;
    if x == R::zero() {
        return Err(Error::SingularPoint);
    }
    let r = Float::abs(x);
    Ok(-(-(k * creal(r))).exp() / creal(re::<R>(4.0 * PI) * r))
}

/// `B g_lambda = -4 pi lim |x| g(x)` evaluated at a small radius; equals 1 up
/// to `O(r)`.
pub fn point_trace_right_inverse_check<R: Real>(lambda: C<R>, r: R) -> Result<C<R>> {
    Ok(-point_green(lambda, r)? * creal(re::<R>(4.0 * PI) * r))
}

/// Matrix `Q` of the boundary form `<H u, v> - <u, H v> = x_u^H Q x_v` on the
/// boundary values `x = (A_m f, B f)` of `H_IBC^{alpha,beta}`.
///
/// The internal state is `z = alpha A_m f + beta B f` and the action on it is
/// `gamma A_m f + delta B f`; `Q = 0` exactly when the operator is symmetric.
pub fn point_symmetry_form<R: Real>(p: &BoundaryParams<R>) -> [[C<R>; 2]; 2] {
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.delta);
    // Green identity part <Bf, A_m g> - <A_m f, Bg>
    let green = [[C::new(R::zero(), R::zero()), -cone::<R>()], [cone::<R>(), C::new(R::zero(), R::zero())]];
    // conj(gamma a + delta b)(alpha a' + beta b') - conj(alpha a + beta b)(gamma a' + delta b')
    let u = [g, d];
    let w = [a, b];
    let mut q = green;
    for i in 0..2 {
        for j in 0..2 {
            q[i][j] += u[i].conj() * w[j] - w[i].conj() * u[j];
        }
    }
    q
}

fn rel(x: C<f64>, scale: f64) -> f64 {
    x.norm() / scale.max(1.0)
}

fn c64<R: Real>(z: C<R>) -> C<f64> {
    C::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

/// Scalar identities of the point-interaction model at one `lambda`.
///
/// Checks, in scalar arithmetic: `T_{conj lambda} = conj(T_lambda)`;
/// `T^{alpha,beta}` by its definition against `(gamma T + delta)/(alpha T + beta)`;
/// `alpha T^{alpha,beta} = gamma + (beta gamma - alpha delta)(-beta - alpha T)^{-1}`
/// and, when `beta gamma - alpha delta = 1`, the unit form; and that the
/// boundary form vanishes exactly when the parameters are symmetric.
pub fn point_scalar_suite<R: Real>(p: &BoundaryParams<R>, lambda: C<R>) -> VerificationReport {
    let mut rep = VerificationReport::new("point_scalar");
    let eps = 1e-12;
    let t = match point_dtn(lambda) {
        Ok(t) => c64(t),
        Err(e) => {
            rep.push(Check::error("dtn", "point-dtn-closed-form", e));
            return rep;
        }
    };
    let tb = c64(point_dtn(lambda.conj()).expect("conjugate is off the positive axis"));
    rep.push(Check::at_most("dtn_conjugate_symmetry", "dtn-adjoint-at-conjugate", rel(tb - t.conj(), t.norm()), eps));
    let (a, b, g, d) = (c64(p.alpha), c64(p.beta), c64(p.gamma), c64(p.delta));
    // alpha adj(T_{conj lambda}) + beta
    let denom_def = a * tb.conj() + b;
    let denom = a * t + b;
    if denom_def.norm() <= f64::EPSILON * (a.norm() * t.norm() + b.norm()) {
        rep.push(Check::error("robin_dtn", "robin-dtn-definition", Error::SingularRobinDenominator { condition: f64::INFINITY }));
    } else {
        let by_def = (g * t + d) / denom_def;
        let by_form = (g * t + d) / denom;
        rep.push(Check::at_most("robin_dtn_routes", "robin-dtn-definition", rel(by_def - by_form, by_def.norm()), eps));
        let det = b * g - a * d;
        let lhs = a * by_def;
        let general = g + det / (-b - a * t);
        rep.push(Check::at_most("robin_dtn_resolvent_form", "robin-dtn-resolvent-form", rel(lhs - general, lhs.norm()), eps));
        if (det - C::new(1.0, 0.0)).norm() <= eps {
            let unit = g + C::new(1.0, 0.0) / (-b - a * t);
            rep.push(Check::at_most("robin_dtn_unit_form", "robin-dtn-resolvent-form", rel(lhs - unit, lhs.norm()), eps));
        } else {
            rep.push(Check::info("robin_dtn_unit_form_determinant", "robin-dtn-resolvent-form", (det - C::new(1.0, 0.0)).norm()));
        }
    }
    let q = point_symmetry_form(p);
    let q_norm = q.iter().flatten().fold(0.0f64, |m, z| m.max(c64(*z).norm()));
    let scale = [a, b, g, d].iter().fold(1.0f64, |m, z| m.max(z.norm_sqr()));
    let by_form = q_norm <= eps * scale;
    let by_params = check_symmetry_params(p, re::<R>(eps * scale));
    rep.push(Check::flag("symmetry_iff_parameters", "symmetry-parameter-conditions", by_form == by_params).with_detail(format!(
        "boundary form {q_norm:.3e}, parameter test {by_params}"
    )));
    rep.push(Check::flag("parameters_symmetric", "symmetry-parameter-conditions", by_params));
    rep
}

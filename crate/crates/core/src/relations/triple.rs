//! Finite-dimensional checks of the quasi-boundary-triple axioms.

use num_traits::Float;

use crate::error::Result;
use crate::framework::{PairMap, RealizedOperator, Setting};
use crate::kernel::{dense, rank, tol, ComplexMatrix};
use crate::report::{Check, VerificationReport};
use crate::scalar::{cx, Real};

use super::maximal::{assemble_hm, green_form_defect};

/// Green identity, full joint rank of the boundary maps and self-adjointness
/// of the restriction of `action` to `ker(trace_b)`.
pub fn qbt_verify<R: Real>(
    s: &Setting<R>,
    suite: &str,
    action: &PairMap<R>,
    trace_b: &PairMap<R>,
    trace_a: &PairMap<R>,
) -> Result<VerificationReport> {
    let t = tol::<R>();
    let f = |x: R| x.to_f64().unwrap_or(f64::NAN);
    let mut rep = VerificationReport::new(suite);
    let green = green_form_defect(s, action, trace_b, trace_a)?;
    rep.push(Check::at_most("green_identity", "second Green identity", f(green), f(t.check)));
    let stacked = dense::vstack(trace_b.stacked(s.pair_space())?.view(), trace_a.stacked(s.pair_space())?.view());
    let joint = ComplexMatrix::new(stacked, s.pair_space().clone(), s.dh().direct_sum(s.dh()))?;
    let r = rank(&joint, t.rank_rel)?;
    let full = 2 * s.n_boundary();
    rep.push(Check::flag("joint_trace_rank", "dense joint range", r == full).with_detail(format!("rank {r} of {full}")));
    match RealizedOperator::realize(s, trace_b, action) {
        Ok(op) => {
            let dev = op.hermiticity_deviation()?;
            rep.push(Check::at_most("restriction_hermitian", "self-adjoint restriction", f(dev), f(t.check)));
            let shift = op.matrix().norm() + R::one();
            let test = op.resolvent_test(cx::<R>(R::zero(), shift))?;
            rep.push(
                Check::flag("restriction_resolvent", "self-adjoint restriction", test.in_resolvent_set)
                    .with_detail(format!("margin {:e}", f(Float::max(test.margin, R::zero())))),
            );
        }
        Err(e) => rep.push(Check::error("restriction_hermitian", "self-adjoint restriction", e)),
    }
    Ok(rep)
}

/// `(∂H, B, A_m)` for `L_m`.
pub fn qbt_verify_robin<R: Real>(s: &Setting<R>) -> Result<VerificationReport> {
    qbt_verify(s, "triple (B, A_m)", &s.lm_map(), &s.b_map(), &s.am_map())
}

/// `(∂H, B - I*, A_m - I*)` for `H_m`.
pub fn qbt_verify_ibc<R: Real>(s: &Setting<R>) -> Result<VerificationReport> {
    let hm = assemble_hm(s)?;
    qbt_verify(s, "triple (B - I*, A_m - I*)", &hm.action, &hm.trace_b, &hm.trace_a)
}

use serde::{Deserialize, Serialize};

use super::{rel_residual, Setting};
use crate::error::Result;
use crate::kernel::{dense, pinv, tol, ComplexMatrix};
use crate::report::{Check, VerificationReport};
use crate::scalar::{creal, cx, re, Real, C};

/// Residuals of the standing assumptions on `(L, A, T, lambda0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub tolerance: f64,
    pub checks: Vec<Check>,
}

impl AssumptionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn into_report(self) -> VerificationReport {
        let mut r = VerificationReport::new("assumptions");
        r.extend(self.checks);
        r
    }
}

fn f<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Deterministic sample points off the spectrum of `L`.
pub(crate) fn sample_lambdas<R: Real>(s: &Setting<R>) -> Vec<C<R>> {
    let scale = s.spectrum().norm().max(R::one());
    let l0 = s.lambda0();
    let bottom = s.spectrum().min();
    vec![
        cx::<R>(l0 + re::<R>(0.25) * scale, re::<R>(0.5) * scale),
        cx::<R>(l0 - re::<R>(0.5) * scale, -re::<R>(0.3) * scale),
        creal::<R>(bottom - re::<R>(0.75) * scale),
    ]
}

/// Evaluate every clause at the library tolerance (or `tolerance` when given).
pub fn check_assumptions<R: Real>(s: &Setting<R>, tolerance: Option<f64>) -> Result<AssumptionReport> {
    let tl = tol::<R>();
    let tol_check = tolerance.unwrap_or(f(tl.check));
    let mut checks = Vec::new();

    checks.push(Check::at_most("L_hermitian", "self-adjoint-L", f(s.l().hermiticity_deviation()?), f(tl.hermitian_input).max(tol_check)));
    checks.push(Check::at_most("T_hermitian", "symmetric-dtn", f(s.t().hermiticity_deviation()?), f(tl.hermitian_input).max(tol_check)));
    let rank = crate::kernel::rank(s.a(), tl.rank_rel)?;
    checks.push(
        Check::flag("A_full_row_rank", "dense-range-A", rank == s.n_boundary()).with_detail(format!("rank {rank} of {}", s.n_boundary())),
    );
    let gap = s.spectrum().distance(creal::<R>(s.lambda0()));
    checks.push(Check::at_least("lambda0_separation", "lambda0-resolvent-point", f(gap), f(tl.spectrum_gap)));

    // relative L-boundedness is automatic in finite dimensions; report the norm proxy
    let r0 = s.resolvent_l(creal::<R>(s.lambda0()))?;
    checks.push(Check::info("A_R_lambda0_norm", "relative-boundedness-A", f(s.a().matmul(&r0)?.norm())));
    checks.push(Check::info("I_norm", "bounded-I", f(s.i().norm())));

    let mut lambdas = vec![creal::<R>(s.lambda0())];
    lambdas.extend(sample_lambdas(s));
    let mut kernel_res = R::zero();
    let mut right_inverse = R::zero();
    let mut trace_identity = R::zero();
    for &lam in &lambdas {
        let g = s.dirichlet(lam)?;
        // (lambda - L_m) maps the lift of G_lambda to zero
        let lift = s.lift_dirichlet_columns(&g, dense::eye::<R>(s.n_boundary()));
        let lm = s.lm_map().apply_block(&lift);
        let emb = s.embed_map().apply_block(&lift);
        let res = &emb.mapv(|z| z * lam) - &lm;
        let r = dense::fro(res.view()) / g.norm_fro().max(R::one());
        kernel_res = kernel_res.max(r);
        // B recovers psi from G_lambda psi
        let pg = pinv(&g, tl.rank_rel)?.matmul(&g)?;
        right_inverse = right_inverse.max(rel_residual(&pg, &ComplexMatrix::identity(s.dh()))?);
        // adj(G_lambda) (conj(lambda) - L) = A on D(L)
        let shifted = s.l().scale(creal::<R>(-R::one())).shift(lam.conj())?;
        let lhs = g.adjoint().matmul(&shifted)?;
        trace_identity = trace_identity.max(rel_residual(&lhs, s.a())?);
    }
    checks.push(Check::at_most("ker_lambda_minus_Lm", "dirichlet-range-in-kernel", f(kernel_res), tol_check));
    checks.push(Check::at_most("B_G_identity", "dirichlet-right-inverse", f(right_inverse), tol_check));
    checks.push(Check::at_most("G_adjoint_trace", "dirichlet-adjoint-trace", f(trace_identity), tol_check));

    let samples = sample_lambdas(s);
    let (mut gdiff, mut tdiff) = (R::zero(), R::zero());
    for (k, &lam) in samples.iter().enumerate() {
        let mu = samples[(k + 1) % samples.len()];
        let (gl, gm) = (s.dirichlet(lam)?, s.dirichlet(mu)?);
        let rg = s.resolve_l(mu, &gl)?.scale(mu - lam);
        gdiff = gdiff.max(rel_residual(&gl.sub(&gm)?, &rg)?);
        let (tl_, tm) = (s.dtn(lam)?, s.dtn(mu)?);
        let rhs = s.a().matmul(&rg)?;
        tdiff = tdiff.max(rel_residual(&tl_.sub(&tm)?, &rhs)?);
    }
    checks.push(Check::at_most("G_difference", "dirichlet-resolvent-identity", f(gdiff), tol_check));
    checks.push(Check::at_most("T_difference", "dtn-resolvent-identity", f(tdiff), tol_check));

    Ok(AssumptionReport { tolerance: tol_check, checks })
}

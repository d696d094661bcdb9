//! Extensions `H_R` of `H_0` given by a boundary relation `R`, their resolvent
//! through `F_lambda` and `S_lambda`, and the self-adjointness test via
//! `M = (adj(F_i) F_i)^{1/2}`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::framework::{Constraint, RealizedOperator, Setting};
use crate::kernel::{dense, extreme_eigenvalues_flat, sqrt_psd, tol, ComplexMatrix, KernelError, LuFactor, WeightedSpace};
use crate::scalar::{creal, cx, Real, C};

use super::field::{assemble_h01, field_with, H01};
use super::maximal::{assemble_hm, MaximalOperator};
use super::relation::LinearRelation;

/// `((B - I*) f, (A_m - I*) f) ∈ R` as `adj(W) D [B - I*; A_m - I*] f = 0`
/// with `W` an orthonormal basis of the complement of `R`.
pub fn relation_constraint<R: Real>(s: &Setting<R>, hm: &MaximalOperator<R>, r: &LinearRelation<R>) -> Result<Constraint<R>> {
    if r.space() != s.dh() {
        return Err(Error::AmbientMismatch);
    }
    let perp = r.graph().complement()?;
    let w = perp.onb();
    let k = s.n_boundary();
    let (wt, wb) = (dense::top_rows(&w, k), dense::bottom_rows(&w, k));
    let weights = s.dh().weights();
    let ones = vec![R::one(); w.ncols()];
    let wt = dense::conj_t(dense::scale_rows_cols(wt.view(), weights, &ones).view());
    let wb = dense::conj_t(dense::scale_rows_cols(wb.view(), weights, &ones).view());
    let cod = WeightedSpace::unit(w.ncols());
    let part = |tb: &ComplexMatrix<R>, ta: &ComplexMatrix<R>| -> Result<ComplexMatrix<R>> {
        let data = wt.dot(tb.data()) + wb.dot(ta.data());
        Ok(ComplexMatrix::new(data, tb.dom().clone(), cod.clone())?)
    };
    Ok(Constraint {
        on_f0: part(&hm.trace_b.on_f0, &hm.trace_a.on_f0)?,
        on_phi: part(&hm.trace_b.on_phi, &hm.trace_a.on_phi)?,
    })
}

/// `H_R = H_m` restricted to `{f : ((B - I*) f, (A_m - I*) f) ∈ R}`.
pub fn assemble_hr<R: Real>(s: &Setting<R>, r: &LinearRelation<R>) -> Result<RealizedOperator<R>> {
    assemble_hr_with(s, &assemble_hm(s)?, r)
}

pub fn assemble_hr_with<R: Real>(s: &Setting<R>, hm: &MaximalOperator<R>, r: &LinearRelation<R>) -> Result<RealizedOperator<R>> {
    RealizedOperator::realize(s, &relation_constraint(s, hm, r)?, &hm.action)
}

/// `(Id + F_lambda (R - S_lambda)^{-1} (A_m - I*)) R(lambda, H_IBC^{0,1})`.
pub fn hr_resolvent<R: Real>(s: &Setting<R>, r: &LinearRelation<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    if r.space() != s.dh() {
        return Err(Error::AmbientMismatch);
    }
    hr_resolvent_with(s, &assemble_hm(s)?, &assemble_h01(s)?, r, lambda)
}

/// [`hr_resolvent`] reusing an assembled `H_m` and `H_IBC^{0,1}`.
pub fn hr_resolvent_with<R: Real>(
    s: &Setting<R>,
    hm: &MaximalOperator<R>,
    h01: &RealizedOperator<R>,
    r: &LinearRelation<R>,
    lambda: C<R>,
) -> Result<ComplexMatrix<R>> {
    if r.space() != s.dh() {
        return Err(Error::AmbientMismatch);
    }
    let f = field_with(s, h01, lambda)?;
    let shifted = r.sub(&LinearRelation::from_operator(&f.boundary_operator(s, hm))?)?;
    let lu = h01.shifted_factor(lambda, H01)?;
    let r01 = lu.inverse();
    let y = hm.trace_a.apply_block(&h01.lift(&r01));
    let phi = shifted.solve_preimage(&y)?;
    Ok(ComplexMatrix::raw(r01 + f.embedded.data().dot(&phi), s.h(), s.h()))
}

/// Outcome of the two self-adjointness tests for `H_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationVerdict<R: Real> {
    pub lambda: R,
    pub is_symmetric: bool,
    /// `M^{-1} (R - S_lambda) M^{-1}` is self-adjoint.
    pub is_selfadjoint_by_theorem: bool,
    /// `H_R` realizes as a matrix on `H` and that matrix is Hermitian.
    pub is_selfadjoint_direct: bool,
    /// Whether `lambda` lies in the resolvent set of `H_R`, when it realizes.
    pub lambda_in_resolvent_set: Option<bool>,
    pub symmetry_residual: R,
    pub theorem_residual: R,
    /// Hermiticity deviation of `H_R`, when it realizes.
    pub direct_residual: Option<R>,
    pub s_hermiticity: R,
    pub m_condition: R,
}

impl<R: Real> ClassificationVerdict<R> {
    pub fn agree(&self) -> bool {
        self.is_selfadjoint_by_theorem == self.is_selfadjoint_direct
    }
}

/// Default classification point: one below the bottom of `spec(H_IBC^{0,1})`.
pub fn default_lambda<R: Real>(h01: &RealizedOperator<R>) -> Result<R> {
    let flat = dense::hermitian_part(h01.matrix().flat().view());
    let ext = extreme_eigenvalues_flat(flat.view(), re_tol::<R>(), 400)?;
    Ok(ext.min - R::one())
}

fn re_tol<R: Real>() -> R {
    tol::<R>().check
}

/// `M = (adj(F_i) F_i)^{1/2}` with its factorization.
pub fn m_operator<R: Real>(s: &Setting<R>, h01: &RealizedOperator<R>) -> Result<(ComplexMatrix<R>, LuFactor<R>)> {
    let fi = field_with(s, h01, cx::<R>(R::zero(), R::one()))?;
    let m2 = fi.embedded.adjoint().matmul(&fi.embedded)?;
    let m2 = ComplexMatrix::from_flat(dense::hermitian_part(m2.flat().view()).view(), s.dh(), s.dh())?;
    let t = tol::<R>();
    let m = sqrt_psd(&m2, t.check, t.check)?;
    let lu = LuFactor::guarded(m.view(), t.condition_guard).map_err(|e| match e {
        KernelError::Singular { condition } => Error::SingularM { condition },
        other => other.into(),
    })?;
    Ok((m, lu))
}

/// Self-adjointness of `H_R` decided twice: through the relation
/// `M^{-1} (R - S_lambda) M^{-1}` and by assembling `H_R` directly.
pub fn classify_selfadjoint<R: Real>(s: &Setting<R>, r: &LinearRelation<R>, lambda: Option<R>) -> Result<ClassificationVerdict<R>> {
    if r.space() != s.dh() {
        return Err(Error::AmbientMismatch);
    }
    let t = tol::<R>();
    let hm = assemble_hm(s)?;
    hm.require_embedded_minimal_domain(s)?;
    let h01 = assemble_h01(s)?;
    let lambda = match lambda {
        Some(l) => l,
        None => default_lambda(&h01)?,
    };
    let f = field_with(s, &h01, creal(lambda))?;
    let sl = f.boundary_operator(s, &hm);
    let s_hermiticity = sl.hermiticity_deviation()?;
    let (_, lu) = m_operator(s, &h01)?;
    let m_condition = lu.condition();
    let minv = LinearRelation::from_operator(&ComplexMatrix::raw(lu.inverse(), s.dh(), s.dh()))?;
    let shifted = r.sub(&LinearRelation::from_operator(&sl)?)?;
    let transformed = minv.compose(&shifted.compose(&minv)?)?;
    let theorem_residual = transformed.selfadjoint_defect()?;
    let symmetry_residual = r.symmetry_defect()?;
    let (direct, direct_residual, in_rho) = match assemble_hr(s, r) {
        Ok(op) => {
            let dev = op.hermiticity_deviation()?;
            let rho = op.resolvent_test(creal(lambda))?.in_resolvent_set;
            (dev <= t.check, Some(dev), Some(rho))
        }
        Err(Error::GraphRealization(_)) => (false, None, None),
        Err(e) => return Err(e),
    };
    Ok(ClassificationVerdict {
        lambda,
        is_symmetric: symmetry_residual <= t.subspace,
        is_selfadjoint_by_theorem: theorem_residual <= t.subspace,
        is_selfadjoint_direct: direct,
        lambda_in_resolvent_set: in_rho,
        symmetry_residual,
        theorem_residual,
        direct_residual,
        s_hermiticity,
        m_condition,
    })
}

/// Largest eigenvalue of the Hermitian part of `S_lambda`.
pub fn boundary_operator_top<R: Real>(sl: &ComplexMatrix<R>) -> Result<R> {
    let flat = dense::hermitian_part(sl.flat().view());
    let ext = extreme_eigenvalues_flat(flat.view(), re_tol::<R>(), 400)?;
    Ok(Float::max(ext.max, ext.min))
}

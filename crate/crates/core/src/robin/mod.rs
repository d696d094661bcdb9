//! Robin-type boundary conditions `alpha A_m + beta B = I*` and the
//! associated Dirichlet, Dirichlet-to-Neumann, Gamma and resolvent formulas.

use ndarray::Array2;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{Constraint, PairBlock, PairMap, RealizedOperator, Setting};
use crate::kernel::{dense, eigvals_general, tol, ComplexMatrix, KernelError, LuFactor};
use crate::scalar::{cone, czero, from_pair, to_pair, Real, C};

/// The quadruple `(alpha, beta, gamma, delta)` of a Robin-type IBC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryParams<R: Real> {
    pub alpha: C<R>,
    pub beta: C<R>,
    pub gamma: C<R>,
    pub delta: C<R>,
}

/// Serializable form with complex entries as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub gamma: [f64; 2],
    pub delta: [f64; 2],
}

impl<R: Real> BoundaryParams<R> {
    pub fn new(alpha: C<R>, beta: C<R>, gamma: C<R>, delta: C<R>) -> Result<Self> {
        if alpha == czero::<R>() && beta == czero::<R>() {
            return Err(Error::DegenerateParams);
        }
        Ok(Self { alpha, beta, gamma, delta })
    }

    /// `(0, 1, 1, 0)`: the condition `B f = I* f` with action `L_m + I A_m`.
    pub fn standard() -> Self {
        Self { alpha: czero::<R>(), beta: cone::<R>(), gamma: cone::<R>(), delta: czero::<R>() }
    }

    pub fn from_f64(alpha: [f64; 2], beta: [f64; 2], gamma: [f64; 2], delta: [f64; 2]) -> Result<Self> {
        Self::new(from_pair::<R>(alpha), from_pair::<R>(beta), from_pair::<R>(gamma), from_pair::<R>(delta))
    }

    pub fn to_doc(&self) -> ParamsDoc {
        ParamsDoc {
            alpha: to_pair::<R>(self.alpha),
            beta: to_pair::<R>(self.beta),
            gamma: to_pair::<R>(self.gamma),
            delta: to_pair::<R>(self.delta),
        }
    }

    pub fn from_doc(d: &ParamsDoc) -> Result<Self> {
        Self::from_f64(d.alpha, d.beta, d.gamma, d.delta)
    }

    pub fn is_symmetric(&self, tol: R) -> bool {
        check_symmetry_params(self, tol)
    }
}

/// `Im(conj(alpha) gamma) = 0`, `Im(conj(beta) delta) = 0` and
/// `beta conj(gamma) - conj(alpha) delta = 1`, each within `tol`.
pub fn check_symmetry_params<R: Real>(p: &BoundaryParams<R>, tol: R) -> bool {
    let ag = (p.alpha.conj() * p.gamma).im;
    let bd = (p.beta.conj() * p.delta).im;
    let det = p.beta * p.gamma.conj() - p.alpha.conj() * p.delta - cone::<R>();
    Float::abs(ag) <= tol && Float::abs(bd) <= tol && det.norm() <= tol
}

/// Constraint `alpha A_m + beta B = 0`: `(alpha A, alpha T + beta)`.
pub fn robin_constraint<R: Real>(s: &Setting<R>, alpha: C<R>, beta: C<R>) -> Result<Constraint<R>> {
    if alpha == czero::<R>() && beta == czero::<R>() {
        return Err(Error::DegenerateParams);
    }
    Ok(PairMap { on_f0: s.a().scale(alpha), on_phi: s.t().scale(alpha).shift(beta)? })
}

/// `L_{alpha,beta}`: `L_m` restricted to `ker(alpha A_m + beta B)`.
pub fn assemble_robin<R: Real>(s: &Setting<R>, alpha: C<R>, beta: C<R>) -> Result<RealizedOperator<R>> {
    RealizedOperator::realize(s, &robin_constraint(s, alpha, beta)?, &s.lm_map())
}

/// Constraint `alpha A_m + beta B - I* embed = 0`.
pub fn ibc_constraint<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>) -> Result<Constraint<R>> {
    let base = robin_constraint(s, p.alpha, p.beta)?;
    base.sub(&s.embed_map().then(s.i_adj())?)
}

/// Action `L_m + gamma I A_m + delta I B` on pairs.
pub fn ibc_action<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>) -> Result<PairMap<R>> {
    let lm = s.lm_map();
    let ia = s.am_map().then(s.i())?.scale(p.gamma);
    let ib = s.b_map().then(s.i())?.scale(p.delta);
    lm.add(&ia)?.add(&ib)
}

/// `H_IBC^{alpha,beta}` realized on `H`.
pub fn assemble_ibc<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>) -> Result<RealizedOperator<R>> {
    RealizedOperator::realize(s, &ibc_constraint(s, p)?, &ibc_action(s, p)?)
}

/// `alpha T + beta` is measured against `|alpha| ||T||_1 + |beta|`.
fn denominator_scale<R: Real>(t: &ComplexMatrix<R>, alpha: C<R>, beta: C<R>) -> R {
    alpha.norm() * dense::norm1(t.view()) + beta.norm()
}

fn factor_scaled_or<R: Real>(m: &ComplexMatrix<R>, scale: R, on_singular: impl Fn(f64) -> Error) -> Result<LuFactor<R>> {
    LuFactor::guarded_scaled(m.view(), tol::<R>().condition_guard, scale).map_err(|e| match e {
        KernelError::Singular { condition } => on_singular(condition),
        other => Error::Kernel(other),
    })
}

/// `(Id - alpha G_lambda (alpha T_lambda + beta)^{-1} A) R(lambda, L)`.
pub fn robin_resolvent<R: Real>(s: &Setting<R>, alpha: C<R>, beta: C<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    if alpha == czero::<R>() && beta == czero::<R>() {
        return Err(Error::DegenerateParams);
    }
    s.check_resolvent_point(lambda)?;
    let t = s.dtn(lambda)?;
    let d = t.scale(alpha).shift(beta)?;
    let lu = factor_scaled_or(&d, denominator_scale(&t, alpha, beta), |condition| Error::NotInRobinResolventSet { condition })?;
    let r = s.resolvent_l(lambda)?;
    let g = s.dirichlet(lambda)?;
    let ar = s.a().matmul(&r)?;
    let corr = g.data().dot(&lu.solve(ar.view())).mapv(|z| z * alpha);
    Ok(ComplexMatrix::raw(r.data() - &corr, s.h(), s.h()))
}

/// `alpha adj(T_conj(lambda)) + beta`, factored.
fn robin_denominator<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<LuFactor<R>> {
    let tb = s.dtn(lambda.conj())?.adjoint();
    let d = tb.scale(p.alpha).shift(p.beta)?;
    factor_scaled_or(&d, denominator_scale(&tb, p.alpha, p.beta), |condition| Error::SingularRobinDenominator { condition })
}

/// `G^{alpha,beta}_lambda = G_lambda (alpha adj(T_conj(lambda)) + beta)^{-1}`.
pub fn robin_dirichlet<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    let lu = robin_denominator(s, p, lambda)?;
    let g = s.dirichlet(lambda)?;
    Ok(right_divide(&g, &lu))
}

/// `X D^{-1}` from a factorization of `D`.
fn right_divide<R: Real>(x: &ComplexMatrix<R>, lu: &LuFactor<R>) -> ComplexMatrix<R> {
    // X D^{-1} = (D^{-H} X^H)^H
    let y = dense::conj_t(lu.solve_adjoint(dense::conj_t(x.view()).view()).view());
    ComplexMatrix::raw(y, x.dom(), x.cod())
}

/// `T^{alpha,beta}_lambda = (gamma T_lambda + delta)(alpha adj(T_conj(lambda)) + beta)^{-1}`.
pub fn robin_dtn<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    let lu = robin_denominator(s, p, lambda)?;
    let num = s.dtn(lambda)?.scale(p.gamma).shift(p.delta)?;
    Ok(right_divide(&num, &lu))
}

/// How a Gamma transform was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaMethod {
    /// `Id + G (Id - I* G)^{-1} I*`.
    Woodbury,
    /// Truncated series `sum_k (G I*)^k`.
    Neumann { terms: usize },
}

/// `Gamma^{alpha,beta}_lambda = (Id - G^{alpha,beta}_lambda I*)^{-1}`.
#[derive(Clone, Debug)]
pub struct GammaTransform<R: Real> {
    pub lambda: C<R>,
    pub method: GammaMethod,
    matrix: ComplexMatrix<R>,
    /// `(alpha adj(T_conj(lambda)) + beta)^{-1} Core^{-1} I*` where `Core = Id - I* G^{ab}`.
    coupling: Array2<C<R>>,
    g: ComplexMatrix<R>,
}

impl<R: Real> GammaTransform<R> {
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    /// `Gamma` on pair-space columns: `P + lift_{G_lambda}(D^{-1} Core^{-1} I* embed P)`.
    pub fn apply_pairs(&self, s: &Setting<R>, p: &PairBlock<R>) -> PairBlock<R> {
        let emb = s.embed_map().apply_block(p);
        let psi = self.coupling.dot(&emb);
        p.add(&s.lift_dirichlet_columns(&self.g, psi))
    }
}

fn at_name<R: Real>(lambda: C<R>, conj: bool) -> &'static str {
    if conj && lambda.im != R::zero() {
        "conj(lambda)"
    } else {
        "lambda"
    }
}

/// Truncated Neumann series for `(Id - X)^{-1}`; stops once a term has
/// norm below `neumann_term` (relative to 1) and gives up after `cap` terms.
pub fn neumann_inverse<R: Real>(x: &ComplexMatrix<R>, cap: usize) -> Option<(ComplexMatrix<R>, usize)> {
    let stop = tol::<R>().neumann_term;
    let mut term = ComplexMatrix::identity(x.dom());
    let mut sum = term.clone();
    for k in 1..=cap {
        term = term.matmul(x).ok()?;
        let size = term.norm_fro();
        if !Float::is_finite(size) {
            return None;
        }
        if size < stop {
            return Some((sum, k));
        }
        sum = sum.add(&term).ok()?;
    }
    None
}

fn gamma_impl<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>, conj: bool) -> Result<GammaTransform<R>> {
    let at = at_name(lambda, conj);
    let d = robin_denominator(s, p, lambda)?;
    let g = s.dirichlet(lambda)?;
    let gab = right_divide(&g, &d);
    let core = ComplexMatrix::identity(s.dh()).sub(&s.i_adj().matmul(&gab)?)?;
    match LuFactor::guarded(core.view(), tol::<R>().condition_guard) {
        Ok(lu) => {
            let ki = lu.solve(s.i_adj().view());
            let matrix = ComplexMatrix::identity(s.h()).add(&ComplexMatrix::raw(gab.data().dot(&ki), s.h(), s.h()))?;
            let coupling = d.solve(ki.view());
            Ok(GammaTransform { lambda, method: GammaMethod::Woodbury, matrix, coupling, g })
        }
        Err(KernelError::Singular { condition }) => {
            let gi = gab.matmul(s.i_adj())?;
            let cap = s.n() + s.n_boundary();
            match neumann_inverse(&gi, cap) {
                Some((matrix, terms)) => {
                    // Core^{-1} I* = I* Gamma on H
                    let ki = s.i_adj().matmul(&matrix)?;
                    let coupling = d.solve(ki.view());
                    Ok(GammaTransform { lambda, method: GammaMethod::Neumann { terms }, matrix, coupling, g })
                }
                None => Err(Error::GammaUndefined { at, condition }),
            }
        }
        Err(e) => Err(e.into()),
    }
}

/// `Gamma^{alpha,beta}_lambda`.
pub fn gamma_transform<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<GammaTransform<R>> {
    gamma_impl(s, p, lambda, false)
}

/// Principal part and correction of `H_IBC - lambda` on its domain.
#[derive(Clone, Debug)]
pub struct PerturbationSplit<R: Real> {
    /// `adj(Id - G^{ab}_{conj(lambda)} I*) (L_{ab} - lambda) (Id - G^{ab}_lambda I*)` on `D(H_IBC)`.
    pub principal: ComplexMatrix<R>,
    /// `I T^{ab}_lambda I*`.
    pub correction: ComplexMatrix<R>,
    /// `H_IBC - lambda` assembled directly.
    pub shifted_ibc: ComplexMatrix<R>,
}

impl<R: Real> PerturbationSplit<R> {
    /// `||principal + correction - (H_IBC - lambda)||_F / max(||H_IBC - lambda||_F, 1)`.
    pub fn sum_residual(&self) -> Result<R> {
        let sum = self.principal.add(&self.correction)?;
        Ok(sum.sub(&self.shifted_ibc)?.norm_fro() / self.shifted_ibc.norm_fro().max(R::one()))
    }
}

pub fn perturbation_split<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<PerturbationSplit<R>> {
    s.check_resolvent_point(lambda)?;
    let h = assemble_ibc(s, p)?;
    let dom = h.lift(&dense::eye::<R>(s.n()));
    let d = robin_denominator(s, p, lambda)?;
    let g = s.dirichlet(lambda)?;
    // G^{ab} I* embed(dom) with embed(dom) = Id, lifted through G_lambda
    let psi = d.solve(s.i_adj().view());
    let w = dom.sub(&s.lift_dirichlet_columns(&g, psi));
    let w_emb = s.embed_map().apply_block(&w);
    let lw = s.lm_map().apply_block(&w) - &w_emb.mapv(|z| z * lambda);
    let gb = robin_dirichlet(s, p, lambda.conj())?;
    let left = ComplexMatrix::identity(s.h()).sub(&s.i().matmul(&gb.adjoint())?)?;
    let principal = ComplexMatrix::raw(left.data().dot(&lw), s.h(), s.h());
    let correction = s.i().matmul(&robin_dtn(s, p, lambda)?)?.matmul(s.i_adj())?;
    let shifted_ibc = h.matrix().shift(-lambda)?;
    Ok(PerturbationSplit { principal, correction, shifted_ibc })
}

/// `Gamma_lambda R(lambda, L_ab) (Id - K)^{-1} adj(Gamma_conj(lambda))` with
/// `K = adj(Gamma_conj(lambda)) I T^{ab}_lambda I* Gamma_lambda R(lambda, L_ab)`.
pub fn ibc_resolvent<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    s.check_resolvent_point(lambda)?;
    let rab = robin_resolvent(s, p.alpha, p.beta, lambda)?;
    let gl = gamma_impl(s, p, lambda, false)?;
    let gb = gamma_impl(s, p, lambda.conj(), true)?;
    let tab = robin_dtn(s, p, lambda)?;
    let gb_adj = gb.matrix().adjoint();
    let gr = gl.matrix().matmul(&rab)?;
    let itab = s.i().matmul(&tab)?.matmul(s.i_adj())?;
    let k = gb_adj.matmul(&itab)?.matmul(&gr)?;
    let core = ComplexMatrix::identity(s.h()).sub(&k)?;
    let scale = R::one() + dense::norm1(k.view());
    let lu = factor_scaled_or(&core, scale, |condition| Error::InvertibilityConditionFails { condition })?;
    let mid = lu.solve(gb_adj.view());
    Ok(ComplexMatrix::raw(gr.data().dot(&mid), s.h(), s.h()))
}

/// Norm proxies for the relative bound of `I T^{ab} I*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeBound<R> {
    /// `||I T^{ab}_lambda I* principal^{-1}||`.
    pub a_proxy: R,
    pub dtn_norm: R,
    /// `dist(-beta, spec(alpha T_lambda))`.
    pub beta_distance: R,
}

pub fn relative_bound_report<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<RelativeBound<R>> {
    let split = perturbation_split(s, p, lambda)?;
    let lu = LuFactor::guarded(split.principal.view(), tol::<R>().condition_guard)?;
    // C P^{-1} = (P^{-H} C^H)^H
    let cp = dense::conj_t(lu.solve_adjoint(dense::conj_t(split.correction.view()).view()).view());
    let a_proxy = ComplexMatrix::raw(cp, s.h(), s.h()).norm();
    let dtn_norm = robin_dtn(s, p, lambda)?.norm();
    let at = s.dtn(lambda)?.scale(p.alpha);
    let ev = eigvals_general(&at)?;
    let beta_distance = ev.iter().fold(R::infinity(), |m, z| m.min((*z + p.beta).norm()));
    Ok(RelativeBound { a_proxy, dtn_norm, beta_distance })
}

/// `||delta I B - delta/beta (I I* embed - alpha I A_m)||` on `D(H_IBC)`,
/// relative to `||delta I B||` (or 1).
pub fn delta_elimination_residual<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>) -> Result<R> {
    if p.beta == czero::<R>() {
        return Err(Error::InvalidInput("delta elimination needs beta != 0".into()));
    }
    let h = assemble_ibc(s, p)?;
    let dom = h.domain_basis();
    let ib = s.i().data().dot(&dom.phi).mapv(|z| z * p.delta);
    let emb = s.embed_map().apply_block(&dom);
    let iie = s.i().data().dot(&s.i_adj().data().dot(&emb));
    let iam = s.i().data().dot(&s.am_map().apply_block(&dom)).mapv(|z| z * p.alpha);
    let rhs = (&iie - &iam).mapv(|z| z * p.delta / p.beta);
    Ok(dense::fro((&ib - &rhs).view()) / dense::fro(ib.view()).max(R::one()))
}

/// Projector distance between the domains of `L_{alpha,beta}` and
/// `L_{conj(alpha),conj(beta)}`.
pub fn conjugate_domain_distance<R: Real>(s: &Setting<R>, alpha: C<R>, beta: C<R>) -> Result<R> {
    let a = assemble_robin(s, alpha, beta)?;
    let b = assemble_robin(s, alpha.conj(), beta.conj())?;
    Ok(a.domain().distance(b.domain())?)
}

/// Projector distance between `D(H_IBC)` and `Gamma_lambda D(L_{alpha,beta})`.
pub fn gamma_domain_distance<R: Real>(s: &Setting<R>, p: &BoundaryParams<R>, lambda: C<R>) -> Result<R> {
    let h = assemble_ibc(s, p)?;
    let l = assemble_robin(s, p.alpha, p.beta)?;
    let gamma = gamma_transform(s, p, lambda)?;
    let mapped = gamma.apply_pairs(s, &l.domain_basis());
    let image = crate::kernel::Subspace::span(s.pair_space(), mapped.stacked().view())?;
    Ok(h.domain().distance(&image)?)
}

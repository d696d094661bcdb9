//! The field `F_lambda = adj((A_m - I*) R(conj(lambda), H_IBC^{0,1}))` and the
//! boundary operator `S_lambda = (A_m - I*) F_lambda`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::framework::{PairBlock, RealizedOperator, Setting};
use crate::kernel::{dense, tol, ComplexMatrix, KernelError, LuFactor, WeightedSpace};
use crate::robin::{assemble_ibc, BoundaryParams};
use crate::scalar::{Real, C};

use super::maximal::{assemble_hm, MaximalOperator};

pub(crate) const H01: &str = "H_IBC^{0,1}";

/// `H_IBC^{0,1}`, the self-adjoint restriction of `H_m` to `ker(B - I*)`.
pub fn assemble_h01<R: Real>(s: &Setting<R>) -> Result<RealizedOperator<R>> {
    assemble_ibc(s, &BoundaryParams::standard())
}

/// `F_lambda` both as pair-space columns and embedded in `H`.
#[derive(Clone, Debug)]
pub struct Field<R: Real> {
    pub lambda: C<R>,
    pub pairs: PairBlock<R>,
    pub embedded: ComplexMatrix<R>,
}

fn boundary_core<R: Real>(s: &Setting<R>, g: &ComplexMatrix<R>, at: &'static str) -> Result<LuFactor<R>> {
    let core = ComplexMatrix::identity(s.dh()).sub(&s.i_adj().matmul(g)?)?;
    LuFactor::guarded(core.view(), tol::<R>().condition_guard).map_err(|e| match e {
        KernelError::Singular { condition } => Error::GammaUndefined { at, condition },
        other => other.into(),
    })
}

/// `adj(K)^{-1} x = W^{-1} K^{-H} W x` for a factored `K` on `space`.
fn weighted_adjoint_solve<R: Real>(k: &LuFactor<R>, space: &WeightedSpace<R>, x: &Array2<C<R>>) -> Array2<C<R>> {
    let w = space.weights();
    let winv: Vec<R> = w.iter().map(|v| R::one() / *v).collect();
    let ones = vec![R::one(); x.ncols()];
    let y = k.solve_adjoint(dense::scale_rows_cols(x.view(), w, &ones).view());
    dense::scale_rows_cols(y.view(), &winv, &ones)
}

/// `F_lambda = Theta + R(lambda, H01) (I T_lambda I* Theta - I)` with
/// `Theta = Gamma G + Gamma R(lambda, L) adj(Gamma_conj(lambda)) I T_lambda`,
/// where `Gamma = (Id - G_lambda I*)^{-1}`.
pub fn field_with<R: Real>(s: &Setting<R>, h01: &RealizedOperator<R>, lambda: C<R>) -> Result<Field<R>> {
    s.check_resolvent_point(lambda)?;
    let shifted = h01.shifted_factor(lambda, H01)?;
    let g = s.dirichlet(lambda)?;
    let gb = s.dirichlet(lambda.conj())?;
    let k = boundary_core(s, &g, "lambda")?;
    let kb = boundary_core(s, &gb, "conj(lambda)")?;
    let t = s.dtn(lambda)?;
    let gamma = |x: &ComplexMatrix<R>| -> Result<ComplexMatrix<R>> {
        let ix = s.i_adj().matmul(x)?;
        Ok(x.add(&g.matmul(&ComplexMatrix::raw(k.solve(ix.view()), x.dom(), s.dh()))?)?)
    };
    // adj(Gamma_conj(lambda)) = Id + I adj(Id - I* G_conj(lambda))^{-1} adj(G_conj(lambda))
    let gamma_bar_adj = |x: &ComplexMatrix<R>| -> Result<ComplexMatrix<R>> {
        let gx = gb.adjoint().matmul(x)?;
        let inner = ComplexMatrix::raw(weighted_adjoint_solve(&kb, s.dh(), gx.data()), x.dom(), s.dh());
        Ok(x.add(&s.i().matmul(&inner)?)?)
    };
    let kinv = ComplexMatrix::raw(k.inverse(), s.dh(), s.dh());
    let it = s.i().matmul(&t)?;
    let second = gamma(&s.resolve_l(lambda, &gamma_bar_adj(&it)?)?)?;
    let theta = g.matmul(&kinv)?.add(&second)?;
    let rhs = it.matmul(s.i_adj())?.matmul(&theta)?.sub(s.i())?;
    let corr = ComplexMatrix::raw(shifted.solve(rhs.view()), s.dh(), s.h());
    let embedded = theta.add(&corr)?;
    let lifted = s.lift_dirichlet_columns(&g, kinv.into_data());
    let pairs = lifted.add(&h01.lift(second.add(&corr)?.data()));
    Ok(Field { lambda, pairs, embedded })
}

pub fn field<R: Real>(s: &Setting<R>, lambda: C<R>) -> Result<Field<R>> {
    field_with(s, &assemble_h01(s)?, lambda)
}

impl<R: Real> Field<R> {
    /// `S_lambda = (A_m - I*) F_lambda`.
    pub fn boundary_operator(&self, s: &Setting<R>, hm: &MaximalOperator<R>) -> ComplexMatrix<R> {
        ComplexMatrix::raw(hm.trace_a.apply_block(&self.pairs), s.dh(), s.dh())
    }

    /// `||(lambda - H_m) F||` relative to `||F||`.
    pub fn eigen_defect(&self, s: &Setting<R>, hm: &MaximalOperator<R>) -> R {
        let k = hm.action.apply_block(&self.pairs);
        let e = s.embed_map().apply_block(&self.pairs).mapv(|z| z * self.lambda);
        dense::fro((&e - &k).view()) / self.embedded.norm_fro().max(R::one())
    }

    /// `||(B - I*) F - Id||`.
    pub fn left_inverse_defect(&self, s: &Setting<R>, hm: &MaximalOperator<R>) -> R {
        let b = hm.trace_b.apply_block(&self.pairs);
        let id = dense::eye::<R>(s.n_boundary());
        dense::fro((&b - &id).view())
    }
}

/// `S_lambda`.
pub fn boundary_operator<R: Real>(s: &Setting<R>, lambda: C<R>) -> Result<ComplexMatrix<R>> {
    let hm = assemble_hm(s)?;
    Ok(field(s, lambda)?.boundary_operator(s, &hm))
}

//! The operator `H_m = L_m + I I* + I (A_m - B)` on the whole pair space,
//! its boundary maps `B - I*` and `A_m - I*`, and the restriction `H_0`.

use ndarray::Array2;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::framework::{PairBlock, PairMap, Setting};
use crate::kernel::{dense, rank, tol, ComplexMatrix, Subspace};
use crate::random;
use crate::scalar::{Real, C};

/// Pair spaces up to this dimension are tested on the full identity basis;
/// larger ones on seeded random probes.
const FULL_FORM_LIMIT: usize = 600;
const PROBES: usize = 16;

#[derive(Clone, Debug)]
pub struct MaximalOperator<R: Real> {
    pub action: PairMap<R>,
    /// `B - I*`.
    pub trace_b: PairMap<R>,
    /// `A_m - I*`.
    pub trace_a: PairMap<R>,
}

pub fn assemble_hm<R: Real>(s: &Setting<R>) -> Result<MaximalOperator<R>> {
    let ii = s.i().matmul(s.i_adj())?;
    let action = s
        .lm_map()
        .add(&s.embed_map().then(&ii)?)?
        .add(&s.am_map().sub(&s.b_map())?.then(s.i())?)?;
    let i_star = s.embed_map().then(s.i_adj())?;
    Ok(MaximalOperator { action, trace_b: s.b_map().sub(&i_star)?, trace_a: s.am_map().sub(&i_star)? })
}

/// Probe block on the pair space: the identity when small, random columns otherwise.
pub(crate) fn probes<R: Real>(s: &Setting<R>, seed: u64) -> PairBlock<R> {
    let d = s.n() + s.n_boundary();
    let stacked = if d <= FULL_FORM_LIMIT {
        dense::eye::<R>(d)
    } else {
        let mut g = random::rng(seed);
        random::array::<R>(&mut g, d, PROBES)
    };
    PairBlock::from_stacked(&stacked, s.n())
}

fn gram<R: Real>(weights: &[R], x: &Array2<C<R>>, y: &Array2<C<R>>) -> Array2<C<R>> {
    let ones = vec![R::one(); y.ncols()];
    dense::conj_t(x.view()).dot(&dense::scale_rows_cols(y.view(), weights, &ones))
}

/// Relative defect of the Green identity
/// `<K v, w> - <v, K w> = <G0 v, G1 w> - <G1 v, G0 w>`
/// for an action `K` and boundary maps `(G0, G1)`, evaluated on probe pairs.
pub fn green_form_defect<R: Real>(s: &Setting<R>, action: &PairMap<R>, trace0: &PairMap<R>, trace1: &PairMap<R>) -> Result<R> {
    if action.cod() != s.h() || trace0.cod() != s.dh() || trace1.cod() != s.dh() {
        return Err(Error::InvalidInput("Green form needs maps into H and ∂H".into()));
    }
    let p = probes(s, 0x9ee_4f0a);
    let (k, e) = (action.apply_block(&p), s.embed_map().apply_block(&p));
    let (g0, g1) = (trace0.apply_block(&p), trace1.apply_block(&p));
    let hw = s.h().weights();
    let dw = s.dh().weights();
    let lhs = gram(hw, &k, &e) - gram(hw, &e, &k);
    let rhs = gram(dw, &g0, &g1) - gram(dw, &g1, &g0);
    let scale = dense::fro(k.view()) * dense::fro(e.view()) + dense::fro(g0.view()) * dense::fro(g1.view());
    Ok(dense::fro((&lhs - &rhs).view()) / scale.max(R::one()))
}

impl<R: Real> MaximalOperator<R> {
    pub fn green_defect(&self, s: &Setting<R>) -> Result<R> {
        green_form_defect(s, &self.action, &self.trace_b, &self.trace_a)
    }

    /// `D(H_0) = ker(B - I*) ∩ ker(A_m - I*)` in the pair space.
    pub fn minimal_domain(&self, s: &Setting<R>) -> Result<Subspace<R>> {
        let stacked = dense::vstack(
            self.trace_b.stacked(s.pair_space())?.view(),
            self.trace_a.stacked(s.pair_space())?.view(),
        );
        let cod = s.dh().direct_sum(s.dh());
        Ok(Subspace::nullspace(&ComplexMatrix::new(stacked, s.pair_space().clone(), cod)?)?)
    }

    /// Rank of the embedding restricted to `D(H_0)`, with `dim D(H_0)`.
    pub fn minimal_embedding_rank(&self, s: &Setting<R>) -> Result<(usize, usize)> {
        let dom = self.minimal_domain(s)?;
        let basis = PairBlock::from_stacked(&dom.onb(), s.n());
        let emb = s.embed_map().apply_block(&basis);
        let dim = dom.dim();
        if dim == 0 {
            return Ok((0, 0));
        }
        let m = ComplexMatrix::new(emb, crate::kernel::WeightedSpace::unit(dim), s.h().clone())?;
        Ok((rank(&m, tol::<R>().rank_rel)?, dim))
    }

    /// Error unless `D(H_0)` embeds injectively into `H`.
    pub fn require_embedded_minimal_domain(&self, s: &Setting<R>) -> Result<()> {
        let (rank, dim) = self.minimal_embedding_rank(s)?;
        if rank < dim {
            return Err(Error::NotDenselyEmbedded { rank, dim });
        }
        Ok(())
    }

    /// `||N^H (K^H W E - E^H W K) N||` over an orthonormal basis `N` of
    /// `D(H_0)`, relative to `||K N|| ||E N||`.
    pub fn minimal_symmetry_defect(&self, s: &Setting<R>) -> Result<R> {
        let dom = self.minimal_domain(s)?;
        let basis = PairBlock::from_stacked(&dom.onb(), s.n());
        let (k, e) = (self.action.apply_block(&basis), s.embed_map().apply_block(&basis));
        let hw = s.h().weights();
        let form = gram(hw, &k, &e) - gram(hw, &e, &k);
        let scale = dense::fro(k.view()) * dense::fro(e.view());
        Ok(dense::fro(form.view()) / Float::max(scale, R::one()))
    }
}

//! The abstract setting `(H, ∂H, L, A, I, T, lambda0)`, the pair
//! representation of the maximal domain and the operators `L_m`, `B`, `A_m`.

mod assumptions;
mod document;
mod free;
mod pair;
mod realize;

pub use assumptions::{check_assumptions, AssumptionReport};
pub use document::{matrix_from_doc, matrix_to_doc, MatrixDoc, RelationDoc, SettingDocument};
pub use free::{FreeSpectrum, KroneckerBlock};
pub use pair::{DomainVector, PairBlock, PairMap};
pub use realize::{Constraint, RealizedOperator};

use ndarray::{Array1, Array2};
use num_traits::Float;

use crate::error::{c_parts, Error, Result};
use crate::kernel::{dense, rank, tol, ComplexMatrix, WeightedSpace};
use crate::scalar::{creal, Real, C};

/// Validation applied by [`Setting::with_options`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Require `T` to be weighted-Hermitian.
    pub require_hermitian_t: bool,
    /// Require `A` to have full row rank.
    pub require_full_rank_a: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { require_hermitian_t: true, require_full_rank_a: true }
    }
}

#[derive(Clone, Debug)]
pub struct Setting<R: Real> {
    h: WeightedSpace<R>,
    dh: WeightedSpace<R>,
    pair: WeightedSpace<R>,
    l: ComplexMatrix<R>,
    a: ComplexMatrix<R>,
    a_adj: ComplexMatrix<R>,
    i: ComplexMatrix<R>,
    i_adj: ComplexMatrix<R>,
    t: ComplexMatrix<R>,
    lambda0: R,
    g0: ComplexMatrix<R>,
    spectrum: FreeSpectrum<R>,
}

fn check_shape<R: Real>(m: &ComplexMatrix<R>, dom: &WeightedSpace<R>, cod: &WeightedSpace<R>, what: &'static str) -> Result<()> {
    if m.dom() != dom || m.cod() != cod {
        return Err(Error::InvalidInput(format!("{what} has the wrong domain or codomain")));
    }
    Ok(())
}

impl<R: Real> Setting<R> {
    /// Validated setting with cached `G0 = G_{lambda0}`.
    pub fn new(l: ComplexMatrix<R>, a: ComplexMatrix<R>, i: ComplexMatrix<R>, t: ComplexMatrix<R>, lambda0: R) -> Result<Self> {
        Self::with_options(l, a, i, t, lambda0, BuildOptions::default())
    }

    pub fn with_options(
        l: ComplexMatrix<R>,
        a: ComplexMatrix<R>,
        i: ComplexMatrix<R>,
        t: ComplexMatrix<R>,
        lambda0: R,
        options: BuildOptions,
    ) -> Result<Self> {
        let tl = tol::<R>();
        let dev = l.hermiticity_deviation()?;
        if !(dev <= tl.hermitian_input) {
            return Err(Error::NotHermitian { operator: "L", deviation: dev.to_f64().unwrap(), tolerance: tl.hermitian_input.to_f64().unwrap() });
        }
        let spectrum = FreeSpectrum::dense(&l, tl.hermitian_input)?;
        Self::assemble(l, a, i, t, lambda0, spectrum, options)
    }

    /// Setting whose `L` comes with a known spectral representation.
    pub fn with_spectrum(
        l: ComplexMatrix<R>,
        a: ComplexMatrix<R>,
        i: ComplexMatrix<R>,
        t: ComplexMatrix<R>,
        lambda0: R,
        spectrum: FreeSpectrum<R>,
        options: BuildOptions,
    ) -> Result<Self> {
        if spectrum.dim() != l.rows() {
            return Err(Error::InvalidInput("spectral representation has the wrong dimension".into()));
        }
        Self::assemble(l, a, i, t, lambda0, spectrum, options)
    }

    fn assemble(
        l: ComplexMatrix<R>,
        a: ComplexMatrix<R>,
        i: ComplexMatrix<R>,
        t: ComplexMatrix<R>,
        lambda0: R,
        spectrum: FreeSpectrum<R>,
        options: BuildOptions,
    ) -> Result<Self> {
        let tl = tol::<R>();
        if !Float::is_finite(lambda0) {
            return Err(Error::InvalidLambda0);
        }
        let h = l.dom().clone();
        check_shape(&l, &h, &h, "L")?;
        let dh = a.cod().clone();
        check_shape(&a, &h, &dh, "A")?;
        check_shape(&i, &dh, &h, "I")?;
        check_shape(&t, &dh, &dh, "T")?;
        let dist = spectrum.distance(creal::<R>(lambda0));
        if !(dist > tl.spectrum_gap) {
            return Err(Error::LambdaInSpectrumL { re: lambda0.to_f64().unwrap(), im: 0.0, distance: dist.to_f64().unwrap() });
        }
        if options.require_hermitian_t {
            let dev = t.hermiticity_deviation()?;
            if !(dev <= tl.hermitian_input) {
                return Err(Error::NotHermitian { operator: "T", deviation: dev.to_f64().unwrap(), tolerance: tl.hermitian_input.to_f64().unwrap() });
            }
        }
        if options.require_full_rank_a {
            let r = rank(&a, tl.rank_rel)?;
            if r != dh.dim() {
                return Err(Error::RankDeficientA { rank: r, expected: dh.dim() });
            }
        }
        let a_adj = a.adjoint();
        let i_adj = i.adjoint();
        let g0 = ComplexMatrix::raw(spectrum.resolve(creal::<R>(lambda0), a_adj.view()), &dh, &h);
        let pair = h.direct_sum(&dh);
        Ok(Self { h, dh, pair, l, a, a_adj, i, i_adj, t, lambda0, g0, spectrum })
    }

    pub fn h(&self) -> &WeightedSpace<R> {
        &self.h
    }

    pub fn dh(&self) -> &WeightedSpace<R> {
        &self.dh
    }

    /// `H ⊕ ∂H` with the direct-sum weights.
    pub fn pair_space(&self) -> &WeightedSpace<R> {
        &self.pair
    }

    pub fn n(&self) -> usize {
        self.h.dim()
    }

    pub fn n_boundary(&self) -> usize {
        self.dh.dim()
    }

    pub fn l(&self) -> &ComplexMatrix<R> {
        &self.l
    }

    pub fn a(&self) -> &ComplexMatrix<R> {
        &self.a
    }

    pub fn a_adj(&self) -> &ComplexMatrix<R> {
        &self.a_adj
    }

    pub fn i(&self) -> &ComplexMatrix<R> {
        &self.i
    }

    pub fn i_adj(&self) -> &ComplexMatrix<R> {
        &self.i_adj
    }

    pub fn t(&self) -> &ComplexMatrix<R> {
        &self.t
    }

    pub fn lambda0(&self) -> R {
        self.lambda0
    }

    pub fn g0(&self) -> &ComplexMatrix<R> {
        &self.g0
    }

    pub fn spectrum(&self) -> &FreeSpectrum<R> {
        &self.spectrum
    }

    /// Same operators with a different identification operator `I`.
    pub fn with_identification(&self, i: ComplexMatrix<R>) -> Result<Self> {
        check_shape(&i, &self.dh, &self.h, "I")?;
        let mut s = self.clone();
        s.i_adj = i.adjoint();
        s.i = i;
        Ok(s)
    }

    /// Error unless `sigma_min(lambda - L) > resolvent_rel * ||L||`.
    pub fn check_resolvent_point(&self, lambda: C<R>) -> Result<()> {
        let dist = self.spectrum.distance(lambda);
        let threshold = tol::<R>().resolvent_rel * self.spectrum.norm();
        if dist > threshold {
            Ok(())
        } else {
            let (re_, im_) = c_parts::<R>(lambda);
            Err(Error::LambdaInSpectrumL { re: re_, im: im_, distance: dist.to_f64().unwrap() })
        }
    }

    pub fn is_lambda0(&self, lambda: C<R>) -> bool {
        lambda.im == R::zero() && lambda.re == self.lambda0
    }

    /// `R(lambda, L) x` for the columns of `x`.
    pub fn resolve_l(&self, lambda: C<R>, x: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
        self.check_resolvent_point(lambda)?;
        if x.cod() != &self.h {
            return Err(Error::InvalidInput("resolvent applied to a block outside H".into()));
        }
        Ok(ComplexMatrix::raw(self.spectrum.resolve(lambda, x.view()), x.dom(), &self.h))
    }

    /// Full matrix `R(lambda, L)`.
    pub fn resolvent_l(&self, lambda: C<R>) -> Result<ComplexMatrix<R>> {
        self.resolve_l(lambda, &ComplexMatrix::identity(&self.h))
    }

    /// Dirichlet operator `G_lambda = adj(A R(conj(lambda), L)) = R(lambda, L) adj(A)`.
    pub fn dirichlet(&self, lambda: C<R>) -> Result<ComplexMatrix<R>> {
        if self.is_lambda0(lambda) {
            return Ok(self.g0.clone());
        }
        self.resolve_l(lambda, &self.a_adj)
    }

    /// Pair representation of `G_lambda psi`: `(G_lambda psi - G0 psi, psi)`.
    pub fn dirichlet_lift(&self, lambda: C<R>) -> Result<PairBlock<R>> {
        let g = self.dirichlet(lambda)?;
        Ok(self.lift_dirichlet_columns(&g, dense::eye::<R>(self.n_boundary())))
    }

    /// Pair representation of `G_lambda X` given `g = G_lambda` and `X`.
    pub fn lift_dirichlet_columns(&self, g: &ComplexMatrix<R>, x: Array2<C<R>>) -> PairBlock<R> {
        let gx = g.data().dot(&x);
        let f0 = &gx - &self.g0.data().dot(&x);
        PairBlock::new(f0, x)
    }

    /// Dirichlet-to-Neumann operator `T_lambda = A_m G_lambda = T + A (G_lambda - G0)`.
    pub fn dtn(&self, lambda: C<R>) -> Result<ComplexMatrix<R>> {
        if self.is_lambda0(lambda) {
            return Ok(self.t.clone());
        }
        let g = self.dirichlet(lambda)?;
        let diff = g.sub(&self.g0)?;
        Ok(self.t.add(&self.a.matmul(&diff)?)?)
    }

    /// `L_m` as a pair map: `(L, lambda0 G0)`.
    pub fn lm_map(&self) -> PairMap<R> {
        PairMap { on_f0: self.l.clone(), on_phi: self.g0.scale(creal::<R>(self.lambda0)) }
    }

    /// `B`: `(0, Id)`.
    pub fn b_map(&self) -> PairMap<R> {
        PairMap { on_f0: ComplexMatrix::zeros(&self.h, &self.dh), on_phi: ComplexMatrix::identity(&self.dh) }
    }

    /// `A_m`: `(A, T)`.
    pub fn am_map(&self) -> PairMap<R> {
        PairMap { on_f0: self.a.clone(), on_phi: self.t.clone() }
    }

    /// Embedding into `H`: `(Id, G0)`.
    pub fn embed_map(&self) -> PairMap<R> {
        PairMap { on_f0: ComplexMatrix::identity(&self.h), on_phi: self.g0.clone() }
    }

    pub fn vector(&self, f0: Array1<C<R>>, phi: Array1<C<R>>) -> Result<DomainVector<R>> {
        let v = DomainVector { f0, phi, base_lambda: self.lambda0 };
        self.check_vector(&v)?;
        Ok(v)
    }

    pub fn check_vector(&self, v: &DomainVector<R>) -> Result<()> {
        if v.f0.len() != self.n() || v.phi.len() != self.n_boundary() {
            return Err(Error::ForeignVector(format!(
                "expected dims ({}, {}), found ({}, {})",
                self.n(),
                self.n_boundary(),
                v.f0.len(),
                v.phi.len()
            )));
        }
        if v.base_lambda != self.lambda0 {
            return Err(Error::ForeignVector("base lambda differs from the setting's lambda0".into()));
        }
        Ok(())
    }

    /// `f0 + G0 phi`.
    pub fn embed(&self, v: &DomainVector<R>) -> Result<Array1<C<R>>> {
        self.check_vector(v)?;
        Ok(&v.f0 + &self.g0.data().dot(&v.phi))
    }

    /// `L f0 + lambda0 G0 phi`.
    pub fn apply_lm(&self, v: &DomainVector<R>) -> Result<Array1<C<R>>> {
        self.check_vector(v)?;
        let g = self.g0.data().dot(&v.phi).mapv(|z| z.scale(self.lambda0));
        Ok(self.l.data().dot(&v.f0) + g)
    }

    pub fn apply_b(&self, v: &DomainVector<R>) -> Result<Array1<C<R>>> {
        self.check_vector(v)?;
        Ok(v.phi.clone())
    }

    /// `A f0 + T phi`.
    pub fn apply_am(&self, v: &DomainVector<R>) -> Result<Array1<C<R>>> {
        self.check_vector(v)?;
        Ok(self.a.data().dot(&v.f0) + self.t.data().dot(&v.phi))
    }

    /// Decomposition of `embed(v)` relative to `ker(mu - L_m)`:
    /// `f0' = f0 + (mu - lambda0) R(mu, L) G0 phi`, same `phi`.
    pub fn rebase(&self, v: &DomainVector<R>, mu: C<R>) -> Result<RebasedVector<R>> {
        self.check_vector(v)?;
        if self.is_lambda0(mu) {
            return Ok(RebasedVector { f0: v.f0.clone(), phi: v.phi.clone(), mu });
        }
        self.check_resolvent_point(mu)?;
        let g0phi = self.g0.data().dot(&v.phi).insert_axis(ndarray::Axis(1));
        let r = self.spectrum.resolve(mu, g0phi.view()).column(0).to_owned();
        let shift = mu - creal::<R>(self.lambda0);
        Ok(RebasedVector { f0: &v.f0 + &r.mapv(|z| z * shift), phi: v.phi.clone(), mu })
    }

    /// Embedding computed in another base: `f0' + G_mu phi`.
    pub fn embed_rebased(&self, v: &RebasedVector<R>) -> Result<Array1<C<R>>> {
        let g = self.dirichlet(v.mu)?;
        Ok(&v.f0 + &g.data().dot(&v.phi))
    }

    /// `L_m` computed in another base: `L f0' + mu G_mu phi`.
    pub fn apply_lm_rebased(&self, v: &RebasedVector<R>) -> Result<Array1<C<R>>> {
        let g = self.dirichlet(v.mu)?;
        let mu = v.mu;
        Ok(self.l.data().dot(&v.f0) + g.data().dot(&v.phi).mapv(|z| z * mu))
    }

    /// `<L_m v, w> - <v, L_m w> - <B v, A_m w> + <A_m v, B w>`.
    pub fn green_residual(&self, v: &DomainVector<R>, w: &DomainVector<R>) -> Result<C<R>> {
        let (ev, ew) = (self.embed(v)?, self.embed(w)?);
        let (lv, lw) = (self.apply_lm(v)?, self.apply_lm(w)?);
        let (bv, bw) = (self.apply_b(v)?, self.apply_b(w)?);
        let (av, aw) = (self.apply_am(v)?, self.apply_am(w)?);
        let h = &self.h;
        let d = &self.dh;
        Ok(h.inner(lv.view(), ew.view()) - h.inner(ev.view(), lw.view()) - d.inner(bv.view(), aw.view()) + d.inner(av.view(), bw.view()))
    }

    /// Norm of a pair-space vector in the direct-sum inner product.
    pub fn pair_norm(&self, v: &DomainVector<R>) -> R {
        let (a, b) = (self.h.norm(v.f0.view()), self.dh.norm(v.phi.view()));
        Float::sqrt(a * a + b * b)
    }

    /// `D(L_0) = ker A` as a subspace of `H`.
    pub fn minimal_domain(&self) -> Result<crate::kernel::Subspace<R>> {
        Ok(crate::kernel::Subspace::nullspace(&self.a)?)
    }

    /// Deficiency indices `(n_+, n_-)` of `L_0 = L|ker A` in `H`; in finite
    /// dimensions both equal `dim H - dim ker A`.
    pub fn deficiency_indices(&self) -> Result<(usize, usize)> {
        let k = self.minimal_domain()?.dim();
        let d = self.n() - k;
        Ok((d, d))
    }

    pub fn to_document(&self) -> SettingDocument {
        SettingDocument::from_setting(self)
    }
}

/// Pair decomposition of a maximal-domain element relative to `ker(mu - L_m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RebasedVector<R: Real> {
    pub f0: Array1<C<R>>,
    pub phi: Array1<C<R>>,
    pub mu: C<R>,
}

/// Relative Frobenius residual `||x - y|| / max(||y||, 1)`.
pub(crate) fn rel_residual<R: Real>(x: &ComplexMatrix<R>, y: &ComplexMatrix<R>) -> Result<R> {
    let d = x.sub(y)?.norm_fro();
    Ok(d / y.norm_fro().max(R::one()))
}


#[cfg(test)]
mod tests;

//! Linear relations in a weighted space `K`: subspaces of `K ⊕ K`.

use ndarray::{s, Array2};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::framework::{matrix_from_doc, matrix_to_doc, RelationDoc};
use crate::kernel::decomp::svd_flat;
use crate::kernel::subspace::null_columns_flat;
use crate::kernel::{dense, tol, ComplexMatrix, Subspace, WeightedSpace};
use crate::scalar::{Real, C};

/// A relation `R ⊂ K ⊕ K`, read as a multi-valued map from the first to the
/// second component.
#[derive(Clone, Debug)]
pub struct LinearRelation<R: Real> {
    space: WeightedSpace<R>,
    graph: Subspace<R>,
}

impl<R: Real> LinearRelation<R> {
    /// Span of the columns of `basis`, stacked as `[first; second]`.
    pub fn from_basis(space: &WeightedSpace<R>, basis: &Array2<C<R>>) -> Result<Self> {
        let sum = space.direct_sum(space);
        Ok(Self { space: space.clone(), graph: Subspace::span(&sum, basis.view())? })
    }

    fn from_subspace(space: &WeightedSpace<R>, graph: Subspace<R>) -> Self {
        Self { space: space.clone(), graph }
    }

    pub fn zero(space: &WeightedSpace<R>) -> Self {
        Self::from_subspace(space, Subspace::zero(&space.direct_sum(space)))
    }

    /// `{(x, y) : x, y ∈ K}`.
    pub fn whole(space: &WeightedSpace<R>) -> Self {
        Self::from_subspace(space, Subspace::whole(&space.direct_sum(space)))
    }

    /// Graph `{(x, M x)}` of a square matrix.
    pub fn from_operator(m: &ComplexMatrix<R>) -> Result<Self> {
        if m.dom() != m.cod() {
            return Err(Error::AmbientMismatch);
        }
        let n = m.rows();
        Self::from_basis(m.dom(), &dense::vstack(dense::eye::<R>(n).view(), m.view()))
    }

    /// `{(alpha f, -beta f) : f ∈ K}`.
    pub fn from_coefficients(alpha: &ComplexMatrix<R>, beta: &ComplexMatrix<R>) -> Result<Self> {
        if alpha.dom() != alpha.cod() || beta.dom() != alpha.dom() || beta.cod() != alpha.cod() {
            return Err(Error::AmbientMismatch);
        }
        let stacked = dense::vstack(alpha.view(), beta.data().mapv(|z| -z).view());
        let r = Self::from_basis(alpha.dom(), &stacked)?;
        if r.dim() == 0 {
            return Err(Error::EmptyRelation);
        }
        Ok(r)
    }

    pub fn from_doc(space: &WeightedSpace<R>, doc: &RelationDoc) -> Result<Self> {
        let rows = 2 * space.dim();
        let cols = doc.basis.first().map_or(0, |r| r.len());
        let basis = matrix_from_doc::<R>(&doc.basis, rows, cols, &doc.name)?;
        Self::from_basis(space, &basis)
    }

    pub fn to_doc(&self, name: &str) -> RelationDoc {
        RelationDoc { name: name.to_string(), basis: matrix_to_doc::<R>(self.graph.basis()) }
    }

    pub fn space(&self) -> &WeightedSpace<R> {
        &self.space
    }

    pub fn graph(&self) -> &Subspace<R> {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    fn k(&self) -> usize {
        self.space.dim()
    }

    /// Orthonormal basis split into first and second components.
    pub fn components(&self) -> (Array2<C<R>>, Array2<C<R>>) {
        let q = self.graph.onb();
        let k = self.k();
        (q.slice(s![..k, ..]).to_owned(), q.slice(s![k.., ..]).to_owned())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    fn stacked(&self, top: Array2<C<R>>, bottom: Array2<C<R>>) -> Result<Self> {
        Self::from_basis(&self.space, &dense::vstack(top.view(), bottom.view()))
    }

    /// `dom R = {x : (x, y) ∈ R}`.
    pub fn domain(&self) -> Result<Subspace<R>> {
        Ok(Subspace::span(&self.space, self.components().0.view())?)
    }

    /// `ran R = {y : (x, y) ∈ R}`.
    pub fn range(&self) -> Result<Subspace<R>> {
        Ok(Subspace::span(&self.space, self.components().1.view())?)
    }

    /// `ker R = {x : (x, 0) ∈ R}`.
    pub fn kernel(&self) -> Result<Subspace<R>> {
        let (x, y) = self.components();
        let c = null_columns_flat(self.flat(&y).view())?;
        Ok(Subspace::span(&self.space, x.dot(&c).view())?)
    }

    /// `mul R = {y : (0, y) ∈ R}`.
    pub fn multivalued_part(&self) -> Result<Subspace<R>> {
        let (x, y) = self.components();
        let c = null_columns_flat(self.flat(&x).view())?;
        Ok(Subspace::span(&self.space, y.dot(&c).view())?)
    }

    pub fn is_operator(&self) -> Result<bool> {
        Ok(self.multivalued_part()?.dim() == 0)
    }

    fn flat(&self, a: &Array2<C<R>>) -> Array2<C<R>> {
        let ones = vec![R::one(); a.ncols()];
        dense::scale_rows_cols(a.view(), &self.space.sqrt_weights(), &ones)
    }

    /// `R^{-1} = {(y, x) : (x, y) ∈ R}`.
    pub fn inverse(&self) -> Result<Self> {
        let (x, y) = self.components();
        self.stacked(y, x)
    }

    /// `-R = {(x, -y)}`.
    pub fn neg(&self) -> Result<Self> {
        let (x, y) = self.components();
        self.stacked(x, y.mapv(|z| -z))
    }

    /// `z R = {(x, z y)}`.
    pub fn scale(&self, z: C<R>) -> Result<Self> {
        let (x, y) = self.components();
        self.stacked(x, y.mapv(|w| w * z))
    }

    /// `R + S = {(x, y + w) : (x, y) ∈ R, (x, w) ∈ S}`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (x1, y1) = self.components();
        let (x2, y2) = other.components();
        let r = x1.ncols();
        let joint = dense::hstack(self.flat(&x1).view(), self.flat(&x2).mapv(|z| -z).view());
        let c = null_columns_flat(joint.view())?;
        let (c1, c2) = (c.slice(s![..r, ..]).to_owned(), c.slice(s![r.., ..]).to_owned());
        self.stacked(x1.dot(&c1), y1.dot(&c1) + y2.dot(&c2))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    /// `R S = {(x, z) : (x, y) ∈ S, (y, z) ∈ R}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (xs, ys) = other.components();
        let (xr, yr) = self.components();
        let r = ys.ncols();
        let joint = dense::hstack(self.flat(&ys).view(), self.flat(&xr).mapv(|z| -z).view());
        let c = null_columns_flat(joint.view())?;
        let (cs, cr) = (c.slice(s![..r, ..]).to_owned(), c.slice(s![r.., ..]).to_owned());
        self.stacked(xs.dot(&cs), yr.dot(&cr))
    }

    /// `R* = {(x, y) : <u, y> = <v, x> for all (u, v) ∈ R}`, the orthogonal
    /// complement of `{(v, -u) : (u, v) ∈ R}`.
    pub fn adjoint(&self) -> Result<Self> {
        let (x, y) = self.components();
        let rotated = Self::from_basis(&self.space, &dense::vstack(y.view(), x.mapv(|z| -z).view()))?;
        Ok(Self::from_subspace(&self.space, rotated.graph.complement()?))
    }

    /// Projector distance between the graphs.
    pub fn distance(&self, other: &Self) -> Result<R> {
        self.check_same(other)?;
        Ok(self.graph.distance(&other.graph)?)
    }

    /// `||(Id - P_{R*}) P_R||`: vanishes iff `R ⊂ R*`.
    pub fn symmetry_defect(&self) -> Result<R> {
        Ok(self.adjoint()?.graph.excess(&self.graph)?)
    }

    pub fn is_symmetric(&self) -> Result<bool> {
        Ok(self.symmetry_defect()? <= tol::<R>().subspace)
    }

    /// Projector distance between `R` and `R*`.
    pub fn selfadjoint_defect(&self) -> Result<R> {
        self.distance(&self.adjoint()?)
    }

    pub fn is_selfadjoint(&self) -> Result<bool> {
        Ok(self.selfadjoint_defect()? <= tol::<R>().subspace)
    }

    /// `max |<u, y> - <v, x>|` over orthonormal basis pairs `(u, v)` of
    /// `self` and `(x, y)` of `other`: zero iff `other ⊂ self*`.
    pub fn adjoint_pairing_defect(&self, other: &Self) -> Result<R> {
        self.check_same(other)?;
        let (u, v) = self.components();
        let (x, y) = other.components();
        let w = self.space.weights();
        let mut worst = R::zero();
        for i in 0..u.ncols() {
            for j in 0..x.ncols() {
                let mut d = C::<R>::new(R::zero(), R::zero());
                for k in 0..w.len() {
                    d = d + (u[(k, i)].conj() * y[(k, j)] - v[(k, i)].conj() * x[(k, j)]).scale(w[k]);
                }
                worst = Float::max(worst, d.norm());
            }
        }
        Ok(worst)
    }

    /// For each column `y` of `rhs` the unique `x` with `(x, y) ∈ R`.
    ///
    /// Fails with `MultiValued` when `R` has a kernel (so `R^{-1}` is not an
    /// operator) and with `RangeDeficient` when some column misses `ran R`.
    pub fn solve_preimage(&self, rhs: &Array2<C<R>>) -> Result<Array2<C<R>>> {
        if rhs.nrows() != self.k() {
            return Err(Error::AmbientMismatch);
        }
        let t = tol::<R>();
        let (x, y) = self.components();
        let r = y.ncols();
        let yf = self.flat(&y);
        let (u, sv, vh) = if r == 0 {
            (dense::zeros::<R>(self.k(), 0), ndarray::Array1::zeros(0), dense::zeros::<R>(0, 0))
        } else {
            svd_flat(yf.view())?
        };
        // basis is orthonormal, so singular values are measured against 1
        let rank = sv.iter().filter(|s| **s > t.rank_rel).count();
        if rank < r {
            return Err(Error::MultiValued(r - rank));
        }
        let bf = self.flat(rhs);
        let ut_b = dense::conj_t(u.view()).dot(&bf);
        let mut scaled = ut_b.clone();
        for (i, s) in sv.iter().enumerate() {
            let inv = R::one() / *s;
            scaled.row_mut(i).mapv_inplace(|z| z.scale(inv));
        }
        let coef = dense::conj_t(vh.view()).dot(&scaled);
        let resid = &bf - &u.dot(&ut_b);
        let defect = dense::fro(resid.view()) / dense::fro(bf.view()).max(R::min_positive_value());
        if defect > t.resolvent_rel {
            return Err(Error::RangeDeficient(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(x.dot(&coef))
    }
}

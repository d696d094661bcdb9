//! Operators given by a linear constraint on the pair space and an action,
//! realized as matrices on `H` when the constrained domain is a graph over `H`.

use std::sync::OnceLock;

use ndarray::{Array1, Array2, Axis};

use super::pair::{PairBlock, PairMap};
use super::Setting;
use crate::error::{Error, Result};
use crate::kernel::{dense, resolvent_test, tol, ComplexMatrix, LuFactor, ResolventTest, Subspace, WeightedSpace};
use crate::scalar::{Real, C};

/// Pair-space constraint `C0 f0 + C1 phi = 0`.
pub type Constraint<R> = PairMap<R>;

#[derive(Clone, Debug)]
enum DomainForm<R: Real> {
    /// Domain `{(f0, Y f0)}`; `z = (Id + Y G0)^{-1} Y`.
    Graph { y: Array2<C<R>>, z: Array2<C<R>> },
    /// Domain spanned by `basis`; `embedding = embed(basis)`.
    Basis { basis: PairBlock<R>, embedding: Array2<C<R>>, lu: LuFactor<R> },
}

/// Constrained operator with its matrix on `H`, its domain in the pair
/// space and the map lifting `H` back onto that domain.
#[derive(Debug)]
pub struct RealizedOperator<R: Real> {
    matrix: ComplexMatrix<R>,
    form: DomainForm<R>,
    g0: Array2<C<R>>,
    pair: WeightedSpace<R>,
    condition: R,
    domain: OnceLock<Subspace<R>>,
}

impl<R: Real> Clone for RealizedOperator<R> {
    fn clone(&self) -> Self {
        Self {
            matrix: self.matrix.clone(),
            form: self.form.clone(),
            g0: self.g0.clone(),
            pair: self.pair.clone(),
            condition: self.condition,
            domain: self.domain.clone(),
        }
    }
}

fn f64_of<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<R: Real> RealizedOperator<R> {
    /// Realize `action` on `{v : constraint v = 0}`.
    pub fn realize(s: &Setting<R>, constraint: &Constraint<R>, action: &PairMap<R>) -> Result<Self> {
        if constraint.on_f0.dom() != s.h() || constraint.on_phi.dom() != s.dh() {
            return Err(Error::InvalidInput("constraint does not act on the pair space".into()));
        }
        if action.on_f0.dom() != s.h() || action.on_phi.dom() != s.dh() || action.cod() != s.h() {
            return Err(Error::InvalidInput("action must map the pair space into H".into()));
        }
        let guard = tol::<R>().condition_guard;
        if constraint.cod().dim() == s.n_boundary() {
            if let Ok(lu) = LuFactor::guarded(constraint.on_phi.view(), guard) {
                return Self::realize_graph(s, constraint, action, &lu);
            }
        }
        Self::realize_nullspace(s, constraint, action)
    }

    fn realize_graph(s: &Setting<R>, constraint: &Constraint<R>, action: &PairMap<R>, c1: &LuFactor<R>) -> Result<Self> {
        let guard = tol::<R>().condition_guard;
        let g0 = s.g0().data();
        let y = c1.solve(constraint.on_f0.view()).mapv(|z| -z);
        let cap = dense::add_diag(y.dot(g0).view(), crate::scalar::cone::<R>());
        let cap_lu = LuFactor::new(cap.view()).map_err(|e| Error::GraphRealization(e.to_string()))?;
        let embedding = dense::add_diag(g0.dot(&y).view(), crate::scalar::cone::<R>());
        let condition = match LuFactor::new(embedding.view()) {
            Ok(lu) => lu.condition(),
            Err(_) => R::infinity(),
        };
        if !(condition <= guard) {
            return Err(Error::GraphRealization(format!("embedding condition {:e}", f64_of(condition))));
        }
        drop(embedding);
        let z = cap_lu.solve(y.view());
        // M = K0 E^{-1} + K1 Z with E^{-1} = Id - G0 Z
        let k0g0 = action.on_f0.data().dot(g0);
        let m = action.on_f0.data() + &(action.on_phi.data() - &k0g0).dot(&z);
        Ok(Self {
            matrix: ComplexMatrix::raw(m, s.h(), s.h()),
            form: DomainForm::Graph { y, z },
            g0: g0.clone(),
            pair: s.pair_space().clone(),
            condition,
            domain: OnceLock::new(),
        })
    }

    fn realize_nullspace(s: &Setting<R>, constraint: &Constraint<R>, action: &PairMap<R>) -> Result<Self> {
        let guard = tol::<R>().condition_guard;
        let stacked = constraint.stacked(s.pair_space())?;
        let null = Subspace::nullspace(&stacked)?;
        if null.dim() != s.n() {
            return Err(Error::GraphRealization(format!("domain has dimension {}, H has {}", null.dim(), s.n())));
        }
        let basis = PairBlock::from_stacked(null.basis(), s.n());
        let embedding = s.embed_map().apply_block(&basis);
        let lu = LuFactor::new(embedding.view()).map_err(|e| Error::GraphRealization(e.to_string()))?;
        let condition = lu.condition();
        if !(condition <= guard) {
            return Err(Error::GraphRealization(format!("embedding condition {:e}", f64_of(condition))));
        }
        let kn = action.apply_block(&basis);
        // M E = K N  <=>  E^H M^H = (K N)^H
        let m = dense::conj_t(lu.solve_adjoint(dense::conj_t(kn.view()).view()).view());
        let domain = OnceLock::new();
        let _ = domain.set(null);
        Ok(Self {
            matrix: ComplexMatrix::raw(m, s.h(), s.h()),
            form: DomainForm::Basis { basis, embedding, lu },
            g0: s.g0().data().clone(),
            pair: s.pair_space().clone(),
            condition,
            domain,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<R> {
        self.matrix
    }

    /// Condition estimate of the embedding of the domain parametrization into `H`.
    pub fn condition(&self) -> R {
        self.condition
    }

    pub fn is_graph_form(&self) -> bool {
        matches!(self.form, DomainForm::Graph { .. })
    }

    fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Domain parametrization as pair-space columns.
    pub fn domain_basis(&self) -> PairBlock<R> {
        match &self.form {
            DomainForm::Graph { y, .. } => PairBlock::new(dense::eye::<R>(self.n()), y.clone()),
            DomainForm::Basis { basis, .. } => basis.clone(),
        }
    }

    pub fn domain(&self) -> &Subspace<R> {
        self.domain.get_or_init(|| {
            let b = self.domain_basis().stacked();
            Subspace::from_independent(&self.pair, b).expect("pair-space shape")
        })
    }

    /// `embed(domain_basis)` as a square matrix on `H`.
    pub fn embedding(&self) -> Array2<C<R>> {
        match &self.form {
            DomainForm::Graph { y, .. } => dense::add_diag(self.g0.dot(y).view(), crate::scalar::cone::<R>()),
            DomainForm::Basis { embedding, .. } => embedding.clone(),
        }
    }

    /// Pair-space element of the domain embedding onto each column of `x`.
    pub fn lift(&self, x: &Array2<C<R>>) -> PairBlock<R> {
        match &self.form {
            DomainForm::Graph { z, .. } => {
                let phi = z.dot(x);
                let f0 = x - &self.g0.dot(&phi);
                PairBlock::new(f0, phi)
            }
            DomainForm::Basis { basis, lu, .. } => basis.times(lu.solve(x.view()).view()),
        }
    }

    pub fn lift_vector(&self, x: &Array1<C<R>>) -> PairBlock<R> {
        self.lift(&x.clone().insert_axis(Axis(1)))
    }

    /// `||M embed(P) - K P|| / max(||K P||, 1)` over the domain parametrization `P`.
    pub fn action_residual(&self, action: &PairMap<R>) -> R {
        let p = self.domain_basis();
        let lhs = self.matrix.data().dot(&self.embedding());
        let rhs = action.apply_block(&p);
        dense::fro((&lhs - &rhs).view()) / dense::fro(rhs.view()).max(R::one())
    }

    pub fn hermiticity_deviation(&self) -> Result<R> {
        Ok(self.matrix.hermiticity_deviation()?)
    }

    pub fn resolvent_test(&self, lambda: C<R>) -> Result<ResolventTest<R>> {
        Ok(resolvent_test(&self.matrix, lambda, tol::<R>().resolvent_rel)?)
    }

    /// Factorization of `lambda - M`, failing off the resolvent set.
    pub fn shifted_factor(&self, lambda: C<R>, operator: &'static str) -> Result<LuFactor<R>> {
        let shifted = dense::add_diag(self.matrix.data().mapv(|z| -z).view(), lambda);
        LuFactor::guarded(shifted.view(), tol::<R>().condition_guard).map_err(|e| match e {
            crate::kernel::KernelError::Singular { condition } => Error::NotInResolventSet { operator, margin: 1.0 / condition, threshold: 0.0 },
            other => Error::Kernel(other),
        })
    }

    /// `(lambda - M)^{-1}` by direct factorization.
    pub fn resolvent(&self, lambda: C<R>) -> Result<ComplexMatrix<R>> {
        let lu = self.shifted_factor(lambda, "realized operator")?;
        Ok(ComplexMatrix::raw(lu.inverse(), self.matrix.dom(), self.matrix.cod()))
    }

    /// Frobenius norm of the matrix.
    pub fn norm_fro(&self) -> R {
        self.matrix.norm_fro()
    }

}

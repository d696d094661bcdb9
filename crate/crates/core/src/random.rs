//! Seeded generators for settings, vectors, parameters and relations.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::framework::{DomainVector, Setting};
use crate::kernel::{ComplexMatrix, WeightedSpace};
use crate::relations::LinearRelation;
use crate::robin::BoundaryParams;
use crate::scalar::{cxf, re, Real, C};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex<R: Real>(rng: &mut impl Rng) -> C<R> {
    cxf::<R>(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn array<R: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<C<R>> {
    Array2::from_shape_fn((rows, cols), |_| complex::<R>(rng))
}

pub fn vector<R: Real>(rng: &mut impl Rng, n: usize) -> Array1<C<R>> {
    Array1::from_shape_fn(n, |_| complex::<R>(rng))
}

pub fn weights<R: Real>(rng: &mut impl Rng, n: usize) -> WeightedSpace<R> {
    WeightedSpace::new((0..n).map(|_| re::<R>(rng.gen_range(0.5..2.0))).collect()).expect("positive weights")
}

pub fn matrix<R: Real>(rng: &mut impl Rng, dom: &WeightedSpace<R>, cod: &WeightedSpace<R>) -> ComplexMatrix<R> {
    ComplexMatrix::new(array::<R>(rng, cod.dim(), dom.dim()), dom.clone(), cod.clone()).expect("shape")
}

/// Weighted-Hermitian matrix `(X + adj(X)) / 2`.
pub fn hermitian<R: Real>(rng: &mut impl Rng, space: &WeightedSpace<R>) -> ComplexMatrix<R> {
    let x = matrix(rng, space, space);
    let h = x.add(&x.adjoint()).expect("same spaces").scale(cxf::<R>(0.5, 0.0));
    // exact symmetry in flat coordinates
    let flat = crate::kernel::dense::hermitian_part(h.flat().view());
    ComplexMatrix::from_flat(flat.view(), space, space).expect("shape")
}

/// Shape and scale of a random setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SettingShape {
    pub n: usize,
    pub n_boundary: usize,
    /// Draw non-unit weights.
    pub weighted: bool,
    /// Scale of the identification operator `I`.
    pub i_scale: f64,
}

impl SettingShape {
    pub fn new(n: usize, n_boundary: usize) -> Self {
        Self { n, n_boundary, weighted: true, i_scale: 0.5 }
    }
}

/// Random setting: Hermitian `L` and `T`, full-rank `A`, `lambda0` real and
/// at distance at least 0.1 from the spectrum of `L`.
pub fn random_setting<R: Real>(seed: u64, shape: SettingShape) -> Result<Setting<R>> {
    let mut g = rng(seed);
    let (h, dh) = if shape.weighted {
        (weights::<R>(&mut g, shape.n), weights::<R>(&mut g, shape.n_boundary))
    } else {
        (WeightedSpace::unit(shape.n), WeightedSpace::unit(shape.n_boundary))
    };
    let l = hermitian(&mut g, &h).scale(cxf::<R>(2.0, 0.0));
    let a = matrix(&mut g, &h, &dh);
    let i = matrix(&mut g, &dh, &h).scale(cxf::<R>(shape.i_scale, 0.0));
    let t = hermitian(&mut g, &dh);
    let spec = crate::framework::FreeSpectrum::dense(&l, crate::kernel::tol::<R>().hermitian_input)?;
    let (lo, hi) = (spec.min().to_f64().unwrap(), spec.max().to_f64().unwrap());
    let mut lambda0 = lo - 1.0;
    for _ in 0..64 {
        let c = g.gen_range(lo - 1.0..hi + 1.0);
        let d = spec.eigenvalues().iter().map(|e| (e.to_f64().unwrap() - c).abs()).fold(f64::INFINITY, f64::min);
        if d >= 0.1 {
            lambda0 = c;
            break;
        }
    }
    Setting::with_spectrum(l, a, i, t, re::<R>(lambda0), spec, Default::default())
}

pub fn domain_vector<R: Real>(rng: &mut impl Rng, s: &Setting<R>) -> DomainVector<R> {
    s.vector(vector::<R>(rng, s.n()), vector::<R>(rng, s.n_boundary())).expect("matching dims")
}

/// Quadruple satisfying the symmetry conditions: a common phase times a real
/// `(a, b, c, d)` with `b c - a d = 1`.
pub fn symmetric_params<R: Real>(rng: &mut impl Rng) -> BoundaryParams<R> {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let a: f64 = rng.gen_range(-2.0..2.0);
    let b: f64 = rng.gen_range(-2.0..2.0);
    let (c, d) = if b.abs() > 0.2 {
        let d: f64 = rng.gen_range(-2.0..2.0);
        ((1.0 + a * d) / b, d)
    } else {
        let a = if a.abs() < 0.2 { 1.0 } else { a };
        let c: f64 = rng.gen_range(-2.0..2.0);
        return build_params(theta, a, b, c, (b * c - 1.0) / a);
    };
    build_params(theta, a, b, c, d)
}

fn build_params<R: Real>(theta: f64, a: f64, b: f64, c: f64, d: f64) -> BoundaryParams<R> {
    let (co, si) = (theta.cos(), theta.sin());
    let ph = |x: f64| cxf::<R>(x * co, x * si);
    BoundaryParams::new(ph(a), ph(b), ph(c), ph(d)).expect("alpha, beta not both zero")
}

/// Unconstrained complex quadruple.
pub fn generic_params<R: Real>(rng: &mut impl Rng) -> BoundaryParams<R> {
    let mut draw = || cxf::<R>(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    BoundaryParams::new(draw(), draw(), draw(), draw()).expect("alpha, beta not both zero")
}

/// Unitary `exp(i H)` on flat coordinates for a random Hermitian `H`.
pub fn unitary<R: Real>(rng: &mut impl Rng, n: usize) -> Array2<C<R>> {
    let unit = WeightedSpace::unit(n);
    let h = hermitian::<R>(rng, &unit).scale(cxf::<R>(3.0, 0.0));
    let eig = crate::kernel::hermitian_eig(&h, crate::kernel::tol::<R>().hermitian_input).expect("Hermitian by construction");
    let v = eig.vectors.data();
    let phases = eig.values.mapv(|t| C::<R>::new(num_traits::Float::cos(t), num_traits::Float::sin(t)));
    let vd = Array2::from_shape_fn((n, n), |(i, j)| v[(i, j)] * phases[j]);
    vd.dot(&crate::kernel::dense::conj_t(v.view()))
}

/// Self-adjoint relation `{((Id + U) x, i (Id - U) x)}` read in flat
/// coordinates, for a random unitary `U`.
pub fn selfadjoint_relation<R: Real>(rng: &mut impl Rng, space: &WeightedSpace<R>) -> LinearRelation<R> {
    let n = space.dim();
    let u = unitary::<R>(rng, n);
    let id = crate::kernel::dense::eye::<R>(n);
    let x = &id + &u;
    let y = (&id - &u).mapv(|z| z * C::<R>::new(R::zero(), R::one()));
    let inv: Vec<R> = space.sqrt_weights().iter().map(|w| R::one() / *w).collect();
    let ones = vec![R::one(); n];
    let x = crate::kernel::dense::scale_rows_cols(x.view(), &inv, &ones);
    let y = crate::kernel::dense::scale_rows_cols(y.view(), &inv, &ones);
    LinearRelation::from_basis(space, &crate::kernel::dense::vstack(x.view(), y.view())).expect("shape")
}

/// Symmetric relation of dimension `dim K - drop`, a subspace of a random
/// self-adjoint one.
pub fn symmetric_relation<R: Real>(rng: &mut impl Rng, space: &WeightedSpace<R>, drop: usize) -> LinearRelation<R> {
    let full = selfadjoint_relation::<R>(rng, space);
    let keep = full.dim().saturating_sub(drop);
    let q = full.graph().onb();
    let c = array::<R>(rng, full.dim(), keep);
    LinearRelation::from_basis(space, &q.dot(&c)).expect("shape")
}

/// Relation spanned by `dim` random columns.
pub fn relation<R: Real>(rng: &mut impl Rng, space: &WeightedSpace<R>, dim: usize) -> LinearRelation<R> {
    LinearRelation::from_basis(space, &array::<R>(rng, 2 * space.dim(), dim)).expect("shape")
}

//! One particle on a Dirichlet grid in `x` coupled to a truncated, dispersion
//! free boson hierarchy: `H = ⊕_{n <= N} H^{(n)}` with `H^{(n)}` functions of
//! `(x, y_1, .., y_n)` symmetric in the `y`, `L = -Delta_x + N`, and the
//! annihilation-at-the-particle trace
//! `(A f)(x, y_1, .., y_{n-1}) = sqrt(n) f(x, y_1, .., y_{n-1}, x)`.
//!
//! The boundary space is `∂H = ⊕_{m=1}^{N} ∂H^{(m)}` with `∂H^{(m)}` carrying the
//! coordinates and weights of `H^{(m-1)}`, and `I` the block identity
//! `∂H^{(m)} -> H^{(m-1)}`. Creation into `H^{(N+1)}` is cut, so `I*` drops
//! the top sector.

pub mod sectors;
pub mod structured;

use std::ops::Range;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{BuildOptions, DomainVector, FreeSpectrum, KroneckerBlock, Setting};
use crate::kernel::{dense, extreme_eigenvalues_flat, tol, ComplexMatrix, LuFactor, WeightedSpace};
use crate::relations::LinearRelation;
use crate::report::{Check, VerificationReport};
use crate::scalar::{creal, re, sqrt_principal, Real, C};

pub use sectors::SectorBasis;
use sectors::{multiset_count, with_point};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianBc {
    #[default]
    Dirichlet,
}

fn default_n_x() -> usize {
    16
}
fn default_halfwidth() -> f64 {
    4.0
}
fn default_n_max() -> usize {
    2
}
fn default_lambda0() -> f64 {
    -1.0
}
fn default_max_dim() -> usize {
    4000
}

/// Grid and truncation parameters. The grid is `x_i = -R + i h`,
/// `h = 2R / (n_x - 1)`, with zero ghost values outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaronConfig {
    #[serde(default = "default_n_x")]
    pub n_x: usize,
    #[serde(default = "default_halfwidth")]
    pub box_halfwidth: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default)]
    pub laplacian_bc: LaplacianBc,
    /// Cap on `dim H`.
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

impl Default for PolaronConfig {
    fn default() -> Self {
        Self {
            n_x: default_n_x(),
            box_halfwidth: default_halfwidth(),
            n_max: default_n_max(),
            lambda0: default_lambda0(),
            laplacian_bc: LaplacianBc::Dirichlet,
            max_dim: default_max_dim(),
        }
    }
}

impl PolaronConfig {
    pub fn new(n_x: usize, n_max: usize) -> Self {
        Self { n_x, n_max, ..Self::default() }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.box_halfwidth / (self.n_x as f64 - 1.0)
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_x).map(|i| -self.box_halfwidth + i as f64 * h).collect()
    }

    /// `dim H^{(n)} = n_x C(n_x + n - 1, n)` for `n = 0..=N`.
    pub fn sector_dims(&self) -> Vec<usize> {
        (0..=self.n_max).map(|n| self.n_x * multiset_count(self.n_x, n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x < 4 {
            return Err(Error::InvalidInput(format!("n_x = {} must be at least 4", self.n_x)));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        if !(self.box_halfwidth.is_finite() && self.box_halfwidth > 0.0) {
            return Err(Error::InvalidInput("box_halfwidth must be positive".into()));
        }
        if !(self.lambda0.is_finite() && self.lambda0 < 0.0) {
            return Err(Error::InvalidInput("lambda0 must be negative".into()));
        }
        let dim: usize = self.sector_dims().iter().sum();
        if dim > self.max_dim {
            return Err(Error::MemoryGuard { dim, cap: self.max_dim });
        }
        Ok(())
    }
}

/// Assembled hierarchy: the framework [`Setting`] together with its sector
/// bases and offsets.
#[derive(Clone, Debug)]
pub struct PolaronSetting<R: Real> {
    pub setting: Setting<R>,
    pub config: PolaronConfig,
    /// Bases of `H^{(0)}, .., H^{(N)}`.
    pub sectors: Vec<SectorBasis>,
    offsets: Vec<usize>,
}

impl<R: Real> PolaronSetting<R> {
    pub fn n_max(&self) -> usize {
        self.config.n_max
    }

    pub fn h(&self) -> R {
        re::<R>(self.config.spacing())
    }

    pub fn grid(&self) -> Vec<f64> {
        self.config.grid()
    }

    /// Coordinates of `H^{(n)}` in `H`.
    pub fn sector_range(&self, n: usize) -> Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    /// Coordinates of `∂H^{(m)}` in `∂H`, `m = 1..=N`.
    pub fn boundary_range(&self, m: usize) -> Range<usize> {
        assert!(m >= 1 && m <= self.n_max(), "boundary sector {m} out of range");
        self.sector_range(m - 1)
    }

    pub fn sector_dims(&self) -> Vec<usize> {
        self.sectors.iter().map(|b| b.dim()).collect()
    }

    /// Grid function of `x` lifted to a diagonal operator on `∂H`.
    pub fn boundary_multiplication(&self, values: &[C<R>]) -> Result<ComplexMatrix<R>> {
        if values.len() != self.config.n_x {
            return Err(Error::InvalidInput(format!("grid function has {} values, expected {}", values.len(), self.config.n_x)));
        }
        let nb = self.setting.n_boundary();
        let mut diag = vec![creal::<R>(R::zero()); nb];
        for m in 1..=self.n_max() {
            let b = &self.sectors[m - 1];
            let off = self.boundary_range(m).start;
            for i in 0..b.n_x {
                for k in 0..b.inner() {
                    diag[off + b.index(i, k)] = values[i];
                }
            }
        }
        let mut out = dense::zeros::<R>(nb, nb);
        for (k, v) in diag.into_iter().enumerate() {
            out[(k, k)] = v;
        }
        Ok(ComplexMatrix::raw(out, self.setting.dh(), self.setting.dh()))
    }

    fn check_boundary_sector(&self, n: usize, lambda: C<R>) -> Result<()> {
        if lambda.im == R::zero() && lambda.re >= R::zero() {
            return Err(Error::OnPositiveAxis);
        }
        if n >= self.n_max() {
            return Err(Error::InvalidInput(format!("boundary sector index {n} must be below n_max = {}", self.n_max())));
        }
        Ok(())
    }
}

/// Assemble `(L, A, I, T = A G_{lambda0}, lambda0)` on the multiset bases.
pub fn build_polaron<R: Real>(cfg: &PolaronConfig) -> Result<PolaronSetting<R>> {
    cfg.validate()?;
    let n_max = cfg.n_max;
    let h = re::<R>(cfg.spacing());
    let sectors: Vec<SectorBasis> = (0..=n_max).map(|n| SectorBasis::new(cfg.n_x, n)).collect();
    let mut offsets = vec![0];
    for b in &sectors {
        offsets.push(offsets.last().unwrap() + b.dim());
    }
    let n = offsets[n_max + 1];
    let nb = offsets[n_max];
    let weights: Vec<R> = sectors.iter().flat_map(|b| b.weights(cfg.spacing())).map(re::<R>).collect();
    let hs = WeightedSpace::new(weights.clone())?;
    let dhs = WeightedSpace::new(weights[..nb].to_vec())?;

    let lap = structured::dirichlet_laplacian::<R>(cfg.n_x, h);
    let mut l = dense::zeros::<R>(n, n);
    let mut blocks = Vec::with_capacity(n_max + 1);
    for (m, b) in sectors.iter().enumerate() {
        let shift = re::<R>(m as f64);
        let d = Array2::from_shape_fn(lap.dim(), |(i, j)| if i == j { lap[(i, j)] + shift } else { lap[(i, j)] });
        let off = offsets[m];
        for i in 0..cfg.n_x {
            for j in 0..cfg.n_x {
                if d[(i, j)] != R::zero() {
                    for k in 0..b.inner() {
                        l[(off + b.index(i, k), off + b.index(j, k))] = creal(d[(i, j)]);
                    }
                }
            }
        }
        blocks.push(KroneckerBlock::from_symmetric(off, &d, b.inner())?);
    }
    let spectrum = FreeSpectrum::blocks(blocks);
    let lambda0 = re::<R>(cfg.lambda0);
    if !(lambda0 < spectrum.min()) {
        return Err(Error::InvalidInput(format!(
            "lambda0 = {} is not below the bottom {} of the discrete spectrum of L",
            cfg.lambda0,
            spectrum.min()
        )));
    }

    let mut a = dense::zeros::<R>(nb, n);
    for m in 1..=n_max {
        let (bnd, top) = (&sectors[m - 1], &sectors[m]);
        let sq = creal(num_traits::Float::sqrt(re::<R>(m as f64)));
        for i in 0..cfg.n_x {
            for p in 0..bnd.inner() {
                let full = with_point(bnd.multiset(p), i);
                let q = top.position(&full).expect("multiset of the next sector");
                a[(offsets[m - 1] + bnd.index(i, p), offsets[m] + top.index(i, q))] = sq;
            }
        }
    }
    let a = ComplexMatrix::raw(a, &hs, &dhs);
    let mut ident = dense::zeros::<R>(n, nb);
    for k in 0..nb {
        ident[(k, k)] = creal(R::one());
    }
    let ident = ComplexMatrix::raw(ident, &dhs, &hs);
    let g0 = ComplexMatrix::raw(spectrum.resolve(creal(lambda0), a.adjoint().view()), &dhs, &hs);
    let t = a.matmul(&g0)?;
    let t = t.add(&t.adjoint())?.scale(creal(re::<R>(0.5)));
    let l = ComplexMatrix::raw(l, &hs, &hs);
    let setting = Setting::with_spectrum(l, a, ident, t, lambda0, spectrum, BuildOptions::default())?;
    Ok(PolaronSetting { setting, config: cfg.clone(), sectors, offsets })
}

/// `(n+1) / (2 |sqrt(n+1-lambda)|)`.
pub fn continuum_t_bound(n: usize, lambda: Complex64) -> f64 {
    let mu = Complex64::new(n as f64 + 1.0, 0.0) - lambda;
    (n as f64 + 1.0) / (2.0 * sqrt_principal(mu).norm())
}

/// `||g_mu||_{L^2} = 1 / (2 sqrt(|mu| Re sqrt(mu)))` for
/// `g_mu(x) = -exp(-sqrt(mu)|x|) / (2 sqrt(mu))`.
pub fn g_mu_l2_norm(mu: Complex64) -> f64 {
    1.0 / (2.0 * (mu.norm() * sqrt_principal(mu).re).sqrt())
}

/// `sqrt(n+1) ||g_{n+1-lambda}||`.
pub fn continuum_g_norm(n: usize, lambda: Complex64) -> f64 {
    let mu = Complex64::new(n as f64 + 1.0, 0.0) - lambda;
    (n as f64 + 1.0).sqrt() * g_mu_l2_norm(mu)
}

/// Block of `T_lambda` on `∂H^{(n+1)}` compared with the continuum bound.
#[derive(Clone, Debug)]
pub struct SectorDtn<R: Real> {
    pub n: usize,
    pub block: ComplexMatrix<R>,
    /// Largest eigenvalue of the Hermitian part.
    pub max_eigenvalue: f64,
    pub norm: f64,
    pub continuum_bound: f64,
    /// `norm / continuum_bound`.
    pub ratio: f64,
}

pub fn polaron_sector_dtn<R: Real>(ps: &PolaronSetting<R>, lambda: C<R>, n: usize) -> Result<SectorDtn<R>> {
    ps.check_boundary_sector(n, lambda)?;
    let t = ps.setting.dtn(lambda)?;
    let r = ps.boundary_range(n + 1);
    let block = t.block(r.clone(), r);
    let flat = dense::hermitian_part(block.flat().view());
    let ext = extreme_eigenvalues_flat(flat.view(), tol::<R>().check, 600)?;
    let norm = block.norm().to_f64().unwrap();
    let lam = Complex64::new(lambda.re.to_f64().unwrap(), lambda.im.to_f64().unwrap());
    let continuum_bound = continuum_t_bound(n, lam);
    Ok(SectorDtn { n, block, max_eigenvalue: ext.max.to_f64().unwrap(), norm, continuum_bound, ratio: norm / continuum_bound })
}

/// Weighted norm of the `∂H^{(n+1)} -> H^{(n+1)}` block of `G_lambda`.
pub fn polaron_g_norm<R: Real>(ps: &PolaronSetting<R>, lambda: C<R>, n: usize) -> Result<f64> {
    ps.check_boundary_sector(n, lambda)?;
    let g = ps.setting.dirichlet(lambda)?;
    Ok(g.block(ps.sector_range(n + 1), ps.boundary_range(n + 1)).norm().to_f64().unwrap())
}

/// `||G_lambda||`, the largest block norm since `G_lambda` is block diagonal.
pub fn polaron_g_norm_global<R: Real>(ps: &PolaronSetting<R>, lambda: C<R>) -> Result<f64> {
    let g = ps.setting.dirichlet(lambda)?;
    Ok((1..=ps.n_max()).map(|m| g.block(ps.sector_range(m), ps.boundary_range(m)).norm().to_f64().unwrap()).fold(0.0, f64::max))
}

fn rel_fro<R: Real>(x: &Array2<C<R>>, scale: R) -> f64 {
    (dense::fro(x.view()) / scale.max(R::min_positive_value())).to_f64().unwrap()
}

/// Shift structure of `G_lambda I*`: block norms, nilpotency, commutation
/// with the number operator and the finite Neumann series for `Gamma`.
pub fn polaron_invariance_report<R: Real>(ps: &PolaronSetting<R>, lambda: C<R>) -> VerificationReport {
    let mut rep = VerificationReport::new("polaron_invariance");
    let s = &ps.setting;
    let outcome = (|| -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        let g = s.dirichlet(lambda)?;
        let gd = g.data();
        let nmax = ps.n_max();
        // G maps ∂H^{(m)} into H^{(m)} only
        let mut outside = R::zero();
        for m in 1..=nmax {
            let cols = ps.boundary_range(m);
            for k in 0..=nmax {
                if k != m {
                    let r = ps.sector_range(k);
                    outside = outside.max(dense::max_abs(gd.slice(s![r, cols.clone()])));
                }
            }
        }
        checks.push(Check::at_most("shift_structure", "sector-shift", outside.to_f64().unwrap(), 0.0));
        let norms: Vec<f64> =
            (1..=nmax).map(|m| g.block(ps.sector_range(m), ps.boundary_range(m)).norm().to_f64().unwrap()).collect();
        for (k, v) in norms.iter().enumerate() {
            checks.push(Check::info(format!("block_norm_{k}"), "sector-block-decay", *v));
        }
        let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
        checks.push(
            Check::info("block_norms_decrease", "sector-block-decay", if decreasing { 1.0 } else { 0.0 })
                .with_detail(format!("{norms:?}")),
        );
        // K = I* G on ∂H; (G I*)^{N+1} = G K^N I*
        let k = s.i_adj().matmul(&g)?;
        let mut power = ComplexMatrix::identity(s.dh());
        for _ in 0..nmax {
            power = power.matmul(&k)?;
        }
        let nil = g.matmul(&power)?;
        checks.push(Check::at_most("nilpotent", "sector-shift", dense::max_abs(nil.view()).to_f64().unwrap(), 0.0));
        // N G = G (N_∂ + 1), where ∂H^{(m)} carries the number m - 1
        let mut number = Array1::from_elem(s.n(), creal(R::zero()));
        for m in 0..=nmax {
            for r in ps.sector_range(m) {
                number[r] = creal(re::<R>(m as f64));
            }
        }
        let mut bnumber = Array1::from_elem(s.n_boundary(), creal(R::zero()));
        for m in 1..=nmax {
            for c in ps.boundary_range(m) {
                bnumber[c] = creal(re::<R>(m as f64));
            }
        }
        let mut resid = Array2::from_elem(gd.dim(), creal(R::zero()));
        for ((r, c), v) in gd.indexed_iter() {
            resid[(r, c)] = number[r] * *v - *v * bnumber[c];
        }
        checks.push(Check::at_most("number_commutation", "number-invariance", rel_fro(&resid, dense::fro(gd.view())), 1e-12));
        // (Id - K)^{-1} = sum_{j < N} K^j
        let id = ComplexMatrix::identity(s.dh());
        let lu = LuFactor::new(id.sub(&k)?.view())?;
        let inv = lu.inverse();
        let mut sum = id.clone();
        let mut term = id.clone();
        for _ in 1..nmax {
            term = term.matmul(&k)?;
            sum = sum.add(&term)?;
        }
        let diff = &inv - sum.data();
        checks.push(Check::at_most("finite_neumann_sum", "gamma-neumann-series", rel_fro(&diff, dense::fro(inv.view())), tol::<R>().check.to_f64().unwrap()));
        Ok(checks)
    })();
    rep.record("polaron_invariance", "sector-shift", outcome);
    rep
}

/// Relation `{(alpha f, -beta f)}` for pointwise coefficients, with the
/// setting it lives in.
#[derive(Clone, Debug)]
pub struct PointwiseRobin<R: Real> {
    pub relation: LinearRelation<R>,
    /// Unchanged, or with `I` replaced by `I (conj(alpha) + conj(beta))^{-1}`
    /// after normalizing to `alpha + beta = 1`.
    pub setting: Setting<R>,
    pub rescaled: bool,
}

/// Pointwise Robin relation for grid functions `alpha`, `beta` of `x`.
///
/// Unless `alpha + beta = 1` on the grid, the coefficients are divided by
/// `alpha + beta` and the identification rescaled to match.
pub fn pointwise_robin_relation<R: Real>(ps: &PolaronSetting<R>, alpha: &[C<R>], beta: &[C<R>]) -> Result<PointwiseRobin<R>> {
    let n_x = ps.config.n_x;
    if alpha.len() != n_x || beta.len() != n_x {
        return Err(Error::InvalidInput(format!("coefficients need {n_x} grid values")));
    }
    let eps = tol::<R>().check;
    let one = creal::<R>(R::one());
    let sums: Vec<C<R>> = alpha.iter().zip(beta).map(|(a, b)| *a + *b).collect();
    let normalized = sums.iter().all(|z| (*z - one).norm() <= eps);
    let x = ps.grid();
    let scale = alpha.iter().chain(beta).fold(R::one(), |m, z| m.max(z.norm()));
    if let Some(i) = sums.iter().position(|z| z.norm() <= eps * scale) {
        return Err(Error::InvalidInput(format!("alpha + beta vanishes at x = {}", x[i])));
    }
    let (a, b, setting) = if normalized {
        (alpha.to_vec(), beta.to_vec(), ps.setting.clone())
    } else {
        let a: Vec<C<R>> = alpha.iter().zip(&sums).map(|(v, s)| *v / *s).collect();
        let b: Vec<C<R>> = beta.iter().zip(&sums).map(|(v, s)| *v / *s).collect();
        let inv: Vec<C<R>> = sums.iter().map(|s| one / s.conj()).collect();
        let ident = ps.setting.i().matmul(&ps.boundary_multiplication(&inv)?)?;
        (a, b, ps.setting.with_identification(ident)?)
    };
    let relation = LinearRelation::from_coefficients(&ps.boundary_multiplication(&a)?, &ps.boundary_multiplication(&b)?)?;
    Ok(PointwiseRobin { relation, setting, rescaled: !normalized })
}

/// Difference-quotient reading of `B f` on `∂H^{(n)}`.
#[derive(Clone, Debug)]
pub struct LocalBEstimate<R: Real> {
    pub n: usize,
    /// Stencil estimate on `∂H^{(n)}` coordinates.
    pub estimate: Array1<C<R>>,
    /// `B v` restricted to `∂H^{(n)}`.
    pub exact: Array1<C<R>>,
    /// `||estimate - exact|| / ||exact||` in the weighted norm (absolute
    /// when `B v` vanishes there).
    pub deviation: f64,
}

/// Read `B v` off the jump of the `x`-derivative of `f = f0 + G0 phi` at the
/// coincidence `x = y`:
/// `mult(M) / (sqrt(n) mult(M')) h (Delta_h f)(x_i, M)` with `M = M' + {i}`.
pub fn local_b_estimate<R: Real>(ps: &PolaronSetting<R>, v: &DomainVector<R>, n: usize) -> Result<LocalBEstimate<R>> {
    if n == 0 || n > ps.n_max() {
        return Err(Error::InvalidInput(format!("sector {n} carries no boundary values (need 1..={})", ps.n_max())));
    }
    let s = &ps.setting;
    let f = s.embed(v)?;
    let phi = s.apply_b(v)?;
    let (bnd, top) = (&ps.sectors[n - 1], &ps.sectors[n]);
    let (foff, boff) = (ps.sector_range(n).start, ps.boundary_range(n).start);
    let h = ps.h();
    let n_x = ps.config.n_x;
    let at = |i: isize, q: usize| -> C<R> {
        if i < 0 || i as usize >= n_x {
            creal(R::zero())
        } else {
            f[foff + top.index(i as usize, q)]
        }
    };
    let mut estimate = Array1::from_elem(bnd.dim(), creal(R::zero()));
    let sqn = num_traits::Float::sqrt(re::<R>(n as f64));
    for i in 0..n_x {
        for p in 0..bnd.inner() {
            let full = with_point(bnd.multiset(p), i);
            let q = top.position(&full).expect("multiset of the next sector");
            let ii = i as isize;
            let lap = (at(ii + 1, q) - at(ii, q) * creal(re::<R>(2.0)) + at(ii - 1, q)) / creal(h * h);
            let c = re::<R>(top.multiset_multiplicity(q)) / (sqn * re::<R>(bnd.multiset_multiplicity(p))) * h;
            estimate[bnd.index(i, p)] = lap * creal(c);
        }
    }
    let exact = phi.slice(s![boff..boff + bnd.dim()]).to_owned();
    let w: Vec<R> = s.dh().weights()[boff..boff + bnd.dim()].to_vec();
    let space = WeightedSpace::new(w)?;
    let diff = &estimate - &exact;
    let base = space.norm(exact.view());
    let dn = space.norm(diff.view());
    let deviation = if base > R::zero() { dn / base } else { dn };
    Ok(LocalBEstimate { n, estimate, exact, deviation: deviation.to_f64().unwrap() })
}

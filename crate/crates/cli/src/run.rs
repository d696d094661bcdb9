//! Suite dispatch for the command line.

use std::cmp::Ordering;

use ibclab::framework::{check_assumptions, SettingDocument};
use ibclab::kernel::{eigvals_general, hermitian_eigvals, ComplexMatrix};
use ibclab::models::point::{point_scalar_suite, point_symmetry_form};
use ibclab::models::polaron::{build_polaron, pointwise_robin_relation, PolaronSetting};
use ibclab::random::{self, random_setting, SettingShape};
use ibclab::relations::{assemble_h01, assemble_hr};
use ibclab::report::{Check, VerificationReport};
use ibclab::robin::{assemble_ibc, assemble_robin, ibc_resolvent, robin_resolvent, BoundaryParams, ParamsDoc};
use ibclab::suites::{self, PolaronBoundsOptions, SuiteTolerances};
use ibclab::{Relation64, Setting64};
use num_complex::Complex64;

use crate::config::{ConfigError, ModelConfig, OperatorName, RelationSpec, RunConfig, SuiteName, SweepSpec};

/// A built model.
pub enum Model {
    Setting(Setting64),
    Polaron(Box<PolaronSetting<f64>>),
    Point,
}

impl Model {
    pub fn setting(&self) -> Option<&Setting64> {
        match self {
            Model::Setting(s) => Some(s),
            Model::Polaron(p) => Some(&p.setting),
            Model::Point => None,
        }
    }
}

pub fn build_model(cfg: &RunConfig) -> Result<Model, ConfigError> {
    Ok(match &cfg.model {
        ModelConfig::RandomSetting { seed, n, n_boundary, weighted, i_scale } => {
            let seed = seed.ok_or_else(|| ConfigError::Invalid("random_setting requires a seed".into()))?;
            let shape = SettingShape { n: *n, n_boundary: *n_boundary, weighted: *weighted, i_scale: *i_scale };
            Model::Setting(random_setting::<f64>(seed, shape)?)
        }
        ModelConfig::PointInteraction => Model::Point,
        ModelConfig::Polaron(p) => Model::Polaron(Box::new(build_polaron::<f64>(p)?)),
        ModelConfig::FromFile { path } => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
            let doc = SettingDocument::from_json(&text)?;
            Model::Setting(doc.to_setting::<f64>()?)
        }
    })
}

fn document_relations(cfg: &RunConfig) -> Result<Vec<ibclab::framework::RelationDoc>, ConfigError> {
    match &cfg.model {
        ModelConfig::FromFile { path } => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
            Ok(SettingDocument::from_json(&text)?.relations)
        }
        _ => Ok(Vec::new()),
    }
}

fn tolerances(cfg: &RunConfig) -> SuiteTolerances {
    cfg.tol.map_or_else(SuiteTolerances::default, SuiteTolerances::with_check)
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn params(cfg: &RunConfig) -> Result<Option<BoundaryParams<f64>>, ConfigError> {
    cfg.params.as_ref().map(|d| BoundaryParams::from_doc(d).map_err(ConfigError::from)).transpose()
}

fn require_setting<'a>(model: &'a Model, suite: &str) -> Result<&'a Setting64, ConfigError> {
    model.setting().ok_or_else(|| ConfigError::Invalid(format!("suite {suite} needs a matrix setting, not the point-interaction model")))
}

/// Spectral points from the config, or one off-axis point beyond the
/// spectrum of `L`.
fn lambdas(cfg: &RunConfig, s: &Setting64) -> Vec<Complex64> {
    if cfg.lambdas.is_empty() {
        vec![Complex64::new(0.3, 1.5 * s.spectrum().norm().max(1.0))]
    } else {
        cfg.lambdas.iter().copied().map(c).collect()
    }
}

pub fn relation(cfg: &RunConfig, model: &Model) -> Result<Option<Relation64>, ConfigError> {
    let Some(spec) = &cfg.relation else { return Ok(None) };
    let s = require_setting(model, "with a relation")?;
    let dh = s.dh();
    let mut g = random::rng(cfg.seed());
    let k = dh.dim();
    let r = match spec {
        RelationSpec::Basis { basis, .. } => {
            let cols = basis.first().map_or(0, |r| r.len());
            Relation64::from_basis(dh, &ibclab::framework::matrix_from_doc::<f64>(basis, 2 * k, cols, "relation basis")?)?
        }
        RelationSpec::Coefficients { alpha, beta } => {
            let m = |d| -> Result<ComplexMatrix<f64>, ConfigError> {
                Ok(ComplexMatrix::on(ibclab::framework::matrix_from_doc::<f64>(d, k, k, "relation coefficient")?, dh).map_err(ibclab::Error::from)?)
            };
            Relation64::from_coefficients(&m(alpha)?, &m(beta)?)?
        }
        RelationSpec::Pointwise { alpha, beta } => {
            let Model::Polaron(ps) = model else {
                return Err(ConfigError::Invalid("pointwise relations need the polaron model".into()));
            };
            let (a, b): (Vec<_>, Vec<_>) = (alpha.iter().copied().map(c).collect(), beta.iter().copied().map(c).collect());
            let pr = pointwise_robin_relation(ps, &a, &b)?;
            if pr.rescaled {
                return Err(ConfigError::Invalid("pointwise coefficients must satisfy alpha + beta = 1 on the command line".into()));
            }
            pr.relation
        }
        RelationSpec::RandomSelfadjoint => random::selfadjoint_relation::<f64>(&mut g, dh),
        RelationSpec::RandomSymmetric { drop } => {
            if *drop >= k {
                return Err(ConfigError::Invalid(format!("drop = {drop} must be below dim ∂H = {k}")));
            }
            random::symmetric_relation::<f64>(&mut g, dh, *drop)
        }
        RelationSpec::Named { name } => {
            let docs = document_relations(cfg)?;
            let doc = docs.iter().find(|d| &d.name == name).ok_or_else(|| ConfigError::Invalid(format!("no relation named {name} in the setting document")))?;
            Relation64::from_doc(dh, doc)?
        }
    };
    Ok(Some(r))
}

fn direct_comparison(name: &str, anchor: &str, formula: ibclab::Result<ComplexMatrix<f64>>, direct: ibclab::Result<ComplexMatrix<f64>>, tol: f64) -> Check {
    match (formula, direct) {
        (Ok(f), Ok(d)) => match f.relative_distance(&d) {
            Ok(x) => Check::at_most(name, anchor, x, tol),
            Err(e) => Check::error(name, anchor, e),
        },
        (Err(e), Ok(_)) => Check::error(name, anchor, format!("formula failed: {e}")),
        (Ok(_), Err(e)) => Check::error(name, anchor, format!("direct inversion failed: {e}")),
        (Err(a), Err(b)) => Check::flag(name, anchor, true).with_detail(format!("both routes fail: {a}; {b}")),
    }
}

/// Run the configured suite. Configuration problems discovered while
/// building the model are returned as errors; numerical failures become
/// failed checks.
pub fn run_suite(cfg: &RunConfig) -> Result<(VerificationReport, Option<Table>), ConfigError> {
    let model = build_model(cfg)?;
    let tol = tolerances(cfg);
    let seed = cfg.seed();
    let p = params(cfg)?;
    let mut table = None;
    let mut rep = match cfg.suite {
        SuiteName::Assumptions => {
            let s = require_setting(&model, "assumptions")?;
            match check_assumptions(s, Some(tol.check)) {
                Ok(a) => a.into_report(),
                Err(e) => {
                    let mut r = VerificationReport::new("assumptions");
                    r.push(Check::error("assumptions", "standing-assumptions", e));
                    r
                }
            }
        }
        SuiteName::Green => suites::framework_suite(require_setting(&model, "green")?, seed, &tol),
        SuiteName::Robin => match model.setting() {
            None => {
                let mut r = suites::point_suite(seed, cfg.samples.unwrap_or(50), cfg.tol.unwrap_or(1e-12));
                if let Some(p) = &p {
                    for l in lambda_list(cfg, &[[-1.0, 0.0]]) {
                        let mut one = point_scalar_suite(p, l);
                        for ch in &mut one.checks {
                            ch.name = format!("params at {}: {}", fmt_c(l), ch.name);
                        }
                        r.merge(one);
                    }
                }
                r
            }
            Some(s) => {
                let mut r = suites::krein_suite(s, seed, cfg.samples.unwrap_or(20), &tol);
                if let Some(p) = &p {
                    for l in lambdas(cfg, s) {
                        let direct = assemble_robin(s, p.alpha, p.beta).and_then(|op| op.resolvent(l));
                        r.push(direct_comparison(&format!("robin_resolvent_at {}", fmt_c(l)), "krein-resolvent", robin_resolvent(s, p.alpha, p.beta, l), direct, tol.resolvent));
                    }
                }
                r
            }
        },
        SuiteName::Resolvents => {
            let s = require_setting(&model, "resolvents")?;
            let n = cfg.samples.unwrap_or(20);
            let mut r = suites::ibc_suite(s, seed, n, &tol);
            r.merge(suites::symmetry_gate_suite(s, seed.wrapping_add(1), n, &tol));
            r.suite = "resolvents".into();
            if let Some(p) = &p {
                for l in lambdas(cfg, s) {
                    let direct = assemble_ibc(s, p).and_then(|op| op.resolvent(l));
                    r.push(direct_comparison(&format!("ibc_resolvent_at {}", fmt_c(l)), "ibc-resolvent", ibc_resolvent(s, p, l), direct, tol.resolvent));
                }
            }
            r
        }
        SuiteName::Relations => {
            let mut r = suites::relations_suite::<f64>(seed, cfg.samples.unwrap_or(50), &tol);
            if let Some(rel) = relation(cfg, &model)? {
                let checks = (|| -> ibclab::Result<Vec<Check>> {
                    let adj = rel.adjoint()?;
                    Ok(vec![
                        Check::info("relation_dim", "relation-adjoint", rel.dim() as f64),
                        Check::at_most("relation_adjoint_pairing", "relation-adjoint", rel.adjoint_pairing_defect(&adj)?, tol.check),
                        Check::at_most("relation_adjoint_involution", "relation-adjoint", adj.adjoint()?.distance(&rel)?, tol.check),
                        Check::info("relation_symmetry_defect", "relation-symmetry", rel.symmetry_defect()?),
                        Check::info("relation_selfadjoint_defect", "relation-symmetry", rel.selfadjoint_defect()?),
                    ])
                })();
                r.record("relation", "relation-adjoint", checks);
            }
            r
        }
        SuiteName::Classify => {
            let s = require_setting(&model, "classify")?;
            match relation(cfg, &model)? {
                Some(rel) => suites::classify_suite(s, &rel, &tol),
                None => suites::classification_suite(s, seed, cfg.samples.unwrap_or(30), &tol),
            }
        }
        SuiteName::PolaronBounds => {
            let ModelConfig::Polaron(pc) = &cfg.model else {
                return Err(ConfigError::Invalid("suite polaron_bounds needs the polaron model".into()));
            };
            let mut opts = PolaronBoundsOptions { config: pc.clone(), ..Default::default() };
            opts.refined_n_x = cfg.refined_n_x.unwrap_or(2 * pc.n_x - 1);
            if let Some(l) = cfg.lambdas.first() {
                opts.lambda = l[0];
            }
            match suites::polaron_operators::<f64>(pc) {
                Ok(ops) => {
                    let mut r = suites::polaron_bounds_suite(&ops, &opts, &tol);
                    if let Some(RelationSpec::Pointwise { alpha, beta }) = &cfg.relation {
                        let (a, b): (Vec<_>, Vec<_>) = (alpha.iter().copied().map(c).collect(), beta.iter().copied().map(c).collect());
                        r.merge(suites::pointwise_robin_suite(&ops, &a, &b, &tol));
                    }
                    r
                }
                Err(e) => {
                    let mut r = VerificationReport::new("polaron_bounds");
                    r.push(Check::error("assemble", "polaron-model", e));
                    r
                }
            }
        }
        SuiteName::Sweep => {
            let (r, t) = sweep(cfg, &model, &tol)?;
            table = Some(t);
            r
        }
    };
    rep.config = serde_json::to_value(cfg).unwrap_or_default();
    Ok((rep, table))
}

fn lambda_list(cfg: &RunConfig, default: &[[f64; 2]]) -> Vec<Complex64> {
    let src = if cfg.lambdas.is_empty() { default } else { &cfg.lambdas[..] };
    src.iter().copied().map(c).collect()
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Rows of a CSV table with a header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write(&self, w: impl std::io::Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn quadruples(spec: &SweepSpec, seed: u64) -> Vec<ParamsDoc> {
    let mut q = spec.quadruples.clone();
    if let Some(g) = &spec.grid {
        q.extend(g.quadruples());
    }
    let mut g = random::rng(seed);
    q.extend((0..spec.random_symmetric).map(|_| random::symmetric_params::<f64>(&mut g).to_doc()));
    q.extend((0..spec.random_generic).map(|_| random::generic_params::<f64>(&mut g).to_doc()));
    q
}

fn flat(d: &ParamsDoc) -> [f64; 8] {
    [d.alpha[0], d.alpha[1], d.beta[0], d.beta[1], d.gamma[0], d.gamma[1], d.delta[0], d.delta[1]]
}

fn cmp_tuple(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

const PARAM_COLUMNS: [&str; 8] = ["alpha_re", "alpha_im", "beta_re", "beta_im", "gamma_re", "gamma_im", "delta_re", "delta_im"];

/// One row per quadruple (and spectral point), sorted by the parameter
/// tuple. On the point-interaction model each row carries the symmetry
/// verdict and the scalar identities; on a matrix setting it carries the
/// verdict, the Hermiticity deviation of `H_IBC` and the resolvent check.
pub fn sweep(cfg: &RunConfig, model: &Model, tol: &SuiteTolerances) -> Result<(VerificationReport, Table), ConfigError> {
    let spec = cfg.sweep.clone().ok_or_else(|| ConfigError::Invalid("suite sweep needs a sweep specification".into()))?;
    let mut quads = quadruples(&spec, cfg.seed());
    if quads.is_empty() {
        return Err(ConfigError::Invalid("the sweep specification is empty".into()));
    }
    quads.sort_by(|a, b| cmp_tuple(&flat(a), &flat(b)));
    let params: Vec<BoundaryParams<f64>> = quads.iter().map(BoundaryParams::from_doc).collect::<Result<_, _>>()?;
    let mut rep = VerificationReport::new("sweep");
    match model.setting() {
        None => {
            let mut lams = lambda_list(cfg, &[[-1.0, 0.0]]);
            lams.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            let mut header: Vec<&str> = PARAM_COLUMNS.to_vec();
            header.extend(["lambda_re", "lambda_im", "symmetric", "symmetry_form_norm", "robin_dtn_resolvent_form", "robin_dtn_unit_form"]);
            let mut table = Table::new(&header);
            let gate = cfg.tol.unwrap_or(1e-12);
            for (k, (d, p)) in quads.iter().zip(&params).enumerate() {
                let q = point_symmetry_form(p);
                let qn = q.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for &l in &lams {
                    let one = point_scalar_suite(p, l);
                    let symmetric = one.check("parameters_symmetric").is_some_and(|c| c.pass);
                    let general = one.check("robin_dtn_resolvent_form").map(|c| c.residual);
                    let unit = one.check("robin_dtn_unit_form").map(|c| c.residual);
                    let mut row: Vec<String> = flat(d).iter().map(|x| x.to_string()).collect();
                    row.extend([l.re.to_string(), l.im.to_string(), symmetric.to_string(), num(qn)]);
                    row.push(general.map_or(String::new(), num));
                    row.push(unit.map_or(String::new(), num));
                    table.rows.push(row);
                    let name = format!("quadruple {k} at {}", fmt_c(l));
                    match general {
                        Some(g) => rep.push(Check::at_most(name, "robin-dtn-resolvent-form", g, gate)),
                        None => rep.push(Check::error(name, "robin-dtn-resolvent-form", one.failures().next().and_then(|c| c.detail.clone()).unwrap_or_default())),
                    }
                }
            }
            Ok((rep, table))
        }
        Some(s) => {
            let lam = lambdas(cfg, s)[0];
            let mut header: Vec<&str> = PARAM_COLUMNS.to_vec();
            header.extend(["symmetric", "hermiticity_deviation", "resolvent_deviation"]);
            let mut table = Table::new(&header);
            for (k, (d, p)) in quads.iter().zip(&params).enumerate() {
                let symmetric = p.is_symmetric(tol.check);
                let op = assemble_ibc(s, p);
                let herm = op.as_ref().ok().and_then(|o| o.hermiticity_deviation().ok());
                let res = op.as_ref().ok().and_then(|o| ibc_resolvent(s, p, lam).ok().zip(o.resolvent(lam).ok())).and_then(|(f, d)| f.relative_distance(&d).ok());
                let mut row: Vec<String> = flat(d).iter().map(|x| x.to_string()).collect();
                row.push(symmetric.to_string());
                row.push(herm.map_or(String::new(), num));
                row.push(res.map_or(String::new(), num));
                table.rows.push(row);
                if symmetric {
                    let name = format!("quadruple {k}: symmetric params give hermitian");
                    match herm {
                        Some(h) => rep.push(Check::at_most(name, "symmetry-parameter-conditions", h, tol.check)),
                        None => rep.push(Check::error(name, "symmetry-parameter-conditions", "H_IBC does not assemble")),
                    }
                    if let Some(r) = res {
                        rep.push(Check::at_most(format!("quadruple {k}: ibc_resolvent_vs_direct"), "ibc-resolvent", r, tol.resolvent));
                    }
                }
            }
            if rep.checks.is_empty() {
                rep.push(Check::info("symmetric_quadruples", "symmetry-parameter-conditions", 0.0));
            }
            Ok((rep, table))
        }
    }
}

/// Spectrum of the configured operator: ascending real eigenvalues for a
/// Hermitian operator, otherwise complex eigenvalues sorted by real then
/// imaginary part.
pub fn spectrum(cfg: &RunConfig, operator: OperatorName) -> Result<Table, SpectrumError> {
    let model = build_model(cfg)?;
    let s = require_setting(&model, "spectrum")?;
    let p = params(cfg)?;
    let need = |what: &str| ConfigError::Invalid(format!("operator {what} needs `params` in the config"));
    let m: ComplexMatrix<f64> = match operator {
        OperatorName::L => s.l().clone(),
        OperatorName::H01 => assemble_h01(s)?.into_matrix(),
        OperatorName::Robin => {
            let p = p.ok_or_else(|| need("robin"))?;
            assemble_robin(s, p.alpha, p.beta)?.into_matrix()
        }
        OperatorName::Ibc => assemble_ibc(s, &p.ok_or_else(|| need("ibc"))?)?.into_matrix(),
        OperatorName::Hr => {
            let r = relation(cfg, &model)?.ok_or_else(|| ConfigError::Invalid("operator hr needs `relation` in the config".into()))?;
            assemble_hr(s, &r)?.into_matrix()
        }
    };
    let tol = tolerances(cfg).check;
    if m.hermiticity_deviation().map_err(ibclab::Error::from)? <= tol {
        let h = ComplexMatrix::from_flat(ibclab::kernel::dense::hermitian_part(m.flat().view()).view(), m.dom(), m.cod()).map_err(ibclab::Error::from)?;
        let ev = hermitian_eigvals(&h, tol).map_err(ibclab::Error::from)?;
        let mut t = Table::new(&["index", "eigenvalue"]);
        t.rows = ev.iter().enumerate().map(|(k, e)| vec![k.to_string(), num(*e)]).collect();
        Ok(t)
    } else {
        let mut ev = eigvals_general(&m).map_err(ibclab::Error::from)?;
        ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut t = Table::new(&["index", "re", "im"]);
        t.rows = ev.iter().enumerate().map(|(k, e)| vec![k.to_string(), num(e.re), num(e.im)]).collect();
        Ok(t)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("assembly failed: {0}")]
    Assembly(#[from] ibclab::Error),
}

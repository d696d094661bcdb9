//! Run configuration read from JSON.

use std::path::{Path, PathBuf};

use ibclab::framework::MatrixDoc;
use ibclab::models::polaron::PolaronConfig;
use ibclab::robin::ParamsDoc;
use serde::{Deserialize, Serialize};

/// Environment variable overriding the default identity tolerance.
pub const TOL_ENV: &str = "IBCLAB_TOL";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    RandomSetting {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        n: usize,
        n_boundary: usize,
        #[serde(default = "yes")]
        weighted: bool,
        #[serde(default = "half")]
        i_scale: f64,
    },
    /// Scalar point interaction in three dimensions.
    #[serde(alias = "moshinsky_yafaev")]
    PointInteraction,
    Polaron(PolaronConfig),
    /// A setting document on disk, relative paths resolved against the
    /// config file.
    FromFile { path: PathBuf },
}

fn yes() -> bool {
    true
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Assumptions,
    Green,
    Robin,
    Resolvents,
    Relations,
    Classify,
    PolaronBounds,
    Sweep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OperatorName {
    /// The free operator `L`.
    #[default]
    L,
    /// `H_IBC^{0,1}`.
    H01,
    /// `L_{alpha,beta}` from `params`.
    Robin,
    /// `H_IBC^{alpha,beta}` from `params`.
    Ibc,
    /// `H_R` from `relation`.
    Hr,
}

/// Boundary relation on `∂H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RelationSpec {
    /// Columns of a basis in `∂H ⊕ ∂H`, as rows of `[re, im]`.
    Basis {
        #[serde(default)]
        name: String,
        basis: MatrixDoc,
    },
    /// `{(alpha f, -beta f)}` for square `alpha`, `beta`.
    Coefficients { alpha: MatrixDoc, beta: MatrixDoc },
    /// Pointwise Robin coefficients on the polaron grid.
    Pointwise { alpha: Vec<[f64; 2]>, beta: Vec<[f64; 2]> },
    /// Seeded self-adjoint relation.
    RandomSelfadjoint,
    /// Seeded symmetric relation with `drop` dimensions removed from a
    /// self-adjoint one.
    RandomSymmetric {
        #[serde(default)]
        drop: usize,
    },
    /// Relation stored in the setting document under `name`.
    Named { name: String },
}

/// Quadruples visited by a sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Explicit quadruples.
    #[serde(default)]
    pub quadruples: Vec<ParamsDoc>,
    /// Cartesian grid; each axis defaults to the single value of the
    /// standard quadruple `(0, 1, 1, 0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub random_symmetric: usize,
    #[serde(default)]
    pub random_generic: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub alpha: Vec<[f64; 2]>,
    #[serde(default)]
    pub beta: Vec<[f64; 2]>,
    #[serde(default)]
    pub gamma: Vec<[f64; 2]>,
    #[serde(default)]
    pub delta: Vec<[f64; 2]>,
}

impl GridSpec {
    pub fn quadruples(&self) -> Vec<ParamsDoc> {
        let axis = |v: &Vec<[f64; 2]>, d: [f64; 2]| if v.is_empty() { vec![d] } else { v.clone() };
        let (a, b, c, d) = (axis(&self.alpha, [0.0, 0.0]), axis(&self.beta, [1.0, 0.0]), axis(&self.gamma, [1.0, 0.0]), axis(&self.delta, [0.0, 0.0]));
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len() * d.len());
        for alpha in &a {
            for beta in &b {
                for gamma in &c {
                    for delta in &d {
                        out.push(ParamsDoc { alpha: *alpha, beta: *beta, gamma: *gamma, delta: *delta });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub suite: SuiteName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationSpec>,
    /// Spectral parameters as `[re, im]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<[f64; 2]>,
    /// Identity tolerance; resolvent tolerances never drop below it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Number of random samples for sampling suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorName>,
    /// Grid size of the refined level in the polaron bound suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_n_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// Problem with the configuration itself (exit status 2).
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Model(#[from] ibclab::Error),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        if let ModelConfig::FromFile { path: p } = &mut cfg.model {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Apply command-line and environment overrides: `--seed`, then
    /// `--tol`, then the tolerance environment variable.
    pub fn resolve(&mut self, seed: Option<u64>, tol: Option<f64>, env_tol: Option<String>) -> Result<(), ConfigError> {
        if let Some(s) = seed {
            self.seed = Some(s);
        }
        if let ModelConfig::RandomSetting { seed: model_seed, .. } = &mut self.model {
            match (self.seed, *model_seed) {
                (Some(s), _) => *model_seed = Some(s),
                (None, Some(s)) => self.seed = Some(s),
                (None, None) => return Err(ConfigError::Invalid("random_setting requires a seed".into())),
            }
        }
        let env_tol = match env_tol {
            Some(v) => Some(v.trim().parse::<f64>().map_err(|_| ConfigError::Invalid(format!("{TOL_ENV}={v} is not a number")))?),
            None => None,
        };
        if let Some(t) = tol.or(env_tol) {
            self.tol = Some(t);
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::Invalid(format!("tolerance {t} must be positive and finite")));
            }
        }
        if let ModelConfig::RandomSetting { n, n_boundary, i_scale, .. } = &self.model {
            if *n == 0 || *n_boundary == 0 || n_boundary > n {
                return Err(ConfigError::Invalid(format!("random_setting needs 0 < n_boundary <= n, got n = {n}, n_boundary = {n_boundary}")));
            }
            if !i_scale.is_finite() {
                return Err(ConfigError::Invalid("i_scale must be finite".into()));
            }
        }
        if let ModelConfig::Polaron(p) = &self.model {
            p.validate()?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> RunConfig {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn model_kinds_and_aliases() {
        let c = parse(r#"{"model": {"kind": "moshinsky_yafaev"}, "suite": "robin"}"#);
        assert_eq!(c.model, ModelConfig::PointInteraction);
        let c = parse(r#"{"model": {"kind": "polaron", "n_x": 8, "n_max": 1}, "suite": "polaron_bounds"}"#);
        let ModelConfig::Polaron(p) = c.model else { panic!() };
        assert_eq!((p.n_x, p.n_max, p.box_halfwidth), (8, 1, 4.0));
        assert!(serde_json::from_str::<RunConfig>(r#"{"model": {"kind": "point_interaction"}, "suite": "robin", "typo": 1}"#).is_err());
    }

    #[test]
    fn seed_is_required_for_random_settings() {
        let mut c = parse(r#"{"model": {"kind": "random_setting", "n": 8, "n_boundary": 3}, "suite": "green"}"#);
        assert!(matches!(c.resolve(None, None, None), Err(ConfigError::Invalid(_))));
        c.resolve(Some(7), None, None).unwrap();
        assert_eq!(c.seed, Some(7));
        assert!(matches!(c.model, ModelConfig::RandomSetting { seed: Some(7), .. }));
    }

    #[test]
    fn tolerance_precedence() {
        let base = r#"{"model": {"kind": "point_interaction"}, "suite": "robin", "tol": 1e-9}"#;
        let mut c = parse(base);
        c.resolve(None, None, None).unwrap();
        assert_eq!(c.tol, Some(1e-9));
        let mut c = parse(base);
        c.resolve(None, None, Some("1e-6".into())).unwrap();
        assert_eq!(c.tol, Some(1e-6));
        let mut c = parse(base);
        c.resolve(None, Some(1e-7), Some("1e-6".into())).unwrap();
        assert_eq!(c.tol, Some(1e-7));
        assert!(parse(base).resolve(None, None, Some("abc".into())).is_err());
        assert!(parse(base).resolve(None, Some(-1.0), None).is_err());
    }

    #[test]
    fn grid_expands_in_lexicographic_order() {
        let g = GridSpec { alpha: vec![[0.0, 0.0], [1.0, 0.0]], beta: vec![[1.0, 0.0], [2.0, 0.0]], ..Default::default() };
        let q = g.quadruples();
        assert_eq!(q.len(), 4);
        assert_eq!(q[1].beta, [2.0, 0.0]);
        assert_eq!(q[2].alpha, [1.0, 0.0]);
        assert_eq!(q[3].gamma, [1.0, 0.0]);
    }
}

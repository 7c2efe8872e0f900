//! Run configuration: JSON on disk, overridden field by field from flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use selfstab::alpha_model::{AlphaModel, AlphaSpec};
use selfstab::sim::{truncation_level_with, PlanFormula, TruncationPlan, Variant};
use selfstab::solver::WeightSpec;

use crate::CliError;

pub const OUT_DIR_ENV: &str = "SELFSTAB_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// Index as an expression in `t`, `z` and `g`.
    pub expr: String,
    pub a: f64,
    pub b: f64,
    /// Auxiliary signal as an expression in `t`.
    #[serde(default = "zero_signal")]
    pub g: String,
}

fn zero_signal() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeSpec {
    pub z0: Vec<f64>,
    pub r_values: Vec<f64>,
    #[serde(default = "one")]
    pub u: f64,
    pub n_paths: usize,
    pub reference_count: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderSpec {
    #[serde(default)]
    pub t: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_count: usize,
    /// Exponent used for the constant is `1/alpha(Z(t)) - slack`.
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_slack() -> f64 {
    0.1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_variant")]
    pub variant: Variant,
    pub alpha: Option<AlphaSpec>,
    #[serde(default = "unit_interval")]
    pub interval: [f64; 2],
    #[serde(default)]
    pub a0: f64,
    pub epsilon: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub formula: Option<PlanFormula>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid_len")]
    pub grid_len: usize,
    #[serde(default = "one_path")]
    pub paths: usize,
    pub weight: Option<WeightSpec>,
    pub n_terms: Option<usize>,
    pub field: Option<FieldSpec>,
    pub localize: Option<LocalizeSpec>,
    pub holder: Option<HolderSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_variant() -> Variant {
    Variant::Selfstab
}

fn unit_interval() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_grid_len() -> usize {
    1000
}

fn one_path() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// SHA-256 of the effective configuration's canonical JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn interval(&self) -> Result<(f64, f64), CliError> {
        let [t0, t1] = self.interval;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(CliError::Config(format!("interval must satisfy t0 < t1, got [{t0}, {t1}]")));
        }
        Ok((t0, t1))
    }

    pub fn alpha_model(&self) -> Result<AlphaModel, CliError> {
        let spec = self.alpha.as_ref().ok_or_else(|| CliError::Config("an alpha model is required".into()))?;
        Ok(AlphaModel::from_spec(spec)?)
    }

    /// Constant index for the stable and subordinator variants.
    pub fn constant_alpha(&self) -> Result<f64, CliError> {
        match &self.alpha {
            Some(AlphaSpec::Constant { value }) => Ok(*value),
            _ => Err(CliError::Config(format!("variant {:?} needs a constant alpha model", self.variant))),
        }
    }

    /// Either `epsilon` (with `K`, default 1) or an explicit `(K, N)`.
    pub fn plan(&self, alpha: &AlphaModel) -> Result<TruncationPlan, CliError> {
        let (t0, t1) = self.interval()?;
        match (self.epsilon, self.k, self.n) {
            (Some(_), _, Some(_)) => Err(CliError::Config("give either epsilon or an explicit N, not both".into())),
            (Some(eps), k, None) => {
                let formula = self.formula.unwrap_or_default();
                Ok(truncation_level_with(formula, eps, t1 - t0, alpha, k.unwrap_or(1.0))?)
            }
            (None, Some(k), Some(n)) => Ok(TruncationPlan::explicit(k, n)?),
            (None, _, _) => Err(CliError::Config("need epsilon or both K and N".into())),
        }
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(dir) = flag {
            return dir.to_path_buf();
        }
        if let Some(dir) = &self.output.dir {
            return dir.clone();
        }
        std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| "path".into())
    }
}

/// `--alpha` accepts either a JSON model or `kind:params`:
/// `constant:0.7`, `cosine:c0,c1`, `rational:c0,c1,c2`, `expr:SOURCE;a;b;m`.
pub fn parse_alpha(text: &str) -> Result<AlphaSpec, CliError> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| CliError::Config(format!("alpha model: {e}")));
    }
    let (kind, rest) =
        text.split_once(':').ok_or_else(|| CliError::Config(format!("alpha model '{text}' needs 'kind:params'")))?;
    let numbers = |s: &str, count: usize| -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("alpha model '{text}': {e}")))?;
        if v.len() != count {
            return Err(CliError::Config(format!("alpha model '{text}' needs {count} parameters")));
        }
        Ok(v)
    };
    match kind {
        "constant" => Ok(AlphaSpec::Constant { value: numbers(rest, 1)?[0] }),
        "cosine" => {
            let v = numbers(rest, 2)?;
            Ok(AlphaSpec::Cosine { c0: v[0], c1: v[1] })
        }
        "rational" => {
            let v = numbers(rest, 3)?;
            Ok(AlphaSpec::Rational { c0: v[0], c1: v[1], c2: v[2] })
        }
        "expr" => {
            let parts: Vec<&str> = rest.split(';').collect();
            if parts.len() != 4 {
                return Err(CliError::Config(format!("expression model '{text}' needs 'expr:SOURCE;a;b;m'")));
            }
            let num =
                |s: &str| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("alpha model '{text}': {e}")));
            Ok(AlphaSpec::Expr {
                expr: parts[0].to_string(),
                a: num(parts[1])?,
                b: num(parts[2])?,
                m: Some(num(parts[3])?),
            })
        }
        other => Err(CliError::Config(format!("unknown alpha model kind '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_models() {
        assert_eq!(parse_alpha("constant:0.7").unwrap(), AlphaSpec::Constant { value: 0.7 });
        assert_eq!(parse_alpha("cosine:0.57, 0.4").unwrap(), AlphaSpec::Cosine { c0: 0.57, c1: 0.4 });
        assert!(matches!(parse_alpha("expr:0.45+0.05*cos(z);0.4;0.5;1").unwrap(), AlphaSpec::Expr { m: Some(_), .. }));
        assert!(parse_alpha("cosine:0.5").is_err());
        assert!(parse_alpha("banana:1").is_err());
        assert_eq!(
            parse_alpha(r#"{"kind":"rational","c0":0.15,"c1":0.8,"c2":5}"#).unwrap(),
            AlphaSpec::Rational { c0: 0.15, c1: 0.8, c2: 5.0 }
        );
    }

    #[test]
    fn plan_resolution() {
        let alpha = AlphaModel::constant(0.5).unwrap();
        let mut cfg = RunConfig { epsilon: Some(0.1), ..RunConfig::default() };
        assert_eq!(cfg.plan(&alpha).unwrap().n, 200.0);
        cfg.n = Some(10.0);
        assert!(cfg.plan(&alpha).is_err());
        cfg.epsilon = None;
        assert!(cfg.plan(&alpha).is_err());
        cfg.k = Some(1.0);
        assert_eq!(cfg.plan(&alpha).unwrap().n, 10.0);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 3}"#).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"K": 1, "N": 50, "seed": 3}"#).unwrap();
        assert_eq!((cfg.k, cfg.n, cfg.seed), (Some(1.0), Some(50.0), 3));
        assert_eq!(cfg.hash(), cfg.clone().hash());
    }
}

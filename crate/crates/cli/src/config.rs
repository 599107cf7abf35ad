//! Pipeline configuration (TOML). Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ardl_core::ardl::{ArdlOrder, BoundsCase, Significance};
use ardl_core::diagnostics::{CusumLevel, HetKind};
use ardl_core::unitroot::{AdfSpec, Criterion, Deterministic, IntegrationSpec, LagPolicy};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;

/// Reference configuration bundled with the binary.
pub const REFERENCE_CONFIG: &str = include_str!("../data/reference.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Significance level for unit-root verdicts, diagnostics and the ECM reading.
    #[serde(default = "default_significance")]
    pub significance: f64,
    /// Seed for simulation-backed steps.
    #[serde(default)]
    pub seed: u64,
    /// Request long-run coefficients and the ECM.
    #[serde(default = "yes")]
    pub long_run: bool,
    pub data: DataConfig,
    pub variables: VariablesConfig,
    #[serde(default)]
    pub unit_root: UnitRootConfig,
    #[serde(default)]
    pub ardl: ArdlConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_significance() -> f64 {
    0.05
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// CSV file, relative to the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetch: Option<FetchConfig>,
    #[serde(default = "yes")]
    pub normalize_digits: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FetchConfig {
    /// ISO 3166 alpha-3 code.
    pub country: String,
    pub start: i32,
    pub end: i32,
    /// Column name to World Bank indicator code.
    pub indicators: BTreeMap<String, String>,
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from("wb-cache")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariablesConfig {
    /// Column names as they appear in the data, before any log prefix.
    pub dependent: String,
    pub regressors: Vec<String>,
    /// Columns to log-transform; a logged column `X` is renamed `LX`.
    #[serde(default)]
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitRootConfig {
    /// Deterministic terms for level tests: "none", "c" or "ct".
    #[serde(default = "default_det")]
    pub deterministic: String,
    /// Deterministic terms for first-difference tests.
    #[serde(default = "default_det")]
    pub difference_deterministic: String,
    /// Per-variable override of the level deterministic terms, keyed by
    /// the (possibly logged) model name.
    #[serde(default)]
    pub level_by_variable: BTreeMap<String, String>,
    #[serde(default = "default_adf_criterion")]
    pub criterion: String,
    /// Fixed maximum lag; the Schwert rule when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
}

fn default_det() -> String {
    "c".into()
}

fn default_adf_criterion() -> String {
    "sic".into()
}

impl Default for UnitRootConfig {
    fn default() -> Self {
        Self {
            deterministic: default_det(),
            difference_deterministic: default_det(),
            level_by_variable: BTreeMap::new(),
            criterion: default_adf_criterion(),
            max_lag: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedOrder {
    pub p: usize,
    pub q: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArdlConfig {
    #[serde(default = "two")]
    pub p_max: usize,
    #[serde(default = "two")]
    pub q_max: usize,
    #[serde(default = "default_ardl_criterion")]
    pub criterion: String,
    /// Skips the grid search when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<FixedOrder>,
}

fn two() -> usize {
    2
}

fn default_ardl_criterion() -> String {
    "aic".into()
}

impl Default for ArdlConfig {
    fn default() -> Self {
        Self {
            p_max: 2,
            q_max: 2,
            criterion: default_ardl_criterion(),
            order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_case")]
    pub case: String,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    /// Estimate long-run output even when the verdict is inconclusive.
    #[serde(default)]
    pub allow_inconclusive: bool,
}

fn default_case() -> String {
    "I".into()
}

fn default_levels() -> Vec<f64> {
    vec![0.10, 0.05, 0.01]
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            case: default_case(),
            levels: default_levels(),
            allow_inconclusive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "two")]
    pub serial_lags: usize,
    #[serde(default = "two")]
    pub reset_powers: usize,
    #[serde(default = "default_het")]
    pub heteroskedasticity: String,
    #[serde(default = "default_significance")]
    pub cusum_level: f64,
}

fn default_het() -> String {
    "bpg".into()
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            serial_lags: 2,
            reset_powers: 2,
            heteroskedasticity: default_het(),
            cusum_level: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Any of "text" and "json".
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    /// Write the CUSUM CSV and SVG next to the reports.
    #[serde(default = "yes")]
    pub cusum_plot: bool,
}

fn default_formats() -> Vec<String> {
    vec!["text".into(), "json".into()]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            formats: default_formats(),
            cusum_plot: true,
        }
    }
}

/// Typed view of the string-valued settings, checked once up front.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub level_specs: BTreeMap<String, IntegrationSpec>,
    pub ardl_criterion: Criterion,
    pub fixed_order: Option<ArdlOrder>,
    pub case: BoundsCase,
    pub levels: Vec<Significance>,
    pub het: HetKind,
    pub cusum_level: CusumLevel,
}

fn config_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(e.to_string())
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn reference() -> Self {
        Self::from_toml(REFERENCE_CONFIG).expect("bundled config is valid")
    }

    /// Model name of a data column after the optional log transform.
    pub fn model_name(&self, column: &str) -> String {
        if self.variables.log.iter().any(|c| c == column) {
            format!("L{column}")
        } else {
            column.to_string()
        }
    }

    /// Checks every setting and converts it to its typed form.
    pub fn resolve(&self) -> Result<Resolved, PipelineError> {
        let v = &self.variables;
        if v.regressors.is_empty() {
            return Err(config_err("at least one regressor is required"));
        }
        let mut seen = vec![v.dependent.as_str()];
        for r in &v.regressors {
            if seen.contains(&r.as_str()) {
                return Err(config_err(format!("variable `{r}` is listed twice")));
            }
            seen.push(r);
        }
        if let Some(c) = v.log.iter().find(|c| !seen.contains(&c.as_str())) {
            return Err(config_err(format!("log list names unknown variable `{c}`")));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(config_err("significance must lie in (0, 1)"));
        }
        match (&self.data.path, &self.data.fetch) {
            (Some(_), Some(_)) => return Err(config_err("data: set either `path` or `fetch`, not both")),
            (None, None) => return Err(config_err("data: one of `path` or `fetch` is required")),
            _ => {}
        }

        let dependent = self.model_name(&v.dependent);
        let regressors: Vec<String> = v.regressors.iter().map(|r| self.model_name(r)).collect();

        let u = &self.unit_root;
        let criterion = Criterion::parse(&u.criterion).map_err(config_err)?;
        let policy = LagPolicy::Auto {
            max_lag: u.max_lag,
            criterion,
        };
        let spec = |code: &str| -> Result<AdfSpec, PipelineError> {
            Ok(AdfSpec {
                deterministic: Deterministic::parse(code).map_err(config_err)?,
                lag_policy: policy,
            })
        };
        let difference = spec(&u.difference_deterministic)?;
        let mut level_specs = BTreeMap::new();
        for name in std::iter::once(&dependent).chain(&regressors) {
            let code = u.level_by_variable.get(name).unwrap_or(&u.deterministic);
            level_specs.insert(
                name.clone(),
                IntegrationSpec {
                    level: spec(code)?,
                    difference,
                },
            );
        }
        if let Some(k) = u.level_by_variable.keys().find(|k| !level_specs.contains_key(*k)) {
            return Err(config_err(format!(
                "unit_root.level_by_variable names unknown variable `{k}`"
            )));
        }

        let a = &self.ardl;
        let fixed_order = match &a.order {
            Some(o) => {
                if o.q.len() != regressors.len() {
                    return Err(config_err(format!(
                        "ardl.order.q has {} entries for {} regressors",
                        o.q.len(),
                        regressors.len()
                    )));
                }
                Some(ArdlOrder::new(o.p, o.q.clone()).map_err(config_err)?)
            }
            None => {
                if a.p_max == 0 {
                    return Err(config_err("ardl.p_max must be at least 1"));
                }
                None
            }
        };
        let levels = self
            .bounds
            .levels
            .iter()
            .map(|&l| Significance::from_alpha(l).map_err(config_err))
            .collect::<Result<Vec<_>, _>>()?;
        if levels.is_empty() {
            return Err(config_err("bounds.levels must not be empty"));
        }
        let d = &self.diagnostics;
        if d.serial_lags == 0 {
            return Err(config_err("diagnostics.serial_lags must be at least 1"));
        }
        if d.reset_powers < 2 {
            return Err(config_err("diagnostics.reset_powers must be at least 2"));
        }
        if let Some(f) = self.output.formats.iter().find(|f| *f != "text" && *f != "json") {
            return Err(config_err(format!("unknown output format `{f}`")));
        }
        Ok(Resolved {
            dependent,
            regressors,
            level_specs,
            ardl_criterion: Criterion::parse(&a.criterion).map_err(config_err)?,
            fixed_order,
            case: BoundsCase::parse(&self.bounds.case).map_err(config_err)?,
            levels,
            het: HetKind::parse(&d.heteroskedasticity).map_err(config_err)?,
            cusum_level: CusumLevel::from_alpha(d.cusum_level).map_err(config_err)?,
        })
    }
}

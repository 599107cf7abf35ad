//! Stage-by-stage execution: ingest, transform, unit-root pretests, ARDL
//! selection and fit, bounds test, long-run and error-correction estimates,
//! diagnostics and CUSUM.

use std::path::Path;

use ardl_core::ardl::{
    bounds_test_at, fit_ardl, fit_ecm, long_run, order_table, best_of, ArdlModel, BoundsResult,
    BoundsVerdict, Candidate, EcmResult, LongRunCoeffs,
};
use ardl_core::diagnostics::{cusum, het_test, ramsey_reset, serial_lm, CusumResult, TestResult};
use ardl_core::ingest::{read_csv, IngestOptions};
use ardl_core::series::{log_transform, Dataset};
use ardl_core::unitroot::{classify_integration, IntegrationOrder, Order};

use crate::config::{PipelineConfig, Resolved};
use crate::error::{PipelineError, Stage};
use crate::synthetic;
use crate::worldbank::{sha256_hex, FetchRequest, Fetcher, HttpGet};

/// Raw dataset plus where it came from.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset<f64>,
    pub source: String,
    /// SHA-256 of the CSV bytes, or of the canonical CSV of fetched data.
    pub sha256: String,
}

impl LoadedData {
    pub fn from_csv_text(text: &str, source: &str, normalize_digits: bool) -> Result<Self, PipelineError> {
        let opts = IngestOptions {
            normalize_digits,
            ..IngestOptions::default()
        };
        let dataset = read_csv(text.as_bytes(), &opts).map_err(PipelineError::at(Stage::Ingest))?;
        Ok(Self {
            dataset,
            source: source.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    /// The bundled synthetic dataset.
    pub fn reference() -> Self {
        Self::from_csv_text(synthetic::REFERENCE_CSV, "bundled:synthetic_1379_1401.csv", true)
            .expect("bundled data parses")
    }
}

/// Reads the configured source. `base_dir` resolves relative paths.
pub fn load_data(
    cfg: &PipelineConfig,
    base_dir: &Path,
    client: &dyn HttpGet,
) -> Result<LoadedData, PipelineError> {
    if let Some(path) = &cfg.data.path {
        let full = base_dir.join(path);
        let text = std::fs::read_to_string(&full).map_err(PipelineError::io(Stage::Ingest, &full))?;
        return LoadedData::from_csv_text(&text, &path.display().to_string(), cfg.data.normalize_digits);
    }
    let fetch = cfg.data.fetch.as_ref().expect("config validated: path or fetch");
    let cache = base_dir.join(&fetch.cache_dir);
    let fetcher = Fetcher::new(client, Some(cache));
    let mut series = Vec::new();
    for (column, indicator) in &fetch.indicators {
        let req = FetchRequest::new(&fetch.country, indicator, fetch.start, fetch.end)?;
        series.push(fetcher.fetch(&req, column)?);
    }
    let dataset = Dataset::new(series).map_err(PipelineError::at(Stage::Ingest))?;
    let canonical = synthetic::to_csv(&dataset);
    Ok(LoadedData {
        dataset,
        source: format!("worldbank:{}:{}-{}", fetch.country, fetch.start, fetch.end),
        sha256: sha256_hex(canonical.as_bytes()),
    })
}

/// Keeps the model variables and applies the log transforms.
pub fn transform(cfg: &PipelineConfig, raw: &Dataset<f64>) -> Result<Dataset<f64>, PipelineError> {
    let v = &cfg.variables;
    let mut out = Vec::new();
    for column in std::iter::once(&v.dependent).chain(&v.regressors) {
        let s = raw.get(column).map_err(|_| {
            PipelineError::Config(format!(
                "variable `{column}` is not a column of the data (columns: {})",
                raw.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        let s = if v.log.contains(column) {
            log_transform(s)
                .map_err(PipelineError::at(Stage::Transform))?
                .renamed(cfg.model_name(column))
        } else {
            s.clone()
        };
        out.push(s);
    }
    Dataset::new(out).map_err(PipelineError::at(Stage::Transform))
}

/// A configuration checked and bound to its transformed data.
#[derive(Debug, Clone)]
pub struct Session {
    pub config: PipelineConfig,
    pub resolved: Resolved,
    pub data: LoadedData,
    pub model_data: Dataset<f64>,
}

/// How the ARDL order was obtained.
#[derive(Debug, Clone)]
pub enum Selection {
    Fixed,
    Grid(Vec<Candidate>),
}

impl Session {
    pub fn new(config: PipelineConfig, data: LoadedData) -> Result<Self, PipelineError> {
        let resolved = config.resolve()?;
        let model_data = transform(&config, &data.dataset)?;
        Ok(Self {
            config,
            resolved,
            data,
            model_data,
        })
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        std::iter::once(&self.resolved.dependent).chain(&self.resolved.regressors)
    }

    /// Level then first-difference ADF per variable.
    pub fn unit_roots(&self) -> Result<Vec<IntegrationOrder>, PipelineError> {
        self.variables()
            .map(|name| {
                let s = self.model_data.get(name).map_err(PipelineError::at(Stage::UnitRoot))?;
                let spec = &self.resolved.level_specs[name];
                classify_integration(s, spec, self.config.significance)
                    .map_err(PipelineError::at(Stage::UnitRoot))
            })
            .collect()
    }

    /// Aborts on the first variable of order two or higher.
    pub fn check_admissible(orders: &[IntegrationOrder]) -> Result<(), PipelineError> {
        match orders.iter().find(|o| o.order == Order::I2OrHigher) {
            Some(o) => Err(PipelineError::I2 {
                variable: o.level_result.variable.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn fit_model(&self) -> Result<(ArdlModel, Selection), PipelineError> {
        let r = &self.resolved;
        let (order, selection) = match &r.fixed_order {
            Some(order) => (order.clone(), Selection::Fixed),
            None => {
                let a = &self.config.ardl;
                let table = order_table(
                    &self.model_data,
                    &r.dependent,
                    &r.regressors,
                    a.p_max,
                    a.q_max,
                    r.ardl_criterion,
                )
                .map_err(PipelineError::at(Stage::ArdlSelection))?;
                let best = best_of(&table).cloned().ok_or_else(|| PipelineError::Stage {
                    stage: Stage::ArdlSelection,
                    source: ardl_core::Error::Sample(format!(
                        "no estimable order with p_max={}, q_max={}",
                        a.p_max, a.q_max
                    )),
                })?;
                (best, Selection::Grid(table))
            }
        };
        let model = fit_ardl(&self.model_data, &r.dependent, &r.regressors, &order)
            .map_err(PipelineError::at(Stage::ArdlFit))?;
        Ok((model, selection))
    }

    pub fn bounds(&self, model: &ArdlModel) -> Result<BoundsResult, PipelineError> {
        let r = &self.resolved;
        bounds_test_at(&self.model_data, &r.dependent, &r.regressors, &model.order, r.case, &r.levels)
            .map_err(PipelineError::at(Stage::Bounds))
    }

    /// Long-run and error-correction estimates, if the bounds verdict allows them.
    pub fn long_run(
        &self,
        model: &ArdlModel,
        bounds: &BoundsResult,
        notes: &mut Vec<String>,
    ) -> Result<Option<(LongRunCoeffs, EcmResult)>, PipelineError> {
        if !self.config.long_run {
            notes.push("long-run output not requested".into());
            return Ok(None);
        }
        match bounds.verdict {
            BoundsVerdict::NotCointegrated => {
                return Err(PipelineError::NoCointegration { fstat: bounds.fstat })
            }
            BoundsVerdict::Inconclusive if !self.config.bounds.allow_inconclusive => {
                notes.push(
                    "bounds test inconclusive: long-run and error-correction estimates withheld \
                     (set bounds.allow_inconclusive = true to estimate them anyway)"
                        .into(),
                );
                return Ok(None);
            }
            BoundsVerdict::Inconclusive => notes.push(
                "bounds test inconclusive: long-run estimates produced because allow_inconclusive is set".into(),
            ),
            BoundsVerdict::Cointegrated(_) => {}
        }
        let lr = long_run(model).map_err(PipelineError::at(Stage::LongRun))?;
        let ecm = fit_ecm(model).map_err(PipelineError::at(Stage::Ecm))?;
        Ok(Some((lr, ecm)))
    }

    pub fn diagnostics(&self, model: &ArdlModel) -> Result<Vec<TestResult>, PipelineError> {
        let d = &self.config.diagnostics;
        let level = self.config.significance;
        let at = PipelineError::at(Stage::Diagnostics);
        Ok(vec![
            serial_lm(&model.fit, d.serial_lags, level).map_err(at)?,
            ramsey_reset(&model.fit, d.reset_powers, level).map_err(at)?,
            het_test(&model.fit, self.resolved.het, level).map_err(at)?,
        ])
    }

    pub fn cusum(&self, model: &ArdlModel) -> Result<CusumResult, PipelineError> {
        cusum(&model.fit.design, self.resolved.cusum_level).map_err(PipelineError::at(Stage::Cusum))
    }
}

/// Every stage's output, before rendering.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub unit_roots: Vec<IntegrationOrder>,
    pub model: ArdlModel,
    pub selection: Selection,
    pub bounds: BoundsResult,
    pub long_run: Option<(LongRunCoeffs, EcmResult)>,
    pub diagnostics: Vec<TestResult>,
    pub cusum: CusumResult,
    pub notes: Vec<String>,
}

pub fn analyze(session: &Session) -> Result<Analysis, PipelineError> {
    let unit_roots = session.unit_roots()?;
    Session::check_admissible(&unit_roots)?;
    let mut notes: Vec<String> = unit_roots.iter().filter_map(|o| o.warning.clone()).collect();
    let (model, selection) = session.fit_model()?;
    if !model.is_stable() {
        notes.push("autoregressive part of the fitted ARDL has a root on or inside the unit circle".into());
    }
    let bounds = session.bounds(&model)?;
    let long_run = session.long_run(&model, &bounds, &mut notes)?;
    if let Some((_, ecm)) = &long_run {
        notes.extend(ecm.warnings.iter().map(|w| format!("error-correction warning: {w:?}")));
    }
    let diagnostics = session.diagnostics(&model)?;
    let cusum = session.cusum(&model)?;
    Ok(Analysis {
        unit_roots,
        model,
        selection,
        bounds,
        long_run,
        diagnostics,
        cusum,
        notes,
    })
}

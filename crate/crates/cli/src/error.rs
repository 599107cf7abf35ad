use std::fmt;

use thiserror::Error;

use crate::worldbank::FetchError;

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Transform,
    UnitRoot,
    ArdlSelection,
    ArdlFit,
    Bounds,
    LongRun,
    Ecm,
    Diagnostics,
    Cusum,
    Output,
    Simulation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Transform => "transform",
            Stage::UnitRoot => "unit-root",
            Stage::ArdlSelection => "ARDL order selection",
            Stage::ArdlFit => "ARDL fit",
            Stage::Bounds => "bounds test",
            Stage::LongRun => "long-run",
            Stage::Ecm => "error-correction",
            Stage::Diagnostics => "diagnostics",
            Stage::Cusum => "CUSUM",
            Stage::Output => "output",
            Stage::Simulation => "simulation",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: ardl_core::Error,
    },

    #[error("unit-root stage: `{variable}` is integrated of order two or higher; bounds testing admits only I(0) and I(1) variables")]
    I2 { variable: String },

    #[error("bounds test stage: F = {fstat:.6} is below every lower bound (no cointegration), so long-run coefficients are not defined; set long_run = false to stop after the bounds test")]
    NoCointegration { fstat: f64 },

    #[error("ingest stage: {0}")]
    Fetch(#[from] FetchError),

    #[error("{stage} stage: {path}: {message}")]
    Io {
        stage: Stage,
        path: String,
        message: String,
    },
}

impl PipelineError {
    pub fn at(stage: Stage) -> impl Fn(ardl_core::Error) -> Self + Copy {
        move |source| PipelineError::Stage { stage, source }
    }

    pub fn io(stage: Stage, path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |e| PipelineError::Io {
            stage,
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

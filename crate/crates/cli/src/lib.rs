//! Command-line ARDL bounds-testing workflow built on `ardl-core`.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod synthetic;
pub mod worldbank;

use std::path::Path;

pub use config::PipelineConfig;
pub use error::{PipelineError, Stage};
pub use report::{render_text, Report};

use pipeline::{analyze, load_data, LoadedData, Session};
use worldbank::HttpGet;

/// Loads the configured data and runs every stage.
pub fn run_pipeline(
    config: &PipelineConfig,
    base_dir: &Path,
    client: &dyn HttpGet,
) -> Result<Report, PipelineError> {
    let data = load_data(config, base_dir, client)?;
    run_on(config.clone(), data)
}

/// Runs every stage on already-loaded data.
pub fn run_on(config: PipelineConfig, data: LoadedData) -> Result<Report, PipelineError> {
    let session = Session::new(config, data)?;
    let analysis = analyze(&session)?;
    Ok(Report::build(&session, &analysis))
}

/// The bundled configuration on the bundled synthetic data.
pub fn run_reference() -> Result<Report, PipelineError> {
    run_on(PipelineConfig::reference(), LoadedData::reference())
}

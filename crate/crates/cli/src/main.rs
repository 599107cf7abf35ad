use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ardl_core::ardl::BoundsCase;
use ardl_core::mc::{
    bounds_statistics, df_statistics, empirical_quantiles, write_statistics_csv, McConfig, McQuantiles, Polar,
};
use ardl_core::unitroot::Deterministic;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ardl_kit::pipeline::{analyze, load_data, LoadedData, Selection, Session};
use ardl_kit::plot::emit_cusum_plot;
use ardl_kit::report::{self, ArdlSection, BoundsSection, CusumSection, DiagnosticRow, EcmSection, LongRunSection};
use ardl_kit::synthetic;
use ardl_kit::worldbank::UreqClient;
use ardl_kit::{render_text, PipelineConfig, PipelineError, Report, Stage};

#[derive(Parser)]
#[command(name = "ardl-kit", version, about = "ARDL bounds testing for cointegration")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; the bundled example configuration when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV data file, overriding the configured source.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Output directory (`run`, `cusum`) or file (`fetch`, `simulate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Significance level in percent, e.g. `5`.
    #[arg(long, global = true)]
    level: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Every stage, writing the report (and CUSUM files with `--out`).
    Run,
    /// Unit-root pretests in levels and first differences.
    Adf,
    /// ARDL order selection and the selected fit.
    Ardl,
    /// Bounds F-test for a long-run relationship.
    Bounds,
    /// Long-run coefficients and the error-correction model.
    Ecm,
    /// Serial correlation, functional form and heteroskedasticity tests.
    Diagnose,
    /// CUSUM stability test; writes cusum.csv and cusum.svg with `--out`.
    Cusum,
    /// Downloads the configured World Bank series as CSV.
    Fetch,
    /// Monte Carlo utilities.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Prints the bundled configuration.
    ShowConfig,
}

#[derive(Subcommand)]
enum Simulate {
    /// Null distribution of the Dickey-Fuller t-ratio.
    Df {
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 500)]
        sample: usize,
        /// Deterministic terms: none, c or ct.
        #[arg(long, default_value = "c")]
        terms: String,
        /// Also write every statistic to this CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Null distribution of the bounds F-statistic.
    Bounds {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "I")]
        case: String,
        #[arg(long, value_enum, default_value_t = PolarArg::I1)]
        polar: PolarArg,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 500)]
        sample: usize,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Regenerates the bundled synthetic dataset.
    ReferenceData,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarArg {
    I0,
    I1,
}

const DEFAULT_MC_SEED: u64 = 20240501;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), PipelineError> {
    let c = &cli.common;
    match &cli.command {
        Command::Run => run(c),
        Command::Adf => {
            let s = session(c)?;
            let rows = report::unit_root_rows(&s.unit_roots()?);
            emit(c, &rows, |out| report::write_unit_roots(out, &rows, s.config.significance))
        }
        Command::Ardl => {
            let s = session(c)?;
            let (model, selection) = s.fit_model()?;
            let section = ArdlSection::new(&model, &selection, &s.config.ardl.criterion);
            let candidates: Vec<CandidateOut> = match &selection {
                Selection::Fixed => Vec::new(),
                Selection::Grid(t) => t
                    .iter()
                    .map(|cand| CandidateOut {
                        order: cand.order.to_string(),
                        criterion: cand.criterion,
                    })
                    .collect(),
            };
            let body = ArdlOut {
                model: section,
                candidates,
            };
            emit(c, &body, |out| {
                report::write_ardl(out, &body.model);
                if !body.candidates.is_empty() {
                    out.push_str("\nCandidates (criterion value, lower is better):\n");
                    for cand in &body.candidates {
                        let v = cand.criterion.map_or("fit failed".to_string(), |v| format!("{v:.6}"));
                        out.push_str(&format!("{:<20} {v}\n", cand.order));
                    }
                }
            })
        }
        Command::Bounds => {
            let s = session(c)?;
            let (model, _) = s.fit_model()?;
            let b = BoundsSection::from(&s.bounds(&model)?);
            emit(c, &b, |out| report::write_bounds(out, &b, &model.order.to_string()))
        }
        Command::Ecm => {
            let s = session(c)?;
            let (model, _) = s.fit_model()?;
            let bounds = s.bounds(&model)?;
            let mut notes = Vec::new();
            let est = s.long_run(&model, &bounds, &mut notes)?;
            let body = EcmOut {
                long_run: est.as_ref().map(|(lr, _)| lr.into()),
                ecm: est.as_ref().map(|(_, e)| EcmSection::new(e, s.config.significance)),
                notes,
            };
            emit(c, &body, |out| {
                let order = model.order.to_string();
                report::write_long_run(out, body.long_run.as_ref(), &order);
                report::write_ecm(out, body.ecm.as_ref());
                for n in &body.notes {
                    out.push_str(&format!("note: {n}\n"));
                }
            })
        }
        Command::Diagnose => {
            let s = session(c)?;
            let (model, _) = s.fit_model()?;
            let rows: Vec<DiagnosticRow> = s.diagnostics(&model)?.iter().map(DiagnosticRow::from).collect();
            emit(c, &rows, |out| report::write_diagnostics(out, &rows))
        }
        Command::Cusum => {
            let s = session(c)?;
            let (model, _) = s.fit_model()?;
            let section = CusumSection::from(&s.cusum(&model)?);
            if let Some(dir) = &c.out {
                emit_cusum_plot(&section, dir)?;
            }
            emit(c, &section, |out| report::write_cusum(out, &section))
        }
        Command::Fetch => {
            let (cfg, base) = config(c)?;
            if cfg.data.fetch.is_none() {
                return Err(PipelineError::Config("fetch needs a [data.fetch] section".into()));
            }
            let loaded = load_data(&cfg, &base, &UreqClient::default())?;
            write_or_print(c.out.as_deref(), &synthetic::to_csv(&loaded.dataset))
        }
        Command::Simulate(sim) => simulate(c, sim),
        Command::ShowConfig => {
            print!("{}", ardl_kit::config::REFERENCE_CONFIG);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CandidateOut {
    order: String,
    criterion: Option<f64>,
}

#[derive(Serialize)]
struct ArdlOut {
    model: ArdlSection,
    candidates: Vec<CandidateOut>,
}

#[derive(Serialize)]
struct EcmOut {
    long_run: Option<LongRunSection>,
    ecm: Option<EcmSection>,
    notes: Vec<String>,
}

/// The configuration with command-line overrides, and the directory its
/// relative paths resolve against.
fn config(c: &Common) -> Result<(PipelineConfig, PathBuf), PipelineError> {
    let (mut cfg, base) = match &c.config {
        Some(path) => (
            PipelineConfig::load(path)?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (PipelineConfig::reference(), PathBuf::from(".")),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(pct) = c.level {
        cfg.significance = pct / 100.0;
    }
    if let Some(data) = &c.data {
        cfg.data.path = Some(data.clone());
        cfg.data.fetch = None;
    }
    cfg.resolve()?;
    Ok((cfg, base))
}

fn load(c: &Common, cfg: &PipelineConfig, base: &Path) -> Result<LoadedData, PipelineError> {
    if c.config.is_none() && c.data.is_none() {
        return Ok(LoadedData::reference());
    }
    // --data is relative to the working directory, not the config file
    let base = if c.data.is_some() { Path::new("") } else { base };
    load_data(cfg, base, &UreqClient::default())
}

fn session(c: &Common) -> Result<Session, PipelineError> {
    let (cfg, base) = config(c)?;
    let data = load(c, &cfg, &base)?;
    Session::new(cfg, data)
}

fn run(c: &Common) -> Result<(), PipelineError> {
    let s = session(c)?;
    let analysis = analyze(&s)?;
    let report = Report::build(&s, &analysis);
    let Some(dir) = &c.out else {
        print!("{}", render(c.format, &report));
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(PipelineError::io(Stage::Output, dir))?;
    for format in &s.config.output.formats {
        let (name, body) = match format.as_str() {
            "json" => ("report.json", report.to_json()),
            "text" => ("report.txt", render_text(&report)),
            other => return Err(PipelineError::Config(format!("unknown output format `{other}`"))),
        };
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(PipelineError::io(Stage::Output, &path))?;
    }
    if s.config.output.cusum_plot {
        emit_cusum_plot(&report.cusum, dir)?;
    }
    eprintln!("wrote report to {}", dir.display());
    Ok(())
}

fn render(format: Format, r: &Report) -> String {
    match format {
        Format::Json => r.to_json(),
        Format::Text => render_text(r),
    }
}

fn emit<T: Serialize>(c: &Common, value: &T, text: impl FnOnce(&mut String)) -> Result<(), PipelineError> {
    match c.format {
        Format::Json => {
            let s = serde_json::to_string_pretty(value).expect("output serializes");
            println!("{s}");
        }
        Format::Text => {
            let mut out = String::new();
            text(&mut out);
            print!("{}", out.trim_start_matches('\n'));
        }
    }
    Ok(())
}

fn write_or_print(path: Option<&Path>, body: &str) -> Result<(), PipelineError> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(PipelineError::io(Stage::Output, p)),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn simulate(c: &Common, sim: &Simulate) -> Result<(), PipelineError> {
    let seed = c.seed.unwrap_or(DEFAULT_MC_SEED);
    let mc = PipelineError::at(Stage::Simulation);
    let (title, q) = match sim {
        Simulate::ReferenceData => {
            let csv = synthetic::reference_csv(c.seed.unwrap_or(synthetic::REFERENCE_SEED));
            return write_or_print(c.out.as_deref(), &csv);
        }
        Simulate::Df {
            reps,
            sample,
            terms,
            stats,
        } => {
            let det = Deterministic::parse(terms).map_err(|e| PipelineError::Config(e.to_string()))?;
            let cfg = McConfig::new(*reps, *sample, seed);
            let values = df_statistics(&cfg, det).map_err(mc)?;
            if let Some(p) = stats {
                write_statistics_csv(p, &values).map_err(mc)?;
            }
            (
                format!("Dickey-Fuller t-ratio, terms {}, T = {sample}, {reps} replications, seed {seed}", det.code()),
                empirical_quantiles(&values, &cfg.probs).map_err(mc)?,
            )
        }
        Simulate::Bounds {
            k,
            case,
            polar,
            reps,
            sample,
            stats,
        } => {
            let case = BoundsCase::parse(case).map_err(|e| PipelineError::Config(e.to_string()))?;
            let polar = match polar {
                PolarArg::I0 => Polar::I0,
                PolarArg::I1 => Polar::I1,
            };
            let cfg = McConfig::new(*reps, *sample, seed);
            let values = bounds_statistics(&cfg, *k, case, polar).map_err(mc)?;
            if let Some(p) = stats {
                write_statistics_csv(p, &values).map_err(mc)?;
            }
            (
                format!(
                    "Bounds F, case {}, k = {k}, {:?} regressors, T = {sample}, {reps} replications, seed {seed}",
                    case.label(),
                    polar
                ),
                empirical_quantiles(&values, &cfg.probs).map_err(mc)?,
            )
        }
    };
    emit(c, &q, |out| quantile_table(out, &title, &q))
}

fn quantile_table(out: &mut String, title: &str, q: &McQuantiles) {
    out.push_str(title);
    out.push('\n');
    out.push_str(&format!("{:>8} {:>12} {:>10}\n", "prob", "quantile", "mc s.e."));
    for i in 0..q.probs.len() {
        out.push_str(&format!("{:>8} {:>12.6} {:>10.6}\n", q.probs[i], q.values[i], q.mc_se[i]));
    }
}

//! Report model and its text and JSON renderings. Rendering only formats
//! stored fields; nothing numeric is recomputed here.

use std::fmt::Write as _;

use ardl_core::ardl::{
    ArdlModel, BoundsCase, BoundsResult, BoundsVerdict, EcmResult, EcmVerdict, LevelDecision,
    LongRunCoeffs, Significance,
};
use ardl_core::ardl::bounds::{TABLE_SHA256, TABLE_VERSION};
use ardl_core::diagnostics::{CusumResult, TestResult, Verdict};
use ardl_core::mc::RNG_SCHEME;
use ardl_core::unitroot::{AdfResult, Deterministic, IntegrationOrder, Order, Stationarity};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::pipeline::{Analysis, Selection, Session};

/// Bumped on any incompatible change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;
pub const SOFTWARE: &str = "ardl-kit";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub sample: Sample,
    pub unit_root: Vec<UnitRootRow>,
    pub ardl: ArdlSection,
    pub bounds: BoundsSection,
    pub diagnostics: Vec<DiagnosticRow>,
    pub long_run: Option<LongRunSection>,
    pub ecm: Option<EcmSection>,
    pub cusum: CusumSection,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub software: String,
    pub version: String,
    pub data_source: String,
    pub data_sha256: String,
    pub bounds_table: String,
    pub bounds_table_sha256: String,
    pub rng_scheme: String,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub first_period: i32,
    pub last_period: i32,
    pub observations: usize,
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfRow {
    pub series: String,
    pub deterministic: Deterministic,
    pub lag: usize,
    pub nobs: usize,
    pub statistic: f64,
    pub pvalue: f64,
    pub crit_1: f64,
    pub crit_5: f64,
    pub crit_10: f64,
    pub verdict: Stationarity,
}

impl AdfRow {
    fn new(r: &AdfResult, series: String) -> Self {
        Self {
            series,
            deterministic: r.spec.deterministic,
            lag: r.chosen_lag,
            nobs: r.nobs,
            statistic: r.stat,
            pvalue: r.pvalue,
            crit_1: r.crit.one,
            crit_5: r.crit.five,
            crit_10: r.crit.ten,
            verdict: r.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub variable: String,
    pub order: Order,
    pub level: AdfRow,
    pub difference: Option<AdfRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefRow {
    pub name: String,
    pub coef: f64,
    pub stderr: f64,
    pub tstat: f64,
    pub pvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdlSection {
    pub order: String,
    pub p: usize,
    pub q: Vec<usize>,
    /// "fixed" or the selection criterion.
    pub selected_by: String,
    pub candidates: usize,
    pub first_period: i32,
    pub last_period: i32,
    pub nobs: usize,
    pub coefficients: Vec<CoefRow>,
    pub r2: f64,
    pub r2_adj: f64,
    pub aic: f64,
    pub sic: f64,
    pub durbin_watson: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRowOut {
    pub level: Significance,
    pub lower: f64,
    pub upper: f64,
    pub decision: LevelDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSection {
    pub fstat: f64,
    pub k: usize,
    pub case: BoundsCase,
    pub df_num: usize,
    pub df_den: usize,
    pub nobs: usize,
    pub restricted: Vec<String>,
    pub rows: Vec<BoundsRowOut>,
    pub verdict: BoundsVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub name: String,
    pub fstat: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub pvalue: f64,
    pub level: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunSection {
    /// Regressors, then the intercept `C`.
    pub coefficients: Vec<CoefRow>,
    pub df: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmSection {
    /// Differenced terms, then `ECM(-1)`.
    pub coefficients: Vec<CoefRow>,
    pub lambda: f64,
    pub verdict: EcmVerdict,
    pub narrative: String,
    pub df: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumRow {
    pub period: i32,
    pub path: f64,
    pub lower: f64,
    pub upper: f64,
    pub outside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumSection {
    pub level: f64,
    pub coefficient: f64,
    pub stable: bool,
    pub rows: Vec<CusumRow>,
}

fn coef_rows(names: &[String], coef: &[f64], se: &[f64], t: &[f64], p: &[f64]) -> Vec<CoefRow> {
    (0..names.len())
        .map(|i| CoefRow {
            name: names[i].clone(),
            coef: coef[i],
            stderr: se[i],
            tstat: t[i],
            pvalue: p[i],
        })
        .collect()
}

pub fn unit_root_rows(orders: &[IntegrationOrder]) -> Vec<UnitRootRow> {
    orders
        .iter()
        .map(|o| {
            let name = o.level_result.variable.clone();
            UnitRootRow {
                variable: name.clone(),
                order: o.order,
                level: AdfRow::new(&o.level_result, name.clone()),
                difference: o.diff_result.as_ref().map(|d| AdfRow::new(d, format!("D({name})"))),
            }
        })
        .collect()
}

impl ArdlSection {
    pub fn new(m: &ArdlModel, selection: &Selection, criterion: &str) -> Self {
        let f = &m.fit;
        let (selected_by, candidates) = match selection {
            Selection::Fixed => ("fixed".to_string(), 1),
            Selection::Grid(t) => (criterion.to_ascii_lowercase(), t.len()),
        };
        ArdlSection {
            order: m.order.to_string(),
            p: m.order.p,
            q: m.order.q.clone(),
            selected_by,
            candidates,
            first_period: m.sample.0,
            last_period: m.sample.1,
            nobs: f.n,
            coefficients: coef_rows(&f.names, &f.coef, &f.stderr, &f.tstat, &f.pvalue),
            r2: f.r2,
            r2_adj: f.r2_adj,
            aic: f.aic,
            sic: f.sic,
            durbin_watson: f.durbin_watson,
            stable: m.is_stable(),
        }
    }
}

impl From<&BoundsResult> for BoundsSection {
    fn from(b: &BoundsResult) -> Self {
        BoundsSection {
            fstat: b.fstat,
            k: b.k,
            case: b.case,
            df_num: b.df.0,
            df_den: b.df.1,
            nobs: b.nobs,
            restricted: b.restricted.clone(),
            rows: b
                .bounds
                .iter()
                .map(|r| BoundsRowOut {
                    level: r.level,
                    lower: r.lower,
                    upper: r.upper,
                    decision: r.decision,
                })
                .collect(),
            verdict: b.verdict,
        }
    }
}

impl From<&TestResult> for DiagnosticRow {
    fn from(t: &TestResult) -> Self {
        DiagnosticRow {
            name: t.name.clone(),
            fstat: t.fstat,
            df_num: t.df.0,
            df_den: t.df.1,
            pvalue: t.pvalue,
            level: t.level,
            verdict: t.verdict,
        }
    }
}

impl From<&LongRunCoeffs> for LongRunSection {
    fn from(lr: &LongRunCoeffs) -> Self {
        let mut rows = coef_rows(&lr.names, &lr.theta, &lr.stderr, &lr.tstat, &lr.pvalue);
        rows.push(CoefRow {
            name: "C".into(),
            coef: lr.intercept_lr,
            stderr: lr.intercept_stderr,
            tstat: lr.intercept_tstat,
            pvalue: lr.intercept_pvalue,
        });
        LongRunSection {
            coefficients: rows,
            df: lr.df,
        }
    }
}

impl EcmSection {
    pub fn new(e: &EcmResult, level: f64) -> Self {
        EcmSection {
            coefficients: e
                .coefficients()
                .into_iter()
                .map(|c| CoefRow {
                    name: c.name,
                    coef: c.coef,
                    stderr: c.stderr,
                    tstat: c.tstat,
                    pvalue: c.pvalue,
                })
                .collect(),
            lambda: e.lambda,
            verdict: e.verdict(level),
            narrative: e.narrative(level),
            df: e.df,
        }
    }
}

impl From<&CusumResult> for CusumSection {
    fn from(c: &CusumResult) -> Self {
        let outside = c.crossings();
        CusumSection {
            level: c.level.alpha(),
            coefficient: c.level.coefficient(),
            stable: c.stable,
            rows: (0..c.path.len())
                .map(|i| CusumRow {
                    period: c.periods[i],
                    path: c.path[i],
                    lower: c.lower_bound[i],
                    upper: c.upper_bound[i],
                    outside: outside[i],
                })
                .collect(),
        }
    }
}

impl Report {
    pub fn build(session: &Session, a: &Analysis) -> Self {
        let cfg = &session.config;
        let ds = &session.model_data;
        let (long_run, ecm) = match &a.long_run {
            Some((lr, e)) => (Some(lr.into()), Some(EcmSection::new(e, cfg.significance))),
            None => (None, None),
        };
        Report {
            schema_version: SCHEMA_VERSION,
            provenance: Provenance {
                software: SOFTWARE.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                data_source: session.data.source.clone(),
                data_sha256: session.data.sha256.clone(),
                bounds_table: TABLE_VERSION.into(),
                bounds_table_sha256: TABLE_SHA256.into(),
                rng_scheme: RNG_SCHEME.into(),
                config: cfg.clone(),
            },
            sample: Sample {
                first_period: ds.start(),
                last_period: ds.end(),
                observations: ds.len(),
                variables: session.variables().cloned().collect(),
            },
            unit_root: unit_root_rows(&a.unit_roots),
            ardl: ArdlSection::new(&a.model, &a.selection, &cfg.ardl.criterion),
            bounds: (&a.bounds).into(),
            diagnostics: a.diagnostics.iter().map(DiagnosticRow::from).collect(),
            long_run,
            ecm,
            cusum: (&a.cusum).into(),
            notes: a.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// `***` below 1%, `**` below 5%, `*` below 10%.
pub fn stars(pvalue: f64) -> &'static str {
    if pvalue < 0.01 {
        "***"
    } else if pvalue < 0.05 {
        "**"
    } else if pvalue < 0.10 {
        "*"
    } else {
        ""
    }
}

fn det_label(d: Deterministic) -> &'static str {
    match d {
        Deterministic::None => "none",
        Deterministic::Constant => "C",
        Deterministic::ConstantTrend => "C&T",
    }
}

fn stationarity_label(s: Stationarity) -> &'static str {
    match s {
        Stationarity::Stationary => "stationary",
        Stationarity::NonStationary => "nonstationary",
    }
}

fn pct(alpha: f64) -> String {
    format!("{}%", alpha * 100.0)
}

fn adf_table(out: &mut String, rows: &[&AdfRow]) {
    let _ = writeln!(
        out,
        "{:<12} {:>5} {:>4} {:>12} {:>10} {:>11} {:>11} {:>11}  {}",
        "Series", "Terms", "Lag", "ADF stat", "Prob.", "1% crit", "5% crit", "10% crit", "Result"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>5} {:>4} {:>12.6} {:>10.6} {:>11.6} {:>11.6} {:>11.6}  {}",
            r.series,
            det_label(r.deterministic),
            r.lag,
            r.statistic,
            r.pvalue,
            r.crit_1,
            r.crit_5,
            r.crit_10,
            stationarity_label(r.verdict)
        );
    }
}

fn coef_table(out: &mut String, rows: &[CoefRow]) {
    let _ = writeln!(
        out,
        "{:<14} {:>16} {:>14} {:>12} {:>10}",
        "Variable", "Coefficient", "Std. error", "t-stat", "Prob."
    );
    for r in rows {
        let coef = format!("{:.6}{}", r.coef, stars(r.pvalue));
        let _ = writeln!(
            out,
            "{:<14} {:>16} {:>14.6} {:>12.6} {:>10.6}",
            r.name, coef, r.stderr, r.tstat, r.pvalue
        );
    }
}

fn decision_label(d: LevelDecision) -> &'static str {
    match d {
        LevelDecision::Reject => "F > upper: long-run relationship",
        LevelDecision::Accept => "F < lower: no long-run relationship",
        LevelDecision::Inconclusive => "lower <= F <= upper: inconclusive",
    }
}

pub fn write_unit_roots(out: &mut String, rows: &[UnitRootRow], level: f64) {
    let _ = writeln!(out, "\n1. Unit-root tests in levels (ADF, verdicts at {})", pct(level));
    adf_table(out, &rows.iter().map(|u| &u.level).collect::<Vec<_>>());

    let _ = writeln!(out, "\n2. Unit-root tests in first differences (ADF)");
    let diffs: Vec<&AdfRow> = rows.iter().filter_map(|u| u.difference.as_ref()).collect();
    if diffs.is_empty() {
        let _ = writeln!(out, "(every variable is stationary in levels)");
    } else {
        adf_table(out, &diffs);
    }
    let orders: Vec<String> = rows
        .iter()
        .map(|u| format!("{} {}", u.variable, u.order.label()))
        .collect();
    let _ = writeln!(out, "Integration orders: {}", orders.join(", "));
}

pub fn write_ardl(out: &mut String, a: &ArdlSection) {
    let how = if a.selected_by == "fixed" {
        "fixed order".to_string()
    } else {
        format!("selected by {} over {} candidates", a.selected_by, a.candidates)
    };
    let _ = writeln!(
        out,
        "{} ({how}); sample {}-{}, {} observations",
        a.order, a.first_period, a.last_period, a.nobs
    );
    coef_table(out, &a.coefficients);
    let _ = writeln!(
        out,
        "R2 = {:.6}  adj. R2 = {:.6}  AIC = {:.6}  SIC = {:.6}  DW = {:.6}",
        a.r2, a.r2_adj, a.aic, a.sic, a.durbin_watson
    );
    if !a.stable {
        let _ = writeln!(out, "warning: autoregressive part is not stable");
    }
}

pub fn write_bounds(out: &mut String, b: &BoundsSection, order: &str) {
    let _ = writeln!(
        out,
        "\n3. Bounds test for a long-run relationship ({order}, case {}, k = {})",
        b.case.label(),
        b.k
    );
    let _ = writeln!(
        out,
        "F-statistic = {:.6}  (df {}, {}; {} observations)",
        b.fstat, b.df_num, b.df_den, b.nobs
    );
    let _ = writeln!(out, "{:<6} {:>12} {:>12}  {}", "Level", "I(0) bound", "I(1) bound", "Decision");
    for row in &b.rows {
        let _ = writeln!(
            out,
            "{:<6} {:>12.6} {:>12.6}  {}",
            row.level.label(),
            row.lower,
            row.upper,
            decision_label(row.decision)
        );
    }
    match b.verdict {
        BoundsVerdict::Cointegrated(level) => {
            let upper = b.rows.iter().find(|x| x.level == level).map(|x| x.upper).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "Verdict: cointegrated at {}: F = {:.6} > upper({}) = {:.6}",
                level.label(),
                b.fstat,
                level.label(),
                upper
            );
        }
        BoundsVerdict::Inconclusive => {
            let _ = writeln!(out, "Verdict: inconclusive at every tested level");
        }
        BoundsVerdict::NotCointegrated => {
            let _ = writeln!(out, "Verdict: no cointegration; F is below every lower bound");
        }
    }
}

pub fn write_diagnostics(out: &mut String, rows: &[DiagnosticRow]) {
    let _ = writeln!(out, "\n4. Classical-assumption tests (F form, pass when Prob. > level)");
    let _ = writeln!(
        out,
        "{:<44} {:>12} {:>10} {:>10}  {}",
        "Test", "F-stat", "df", "Prob.", "Result"
    );
    for d in rows {
        let verdict = match d.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(
            out,
            "{:<44} {:>12.6} {:>10} {:>10.6}  {} at {}",
            d.name,
            d.fstat,
            format!("{},{}", d.df_num, d.df_den),
            d.pvalue,
            verdict,
            pct(d.level)
        );
    }
}

pub fn write_long_run(out: &mut String, lr: Option<&LongRunSection>, order: &str) {
    let _ = writeln!(out, "\n5. Long-run coefficients ({order})");
    match lr {
        Some(lr) => {
            coef_table(out, &lr.coefficients);
            let _ = writeln!(out, "*** p < 0.01, ** p < 0.05, * p < 0.10");
        }
        None => {
            let _ = writeln!(out, "(not estimated)");
        }
    }
}

pub fn write_ecm(out: &mut String, ecm: Option<&EcmSection>) {
    let _ = writeln!(out, "\n6. Error-correction model");
    match ecm {
        Some(e) => {
            coef_table(out, &e.coefficients);
            let _ = writeln!(out, "*** p < 0.01, ** p < 0.05, * p < 0.10");
            let _ = writeln!(out, "Reading: {}", e.narrative);
        }
        None => {
            let _ = writeln!(out, "(not estimated)");
        }
    }
}

pub fn write_cusum(out: &mut String, c: &CusumSection) {
    let _ = writeln!(
        out,
        "\nCUSUM of recursive residuals ({} bounds, a = {:.3}): {}",
        pct(c.level),
        c.coefficient,
        if c.stable { "stable, path stays inside the bounds" } else { "unstable, path leaves the bounds" }
    );
    let _ = writeln!(out, "{:<8} {:>12} {:>12} {:>12}", "Period", "CUSUM", "Lower", "Upper");
    for row in &c.rows {
        let _ = writeln!(
            out,
            "{:<8} {:>12.6} {:>12.6} {:>12.6}{}",
            row.period,
            row.path,
            row.lower,
            row.upper,
            if row.outside { "  outside" } else { "" }
        );
    }
}

/// Six numbered sections in the order of the workflow, then the CUSUM data.
pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let p = &r.provenance;
    let _ = writeln!(out, "{} {} report (schema {})", p.software, p.version, r.schema_version);
    let _ = writeln!(out, "Data: {} (sha256 {})", p.data_source, p.data_sha256);
    let _ = writeln!(
        out,
        "Sample: {}-{} ({} observations); variables: {}",
        r.sample.first_period,
        r.sample.last_period,
        r.sample.observations,
        r.sample.variables.join(", ")
    );
    write_unit_roots(&mut out, &r.unit_root, p.config.significance);
    write_bounds(&mut out, &r.bounds, &r.ardl.order);
    write_diagnostics(&mut out, &r.diagnostics);
    write_long_run(&mut out, r.long_run.as_ref(), &r.ardl.order);
    write_ecm(&mut out, r.ecm.as_ref());
    write_cusum(&mut out, &r.cusum);
    if !r.notes.is_empty() {
        let _ = writeln!(out, "\nNotes:");
        for n in &r.notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}

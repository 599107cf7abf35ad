//! Bounds F-test for a long-run level relationship.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ArdlOrder;
use crate::error::{Error, Result};
use crate::ols::residual_ss;
use crate::series::{build_design, Dataset, DesignMatrix, DesignOptions, Term, INTERCEPT, TREND};

pub const TABLE_CSV: &str = include_str!("../../data/pesaran_bounds.csv");
pub const TABLE_VERSION: &str = "pesaran-bounds/1";
pub const TABLE_SHA256: &str = "97f66001f36ad198d932362f9870c3a769c71726dce81ebaa2d13f75922ca10c";

pub fn table_sha256() -> String {
    crate::unitroot::mackinnon::hex(&Sha256::digest(TABLE_CSV.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "10%")]
    Ten,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "2.5%")]
    TwoHalf,
    #[serde(rename = "1%")]
    One,
}

impl Significance {
    pub const ALL: [Significance; 4] = [
        Significance::Ten,
        Significance::Five,
        Significance::TwoHalf,
        Significance::One,
    ];

    pub fn alpha(self) -> f64 {
        match self {
            Significance::Ten => 0.10,
            Significance::Five => 0.05,
            Significance::TwoHalf => 0.025,
            Significance::One => 0.01,
        }
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| (s.alpha() - alpha).abs() < 1e-12)
            .ok_or_else(|| Error::Lookup(format!("no bounds at significance level {alpha}")))
    }

    pub fn label(self) -> &'static str {
        match self {
            Significance::Ten => "10%",
            Significance::Five => "5%",
            Significance::TwoHalf => "2.5%",
            Significance::One => "1%",
        }
    }
}

/// Deterministic terms of the conditional error-correction regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundsCase {
    /// No intercept, no trend.
    I,
    /// Intercept restricted to the level relationship.
    II,
    /// Unrestricted intercept.
    III,
    /// Unrestricted intercept, trend restricted to the level relationship.
    IV,
    /// Unrestricted intercept and trend.
    V,
}

impl BoundsCase {
    pub fn label(self) -> &'static str {
        match self {
            BoundsCase::I => "I",
            BoundsCase::II => "II",
            BoundsCase::III => "III",
            BoundsCase::IV => "IV",
            BoundsCase::V => "V",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(BoundsCase::I),
            "II" | "2" => Ok(BoundsCase::II),
            "III" | "3" => Ok(BoundsCase::III),
            "IV" | "4" => Ok(BoundsCase::IV),
            "V" | "5" => Ok(BoundsCase::V),
            other => Err(Error::Lookup(format!("unsupported bounds case `{other}`"))),
        }
    }

    fn intercept(self) -> bool {
        self != BoundsCase::I
    }

    fn trend(self) -> bool {
        matches!(self, BoundsCase::IV | BoundsCase::V)
    }

    /// Deterministic columns that belong to the level relationship and are
    /// therefore part of the tested restriction.
    fn restricted_terms(self) -> &'static [&'static str] {
        match self {
            BoundsCase::II => &[INTERCEPT],
            BoundsCase::IV => &[TREND],
            _ => &[],
        }
    }
}

impl Default for BoundsCase {
    fn default() -> Self {
        BoundsCase::I
    }
}

#[derive(Debug, Clone, PartialEq)]
struct TableRow {
    k: usize,
    case: BoundsCase,
    level: Significance,
    lower: f64,
    upper: f64,
}

fn table() -> &'static [TableRow] {
    static ROWS: OnceLock<Vec<TableRow>> = OnceLock::new();
    ROWS.get_or_init(|| parse(TABLE_CSV).expect("embedded bounds table parses"))
}

fn parse(text: &str) -> Result<Vec<TableRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Lookup(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Lookup(format!("bad number `{}`: {e}", &rec[i])))
        };
        out.push(TableRow {
            k: rec[0]
                .trim()
                .parse()
                .map_err(|e| Error::Lookup(format!("bad k `{}`: {e}", &rec[0])))?,
            case: BoundsCase::parse(&rec[1])?,
            level: Significance::from_alpha(num(2)?)?,
            lower: num(3)?,
            upper: num(4)?,
        });
    }
    Ok(out)
}

/// `(lower, upper)` critical bounds for `k` regressors.
pub fn pesaran_bounds(k: usize, level: Significance, case: BoundsCase) -> Result<(f64, f64)> {
    table()
        .iter()
        .find(|r| r.k == k && r.level == level && r.case == case)
        .map(|r| (r.lower, r.upper))
        .ok_or_else(|| {
            Error::Lookup(format!(
                "no bounds for k={k}, case {}, level {}",
                case.label(),
                level.label()
            ))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelDecision {
    /// F above the upper bound.
    Reject,
    /// F below the lower bound.
    Accept,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub level: Significance,
    pub lower: f64,
    pub upper: f64,
    pub decision: LevelDecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "level", rename_all = "snake_case")]
pub enum BoundsVerdict {
    /// Strongest (smallest) significance level at which F exceeds the upper bound.
    Cointegrated(Significance),
    Inconclusive,
    NotCointegrated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsResult {
    pub fstat: f64,
    pub k: usize,
    pub case: BoundsCase,
    /// Numerator and denominator degrees of freedom of the Wald F.
    pub df: (usize, usize),
    pub nobs: usize,
    /// Columns whose coefficients are jointly zero under the null.
    pub restricted: Vec<String>,
    pub bounds: Vec<BoundsRow>,
    pub verdict: BoundsVerdict,
}

fn decide(f: f64, lower: f64, upper: f64) -> LevelDecision {
    if f > upper {
        LevelDecision::Reject
    } else if f < lower {
        LevelDecision::Accept
    } else {
        LevelDecision::Inconclusive
    }
}

/// Per-level decisions and the overall verdict for `fstat` against the
/// table bounds at `levels`.
pub fn bounds_verdict(
    fstat: f64,
    k: usize,
    case: BoundsCase,
    levels: &[Significance],
) -> Result<(Vec<BoundsRow>, BoundsVerdict)> {
    if levels.is_empty() {
        return Err(Error::Domain("no significance levels to test".into()));
    }
    let rows = levels
        .iter()
        .map(|&level| {
            let (lower, upper) = pesaran_bounds(k, level, case)?;
            Ok(BoundsRow {
                level,
                lower,
                upper,
                decision: decide(fstat, lower, upper),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strongest = rows
        .iter()
        .filter(|r| r.decision == LevelDecision::Reject)
        .map(|r| r.level)
        .max();
    let verdict = match strongest {
        Some(level) => BoundsVerdict::Cointegrated(level),
        None if rows.iter().all(|r| r.decision == LevelDecision::Accept) => {
            BoundsVerdict::NotCointegrated
        }
        None => BoundsVerdict::Inconclusive,
    };
    Ok((rows, verdict))
}

/// Unrestricted conditional error-correction design: `D(dep)` on the lagged
/// dependent level, regressor levels, lagged differences and the case's
/// deterministic terms. Regressors with no lags enter as a single
/// contemporaneous level. Returns the design and the names of the columns
/// under test.
pub(crate) fn conditional_ecm_design(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[String],
    order: &ArdlOrder,
    case: BoundsCase,
) -> Result<(DesignMatrix<f64>, Vec<String>)> {
    order.check(regressors.len())?;
    let mut terms = vec![Term::level(dep, 1)];
    for (x, &q) in regressors.iter().zip(&order.q) {
        terms.push(Term::level(x.as_str(), if q == 0 { 0 } else { 1 }));
    }
    let mut restricted: Vec<String> = terms.iter().map(Term::label).collect();
    terms.extend((1..order.p).map(|j| Term::diff(dep, j)));
    for (x, &q) in regressors.iter().zip(&order.q) {
        terms.extend((0..q).map(|m| Term::diff(x.as_str(), m)));
    }
    let opts = DesignOptions {
        intercept: case.intercept(),
        trend: case.trend(),
        min_offset: order.max_lag(),
    };
    let design = build_design(ds, &Term::diff(dep, 0), &terms, opts)?;
    restricted.extend(case.restricted_terms().iter().map(|s| s.to_string()));
    Ok((design, restricted))
}

/// Wald F on the lagged-level block of the conditional error-correction
/// regression, judged at 10%, 5% and 1%.
pub fn bounds_test(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[impl AsRef<str>],
    order: &ArdlOrder,
    case: BoundsCase,
) -> Result<BoundsResult> {
    bounds_test_at(
        ds,
        dep,
        regressors,
        order,
        case,
        &[Significance::Ten, Significance::Five, Significance::One],
    )
}

pub fn bounds_test_at(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[impl AsRef<str>],
    order: &ArdlOrder,
    case: BoundsCase,
    levels: &[Significance],
) -> Result<BoundsResult> {
    let regs: Vec<String> = regressors.iter().map(|r| r.as_ref().to_string()).collect();
    let k = regs.len();
    // fail on an unsupported k before fitting anything
    pesaran_bounds(k, levels.first().copied().unwrap_or(Significance::Five), case)?;
    let (design, restricted) = conditional_ecm_design(ds, dep, &regs, order, case)?;
    let fstat = bounds_f(&design, &restricted)?;
    let (bounds, verdict) = bounds_verdict(fstat, k, case, levels)?;
    Ok(BoundsResult {
        fstat,
        k,
        case,
        df: (restricted.len(), design.nrows() - design.ncols()),
        nobs: design.nrows(),
        restricted,
        bounds,
        verdict,
    })
}

/// `((RSS_r - RSS_u) / m) / (RSS_u / (n - K))` dropping `restricted`.
pub(crate) fn bounds_f(design: &DesignMatrix<f64>, restricted: &[String]) -> Result<f64> {
    let rss_u = residual_ss(design)?;
    let drop: Vec<&str> = restricted.iter().map(String::as_str).collect();
    let reduced = design.without(&drop)?;
    let rss_r = if reduced.ncols() == 0 {
        design.response.iter().map(|v| v * v).sum()
    } else {
        residual_ss(&reduced)?
    };
    let m = restricted.len() as f64;
    let dof = (design.nrows() - design.ncols()) as f64;
    Ok(((rss_r - rss_u) / m) / (rss_u / dof))
}

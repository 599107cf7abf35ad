//! Augmented Dickey-Fuller tests, lag selection and integration-order
//! classification.

pub mod mackinnon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::fit_ols;
use crate::series::{build_design, Dataset, DesignMatrix, DesignOptions, Term, TimeSeries};

/// Smallest regression sample the test accepts after lag truncation.
pub const MIN_SAMPLE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

impl Deterministic {
    pub fn code(self) -> &'static str {
        match self {
            Deterministic::None => "n",
            Deterministic::Constant => "c",
            Deterministic::ConstantTrend => "ct",
        }
    }

    pub fn parse(code: &str) -> Result<Self> {
        match code.to_ascii_lowercase().as_str() {
            "n" | "none" | "nc" | "-" => Ok(Deterministic::None),
            "c" | "constant" => Ok(Deterministic::Constant),
            "ct" | "trend" | "constant_trend" | "c&t" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::Domain(format!("unknown deterministic terms `{other}`"))),
        }
    }

    fn options(self, min_offset: usize) -> DesignOptions {
        DesignOptions {
            intercept: self != Deterministic::None,
            trend: self == Deterministic::ConstantTrend,
            min_offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Sic,
}

impl Criterion {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "sic" | "bic" | "schwarz" => Ok(Criterion::Sic),
            other => Err(Error::Domain(format!("unknown criterion `{other}`"))),
        }
    }

    pub fn of(self, fit: &crate::ols::OlsFit<f64>) -> f64 {
        match self {
            Criterion::Aic => fit.aic,
            Criterion::Sic => fit.sic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagPolicy {
    Fixed(usize),
    /// `max_lag: None` uses [`default_max_lag`].
    Auto {
        max_lag: Option<usize>,
        criterion: Criterion,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdfSpec {
    pub deterministic: Deterministic,
    pub lag_policy: LagPolicy,
}

impl AdfSpec {
    pub fn fixed(deterministic: Deterministic, lag: usize) -> Self {
        Self {
            deterministic,
            lag_policy: LagPolicy::Fixed(lag),
        }
    }

    /// SIC search up to the default maximum lag.
    pub fn auto(deterministic: Deterministic) -> Self {
        Self {
            deterministic,
            lag_policy: LagPolicy::Auto {
                max_lag: None,
                criterion: Criterion::Sic,
            },
        }
    }
}

impl Default for AdfSpec {
    fn default() -> Self {
        Self::auto(Deterministic::Constant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stationarity {
    Stationary,
    NonStationary,
}

impl Stationarity {
    /// `Stationary` iff `pvalue < level`.
    pub fn from_pvalue(pvalue: f64, level: f64) -> Self {
        if pvalue < level {
            Stationarity::Stationary
        } else {
            Stationarity::NonStationary
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub variable: String,
    pub spec: AdfSpec,
    pub chosen_lag: usize,
    pub nobs: usize,
    /// t-ratio on the lagged level.
    pub stat: f64,
    pub pvalue: f64,
    pub crit: CriticalValues,
    pub level: f64,
    pub verdict: Stationarity,
}

/// `floor(12 (T/100)^{1/4})`, capped so at least [`MIN_SAMPLE`] rows remain.
pub fn default_max_lag(len: usize) -> usize {
    let schwert = (12.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize;
    schwert.min(len.saturating_sub(MIN_SAMPLE + 1))
}

fn adf_design(
    s: &TimeSeries<f64>,
    det: Deterministic,
    lag: usize,
    min_offset: usize,
) -> Result<DesignMatrix<f64>> {
    let ds = Dataset::new(vec![s.clone()])?;
    let name = s.name();
    let mut terms = vec![Term::level(name, 1)];
    terms.extend((1..=lag).map(|j| Term::diff(name, j)));
    build_design(&ds, &Term::diff(name, 0), &terms, det.options(min_offset))
}

fn check_series(s: &TimeSeries<f64>) -> Result<()> {
    let first = s.values()[0];
    if s.values().iter().all(|&v| v == first) {
        return Err(Error::Degenerate(format!(
            "series `{}` is constant (zero-variance regressor)",
            s.name()
        )));
    }
    Ok(())
}

fn check_max_lag(s: &TimeSeries<f64>, max_lag: usize) -> Result<()> {
    if max_lag + 10 > s.len() {
        return Err(Error::Domain(format!(
            "max lag {max_lag} exceeds length - 10 for `{}` ({} observations)",
            s.name(),
            s.len()
        )));
    }
    let rows = s.len() - 1 - max_lag;
    if rows < MIN_SAMPLE {
        return Err(Error::Sample(format!(
            "{rows} rows after lag truncation; at least {MIN_SAMPLE} required"
        )));
    }
    Ok(())
}

/// Criterion-minimizing lag over `0..=max_lag`, all candidates fitted on the
/// sample truncated by `max_lag`; ties go to the smaller lag.
pub fn select_adf_lag(
    s: &TimeSeries<f64>,
    det: Deterministic,
    max_lag: usize,
    criterion: Criterion,
) -> Result<usize> {
    check_series(s)?;
    check_max_lag(s, max_lag)?;
    let mut best: Option<(usize, f64)> = None;
    for lag in 0..=max_lag {
        let design = adf_design(s, det, lag, max_lag + 1)?;
        let value = criterion.of(&fit_ols(&design)?);
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((lag, value));
        }
    }
    Ok(best.map(|(l, _)| l).unwrap_or(0))
}

/// ADF regression of `D(y)` on `y(-1)`, lagged differences and the
/// deterministic terms; the verdict compares the approximate p-value to `level`.
pub fn adf_test(s: &TimeSeries<f64>, spec: &AdfSpec, level: f64) -> Result<AdfResult> {
    check_series(s)?;
    let lag = match spec.lag_policy {
        LagPolicy::Fixed(l) => l,
        LagPolicy::Auto { max_lag, criterion } => {
            let max_lag = max_lag.unwrap_or_else(|| default_max_lag(s.len()));
            select_adf_lag(s, spec.deterministic, max_lag, criterion)?
        }
    };
    if s.len() < lag + 1 + MIN_SAMPLE {
        return Err(Error::Sample(format!(
            "`{}` has {} observations; lag {lag} needs at least {}",
            s.name(),
            s.len(),
            lag + 1 + MIN_SAMPLE
        )));
    }
    let design = adf_design(s, spec.deterministic, lag, 0)?;
    let fit = fit_ols(&design).map_err(|e| match e {
        Error::Rank { column } => Error::Degenerate(format!(
            "ADF regression for `{}` is singular at `{column}`",
            s.name()
        )),
        other => other,
    })?;
    let level_name = Term::level(s.name(), 1).label();
    let idx = fit
        .index_of(&level_name)
        .expect("lagged level is always in the ADF design");
    let stat = fit.tstat[idx];
    let det = spec.deterministic;
    let nobs = fit.n;
    let pvalue = mackinnon::pvalue(stat, det);
    let crit = CriticalValues {
        one: mackinnon::critical_value(det, 0.01, nobs)?,
        five: mackinnon::critical_value(det, 0.05, nobs)?,
        ten: mackinnon::critical_value(det, 0.10, nobs)?,
    };
    Ok(AdfResult {
        variable: s.name().to_string(),
        spec: *spec,
        chosen_lag: lag,
        nobs,
        stat,
        pvalue,
        crit,
        level,
        verdict: Stationarity::from_pvalue(pvalue, level),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    I0,
    I1,
    /// Nonstationary in levels and in first differences.
    I2OrHigher,
}

impl Order {
    pub fn label(self) -> &'static str {
        match self {
            Order::I0 => "I(0)",
            Order::I1 => "I(1)",
            Order::I2OrHigher => "I(2+)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationSpec {
    pub level: AdfSpec,
    pub difference: AdfSpec,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            level: AdfSpec::default(),
            difference: AdfSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOrder {
    pub order: Order,
    pub level_result: AdfResult,
    pub diff_result: Option<AdfResult>,
    pub warning: Option<String>,
}

/// Tests the level first and, if nonstationary, the first difference.
pub fn classify_integration(
    s: &TimeSeries<f64>,
    spec: &IntegrationSpec,
    level: f64,
) -> Result<IntegrationOrder> {
    let level_result = adf_test(s, &spec.level, level)?;
    if level_result.verdict == Stationarity::Stationary {
        return Ok(IntegrationOrder {
            order: Order::I0,
            level_result,
            diff_result: None,
            warning: None,
        });
    }
    let diffed = crate::series::difference(s, 1)?;
    let diff_result = adf_test(&diffed, &spec.difference, level)?;
    let (order, warning) = match diff_result.verdict {
        Stationarity::Stationary => (Order::I1, None),
        Stationarity::NonStationary => (
            Order::I2OrHigher,
            Some(format!(
                "`{}` is nonstationary in levels and first differences at the {}% level",
                s.name(),
                level * 100.0
            )),
        ),
    };
    Ok(IntegrationOrder {
        order,
        level_result,
        diff_result: Some(diff_result),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const FIXTURE: [f64; 16] = [
        10.2, 10.9, 11.1, 10.7, 11.8, 12.4, 12.1, 12.9, 13.6, 13.2, 14.1, 14.0, 14.9, 15.6, 15.2,
        16.3,
    ];

    fn fixture() -> TimeSeries<f64> {
        TimeSeries::new("Y", 1, FIXTURE.to_vec()).unwrap()
    }

    /// Two-column OLS t-ratio written out from the closed-form formulas.
    fn df_t_ratio_oracle(y: &[f64]) -> f64 {
        let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let x: Vec<f64> = y[..y.len() - 1].to_vec();
        let n = dy.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = dy.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        let sxy: f64 = x.iter().zip(&dy).map(|(a, b)| (a - mx) * (b - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let rss: f64 = x
            .iter()
            .zip(&dy)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        let s2 = rss / (n - 2.0);
        slope / (s2 / sxx).sqrt()
    }

    #[test]
    fn lag_zero_stat_matches_two_column_oracle() {
        let res = adf_test(&fixture(), &AdfSpec::fixed(Deterministic::Constant, 0), 0.05).unwrap();
        assert_abs_diff_eq!(res.stat, df_t_ratio_oracle(&FIXTURE), epsilon = 1e-8);
        assert_eq!(res.nobs, 15);
        assert!(res.crit.one < res.crit.five && res.crit.five < res.crit.ten);
    }

    #[test]
    fn verdict_follows_pvalue() {
        assert_eq!(Stationarity::from_pvalue(0.0350, 0.05), Stationarity::Stationary);
        assert_eq!(Stationarity::from_pvalue(0.2663, 0.05), Stationarity::NonStationary);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = TimeSeries::new("Y", 1, vec![3.0; 20]).unwrap();
        assert!(matches!(
            adf_test(&s, &AdfSpec::fixed(Deterministic::Constant, 0), 0.05),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn short_sample_is_error() {
        let s = TimeSeries::new("Y", 1, FIXTURE[..12].to_vec()).unwrap();
        assert!(matches!(
            adf_test(&s, &AdfSpec::fixed(Deterministic::Constant, 0), 0.05),
            Err(Error::Sample(_))
        ));
    }

    #[test]
    fn max_lag_zero_selects_zero() {
        assert_eq!(select_adf_lag(&fixture(), Deterministic::Constant, 0, Criterion::Sic).unwrap(), 0);
    }

    #[test]
    fn max_lag_too_large_is_rejected() {
        assert!(select_adf_lag(&fixture(), Deterministic::Constant, 7, Criterion::Sic).is_err());
    }

    #[test]
    fn default_max_lag_rule() {
        assert_eq!(default_max_lag(100), 12);
        assert_eq!(default_max_lag(23), 8);
        assert_eq!(default_max_lag(16), 3);
    }

    fn noisy(n: usize, seed: u64) -> Vec<f64> {
        // deterministic pseudo-random walk for property tests
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut level = 0.0;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                level += ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                level
            })
            .collect()
    }

    proptest! {
        #[test]
        fn stat_is_scale_invariant(seed in 0u64..1000, lag in 0usize..3) {
            let v = noisy(40, seed);
            let s = TimeSeries::new("Y", 1, v.clone()).unwrap();
            let scaled = TimeSeries::new("Y", 1, v.iter().map(|x| x * 1000.0).collect()).unwrap();
            let spec = AdfSpec::fixed(Deterministic::Constant, lag);
            let a = adf_test(&s, &spec, 0.05).unwrap().stat;
            let b = adf_test(&scaled, &spec, 0.05).unwrap().stat;
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn stat_is_shift_and_trend_invariant(seed in 0u64..1000, shift in -50.0f64..50.0, slope in -2.0f64..2.0) {
            let v = noisy(40, seed);
            let s = TimeSeries::new("Y", 1, v.clone()).unwrap();
            let shifted = TimeSeries::new("Y", 1, v.iter().map(|x| x + shift).collect()).unwrap();
            let spec = AdfSpec::fixed(Deterministic::Constant, 1);
            prop_assert!((adf_test(&s, &spec, 0.05).unwrap().stat - adf_test(&shifted, &spec, 0.05).unwrap().stat).abs() < 1e-9);
            let trended = TimeSeries::new("Y", 1, v.iter().enumerate().map(|(i, x)| x + shift + slope * i as f64).collect()).unwrap();
            let spec = AdfSpec::fixed(Deterministic::ConstantTrend, 1);
            prop_assert!((adf_test(&s, &spec, 0.05).unwrap().stat - adf_test(&trended, &spec, 0.05).unwrap().stat).abs() < 1e-9);
        }
    }
}

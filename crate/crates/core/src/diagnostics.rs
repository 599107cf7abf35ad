//! Residual diagnostics on a fitted regression (serial correlation, functional
//! form, heteroskedasticity) and the CUSUM stability test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{fit_ols, recursive_residuals, residual_ss, OlsFit};
use crate::probdist::f_pvalue;
use crate::series::{DesignMatrix, INTERCEPT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    /// `Pass` iff the null is retained: `pvalue > level`.
    pub fn from_pvalue(pvalue: f64, level: f64) -> Self {
        if pvalue > level {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub name: String,
    pub fstat: f64,
    pub df: (usize, usize),
    pub pvalue: f64,
    pub level: f64,
    pub verdict: Verdict,
}

impl TestResult {
    fn new(name: &str, fstat: f64, df: (usize, usize), level: f64) -> Result<Self> {
        let fstat = fstat.max(0.0);
        let pvalue = f_pvalue(fstat, df.0 as f64, df.1 as f64);
        Ok(Self {
            name: name.to_string(),
            fstat,
            df,
            pvalue,
            level,
            verdict: Verdict::from_pvalue(pvalue, level),
        })
    }
}

/// Nested-model F for `added` extra columns: `((rss_r - rss_u)/m) / (rss_u/df)`.
fn nested_f(rss_r: f64, rss_u: f64, m: usize, df: usize) -> f64 {
    ((rss_r - rss_u) / m as f64) / (rss_u / df as f64)
}

fn aux_design(base: &DesignMatrix<f64>, response: Vec<f64>) -> Result<DesignMatrix<f64>> {
    base.with_response("aux", response)
}

/// Breusch-Godfrey LM test, F form: residuals on the original regressors and
/// `lags` lagged residuals, presample lags set to zero.
pub fn serial_lm(fit: &OlsFit<f64>, lags: usize, level: f64) -> Result<TestResult> {
    if lags == 0 {
        return Err(Error::Domain("serial correlation test needs at least one lag".into()));
    }
    let n = fit.n;
    let k = fit.k;
    if n <= k + lags {
        return Err(Error::Sample(format!(
            "{n} observations cannot identify {k} regressors plus {lags} residual lags"
        )));
    }
    let u = &fit.residuals;
    let mut design = aux_design(&fit.design, u.clone())?;
    for h in 1..=lags {
        let col: Vec<f64> = (0..n).map(|t| if t >= h { u[t - h] } else { 0.0 }).collect();
        design = design.with_column(format!("RESID(-{h})"), col)?;
    }
    let rss_u = residual_ss(&design)?;
    let rss_r: f64 = u.iter().map(|e| e * e).sum();
    let df = (lags, n - k - lags);
    TestResult::new(
        "Breusch-Godfrey serial correlation LM",
        nested_f(rss_r, rss_u, df.0, df.1),
        df,
        level,
    )
}

/// Ramsey RESET: adds fitted-value powers `2..=powers` and tests them jointly.
pub fn ramsey_reset(fit: &OlsFit<f64>, powers: usize, level: f64) -> Result<TestResult> {
    if powers < 2 {
        return Err(Error::Domain("RESET needs powers >= 2".into()));
    }
    let yhat = &fit.fitted;
    if yhat.iter().all(|&v| v == yhat[0]) {
        return Err(Error::Domain("RESET needs non-constant fitted values".into()));
    }
    let added = powers - 1;
    let n = fit.n;
    if n <= fit.k + added {
        return Err(Error::Sample(format!(
            "{n} observations for {} RESET regressors",
            fit.k + added
        )));
    }
    let mut design = fit.design.clone();
    for pw in 2..=powers {
        design = design.with_column(
            format!("FITTED^{pw}"),
            yhat.iter().map(|v| v.powi(pw as i32)).collect(),
        )?;
    }
    let rss_u = residual_ss(&design)?;
    let df = (added, n - fit.k - added);
    TestResult::new("Ramsey RESET", nested_f(fit.rss, rss_u, df.0, df.1), df, level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HetKind {
    #[default]
    BreuschPaganGodfrey,
    White,
}

impl HetKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "bpg" | "breuschpagangodfrey" | "breuschpagan" => Ok(HetKind::BreuschPaganGodfrey),
            "white" => Ok(HetKind::White),
            other => Err(Error::Domain(format!("unknown heteroskedasticity test `{other}`"))),
        }
    }
}

fn is_constant(col: &[f64]) -> bool {
    col.iter().all(|&v| v == col[0])
}

/// Squared residuals on the regressors (BPG) or on regressors, squares and
/// cross-products (White), always with an intercept; F for all slopes zero.
pub fn het_test(fit: &OlsFit<f64>, kind: HetKind, level: f64) -> Result<TestResult> {
    let d = &fit.design;
    let n = fit.n;
    let u2: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
    let slopes: Vec<(String, Vec<f64>)> = d
        .names
        .iter()
        .zip(&d.columns)
        .filter(|(_, c)| !is_constant(c))
        .map(|(nm, c)| (nm.clone(), c.clone()))
        .collect();
    let mut cols = slopes.clone();
    if kind == HetKind::White {
        for i in 0..slopes.len() {
            for j in i..slopes.len() {
                let (ni, ci) = &slopes[i];
                let (nj, cj) = &slopes[j];
                let name = if i == j { format!("{ni}^2") } else { format!("{ni}*{nj}") };
                cols.push((name, ci.iter().zip(cj).map(|(a, b)| a * b).collect()));
            }
        }
    }
    cols.push((INTERCEPT.to_string(), vec![1.0; n]));
    let kk = cols.len();
    if kk < 2 {
        return Err(Error::Domain("heteroskedasticity test needs a non-constant regressor".into()));
    }
    if n <= kk {
        return Err(Error::Sample(format!(
            "{n} observations for {kk} auxiliary regressors"
        )));
    }
    let aux = DesignMatrix::from_columns("RESID^2", u2, cols, d.first_period)?;
    let af = fit_ols(&aux)?;
    let df = (kk - 1, n - kk);
    let f = (af.r2 / df.0 as f64) / ((1.0 - af.r2) / df.1 as f64);
    let name = match kind {
        HetKind::BreuschPaganGodfrey => "Breusch-Pagan-Godfrey heteroskedasticity",
        HetKind::White => "White heteroskedasticity",
    };
    TestResult::new(name, f, df, level)
}

/// Significance levels with a CUSUM boundary coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CusumLevel {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl CusumLevel {
    /// Boundary coefficient `a` of the straight-line bounds.
    pub fn coefficient(self) -> f64 {
        match self {
            CusumLevel::One => 1.143,
            CusumLevel::Five => 0.948,
            CusumLevel::Ten => 0.850,
        }
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        [CusumLevel::One, CusumLevel::Five, CusumLevel::Ten]
            .into_iter()
            .find(|l| (l.alpha() - alpha).abs() < 1e-12)
            .ok_or_else(|| Error::Lookup(format!("no CUSUM boundary at level {alpha}")))
    }

    pub fn alpha(self) -> f64 {
        match self {
            CusumLevel::One => 0.01,
            CusumLevel::Five => 0.05,
            CusumLevel::Ten => 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CusumResult {
    pub periods: Vec<i32>,
    pub path: Vec<f64>,
    pub lower_bound: Vec<f64>,
    pub upper_bound: Vec<f64>,
    pub stable: bool,
    pub level: CusumLevel,
    /// Row of the design where the recursion starts.
    pub first_row: usize,
}

impl CusumResult {
    /// `true` at each period where the path leaves the band.
    pub fn crossings(&self) -> Vec<bool> {
        self.path
            .iter()
            .zip(self.lower_bound.iter().zip(&self.upper_bound))
            .map(|(p, (lo, hi))| p < lo || p > hi)
            .collect()
    }
}

/// CUSUM of recursive residuals scaled by their standard deviation, with
/// bounds `+-a (sqrt(m) + 2 j / sqrt(m))` for the `j`-th of `m` residuals.
pub fn cusum(design: &DesignMatrix<f64>, level: CusumLevel) -> Result<CusumResult> {
    let rr = recursive_residuals(design)?;
    let w = &rr.values;
    let m = w.len();
    let mf = m as f64;
    let ynorm = design.response.iter().map(|v| v * v).sum::<f64>().sqrt();
    let wnorm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let path: Vec<f64> = if wnorm <= 1e-9 * ynorm.max(f64::MIN_POSITIVE) || m < 2 {
        vec![0.0; m]
    } else {
        let mean = w.iter().sum::<f64>() / mf;
        let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (mf - 1.0)).sqrt();
        w.iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc / sd)
            })
            .collect()
    };
    let a = level.coefficient();
    let upper_bound: Vec<f64> = (1..=m)
        .map(|j| a * (mf.sqrt() + 2.0 * j as f64 / mf.sqrt()))
        .collect();
    let lower_bound: Vec<f64> = upper_bound.iter().map(|v| -v).collect();
    let stable = path
        .iter()
        .zip(lower_bound.iter().zip(&upper_bound))
        .all(|(p, (lo, hi))| lo <= p && p <= hi);
    let periods = (rr.first_row..design.nrows())
        .map(|i| design.first_period + i as i32)
        .collect();
    Ok(CusumResult {
        periods,
        path,
        lower_bound,
        upper_bound,
        stable,
        level,
        first_row: rr.first_row,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    fn linear_fit(n: usize, seed: u64) -> OlsFit<f64> {
        let mut r = lcg(seed);
        let x: Vec<f64> = (0..n).map(|_| r() * 4.0).collect();
        let z: Vec<f64> = (0..n).map(|_| r() * 2.0).collect();
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 1.0 + 0.5 * a - b + r()).collect();
        let d = DesignMatrix::from_columns(
            "y",
            y,
            vec![
                ("x".into(), x),
                ("z".into(), z),
                (INTERCEPT.into(), vec![1.0; n]),
            ],
            1,
        )
        .unwrap();
        fit_ols(&d).unwrap()
    }

    #[test]
    fn table_verdicts() {
        assert_eq!(Verdict::from_pvalue(0.20, 0.05), Verdict::Pass);
        assert_eq!(Verdict::from_pvalue(0.33, 0.05), Verdict::Pass);
        assert_eq!(Verdict::from_pvalue(0.11, 0.05), Verdict::Pass);
        assert_eq!(Verdict::from_pvalue(0.05, 0.05), Verdict::Fail);
    }

    #[test]
    fn serial_lm_matches_explicit_auxiliary_fit() {
        let fit = linear_fit(40, 3);
        let res = serial_lm(&fit, 2, 0.05).unwrap();
        let u = &fit.residuals;
        let lag = |h: usize| (0..40).map(|t| if t >= h { u[t - h] } else { 0.0 }).collect::<Vec<_>>();
        let aux = fit
            .design
            .with_response("u", u.clone())
            .unwrap()
            .with_column("l1", lag(1))
            .unwrap()
            .with_column("l2", lag(2))
            .unwrap();
        let af = fit_ols(&aux).unwrap();
        // u is orthogonal to X, so the aux R^2 is the explained share of u
        let f = (af.r2 / 2.0) / ((1.0 - af.r2) / (40.0 - 5.0));
        assert_abs_diff_eq!(res.fstat, f, epsilon = 1e-9);
        assert_eq!(res.df, (2, 35));
        assert!(res.pvalue > 0.0 && res.pvalue < 1.0);
    }

    #[test]
    fn serial_lm_with_too_many_lags_is_sample_error() {
        let fit = linear_fit(12, 1);
        assert!(matches!(serial_lm(&fit, 9, 0.05), Err(Error::Sample(_))));
        assert!(matches!(serial_lm(&fit, 40, 0.05), Err(Error::Sample(_))));
        assert!(matches!(serial_lm(&fit, 0, 0.05), Err(Error::Domain(_))));
    }

    #[test]
    fn reset_detects_quadratic() {
        let n = 60;
        let x: Vec<f64> = (0..n).map(|t| t as f64 / 10.0).collect();
        let mut r = lcg(9);
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.05 * r()).collect();
        let d = DesignMatrix::from_columns(
            "y",
            y,
            vec![("x".into(), x), (INTERCEPT.into(), vec![1.0; n])],
            1,
        )
        .unwrap();
        let res = ramsey_reset(&fit_ols(&d).unwrap(), 2, 0.05).unwrap();
        assert_eq!(res.verdict, Verdict::Fail);
        assert_eq!(res.df, (1, 57));
    }

    #[test]
    fn bpg_f_form() {
        let fit = linear_fit(50, 5);
        let res = het_test(&fit, HetKind::BreuschPaganGodfrey, 0.05).unwrap();
        assert_eq!(res.df, (2, 47));
        let white = het_test(&fit, HetKind::White, 0.05).unwrap();
        // x, z, x^2, x*z, z^2 plus intercept
        assert_eq!(white.df, (5, 44));
    }

    #[test]
    fn white_with_too_many_columns_is_sample_error() {
        let fit = linear_fit(5, 2);
        assert!(matches!(het_test(&fit, HetKind::White, 0.05), Err(Error::Sample(_))));
    }

    #[test]
    fn exact_fit_cusum_is_flat_and_stable() {
        let n = 20;
        let x: Vec<f64> = (0..n).map(|t| ((t * 7) % 5) as f64 + t as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.7 * v).collect();
        let d = DesignMatrix::from_columns(
            "y",
            y,
            vec![("x".into(), x), (INTERCEPT.into(), vec![1.0; n])],
            2000,
        )
        .unwrap();
        let c = cusum(&d, CusumLevel::Five).unwrap();
        assert!(c.path.iter().all(|&v| v == 0.0));
        assert!(c.stable);
        assert_eq!(c.path.len(), 18);
        assert_eq!(c.periods[0], 2002);
        let m = 18f64;
        assert_abs_diff_eq!(c.upper_bound[17], 3.0 * 0.948 * m.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.upper_bound[0], 0.948 * (m.sqrt() + 2.0 / m.sqrt()), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn verdict_is_threshold_in_level(p in 0.0f64..1.0, level in 0.0f64..1.0) {
            let v = Verdict::from_pvalue(p, level);
            prop_assert_eq!(v == Verdict::Pass, p > level);
        }

        #[test]
        fn cusum_scale_invariant(seed in 0u64..500, c in 0.01f64..1000.0) {
            let fit = linear_fit(30, seed);
            let d = &fit.design;
            let scaled = d.with_response("y", d.response.iter().map(|v| v * c).collect()).unwrap();
            let a = cusum(d, CusumLevel::Five).unwrap();
            let b = cusum(&scaled, CusumLevel::Five).unwrap();
            for (x, y) in a.path.iter().zip(&b.path) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            prop_assert_eq!(&a.upper_bound, &b.upper_bound);
            for (lo, hi) in a.lower_bound.iter().zip(&a.upper_bound) {
                prop_assert_eq!(*lo, -*hi);
            }
        }
    }
}

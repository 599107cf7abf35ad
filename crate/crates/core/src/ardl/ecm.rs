//! Error-correction form of a fitted ARDL, obtained by exact
//! reparameterization rather than a second-stage regression.

use serde::{Deserialize, Serialize};

use super::longrun::long_run;
use super::ArdlModel;
use crate::error::Result;
use crate::linalg::{mat_vec, quad_form};
use crate::probdist::t_two_sided_pvalue;
use crate::series::{build_design, DesignMatrix, DesignOptions, Term};

pub const EC_TERM: &str = "ECM(-1)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcmCoef {
    pub name: String,
    pub coef: f64,
    pub stderr: f64,
    pub tstat: f64,
    pub pvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EcmWarning {
    /// `lambda >= 0`: deviations are not corrected.
    NonConverging,
    /// `lambda < -1`: the adjustment overshoots.
    Overshooting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EcmVerdict {
    NegativeSignificant,
    NegativeInsignificant,
    NonConverging,
    Overshooting,
}

impl EcmVerdict {
    pub fn classify(lambda: f64, pvalue: f64, level: f64) -> Self {
        if lambda >= 0.0 {
            EcmVerdict::NonConverging
        } else if lambda < -1.0 {
            EcmVerdict::Overshooting
        } else if pvalue < level {
            EcmVerdict::NegativeSignificant
        } else {
            EcmVerdict::NegativeInsignificant
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            EcmVerdict::NegativeSignificant => {
                "error-correction coefficient is negative and significant"
            }
            EcmVerdict::NegativeInsignificant => {
                "error-correction coefficient is negative but not significant"
            }
            EcmVerdict::NonConverging => {
                "error-correction coefficient is not negative; no convergence to equilibrium"
            }
            EcmVerdict::Overshooting => "error-correction coefficient is below -1; adjustment overshoots",
        }
    }
}

/// "N% of disequilibrium corrected per period", N = whole percent of `|lambda|`
/// (fraction dropped, so -0.345157 reads 34%).
pub fn correction_text(lambda: f64) -> String {
    let pct = (lambda.abs() * 100.0 + 1e-9).trunc() as i64;
    format!("{pct}% of disequilibrium corrected per period")
}

/// Verdict sentence, with the adjustment share when the coefficient is negative.
pub fn ecm_narrative(lambda: f64, pvalue: f64, level: f64) -> String {
    let verdict = EcmVerdict::classify(lambda, pvalue, level);
    match verdict {
        EcmVerdict::NegativeSignificant | EcmVerdict::NegativeInsignificant => {
            format!("{}; {}", verdict.describe(), correction_text(lambda))
        }
        _ => verdict.describe().to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcmResult {
    pub lambda: f64,
    pub stderr: f64,
    pub tstat: f64,
    pub pvalue: f64,
    /// Differenced terms, lagged dependent differences first.
    pub short_run: Vec<EcmCoef>,
    pub theta: Vec<f64>,
    pub intercept_lr: f64,
    /// Residuals recomputed from the explicit error-correction design.
    pub residuals: Vec<f64>,
    pub warnings: Vec<EcmWarning>,
    pub df: usize,
    #[serde(skip)]
    pub design: DesignMatrix<f64>,
}

impl EcmResult {
    pub fn verdict(&self, level: f64) -> EcmVerdict {
        EcmVerdict::classify(self.lambda, self.pvalue, level)
    }

    pub fn narrative(&self, level: f64) -> String {
        ecm_narrative(self.lambda, self.pvalue, level)
    }

    /// All coefficients in design order, the error-correction term last.
    pub fn coefficients(&self) -> Vec<EcmCoef> {
        let mut out = self.short_run.clone();
        out.push(EcmCoef {
            name: EC_TERM.to_string(),
            coef: self.lambda,
            stderr: self.stderr,
            tstat: self.tstat,
            pvalue: self.pvalue,
        });
        out
    }
}

/// Reparameterizes the fitted ARDL as
/// `D(y) = lambda EC(-1) + sum phi_m D(y(-m)) + sum psi_im D(x_i(-m))`
/// with `EC = y - theta'x - intercept_lr` and `lambda = sum(alpha) - 1`.
/// Coefficients and covariance follow linearly from the ARDL estimates.
pub fn fit_ecm(model: &ArdlModel) -> Result<EcmResult> {
    let lr = long_run(model)?;
    let kk = model.fit.k;
    let p = model.order.p;
    let alpha_idx = model.alpha_idx();
    let dep = model.dep.as_str();

    // rows of the linear map from ARDL coefficients to ECM coefficients
    let mut names = Vec::new();
    let mut terms = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for m in 1..p {
        let mut r = vec![0.0; kk];
        for &j in &alpha_idx[m..] {
            r[j] = -1.0;
        }
        let term = Term::diff(dep, m);
        names.push(term.label());
        terms.push(term);
        rows.push(r);
    }
    for (i, x) in model.regressors.iter().enumerate() {
        let gidx = model.gamma_idx(i);
        let q = model.order.q[i];
        for m in 0..q.max(1) {
            let mut r = vec![0.0; kk];
            if m == 0 {
                r[gidx[0]] = 1.0;
            } else {
                for &j in &gidx[m + 1..] {
                    r[j] = -1.0;
                }
            }
            let term = Term::diff(x.as_str(), m);
            names.push(term.label());
            terms.push(term);
            rows.push(r);
        }
    }
    let mut lam_row = vec![0.0; kk];
    for &j in &alpha_idx {
        lam_row[j] = 1.0;
    }

    let b = &model.fit.coef;
    let cov = &model.fit.cov;
    let df = model.fit.df_resid();
    let coef_of = |r: &[f64]| r.iter().zip(b).map(|(a, c)| a * c).sum::<f64>();
    let se_of = |r: &[f64]| quad_form(cov, r).max(0.0).sqrt();

    let short_run: Vec<EcmCoef> = names
        .iter()
        .zip(&rows)
        .map(|(name, r)| {
            let coef = coef_of(r);
            let stderr = se_of(r);
            let tstat = coef / stderr;
            EcmCoef {
                name: name.clone(),
                coef,
                stderr,
                tstat,
                pvalue: t_two_sided_pvalue(tstat, df as f64),
            }
        })
        .collect();
    let lambda = coef_of(&lam_row) - 1.0;
    let stderr = se_of(&lam_row);
    let tstat = lambda / stderr;

    // explicit design on the ARDL sample
    let ds = &model.data;
    let offset = (model.sample.0 - ds.start()) as usize;
    let mut level_terms = vec![Term::level(dep, 1)];
    level_terms.extend(model.regressors.iter().map(|x| Term::level(x.as_str(), 1)));
    let all_terms: Vec<Term> = terms.iter().cloned().chain(level_terms.iter().cloned()).collect();
    let raw = build_design(
        ds,
        &Term::diff(dep, 0),
        &all_terms,
        DesignOptions {
            intercept: false,
            trend: false,
            min_offset: offset,
        },
    )?;
    let n = raw.nrows();
    let nshort = terms.len();
    let ec: Vec<f64> = (0..n)
        .map(|t| {
            let mut v = raw.columns[nshort][t] - lr.intercept_lr;
            for (i, th) in lr.theta.iter().enumerate() {
                v -= th * raw.columns[nshort + 1 + i][t];
            }
            v
        })
        .collect();
    let mut cols: Vec<(String, Vec<f64>)> = names
        .iter()
        .cloned()
        .zip(raw.columns[..nshort].iter().cloned())
        .collect();
    cols.push((EC_TERM.to_string(), ec));
    let design = DesignMatrix::from_columns(raw.response_name.clone(), raw.response.clone(), cols, raw.first_period)?;
    let mut bvec: Vec<f64> = short_run.iter().map(|c| c.coef).collect();
    bvec.push(lambda);
    let fitted = mat_vec(&design.columns, &bvec);
    let residuals: Vec<f64> = design.response.iter().zip(&fitted).map(|(y, f)| y - f).collect();

    let mut warnings = Vec::new();
    if lambda >= 0.0 {
        warnings.push(EcmWarning::NonConverging);
    } else if lambda < -1.0 {
        warnings.push(EcmWarning::Overshooting);
    }
    Ok(EcmResult {
        lambda,
        stderr,
        tstat,
        pvalue: t_two_sided_pvalue(tstat, df as f64),
        short_run,
        theta: lr.theta,
        intercept_lr: lr.intercept_lr,
        residuals,
        warnings,
        df,
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ardl::{fit_ardl, ArdlOrder};
    use crate::series::{Dataset, TimeSeries};
    use approx::assert_abs_diff_eq;

    #[test]
    fn narrative_uses_whole_percent() {
        assert_eq!(correction_text(-0.345157), "34% of disequilibrium corrected per period");
        assert_eq!(correction_text(-0.5), "50% of disequilibrium corrected per period");
        assert_eq!(
            ecm_narrative(-0.345157, 0.0, 0.05),
            "error-correction coefficient is negative and significant; 34% of disequilibrium corrected per period"
        );
    }

    #[test]
    fn verdict_classes() {
        assert_eq!(EcmVerdict::classify(0.2, 0.01, 0.05), EcmVerdict::NonConverging);
        assert_eq!(EcmVerdict::classify(-1.3, 0.01, 0.05), EcmVerdict::Overshooting);
        assert_eq!(EcmVerdict::classify(-0.3, 0.20, 0.05), EcmVerdict::NegativeInsignificant);
    }

    fn ecm_data(n: usize, lambda: f64) -> Dataset<f64> {
        // D(y) = lambda (y(-1) - x(-1)), x deterministic but not collinear
        let x: Vec<f64> = (0..n).map(|t| (t as f64 * 0.45).sin() * 2.0 + (t as f64 * 0.13).cos()).collect();
        let mut y = vec![0.7];
        for t in 1..n {
            y.push(y[t - 1] + lambda * (y[t - 1] - x[t - 1]));
        }
        Dataset::new(vec![
            TimeSeries::new("Y", 1, y).unwrap(),
            TimeSeries::new("X", 1, x).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn exact_ecm_dgp() {
        // ARDL(1,1): y = 0.5 y(-1) + 0 x + 0.5 x(-1)
        let ds = ecm_data(30, -0.5);
        let m = fit_ardl(&ds, "Y", &["X"], &ArdlOrder::new(1, vec![1]).unwrap()).unwrap();
        let e = fit_ecm(&m).unwrap();
        assert_abs_diff_eq!(e.lambda, -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(e.theta[0], 1.0, epsilon = 1e-9);
        assert!(e.warnings.is_empty());
        assert_eq!(e.design.names, vec!["D(X)", "ECM(-1)"]);
    }

    #[test]
    fn positive_lambda_warns() {
        let ds = ecm_data(20, 0.2);
        let m = fit_ardl(&ds, "Y", &["X"], &ArdlOrder::new(1, vec![1]).unwrap()).unwrap();
        let e = fit_ecm(&m).unwrap();
        assert_abs_diff_eq!(e.lambda, 0.2, epsilon = 1e-8);
        assert_eq!(e.warnings, vec![EcmWarning::NonConverging]);
    }

    #[test]
    fn residuals_and_identity_on_richer_order() {
        let n = 45;
        let x1: Vec<f64> = (0..n).map(|t| (t as f64 * 0.8).sin() + 0.04 * t as f64).collect();
        let x2: Vec<f64> = (0..n).map(|t| (t as f64 * 0.33).cos() * 1.5).collect();
        let mut y = vec![0.1, 0.3, 0.2];
        for t in 3..n {
            let e = ((t * 37) % 11) as f64 / 11.0 - 0.5;
            y.push(0.4 + 0.45 * y[t - 1] + 0.15 * y[t - 2] - 0.1 * y[t - 3] + 0.3 * x1[t] - 0.1 * x1[t - 2] + 0.25 * x2[t] + 0.2 * e);
        }
        let ds = Dataset::new(vec![
            TimeSeries::new("Y", 1, y).unwrap(),
            TimeSeries::new("X1", 1, x1).unwrap(),
            TimeSeries::new("X2", 1, x2).unwrap(),
        ])
        .unwrap();
        let m = fit_ardl(&ds, "Y", &["X1", "X2"], &ArdlOrder::new(3, vec![2, 0]).unwrap()).unwrap();
        let e = fit_ecm(&m).unwrap();
        assert_abs_diff_eq!(e.lambda, m.sum_alpha() - 1.0, epsilon = 1e-12);
        assert_eq!(
            e.design.names,
            vec!["D(Y(-1))", "D(Y(-2))", "D(X1)", "D(X1(-1))", "D(X2)", "ECM(-1)"]
        );
        for (a, b) in e.residuals.iter().zip(&m.fit.residuals) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        // with every regressor lagged, the ECM columns lie in the ARDL column
        // space, so explicit OLS on them reproduces the mapped coefficients
        let m = fit_ardl(&ds, "Y", &["X1", "X2"], &ArdlOrder::new(3, vec![2, 1]).unwrap()).unwrap();
        let e = fit_ecm(&m).unwrap();
        let refit = crate::ols::fit_ols(&e.design).unwrap();
        for (c, r) in e.coefficients().iter().zip(&refit.coef) {
            assert_abs_diff_eq!(c.coef, r, epsilon = 1e-8);
        }
    }
}

//! Long-run (equilibrium) coefficients with delta-method standard errors.

use serde::Serialize;

use super::ArdlModel;
use crate::error::{Error, Result};
use crate::linalg::quad_form;
use crate::probdist::t_two_sided_pvalue;

/// Below this `|1 - sum(alpha)|` the long-run solution is treated as missing.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRunCoeffs {
    pub names: Vec<String>,
    pub theta: Vec<f64>,
    pub stderr: Vec<f64>,
    pub tstat: Vec<f64>,
    pub pvalue: Vec<f64>,
    pub intercept_lr: f64,
    pub intercept_stderr: f64,
    pub intercept_tstat: f64,
    pub intercept_pvalue: f64,
    /// Residual degrees of freedom of the ARDL fit.
    pub df: usize,
}

/// Gradients of every long-run quantity with respect to the ARDL coefficient
/// vector: one row per regressor, then the intercept.
pub(crate) fn gradients(model: &ArdlModel) -> Result<Vec<Vec<f64>>> {
    let k = model.fit.k;
    let denom = 1.0 - model.sum_alpha();
    if denom.abs() < SINGULAR_TOL {
        return Err(Error::SingularLongRun(denom));
    }
    let mut rows = Vec::with_capacity(model.regressors.len() + 1);
    for i in 0..model.regressors.len() {
        let sum_gamma: f64 = model.gamma(i).iter().sum();
        let mut g = vec![0.0; k];
        for j in model.alpha_idx() {
            g[j] = sum_gamma / (denom * denom);
        }
        for j in model.gamma_idx(i) {
            g[j] = 1.0 / denom;
        }
        rows.push(g);
    }
    let c = model.intercept();
    let mut g = vec![0.0; k];
    for j in model.alpha_idx() {
        g[j] = c / (denom * denom);
    }
    g[model.intercept_idx()] = 1.0 / denom;
    rows.push(g);
    Ok(rows)
}

/// `theta_i = sum(gamma_i) / (1 - sum(alpha))`, intercept `c / (1 - sum(alpha))`.
pub fn long_run(model: &ArdlModel) -> Result<LongRunCoeffs> {
    let grads = gradients(model)?;
    let denom = 1.0 - model.sum_alpha();
    let df = model.fit.df_resid();
    let cov = &model.fit.cov;
    let se = |g: &[f64]| quad_form(cov, g).max(0.0).sqrt();

    let theta: Vec<f64> = (0..model.regressors.len())
        .map(|i| model.gamma(i).iter().sum::<f64>() / denom)
        .collect();
    let stderr: Vec<f64> = grads[..theta.len()].iter().map(|g| se(g)).collect();
    let tstat: Vec<f64> = theta.iter().zip(&stderr).map(|(b, s)| b / s).collect();
    let pvalue = tstat
        .iter()
        .map(|&t| t_two_sided_pvalue(t, df as f64))
        .collect();

    let intercept_lr = model.intercept() / denom;
    let intercept_stderr = se(&grads[theta.len()]);
    let intercept_tstat = intercept_lr / intercept_stderr;
    Ok(LongRunCoeffs {
        names: model.regressors.clone(),
        theta,
        stderr,
        tstat,
        pvalue,
        intercept_lr,
        intercept_stderr,
        intercept_tstat,
        intercept_pvalue: t_two_sided_pvalue(intercept_tstat, df as f64),
        df,
    })
}

//! ARDL(p, q_1..q_k) estimation, order selection, long-run coefficients, the
//! bounds test and the error-correction form.

pub mod bounds;
pub mod ecm;
pub mod longrun;

pub use bounds::{
    bounds_test, bounds_test_at, bounds_verdict, pesaran_bounds, BoundsCase, BoundsResult,
    BoundsRow, BoundsVerdict, LevelDecision, Significance,
};
pub use ecm::{fit_ecm, EcmResult, EcmVerdict, EcmWarning};
pub use longrun::{long_run, LongRunCoeffs};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{fit_ols, OlsFit};
use crate::series::{build_design, Dataset, DesignMatrix, DesignOptions, Term, INTERCEPT};
use crate::unitroot::Criterion;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArdlOrder {
    pub p: usize,
    pub q: Vec<usize>,
}

impl ArdlOrder {
    pub fn new(p: usize, q: Vec<usize>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Domain(
                "ARDL order needs at least one lag of the dependent variable (p >= 1)".into(),
            ));
        }
        Ok(Self { p, q })
    }

    /// Intercept, `p` own lags and `q_i + 1` terms per regressor.
    pub fn coef_count(&self) -> usize {
        1 + self.p + self.q.iter().map(|q| q + 1).sum::<usize>()
    }

    pub fn max_lag(&self) -> usize {
        self.q.iter().copied().chain([self.p]).max().unwrap_or(self.p)
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Domain("p must be at least 1".into()));
        }
        if self.q.len() != k {
            return Err(Error::Domain(format!(
                "order has {} regressor lags for {k} regressors",
                self.q.len()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ArdlOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARDL({}", self.p)?;
        for q in &self.q {
            write!(f, ", {q}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArdlModel {
    pub order: ArdlOrder,
    pub dep: String,
    pub regressors: Vec<String>,
    pub fit: OlsFit<f64>,
    /// First and last period of the estimation sample.
    pub sample: (i32, i32),
    #[serde(skip)]
    pub data: Dataset<f64>,
}

impl ArdlModel {
    /// Coefficients on `dep(-1)..dep(-p)`.
    pub fn alpha(&self) -> Vec<f64> {
        self.alpha_idx().into_iter().map(|i| self.fit.coef[i]).collect()
    }

    /// Coefficients on `x, x(-1)..x(-q_i)` for regressor `i`.
    pub fn gamma(&self, i: usize) -> Vec<f64> {
        self.gamma_idx(i).into_iter().map(|j| self.fit.coef[j]).collect()
    }

    pub fn intercept(&self) -> f64 {
        self.fit.coef[self.intercept_idx()]
    }

    pub fn sum_alpha(&self) -> f64 {
        self.alpha().iter().sum()
    }

    pub(crate) fn alpha_idx(&self) -> Vec<usize> {
        (0..self.order.p).collect()
    }

    pub(crate) fn gamma_idx(&self, i: usize) -> Vec<usize> {
        let start = self.order.p + self.order.q[..i].iter().map(|q| q + 1).sum::<usize>();
        (start..=start + self.order.q[i]).collect()
    }

    pub(crate) fn intercept_idx(&self) -> usize {
        self.fit.k - 1
    }

    /// True when every root of `1 - a_1 z - .. - a_p z^p` lies outside the
    /// unit circle.
    pub fn is_stable(&self) -> bool {
        ar_stable(&self.alpha())
    }
}

/// Schur-Cohn step-down on the reversed lag polynomial: stable iff every
/// reflection coefficient has modulus below one.
pub fn ar_stable(alpha: &[f64]) -> bool {
    // z^p - a_1 z^{p-1} - .. - a_p, stored as [1, -a_1, .., -a_p]
    let mut a: Vec<f64> = std::iter::once(1.0).chain(alpha.iter().map(|v| -v)).collect();
    while a.len() > 1 {
        let m = a.len() - 1;
        let k = a[m];
        if k.abs() >= 1.0 {
            return false;
        }
        let d = 1.0 - k * k;
        a = (0..m).map(|i| (a[i] - k * a[m - i]) / d).collect();
    }
    true
}

pub(crate) fn ardl_terms(dep: &str, regressors: &[String], order: &ArdlOrder) -> Vec<Term> {
    let mut terms: Vec<Term> = (1..=order.p).map(|j| Term::level(dep, j)).collect();
    for (x, &q) in regressors.iter().zip(&order.q) {
        terms.extend((0..=q).map(|m| Term::level(x.as_str(), m)));
    }
    terms
}

pub(crate) fn ardl_design(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[String],
    order: &ArdlOrder,
    min_offset: usize,
) -> Result<DesignMatrix<f64>> {
    order.check(regressors.len())?;
    let terms = ardl_terms(dep, regressors, order);
    let opts = DesignOptions {
        intercept: true,
        trend: false,
        min_offset,
    };
    build_design(ds, &Term::level(dep, 0), &terms, opts)
}

fn to_names(regressors: &[impl AsRef<str>]) -> Vec<String> {
    regressors.iter().map(|r| r.as_ref().to_string()).collect()
}

/// OLS on `dep(-1..-p)`, `x_i, x_i(-1)..x_i(-q_i)` and an intercept (last).
pub fn fit_ardl(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[impl AsRef<str>],
    order: &ArdlOrder,
) -> Result<ArdlModel> {
    fit_ardl_from(ds, dep, &to_names(regressors), order, 0)
}

pub(crate) fn fit_ardl_from(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[String],
    order: &ArdlOrder,
    min_offset: usize,
) -> Result<ArdlModel> {
    let design = ardl_design(ds, dep, regressors, order, min_offset)?;
    debug_assert_eq!(design.names.last().map(String::as_str), Some(INTERCEPT));
    let sample = (design.first_period, design.last_period);
    let fit = fit_ols(&design)?;
    Ok(ArdlModel {
        order: order.clone(),
        dep: dep.to_string(),
        regressors: regressors.to_vec(),
        fit,
        sample,
        data: ds.clone(),
    })
}

/// Every `(p, q)` with `p` in `1..=p_max` and each `q_i` in `0..=q_max`.
pub fn order_grid(k: usize, p_max: usize, q_max: usize) -> Vec<ArdlOrder> {
    let base = q_max + 1;
    let per_p = base.pow(k as u32);
    let mut out = Vec::with_capacity(p_max * per_p);
    for p in 1..=p_max {
        for code in 0..per_p {
            // most significant digit is the first regressor
            let mut rest = code;
            let mut q = vec![0usize; k];
            for slot in q.iter_mut().rev() {
                *slot = rest % base;
                rest /= base;
            }
            out.push(ArdlOrder { p, q });
        }
    }
    out
}

/// `true` if candidate `a` should replace `b`: strictly lower criterion, or
/// equal criterion with fewer parameters, or equal on both and
/// lexicographically smaller `(p, q)`.
pub fn prefer(a: (&ArdlOrder, f64), b: (&ArdlOrder, f64)) -> bool {
    let (oa, ca) = a;
    let (ob, cb) = b;
    if ca != cb {
        return ca < cb;
    }
    let (na, nb) = (oa.coef_count(), ob.coef_count());
    if na != nb {
        return na < nb;
    }
    (oa.p, &oa.q) < (ob.p, &ob.q)
}

/// One row of the selection table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub order: ArdlOrder,
    /// `None` if the fit failed.
    pub criterion: Option<f64>,
}

/// All grid candidates fitted on the common sample, in grid order.
pub fn order_table(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[impl AsRef<str>],
    p_max: usize,
    q_max: usize,
    criterion: Criterion,
) -> Result<Vec<Candidate>> {
    if p_max == 0 {
        return Err(Error::Domain("p_max must be at least 1".into()));
    }
    let regs = to_names(regressors);
    let grid = order_grid(regs.len(), p_max, q_max);
    let offset = p_max.max(q_max);
    Ok(grid
        .into_par_iter()
        .map(|order| {
            let value = fit_ardl_from(ds, dep, &regs, &order, offset)
                .ok()
                .map(|m| criterion.of(&m.fit));
            Candidate {
                order,
                criterion: value,
            }
        })
        .collect())
}

/// Criterion-minimizing order over the grid; see [`prefer`] for ties.
pub fn select_order(
    ds: &Dataset<f64>,
    dep: &str,
    regressors: &[impl AsRef<str>],
    p_max: usize,
    q_max: usize,
    criterion: Criterion,
) -> Result<ArdlOrder> {
    let table = order_table(ds, dep, regressors, p_max, q_max, criterion)?;
    best_of(&table).cloned().ok_or_else(|| {
        Error::Sample(format!(
            "no estimable ARDL order with p_max={p_max}, q_max={q_max}"
        ))
    })
}

pub fn best_of(table: &[Candidate]) -> Option<&ArdlOrder> {
    table
        .iter()
        .filter_map(|c| c.criterion.filter(|v| v.is_finite()).map(|v| (&c.order, v)))
        .fold(None, |best, cand| match best {
            Some(b) if !prefer(cand, b) => Some(b),
            _ => Some(cand),
        })
        .map(|(o, _)| o)
}

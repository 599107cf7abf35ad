//! Ordinary least squares by Householder QR, with classical covariance,
//! per-observation information criteria and recursive residuals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, mat_vec, Qr};
use crate::probdist::t_two_sided_pvalue;
use crate::scalar::Scalar;
use crate::series::DesignMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct OlsFit<T> {
    pub names: Vec<String>,
    pub coef: Vec<T>,
    pub stderr: Vec<T>,
    pub tstat: Vec<T>,
    /// Two-sided, Student-t with `n - k` degrees of freedom.
    pub pvalue: Vec<T>,
    /// Classical covariance `sigma2 (X'X)^{-1}`, row-major.
    pub cov: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub fitted: Vec<T>,
    pub rss: T,
    /// `rss / (n - k)`.
    pub sigma2: T,
    pub loglik: T,
    /// `-2 loglik / n + 2 k / n`
    pub aic: T,
    /// `-2 loglik / n + k ln(n) / n`
    pub sic: T,
    pub hq: T,
    pub r2: T,
    pub r2_adj: T,
    pub durbin_watson: T,
    pub n: usize,
    pub k: usize,
    #[serde(skip)]
    pub design: DesignMatrix<T>,
}

impl<T: Scalar> OlsFit<T> {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef_of(&self, name: &str) -> Option<T> {
        self.index_of(name).map(|i| self.coef[i])
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.k
    }

    /// F statistic for all non-constant regressors jointly zero, with its
    /// degrees of freedom. Assumes the design carries an intercept.
    pub fn regression_f(&self) -> (T, usize, usize) {
        let df1 = self.k.saturating_sub(1);
        let df2 = self.df_resid();
        let one = T::one();
        let f = (self.r2 / T::from_count(df1.max(1)))
            / ((one - self.r2) / T::from_count(df2));
        (f, df1, df2)
    }
}

/// Least-squares fit of `design.response` on `design.columns`.
pub fn fit_ols<T: Scalar>(design: &DesignMatrix<T>) -> Result<OlsFit<T>> {
    let n = design.nrows();
    let k = design.ncols();
    let qr = factor(design)?;
    let y = &design.response;
    let coef = qr.solve(y);
    let fitted = mat_vec(&design.columns, &coef);
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let rss: T = residuals.iter().map(|&e| e * e).sum();
    let nf = T::from_count(n);
    let kf = T::from_count(k);
    let sigma2 = rss / T::from_count(n - k);
    let xtx_inv = qr.xtx_inverse();
    let cov: Vec<Vec<T>> = xtx_inv
        .iter()
        .map(|row| row.iter().map(|&v| v * sigma2).collect())
        .collect();
    let stderr: Vec<T> = (0..k).map(|i| cov[i][i].max(T::zero()).sqrt()).collect();
    let tstat: Vec<T> = coef.iter().zip(&stderr).map(|(&b, &s)| b / s).collect();
    let df = (n - k) as f64;
    let pvalue = tstat
        .iter()
        .map(|t| T::lit(t_two_sided_pvalue(t.to_f64_lossy(), df)))
        .collect();

    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let loglik = -half * nf * (T::one() + two_pi.ln() + (rss / nf).ln());
    let aic = -two * loglik / nf + two * kf / nf;
    let sic = -two * loglik / nf + kf * nf.ln() / nf;
    let hq = -two * loglik / nf + two * kf * nf.ln().ln() / nf;

    let mean = y.iter().copied().sum::<T>() / nf;
    let tss: T = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let r2 = if tss > T::zero() {
        T::one() - rss / tss
    } else if rss == T::zero() {
        T::one()
    } else {
        T::zero()
    };
    let r2_adj = T::one() - (T::one() - r2) * T::from_count(n - 1) / T::from_count(n - k);
    let dw_num: T = residuals.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    let durbin_watson = if rss > T::zero() { dw_num / rss } else { T::zero() };

    Ok(OlsFit {
        names: design.names.clone(),
        coef,
        stderr,
        tstat,
        pvalue,
        cov,
        residuals,
        fitted,
        rss,
        sigma2,
        loglik,
        aic,
        sic,
        hq,
        r2,
        r2_adj,
        durbin_watson,
        n,
        k,
        design: design.clone(),
    })
}

fn factor<T: Scalar>(design: &DesignMatrix<T>) -> Result<Qr<T>> {
    let n = design.nrows();
    let k = design.ncols();
    if n <= k {
        return Err(Error::Sample(format!("{n} observations for {k} regressors")));
    }
    Qr::new(&design.columns).map_err(|e| Error::Rank {
        column: design.names[e.0.min(k - 1)].clone(),
    })
}

/// Residual sum of squares only; skips covariance and inference.
pub fn residual_ss<T: Scalar>(design: &DesignMatrix<T>) -> Result<T> {
    let qr = factor(design)?;
    Ok(qr.qt_mul(&design.response)[design.ncols()..]
        .iter()
        .map(|&v| v * v)
        .sum())
}

/// Coefficient and t-ratio of one column, without the rest of the fit.
pub fn t_ratio<T: Scalar>(design: &DesignMatrix<T>, column: usize) -> Result<(T, T)> {
    let qr = factor(design)?;
    let n = design.nrows();
    let k = design.ncols();
    let qty = qr.qt_mul(&design.response);
    let rss: T = qty[k..].iter().map(|&v| v * v).sum();
    let coef = qr.solve(&design.response)[column];
    let mut e = vec![T::zero(); k];
    e[column] = T::one();
    let var = rss / T::from_count(n - k) * qr.leverage(&e);
    Ok((coef, coef / var.sqrt()))
}

/// Standardized one-step-ahead prediction errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursiveResiduals<T> {
    pub values: Vec<T>,
    /// Row of the design the first residual belongs to. Equals the column
    /// count unless the leading block was singular and had to be extended.
    pub first_row: usize,
}

impl<T: Scalar> RecursiveResiduals<T> {
    /// Number of rows the start was moved forward past `k`.
    pub fn shift(&self, k: usize) -> usize {
        self.first_row - k
    }
}

/// `w_t = (y_t - x_t' b_{t-1}) / sqrt(1 + x_t' (X_{t-1}' X_{t-1})^{-1} x_t)`
/// where `b_{t-1}` is fitted on rows before `t`.
pub fn recursive_residuals<T: Scalar>(design: &DesignMatrix<T>) -> Result<RecursiveResiduals<T>> {
    let n = design.nrows();
    let k = design.ncols();
    if n <= k {
        return Err(Error::Sample(format!(
            "recursive residuals need more than {k} rows, got {n}"
        )));
    }
    let prefix = |rows: usize| -> Vec<Vec<T>> {
        design.columns.iter().map(|c| c[..rows].to_vec()).collect()
    };
    let mut start = k;
    while Qr::new(&prefix(start)).is_err() {
        start += 1;
        if start >= n {
            return Err(Error::Rank {
                column: design.names[k - 1].clone(),
            });
        }
    }
    let mut values = Vec::with_capacity(n - start);
    for t in start..n {
        let qr = Qr::new(&prefix(t)).map_err(|e| Error::Rank {
            column: design.names[e.0.min(k - 1)].clone(),
        })?;
        let b = qr.solve(&design.response[..t]);
        let x = design.row(t);
        let err = design.response[t] - dot(&x, &b);
        let f = T::one() + qr.leverage(&x);
        values.push(err / f.sqrt());
    }
    Ok(RecursiveResiduals {
        values,
        first_row: start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn design(y: Vec<f64>, cols: Vec<(&str, Vec<f64>)>) -> DesignMatrix<f64> {
        DesignMatrix::from_columns(
            "y",
            y,
            cols.into_iter().map(|(n, c)| (n.to_string(), c)).collect(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn exact_line() {
        let d = design(
            vec![1.0, 2.0, 3.0],
            vec![("C", vec![1.0; 3]), ("t", vec![1.0, 2.0, 3.0])],
        );
        let fit = fit_ols(&d).unwrap();
        assert_abs_diff_eq!(fit.coef[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coef[1], 1.0, epsilon = 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert_abs_diff_eq!(fit.r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn through_origin() {
        let d = design(vec![2.0, 4.0, 6.0, 8.0], vec![("x", vec![1.0, 2.0, 3.0, 4.0])]);
        assert_abs_diff_eq!(fit_ols(&d).unwrap().coef[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn hand_solved_normal_equations() {
        // sum x = 15, sum y = 14, sum xy = 52, sum x^2 = 55
        let d = design(
            vec![1.0, 2.0, 2.0, 4.0, 5.0],
            vec![("C", vec![1.0; 5]), ("x", vec![1.0, 2.0, 3.0, 4.0, 5.0])],
        );
        let fit = fit_ols(&d).unwrap();
        assert_abs_diff_eq!(fit.coef[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coef[0], -0.2, epsilon = 1e-12);
        // t * se = coef
        for i in 0..2 {
            assert_abs_diff_eq!(fit.tstat[i] * fit.stderr[i], fit.coef[i], epsilon = 1e-10);
        }
        assert!(fit.r2 >= 0.0 && fit.r2 <= 1.0);
    }

    #[test]
    fn rank_error_names_column() {
        let d = design(
            vec![1.0, 2.0, 2.0, 4.0, 5.0],
            vec![
                ("C", vec![1.0; 5]),
                ("x", vec![1.0, 2.0, 3.0, 4.0, 5.0]),
                ("x2", vec![2.0, 4.0, 6.0, 8.0, 10.0]),
            ],
        );
        assert_eq!(fit_ols(&d).unwrap_err(), Error::Rank { column: "x2".into() });
    }

    #[test]
    fn light_paths_agree_with_full_fit() {
        let d = design(
            vec![1.0, 2.0, 2.0, 4.0, 5.0, 4.5],
            vec![
                ("C", vec![1.0; 6]),
                ("x", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
                ("z", vec![0.3, -1.0, 0.2, 0.8, -0.4, 0.1]),
            ],
        );
        let fit = fit_ols(&d).unwrap();
        assert_abs_diff_eq!(residual_ss(&d).unwrap(), fit.rss, epsilon = 1e-12);
        for j in 0..3 {
            let (b, t) = t_ratio(&d, j).unwrap();
            assert_abs_diff_eq!(b, fit.coef[j], epsilon = 1e-12);
            assert_abs_diff_eq!(t, fit.tstat[j], epsilon = 1e-10);
        }
    }

    #[test]
    fn too_few_rows() {
        let d = design(vec![1.0, 2.0], vec![("a", vec![1.0, 2.0]), ("b", vec![3.0, 1.0])]);
        assert!(matches!(fit_ols(&d), Err(Error::Sample(_))));
    }

    #[test]
    fn recursive_residuals_of_exact_line_vanish() {
        let t: Vec<f64> = (1..=8).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|v| 3.0 + 0.5 * v).collect();
        let d = design(y, vec![("C", vec![1.0; 8]), ("t", t)]);
        let rr = recursive_residuals(&d).unwrap();
        assert_eq!(rr.values.len(), 6);
        assert!(rr.values.iter().all(|w| w.abs() < 1e-10));
    }

    #[test]
    fn single_recursive_residual_at_boundary() {
        let d = design(
            vec![1.0, 3.0, 2.0],
            vec![("C", vec![1.0; 3]), ("t", vec![1.0, 2.0, 3.0])],
        );
        let rr = recursive_residuals(&d).unwrap();
        assert_eq!(rr.values.len(), 1);
        // b from first two rows: y = -1 + 2t -> predicts 5 at t=3; leverage of
        // [1,3] on rows {[1,1],[1,2]} is 5, so w = (2-5)/sqrt(6)
        assert_abs_diff_eq!(rr.values[0], -3.0 / 6f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn singular_leading_block_shifts_start() {
        // first two rows identical in x
        let d = design(
            vec![1.0, 1.5, 2.0, 4.0, 3.0, 5.0],
            vec![("C", vec![1.0; 6]), ("x", vec![1.0, 1.0, 2.0, 3.0, 4.0, 5.0])],
        );
        let rr = recursive_residuals(&d).unwrap();
        assert_eq!(rr.first_row, 3);
        assert_eq!(rr.shift(2), 1);
        assert_eq!(rr.values.len(), 3);
    }

    #[test]
    fn never_invertible_is_rank_error() {
        let d = design(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![("C", vec![1.0; 4]), ("x", vec![1.0; 4])],
        );
        assert!(matches!(recursive_residuals(&d), Err(Error::Rank { .. })));
    }

    #[test]
    fn single_precision_fit() {
        let d = DesignMatrix::from_columns(
            "y",
            vec![1.0f32, 2.0, 2.0, 4.0, 5.0],
            vec![
                ("C".to_string(), vec![1.0; 5]),
                ("x".to_string(), vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            ],
            1,
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        assert!((fit.coef[1] - 1.0).abs() < 1e-5);
        assert!((fit.coef[0] + 0.2).abs() < 1e-5);
    }
}

use ardl_core::mc::Innovations;
use ardl_core::ols::{fit_ols, recursive_residuals};
use ardl_core::series::DesignMatrix;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Random well-conditioned design: intercept plus `k - 1` normal columns.
fn random_design(n: usize, k: usize, seed: u64, scale: f64) -> DesignMatrix<f64> {
    let mut rng = Innovations::new(seed, 7);
    let mut cols = vec![("C".to_string(), vec![1.0; n])];
    for j in 1..k {
        cols.push((format!("X{j}"), rng.normals(n)));
    }
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = cols.iter().enumerate().map(|(j, (_, c))| (j as f64 + 0.5) * c[i]).sum();
            scale * (signal + rng.normal())
        })
        .collect();
    DesignMatrix::from_columns("Y", y, cols, 1).unwrap()
}

/// `(X'X)^{-1} X'y` by an explicit Cholesky solve.
fn normal_equations(d: &DesignMatrix<f64>) -> Vec<f64> {
    let n = d.nrows();
    let k = d.ncols();
    let x = DMatrix::from_fn(n, k, |i, j| d.columns[j][i]);
    let y = DVector::from_column_slice(&d.response);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    xtx.cholesky().expect("well conditioned").solve(&xty).iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_fit_matches_normal_equations(seed in any::<u64>(), n in 12usize..=50, k in 1usize..=6) {
        let d = random_design(n, k, seed, 1.0);
        let fit = fit_ols(&d).unwrap();
        let oracle = normal_equations(&d);
        for (a, b) in fit.coef.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
        let scale = d.response.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for col in &d.columns {
            let xu: f64 = col.iter().zip(&fit.residuals).map(|(x, u)| x * u).sum();
            prop_assert!(xu.abs() <= 1e-8 * scale * n as f64);
        }
    }

    #[test]
    fn recursive_residuals_square_to_rss(seed in any::<u64>(), n in 10usize..=60, k in 1usize..=5) {
        let d = random_design(n, k, seed, 1.0);
        let fit = fit_ols(&d).unwrap();
        let rr = recursive_residuals(&d).unwrap();
        let ss: f64 = rr.values.iter().map(|w| w * w).sum();
        prop_assert!((ss - fit.rss).abs() <= 1e-8 * fit.rss.max(1.0), "{ss} vs {}", fit.rss);
    }

    #[test]
    fn scale_equivariance(seed in any::<u64>(), n in 12usize..=40, k in 1usize..=5) {
        let c = 1e6;
        let base = random_design(n, k, seed, 1.0);
        let scaled = base.with_response("Y", base.response.iter().map(|v| v * c).collect()).unwrap();
        let a = fit_ols(&base).unwrap();
        let b = fit_ols(&scaled).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-8 * (1.0 + y.abs());
        for j in 0..k {
            prop_assert!(close(b.coef[j] / c, a.coef[j]));
            prop_assert!(close(b.stderr[j] / c, a.stderr[j]));
            prop_assert!(close(b.tstat[j], a.tstat[j]));
        }
        for (u, v) in b.residuals.iter().zip(&a.residuals) {
            prop_assert!(close(u / c, *v));
        }
        prop_assert!(close(b.r2, a.r2));
    }

    #[test]
    fn sic_at_least_aic_from_eight_rows(seed in any::<u64>(), n in 8usize..=80, k in 1usize..=4) {
        let fit = fit_ols(&random_design(n, k, seed, 1.0)).unwrap();
        prop_assert!(fit.sic >= fit.aic);
    }
}

//! Seeded Monte Carlo: Dickey-Fuller and bounds-test null distributions,
//! empirical quantiles, and synthetic data-generating processes.
//!
//! Replication `i` draws from ChaCha20 seeded with `seed` on stream `i`, so
//! results do not depend on how replications are scheduled across threads.

use std::io::Write;
use std::path::Path;

use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ardl::bounds::{bounds_f, conditional_ecm_design};
use crate::ardl::{ar_stable, ArdlOrder, BoundsCase};
use crate::error::{Error, Result};
use crate::ols::t_ratio;
use crate::probdist::normal_quantile;
use crate::series::{Dataset, DesignMatrix, TimeSeries, INTERCEPT, TREND};
use crate::unitroot::Deterministic;

/// Identifies the random-number scheme; part of every golden Monte Carlo value.
pub const RNG_SCHEME: &str = "chacha20-stream-per-replication/1";

pub const DEFAULT_PROBS: [f64; 9] = [0.01, 0.025, 0.05, 0.10, 0.50, 0.90, 0.95, 0.975, 0.99];

/// Minimum replications for quantile output.
pub const MIN_QUANTILE_REPS: usize = 1000;

/// Uniform and standard normal draws for one replication.
pub struct Innovations {
    rng: ChaCha20Rng,
}

impl Innovations {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal by inversion.
    pub fn normal(&mut self) -> f64 {
        normal_quantile(self.uniform())
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Cumulated normals starting from zero: `n` levels of a driftless walk.
    pub fn random_walk(&mut self, n: usize) -> Vec<f64> {
        let mut level = 0.0;
        (0..n)
            .map(|_| {
                level += self.normal();
                level
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replications: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub probs: Vec<f64>,
}

impl McConfig {
    pub fn new(replications: usize, sample_size: usize, seed: u64) -> Self {
        Self {
            replications,
            sample_size,
            seed,
            probs: DEFAULT_PROBS.to_vec(),
        }
    }

    pub fn with_probs(mut self, probs: &[f64]) -> Self {
        self.probs = probs.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replications must be positive".into()));
        }
        if self.sample_size < 10 {
            return Err(Error::Domain(format!(
                "sample size {} is too small for simulation",
                self.sample_size
            )));
        }
        check_probs(&self.probs)
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Domain("quantile levels must lie in (0, 1)".into()));
    }
    if probs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("quantile levels must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McQuantiles {
    pub probs: Vec<f64>,
    pub values: Vec<f64>,
    pub mc_se: Vec<f64>,
    pub replications: usize,
}

impl McQuantiles {
    pub fn at(&self, prob: f64) -> Option<f64> {
        self.probs
            .iter()
            .position(|&p| (p - prob).abs() < 1e-12)
            .map(|i| self.values[i])
    }

    pub fn se_at(&self, prob: f64) -> Option<f64> {
        self.probs
            .iter()
            .position(|&p| (p - prob).abs() < 1e-12)
            .map(|i| self.mc_se[i])
    }
}

/// Runs `stat` once per replication (in parallel) and returns the statistics
/// in replication order.
pub fn run_replications<F>(replications: usize, seed: u64, stat: F) -> Result<Vec<f64>>
where
    F: Fn(&mut Innovations) -> Result<f64> + Sync,
{
    (0..replications as u64)
        .into_par_iter()
        .map(|i| stat(&mut Innovations::new(seed, i)))
        .collect()
}

/// Linear interpolation between order statistics (sample quantile type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical quantiles with asymptotic standard errors
/// `sqrt(p (1-p) / N) / f(q_p)`, the density estimated by a symmetric
/// difference quotient of the empirical quantile function.
pub fn empirical_quantiles(stats: &[f64], probs: &[f64]) -> Result<McQuantiles> {
    check_probs(probs)?;
    if stats.len() < 2 {
        return Err(Error::Sample("need at least two statistics".into()));
    }
    if stats.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite simulated statistic".into()));
    }
    let mut sorted = stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let values: Vec<f64> = probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect();
    let mc_se = probs
        .iter()
        .map(|&p| {
            let d = 0.01f64.min(p / 2.0).min((1.0 - p) / 2.0);
            let spread = quantile_sorted(&sorted, p + d) - quantile_sorted(&sorted, p - d);
            if spread <= 0.0 {
                return 0.0;
            }
            let density = 2.0 * d / spread;
            (p * (1.0 - p) / n).sqrt() / density
        })
        .collect();
    Ok(McQuantiles {
        probs: probs.to_vec(),
        values,
        mc_se,
        replications: stats.len(),
    })
}

fn check_quantile_config(cfg: &McConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.replications < MIN_QUANTILE_REPS {
        return Err(Error::Domain(format!(
            "quantile output needs at least {MIN_QUANTILE_REPS} replications, got {}",
            cfg.replications
        )));
    }
    Ok(())
}

/// Lag-0 Dickey-Fuller t-ratio for a series under `det`.
pub fn df_t_ratio(y: &[f64], det: Deterministic) -> Result<f64> {
    let n = y.len() - 1;
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut cols = vec![("Y(-1)".to_string(), y[..n].to_vec())];
    if det != Deterministic::None {
        cols.push((INTERCEPT.to_string(), vec![1.0; n]));
    }
    if det == Deterministic::ConstantTrend {
        cols.push((TREND.to_string(), (1..=n).map(|t| t as f64).collect()));
    }
    let design = DesignMatrix::from_columns("D(Y)", dy, cols, 1)?;
    Ok(t_ratio(&design, 0)?.1)
}

/// Raw Dickey-Fuller statistics on driftless random walks.
pub fn df_statistics(cfg: &McConfig, det: Deterministic) -> Result<Vec<f64>> {
    cfg.validate()?;
    run_replications(cfg.replications, cfg.seed, |rng| {
        df_t_ratio(&rng.random_walk(cfg.sample_size), det)
    })
}

pub fn simulate_df(cfg: &McConfig, det: Deterministic) -> Result<McQuantiles> {
    check_quantile_config(cfg)?;
    empirical_quantiles(&df_statistics(cfg, det)?, &cfg.probs)
}

/// Integration order of the simulated regressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polar {
    /// i.i.d. regressors: the lower-bound case.
    I0,
    /// Random-walk regressors: the upper-bound case.
    I1,
}

fn regressor_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("X{i}")).collect()
}

/// Bounds F for a random-walk dependent variable and `k` independent
/// regressors, order `(1, [0; k])`.
pub fn bounds_statistics(cfg: &McConfig, k: usize, case: BoundsCase, polar: Polar) -> Result<Vec<f64>> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::Domain("bounds simulation needs k >= 1".into()));
    }
    let names = regressor_names(k);
    let order = ArdlOrder::new(1, vec![0; k])?;
    let t = cfg.sample_size;
    run_replications(cfg.replications, cfg.seed, |rng| {
        let mut series = vec![TimeSeries::new("Y", 1, rng.random_walk(t))?];
        for name in &names {
            let v = match polar {
                Polar::I1 => rng.random_walk(t),
                Polar::I0 => rng.normals(t),
            };
            series.push(TimeSeries::new(name.as_str(), 1, v)?);
        }
        let ds = Dataset::new(series)?;
        let (design, restricted) = conditional_ecm_design(&ds, "Y", &names, &order, case)?;
        bounds_f(&design, &restricted)
    })
}

pub fn simulate_bounds(cfg: &McConfig, k: usize, case: BoundsCase, polar: Polar) -> Result<McQuantiles> {
    check_quantile_config(cfg)?;
    empirical_quantiles(&bounds_statistics(cfg, k, case, polar)?, &cfg.probs)
}

/// Writes one statistic per line under a `replication,statistic` header.
pub fn write_statistics_csv(path: &Path, stats: &[f64]) -> Result<()> {
    let io = |e: std::io::Error| Error::Ingest(format!("{}: {e}", path.display()));
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "replication,statistic").map_err(io)?;
    for (i, v) in stats.iter().enumerate() {
        writeln!(f, "{i},{v:?}").map_err(io)?;
    }
    f.flush().map_err(io)
}

/// Synthetic data-generating processes. The dependent variable is named
/// `Y`, regressors `X1..Xk`; periods start at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DgpSpec {
    /// `y_t = c + sum alpha_j y_{t-j} + sum_i sum_m gamma_im x_{i,t-m} + sigma e_t`
    /// with AR(1) regressors `x_t = x_ar x_{t-1} + v_t`.
    Ardl {
        alpha: Vec<f64>,
        gamma: Vec<Vec<f64>>,
        intercept: f64,
        sigma: f64,
        x_ar: f64,
    },
    /// `k + 1` independent driftless random walks.
    RandomWalk { k: usize },
    /// `D(y_t) = lambda (y_{t-1} - theta' x_{t-1} - mu) + sigma e_t`, random-walk regressors.
    Ecm {
        lambda: f64,
        theta: Vec<f64>,
        mu: f64,
        sigma: f64,
    },
    /// `y_t = c + b_t x_t + sigma e_t`, i.i.d. `x ~ N(x_mean, 1)`, with the slope
    /// switching from `slope_before` to `slope_after` at `floor(T break_frac)`.
    BrokenRegression {
        intercept: f64,
        x_mean: f64,
        slope_before: f64,
        slope_after: f64,
        break_frac: f64,
        sigma: f64,
    },
}

const BURN_IN: usize = 100;

fn dataset(y: Vec<f64>, xs: Vec<Vec<f64>>) -> Result<Dataset<f64>> {
    let mut series = vec![TimeSeries::new("Y", 1, y)?];
    for (name, x) in regressor_names(xs.len()).into_iter().zip(xs) {
        series.push(TimeSeries::new(name, 1, x)?);
    }
    Dataset::new(series)
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        match self {
            DgpSpec::Ardl {
                alpha,
                gamma,
                sigma,
                x_ar,
                ..
            } => {
                if alpha.is_empty() {
                    return bad("ARDL DGP needs at least one autoregressive coefficient");
                }
                if !ar_stable(alpha) {
                    return bad("ARDL DGP autoregressive part is not stationary");
                }
                if gamma.iter().any(Vec::is_empty) {
                    return bad("each regressor needs at least a contemporaneous coefficient");
                }
                if !(*sigma >= 0.0) || x_ar.abs() >= 1.0 {
                    return bad("ARDL DGP needs sigma >= 0 and |x_ar| < 1");
                }
            }
            DgpSpec::RandomWalk { .. } => {}
            DgpSpec::Ecm { lambda, sigma, theta, .. } => {
                if !(*lambda > -2.0 && *lambda < 0.0) {
                    return bad("ECM DGP needs -2 < lambda < 0");
                }
                if !(*sigma >= 0.0) || theta.is_empty() {
                    return bad("ECM DGP needs sigma >= 0 and at least one regressor");
                }
            }
            DgpSpec::BrokenRegression { break_frac, sigma, .. } => {
                if !(*break_frac > 0.0 && *break_frac < 1.0) || !(*sigma >= 0.0) {
                    return bad("broken regression needs 0 < break_frac < 1 and sigma >= 0");
                }
            }
        }
        Ok(())
    }
}

/// Deterministic-by-seed synthetic dataset of length `t`.
pub fn simulate_dgp(spec: &DgpSpec, t: usize, seed: u64) -> Result<Dataset<f64>> {
    spec.validate()?;
    if t < 2 {
        return Err(Error::Domain("DGP length must be at least 2".into()));
    }
    let mut rng = Innovations::new(seed, 0);
    match spec {
        DgpSpec::Ardl {
            alpha,
            gamma,
            intercept,
            sigma,
            x_ar,
        } => {
            let total = t + BURN_IN;
            let xs: Vec<Vec<f64>> = gamma
                .iter()
                .map(|_| {
                    let mut prev = 0.0;
                    (0..total)
                        .map(|_| {
                            prev = x_ar * prev + rng.normal();
                            prev
                        })
                        .collect()
                })
                .collect();
            let mut y = vec![0.0; total];
            for s in 0..total {
                let mut v = *intercept + sigma * rng.normal();
                for (j, a) in alpha.iter().enumerate() {
                    if s > j {
                        v += a * y[s - j - 1];
                    }
                }
                for (x, g) in xs.iter().zip(gamma) {
                    for (m, c) in g.iter().enumerate() {
                        if s >= m {
                            v += c * x[s - m];
                        }
                    }
                }
                y[s] = v;
            }
            dataset(
                y[BURN_IN..].to_vec(),
                xs.into_iter().map(|x| x[BURN_IN..].to_vec()).collect(),
            )
        }
        DgpSpec::RandomWalk { k } => {
            let y = rng.random_walk(t);
            let xs = (0..*k).map(|_| rng.random_walk(t)).collect();
            dataset(y, xs)
        }
        DgpSpec::Ecm {
            lambda,
            theta,
            mu,
            sigma,
        } => {
            let xs: Vec<Vec<f64>> = theta.iter().map(|_| rng.random_walk(t)).collect();
            let mut y = vec![0.0; t];
            y[0] = *mu + theta.iter().zip(&xs).map(|(th, x)| th * x[0]).sum::<f64>();
            for s in 1..t {
                let eq = y[s - 1] - mu - theta.iter().zip(&xs).map(|(th, x)| th * x[s - 1]).sum::<f64>();
                y[s] = y[s - 1] + lambda * eq + sigma * rng.normal();
            }
            dataset(y, xs)
        }
        DgpSpec::BrokenRegression {
            intercept,
            x_mean,
            slope_before,
            slope_after,
            break_frac,
            sigma,
        } => {
            let brk = (t as f64 * break_frac).floor() as usize;
            let x: Vec<f64> = rng.normals(t).into_iter().map(|v| v + x_mean).collect();
            let y = (0..t)
                .map(|s| {
                    let b = if s < brk { slope_before } else { slope_after };
                    intercept + b * x[s] + sigma * rng.normal()
                })
                .collect();
            dataset(y, vec![x])
        }
    }
}

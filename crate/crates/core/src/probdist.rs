//! Normal, Student-t, Fisher F and chi-square distribution functions.
//!
//! CDFs are built on the regularized incomplete gamma function (normal,
//! chi-square) and the regularized incomplete beta function (t, F). Upper
//! tails are evaluated directly rather than as `1 - cdf`. Quantiles are found
//! by safeguarded Newton iteration inside a bracket on the CDF.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 20_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    // modified Lentz
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - beta_inc_upper_direct(a, b, x)
    }
}

/// `1 - I_x(a, b) = I_{1-x}(b, a)` evaluated without cancellation.
fn beta_inc_upper_direct(a: f64, b: f64, x: f64) -> f64 {
    let y = 1.0 - x;
    let front = (b * y.ln() + a * x.ln() - ln_beta(a, b)).exp();
    front * beta_cf(b, a, y) / b
}

/// Upper tail `1 - I_x(a, b)`.
pub fn beta_inc_upper(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        1.0 - beta_inc(a, b, x)
    } else {
        beta_inc_upper_direct(a, b, x)
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        1.0 + gamma_p(0.5, x * x)
    }
}

pub fn erf(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_p(0.5, x * x)
    } else {
        -gamma_p(0.5, x * x)
    }
}

/// A continuous distribution family with its degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dist {
    Normal,
    StudentT { df: f64 },
    FisherF { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
}

fn check_df(df: f64) -> Result<f64> {
    if df.is_finite() && df > 0.0 {
        Ok(df)
    } else {
        Err(Error::Domain(format!("degrees of freedom must be positive, got {df}")))
    }
}

impl Dist {
    pub fn student_t(df: f64) -> Result<Self> {
        Ok(Dist::StudentT { df: check_df(df)? })
    }

    pub fn fisher_f(df1: f64, df2: f64) -> Result<Self> {
        Ok(Dist::FisherF {
            df1: check_df(df1)?,
            df2: check_df(df2)?,
        })
    }

    pub fn chi_square(df: f64) -> Result<Self> {
        Ok(Dist::ChiSquare { df: check_df(df)? })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Dist::Normal => Ok(()),
            Dist::StudentT { df } | Dist::ChiSquare { df } => check_df(df).map(drop),
            Dist::FisherF { df1, df2 } => check_df(df1).and(check_df(df2)).map(drop),
        }
    }

    fn support_min(&self) -> f64 {
        match self {
            Dist::Normal | Dist::StudentT { .. } => f64::NEG_INFINITY,
            Dist::FisherF { .. } | Dist::ChiSquare { .. } => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            Dist::Normal => {
                let z = x / SQRT_2;
                if x < 0.0 {
                    0.5 * gamma_q(0.5, z * z)
                } else {
                    0.5 + 0.5 * gamma_p(0.5, z * z)
                }
            }
            Dist::StudentT { df } => {
                if x.is_infinite() {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                let tail = t_two_sided_tail(df, x);
                if x < 0.0 {
                    0.5 * tail
                } else {
                    1.0 - 0.5 * tail
                }
            }
            Dist::FisherF { df1, df2 } => {
                if x <= 0.0 {
                    return 0.0;
                }
                if x.is_infinite() {
                    return 1.0;
                }
                let u = df1 * x;
                beta_inc(0.5 * df1, 0.5 * df2, u / (u + df2))
            }
            Dist::ChiSquare { df } => gamma_p(0.5 * df, 0.5 * x.max(0.0)),
        }
    }

    /// Upper tail probability `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            Dist::Normal => self.cdf(-x),
            Dist::StudentT { .. } => self.cdf(-x),
            Dist::FisherF { df1, df2 } => {
                if x <= 0.0 {
                    return 1.0;
                }
                if x.is_infinite() {
                    return 0.0;
                }
                let u = df1 * x;
                beta_inc_upper(0.5 * df1, 0.5 * df2, u / (u + df2))
            }
            Dist::ChiSquare { df } => gamma_q(0.5 * df, 0.5 * x.max(0.0)),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Dist::Normal => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Dist::StudentT { df } => {
                let ln = ln_gamma(0.5 * (df + 1.0))
                    - ln_gamma(0.5 * df)
                    - 0.5 * (df * PI).ln()
                    - 0.5 * (df + 1.0) * (x * x / df).ln_1p();
                ln.exp()
            }
            Dist::FisherF { df1, df2 } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let ln = 0.5 * df1 * (df1 / df2).ln() + (0.5 * df1 - 1.0) * x.ln()
                    - 0.5 * (df1 + df2) * (df1 * x / df2).ln_1p()
                    - ln_beta(0.5 * df1, 0.5 * df2);
                ln.exp()
            }
            Dist::ChiSquare { df } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let k = 0.5 * df;
                ((k - 1.0) * x.ln() - 0.5 * x - k * 2f64.ln() - ln_gamma(k)).exp()
            }
        }
    }

    /// `x` with `cdf(x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability must be in (0,1), got {p}")));
        }
        if let Dist::Normal = self {
            return Ok(normal_ppf(p));
        }
        if matches!(self, Dist::StudentT { .. }) && p > 0.5 {
            // symmetric: solve in the lower tail where cdf has full precision
            return Ok(-self.quantile(1.0 - p)?);
        }
        let guess = match *self {
            Dist::Normal => normal_guess(p),
            Dist::StudentT { df } => normal_guess(p) * (1.0 + 1.0 / df.max(1.0)),
            Dist::ChiSquare { df } => df.max(0.5),
            Dist::FisherF { df2, .. } => {
                if df2 > 2.0 {
                    df2 / (df2 - 2.0)
                } else {
                    1.0
                }
            }
        };
        Ok(self.solve_cdf(p, guess))
    }

    fn solve_cdf(&self, p: f64, guess: f64) -> f64 {
        let f = |x: f64| self.cdf(x) - p;
        let min = self.support_min();

        // bracket [lo, hi] with f(lo) < 0 < f(hi)
        let mut x = guess;
        let mut fx = f(x);
        let (mut lo, mut hi);
        if fx < 0.0 {
            lo = x;
            let mut step = x.abs().max(1.0);
            hi = x + step;
            while f(hi) < 0.0 {
                lo = hi;
                step *= 2.0;
                hi += step;
            }
        } else {
            hi = x;
            if min.is_finite() {
                lo = 0.5 * x;
                while f(lo) > 0.0 && lo > 1e-300 {
                    hi = lo;
                    lo *= 0.5;
                }
            } else {
                let mut step = x.abs().max(1.0);
                lo = x - step;
                while f(lo) > 0.0 {
                    hi = lo;
                    step *= 2.0;
                    lo -= step;
                }
            }
        }

        for _ in 0..300 {
            if fx == 0.0 {
                return x;
            }
            if fx < 0.0 {
                lo = lo.max(x).min(hi);
            } else {
                hi = hi.min(x).max(lo);
            }
            let d = self.pdf(x);
            let newton = if d > 0.0 && d.is_finite() { x - fx / d } else { f64::NAN };
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let converged = (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + lo.abs());
            x = next;
            if converged {
                break;
            }
            fx = f(x);
        }
        x
    }
}

/// Two-sided tail `P(|T| > |x|)`, choosing the beta argument that keeps
/// precision near zero and in the tails.
fn t_two_sided_tail(df: f64, x: f64) -> f64 {
    let x2 = x * x;
    if x2 < df {
        beta_inc_upper(0.5, 0.5 * df, x2 / (df + x2))
    } else {
        beta_inc(0.5 * df, 0.5, df / (df + x2))
    }
}

/// Rational starting point for the normal quantile (Acklam); refined by
/// Newton steps on the CDF.
fn horner(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Wichura's AS 241 rational approximations (relative error about 1e-16).
fn normal_ppf(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_6,
        133.141_667_891_784_38,
        1_971.590_950_306_551_4,
        13_731.693_765_509_461,
        45_921.953_931_549_87,
        67_265.770_927_008_7,
        33_430.575_583_588_13,
        2_509.080_928_730_122_7,
    ];
    const B: [f64; 8] = [
        1.0,
        42.313_330_701_600_91,
        687.187_007_492_057_9,
        5_394.196_021_424_751,
        21_213.794_301_586_597,
        39_307.895_800_092_71,
        28_729.085_735_721_943,
        5_226.495_278_852_546,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_6,
        4.630_337_846_156_545,
        5.769_497_221_460_691,
        3.647_848_324_763_204_6,
        1.270_458_252_452_368_4,
        0.241_780_725_177_450_6,
        0.022_723_844_989_269_184,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        0.689_767_334_985_1,
        0.148_103_976_427_480_07,
        0.015_198_666_563_616_457,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_8e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        0.296_560_571_828_504_9,
        0.026_532_189_526_576_124,
        0.001_242_660_947_388_078_4,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        0.599_832_206_555_887_9,
        0.136_929_880_922_735_8,
        0.014_875_361_290_850_615,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_8e-15,
    ];
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * horner(&A, r) / horner(&B, r);
    }
    let r = (-(p.min(1.0 - p)).ln()).sqrt();
    let v = if r <= 5.0 {
        let r = r - 1.6;
        horner(&C, r) / horner(&D, r)
    } else {
        let r = r - 5.0;
        horner(&E, r) / horner(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Acklam's approximation, used as a starting point for Student-t.
fn normal_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let p_low = 0.024_25;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_guess(1.0 - p)
    }
}

pub fn cdf(d: &Dist, x: f64) -> Result<f64> {
    d.validate()?;
    Ok(d.cdf(x))
}

pub fn survival(d: &Dist, x: f64) -> Result<f64> {
    d.validate()?;
    Ok(d.sf(x))
}

pub fn quantile(d: &Dist, p: f64) -> Result<f64> {
    d.quantile(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    Dist::Normal.cdf(x)
}

/// Standard normal quantile; `p` must lie in (0,1).
pub fn normal_quantile(p: f64) -> f64 {
    Dist::Normal.quantile(p).unwrap_or(f64::NAN)
}

/// Two-sided p-value of a t-ratio.
pub fn t_two_sided_pvalue(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    t_two_sided_tail(df, t).min(1.0)
}

/// Upper-tail p-value of an F statistic.
pub fn f_pvalue(f: f64, df1: f64, df2: f64) -> f64 {
    Dist::FisherF { df1, df2 }.sf(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Independent oracle: Simpson integration of the normal density.
    fn normal_cdf_by_quadrature(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mut s = phi(0.0) + phi(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * phi(i as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn closed_form_anchors() {
        assert_abs_diff_eq!(Dist::Normal.cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(Dist::StudentT { df: 1.0 }.cdf(1.0), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(Dist::StudentT { df: 1.0 }.sf(1.0), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(
            Dist::ChiSquare { df: 2.0 }.cdf(2.0),
            1.0 - (-1.0f64).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(Dist::FisherF { df1: 7.0, df2: 7.0 }.cdf(1.0), 0.5, epsilon = 1e-12);
        let tail = Dist::ChiSquare { df: 2.0 }.sf(40.0);
        assert!(((tail - (-20.0f64).exp()) / (-20.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn normal_matches_quadrature() {
        for &x in &[0.1, 0.5, 1.0, 1.959_963_984_540_054, 2.5, 3.7] {
            assert_abs_diff_eq!(Dist::Normal.cdf(x), normal_cdf_by_quadrature(x), epsilon = 1e-12);
            assert_abs_diff_eq!(Dist::Normal.cdf(-x), 1.0 - normal_cdf_by_quadrature(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn normal_quantiles() {
        assert_abs_diff_eq!(Dist::Normal.quantile(0.5).unwrap(), 0.0, epsilon = 1e-12);
        // bisection on the quadrature oracle
        let (mut lo, mut hi) = (1.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf_by_quadrature(mid) < 0.975 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(Dist::Normal.quantile(0.975).unwrap(), lo, epsilon = 1e-9);
        assert_abs_diff_eq!(lo, 1.959_96, epsilon = 1e-5);
    }

    #[test]
    fn chi_square_quantile_inverts_closed_form() {
        let p = 1.0 - (-1.0f64).exp();
        assert_abs_diff_eq!(Dist::ChiSquare { df: 2.0 }.quantile(p).unwrap(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Dist::student_t(0.0).is_err());
        assert!(cdf(&Dist::ChiSquare { df: -1.0 }, 1.0).is_err());
        assert!(Dist::Normal.quantile(0.0).is_err());
        assert!(Dist::Normal.quantile(1.0).is_err());
    }

    #[test]
    fn agrees_with_statrs() {
        use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, StudentsT};
        for &x in &[0.05, 0.7, 1.3, 2.9, 6.0] {
            for &df in &[1.0, 3.0, 17.0, 250.0] {
                let t = StudentsT::new(0.0, 1.0, df).unwrap();
                assert_abs_diff_eq!(Dist::StudentT { df }.cdf(x), t.cdf(x), epsilon = 1e-10);
                let c = ChiSquared::new(df).unwrap();
                assert_abs_diff_eq!(Dist::ChiSquare { df }.cdf(x), c.cdf(x), epsilon = 1e-10);
                let f = FisherSnedecor::new(df, 12.0).unwrap();
                assert_abs_diff_eq!(Dist::FisherF { df1: df, df2: 12.0 }.cdf(x), f.cdf(x), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn erf_values() {
        assert_abs_diff_eq!(erf(0.5), 0.520_499_877_813_046_5, epsilon = 1e-15);
        assert_abs_diff_eq!(erfc(2.0), 0.004_677_734_981_047_266, epsilon = 1e-16);
    }

    fn family() -> impl Strategy<Value = Dist> {
        prop_oneof![
            Just(Dist::Normal),
            (0.5f64..200.0).prop_map(|df| Dist::StudentT { df }),
            (0.5f64..200.0).prop_map(|df| Dist::ChiSquare { df }),
            (1.0f64..50.0, 1.0f64..200.0).prop_map(|(df1, df2)| Dist::FisherF { df1, df2 }),
        ]
    }

    proptest! {
        #[test]
        fn cdf_is_monotone(d in family(), a in -20.0f64..60.0, b in -20.0f64..60.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(lo) <= d.cdf(hi) + 1e-15);
            let c = d.cdf(lo);
            prop_assert!((0.0..=1.0).contains(&c));
        }

        #[test]
        fn quantile_inverts_cdf(d in family(), p in 0.0005f64..0.9995) {
            let x = d.quantile(p).unwrap();
            let back = d.quantile(d.cdf(x)).unwrap();
            prop_assert!((back - x).abs() <= 1e-7 * (1.0 + x.abs()), "{d:?} p={p} x={x} back={back}");
        }

        #[test]
        fn f_one_d_is_squared_t(x in 0.01f64..8.0, df in 1.0f64..300.0) {
            let f = Dist::FisherF { df1: 1.0, df2: df }.cdf(x * x);
            let t = 2.0 * Dist::StudentT { df }.cdf(x) - 1.0;
            prop_assert!((f - t).abs() < 1e-9);
        }

        #[test]
        fn t_approaches_normal(x in -4.0f64..4.0) {
            let diff = Dist::StudentT { df: 1e4 }.cdf(x) - Dist::Normal.cdf(x);
            prop_assert!(diff.abs() < 1e-4);
        }

        #[test]
        fn survival_complements_cdf(d in family(), x in 0.0f64..30.0) {
            prop_assert!((d.sf(x) + d.cdf(x) - 1.0).abs() < 1e-12);
        }
    }
}

//! Dickey-Fuller critical values and approximate p-values from the shipped
//! response-surface table (`data/mackinnon_df.csv`).

use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use super::Deterministic;
use crate::error::{Error, Result};
use crate::probdist::normal_cdf;

pub const TABLE_CSV: &str = include_str!("../../data/mackinnon_df.csv");
pub const TABLE_VERSION: &str = "mackinnon-df/1";
pub const TABLE_SHA256: &str = "8a45081294f4754a03619a214f64654c3ada96e79b9c2631d0d0cebb0c47c38c";

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRow {
    pub kind: String,
    pub case: String,
    pub level: Option<f64>,
    pub coefs: [f64; 4],
}

pub fn table_sha256() -> String {
    hex(&Sha256::digest(TABLE_CSV.as_bytes()))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn rows() -> &'static [SurfaceRow] {
    static ROWS: OnceLock<Vec<SurfaceRow>> = OnceLock::new();
    ROWS.get_or_init(|| parse(TABLE_CSV).expect("embedded response-surface table parses"))
}

fn parse(text: &str) -> Result<Vec<SurfaceRow>> {
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
                .map_err(|e| Error::Lookup(format!("bad coefficient `{}`: {e}", &rec[i])))
        };
        let level = if rec[2].trim().is_empty() { None } else { Some(num(2)?) };
        out.push(SurfaceRow {
            kind: rec[0].to_string(),
            case: rec[1].to_string(),
            level,
            coefs: [num(3)?, num(4)?, num(5)?, num(6)?],
        });
    }
    Ok(out)
}

fn find(kind: &str, case: Deterministic, level: Option<f64>) -> Result<&'static SurfaceRow> {
    rows()
        .iter()
        .find(|r| {
            r.kind == kind
                && r.case == case.code()
                && match (r.level, level) {
                    (Some(a), Some(b)) => (a - b).abs() < 1e-12,
                    (None, None) => true,
                    _ => false,
                }
        })
        .ok_or_else(|| Error::Lookup(format!("no `{kind}` row for case {}", case.code())))
}

/// Critical value at `level` (0.01, 0.05 or 0.10) for `nobs` regression rows.
pub fn critical_value(case: Deterministic, level: f64, nobs: usize) -> Result<f64> {
    let [b0, b1, b2, b3] = find("crit", case, Some(level))?.coefs;
    let inv = 1.0 / nobs as f64;
    Ok(b0 + inv * (b1 + inv * (b2 + inv * b3)))
}

/// Approximate left-tail p-value of a Dickey-Fuller t statistic.
pub fn pvalue(stat: f64, case: Deterministic) -> f64 {
    let [star, min, max, _] = find("tau_range", case, None)
        .expect("tau_range rows present")
        .coefs;
    if stat.is_nan() {
        return f64::NAN;
    }
    if stat > max {
        return 1.0;
    }
    if stat < min {
        return 0.0;
    }
    let kind = if stat <= star { "pvalue_small" } else { "pvalue_large" };
    let [c0, c1, c2, c3] = find(kind, case, None).expect("p-value rows present").coefs;
    normal_cdf(c0 + stat * (c1 + stat * (c2 + stat * c3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn checksum_pinned() {
        assert_eq!(table_sha256(), TABLE_SHA256);
    }

    #[test]
    fn asymptotic_five_percent_values() {
        let big = usize::MAX / 2;
        assert_abs_diff_eq!(critical_value(Deterministic::Constant, 0.05, big).unwrap(), -2.86154, epsilon = 1e-9);
        assert_abs_diff_eq!(critical_value(Deterministic::ConstantTrend, 0.05, big).unwrap(), -3.41049, epsilon = 1e-9);
        assert_abs_diff_eq!(critical_value(Deterministic::None, 0.05, big).unwrap(), -1.941, epsilon = 1e-9);
    }

    #[test]
    fn p_at_critical_value_is_near_level() {
        for case in [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend] {
            for level in [0.01, 0.05, 0.10] {
                let cv = critical_value(case, level, 100_000).unwrap();
                let p = pvalue(cv, case);
                assert!((p - level).abs() < 0.003, "{case:?} {level}: p={p}");
            }
        }
    }

    #[test]
    fn reference_pvalues() {
        // values from an independent implementation of the same surfaces
        assert_abs_diff_eq!(pvalue(-2.644077, Deterministic::ConstantTrend), 0.260_027_045_841_837_2, epsilon = 1e-9);
        assert_abs_diff_eq!(pvalue(0.181065, Deterministic::None), 0.741_184_247_220_450_4, epsilon = 1e-9);
        assert_abs_diff_eq!(pvalue(-2.930363, Deterministic::Constant), 0.041_929_412_407_537_59, epsilon = 1e-9);
        assert_abs_diff_eq!(pvalue(-3.832901, Deterministic::ConstantTrend), 0.014_967_382_467_008_175, epsilon = 1e-9);
    }

    #[test]
    fn finite_sample_critical_values() {
        // statsmodels mackinnoncrit(1, 'c', 22)
        let cv = |l| critical_value(Deterministic::Constant, l, 22).unwrap();
        assert_abs_diff_eq!(cv(0.01), -3.769_732_63, epsilon = 1e-7);
        assert_abs_diff_eq!(cv(0.05), -3.005_425_54, epsilon = 1e-7);
        assert_abs_diff_eq!(cv(0.10), -2.642_500_99, epsilon = 1e-7);
    }

    #[test]
    fn pvalue_monotone_on_support() {
        for case in [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend] {
            let [_, min, _, _] = find("tau_range", case, None).unwrap().coefs;
            let mut prev = 0.0;
            let mut stat = min + 1e-3;
            while stat < 0.0 {
                let p = pvalue(stat, case);
                assert!(p > prev, "{case:?} at {stat}");
                prev = p;
                stat += 0.01;
            }
        }
    }
}

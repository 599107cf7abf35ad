//! Generator for the bundled 23-year synthetic dataset. The real series behind
//! the reference model are not public, so the example data are drawn
//! from a known error-correction process instead.

use ardl_core::mc::Innovations;
use ardl_core::series::{Dataset, TimeSeries};

pub const FIRST_YEAR: i32 = 1379;
pub const YEARS: usize = 23;
/// Seed of the bundled file `data/synthetic_1379_1401.csv`.
pub const REFERENCE_SEED: u64 = 7;

/// Bundled copy of `reference_csv(REFERENCE_SEED)`.
pub const REFERENCE_CSV: &str = include_str!("../data/synthetic_1379_1401.csv");

/// Columns `Y` (output), `RD` (R&D spending), `K` (capital) and `L` (labour),
/// in levels. In logs: `RD` and `K` are drifting random walks, `L` is a
/// stationary AR(1), and `Y` adjusts to
/// `2 + 0.35 LRD + 0.5 LK + 0.4 LL` at speed 0.4.
pub fn reference_dataset(seed: u64) -> Dataset<f64> {
    let mut rng = Innovations::new(seed, 0);
    let mut lrd = vec![1500f64.ln()];
    let mut lk = vec![250_000f64.ln()];
    let l_mean = 3300f64.ln();
    let mut ll = vec![l_mean];
    for t in 1..YEARS {
        lrd.push(lrd[t - 1] + 0.05 + 0.10 * rng.normal());
        lk.push(lk[t - 1] + 0.03 + 0.03 * rng.normal());
        ll.push(l_mean + 0.6 * (ll[t - 1] - l_mean) + 0.02 * rng.normal());
    }
    let target = |t: usize| 2.0 + 0.35 * lrd[t] + 0.5 * lk[t] + 0.4 * ll[t];
    let mut ly = vec![target(0)];
    for t in 1..YEARS {
        let gap = ly[t - 1] - target(t - 1);
        ly.push(ly[t - 1] - 0.4 * gap + 0.2 * (lrd[t] - lrd[t - 1]) + 0.03 * rng.normal());
    }
    let level = |name: &str, logs: &[f64]| {
        let values = logs.iter().map(|v| round4(v.exp())).collect();
        TimeSeries::new(name, FIRST_YEAR, values).expect("finite")
    };
    Dataset::new(vec![
        level("Y", &ly),
        level("RD", &lrd),
        level("K", &lk),
        level("L", &ll),
    ])
    .expect("aligned")
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// CSV text with a `year` column and four decimals per value.
pub fn to_csv(ds: &Dataset<f64>) -> String {
    let mut out = String::from("year");
    for name in ds.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, year) in (ds.start()..=ds.end()).enumerate() {
        out.push_str(&year.to_string());
        for s in ds.series() {
            out.push_str(&format!(",{:.4}", s.values()[i]));
        }
        out.push('\n');
    }
    out
}

pub fn reference_csv(seed: u64) -> String {
    to_csv(&reference_dataset(seed))
}

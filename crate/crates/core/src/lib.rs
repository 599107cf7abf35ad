//! ARDL bounds-testing toolkit: unit-root pretests, ARDL estimation, the
//! bounds cointegration test, long-run coefficients, the error-correction
//! form, residual diagnostics and CUSUM stability, plus a seeded Monte Carlo
//! harness for validating the embedded critical-value tables.

pub mod ardl;
pub mod diagnostics;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod mc;
pub mod ols;
pub mod probdist;
pub mod scalar;
pub mod series;
pub mod unitroot;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TimeSeriesF64 = series::TimeSeries<f64>;
pub type DatasetF64 = series::Dataset<f64>;
pub type DesignMatrixF64 = series::DesignMatrix<f64>;
pub type OlsFitF64 = ols::OlsFit<f64>;

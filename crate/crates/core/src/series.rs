//! Annual time-series containers and the transforms used to build
//! regression designs: natural log, lag, difference and the aligned
//! design matrix with `VAR(-k)` column naming.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A named annual series. Observation `i` belongs to period `start_period + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    name: String,
    start_period: i32,
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(name: impl Into<String>, start_period: i32, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::Domain(format!("series `{name}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "series `{name}` has a non-finite value at period {}",
                start_period + i as i32
            )));
        }
        Ok(Self {
            name,
            start_period,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start_period(&self) -> i32 {
        self.start_period
    }

    pub fn end_period(&self) -> i32 {
        self.start_period + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn periods(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_period + i as i32)
    }

    /// Value at a calendar period, if covered.
    pub fn at(&self, period: i32) -> Option<T> {
        let idx = period.checked_sub(self.start_period)?;
        usize::try_from(idx).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Restricts the series to `[start, end]`.
    pub fn window(&self, start: i32, end: i32) -> Result<Self> {
        if start < self.start_period || end > self.end_period() || start > end {
            return Err(Error::Sample(format!(
                "window {start}..={end} outside `{}` ({}..={})",
                self.name,
                self.start_period,
                self.end_period()
            )));
        }
        let lo = (start - self.start_period) as usize;
        let hi = (end - self.start_period) as usize;
        Ok(Self {
            name: self.name.clone(),
            start_period: start,
            values: self.values[lo..=hi].to_vec(),
        })
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.start_period,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// Elementwise natural log; the result is named `L<name>`.
pub fn log_transform<T: Scalar>(s: &TimeSeries<T>) -> Result<TimeSeries<T>> {
    if let Some(i) = s.values.iter().position(|v| *v <= T::zero()) {
        return Err(Error::Domain(format!(
            "log of non-positive value {} in `{}` at period {} (index {i})",
            s.values[i],
            s.name,
            s.start_period + i as i32
        )));
    }
    Ok(TimeSeries {
        name: format!("L{}", s.name),
        start_period: s.start_period,
        values: s.values.iter().map(|v| v.ln()).collect(),
    })
}

/// Lag operator: observation `t` of the result holds `s(t-k)`.
pub fn lag<T: Scalar>(s: &TimeSeries<T>, k: usize) -> Result<TimeSeries<T>> {
    if k >= s.len() {
        return Err(Error::Domain(format!(
            "lag {k} leaves no observations of `{}` (length {})",
            s.name,
            s.len()
        )));
    }
    Ok(TimeSeries {
        name: s.name.clone(),
        start_period: s.start_period + k as i32,
        values: s.values[..s.len() - k].to_vec(),
    })
}

/// `d`-th difference.
pub fn difference<T: Scalar>(s: &TimeSeries<T>, d: usize) -> Result<TimeSeries<T>> {
    if d >= s.len() {
        return Err(Error::Domain(format!(
            "difference of order {d} leaves no observations of `{}` (length {})",
            s.name,
            s.len()
        )));
    }
    let mut values = s.values.clone();
    for _ in 0..d {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(TimeSeries {
        name: s.name.clone(),
        start_period: s.start_period + d as i32,
        values,
    })
}

/// Named series on a common annual sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    series: Vec<TimeSeries<T>>,
    start: i32,
    end: i32,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset on the intersection of the input sample ranges.
    pub fn new(series: Vec<TimeSeries<T>>) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::Domain("dataset needs at least one series".into()));
        }
        let mut seen = HashMap::new();
        for s in &series {
            if seen.insert(s.name.clone(), ()).is_some() {
                return Err(Error::Domain(format!("duplicate series name `{}`", s.name)));
            }
        }
        let start = series.iter().map(|s| s.start_period).max().unwrap();
        let end = series.iter().map(|s| s.end_period()).min().unwrap();
        if start > end {
            return Err(Error::Sample("series have no overlapping periods".into()));
        }
        let series = series
            .iter()
            .map(|s| s.window(start, end))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { series, start, end })
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn end(&self) -> i32 {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|s| s.name())
    }

    pub fn series(&self) -> &[TimeSeries<T>] {
        &self.series
    }

    pub fn get(&self, name: &str) -> Result<&TimeSeries<T>> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Domain(format!("no series named `{name}`")))
    }

    /// Adds a series, re-intersecting the sample if needed.
    pub fn with_series(&self, s: TimeSeries<T>) -> Result<Self> {
        let mut all = self.series.clone();
        all.push(s);
        Self::new(all)
    }

    /// Applies `log_transform` to every series.
    pub fn logged(&self) -> Result<Self> {
        Self::new(
            self.series
                .iter()
                .map(log_transform)
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// One regressor (or response) in a design: variable, lag and difference order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub var: String,
    pub lag: usize,
    pub diff: usize,
}

impl Term {
    pub fn level(var: impl Into<String>, lag: usize) -> Self {
        Self {
            var: var.into(),
            lag,
            diff: 0,
        }
    }

    pub fn diff(var: impl Into<String>, lag: usize) -> Self {
        Self {
            var: var.into(),
            lag,
            diff: 1,
        }
    }

    /// Leading observations consumed by this term.
    pub fn offset(&self) -> usize {
        self.lag + self.diff
    }

    pub fn label(&self) -> String {
        let base = if self.lag == 0 {
            self.var.clone()
        } else {
            format!("{}(-{})", self.var, self.lag)
        };
        match self.diff {
            0 => base,
            1 => format!("D({base})"),
            d => format!("D({base},{d})"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub const INTERCEPT: &str = "C";
pub const TREND: &str = "@TREND";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DesignOptions {
    pub intercept: bool,
    pub trend: bool,
    /// Drop at least this many leading observations even if the terms need
    /// fewer, so that competing designs share one sample.
    pub min_offset: usize,
}

impl DesignOptions {
    pub fn with_intercept() -> Self {
        Self {
            intercept: true,
            ..Self::default()
        }
    }
}

/// Response vector plus named regressor columns (column-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<T> {
    pub response_name: String,
    pub response: Vec<T>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<T>>,
    pub first_period: i32,
    pub last_period: i32,
}

impl<T: Scalar> DesignMatrix<T> {
    /// Builds a design from explicit columns.
    pub fn from_columns(
        response_name: impl Into<String>,
        response: Vec<T>,
        columns: Vec<(String, Vec<T>)>,
        first_period: i32,
    ) -> Result<Self> {
        let n = response.len();
        if let Some((name, _)) = columns.iter().find(|(_, c)| c.len() != n) {
            return Err(Error::Domain(format!(
                "column `{name}` length differs from response length {n}"
            )));
        }
        let (names, columns) = columns.into_iter().unzip();
        Ok(Self {
            response_name: response_name.into(),
            response,
            names,
            columns,
            first_period,
            last_period: first_period + n as i32 - 1,
        })
    }

    pub fn nrows(&self) -> usize {
        self.response.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Option<&[T]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn has_intercept(&self) -> bool {
        self.columns
            .iter()
            .any(|c| c.iter().all(|&v| v == c[0]) && c[0] != T::zero())
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<T> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn periods(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.nrows()).map(move |i| self.first_period + i as i32)
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.nrows() {
            return Err(Error::Domain(format!(
                "column `{name}` has {} rows, design has {}",
                values.len(),
                self.nrows()
            )));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(self)
    }

    /// Same regressors with a different response.
    pub fn with_response(&self, name: impl Into<String>, response: Vec<T>) -> Result<Self> {
        if response.len() != self.nrows() {
            return Err(Error::Domain("response length mismatch".into()));
        }
        Ok(Self {
            response_name: name.into(),
            response,
            ..self.clone()
        })
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let col = self
                .column(name)
                .ok_or_else(|| Error::Domain(format!("no column `{name}` in design")))?;
            out.push((name.to_string(), col.to_vec()));
        }
        Self::from_columns(
            self.response_name.clone(),
            self.response.clone(),
            out,
            self.first_period,
        )
    }

    /// Drops the named columns.
    pub fn without(&self, drop: &[&str]) -> Result<Self> {
        let keep: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .filter(|n| !drop.contains(n))
            .collect();
        self.select(&keep)
    }

    fn check_sample(&self) -> Result<()> {
        if self.nrows() <= self.ncols() {
            return Err(Error::Sample(format!(
                "{} observations for {} regressors",
                self.nrows(),
                self.ncols()
            )));
        }
        Ok(())
    }
}

fn term_values<T: Scalar>(s: &TimeSeries<T>, diff: usize) -> Vec<T> {
    let mut v = s.values.clone();
    for _ in 0..diff {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    v
}

/// Aligns `dep` and `terms` on the sample left after the largest lag and
/// appends intercept/trend columns when requested. The trend counts dataset
/// periods from zero.
pub fn build_design<T: Scalar>(
    ds: &Dataset<T>,
    dep: &Term,
    terms: &[Term],
    opts: DesignOptions,
) -> Result<DesignMatrix<T>> {
    let offset = terms
        .iter()
        .chain(std::iter::once(dep))
        .map(Term::offset)
        .max()
        .unwrap_or(0)
        .max(opts.min_offset);
    let len = ds.len();
    if offset >= len {
        return Err(Error::Sample(format!(
            "max lag {offset} leaves no observations out of {len}"
        )));
    }
    let rows = len - offset;

    // `col[t]` is the value at dataset index `t`; differenced vectors are
    // shorter by `diff`, so index `t - lag - diff` into them.
    let extract = |term: &Term| -> Result<Vec<T>> {
        let s = ds.get(&term.var)?;
        let v = term_values(s, term.diff);
        Ok((offset..len).map(|t| v[t - term.lag - term.diff]).collect())
    };

    let response = extract(dep)?;
    let mut names = Vec::with_capacity(terms.len() + 2);
    let mut columns = Vec::with_capacity(terms.len() + 2);
    for term in terms {
        names.push(term.label());
        columns.push(extract(term)?);
    }
    if opts.intercept {
        names.push(INTERCEPT.to_string());
        columns.push(vec![T::one(); rows]);
    }
    if opts.trend {
        names.push(TREND.to_string());
        columns.push((offset..len).map(T::from_count).collect());
    }
    let design = DesignMatrix {
        response_name: dep.label(),
        response,
        names,
        columns,
        first_period: ds.start() + offset as i32,
        last_period: ds.end(),
    };
    design.check_sample()?;
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ts(values: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new("Y", 1379, values.to_vec()).unwrap()
    }

    #[test]
    fn log_of_powers_of_e() {
        let e = std::f64::consts::E;
        let out = log_transform(&ts(&[1.0, e, e * e])).unwrap();
        assert_eq!(out.name(), "LY");
        assert_relative_eq!(out.values()[0], 0.0);
        assert_relative_eq!(out.values()[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(out.values()[2], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn log_rejects_zero_with_position() {
        let err = log_transform(&ts(&[1.0, 0.0, 2.0])).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("index 1") && msg.contains("1380")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lag_shifts_and_truncates() {
        let s = ts(&[1.0, 2.0, 3.0]);
        let l1 = lag(&s, 1).unwrap();
        assert_eq!(l1.values(), &[1.0, 2.0]);
        assert_eq!(l1.start_period(), 1380);
        assert_eq!(lag(&s, 0).unwrap(), s);
        assert!(matches!(lag(&s, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn differences() {
        let s = ts(&[1.0, 3.0, 6.0, 10.0]);
        assert_eq!(difference(&s, 1).unwrap().values(), &[2.0, 3.0, 4.0]);
        assert_eq!(difference(&s, 2).unwrap().values(), &[1.0, 1.0]);
        assert_eq!(difference(&s, 2).unwrap().start_period(), 1381);
        let c = ts(&[5.0; 6]);
        assert!(difference(&c, 1).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(difference(&s, 4).is_err());
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(TimeSeries::new("x", 0, vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::<f64>::new("x", 0, vec![]).is_err());
    }

    fn two_var(n: usize) -> Dataset<f64> {
        let y = TimeSeries::new("Y", 1, (0..n).map(|i| (i * i) as f64).collect()).unwrap();
        let x = TimeSeries::new("X", 1, (0..n).map(|i| (i as f64).sin()).collect()).unwrap();
        Dataset::new(vec![y, x]).unwrap()
    }

    #[test]
    fn design_truncates_by_max_lag() {
        let ds = two_var(5);
        let d = build_design(
            &ds,
            &Term::level("Y", 0),
            &[Term::level("Y", 1), Term::level("X", 0)],
            DesignOptions::default(),
        )
        .unwrap();
        assert_eq!(d.nrows(), 4);
        assert_eq!(d.names, vec!["Y(-1)", "X"]);
        assert_eq!(d.first_period, 2);
        assert_eq!(d.response, vec![1.0, 4.0, 9.0, 16.0]);
        assert_eq!(d.columns[0], vec![0.0, 1.0, 4.0, 9.0]);
    }

    #[test]
    fn design_without_lags_keeps_full_sample() {
        let ds = two_var(5);
        let d = build_design(
            &ds,
            &Term::level("Y", 0),
            &[Term::level("X", 0)],
            DesignOptions::with_intercept(),
        )
        .unwrap();
        assert_eq!(d.nrows(), 5);
        assert_eq!(d.names, vec!["X", "C"]);
    }

    #[test]
    fn design_with_too_many_columns_is_sample_error() {
        let ds = two_var(4);
        let terms = [
            Term::level("X", 0),
            Term::level("Y", 0),
            Term::level("X", 0),
            Term::level("Y", 0),
        ];
        let err = build_design(
            &ds,
            &Term::level("Y", 0),
            &terms,
            DesignOptions::with_intercept(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Sample(_)));
    }

    #[test]
    fn difference_terms_are_labelled_and_aligned() {
        let ds = two_var(7);
        let d = build_design(
            &ds,
            &Term::diff("Y", 0),
            &[Term::level("Y", 1), Term::diff("Y", 1)],
            DesignOptions {
                trend: true,
                ..DesignOptions::with_intercept()
            },
        )
        .unwrap();
        assert_eq!(d.response_name, "D(Y)");
        assert_eq!(d.names, vec!["Y(-1)", "D(Y(-1))", "C", "@TREND"]);
        // rows start at dataset index 2: D(Y)_2 = 4 - 1
        assert_eq!(d.response[0], 3.0);
        assert_eq!(d.columns[0][0], 1.0);
        assert_eq!(d.columns[1][0], 1.0);
        assert_eq!(d.columns[3][0], 2.0);
    }

    #[test]
    fn dataset_intersects_samples_and_rejects_duplicates() {
        let a = TimeSeries::new("A", 2000, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = TimeSeries::new("B", 2001, vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let ds = Dataset::new(vec![a.clone(), b]).unwrap();
        assert_eq!((ds.start(), ds.end()), (2001, 2003));
        assert_eq!(ds.get("A").unwrap().values(), &[2.0, 3.0, 4.0]);
        assert!(Dataset::new(vec![a.clone(), a]).is_err());
    }

    proptest! {
        #[test]
        fn lag_composes(values in prop::collection::vec(-1e6f64..1e6, 3..40), a in 0usize..10, b in 0usize..10) {
            let s = ts(&values);
            prop_assume!(a + b < s.len());
            let lhs = lag(&lag(&s, a).unwrap(), b).unwrap();
            prop_assert_eq!(lhs, lag(&s, a + b).unwrap());
        }

        #[test]
        fn difference_is_level_minus_lag(values in prop::collection::vec(-1e6f64..1e6, 2..40)) {
            let s = ts(&values);
            let d = difference(&s, 1).unwrap();
            let l = lag(&s, 1).unwrap();
            for (p, dv) in d.periods().zip(d.values()) {
                prop_assert_eq!(*dv, s.at(p).unwrap() - l.at(p).unwrap());
            }
        }

        #[test]
        fn log_then_exp_round_trips(values in prop::collection::vec(1e-6f64..1e9, 1..40)) {
            let s = ts(&values);
            let back = log_transform(&s).unwrap();
            for (orig, l) in values.iter().zip(back.values()) {
                prop_assert!(((l.exp() - orig) / orig).abs() < 1e-12);
            }
        }

        #[test]
        fn design_is_deterministic(n in 10usize..30, lag_y in 0usize..3, lag_x in 0usize..3) {
            let ds = two_var(n);
            let terms = [Term::level("Y", lag_y + 1), Term::level("X", lag_x)];
            let a = build_design(&ds, &Term::level("Y", 0), &terms, DesignOptions::with_intercept()).unwrap();
            let b = build_design(&ds, &Term::level("Y", 0), &terms, DesignOptions::with_intercept()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

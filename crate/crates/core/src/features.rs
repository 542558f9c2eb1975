//! Rolling volatility features, the seven-input/two-output dataset,
//! min-max scaling and chronological splits.

use std::fmt;

use chrono::NaiveDate;
use thiserror::Error;

use crate::market_data::{self, AlignedPanel, MarketDataError, Symbol};
use crate::matrix::Matrix;

pub const DEFAULT_WINDOW: usize = 20;
pub const TRADING_DAYS_PER_YEAR: usize = 252;
pub const DEFAULT_VALIDATION_FRACTION: f64 = 0.15;

/// Input columns, in dataset order. VIX indices are raw levels, the rest are
/// rolling volatilities of the named instrument.
pub const INPUT_SOURCES: [Symbol; 7] = [
    Symbol::IndiaVix,
    Symbol::CboeVix,
    Symbol::Crude,
    Symbol::Djia,
    Symbol::Dax,
    Symbol::HangSeng,
    Symbol::Nikkei,
];
pub const TARGET_SOURCES: [Symbol; 2] = [Symbol::Nifty, Symbol::Gold];

pub const INPUT_NAMES: [&str; 7] = [
    "INDIAVIX", "CBOEVIX", "CRUDESDR", "DJIASDR", "DAXSDR", "HANGSDR", "NIKKEISDR",
];
pub const TARGET_NAMES: [&str; 2] = ["NIFTYSDR", "GOLDSDR"];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("rolling window must be at least 2, got {0}")]
    WindowTooSmall(usize),
    #[error("panel has no {0} column")]
    MissingInstrument(Symbol),
    #[error(transparent)]
    MarketData(#[from] MarketDataError),
    #[error("column {0} is constant; cannot scale")]
    ConstantColumn(usize),
    #[error("column {column} expects {expected} values, got {got}")]
    WidthMismatch {
        column: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("validation fraction {0} outside [0, 0.5]")]
    BadFraction(f64),
    #[error("no training rows in {0}")]
    EmptyTrain(DateRange),
    #[error("no test rows in {0}")]
    EmptyTest(DateRange),
    #[error("dataset CSV line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("dataset rows are not strictly increasing by date")]
    UnsortedDates,
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

/// Trailing-window sample standard deviation of `returns`, annualized by
/// `sqrt(periods_per_year)`. Element `k` covers `returns[k..k + window]`.
pub fn rolling_volatility(returns: &[f64], window: usize, periods_per_year: usize) -> Result<Vec<f64>> {
    if window < 2 {
        return Err(FeatureError::WindowTooSmall(window));
    }
    if returns.len() < window {
        return Err(FeatureError::TooShort {
            needed: window,
            got: returns.len(),
        });
    }
    let annualize = (periods_per_year as f64).sqrt();
    let n = window as f64;
    Ok(returns
        .windows(window)
        .map(|w| {
            // shifting by the first element makes a constant window exactly zero
            let origin = w[0];
            let mean = w.iter().map(|&r| r - origin).sum::<f64>() / n;
            let ss: f64 = w.iter().map(|&r| (r - origin - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt() * annualize
        })
        .collect())
}

/// Dated annualized volatility, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Percent rolling volatility of one panel column, dated by the last price
/// in each window.
pub fn volatility_series(panel: &AlignedPanel, symbol: Symbol, window: usize) -> Result<VolatilitySeries> {
    let prices = panel
        .column(symbol)
        .ok_or(FeatureError::MissingInstrument(symbol))?;
    let returns = market_data::log_returns(prices)?;
    let values: Vec<f64> = rolling_volatility(&returns, window, TRADING_DAYS_PER_YEAR)?
        .into_iter()
        .map(|v| v * 100.0)
        .collect();
    Ok(VolatilitySeries {
        name: vol_name(symbol),
        dates: panel.dates()[window..].to_vec(),
        values,
    })
}

fn vol_name(symbol: Symbol) -> String {
    match symbol {
        Symbol::HangSeng => "HANGSDR".into(),
        s => format!("{s}SDR"),
    }
}

/// Inputs and targets on a shared date index.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    pub dates: Vec<NaiveDate>,
    pub x: Matrix,
    pub y: Matrix,
}

impl FeatureDataset {
    /// Panics when row counts disagree.
    pub fn new(dates: Vec<NaiveDate>, x: Matrix, y: Matrix) -> Self {
        assert_eq!(dates.len(), x.rows(), "dates vs input rows");
        assert_eq!(dates.len(), y.rows(), "dates vs target rows");
        Self { dates, x, y }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn rows_in(&self, range: DateRange) -> std::ops::Range<usize> {
        let lo = self.dates.partition_point(|d| *d < range.start);
        let hi = self.dates.partition_point(|d| *d <= range.end);
        lo..hi.max(lo)
    }

    pub fn select(&self, rows: std::ops::Range<usize>) -> Self {
        Self {
            dates: self.dates[rows.clone()].to_vec(),
            x: self.x.select_rows(rows.clone()),
            y: self.y.select_rows(rows),
        }
    }

    /// One named column (`INDIAVIX`, `NIFTYSDR`, ...) as a dated series.
    pub fn series(&self, name: &str) -> Option<VolatilitySeries> {
        let values = if let Some(j) = INPUT_NAMES.iter().position(|n| *n == name) {
            self.x.column(j)
        } else {
            self.y.column(TARGET_NAMES.iter().position(|n| *n == name)?)
        };
        Some(VolatilitySeries {
            name: name.to_string(),
            dates: self.dates.clone(),
            values,
        })
    }

    /// Audit export with the fixed nine-column header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date");
        for name in INPUT_NAMES.iter().chain(&TARGET_NAMES) {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, date) in self.dates.iter().enumerate() {
            out.push_str(&date.format("%Y-%m-%d").to_string());
            for v in self.x.row(i).iter().chain(self.y.row(i)) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let expected: Vec<&str> = std::iter::once("date")
            .chain(INPUT_NAMES)
            .chain(TARGET_NAMES)
            .collect();
        match lines.next() {
            Some((_, header)) if header.split(',').map(str::trim).eq(expected.iter().copied()) => {}
            Some((line, header)) => {
                return Err(FeatureError::Parse {
                    line,
                    reason: format!("unexpected header `{header}`"),
                })
            }
            None => return Err(FeatureError::Parse { line: 1, reason: "empty file".into() }),
        }

        let (n_in, n_out) = (INPUT_NAMES.len(), TARGET_NAMES.len());
        let mut dates = Vec::new();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (line, row) in lines {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != 1 + n_in + n_out {
                return Err(FeatureError::Parse {
                    line,
                    reason: format!("expected {} fields, got {}", 1 + n_in + n_out, fields.len()),
                });
            }
            let date = NaiveDate::parse_from_str(fields[0], "%Y-%m-%d").map_err(|e| FeatureError::Parse {
                line,
                reason: format!("bad date `{}`: {e}", fields[0]),
            })?;
            let mut values = Vec::with_capacity(n_in + n_out);
            for f in &fields[1..] {
                let v: f64 = f.parse().map_err(|_| FeatureError::Parse {
                    line,
                    reason: format!("bad number `{f}`"),
                })?;
                if !v.is_finite() {
                    return Err(FeatureError::Parse {
                        line,
                        reason: format!("non-finite value `{f}`"),
                    });
                }
                values.push(v);
            }
            dates.push(date);
            x.extend_from_slice(&values[..n_in]);
            y.extend_from_slice(&values[n_in..]);
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FeatureError::UnsortedDates);
        }
        let n = dates.len();
        Ok(Self::new(dates, Matrix::from_vec(n, n_in, x), Matrix::from_vec(n, n_out, y)))
    }
}

/// Assembles the dataset from a panel holding all nine instruments.
///
/// A panel of `L` rows yields `L - window` dataset rows: one is lost to
/// differencing and `window - 1` to the rolling standard deviation.
pub fn build_dataset(panel: &AlignedPanel, window: usize) -> Result<FeatureDataset> {
    for symbol in INPUT_SOURCES.iter().chain(&TARGET_SOURCES) {
        if panel.column(*symbol).is_none() {
            return Err(FeatureError::MissingInstrument(*symbol));
        }
    }
    if window < 2 {
        return Err(FeatureError::WindowTooSmall(window));
    }
    if panel.len() <= window {
        return Err(FeatureError::TooShort {
            needed: window + 1,
            got: panel.len(),
        });
    }

    let column = |symbol: Symbol| -> Result<Vec<f64>> {
        if symbol.is_vix() {
            Ok(panel.column(symbol).expect("checked above")[window..].to_vec())
        } else {
            Ok(volatility_series(panel, symbol, window)?.values)
        }
    };
    let inputs = INPUT_SOURCES.iter().map(|&s| column(s)).collect::<Result<Vec<_>>>()?;
    let targets = TARGET_SOURCES.iter().map(|&s| column(s)).collect::<Result<Vec<_>>>()?;

    let n = panel.len() - window;
    let interleave = |cols: &[Vec<f64>]| {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    };
    Ok(FeatureDataset::new(
        panel.dates()[window..].to_vec(),
        interleave(&inputs),
        interleave(&targets),
    ))
}

/// Per-column affine map of `[min, max]` onto `[-1, 1]`. Values outside the
/// fitted range extrapolate linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Scaler {
    pub fn fit(m: &Matrix) -> Result<Self> {
        if m.rows() < 2 {
            return Err(FeatureError::TooShort {
                needed: 2,
                got: m.rows(),
            });
        }
        let mut min = vec![f64::INFINITY; m.cols()];
        let mut max = vec![f64::NEG_INFINITY; m.cols()];
        for row in m.iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        if let Some(j) = (0..m.cols()).find(|&j| max[j] <= min[j]) {
            return Err(FeatureError::ConstantColumn(j));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn width(&self) -> usize {
        self.min.len()
    }

    pub fn transform_value(&self, j: usize, v: f64) -> f64 {
        2.0 * (v - self.min[j]) / (self.max[j] - self.min[j]) - 1.0
    }

    pub fn inverse_value(&self, j: usize, s: f64) -> f64 {
        (s + 1.0) * 0.5 * (self.max[j] - self.min[j]) + self.min[j]
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        self.apply(m, Self::transform_value)
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Result<Matrix> {
        self.apply(m, Self::inverse_value)
    }

    fn apply(&self, m: &Matrix, f: fn(&Self, usize, f64) -> f64) -> Result<Matrix> {
        if m.cols() != self.width() {
            return Err(FeatureError::WidthMismatch {
                column: "scaler",
                expected: self.width(),
                got: m.cols(),
            });
        }
        let mut out = m.clone();
        for i in 0..m.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = f(self, j, *v);
            }
        }
        Ok(out)
    }
}

/// Fits independent scalers for inputs and targets. Callers pass training
/// rows only.
pub fn fit_scaler(x: &Matrix, y: &Matrix) -> Result<(Scaler, Scaler)> {
    Ok((Scaler::fit(x)?, Scaler::fit(y)?))
}

/// Inclusive calendar interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..={}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: FeatureDataset,
    pub validation: FeatureDataset,
    pub test: FeatureDataset,
}

/// Train rows come from `train_range`, with the chronologically last
/// `ceil(fraction * count)` of them held out for validation. The test range
/// may precede or overlap the training range.
pub fn chronological_split(
    ds: &FeatureDataset,
    train_range: DateRange,
    test_range: DateRange,
    validation_fraction: f64,
) -> Result<Split> {
    if !(0.0..=0.5).contains(&validation_fraction) {
        return Err(FeatureError::BadFraction(validation_fraction));
    }
    let train_rows = ds.rows_in(train_range);
    let test_rows = ds.rows_in(test_range);
    let n_val = (validation_fraction * train_rows.len() as f64).ceil() as usize;
    if train_rows.len() <= n_val {
        return Err(FeatureError::EmptyTrain(train_range));
    }
    if test_rows.is_empty() {
        return Err(FeatureError::EmptyTest(test_range));
    }
    let cut = train_rows.end - n_val;
    Ok(Split {
        train: ds.select(train_rows.start..cut),
        validation: ds.select(cut..train_rows.end),
        test: ds.select(test_rows),
    })
}

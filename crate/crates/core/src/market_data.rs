//! Close-price CSV ingestion and calendar alignment.
//!
//! Input files are UTF-8 with a `date,close` header, one row per trading day,
//! dates as `YYYY-MM-DD`. Lines starting with `#` and blank lines are skipped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MarketDataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected header `date,close`, found `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: usize, date: NaiveDate },
    #[error("no price rows")]
    EmptyFile,
    #[error("unknown instrument symbol `{0}`")]
    UnknownSymbol(String),
    #[error("alignment needs at least two series, got {0}")]
    TooFewSeries(usize),
    #[error("instrument {0} supplied more than once")]
    DuplicateSymbol(Symbol),
    #[error("series have no dates in common")]
    EmptyIntersection,
    #[error("need at least two prices, got {0}")]
    TooShort(usize),
    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("start date {start} is after end date {end}")]
    InvertedWindow { start: NaiveDate, end: NaiveDate },
    #[error("no rows between {start} and {end}")]
    EmptyWindow { start: NaiveDate, end: NaiveDate },
}

pub type Result<T, E = MarketDataError> = std::result::Result<T, E>;

/// The nine instruments the forecasting model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Nifty,
    Gold,
    Crude,
    Djia,
    Dax,
    HangSeng,
    Nikkei,
    IndiaVix,
    CboeVix,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::Nifty,
        Symbol::Gold,
        Symbol::Crude,
        Symbol::Djia,
        Symbol::Dax,
        Symbol::HangSeng,
        Symbol::Nikkei,
        Symbol::IndiaVix,
        Symbol::CboeVix,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Nifty => "NIFTY",
            Symbol::Gold => "GOLD",
            Symbol::Crude => "CRUDE",
            Symbol::Djia => "DJIA",
            Symbol::Dax => "DAX",
            Symbol::HangSeng => "HANGSENG",
            Symbol::Nikkei => "NIKKEI",
            Symbol::IndiaVix => "INDIAVIX",
            Symbol::CboeVix => "CBOEVIX",
        }
    }

    /// Implied-volatility indices enter the model as raw levels.
    pub fn is_vix(self) -> bool {
        matches!(self, Symbol::IndiaVix | Symbol::CboeVix)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Symbol {
    type Err = MarketDataError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Symbol::ALL
            .into_iter()
            .find(|sym| sym.as_str() == upper)
            .ok_or_else(|| MarketDataError::UnknownSymbol(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub close: f64,
}

/// Close prices for one instrument, strictly increasing by date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    symbol: Symbol,
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    /// Sorts the bars and validates them. Rejects duplicates, non-positive
    /// closes and empty input.
    pub fn new(symbol: Symbol, mut bars: Vec<PriceBar>) -> Result<Self> {
        if bars.is_empty() {
            return Err(MarketDataError::EmptyFile);
        }
        for (i, bar) in bars.iter().enumerate() {
            if !(bar.close.is_finite() && bar.close > 0.0) {
                return Err(MarketDataError::NonPositivePrice {
                    index: i,
                    value: bar.close,
                });
            }
        }
        bars.sort_by_key(|b| b.date);
        if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(MarketDataError::DuplicateDate {
                line: 0,
                date: w[0].date,
            });
        }
        Ok(Self { symbol, bars })
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    /// Serializes back to the `date,close` format. Closes use the shortest
    /// representation that parses back to the identical `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,close\n");
        for bar in &self.bars {
            out.push_str(&format!("{},{}\n", bar.date.format("%Y-%m-%d"), bar.close));
        }
        out
    }
}

/// Reads one instrument file from disk.
pub fn parse_price_csv(path: impl AsRef<Path>, symbol: Symbol) -> Result<PriceSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MarketDataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_price_str(&text, symbol)
}

pub fn parse_price_str(text: &str, symbol: Symbol) -> Result<PriceSeries> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match rows.next() {
        None => return Err(MarketDataError::EmptyFile),
        Some((line, header)) => {
            let cols: Vec<&str> = header.split(',').map(str::trim).collect();
            if cols != ["date", "close"] {
                return Err(MarketDataError::BadHeader {
                    line,
                    found: header.to_string(),
                });
            }
        }
    }

    let mut bars = Vec::new();
    let mut seen: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for (line, row) in rows {
        let malformed = |reason: String| MarketDataError::MalformedRow { line, reason };
        let mut fields = row.split(',').map(str::trim);
        let (Some(date), Some(close), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed(format!("expected 2 fields in `{row}`")));
        };
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|e| malformed(format!("bad date `{date}`: {e}")))?;
        let close: f64 = close
            .parse()
            .map_err(|_| malformed(format!("non-numeric close `{close}`")))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(malformed(format!("close must be positive, got {close}")));
        }
        if seen.insert(date, line).is_some() {
            return Err(MarketDataError::DuplicateDate { line, date });
        }
        bars.push(PriceBar { date, close });
    }
    PriceSeries::new(symbol, bars)
}

/// Several instruments on a shared trading calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    dates: Vec<NaiveDate>,
    columns: BTreeMap<Symbol, Vec<f64>>,
    dropped_rows: BTreeMap<Symbol, usize>,
}

impl AlignedPanel {
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, symbol: Symbol) -> Option<&[f64]> {
        self.columns.get(&symbol).map(Vec::as_slice)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.columns.keys().copied()
    }

    /// Rows each instrument lost to the intersection join.
    pub fn dropped_rows(&self) -> &BTreeMap<Symbol, usize> {
        &self.dropped_rows
    }

    /// Splits the panel back into one series per instrument.
    pub fn to_series(&self) -> Vec<PriceSeries> {
        self.columns
            .iter()
            .map(|(&symbol, closes)| {
                let bars = self
                    .dates
                    .iter()
                    .zip(closes)
                    .map(|(&date, &close)| PriceBar { date, close })
                    .collect();
                PriceSeries { symbol, bars }
            })
            .collect()
    }

    /// `symbol,rows_in,rows_kept,rows_dropped`, one line per instrument.
    pub fn alignment_report_csv(&self) -> String {
        let mut out = String::from("symbol,rows_in,rows_kept,rows_dropped\n");
        for (symbol, dropped) in &self.dropped_rows {
            let kept = self.dates.len();
            out.push_str(&format!("{symbol},{},{kept},{dropped}\n", kept + dropped));
        }
        out
    }
}

/// Inner-joins the series on date.
pub fn align(series: &[PriceSeries]) -> Result<AlignedPanel> {
    if series.len() < 2 {
        return Err(MarketDataError::TooFewSeries(series.len()));
    }
    let mut symbols = BTreeSet::new();
    for s in series {
        if !symbols.insert(s.symbol) {
            return Err(MarketDataError::DuplicateSymbol(s.symbol));
        }
        if s.is_empty() {
            return Err(MarketDataError::EmptyFile);
        }
    }

    let mut common: BTreeSet<NaiveDate> = series[0].bars.iter().map(|b| b.date).collect();
    for s in &series[1..] {
        let dates: BTreeSet<NaiveDate> = s.bars.iter().map(|b| b.date).collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.is_empty() {
        return Err(MarketDataError::EmptyIntersection);
    }

    let dates: Vec<NaiveDate> = common.iter().copied().collect();
    let mut columns = BTreeMap::new();
    let mut dropped_rows = BTreeMap::new();
    for s in series {
        let col: Vec<f64> = s
            .bars
            .iter()
            .filter(|b| common.contains(&b.date))
            .map(|b| b.close)
            .collect();
        dropped_rows.insert(s.symbol, s.len() - col.len());
        columns.insert(s.symbol, col);
    }
    Ok(AlignedPanel {
        dates,
        columns,
        dropped_rows,
    })
}

/// Natural-log returns `ln(p[i+1] / p[i])`.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(MarketDataError::TooShort(prices.len()));
    }
    if let Some((index, &value)) = prices
        .iter()
        .enumerate()
        .find(|(_, &p)| !(p.is_finite() && p > 0.0))
    {
        return Err(MarketDataError::NonPositivePrice { index, value });
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Rows with `start <= date <= end`. Drop counts carry over from the source.
pub fn slice_window(panel: &AlignedPanel, start: NaiveDate, end: NaiveDate) -> Result<AlignedPanel> {
    if start > end {
        return Err(MarketDataError::InvertedWindow { start, end });
    }
    let lo = panel.dates.partition_point(|d| *d < start);
    let hi = panel.dates.partition_point(|d| *d <= end);
    if lo >= hi {
        return Err(MarketDataError::EmptyWindow { start, end });
    }
    Ok(AlignedPanel {
        dates: panel.dates[lo..hi].to_vec(),
        columns: panel
            .columns
            .iter()
            .map(|(&s, col)| (s, col[lo..hi].to_vec()))
            .collect(),
        dropped_rows: panel.dropped_rows.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn series(symbol: Symbol, dates: &[&str]) -> PriceSeries {
        let bars = dates
            .iter()
            .enumerate()
            .map(|(i, s)| PriceBar {
                date: d(s),
                close: 100.0 + i as f64,
            })
            .collect();
        PriceSeries::new(symbol, bars).unwrap()
    }

    #[test]
    fn parses_minimal_file() {
        let s = parse_price_str("date,close\n2013-01-01,100.0\n2013-01-02,101.5\n", Symbol::Nifty)
            .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.bars()[0].date, d("2013-01-01"));
        assert_eq!(s.bars()[1].close, 101.5);
    }

    #[test]
    fn sorts_out_of_order_rows() {
        let s = parse_price_str(
            "# vendor extract\ndate,close\n2013-01-03,3\n2013-01-01,1\n\n2013-01-02,2\n",
            Symbol::Gold,
        )
        .unwrap();
        assert_eq!(s.closes(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn negative_close_names_line() {
        let err = parse_price_str("date,close\n2013-01-01,100\n2013-01-02,-5.0\n", Symbol::Dax)
            .unwrap_err();
        assert!(matches!(err, MarketDataError::MalformedRow { line: 3, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_rows() {
        let cases = [
            "date,close\n2013-13-01,1\n",
            "date,close\n2013-01-01,abc\n",
            "date,close\n2013-01-01\n",
            "date,close\n2013-01-01,0\n",
        ];
        for text in cases {
            let err = parse_price_str(text, Symbol::Dax).unwrap_err();
            assert!(matches!(err, MarketDataError::MalformedRow { line: 2, .. }), "{text}: {err}");
        }
    }

    #[test]
    fn duplicate_and_empty() {
        let err = parse_price_str("date,close\n2013-01-01,1\n2013-01-01,2\n", Symbol::Dax)
            .unwrap_err();
        assert!(matches!(err, MarketDataError::DuplicateDate { line: 3, .. }));
        assert!(matches!(
            parse_price_str("date,close\n", Symbol::Dax),
            Err(MarketDataError::EmptyFile)
        ));
        assert!(matches!(parse_price_str("# nothing\n", Symbol::Dax), Err(MarketDataError::EmptyFile)));
        assert!(matches!(
            parse_price_str("day,price\n2013-01-01,1\n", Symbol::Dax),
            Err(MarketDataError::BadHeader { line: 1, .. })
        ));
    }

    #[test]
    fn symbol_parsing() {
        for s in Symbol::ALL {
            assert_eq!(s.as_str().parse::<Symbol>().unwrap(), s);
        }
        assert_eq!("hangseng".parse::<Symbol>().unwrap(), Symbol::HangSeng);
        assert!("SPX".parse::<Symbol>().is_err());
    }

    #[test]
    fn align_intersects() {
        let a = series(Symbol::Nifty, &["2013-01-01", "2013-01-02", "2013-01-03"]);
        let b = series(Symbol::Gold, &["2013-01-02", "2013-01-03", "2013-01-04"]);
        let p = align(&[a, b]).unwrap();
        assert_eq!(p.dates(), &[d("2013-01-02"), d("2013-01-03")]);
        assert_eq!(p.dropped_rows()[&Symbol::Nifty], 1);
        assert_eq!(p.dropped_rows()[&Symbol::Gold], 1);
        assert_eq!(p.column(Symbol::Nifty).unwrap(), &[101.0, 102.0]);
        assert_eq!(p.column(Symbol::Gold).unwrap(), &[100.0, 101.0]);
        assert_eq!(
            p.alignment_report_csv(),
            "symbol,rows_in,rows_kept,rows_dropped\nNIFTY,3,2,1\nGOLD,3,2,1\n"
        );
    }

    #[test]
    fn align_identical_and_disjoint() {
        let dates = ["2013-01-01", "2013-01-02"];
        let p = align(&[series(Symbol::Nifty, &dates), series(Symbol::Dax, &dates)]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.dropped_rows().values().all(|&n| n == 0));

        let err = align(&[
            series(Symbol::Nifty, &["2013-01-01"]),
            series(Symbol::Dax, &["2013-01-02"]),
        ])
        .unwrap_err();
        assert!(matches!(err, MarketDataError::EmptyIntersection));
        assert!(matches!(
            align(&[series(Symbol::Nifty, &dates)]),
            Err(MarketDataError::TooFewSeries(1))
        ));
        assert!(matches!(
            align(&[series(Symbol::Nifty, &dates), series(Symbol::Nifty, &dates)]),
            Err(MarketDataError::DuplicateSymbol(Symbol::Nifty))
        ));
    }

    #[test]
    fn log_return_examples() {
        assert_eq!(log_returns(&[100.0, 100.0, 100.0]).unwrap(), vec![0.0, 0.0]);
        let r = log_returns(&[100.0, 100.0 * std::f64::consts::E]).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15);
        // ln(1.1) and ln(0.9), evaluated independently
        let r = log_returns(&[100.0, 110.0, 99.0]).unwrap();
        assert!((r[0] - 0.095_310_179_804_324_87).abs() < 1e-12);
        assert!((r[1] - -0.105_360_515_657_826_3).abs() < 1e-12);
        assert!(matches!(log_returns(&[1.0]), Err(MarketDataError::TooShort(1))));
        assert!(matches!(
            log_returns(&[1.0, 0.0]),
            Err(MarketDataError::NonPositivePrice { index: 1, .. })
        ));
    }

    #[test]
    fn slicing() {
        let dates = ["2013-01-01", "2013-01-02", "2013-01-03"];
        let p = align(&[series(Symbol::Nifty, &dates), series(Symbol::Dax, &dates)]).unwrap();
        assert_eq!(slice_window(&p, d("2013-01-01"), d("2013-01-03")).unwrap(), p);
        let one = slice_window(&p, d("2013-01-02"), d("2013-01-02")).unwrap();
        assert_eq!(one.dates(), &[d("2013-01-02")]);
        assert_eq!(one.column(Symbol::Dax).unwrap(), &[101.0]);
        assert!(matches!(
            slice_window(&p, d("2013-02-01"), d("2013-03-01")),
            Err(MarketDataError::EmptyWindow { .. })
        ));
        assert!(matches!(
            slice_window(&p, d("2013-01-03"), d("2013-01-01")),
            Err(MarketDataError::InvertedWindow { .. })
        ));
    }
}

//! Deterministic synthetic market: nine instruments driven by two latent
//! log-volatility processes (equity and commodity) with cross-correlated
//! shocks, implied-volatility indices tracking the equity factor, and
//! independent per-exchange holidays.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::HarnessError;
use crate::market_data::{PriceBar, PriceSeries, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// One volatility regime over the whole span.
    InRegime,
    /// Calendar 2008 runs at roughly 2.5x the long-run volatility of later
    /// years, so a 2008 test window sits outside the training regime.
    RegimeShift,
}

impl FixtureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FixtureKind::InRegime => "in-regime",
            FixtureKind::RegimeShift => "regime-shift",
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "in-regime" => Ok(FixtureKind::InRegime),
            "regime-shift" => Ok(FixtureKind::RegimeShift),
            _ => Err(format!("unknown fixture `{s}` (expected in-regime or regime-shift)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    pub seed: u64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Chance that a given exchange is closed on a given weekday.
    pub holiday_rate: f64,
}

impl FixtureSpec {
    pub fn new(kind: FixtureKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            start: NaiveDate::from_ymd_opt(2008, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2015, 4, 30).unwrap(),
            holiday_rate: 0.01,
        }
    }
}

pub const DEFAULT_FIXTURE_SEED: u64 = 2015;

struct Loading {
    symbol: Symbol,
    start_price: f64,
    equity: f64,
    commodity: f64,
    /// Idiosyncratic volatility as a fraction of the driving factor's.
    idio: f64,
}

const LOADINGS: [Loading; 7] = [
    Loading { symbol: Symbol::Nifty, start_price: 6100.0, equity: 1.0, commodity: 0.0, idio: 0.30 },
    Loading { symbol: Symbol::Djia, start_price: 13200.0, equity: 0.8, commodity: 0.0, idio: 0.30 },
    Loading { symbol: Symbol::Dax, start_price: 8000.0, equity: 1.0, commodity: 0.0, idio: 0.35 },
    Loading { symbol: Symbol::HangSeng, start_price: 27500.0, equity: 1.1, commodity: 0.0, idio: 0.35 },
    Loading { symbol: Symbol::Nikkei, start_price: 15300.0, equity: 0.95, commodity: 0.0, idio: 0.40 },
    Loading { symbol: Symbol::Crude, start_price: 96.0, equity: 0.2, commodity: 1.6, idio: 0.40 },
    Loading { symbol: Symbol::Gold, start_price: 840.0, equity: 0.0, commodity: 0.85, idio: 0.25 },
];

/// Long-run annualized volatility of the equity and commodity factors.
const EQUITY_VOL: f64 = 0.18;
const COMMODITY_VOL: f64 = 0.14;
const SHIFT_MULTIPLIER: f64 = 2.5;
/// Daily mean reversion and shock size of the log-volatility processes.
const KAPPA: f64 = 0.03;
const ETA: f64 = 0.08;
const VOL_SHOCK_CORR: f64 = 0.3;
const RETURN_SHOCK_CORR: f64 = 0.2;

fn weekdays(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    let mut d = start;
    while d <= end {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

fn correlated(rng: &mut ChaCha8Rng, rho: f64) -> (f64, f64) {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    (a, rho * a + (1.0 - rho * rho).sqrt() * b)
}

/// The nine price series, sorted by [`Symbol::ALL`] order.
pub fn generate(spec: &FixtureSpec) -> Vec<PriceSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let days = weekdays(spec.start, spec.end);
    let shifted = |d: NaiveDate| spec.kind == FixtureKind::RegimeShift && d.year() == 2008;
    let level = |base: f64, d: NaiveDate| if shifted(d) { base * SHIFT_MULTIPLIER } else { base };

    let mut log_vol_e = level(EQUITY_VOL, days[0]).ln();
    let mut log_vol_c = level(COMMODITY_VOL, days[0]).ln();
    let mut vix_noise = [0.0f64; 2];
    let mut prices: Vec<f64> = LOADINGS.iter().map(|l| l.start_price).collect();
    let mut bars: Vec<Vec<PriceBar>> = vec![Vec::with_capacity(days.len()); Symbol::ALL.len()];
    let index = |s: Symbol| Symbol::ALL.iter().position(|&x| x == s).unwrap();

    for (t, &date) in days.iter().enumerate() {
        if t > 0 {
            let (ue, uc) = correlated(&mut rng, VOL_SHOCK_CORR);
            log_vol_e += KAPPA * (level(EQUITY_VOL, date).ln() - log_vol_e) + ETA * ue;
            log_vol_c += KAPPA * (level(COMMODITY_VOL, date).ln() - log_vol_c) + ETA * uc;
            let daily_e = log_vol_e.exp() / 252f64.sqrt();
            let daily_c = log_vol_c.exp() / 252f64.sqrt();
            let (ze, zc) = correlated(&mut rng, RETURN_SHOCK_CORR);
            let (fe, fc) = (daily_e * ze, daily_c * zc);
            for (l, p) in LOADINGS.iter().zip(prices.iter_mut()) {
                let driver = if l.commodity > 0.0 { daily_c } else { daily_e };
                let z: f64 = rng.sample(StandardNormal);
                let r = l.equity * fe + l.commodity * fc + l.idio * driver * z;
                *p *= r.exp();
            }
            for n in vix_noise.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *n = 0.9 * *n + 0.02 * z;
            }
        }
        let vol_e = log_vol_e.exp() * 100.0;
        let vix = [1.15 * vol_e * vix_noise[0].exp(), 0.95 * vol_e * vix_noise[1].exp()];
        let mut quote = |symbol: Symbol, close: f64, rng: &mut ChaCha8Rng| {
            // the first and last days always trade so every series spans the range
            let open = t == 0 || t + 1 == days.len() || rng.random::<f64>() >= spec.holiday_rate;
            if open {
                bars[index(symbol)].push(PriceBar { date, close });
            }
        };
        for (l, &p) in LOADINGS.iter().zip(&prices) {
            quote(l.symbol, p, &mut rng);
        }
        quote(Symbol::IndiaVix, vix[0], &mut rng);
        quote(Symbol::CboeVix, vix[1], &mut rng);
    }

    Symbol::ALL
        .iter()
        .zip(bars)
        .map(|(&s, b)| PriceSeries::new(s, b).expect("generated bars are valid"))
        .collect()
}

/// File name used for an instrument inside a data directory.
pub fn instrument_file_name(symbol: Symbol) -> String {
    format!("{}.csv", symbol.as_str())
}

/// Writes `<SYMBOL>.csv` for all nine instruments into `dir`.
pub fn write_fixture(spec: &FixtureSpec, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut out = Vec::new();
    for series in generate(spec) {
        let path = dir.join(instrument_file_name(series.symbol()));
        let text = format!(
            "# synthetic {} fixture, seed {}\n{}",
            spec.kind,
            spec.seed,
            series.to_csv()
        );
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

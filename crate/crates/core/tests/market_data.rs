use chrono::{Days, NaiveDate};
use proptest::prelude::*;

use volnet::market_data::{align, log_returns, parse_price_str, PriceBar, PriceSeries, Symbol};

fn day(n: u64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 1).unwrap() + Days::new(n)
}

/// A series present on the days where `mask` is true, with positive closes.
fn series(symbol: Symbol, mask: &[bool], closes: &[f64]) -> Option<PriceSeries> {
    let bars: Vec<PriceBar> = mask
        .iter()
        .zip(closes)
        .enumerate()
        .filter(|(_, (m, _))| **m)
        .map(|(i, (_, &close))| PriceBar { date: day(i as u64), close })
        .collect();
    PriceSeries::new(symbol, bars).ok().filter(|s| !s.is_empty())
}

fn masks() -> impl Strategy<Value = (Vec<Vec<bool>>, Vec<f64>)> {
    (5usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.85), n), 2..5),
            prop::collection::vec(1.0f64..1000.0, n),
        )
    })
}

proptest! {
    #[test]
    fn alignment_keeps_exactly_the_common_dates((mask, closes) in masks()) {
        let all: Vec<PriceSeries> = mask
            .iter()
            .zip(Symbol::ALL)
            .filter_map(|(m, s)| series(s, m, &closes))
            .collect();
        prop_assume!(all.len() == mask.len());
        let common = (0..closes.len()).filter(|&i| mask.iter().all(|m| m[i])).count();
        match align(&all) {
            Ok(panel) => {
                prop_assert_eq!(panel.len(), common);
                for s in &all {
                    prop_assert_eq!(panel.dropped_rows()[&s.symbol()], s.len() - common);
                }
                // realigning the aligned panel changes nothing
                let again = align(&panel.to_series()).unwrap();
                prop_assert_eq!(again.dates(), panel.dates());
                for s in panel.symbols() {
                    prop_assert_eq!(again.column(s), panel.column(s));
                    prop_assert_eq!(again.dropped_rows()[&s], 0);
                }
            }
            Err(_) => prop_assert_eq!(common, 0),
        }
    }

    #[test]
    fn log_returns_compound_back_to_prices(closes in prop::collection::vec(0.01f64..1e5, 2..80)) {
        let r = log_returns(&closes).unwrap();
        prop_assert_eq!(r.len(), closes.len() - 1);
        let total: f64 = r.iter().sum();
        let expected = (closes[closes.len() - 1] / closes[0]).ln();
        prop_assert!((total - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        for (k, v) in r.iter().enumerate() {
            prop_assert!((closes[k] * v.exp() / closes[k + 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_exact(closes in prop::collection::vec(1e-3f64..1e6, 1..40)) {
        let s = series(Symbol::Gold, &vec![true; closes.len()], &closes).unwrap();
        let back = parse_price_str(&s.to_csv(), Symbol::Gold).unwrap();
        prop_assert_eq!(back, s);
    }
}

#[test]
fn alignment_report_counts() {
    let a = series(Symbol::Nifty, &[true, true, true, false], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let b = series(Symbol::Gold, &[true, false, true, true], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let panel = align(&[a, b]).unwrap();
    assert_eq!(panel.len(), 2);
    assert_eq!(
        panel.alignment_report_csv(),
        "symbol,rows_in,rows_kept,rows_dropped\nNIFTY,3,2,1\nGOLD,3,2,1\n"
    );
}

//! Browser bindings for the volnet demo page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the
//! logic is testable without a JS host.

use std::fmt::Write as _;

use wasm_bindgen::prelude::*;

use volnet::features::{self, TRADING_DAYS_PER_YEAR};
use volnet::harness::fixture::{self, FixtureKind, FixtureSpec};
use volnet::harness::svg::{line_chart_svg, regression_svg};
use volnet::harness::{self, ExperimentSpec};
use volnet::{market_data, Algorithm, Architecture, Symbol};

/// Closing prices, one per line. A `date,close` line keeps the last field,
/// so a column pasted from a CSV works as is; a header line is skipped.
pub fn parse_prices(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.rsplit(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if out.is_empty() && i == 0 => {}
            Err(_) => return Err(format!("line {}: `{field}` is not a price", i + 1)),
        }
    }
    Ok(out)
}

/// Newline-separated closes of one fixture instrument, for pre-filling the page.
pub fn sample_prices(symbol: &str, seed: u64) -> Result<String, String> {
    let symbol: Symbol = symbol.parse().map_err(|e| format!("{e}"))?;
    let series = fixture::generate(&FixtureSpec::new(FixtureKind::InRegime, seed));
    let s = series.iter().find(|s| s.symbol() == symbol).expect("fixture covers every symbol");
    let mut out = String::new();
    for bar in s.bars().iter().rev().take(500).rev() {
        writeln!(out, "{},{}", bar.date, bar.close).unwrap();
    }
    Ok(out)
}

pub fn volatility_chart(text: &str, window: usize) -> Result<(String, Vec<f64>), String> {
    let prices = parse_prices(text)?;
    let returns = market_data::log_returns(&prices).map_err(|e| e.to_string())?;
    let vol: Vec<f64> = features::rolling_volatility(&returns, window, TRADING_DAYS_PER_YEAR)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|v| v * 100.0)
        .collect();
    let title = format!("{window}-day annualized volatility (%)");
    Ok((line_chart_svg(&title, "day", &[("volatility", &vol)], false), vol))
}

/// A single trial on the fixture's second experiment window.
pub struct DemoRun {
    pub summary: String,
    pub loss_svg: String,
    pub regression_svg: String,
}

pub fn train_demo(
    architecture: &str,
    algorithm: &str,
    hidden: usize,
    max_epochs: usize,
    seed: u64,
) -> Result<DemoRun, String> {
    let cell: (Architecture, Algorithm, usize) = (architecture.parse()?, algorithm.parse()?, hidden);
    let mut spec = ExperimentSpec::experiment2();
    spec.base_seed = seed;
    spec.train.max_epochs = max_epochs;
    let ds = harness::DataSource::Fixture(FixtureSpec::new(FixtureKind::InRegime, fixture::DEFAULT_FIXTURE_SEED))
        .load(spec.window)
        .map_err(|e| e.to_string())?;
    let trial = harness::run_single_trial(&spec, &ds, cell).map_err(|e| e.to_string())?;
    let m = trial.result.outcome.as_ref().map_err(|e| format!("training diverged: {e}"))?;
    let record = trial.record.as_ref().expect("completed trial has a record");
    let mut curves: Vec<(&str, &[f64])> = vec![("training", &record.train_loss_curve)];
    if !record.validation_loss_curve.is_empty() {
        curves.push(("validation", &record.validation_loss_curve));
    }
    let (reg, _) = regression_svg(
        "Test set",
        &trial.test_actual,
        trial.test_predictions.as_ref().expect("completed trial has predictions"),
        &features::TARGET_NAMES,
    )
    .map_err(|e| e.to_string())?;
    Ok(DemoRun {
        summary: format!(
            "{} {} h={}: {} epochs ({}); test MSE {:.4}, R {:.4}, MAPE {:.2}%",
            cell.0, cell.1, hidden, m.epochs_run, m.stop_reason, m.test.mse, m.test.r, m.test.mape
        ),
        loss_svg: line_chart_svg("Loss per epoch (scaled units)", "epoch", &curves, true),
        regression_svg: reg,
    })
}

#[wasm_bindgen(js_name = samplePrices)]
pub fn sample_prices_js(symbol: &str, seed: u32) -> Result<String, JsValue> {
    sample_prices(symbol, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = volatilitySvg)]
pub fn volatility_svg_js(prices: &str, window: usize) -> Result<String, JsValue> {
    volatility_chart(prices, window).map(|(svg, _)| svg).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub struct TrainResult {
    run: DemoRun,
}

#[wasm_bindgen]
impl TrainResult {
    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.run.summary.clone()
    }

    #[wasm_bindgen(getter, js_name = lossSvg)]
    pub fn loss_svg(&self) -> String {
        self.run.loss_svg.clone()
    }

    #[wasm_bindgen(getter, js_name = regressionSvg)]
    pub fn regression_svg(&self) -> String {
        self.run.regression_svg.clone()
    }
}

#[wasm_bindgen]
pub fn train(architecture: &str, algorithm: &str, hidden: usize, max_epochs: usize, seed: u32) -> Result<TrainResult, JsValue> {
    train_demo(architecture, algorithm, hidden, max_epochs, seed.into())
        .map(|run| TrainResult { run })
        .map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_accept_bare_and_csv_lines() {
        assert_eq!(parse_prices("date,close\n2015-01-01,10\n2015-01-02, 11.5\n\n").unwrap(), vec![10.0, 11.5]);
        assert_eq!(parse_prices("1\n2\n").unwrap(), vec![1.0, 2.0]);
        assert!(parse_prices("1\nx\n").unwrap_err().contains("line 2"));
    }

    #[test]
    fn volatility_of_sample_has_one_point_per_window() {
        let text = sample_prices("NIFTY", 1).unwrap();
        let n = parse_prices(&text).unwrap().len();
        let (svg, vol) = volatility_chart(&text, 20).unwrap();
        assert_eq!(vol.len(), n - 20);
        assert!(svg.starts_with("<svg"));
        assert!(volatility_chart("1\n2\n3\n", 20).is_err());
        assert!(sample_prices("SPX", 1).is_err());
    }

    #[test]
    fn training_produces_both_charts() {
        let run = train_demo("cffn", "lm", 6, 30, 7).unwrap();
        assert!(run.summary.starts_with("CFFN LM h=6"), "{}", run.summary);
        assert!(run.loss_svg.contains("<polyline"));
        assert!(run.regression_svg.contains("R = "));
        assert!(train_demo("RNN", "LM", 6, 30, 7).is_err());
    }
}

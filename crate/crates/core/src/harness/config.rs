//! Flat `key=value` experiment config files.
//!
//! Blank lines and `#` comments are ignored. Every key is optional except
//! that a data source is needed before an experiment can run; unknown keys
//! and repeated keys are errors. Relative paths resolve against the config
//! file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;

use super::fixture::{self, FixtureKind, FixtureSpec};
use super::{ExperimentSpec, HarnessError, Result};
use crate::features::{self, build_dataset, FeatureDataset};
use crate::market_data::{self, align, Symbol};
use crate::network::Architecture;
use crate::train::Algorithm;

pub const KEYS: [&str; 20] = [
    "name",
    "data_dir",
    "dataset",
    "fixture",
    "fixture_seed",
    "window",
    "train_start",
    "train_end",
    "test_start",
    "test_end",
    "validation_fraction",
    "architectures",
    "algorithms",
    "hidden_sizes",
    "base_seed",
    "max_epochs",
    "goal",
    "patience",
    "min_grad",
    "workers",
];

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Directory holding `<SYMBOL>.csv` for all nine instruments.
    Directory(PathBuf),
    /// A previously exported feature dataset.
    Dataset(PathBuf),
    Fixture(FixtureSpec),
}

impl DataSource {
    /// Builds the feature dataset this source describes.
    pub fn load(&self, window: usize) -> Result<FeatureDataset> {
        match self {
            DataSource::Directory(dir) => {
                let panel = align(&read_instruments(dir)?)?;
                Ok(build_dataset(&panel, window)?)
            }
            DataSource::Dataset(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                Ok(FeatureDataset::from_csv(&text)?)
            }
            DataSource::Fixture(spec) => {
                let panel = align(&fixture::generate(spec))?;
                Ok(build_dataset(&panel, window)?)
            }
        }
    }
}

/// Reads all nine instrument files from `dir`.
pub fn read_instruments(dir: &Path) -> Result<Vec<market_data::PriceSeries>> {
    Symbol::ALL
        .iter()
        .map(|&symbol| {
            let path = dir.join(fixture::instrument_file_name(symbol));
            if !path.is_file() {
                return Err(HarnessError::MissingInstrument { symbol, path });
            }
            Ok(market_data::parse_price_csv(&path, symbol)?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spec: ExperimentSpec,
    pub source: Option<DataSource>,
    pub workers: Option<usize>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| HarnessError::Config {
        line,
        reason: format!("{key}: cannot parse `{value}`: {e}"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

fn parse_date(line: usize, key: &str, value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|e| HarnessError::Config {
        line,
        reason: format!("{key}: bad date `{value}`: {e}"),
    })
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Unset keys keep the first experiment's defaults.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut spec = ExperimentSpec {
            name: "experiment".to_string(),
            ..ExperimentSpec::default()
        };
        let mut seen: Vec<&str> = Vec::new();
        let mut sources: Vec<(usize, DataSource)> = Vec::new();
        let mut fixture_seed = fixture::DEFAULT_FIXTURE_SEED;
        let mut workers = None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| HarnessError::Config {
                line,
                reason: format!("expected key=value, found `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|k| **k == key) else {
                return Err(HarnessError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            };
            if seen.contains(&key) {
                return Err(HarnessError::Config {
                    line,
                    reason: format!("key `{key}` repeated"),
                });
            }
            seen.push(key);
            match key {
                "name" => spec.name = value.to_string(),
                "data_dir" => sources.push((line, DataSource::Directory(base_dir.join(value)))),
                "dataset" => sources.push((line, DataSource::Dataset(base_dir.join(value)))),
                "fixture" => {
                    let kind: FixtureKind = parse_value(line, key, value)?;
                    sources.push((line, DataSource::Fixture(FixtureSpec::new(kind, 0))));
                }
                "fixture_seed" => fixture_seed = parse_value(line, key, value)?,
                "window" => spec.window = parse_value(line, key, value)?,
                "train_start" => spec.train_range.start = parse_date(line, key, value)?,
                "train_end" => spec.train_range.end = parse_date(line, key, value)?,
                "test_start" => spec.test_range.start = parse_date(line, key, value)?,
                "test_end" => spec.test_range.end = parse_date(line, key, value)?,
                "validation_fraction" => spec.validation_fraction = parse_value(line, key, value)?,
                "architectures" => spec.architectures = parse_list::<Architecture>(line, key, value)?,
                "algorithms" => spec.algorithms = parse_list::<Algorithm>(line, key, value)?,
                "hidden_sizes" => spec.hidden_sizes = parse_list(line, key, value)?,
                "base_seed" => spec.base_seed = parse_value(line, key, value)?,
                "max_epochs" => spec.train.max_epochs = parse_value(line, key, value)?,
                "goal" => spec.train.goal = parse_value(line, key, value)?,
                "patience" => spec.train.patience = parse_value(line, key, value)?,
                "min_grad" => spec.train.min_grad = parse_value(line, key, value)?,
                "workers" => workers = Some(parse_value::<usize>(line, key, value)?.max(1)),
                _ => unreachable!("key list and match arms agree"),
            }
        }

        if sources.len() > 1 {
            return Err(HarnessError::Config {
                line: sources[1].0,
                reason: "only one of data_dir, dataset and fixture may be given".into(),
            });
        }
        let source = sources.pop().map(|(_, s)| match s {
            DataSource::Fixture(f) => DataSource::Fixture(FixtureSpec {
                seed: fixture_seed,
                ..f
            }),
            other => other,
        });
        if seen.contains(&"fixture_seed") && !matches!(source, Some(DataSource::Fixture(_))) {
            return Err(HarnessError::Config {
                line: 0,
                reason: "fixture_seed given without fixture".into(),
            });
        }
        spec.validate()?;
        Ok(Self { spec, source, workers })
    }

    pub fn source(&self) -> Result<&DataSource> {
        self.source
            .as_ref()
            .ok_or(HarnessError::MissingKey("data_dir, dataset or fixture"))
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// The spec as config-file text. Trainer hyperparameters, which config
/// files cannot change, follow as comments.
pub fn spec_text(spec: &ExperimentSpec) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("name", spec.name.clone());
    kv("window", spec.window.to_string());
    kv("train_start", spec.train_range.start.to_string());
    kv("train_end", spec.train_range.end.to_string());
    kv("test_start", spec.test_range.start.to_string());
    kv("test_end", spec.test_range.end.to_string());
    kv("validation_fraction", spec.validation_fraction.to_string());
    kv("architectures", join(&spec.architectures));
    kv("algorithms", join(&spec.algorithms));
    kv("hidden_sizes", join(&spec.hidden_sizes));
    kv("base_seed", spec.base_seed.to_string());
    kv("max_epochs", spec.train.max_epochs.to_string());
    kv("goal", spec.train.goal.to_string());
    kv("patience", spec.train.patience.to_string());
    kv("min_grad", spec.train.min_grad.to_string());
    out.push_str("\n# trainer hyperparameters\n");
    for &alg in &spec.algorithms {
        for (name, value) in spec.trainer(alg).describe() {
            writeln!(out, "# {alg}.{name}={value}").unwrap();
        }
    }
    out.push_str(&format!(
        "\n# inputs: {}\n# targets: {}\n# trading days per year: {}\n",
        features::INPUT_NAMES.join(","),
        features::TARGET_NAMES.join(","),
        features::TRADING_DAYS_PER_YEAR
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_defaults() {
        let cfg = ExperimentConfig::parse(
            "# comment\nname=exp2\nfixture=regime-shift\nfixture_seed=9\ntrain_end=2014-09-30\n\
             test_start=2014-10-01\ntest_end=2014-12-31\nalgorithms=LM, BFGS\nhidden_sizes=5\nworkers=3\n",
            Path::new("/cfg"),
        )
        .unwrap();
        assert_eq!(cfg.spec.name, "exp2");
        assert_eq!(cfg.spec.algorithms, vec![Algorithm::Lm, Algorithm::Bfgs]);
        assert_eq!(cfg.spec.hidden_sizes, vec![5]);
        assert_eq!(cfg.spec.grid_size(), 4);
        assert_eq!(cfg.spec.train_range, ExperimentSpec::experiment2().train_range);
        assert_eq!(cfg.workers, Some(3));
        match cfg.source {
            Some(DataSource::Fixture(f)) => assert_eq!((f.kind, f.seed), (FixtureKind::RegimeShift, 9)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let cfg = ExperimentConfig::parse("data_dir=data\n", Path::new("/a/b")).unwrap();
        assert_eq!(cfg.source, Some(DataSource::Directory(PathBuf::from("/a/b/data"))));
    }

    #[test]
    fn rejects_unknown_repeated_and_conflicting_keys() {
        let err = ExperimentConfig::parse("name=x\nlearning_rate=3\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, HarnessError::UnknownKey { line: 2, ref key } if key == "learning_rate"));
        assert!(ExperimentConfig::parse("name=a\nname=b\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("fixture=in-regime\ndata_dir=x\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("no equals sign\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("hidden_sizes=20,x\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("algorithms=SGD\n", Path::new(".")).is_err());
    }

    #[test]
    fn missing_source_is_reported_on_use() {
        let cfg = ExperimentConfig::parse("name=x\n", Path::new(".")).unwrap();
        assert!(matches!(cfg.source(), Err(HarnessError::MissingKey(_))));
    }

    #[test]
    fn spec_text_round_trips() {
        let mut spec = ExperimentSpec::experiment3();
        spec.hidden_sizes = vec![7, 3];
        spec.train.goal = 1.5e-6;
        spec.validation_fraction = 0.2;
        let text = spec_text(&spec);
        assert!(text.contains("# LM.mu0=0.001"));
        let back = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
        assert_eq!(back.spec, spec);
    }
}

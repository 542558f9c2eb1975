//! The architecture × algorithm × hidden-size trial grid and everything
//! around it: config files, reports, SVG plots and the synthetic market.

pub mod config;
pub mod fixture;
pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::NaiveDate;
use thiserror::Error;

use crate::evaluation::{self, DescriptiveStats, EvalError, Metrics, TTestResult};
use crate::features::{self, chronological_split, fit_scaler, DateRange, FeatureDataset, FeatureError};
use crate::market_data::MarketDataError;
use crate::matrix::Matrix;
use crate::network::{Architecture, Network, Topology};
use crate::train::{self, Algorithm, Hyperparameters, StopReason, TrainConfig, TrainError, TrainRecord, TrainerSpec};
use crate::{ErrorKind, Symbol};

pub use config::{DataSource, ExperimentConfig};
pub use fixture::{FixtureKind, FixtureSpec};
pub use report::{emit_error_report, emit_report, parse_trials_csv, tables_markdown, trials_csv};
pub use svg::{emit_overlay_plot, emit_regression_plot, emit_test_mse_plot, ols_fit, PlotFiles};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config is missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("missing instrument {symbol}: cannot read {path}")]
    MissingInstrument { symbol: Symbol, path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("series {0} and {1} share no dates")]
    EmptyIntersection(String, String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("trials.csv line {line}: {reason}")]
    TrialsParse { line: usize, reason: String },
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    MarketData(#[from] MarketDataError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Evaluation(#[from] EvalError),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            HarnessError::Config { .. }
            | HarnessError::UnknownKey { .. }
            | HarnessError::MissingKey(_)
            | HarnessError::InvalidSpec(_) => ErrorKind::Usage,
            HarnessError::Io { .. } => ErrorKind::Io,
            HarnessError::MarketData(MarketDataError::Io { .. }) => ErrorKind::Io,
            HarnessError::MissingInstrument { .. }
            | HarnessError::EmptyIntersection(..)
            | HarnessError::ShapeMismatch(_)
            | HarnessError::TrialsParse { .. }
            | HarnessError::Features(_)
            | HarnessError::MarketData(_) => ErrorKind::Data,
            HarnessError::Train(_) | HarnessError::Evaluation(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub const DEFAULT_HIDDEN_SIZES: [usize; 3] = [20, 30, 40];
pub const DEFAULT_BASE_SEED: u64 = 20150410;

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid literal date")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub train_range: DateRange,
    pub test_range: DateRange,
    pub validation_fraction: f64,
    pub architectures: Vec<Architecture>,
    pub algorithms: Vec<Algorithm>,
    pub hidden_sizes: Vec<usize>,
    pub base_seed: u64,
    /// Rolling window the dataset was built with; recorded for reproducibility.
    pub window: usize,
    /// Shared stopping protocol; the seed is replaced per trial.
    pub train: TrainConfig,
    pub hyper: Hyperparameters,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self::experiment1()
    }
}

impl ExperimentSpec {
    fn with_ranges(name: &str, train_range: DateRange, test_range: DateRange) -> Self {
        Self {
            name: name.to_string(),
            train_range,
            test_range,
            validation_fraction: features::DEFAULT_VALIDATION_FRACTION,
            architectures: Architecture::ALL.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            hidden_sizes: DEFAULT_HIDDEN_SIZES.to_vec(),
            base_seed: DEFAULT_BASE_SEED,
            window: features::DEFAULT_WINDOW,
            train: TrainConfig::default(),
            hyper: Hyperparameters::default(),
        }
    }

    /// Train on 2013–2014, forecast January to April 2015.
    pub fn experiment1() -> Self {
        Self::with_ranges(
            "experiment1",
            DateRange::new(date(2013, 1, 1), date(2014, 12, 31)),
            DateRange::new(date(2015, 1, 1), date(2015, 4, 30)),
        )
    }

    /// Train on January 2013 to September 2014, forecast the rest of 2014.
    pub fn experiment2() -> Self {
        Self::with_ranges(
            "experiment2",
            DateRange::new(date(2013, 1, 1), date(2014, 9, 30)),
            DateRange::new(date(2014, 10, 1), date(2014, 12, 31)),
        )
    }

    /// Train on 2013–2014, forecast back into 2008.
    pub fn experiment3() -> Self {
        Self::with_ranges(
            "experiment3",
            DateRange::new(date(2013, 1, 1), date(2014, 12, 31)),
            DateRange::new(date(2008, 1, 1), date(2008, 12, 31)),
        )
    }

    pub fn grid_size(&self) -> usize {
        self.architectures.len() * self.algorithms.len() * self.hidden_sizes.len()
    }

    /// Grid cells in canonical order: architecture, then algorithm, then
    /// hidden size, each in the order listed.
    pub fn grid(&self) -> Vec<(Architecture, Algorithm, usize)> {
        let mut out = Vec::with_capacity(self.grid_size());
        for &a in &self.architectures {
            for &g in &self.algorithms {
                for &h in &self.hidden_sizes {
                    out.push((a, g, h));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.architectures.is_empty() || self.algorithms.is_empty() || self.hidden_sizes.is_empty() {
            return bad("architectures, algorithms and hidden_sizes must be non-empty".into());
        }
        if has_duplicates(&self.architectures) || has_duplicates(&self.algorithms) || has_duplicates(&self.hidden_sizes) {
            return bad("grid lists must not repeat entries".into());
        }
        if self.hidden_sizes.contains(&0) {
            return bad("hidden sizes must be positive".into());
        }
        if self.train_range.start > self.train_range.end || self.test_range.start > self.test_range.end {
            return bad("date ranges must have start <= end".into());
        }
        if !(0.0..=0.5).contains(&self.validation_fraction) {
            return bad(format!("validation_fraction {} outside [0, 0.5]", self.validation_fraction));
        }
        self.train.validate()?;
        for &g in &self.algorithms {
            self.trainer(g).validate()?;
        }
        Ok(())
    }

    pub fn trainer(&self, algorithm: Algorithm) -> TrainerSpec {
        TrainerSpec {
            algorithm,
            hyper: self.hyper.clone(),
        }
    }
}

fn has_duplicates<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one grid cell. Depends only on the tuple, never on execution
/// order or on which other cells are in the grid.
pub fn trial_seed(base_seed: u64, architecture: Architecture, algorithm: Algorithm, hidden: usize) -> u64 {
    let arch = Architecture::ALL.iter().position(|&a| a == architecture).unwrap() as u64 + 1;
    let alg = Algorithm::ALL.iter().position(|&a| a == algorithm).unwrap() as u64 + 1;
    let mut h = splitmix(base_seed);
    for part in [arch, alg, hidden as u64] {
        h = splitmix(h ^ part);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub train: Metrics,
    pub test: Metrics,
    pub epochs_run: usize,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub architecture: Architecture,
    pub algorithm: Algorithm,
    pub hidden_size: usize,
    pub seed: u64,
    /// `Err` holds the reason a trial diverged or produced unusable output.
    pub outcome: Result<TrialMetrics, String>,
}

impl TrialResult {
    pub fn metrics(&self) -> Option<&TrialMetrics> {
        self.outcome.as_ref().ok()
    }

    pub fn diverged(&self) -> bool {
        self.outcome.is_err()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Mse,
    R,
    Mape,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Mse, MetricKind::R, MetricKind::Mape];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Mse => "MSE",
            MetricKind::R => "R",
            MetricKind::Mape => "MAPE",
        }
    }

    pub fn of(self, m: &Metrics) -> f64 {
        match self {
            MetricKind::Mse => m.mse,
            MetricKind::R => m.r,
            MetricKind::Mape => m.mape,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Train,
    Test,
}

impl SplitKind {
    pub const ALL: [SplitKind; 2] = [SplitKind::Train, SplitKind::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::Train => "training",
            SplitKind::Test => "test",
        }
    }

    pub fn of(self, m: &TrialMetrics) -> &Metrics {
        match self {
            SplitKind::Train => &m.train,
            SplitKind::Test => &m.test,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatCell {
    pub metric: MetricKind,
    pub split: SplitKind,
    pub architecture: Architecture,
    pub stats: Result<DescriptiveStats, EvalError>,
}

/// Descriptive statistics for every metric × split × architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct StatTables {
    pub cells: Vec<StatCell>,
}

impl StatTables {
    pub fn get(&self, metric: MetricKind, split: SplitKind, architecture: Architecture) -> &StatCell {
        self.cells
            .iter()
            .find(|c| c.metric == metric && c.split == split && c.architecture == architecture)
            .expect("every combination is present")
    }
}

/// Non-diverged values of one metric for one architecture, in grid order.
pub fn metric_values(trials: &[TrialResult], metric: MetricKind, split: SplitKind, architecture: Architecture) -> Vec<f64> {
    trials
        .iter()
        .filter(|t| t.architecture == architecture)
        .filter_map(|t| t.metrics())
        .map(|m| metric.of(split.of(m)))
        .collect()
}

/// Twelve cells, one per metric × split × architecture. Cells with fewer
/// than two completed trials carry `TooFew`.
pub fn summarize(trials: &[TrialResult]) -> StatTables {
    let mut cells = Vec::with_capacity(12);
    for metric in MetricKind::ALL {
        for split in SplitKind::ALL {
            for architecture in Architecture::ALL {
                let values = metric_values(trials, metric, split, architecture);
                cells.push(StatCell {
                    metric,
                    split,
                    architecture,
                    stats: evaluation::descriptive_stats(&values),
                });
            }
        }
    }
    StatTables { cells }
}

/// Test-MSE pairs (MLFF, CFFN) matched on algorithm and hidden size, over
/// configurations where both trials completed.
pub fn matched_test_mse(trials: &[TrialResult]) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in trials.iter().filter(|t| t.architecture == Architecture::Mlff) {
        let partner = trials.iter().find(|u| {
            u.architecture == Architecture::Cffn && u.algorithm == t.algorithm && u.hidden_size == t.hidden_size
        });
        if let (Some(m), Some(c)) = (t.metrics(), partner.and_then(|p| p.metrics())) {
            a.push(m.test.mse);
            b.push(c.test.mse);
        }
    }
    (a, b)
}

/// Paired and Welch t-tests of MLFF against CFFN test MSE.
pub fn compare_architectures(trials: &[TrialResult]) -> (Result<TTestResult, EvalError>, Result<TTestResult, EvalError>) {
    let (a, b) = matched_test_mse(trials);
    let paired = evaluation::t_test_mse(&a, &b, true);
    let welch = evaluation::t_test_mse(
        &metric_values(trials, MetricKind::Mse, SplitKind::Test, Architecture::Mlff),
        &metric_values(trials, MetricKind::Mse, SplitKind::Test, Architecture::Cffn),
        false,
    );
    (paired, welch)
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    /// Canonical grid order.
    pub trials: Vec<TrialResult>,
    pub stat_tables: StatTables,
    pub ttest: Result<TTestResult, EvalError>,
    pub welch: Result<TTestResult, EvalError>,
    /// Trials left out of the statistics because they diverged.
    pub excluded: usize,
    pub test_dates: Vec<NaiveDate>,
    /// Test targets in original units.
    pub test_actual: Matrix,
    /// Test predictions of the lowest-test-MSE trial per architecture.
    pub best_test_predictions: Vec<(Architecture, usize, Matrix)>,
    pub artifacts: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn completed(&self) -> impl Iterator<Item = (&TrialResult, &TrialMetrics)> {
        self.trials.iter().filter_map(|t| t.metrics().map(|m| (t, m)))
    }
}

/// Scaled matrices shared by every trial.
struct Prepared {
    x_scaler: features::Scaler,
    y_scaler: features::Scaler,
    train: (Matrix, Matrix),
    validation: (Matrix, Matrix),
    test_x: Matrix,
    train_actual: Matrix,
    test_actual: Matrix,
    test_dates: Vec<NaiveDate>,
}

fn prepare(spec: &ExperimentSpec, dataset: &FeatureDataset) -> Result<Prepared> {
    let split = chronological_split(dataset, spec.train_range, spec.test_range, spec.validation_fraction)?;
    let (x_scaler, y_scaler) = fit_scaler(&split.train.x, &split.train.y)?;
    Ok(Prepared {
        train: (x_scaler.transform(&split.train.x)?, y_scaler.transform(&split.train.y)?),
        validation: (
            x_scaler.transform(&split.validation.x)?,
            y_scaler.transform(&split.validation.y)?,
        ),
        test_x: x_scaler.transform(&split.test.x)?,
        train_actual: split.train.y,
        test_actual: split.test.y,
        test_dates: split.test.dates,
        x_scaler,
        y_scaler,
    })
}

/// What a completed trial leaves behind besides its metrics.
struct Fitted {
    network: Network,
    record: TrainRecord,
    test_predictions: Matrix,
}

fn fit_trial(
    spec: &ExperimentSpec,
    data: &Prepared,
    (architecture, algorithm, hidden_size): (Architecture, Algorithm, usize),
) -> (TrialResult, Option<Fitted>) {
    let seed = trial_seed(spec.base_seed, architecture, algorithm, hidden_size);
    let outcome = (|| -> std::result::Result<(TrialMetrics, Fitted), String> {
        let topology = Topology::new(architecture, data.x_scaler.width(), hidden_size, data.y_scaler.width())
            .map_err(|e| e.to_string())?;
        let net = Network::init(topology, seed);
        let config = TrainConfig {
            seed,
            ..spec.train.clone()
        };
        let validation = (data.validation.0.rows() > 0).then_some((&data.validation.0, &data.validation.1));
        let (trained, record) = train::train(
            &net,
            &spec.trainer(algorithm),
            &config,
            (&data.train.0, &data.train.1),
            validation,
        )
        .map_err(|e| e.to_string())?;
        let original = |x: &Matrix| -> std::result::Result<Matrix, String> {
            let scaled = trained.predict(x).map_err(|e| e.to_string())?;
            data.y_scaler.inverse_transform(&scaled).map_err(|e| e.to_string())
        };
        let train_pred = original(&data.train.0)?;
        let test_pred = original(&data.test_x)?;
        let metrics = |actual: &Matrix, pred: &Matrix| {
            Metrics::compute(actual.as_slice(), pred.as_slice())
                .map_err(|e| format!("metrics undefined: {e}"))
                .and_then(|m| if m.is_finite() { Ok(m) } else { Err("non-finite metrics".to_string()) })
        };
        Ok((
            TrialMetrics {
                train: metrics(&data.train_actual, &train_pred)?,
                test: metrics(&data.test_actual, &test_pred)?,
                epochs_run: record.epochs_run,
                stop_reason: record.stop_reason,
            },
            Fitted {
                network: trained,
                record,
                test_predictions: test_pred,
            },
        ))
    })();
    let (outcome, fitted) = match outcome {
        Ok((m, f)) => (Ok(m), Some(f)),
        Err(e) => (Err(e), None),
    };
    (
        TrialResult {
            architecture,
            algorithm,
            hidden_size,
            seed,
            outcome,
        },
        fitted,
    )
}

fn run_trial(spec: &ExperimentSpec, data: &Prepared, cell: (Architecture, Algorithm, usize)) -> (TrialResult, Option<Matrix>) {
    let (result, fitted) = fit_trial(spec, data, cell);
    (result, fitted.map(|f| f.test_predictions))
}

/// One trial with everything it produced.
#[derive(Debug, Clone)]
pub struct SingleTrial {
    pub result: TrialResult,
    /// `None` when the trial diverged.
    pub network: Option<Network>,
    pub record: Option<TrainRecord>,
    pub test_dates: Vec<NaiveDate>,
    pub test_actual: Matrix,
    pub test_predictions: Option<Matrix>,
}

/// Trains one grid cell exactly as [`run_experiment`] would, keeping the
/// network and its loss curves. The cell need not be part of `spec.grid()`.
pub fn run_single_trial(
    spec: &ExperimentSpec,
    dataset: &FeatureDataset,
    cell: (Architecture, Algorithm, usize),
) -> Result<SingleTrial> {
    let mut one = spec.clone();
    (one.architectures, one.algorithms, one.hidden_sizes) = (vec![cell.0], vec![cell.1], vec![cell.2]);
    one.validate()?;
    let data = prepare(&one, dataset)?;
    let (result, fitted) = fit_trial(&one, &data, cell);
    let (network, record, test_predictions) = match fitted {
        Some(f) => (Some(f.network), Some(f.record), Some(f.test_predictions)),
        None => (None, None, None),
    };
    Ok(SingleTrial {
        result,
        network,
        record,
        test_dates: data.test_dates,
        test_actual: data.test_actual,
        test_predictions,
    })
}

/// Worker count used by [`run_experiment`].
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn run_experiment(spec: &ExperimentSpec, dataset: &FeatureDataset) -> Result<ExperimentReport> {
    run_experiment_with(spec, dataset, default_workers())
}

/// Runs the whole grid on up to `workers` threads. Results are gathered by
/// grid position, so the worker count never changes the report.
pub fn run_experiment_with(spec: &ExperimentSpec, dataset: &FeatureDataset, workers: usize) -> Result<ExperimentReport> {
    spec.validate()?;
    let data = prepare(spec, dataset)?;
    let grid = spec.grid();
    type Slot = Mutex<Option<(TrialResult, Option<Matrix>)>>;
    let slots: Vec<Slot> = grid.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(&cell) = grid.get(i) else { break };
        let result = run_trial(spec, &data, cell);
        *slots[i].lock().unwrap() = Some(result);
    };
    let workers = workers.clamp(1, grid.len());
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }

    let mut trials = Vec::with_capacity(grid.len());
    let mut best: Vec<(Architecture, usize, Matrix, f64)> = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        let (trial, predictions) = slot.into_inner().unwrap().expect("every cell ran");
        if let (Some(m), Some(p)) = (trial.metrics(), predictions) {
            match best.iter_mut().find(|b| b.0 == trial.architecture) {
                Some(b) if m.test.mse < b.3 => *b = (trial.architecture, i, p, m.test.mse),
                Some(_) => {}
                None => best.push((trial.architecture, i, p, m.test.mse)),
            }
        }
        trials.push(trial);
    }

    let (ttest, welch) = compare_architectures(&trials);
    Ok(ExperimentReport {
        spec: spec.clone(),
        stat_tables: summarize(&trials),
        excluded: trials.iter().filter(|t| t.diverged()).count(),
        trials,
        ttest,
        welch,
        test_dates: data.test_dates,
        test_actual: data.test_actual,
        best_test_predictions: best.into_iter().map(|(a, i, p, _)| (a, i, p)).collect(),
        artifacts: Vec::new(),
    })
}

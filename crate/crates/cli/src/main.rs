use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use volnet::features::{self, FeatureDataset, TARGET_NAMES};
use volnet::harness::fixture::{self, FixtureKind, FixtureSpec};
use volnet::harness::svg::{line_chart_svg, regression_svg};
use volnet::harness::{self, DataSource, ExperimentConfig, ExperimentSpec};
use volnet::{market_data, Algorithm, Architecture, ErrorKind, Matrix};

#[derive(Parser)]
#[command(name = "volnet", version, about = "Neural network volatility forecasting")]
struct Cli {
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the base seed (or the fixture seed for `synth`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read nine instrument CSVs, align them and export panel and dataset.
    Ingest {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value_t = features::DEFAULT_WINDOW)]
        window: usize,
    },
    /// Summarize a dataset and optionally export it.
    Dataset(SourceArgs),
    /// Train one network.
    Train {
        #[arg(long, default_value = "MLFF")]
        architecture: Architecture,
        #[arg(long, default_value = "LM")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 20)]
        hidden: usize,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Run the full trial grid from a config file.
    Experiment {
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Redraw a figure from CSV data.
    #[command(subcommand)]
    Plot(PlotCommand),
    /// Write the synthetic market fixture as instrument CSVs.
    Synth {
        #[arg(long, default_value = "in-regime")]
        kind: FixtureKind,
    },
}

#[derive(Subcommand)]
enum PlotCommand {
    /// Two dataset columns on one chart.
    Overlay {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "INDIAVIX")]
        a: String,
        #[arg(long, default_value = "NIFTYSDR")]
        b: String,
    },
    /// Predicted against actual, from an `output,actual,predicted` CSV.
    Regression {
        #[arg(long)]
        points: PathBuf,
    },
}

/// Where a dataset comes from when no config file names one.
#[derive(Args, Clone)]
struct SourceArgs {
    #[arg(long, conflicts_with_all = ["dataset", "fixture"])]
    data_dir: Option<PathBuf>,
    #[arg(long, conflicts_with = "fixture")]
    dataset: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<FixtureKind>,
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Debug)]
struct CliError {
    kind: ErrorKind,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Usage => 1,
            ErrorKind::Data | ErrorKind::Io => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl<E: Into<volnet::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e: volnet::Error = e.into();
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Usage => "usage",
        ErrorKind::Data => "data",
        ErrorKind::Numerical => "numerical",
        ErrorKind::Io => "io",
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.render());
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            report(&CliError::usage(first));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code())
        }
    }
}

/// One line, `key=value` fields, message last so it may contain spaces.
fn report(e: &CliError) {
    let message = e.message.replace(['\n', '\r'], " ");
    eprintln!("error kind={} code={} message={message}", kind_name(e.kind), e.exit_code());
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { ref data_dir, window } => ingest(data_dir, window, &out_dir(&cli.out, "ingest")),
        Command::Dataset(ref args) => dataset(&cli, args),
        Command::Train {
            architecture,
            algorithm,
            hidden,
            ref source,
        } => train(&cli, source, (architecture, algorithm, hidden)),
        Command::Experiment { workers } => experiment(&cli, workers),
        Command::Plot(ref plot) => plot_command(plot, cli.out.as_deref()),
        Command::Synth { kind } => {
            let spec = FixtureSpec::new(kind, cli.seed.unwrap_or(fixture::DEFAULT_FIXTURE_SEED));
            let dir = out_dir(&cli.out, "fixture");
            let files = fixture::write_fixture(&spec, &dir)?;
            println!("wrote {} instrument files to {}", files.len(), dir.display());
            Ok(())
        }
    }
}

fn out_dir(out: &Option<PathBuf>, default: &str) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("out").join(default))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    harness::HarnessError::io(path, e).into()
}

fn ingest(data_dir: &Path, window: usize, out: &Path) -> Result<()> {
    let panel = market_data::align(&harness::config::read_instruments(data_dir)?)?;
    let ds = features::build_dataset(&panel, window)?;

    let symbols: Vec<_> = panel.symbols().collect();
    let mut csv = String::from("date");
    for s in &symbols {
        write!(csv, ",{s}").unwrap();
    }
    csv.push('\n');
    for (i, d) in panel.dates().iter().enumerate() {
        write!(csv, "{d}").unwrap();
        for &s in &symbols {
            write!(csv, ",{}", panel.column(s).expect("listed symbol")[i]).unwrap();
        }
        csv.push('\n');
    }
    write(&out.join("panel.csv"), &csv)?;
    write(&out.join("alignment.csv"), &panel.alignment_report_csv())?;
    write(&out.join("dataset.csv"), &ds.to_csv())?;
    println!(
        "aligned {} trading days, {} dataset rows ({} to {}) -> {}",
        panel.len(),
        ds.len(),
        ds.dates[0],
        ds.dates[ds.len() - 1],
        out.display()
    );
    Ok(())
}

/// Explicit source flags win over the config file; with neither, the
/// in-regime fixture.
fn resolve(cli: &Cli, args: &SourceArgs) -> Result<(ExperimentSpec, DataSource)> {
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let mut spec = config.as_ref().map(|c| c.spec.clone()).unwrap_or_default();
    if let Some(seed) = cli.seed {
        spec.base_seed = seed;
    }
    if let Some(w) = args.window {
        spec.window = w;
    }
    let flagged = if let Some(dir) = &args.data_dir {
        Some(DataSource::Directory(dir.clone()))
    } else if let Some(path) = &args.dataset {
        Some(DataSource::Dataset(path.clone()))
    } else {
        args.fixture.map(|k| DataSource::Fixture(FixtureSpec::new(k, fixture::DEFAULT_FIXTURE_SEED)))
    };
    let source = match (flagged, config.and_then(|c| c.source)) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => DataSource::Fixture(FixtureSpec::new(FixtureKind::InRegime, fixture::DEFAULT_FIXTURE_SEED)),
    };
    Ok((spec, source))
}

fn dataset(cli: &Cli, args: &SourceArgs) -> Result<()> {
    let (spec, source) = resolve(cli, args)?;
    let ds = source.load(spec.window)?;
    if ds.is_empty() {
        return Err(CliError::data("dataset has no rows"));
    }
    println!("{} rows, {} to {}", ds.len(), ds.dates[0], ds.dates[ds.len() - 1]);
    println!("{:<10} {:>10} {:>10} {:>10}", "column", "min", "mean", "max");
    for name in features::INPUT_NAMES.iter().chain(&TARGET_NAMES) {
        let v = ds.series(name).expect("known column").values;
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        println!("{name:<10} {lo:>10.3} {mean:>10.3} {hi:>10.3}");
    }
    if let Some(out) = &cli.out {
        write(out, &ds.to_csv())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn train(cli: &Cli, args: &SourceArgs, cell: (Architecture, Algorithm, usize)) -> Result<()> {
    let (spec, source) = resolve(cli, args)?;
    let ds = source.load(spec.window)?;
    let trial = harness::run_single_trial(&spec, &ds, cell)?;
    let out = out_dir(&cli.out, "train");
    write(&out.join("trial.csv"), &harness::trials_csv(std::slice::from_ref(&trial.result)))?;
    let metrics = match &trial.result.outcome {
        Ok(m) => m,
        Err(reason) => {
            return Err(CliError {
                kind: ErrorKind::Numerical,
                message: format!("{} {} h={} diverged: {reason}", cell.0, cell.1, cell.2),
            })
        }
    };
    let (net, record) = (trial.network.expect("completed"), trial.record.expect("completed"));
    write(&out.join("network.txt"), &net.to_text())?;
    write(&out.join("curves.csv"), &record.curves_csv())?;
    let mut curves: Vec<(&str, &[f64])> = vec![("training", &record.train_loss_curve)];
    if !record.validation_loss_curve.is_empty() {
        curves.push(("validation", &record.validation_loss_curve));
    }
    write(&out.join("loss.svg"), &line_chart_svg("Loss per epoch", "epoch", &curves, true))?;
    harness::emit_regression_plot(
        &trial.test_actual,
        trial.test_predictions.as_ref().expect("completed"),
        &out.join("regression.svg"),
    )?;
    println!(
        "{} {} h={} seed={}: {} epochs ({})",
        cell.0, cell.1, cell.2, trial.result.seed, metrics.epochs_run, metrics.stop_reason
    );
    for (label, m) in [("train", &metrics.train), ("test", &metrics.test)] {
        println!("  {label:<5} mse={:.6} r={:.4} mape={:.3}", m.mse, m.r, m.mape);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn experiment(cli: &Cli, workers: Option<usize>) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::usage("experiment needs --config <file>"))?;
    let config = ExperimentConfig::load(path)?;
    let mut spec = config.spec.clone();
    if let Some(seed) = cli.seed {
        spec.base_seed = seed;
    }
    let out = out_dir(&cli.out, &spec.name);
    let workers = workers.or(config.workers).unwrap_or_else(harness::default_workers);

    let outcome = (|| -> Result<Vec<PathBuf>> {
        let ds = config.source()?.load(spec.window)?;
        let report = harness::run_experiment_with(&spec, &ds, workers)?;
        let mut files = harness::emit_report(&report, &out)?;
        for (arch, i, predicted) in &report.best_test_predictions {
            let name = format!("regression_{}.svg", arch.as_str().to_ascii_lowercase());
            files.extend(harness::emit_regression_plot(&report.test_actual, predicted, &out.join(name))?.paths());
            let t = &report.trials[*i];
            println!("best {arch}: {} h={} (regression_{})", t.algorithm, t.hidden_size, arch.as_str().to_ascii_lowercase());
        }
        for (a, b) in [("INDIAVIX", "NIFTYSDR"), ("INDIAVIX", "CBOEVIX")] {
            let (sa, sb) = (ds.series(a).expect("known column"), ds.series(b).expect("known column"));
            let name = format!("overlay_{}_{}.svg", a.to_ascii_lowercase(), b.to_ascii_lowercase());
            files.extend(harness::emit_overlay_plot(&sa, &sb, &out.join(name))?.paths());
        }
        let title = format!("{}: test MSE per trial", spec.name);
        files.extend(harness::emit_test_mse_plot(&title, &report.trials, &out.join("test_mse.svg"))?.paths());
        println!(
            "{} trials, {} completed, {} excluded",
            report.trials.len(),
            report.trials.len() - report.excluded,
            report.excluded
        );
        println!("{}", harness::report::paired_ttest_line(&report.ttest));
        Ok(files)
    })();

    match outcome {
        Ok(files) => {
            println!("wrote {} files to {}", files.len(), out.display());
            Ok(())
        }
        Err(e) => {
            let err: &dyn std::error::Error = &e;
            if let Ok(p) = harness::emit_error_report(&spec, err, &out) {
                eprintln!("wrote {}", p.display());
            }
            Err(e)
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn plot_command(cmd: &PlotCommand, out: Option<&Path>) -> Result<()> {
    match cmd {
        PlotCommand::Overlay { dataset, a, b } => {
            let text = std::fs::read_to_string(dataset).map_err(|e| io_error(dataset, e))?;
            let ds = FeatureDataset::from_csv(&text).map_err(volnet::Error::from)?;
            let column = |n: &str| ds.series(n).ok_or_else(|| CliError::usage(format!("unknown column `{n}`")));
            let out = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("overlay.svg"));
            let files = harness::emit_overlay_plot(&column(a)?, &column(b)?, &out)?;
            println!("wrote {} and {}", files.svg.display(), files.csv.display());
        }
        PlotCommand::Regression { points } => {
            let text = std::fs::read_to_string(points).map_err(|e| io_error(points, e))?;
            let (names, actual, predicted) = parse_points(&text)?;
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let out = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("regression.svg"));
            let title = out.file_stem().and_then(|s| s.to_str()).unwrap_or("regression").to_string();
            let (svg, csv) = regression_svg(&title, &actual, &predicted, &names)?;
            write(&out, &svg)?;
            write(&out.with_extension("csv"), &csv)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

/// Reads the `output,actual,predicted` sidecar written next to regression
/// plots. Every output must have the same number of points.
fn parse_points(text: &str) -> Result<(Vec<String>, Matrix, Matrix)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("output,actual,predicted") {
        return Err(CliError::data("points file must start with `output,actual,predicted`"));
    }
    let mut names: Vec<String> = Vec::new();
    type Column = (Vec<f64>, Vec<f64>);
    let mut columns: Vec<Column> = Vec::new();
    for (i, line) in lines.enumerate() {
        let bad = || CliError::data(format!("points line {}: cannot parse `{line}`", i + 2));
        let mut f = line.split(',');
        let (Some(name), Some(a), Some(p), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad());
        };
        let (a, p): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, p.trim().parse().map_err(|_| bad())?);
        let j = match names.iter().position(|n| n == name) {
            Some(j) => j,
            None => {
                names.push(name.to_string());
                columns.push((Vec::new(), Vec::new()));
                names.len() - 1
            }
        };
        columns[j].0.push(a);
        columns[j].1.push(p);
    }
    let n = columns.first().map_or(0, |c| c.0.len());
    if n == 0 || columns.iter().any(|c| c.0.len() != n) {
        return Err(CliError::data("points file needs the same, non-zero number of rows per output"));
    }
    let interleave = |pick: fn(&Column) -> &Vec<f64>| {
        let data = (0..n).flat_map(|i| columns.iter().map(move |c| pick(c)[i])).collect();
        Matrix::from_vec(n, columns.len(), data)
    };
    Ok((names, interleave(|c| &c.0), interleave(|c| &c.1)))
}

//! Report files: `trials.csv`, `tables.md`, `tables.csv` and `config.txt`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{
    compare_architectures, config, summarize, ExperimentReport, ExperimentSpec, HarnessError, MetricKind, Result,
    SplitKind, StatCell, TrialMetrics, TrialResult,
};
use crate::evaluation::{DescriptiveStats, EvalError, Metrics, TTestResult, ALPHA};
use crate::network::Architecture;

pub const TRIALS_HEADER: &str = "architecture,algorithm,hidden_size,seed,status,epochs_run,stop_reason,\
train_mse,train_r,train_mape,test_mse,test_r,test_mape,error";

/// Error text must stay on one line and inside one field.
fn sanitize(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// One row per trial. Floats use the shortest representation that parses
/// back to the same value.
pub fn trials_csv(trials: &[TrialResult]) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for t in trials {
        write!(out, "{},{},{},{},", t.architecture, t.algorithm, t.hidden_size, t.seed).unwrap();
        match &t.outcome {
            Ok(m) => writeln!(
                out,
                "ok,{},{},{},{},{},{},{},{},",
                m.epochs_run, m.stop_reason, m.train.mse, m.train.r, m.train.mape, m.test.mse, m.test.r, m.test.mape
            )
            .unwrap(),
            Err(e) => writeln!(out, "diverged,,,,,,,,,{}", sanitize(e)).unwrap(),
        }
    }
    out
}

pub fn parse_trials_csv(text: &str) -> Result<Vec<TrialResult>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == TRIALS_HEADER => {}
        _ => {
            return Err(HarnessError::TrialsParse {
                line: 1,
                reason: "unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| HarnessError::TrialsParse { line, reason };
        let f: Vec<&str> = raw.trim_end().split(',').collect();
        if f.len() != 14 {
            return Err(bad(format!("expected 14 fields, found {}", f.len())));
        }
        let num = |j: usize| -> Result<f64> { f[j].parse().map_err(|_| bad(format!("bad number `{}`", f[j]))) };
        let outcome = match f[4] {
            "ok" => Ok(TrialMetrics {
                epochs_run: f[5].parse().map_err(|_| bad(format!("bad epoch count `{}`", f[5])))?,
                stop_reason: f[6].parse().map_err(bad)?,
                train: Metrics {
                    mse: num(7)?,
                    r: num(8)?,
                    mape: num(9)?,
                },
                test: Metrics {
                    mse: num(10)?,
                    r: num(11)?,
                    mape: num(12)?,
                },
            }),
            "diverged" => Err(f[13].to_string()),
            other => return Err(bad(format!("unknown status `{other}`"))),
        };
        out.push(TrialResult {
            architecture: f[0].parse().map_err(bad)?,
            algorithm: f[1].parse().map_err(bad)?,
            hidden_size: f[2].parse().map_err(|_| bad(format!("bad hidden size `{}`", f[2])))?,
            seed: f[3].parse().map_err(|_| bad(format!("bad seed `{}`", f[3])))?,
            outcome,
        });
    }
    Ok(out)
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if (1e-3..1e5).contains(&a) {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}

fn fmt_df(df: f64) -> String {
    if df.fract() == 0.0 {
        format!("{df:.0}")
    } else {
        format!("{df:.2}")
    }
}

fn stat_rows(s: &DescriptiveStats) -> [(&'static str, f64); 4] {
    [
        ("Min", s.min),
        ("Max", s.max),
        ("Average", s.average),
        ("Standard Deviation", s.standard_deviation),
    ]
}

fn cell_text(cell: &StatCell, row: usize) -> String {
    match &cell.stats {
        Ok(s) => fmt_num(stat_rows(s)[row].1),
        Err(EvalError::TooFew { got, .. }) => format!("n/a (too few trials: {got})"),
        Err(e) => format!("n/a ({e})"),
    }
}

fn ttest_line(label: &str, r: &Result<TTestResult, EvalError>) -> String {
    match r {
        Ok(t) => format!(
            "{label}: t = {:.4}, df = {}, p = {:.3} (two tailed): {} at alpha = {ALPHA}",
            t.t_statistic,
            fmt_df(t.degrees_of_freedom),
            t.p_value_two_tailed,
            t.verdict(ALPHA).describe()
        ),
        Err(e) => format!("{label}: not computed ({e})"),
    }
}

/// The paired t-test line for test MSE, as printed in `tables.md`.
pub fn paired_ttest_line(r: &Result<TTestResult, EvalError>) -> String {
    ttest_line("Paired t-test on test MSE, MLFF vs CFFN", r)
}

/// Markdown rendering of the stat tables and t-tests. A function of the
/// trials alone, so a re-parsed `trials.csv` reproduces it exactly.
pub fn tables_markdown(name: &str, trials: &[TrialResult]) -> String {
    let tables = summarize(trials);
    let (paired, welch) = compare_architectures(trials);
    let excluded = trials.iter().filter(|t| t.diverged()).count();
    let mut out = String::new();
    writeln!(out, "# {name}\n").unwrap();
    writeln!(out, "Trials: {} run, {} completed, {excluded} excluded (diverged).\n", trials.len(), trials.len() - excluded)
        .unwrap();
    for metric in MetricKind::ALL {
        for split in SplitKind::ALL {
            writeln!(out, "## {} of all trials, {} set\n", metric.as_str(), split.as_str()).unwrap();
            let cells: Vec<&StatCell> = Architecture::ALL.iter().map(|&a| tables.get(metric, split, a)).collect();
            out.push('|');
            out.push_str(" Statistic |");
            for a in Architecture::ALL {
                write!(out, " {} |", a.long_name()).unwrap();
            }
            out.push_str("\n|---|---|---|\n");
            for (row, label) in ["Min", "Max", "Average", "Standard Deviation"].iter().enumerate() {
                write!(out, "| {label} |").unwrap();
                for c in &cells {
                    write!(out, " {} |", cell_text(c, row)).unwrap();
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    writeln!(out, "## Significance (test set)\n").unwrap();
    writeln!(out, "{}\n", paired_ttest_line(&paired)).unwrap();
    writeln!(out, "{}", ttest_line("Welch t-test on test MSE, MLFF vs CFFN", &welch)).unwrap();
    out
}

/// All twelve tables as one CSV: rows Min/Max/Average/StdDev per metric and
/// split, one column per architecture.
pub fn tables_csv(trials: &[TrialResult]) -> String {
    let tables = summarize(trials);
    let mut out = String::from("metric,split,statistic");
    for a in Architecture::ALL {
        write!(out, ",{}", a.long_name()).unwrap();
    }
    out.push('\n');
    for metric in MetricKind::ALL {
        for split in SplitKind::ALL {
            for (row, label) in ["Min", "Max", "Average", "StdDev"].iter().enumerate() {
                write!(out, "{},{},{label}", metric.as_str(), split.as_str()).unwrap();
                for a in Architecture::ALL {
                    match &tables.get(metric, split, a).stats {
                        Ok(s) => write!(out, ",{}", stat_rows(s)[row].1).unwrap(),
                        Err(_) => out.push(','),
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Writes `trials.csv`, `tables.md`, `tables.csv` and `config.txt`.
pub fn emit_report(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(&out_dir.join("trials.csv"), &trials_csv(&report.trials))?,
        write_file(&out_dir.join("tables.md"), &tables_markdown(&report.spec.name, &report.trials))?,
        write_file(&out_dir.join("tables.csv"), &tables_csv(&report.trials))?,
        write_file(&out_dir.join("config.txt"), &config::spec_text(&report.spec))?,
    ])
}

/// Stands in for the report when an experiment could not run at all.
pub fn emit_error_report(spec: &ExperimentSpec, error: &dyn std::error::Error, out_dir: &Path) -> Result<PathBuf> {
    let mut text = format!("experiment {} failed\nerror: {error}\n", spec.name);
    let mut source = error.source();
    while let Some(s) = source {
        writeln!(text, "caused by: {s}").unwrap();
        source = s.source();
    }
    text.push_str("\n# configuration\n");
    text.push_str(&config::spec_text(spec));
    write_file(&out_dir.join("error.txt"), &text)
}

//! Forecast accuracy metrics, descriptive statistics over trials, and the
//! two-tailed t-test used to compare architectures.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("correlation undefined: an input vector is constant")]
    ConstantVector,
    #[error("MAPE undefined: actual value at index {0} is zero")]
    ZeroActual(usize),
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("paired differences are constant and non-zero; t statistic is unbounded")]
    DegenerateVariance,
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// Significance level for the architecture comparison verdict.
pub const ALPHA: f64 = 0.05;

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let ss: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok(ss / actual.len() as f64)
}

/// Product-moment correlation in raw-sum form:
/// `(NΣap − ΣaΣp) / sqrt((NΣa² − (Σa)²)(NΣp² − (Σp)²))`.
pub fn pearson_r(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    if actual.len() < 2 {
        return Err(EvalError::TooFew {
            needed: 2,
            got: actual.len(),
        });
    }
    // Centering both series first leaves every term of the formula unchanged
    // in exact arithmetic and avoids cancellation in the raw sums.
    let shift_a = actual.iter().sum::<f64>() / actual.len() as f64;
    let shift_p = predicted.iter().sum::<f64>() / predicted.len() as f64;
    let n = actual.len() as f64;
    let (mut sa, mut sp, mut sap, mut saa, mut spp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let (a, p) = (a - shift_a, p - shift_p);
        sa += a;
        sp += p;
        sap += a * p;
        saa += a * a;
        spp += p * p;
    }
    let var_a = n * saa - sa * sa;
    let var_p = n * spp - sp * sp;
    if !(var_a > 0.0 && var_p > 0.0) {
        return Err(EvalError::ConstantVector);
    }
    Ok(((n * sap - sa * sp) / (var_a.sqrt() * var_p.sqrt())).clamp(-1.0, 1.0))
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    if let Some(i) = actual.iter().position(|&a| a == 0.0) {
        return Err(EvalError::ZeroActual(i));
    }
    let sum: f64 = actual.iter().zip(predicted).map(|(a, p)| ((a - p) / a).abs()).sum();
    Ok(sum / actual.len() as f64 * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    pub r: f64,
    pub mape: f64,
}

impl Metrics {
    /// All three metrics on the flattened series.
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self> {
        Ok(Self {
            mse: mse(actual, predicted)?,
            r: pearson_r(actual, predicted)?,
            mape: mape(actual, predicted)?,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.mse.is_finite() && self.r.is_finite() && self.mape.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveStats {
    pub min: f64,
    pub max: f64,
    pub average: f64,
    /// Sample standard deviation (n − 1 divisor).
    pub standard_deviation: f64,
    pub count: usize,
}

pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats> {
    if values.len() < 2 {
        return Err(EvalError::TooFew {
            needed: 2,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (average, ss) = mean_and_ss(values);
    Ok(DescriptiveStats {
        min,
        max,
        // rounding can push the mean of near-identical values a hair outside
        average: average.clamp(min, max),
        standard_deviation: (ss / (n - 1.0)).sqrt(),
        count: values.len(),
    })
}

/// Mean and sum of squared deviations, both order-independent: the values
/// are summed in sorted order.
fn mean_and_ss(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, dev.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value_two_tailed: f64,
    pub paired: bool,
}

impl TTestResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value_two_tailed < alpha
    }

    pub fn verdict(&self, alpha: f64) -> Verdict {
        if self.significant(alpha) {
            Verdict::Significant
        } else {
            Verdict::NotSignificant
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Significant,
    NotSignificant,
}

impl Verdict {
    pub fn describe(self) -> &'static str {
        match self {
            Verdict::Significant => "significant difference",
            Verdict::NotSignificant => "no significant difference",
        }
    }
}

/// Two-tailed t-test on per-configuration MSEs of two architectures. The
/// paired form treats index `i` of both inputs as the same configuration;
/// the unpaired form is Welch's test.
pub fn t_test_mse(a: &[f64], b: &[f64], paired: bool) -> Result<TTestResult> {
    if paired {
        paired_t_test(a, b)
    } else {
        welch_t_test(a, b)
    }
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(EvalError::TooFew {
            needed: 2,
            got: a.len(),
        });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let (mean, ss) = mean_and_ss(&d);
    let sd = (ss / (n - 1.0)).sqrt();
    let df = n - 1.0;
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // spread at rounding level means the differences are really constant
    if sd <= 1e-13 * scale || scale == 0.0 {
        if scale == 0.0 {
            // identical samples: no evidence of any difference
            return Ok(TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: df,
                p_value_two_tailed: 1.0,
                paired: true,
            });
        }
        return Err(EvalError::DegenerateVariance);
    }
    let t = mean / (sd / n.sqrt());
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value_two_tailed: student_t_two_tailed(t, df),
        paired: true,
    })
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(EvalError::TooFew { needed: 2, got: s.len() });
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, ssa) = mean_and_ss(a);
    let (mb, ssb) = mean_and_ss(b);
    let (va, vb) = (ssa / (na - 1.0) / na, ssb / (nb - 1.0) / nb);
    let se2 = va + vb;
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    if se2.sqrt() <= 1e-13 * scale || scale == 0.0 {
        if ma == mb {
            return Ok(TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: na + nb - 2.0,
                p_value_two_tailed: 1.0,
                paired: false,
            });
        }
        return Err(EvalError::DegenerateVariance);
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value_two_tailed: student_t_two_tailed(t, df),
        paired: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom, via
/// `I_{df/(df+t²)}(df/2, 1/2)`.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// `I_x(a, b)` by the continued fraction (modified Lentz), using the
/// symmetry `I_x(a, b) = 1 − I_{1−x}(b, a)` where it converges faster.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation (g = 7, 9 terms), accurate to ~1e-15 for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!((mse(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(mse(&[1.0], &[1.0, 2.0]), Err(EvalError::LengthMismatch(1, 2)));
        assert_eq!(mse(&[], &[]), Err(EvalError::Empty));
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson_r(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((pearson_r(&a, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson_r(&a, &[2.0; 4]), Err(EvalError::ConstantVector));
        assert!(pearson_r(&a, &[1.0; 3]).is_err());
        // cov / (sd_a sd_p) evaluated separately:
        // centered a = [-1.5,-0.5,0.5,1.5], centered p = [-1.4,-0.6,0.7,1.3]
        // Σ a p = 2.1+0.3+0.35+1.95 = 4.7; Σa² = 5; Σp² = 1.96+0.36+0.49+1.69 = 4.5
        let expected = 4.7 / (5.0f64 * 4.5).sqrt();
        let r = pearson_r(&a, &[1.1, 1.9, 3.2, 3.8]).unwrap();
        assert!((r - expected).abs() < 1e-12, "{r} vs {expected}");
    }

    #[test]
    fn mape_examples() {
        assert_eq!(mape(&[5.0, 6.0], &[5.0, 6.0]).unwrap(), 0.0);
        assert!((mape(&[100.0], &[110.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!((mape(&[10.0, 20.0], &[11.0, 18.0]).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(mape(&[1.0, 0.0], &[1.0, 1.0]), Err(EvalError::ZeroActual(1)));
    }

    #[test]
    fn mape_is_not_symmetric() {
        let (a, b) = ([100.0], [50.0]);
        assert!((mape(&a, &b).unwrap() - 50.0).abs() < 1e-12);
        assert!((mape(&b, &a).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
    }

    #[test]
    fn descriptive_examples() {
        let s = descriptive_stats(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.min, s.max, s.average, s.standard_deviation), (1.0, 1.0, 1.0, 0.0));
        let s = descriptive_stats(&[1.0, 3.0]).unwrap();
        assert_eq!(s.average, 2.0);
        assert!((s.standard_deviation - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(descriptive_stats(&[1.0]), Err(EvalError::TooFew { needed: 2, got: 1 }));
    }

    #[test]
    fn paired_identical_and_degenerate() {
        let a = [0.1, 0.2, 0.3];
        let r = paired_t_test(&a, &a).unwrap();
        assert_eq!((r.t_statistic, r.p_value_two_tailed), (0.0, 1.0));
        let b = [1.1, 1.2, 1.3, 1.4];
        let c = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(paired_t_test(&b, &c), Err(EvalError::DegenerateVariance));
        assert!(paired_t_test(&b, &a).is_err());
    }

    #[test]
    fn paired_reference_case() {
        // mean 0.3; deviations .7 -.8 0 .5 -.4 give sd² = 1.54 / 4 = 0.385
        let d = [1.0, -0.5, 0.3, 0.8, -0.1];
        let r = paired_t_test(&d, &[0.0; 5]).unwrap();
        let t = 0.3 / (0.385f64 / 5.0).sqrt();
        assert!((r.t_statistic - t).abs() < 1e-12);
        assert_eq!(r.degrees_of_freedom, 4.0);
        // scipy.stats.ttest_1samp(d, 0).pvalue
        assert!((r.p_value_two_tailed - 0.340_468_224_300_070_57).abs() < 1e-6, "{}", r.p_value_two_tailed);
    }

    #[test]
    fn t_distribution_reference_values() {
        // t = 1 with 1 degree of freedom is the Cauchy quartile: p = 0.5
        assert!((student_t_two_tailed(1.0, 1.0) - 0.5).abs() < 1e-12);
        // t = 2.776445105 is the 97.5% point of t(4)
        assert!((student_t_two_tailed(2.776_445_105_197_793, 4.0) - 0.05).abs() < 1e-9);
        assert_eq!(student_t_two_tailed(0.0, 7.0), 1.0);
        assert_eq!(student_t_two_tailed(f64::INFINITY, 7.0), 0.0);
        assert_eq!(student_t_two_tailed(-1.7, 9.0), student_t_two_tailed(1.7, 9.0));
    }

    #[test]
    fn ln_gamma_reference_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn welch_matches_hand_computation() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 4.0, 6.0];
        let r = welch_t_test(&a, &b).unwrap();
        // va = (5/3)/4, vb = 4/3
        let (va, vb): (f64, f64) = (5.0 / 12.0, 4.0 / 3.0);
        let t = (2.5 - 4.0) / (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / 3.0 + vb * vb / 2.0);
        assert!((r.t_statistic - t).abs() < 1e-12);
        assert!((r.degrees_of_freedom - df).abs() < 1e-12);
        assert!(!r.paired);
    }

    #[test]
    fn verdict_threshold() {
        for p in [0.221, 0.305, 0.184, 0.05] {
            let r = TTestResult {
                t_statistic: 1.0,
                degrees_of_freedom: 26.0,
                p_value_two_tailed: p,
                paired: true,
            };
            assert_eq!(r.verdict(ALPHA), Verdict::NotSignificant);
        }
        let r = TTestResult {
            t_statistic: 3.0,
            degrees_of_freedom: 26.0,
            p_value_two_tailed: 0.01,
            paired: true,
        };
        assert_eq!(r.verdict(ALPHA), Verdict::Significant);
    }
}

//! Full-batch training: nine backprop-family algorithms behind one stopping
//! protocol (epoch budget, error goal, gradient floor, validation early
//! stopping).
//!
//! Every algorithm works on an [`Objective`]; the network-backed one is
//! [`NetworkObjective`]. Levenberg–Marquardt additionally needs the residual
//! form provided by [`LeastSquares`].

mod bfgs;
mod cg;
mod gdx;
mod line_search;
mod lm;
mod oss;
mod rprop;
mod scg;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::network::{self, Network, NetworkError, ParamVector, Topology};

pub use bfgs::{BfgsParams, BfgsState};
pub use cg::{beta, BetaRule, CgParams, CgState};
pub use gdx::{GdxParams, GdxState};
pub use line_search::{line_search, search_along, LineSearchError, LineSearchParams, LineStep};
pub use lm::{LmParams, LmState};
pub use oss::{oss_direction, OssState};
pub use rprop::{RpropParams, RpropState};
pub use scg::{ScgParams, ScgState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("numerical divergence at epoch {epoch}: {reason}")]
    NumericalDivergence { epoch: usize, reason: String },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

pub type Result<T, E = TrainError> = std::result::Result<T, E>;

/// A differentiable scalar loss over a flat parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, w: &[f64]) -> f64;
    fn value_grad(&self, w: &[f64]) -> (f64, Vec<f64>);
}

/// Losses of the form `mean(r(w)^2)` with an available Jacobian of `r`.
pub trait LeastSquares: Objective {
    /// Residual vector and its Jacobian (rows = residuals).
    fn residuals_jacobian(&self, w: &[f64]) -> (Vec<f64>, Matrix);
}

/// Mean squared error of a network on a fixed sample table.
#[derive(Debug, Clone, Copy)]
pub struct NetworkObjective<'a> {
    topology: Topology,
    x: &'a Matrix,
    y: &'a Matrix,
}

impl<'a> NetworkObjective<'a> {
    pub fn new(topology: Topology, x: &'a Matrix, y: &'a Matrix) -> Result<Self> {
        // one cheap evaluation validates every shape once
        network::batch_loss(&topology, &vec![0.0; topology.param_count()], x, y)?;
        Ok(Self { topology, x, y })
    }
}

impl Objective for NetworkObjective<'_> {
    fn dim(&self) -> usize {
        self.topology.param_count()
    }

    fn value(&self, w: &[f64]) -> f64 {
        network::batch_loss(&self.topology, w, self.x, self.y).expect("shapes validated")
    }

    fn value_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
        network::loss_and_gradient(&self.topology, w, self.x, self.y).expect("shapes validated")
    }
}

impl LeastSquares for NetworkObjective<'_> {
    fn residuals_jacobian(&self, w: &[f64]) -> (Vec<f64>, Matrix) {
        let r = network::residuals(&self.topology, w, self.x, self.y).expect("shapes validated");
        let j = network::jacobian(&self.topology, w, self.x).expect("shapes validated");
        (r, j)
    }
}

/// Current iterate with its cached loss and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub w: Vec<f64>,
    pub loss: f64,
    pub grad: Vec<f64>,
}

impl Point {
    pub fn at<O: Objective + ?Sized>(obj: &O, w: Vec<f64>) -> Self {
        let (loss, grad) = obj.value_grad(&w);
        Self { w, loss, grad }
    }

    pub fn grad_norm(&self) -> f64 {
        norm(&self.grad)
    }
}

/// What one epoch did to the iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    /// Candidate rejected; the iterate is unchanged.
    Rejected,
    /// Nothing to do (zero gradient or zero step).
    Stationary,
    LineSearchFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Levenberg–Marquardt.
    Lm,
    /// Dense BFGS quasi-Newton.
    Bfgs,
    /// Resilient backpropagation (iRPROP−).
    Rprop,
    /// Scaled conjugate gradient.
    Scg,
    CgFletcherReeves,
    CgPolakRibiere,
    CgPowellBeale,
    /// One-step secant.
    Oss,
    /// Gradient descent with momentum and adaptive learning rate.
    Gdx,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Lm,
        Algorithm::Bfgs,
        Algorithm::Rprop,
        Algorithm::Scg,
        Algorithm::CgFletcherReeves,
        Algorithm::CgPolakRibiere,
        Algorithm::CgPowellBeale,
        Algorithm::Oss,
        Algorithm::Gdx,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Lm => "LM",
            Algorithm::Bfgs => "BFGS",
            Algorithm::Rprop => "RPROP",
            Algorithm::Scg => "SCG",
            Algorithm::CgFletcherReeves => "CG_FLETCHER_REEVES",
            Algorithm::CgPolakRibiere => "CG_POLAK_RIBIERE",
            Algorithm::CgPowellBeale => "CG_POWELL_BEALE",
            Algorithm::Oss => "OSS",
            Algorithm::Gdx => "GDX",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let upper = s.trim().to_ascii_uppercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == upper)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.as_str()).collect();
                format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Every tunable constant of every algorithm. Only the block belonging to
/// the chosen algorithm is consulted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hyperparameters {
    pub gdx: GdxParams,
    pub rprop: RpropParams,
    pub cg: CgParams,
    pub scg: ScgParams,
    pub bfgs: BfgsParams,
    pub lm: LmParams,
    pub line_search: LineSearchParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerSpec {
    pub algorithm: Algorithm,
    pub hyper: Hyperparameters,
}

impl TrainerSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            hyper: Hyperparameters::default(),
        }
    }

    fn uses_line_search(&self) -> bool {
        matches!(
            self.algorithm,
            Algorithm::Bfgs
                | Algorithm::CgFletcherReeves
                | Algorithm::CgPolakRibiere
                | Algorithm::CgPowellBeale
                | Algorithm::Oss
        )
    }

    /// The hyperparameters this algorithm actually reads, as `(name, value)`.
    pub fn describe(&self) -> Vec<(&'static str, f64)> {
        let h = &self.hyper;
        let mut out = match self.algorithm {
            Algorithm::Gdx => vec![
                ("lr", h.gdx.lr),
                ("momentum", h.gdx.momentum),
                ("lr_inc", h.gdx.lr_inc),
                ("lr_dec", h.gdx.lr_dec),
            ],
            Algorithm::Rprop => vec![
                ("delta0", h.rprop.delta0),
                ("inc", h.rprop.inc),
                ("dec", h.rprop.dec),
                ("delta_min", h.rprop.delta_min),
                ("delta_max", h.rprop.delta_max),
            ],
            Algorithm::Scg => vec![
                ("sigma", h.scg.sigma),
                ("lambda0", h.scg.lambda0),
                ("lambda_min", h.scg.lambda_min),
                ("lambda_max", h.scg.lambda_max),
            ],
            Algorithm::Lm => vec![
                ("mu0", h.lm.mu0),
                ("mu_dec", h.lm.mu_dec),
                ("mu_inc", h.lm.mu_inc),
                ("mu_min", h.lm.mu_min),
                ("mu_max", h.lm.mu_max),
            ],
            Algorithm::Bfgs => vec![("curvature_floor", h.bfgs.curvature_floor)],
            Algorithm::Oss => vec![("curvature_floor", oss::CURVATURE_FLOOR)],
            Algorithm::CgPowellBeale => vec![("restart_ratio", h.cg.powell_beale_ratio)],
            Algorithm::CgFletcherReeves | Algorithm::CgPolakRibiere => Vec::new(),
        };
        if self.uses_line_search() {
            out.extend([
                ("ls_c1", h.line_search.c1),
                ("ls_c2", h.line_search.c2),
                ("ls_max_evals", h.line_search.max_evals as f64),
            ]);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = self
            .describe()
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0));
        match bad {
            Some((name, v)) => Err(TrainError::InvalidConfig(format!(
                "{} hyperparameter {name} must be positive, got {v}",
                self.algorithm
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Train-loss target on scaled data.
    pub goal: f64,
    /// Consecutive epochs without a new validation minimum before stopping;
    /// zero disables early stopping.
    pub patience: usize,
    pub min_grad: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 1000,
            goal: 1e-5,
            patience: 6,
            min_grad: 1e-7,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 {
            return Err(TrainError::InvalidConfig("max_epochs must be at least 1".into()));
        }
        if !(self.goal >= 0.0 && self.min_grad >= 0.0) {
            return Err(TrainError::InvalidConfig("goal and min_grad must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxEpochs,
    GoalMet,
    GradientFloor,
    EarlyStop,
    LineSearchFail,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxEpochs => "MaxEpochs",
            StopReason::GoalMet => "GoalMet",
            StopReason::GradientFloor => "GradientFloor",
            StopReason::EarlyStop => "EarlyStop",
            StopReason::LineSearchFail => "LineSearchFail",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            StopReason::MaxEpochs,
            StopReason::GoalMet,
            StopReason::GradientFloor,
            StopReason::EarlyStop,
            StopReason::LineSearchFail,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
        .ok_or_else(|| format!("unknown stop reason `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub epochs_run: usize,
    pub stop_reason: StopReason,
    pub train_loss_curve: Vec<f64>,
    /// Empty when no validation set was supplied.
    pub validation_loss_curve: Vec<f64>,
    /// Parameters at the validation minimum, or the final ones.
    pub best_params: ParamVector,
}

impl TrainRecord {
    /// `epoch,train_loss,validation_loss`; the last column is blank without
    /// a validation set.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,validation_loss\n");
        for (i, t) in self.train_loss_curve.iter().enumerate() {
            match self.validation_loss_curve.get(i) {
                Some(v) => out.push_str(&format!("{},{t},{v}\n", i + 1)),
                None => out.push_str(&format!("{},{t},\n", i + 1)),
            }
        }
        out
    }
}

/// Per-algorithm optimizer state behind one dispatch point.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Gdx(GdxState),
    Rprop(RpropState),
    Cg(CgState),
    Scg(ScgState),
    Oss(OssState),
    Bfgs(BfgsState),
    Lm(LmState),
}

impl Optimizer {
    pub fn new(spec: &TrainerSpec, dim: usize) -> Self {
        let h = &spec.hyper;
        match spec.algorithm {
            Algorithm::Gdx => Optimizer::Gdx(GdxState::new(h.gdx.clone(), dim)),
            Algorithm::Rprop => Optimizer::Rprop(RpropState::new(h.rprop.clone(), dim)),
            Algorithm::Scg => Optimizer::Scg(ScgState::new(h.scg.clone(), dim)),
            Algorithm::Lm => Optimizer::Lm(LmState::new(h.lm.clone())),
            Algorithm::Bfgs => Optimizer::Bfgs(BfgsState::new(h.bfgs.clone(), h.line_search.clone(), dim)),
            Algorithm::Oss => Optimizer::Oss(OssState::new(h.line_search.clone())),
            Algorithm::CgFletcherReeves => {
                Optimizer::Cg(CgState::new(BetaRule::FletcherReeves, h.cg.clone(), h.line_search.clone(), dim))
            }
            Algorithm::CgPolakRibiere => {
                Optimizer::Cg(CgState::new(BetaRule::PolakRibiere, h.cg.clone(), h.line_search.clone(), dim))
            }
            Algorithm::CgPowellBeale => {
                Optimizer::Cg(CgState::new(BetaRule::PowellBeale, h.cg.clone(), h.line_search.clone(), dim))
            }
        }
    }

    pub fn step<O: LeastSquares + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> Result<StepOutcome, String> {
        match self {
            Optimizer::Gdx(s) => Ok(s.step(obj, pt)),
            Optimizer::Rprop(s) => Ok(s.step(obj, pt)),
            Optimizer::Cg(s) => Ok(s.step(obj, pt)),
            Optimizer::Scg(s) => Ok(s.step(obj, pt)),
            Optimizer::Oss(s) => Ok(s.step(obj, pt)),
            Optimizer::Bfgs(s) => Ok(s.step(obj, pt)),
            Optimizer::Lm(s) => s.step(obj, pt),
        }
    }
}

/// Train `net` on scaled samples. Returns the network carrying the best
/// parameters together with the full record.
pub fn train(
    net: &Network,
    spec: &TrainerSpec,
    config: &TrainConfig,
    train_set: (&Matrix, &Matrix),
    validation: Option<(&Matrix, &Matrix)>,
) -> Result<(Network, TrainRecord)> {
    spec.validate()?;
    config.validate()?;
    let objective = NetworkObjective::new(*net.topology(), train_set.0, train_set.1)?;
    let validation = validation
        .filter(|(x, _)| x.rows() > 0)
        .map(|(x, y)| NetworkObjective::new(*net.topology(), x, y))
        .transpose()?;
    let record = run(&objective, validation.as_ref(), spec, config, net.to_params())?;
    let trained = Network::from_params(*net.topology(), net.seed(), record.best_params.clone())?;
    Ok((trained, record))
}

/// The stopping protocol over any least-squares objective.
pub fn run<O: LeastSquares + ?Sized>(
    objective: &O,
    validation: Option<&O>,
    spec: &TrainerSpec,
    config: &TrainConfig,
    w0: Vec<f64>,
) -> Result<TrainRecord> {
    spec.validate()?;
    config.validate()?;
    let diverged = |epoch: usize, reason: String| TrainError::NumericalDivergence { epoch, reason };

    let mut pt = Point::at(objective, w0);
    if !pt.loss.is_finite() {
        return Err(diverged(0, format!("initial loss {}", pt.loss)));
    }
    let mut record = TrainRecord {
        epochs_run: 0,
        stop_reason: StopReason::MaxEpochs,
        train_loss_curve: Vec::new(),
        validation_loss_curve: Vec::new(),
        best_params: pt.w.clone(),
    };
    if pt.loss <= config.goal {
        record.stop_reason = StopReason::GoalMet;
        return Ok(record);
    }

    let mut optimizer = Optimizer::new(spec, pt.w.len());
    let mut best_val = f64::INFINITY;
    let mut fails = 0usize;

    for epoch in 1..=config.max_epochs {
        let outcome = optimizer.step(objective, &mut pt).map_err(|r| diverged(epoch, r))?;
        if !pt.loss.is_finite() || pt.w.iter().any(|v| !v.is_finite()) {
            return Err(diverged(epoch, format!("loss became {}", pt.loss)));
        }
        record.epochs_run = epoch;
        record.train_loss_curve.push(pt.loss);

        if let Some(val) = validation {
            let v = val.value(&pt.w);
            if !v.is_finite() {
                return Err(diverged(epoch, format!("validation loss became {v}")));
            }
            record.validation_loss_curve.push(v);
            if v < best_val {
                best_val = v;
                record.best_params.clone_from(&pt.w);
                fails = 0;
            } else {
                fails += 1;
            }
        } else {
            record.best_params.clone_from(&pt.w);
        }

        let stop = if outcome == StepOutcome::LineSearchFailed {
            Some(StopReason::LineSearchFail)
        } else if pt.loss <= config.goal {
            Some(StopReason::GoalMet)
        } else if pt.grad_norm() < config.min_grad {
            Some(StopReason::GradientFloor)
        } else if config.patience > 0 && fails >= config.patience {
            Some(StopReason::EarlyStop)
        } else if epoch == config.max_epochs {
            Some(StopReason::MaxEpochs)
        } else {
            None
        };
        if let Some(reason) = stop {
            record.stop_reason = reason;
            break;
        }
    }
    Ok(record)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `w + alpha * d`
pub(crate) fn axpy(w: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    w.iter().zip(d).map(|(w, d)| w + alpha * d).collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// `0.5 * w^T A w - b^T w` for a symmetric positive definite `A`.
    pub struct Quadratic {
        pub a: Vec<Vec<f64>>,
        pub b: Vec<f64>,
    }

    impl Quadratic {
        pub fn grad(&self, w: &[f64]) -> Vec<f64> {
            self.a.iter().zip(&self.b).map(|(row, bi)| dot(row, w) - bi).collect()
        }
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.b.len()
        }

        fn value(&self, w: &[f64]) -> f64 {
            let aw: Vec<f64> = self.a.iter().map(|row| dot(row, w)).collect();
            0.5 * dot(w, &aw) - dot(&self.b, w)
        }

        fn value_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
            (self.value(w), self.grad(w))
        }
    }

    /// Linear least squares `mean((A w - b)^2)`.
    pub struct LinearLsq {
        pub a: Matrix,
        pub b: Vec<f64>,
    }

    impl LinearLsq {
        pub fn residuals(&self, w: &[f64]) -> Vec<f64> {
            self.a.iter_rows().zip(&self.b).map(|(row, bi)| dot(row, w) - bi).collect()
        }
    }

    impl Objective for LinearLsq {
        fn dim(&self) -> usize {
            self.a.cols()
        }

        fn value(&self, w: &[f64]) -> f64 {
            let r = self.residuals(w);
            dot(&r, &r) / r.len() as f64
        }

        fn value_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
            let r = self.residuals(w);
            let m = r.len() as f64;
            let mut g = vec![0.0; self.dim()];
            for (row, ri) in self.a.iter_rows().zip(&r) {
                for (gj, aj) in g.iter_mut().zip(row) {
                    *gj += 2.0 * ri * aj / m;
                }
            }
            (dot(&r, &r) / m, g)
        }
    }

    impl LeastSquares for LinearLsq {
        fn residuals_jacobian(&self, w: &[f64]) -> (Vec<f64>, Matrix) {
            (self.residuals(w), self.a.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Architecture;

    fn linear_task() -> (Matrix, Matrix) {
        let xs: Vec<f64> = (0..50).map(|i| -1.0 + 2.0 * i as f64 / 49.0).collect();
        let x = Matrix::from_vec(50, 1, xs.clone());
        let y = Matrix::from_vec(50, 1, xs.iter().map(|v| 0.8 * v).collect());
        (x, y)
    }

    #[test]
    fn algorithm_names_round_trip() {
        assert_eq!(Algorithm::ALL.len(), 9);
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("ADAM".parse::<Algorithm>().is_err());
    }

    #[test]
    fn zero_epochs_is_invalid() {
        let (x, y) = linear_task();
        let net = Network::init(Topology::new(Architecture::Mlff, 1, 3, 1).unwrap(), 1);
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        let err = train(&net, &TrainerSpec::new(Algorithm::Rprop), &cfg, (&x, &y), None).unwrap_err();
        assert!(matches!(err, TrainError::InvalidConfig(_)));
    }

    #[test]
    fn one_epoch_budget() {
        let (x, y) = linear_task();
        let net = Network::init(Topology::new(Architecture::Mlff, 1, 3, 1).unwrap(), 1);
        let cfg = TrainConfig {
            max_epochs: 1,
            ..TrainConfig::default()
        };
        for alg in Algorithm::ALL {
            let (_, rec) = train(&net, &TrainerSpec::new(alg), &cfg, (&x, &y), None).unwrap();
            assert_eq!(rec.epochs_run, 1, "{alg}");
            assert_eq!(rec.stop_reason, StopReason::MaxEpochs, "{alg}");
            assert_eq!(rec.train_loss_curve.len(), 1);
            assert!(rec.validation_loss_curve.is_empty());
        }
    }

    #[test]
    fn exact_data_meets_goal_immediately() {
        let net = Network::init(Topology::new(Architecture::Cffn, 2, 3, 2).unwrap(), 4);
        let x = Matrix::from_rows(&[[0.1, 0.2], [-0.5, 0.9], [0.3, -0.3]]);
        let y = net.predict(&x).unwrap();
        for alg in Algorithm::ALL {
            let (out, rec) = train(&net, &TrainerSpec::new(alg), &TrainConfig::default(), (&x, &y), None).unwrap();
            assert_eq!(rec.stop_reason, StopReason::GoalMet);
            assert!(rec.epochs_run <= 1);
            assert_eq!(out, net);
        }
    }

    #[test]
    fn rejects_non_positive_hyperparameters() {
        let mut spec = TrainerSpec::new(Algorithm::Gdx);
        spec.hyper.gdx.lr = 0.0;
        assert!(matches!(spec.validate(), Err(TrainError::InvalidConfig(_))));
        let mut spec = TrainerSpec::new(Algorithm::Lm);
        spec.hyper.lm.mu0 = -1.0;
        assert!(spec.validate().is_err());
        for alg in Algorithm::ALL {
            TrainerSpec::new(alg).validate().unwrap();
        }
    }

    #[test]
    fn curves_csv_layout() {
        let rec = TrainRecord {
            epochs_run: 2,
            stop_reason: StopReason::MaxEpochs,
            train_loss_curve: vec![0.5, 0.25],
            validation_loss_curve: vec![0.75, 0.5],
            best_params: vec![],
        };
        assert_eq!(rec.curves_csv(), "epoch,train_loss,validation_loss\n1,0.5,0.75\n2,0.25,0.5\n");
        let rec = TrainRecord {
            validation_loss_curve: vec![],
            ..rec
        };
        assert_eq!(rec.curves_csv(), "epoch,train_loss,validation_loss\n1,0.5,\n2,0.25,\n");
    }
}

use super::line_search::{search_along, LineSearchParams};
use super::{dot, norm, Objective, Point, StepOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaRule {
    FletcherReeves,
    PolakRibiere,
    /// Polak–Ribière with Powell's orthogonality restart test.
    PowellBeale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgParams {
    /// Restart when `|g·g_prev| >= ratio * g·g` (Powell–Beale only).
    pub powell_beale_ratio: f64,
}

impl Default for CgParams {
    fn default() -> Self {
        Self {
            powell_beale_ratio: 0.2,
        }
    }
}

/// Conjugacy coefficient. Fletcher–Reeves is `g·g / g_prev·g_prev`; the
/// other two rules use the Polak–Ribière form clipped at zero.
pub fn beta(rule: BetaRule, g: &[f64], g_prev: &[f64]) -> f64 {
    let denom = dot(g_prev, g_prev);
    if denom == 0.0 {
        return 0.0;
    }
    match rule {
        BetaRule::FletcherReeves => dot(g, g) / denom,
        BetaRule::PolakRibiere | BetaRule::PowellBeale => {
            let num: f64 = g.iter().zip(g_prev).map(|(a, b)| a * (a - b)).sum();
            (num / denom).max(0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgState {
    pub rule: BetaRule,
    pub params: CgParams,
    pub line_search: LineSearchParams,
    /// Steepest-descent restart period in iterations.
    pub restart_period: usize,
    prev_grad: Option<Vec<f64>>,
    prev_dir: Vec<f64>,
    prev_slope: f64,
    prev_alpha: f64,
    since_restart: usize,
}

impl CgState {
    pub fn new(rule: BetaRule, params: CgParams, line_search: LineSearchParams, dim: usize) -> Self {
        Self {
            rule,
            params,
            line_search,
            restart_period: dim.max(1),
            prev_grad: None,
            prev_dir: Vec::new(),
            prev_slope: 0.0,
            prev_alpha: 0.0,
            since_restart: 0,
        }
    }

    /// Search direction for the current gradient, and whether it is a
    /// steepest-descent restart.
    pub fn direction(&self, g: &[f64]) -> (Vec<f64>, bool) {
        let steepest = || (g.iter().map(|v| -v).collect::<Vec<_>>(), true);
        let Some(g_prev) = &self.prev_grad else {
            return steepest();
        };
        if self.since_restart >= self.restart_period {
            return steepest();
        }
        if self.rule == BetaRule::PowellBeale && dot(g, g_prev).abs() >= self.params.powell_beale_ratio * dot(g, g) {
            return steepest();
        }
        let b = beta(self.rule, g, g_prev);
        let d: Vec<f64> = g.iter().zip(&self.prev_dir).map(|(gi, di)| -gi + b * di).collect();
        if dot(&d, g) >= 0.0 {
            return steepest();
        }
        (d, false)
    }

    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        if pt.grad.iter().all(|&v| v == 0.0) {
            return StepOutcome::Stationary;
        }
        let (d, restart) = self.direction(&pt.grad);
        let slope = dot(&pt.grad, &d);
        let alpha0 = if self.prev_grad.is_none() {
            1.0 / norm(&d)
        } else {
            // assume the first-order change matches the previous iteration
            let guess = self.prev_alpha * self.prev_slope / slope;
            if guess.is_finite() && guess > 0.0 {
                guess
            } else {
                1.0 / norm(&d)
            }
        };
        match search_along(obj, pt, &d, alpha0, &self.line_search) {
            Ok(step) => {
                self.prev_grad = Some(std::mem::replace(pt, step.payload).grad);
                self.prev_dir = d;
                self.prev_slope = slope;
                self.prev_alpha = step.alpha;
                self.since_restart = if restart { 1 } else { self.since_restart + 1 };
                StepOutcome::Accepted
            }
            Err(_) => StepOutcome::LineSearchFailed,
        }
    }
}

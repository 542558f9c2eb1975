use super::line_search::{search_along, LineSearchParams};
use super::{dot, norm, Objective, Point, StepOutcome};

pub(crate) const CURVATURE_FLOOR: f64 = 1e-12;

/// One-step secant direction `-g + A s + B y`, the BFGS update of the
/// identity built from the latest step `s` and gradient change `y` alone.
/// Returns the direction and whether it fell back to `-g`.
pub fn oss_direction(g: &[f64], s: &[f64], y: &[f64]) -> (Vec<f64>, bool) {
    let steepest = || (g.iter().map(|v| -v).collect(), true);
    let sy = dot(s, y);
    if !(sy > CURVATURE_FLOOR) {
        return steepest();
    }
    let (yy, sg, yg) = (dot(y, y), dot(s, g), dot(y, g));
    let b = sg / sy;
    let a = -(1.0 + yy / sy) * b + yg / sy;
    let d: Vec<f64> = g
        .iter()
        .zip(s.iter().zip(y))
        .map(|(gi, (si, yi))| -gi + a * si + b * yi)
        .collect();
    if !(dot(&d, g) < 0.0) {
        return steepest();
    }
    (d, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OssState {
    pub line_search: LineSearchParams,
    last: Option<(Vec<f64>, Vec<f64>)>,
}

impl OssState {
    pub fn new(line_search: LineSearchParams) -> Self {
        Self { line_search, last: None }
    }

    pub fn direction(&self, g: &[f64]) -> (Vec<f64>, bool) {
        match &self.last {
            None => (g.iter().map(|v| -v).collect(), true),
            Some((s, y)) => oss_direction(g, s, y),
        }
    }

    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        if pt.grad.iter().all(|&v| v == 0.0) {
            return StepOutcome::Stationary;
        }
        let (d, fallback) = self.direction(&pt.grad);
        let alpha0 = if fallback { 1.0 / norm(&d) } else { 1.0 };
        match search_along(obj, pt, &d, alpha0, &self.line_search) {
            Ok(step) => {
                let old = std::mem::replace(pt, step.payload);
                let s = pt.w.iter().zip(&old.w).map(|(a, b)| a - b).collect();
                let y = pt.grad.iter().zip(&old.grad).map(|(a, b)| a - b).collect();
                self.last = Some((s, y));
                StepOutcome::Accepted
            }
            Err(_) => StepOutcome::LineSearchFailed,
        }
    }
}

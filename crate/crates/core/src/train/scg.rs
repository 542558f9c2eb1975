use super::{axpy, dot, Objective, Point, StepOutcome};

/// Scaled conjugate gradient: curvature along the search direction comes
/// from a finite difference of gradients, and a Levenberg-style scalar
/// `lambda` replaces the line search.
#[derive(Debug, Clone, PartialEq)]
pub struct ScgParams {
    /// Finite-difference step is `sigma / |d|`.
    pub sigma: f64,
    pub lambda0: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for ScgParams {
    fn default() -> Self {
        Self {
            sigma: 1e-4,
            lambda0: 1e-6,
            lambda_min: 1e-15,
            lambda_max: 1e100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScgState {
    pub params: ScgParams,
    pub lambda: f64,
    dir: Vec<f64>,
    /// Curvature `d·H·d` estimate for the current direction.
    curvature: f64,
    /// Whether the last iteration moved, so curvature must be re-estimated.
    moved: bool,
    successes: usize,
    dim: usize,
}

impl ScgState {
    pub fn new(params: ScgParams, dim: usize) -> Self {
        Self {
            lambda: params.lambda0,
            params,
            dir: Vec::new(),
            curvature: 0.0,
            moved: true,
            successes: 0,
            dim: dim.max(1),
        }
    }

    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        self.step_detailed(obj, pt).0
    }

    /// Also returns the comparison parameter: realized over predicted
    /// decrease. Steps are accepted only when it is positive.
    pub fn step_detailed<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> (StepOutcome, f64) {
        if pt.grad.iter().all(|&v| v == 0.0) {
            return (StepOutcome::Stationary, 0.0);
        }
        if self.dir.is_empty() {
            self.dir = pt.grad.iter().map(|v| -v).collect();
        }
        let mut slope = dot(&self.dir, &pt.grad);
        if slope >= 0.0 {
            self.dir = pt.grad.iter().map(|v| -v).collect();
            slope = dot(&self.dir, &pt.grad);
            self.moved = true;
        }
        let kappa = dot(&self.dir, &self.dir);
        if self.moved {
            let sigma = self.params.sigma / kappa.sqrt();
            let (_, g_plus) = obj.value_grad(&axpy(&pt.w, sigma, &self.dir));
            let dg: f64 = self
                .dir
                .iter()
                .zip(g_plus.iter().zip(&pt.grad))
                .map(|(d, (gp, g))| d * (gp - g))
                .sum();
            self.curvature = dg / sigma;
        }

        let mut delta = self.curvature + self.lambda * kappa;
        if delta <= 0.0 {
            // force a positive definite model
            delta = self.lambda * kappa;
            self.lambda -= self.curvature / kappa;
        }
        let alpha = -slope / delta;
        let w_new = axpy(&pt.w, alpha, &self.dir);
        let (f_new, g_new) = obj.value_grad(&w_new);
        let comparison = 2.0 * (f_new - pt.loss) / (alpha * slope);

        let outcome = if comparison > 0.0 && f_new.is_finite() {
            let g_old = std::mem::replace(pt, Point { w: w_new, loss: f_new, grad: g_new }).grad;
            self.successes += 1;
            self.moved = true;
            if self.successes >= self.dim {
                self.dir = pt.grad.iter().map(|v| -v).collect();
                self.successes = 0;
            } else {
                let gamma: f64 = g_old
                    .iter()
                    .zip(&pt.grad)
                    .map(|(go, gn)| (go - gn) * gn)
                    .sum::<f64>()
                    / slope;
                self.dir = self.dir.iter().zip(&pt.grad).map(|(d, g)| gamma * d - g).collect();
            }
            StepOutcome::Accepted
        } else {
            self.moved = false;
            StepOutcome::Rejected
        };

        let p = &self.params;
        if !(comparison >= 0.25) {
            self.lambda = (2.0 * self.lambda).min(p.lambda_max);
        }
        if comparison > 0.75 {
            self.lambda = (0.5 * self.lambda).max(p.lambda_min);
        }
        (outcome, comparison)
    }
}

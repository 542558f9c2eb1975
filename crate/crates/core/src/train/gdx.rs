use super::{axpy, Objective, Point, StepOutcome};

/// Gradient descent with momentum and an adaptive learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct GdxParams {
    pub lr: f64,
    pub momentum: f64,
    pub lr_inc: f64,
    pub lr_dec: f64,
}

impl Default for GdxParams {
    fn default() -> Self {
        Self {
            lr: 0.01,
            momentum: 0.9,
            lr_inc: 1.05,
            lr_dec: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdxState {
    pub params: GdxParams,
    pub lr: f64,
    pub prev_step: Vec<f64>,
}

impl GdxState {
    pub fn new(params: GdxParams, dim: usize) -> Self {
        Self {
            lr: params.lr,
            params,
            prev_step: vec![0.0; dim],
        }
    }

    /// `dw = momentum * dw_prev - lr * g`. A step that fails to lower the
    /// loss is undone and shrinks the rate; a successful one grows it.
    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        let dw: Vec<f64> = self
            .prev_step
            .iter()
            .zip(&pt.grad)
            .map(|(p, g)| self.params.momentum * p - self.lr * g)
            .collect();
        if dw.iter().all(|&v| v == 0.0) {
            return StepOutcome::Stationary;
        }
        let w = axpy(&pt.w, 1.0, &dw);
        let (loss, grad) = obj.value_grad(&w);
        if loss < pt.loss {
            *pt = Point { w, loss, grad };
            self.prev_step = dw;
            self.lr *= self.params.lr_inc;
            StepOutcome::Accepted
        } else {
            // momentum would replay the rejected direction
            self.prev_step.fill(0.0);
            self.lr *= self.params.lr_dec;
            StepOutcome::Rejected
        }
    }
}

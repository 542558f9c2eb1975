use super::{Objective, Point, StepOutcome};

/// Resilient backpropagation, iRPROP− flavour: per-weight step sizes driven
/// only by gradient signs, no weight backtracking.
#[derive(Debug, Clone, PartialEq)]
pub struct RpropParams {
    pub delta0: f64,
    pub inc: f64,
    pub dec: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

impl Default for RpropParams {
    fn default() -> Self {
        Self {
            delta0: 0.07,
            inc: 1.2,
            dec: 0.5,
            delta_min: 1e-6,
            delta_max: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpropState {
    pub params: RpropParams,
    pub delta: Vec<f64>,
    pub prev_grad: Vec<f64>,
}

impl RpropState {
    pub fn new(params: RpropParams, dim: usize) -> Self {
        Self {
            delta: vec![params.delta0; dim],
            prev_grad: vec![0.0; dim],
            params,
        }
    }

    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        if pt.grad.iter().all(|&g| g == 0.0) {
            return StepOutcome::Stationary;
        }
        let p = &self.params;
        for i in 0..pt.w.len() {
            let mut g = pt.grad[i];
            let agreement = g * self.prev_grad[i];
            if agreement > 0.0 {
                self.delta[i] = (self.delta[i] * p.inc).min(p.delta_max);
            } else if agreement < 0.0 {
                self.delta[i] = (self.delta[i] * p.dec).max(p.delta_min);
                // skip the move and forget the sign so the next step counts as fresh
                g = 0.0;
            }
            if g > 0.0 {
                pt.w[i] -= self.delta[i];
            } else if g < 0.0 {
                pt.w[i] += self.delta[i];
            }
            self.prev_grad[i] = g;
        }
        let (loss, grad) = obj.value_grad(&pt.w);
        pt.loss = loss;
        pt.grad = grad;
        StepOutcome::Accepted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::testing::Quadratic;

    fn far_quadratic(scale: f64) -> Quadratic {
        Quadratic {
            a: vec![vec![scale, 0.0], vec![0.0, 3.0 * scale]],
            b: vec![1000.0 * scale, 0.0],
        }
    }

    #[test]
    fn step_grows_geometrically_under_constant_sign() {
        let q = far_quadratic(1.0);
        let mut s = RpropState::new(RpropParams::default(), 2);
        let mut pt = Point::at(&q, vec![0.0, 0.0]);
        for k in 1..=30u32 {
            let before = pt.w[0];
            s.step(&q, &mut pt);
            let expected = (0.07 * 1.2f64.powi(k as i32 - 1)).min(50.0);
            assert!((pt.w[0] - before - expected).abs() < 1e-12, "k={k}");
            assert!((s.delta[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gradient_component_is_frozen() {
        let q = far_quadratic(1.0);
        let mut s = RpropState::new(RpropParams::default(), 2);
        // second coordinate already optimal
        let mut pt = Point::at(&q, vec![0.0, 0.0]);
        for _ in 0..5 {
            s.step(&q, &mut pt);
            assert_eq!(pt.w[1], 0.0);
        }
    }

    #[test]
    fn trajectory_ignores_loss_scale() {
        let run = |scale: f64| {
            let q = Quadratic {
                a: vec![vec![2.0 * scale, 0.3 * scale], vec![0.3 * scale, 1.0 * scale]],
                b: vec![1.0 * scale, -2.0 * scale],
            };
            let mut s = RpropState::new(RpropParams::default(), 2);
            let mut pt = Point::at(&q, vec![0.5, 0.5]);
            (0..40)
                .map(|_| {
                    s.step(&q, &mut pt);
                    pt.w.clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(1.0), run(100.0));
    }

    #[test]
    fn sign_flip_shrinks_and_skips() {
        let q = Quadratic {
            a: vec![vec![1.0]],
            b: vec![0.1],
        };
        let mut s = RpropState::new(RpropParams::default(), 1);
        let mut pt = Point::at(&q, vec![0.0]);
        s.step(&q, &mut pt); // 0 -> 0.07
        s.step(&q, &mut pt); // 0.07 -> 0.154, overshoot
        assert!((pt.w[0] - 0.154).abs() < 1e-12);
        s.step(&q, &mut pt); // sign flips: delta halves, no move
        assert!((pt.w[0] - 0.154).abs() < 1e-12);
        assert!((s.delta[0] - 0.042).abs() < 1e-12);
        assert_eq!(s.prev_grad[0], 0.0);
        s.step(&q, &mut pt); // fresh step with the reduced delta
        assert!((pt.w[0] - 0.112).abs() < 1e-12);
    }
}

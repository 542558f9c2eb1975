use super::line_search::{search_along, LineSearchParams};
use super::{dot, norm, Objective, Point, StepOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsParams {
    /// Updates with `s·y` at or below this are skipped.
    pub curvature_floor: f64,
}

impl Default for BfgsParams {
    fn default() -> Self {
        Self { curvature_floor: 1e-10 }
    }
}

/// Dense BFGS on the inverse Hessian approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct BfgsState {
    pub params: BfgsParams,
    pub line_search: LineSearchParams,
    dim: usize,
    /// Row-major `dim × dim` inverse Hessian estimate.
    inv_hessian: Vec<f64>,
    is_identity: bool,
}

impl BfgsState {
    pub fn new(params: BfgsParams, line_search: LineSearchParams, dim: usize) -> Self {
        let mut s = Self {
            params,
            line_search,
            dim,
            inv_hessian: Vec::new(),
            is_identity: true,
        };
        s.reset();
        s
    }

    pub fn reset(&mut self) {
        self.inv_hessian = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            self.inv_hessian[i * self.dim + i] = 1.0;
        }
        self.is_identity = true;
    }

    pub fn inverse_hessian(&self) -> &[f64] {
        &self.inv_hessian
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.inv_hessian.chunks_exact(self.dim.max(1)).map(|row| dot(row, v)).collect()
    }

    /// Rank-two update `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`. Returns
    /// false, leaving `H` untouched, when `s·y` fails the curvature guard.
    pub fn update(&mut self, s: &[f64], y: &[f64]) -> bool {
        let sy = dot(s, y);
        if !(sy > self.params.curvature_floor) {
            return false;
        }
        let rho = 1.0 / sy;
        let hy = self.apply(y);
        let yhy = dot(y, &hy);
        let coeff = rho * rho * yhy + rho;
        let n = self.dim;
        for i in 0..n {
            let row = &mut self.inv_hessian[i * n..(i + 1) * n];
            for j in 0..n {
                row[j] += coeff * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
        self.is_identity = false;
        true
    }

    pub fn step<O: Objective + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> StepOutcome {
        if pt.grad.iter().all(|&v| v == 0.0) {
            return StepOutcome::Stationary;
        }
        let mut d: Vec<f64> = self.apply(&pt.grad).iter().map(|v| -v).collect();
        if !(dot(&d, &pt.grad) < 0.0) {
            self.reset();
            d = pt.grad.iter().map(|v| -v).collect();
        }
        let alpha0 = |s: &Self, d: &[f64]| if s.is_identity { 1.0 / norm(d) } else { 1.0 };
        let mut result = search_along(obj, pt, &d, alpha0(self, &d), &self.line_search);
        if result.is_err() && !self.is_identity {
            self.reset();
            d = pt.grad.iter().map(|v| -v).collect();
            result = search_along(obj, pt, &d, alpha0(self, &d), &self.line_search);
        }
        match result {
            Ok(step) => {
                let old = std::mem::replace(pt, step.payload);
                let s: Vec<f64> = pt.w.iter().zip(&old.w).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = pt.grad.iter().zip(&old.grad).map(|(a, b)| a - b).collect();
                self.update(&s, &y);
                StepOutcome::Accepted
            }
            Err(_) => StepOutcome::LineSearchFailed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::testing::Quadratic;

    #[test]
    fn first_step_is_scaled_steepest_descent() {
        let q = Quadratic {
            a: vec![vec![2.0, 0.0], vec![0.0, 8.0]],
            b: vec![2.0, 8.0],
        };
        let mut s = BfgsState::new(BfgsParams::default(), LineSearchParams::default(), 2);
        let mut pt = Point::at(&q, vec![0.0, 0.0]);
        let g0 = pt.grad.clone();
        assert_eq!(s.step(&q, &mut pt), StepOutcome::Accepted);
        // displacement parallel to -g0
        let cross = pt.w[0] * -g0[1] - pt.w[1] * -g0[0];
        assert!(cross.abs() < 1e-12);
        assert!(pt.w[0] * -g0[0] > 0.0);
    }

    #[test]
    fn converges_to_the_inverse_hessian_on_a_quadratic() {
        let q = Quadratic {
            a: vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.0], vec![0.5, 0.0, 2.0]],
            b: vec![1.0, 2.0, 3.0],
        };
        let exact = LineSearchParams {
            c2: 1e-10,
            ..LineSearchParams::default()
        };
        let mut s = BfgsState::new(BfgsParams::default(), exact, 3);
        let mut pt = Point::at(&q, vec![3.0, -2.0, 1.0]);
        for _ in 0..3 {
            assert_eq!(s.step(&q, &mut pt), StepOutcome::Accepted);
        }
        // a full Newton step with H from anywhere lands on the minimizer
        let optimum = [-0.117_647_058_823_529_41, 0.705_882_352_941_176_5, 1.529_411_764_705_882_2];
        let probe = [10.0, -7.0, 2.5];
        let g = q.grad(&probe);
        let hg = s.apply(&g);
        for i in 0..3 {
            assert!((probe[i] - hg[i] - optimum[i]).abs() < 1e-6, "{i}");
        }
    }

    #[test]
    fn curvature_guard_skips_update() {
        let mut s = BfgsState::new(BfgsParams::default(), LineSearchParams::default(), 2);
        let before = s.inverse_hessian().to_vec();
        assert!(!s.update(&[1.0, 0.0], &[0.0, 1.0]));
        assert!(!s.update(&[1.0, 0.0], &[-1.0, 0.0]));
        assert!(!s.update(&[1e-6, 0.0], &[1e-5, 0.0]));
        assert_eq!(s.inverse_hessian(), before.as_slice());
        assert!(s.update(&[1.0, 0.0], &[2.0, 0.0]));
        assert_ne!(s.inverse_hessian(), before.as_slice());
    }
}

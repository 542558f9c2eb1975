use nalgebra::{DMatrix, DVector};

use super::{LeastSquares, Point, StepOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct LmParams {
    pub mu0: f64,
    pub mu_dec: f64,
    pub mu_inc: f64,
    pub mu_min: f64,
    /// Exceeding this damping is reported as divergence.
    pub mu_max: f64,
}

impl Default for LmParams {
    fn default() -> Self {
        Self {
            mu0: 1e-3,
            mu_dec: 0.1,
            mu_inc: 10.0,
            mu_min: 1e-20,
            mu_max: 1e10,
        }
    }
}

/// Levenberg–Marquardt on the residual vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LmState {
    pub params: LmParams,
    pub mu: f64,
}

/// Normal-equation pieces at the current iterate.
pub struct LmSystem {
    jtj: DMatrix<f64>,
    jtr: DVector<f64>,
}

impl LmState {
    pub fn new(params: LmParams) -> Self {
        Self { mu: params.mu0, params }
    }

    pub fn system<O: LeastSquares + ?Sized>(obj: &O, w: &[f64]) -> LmSystem {
        let (r, j) = obj.residuals_jacobian(w);
        let j = DMatrix::from_row_slice(j.rows(), j.cols(), j.as_slice());
        let r = DVector::from_vec(r);
        LmSystem {
            jtj: j.tr_mul(&j),
            jtr: j.tr_mul(&r),
        }
    }

    /// Solves `(JᵀJ + μI) δ = Jᵀr` and tries `w − δ` once. On success `pt`
    /// moves and `mu` shrinks; otherwise `pt` is untouched and `mu` grows.
    pub fn attempt<O: LeastSquares + ?Sized>(&mut self, obj: &O, pt: &mut Point, sys: &LmSystem) -> StepOutcome {
        let mut a = sys.jtj.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += self.mu;
        }
        let delta = match a.clone().cholesky() {
            Some(c) => Some(c.solve(&sys.jtr)),
            None => a.lu().solve(&sys.jtr),
        };
        let candidate = delta.map(|d| pt.w.iter().zip(d.iter()).map(|(w, d)| w - d).collect::<Vec<f64>>());
        if let Some(w) = candidate {
            let (loss, grad) = obj.value_grad(&w);
            if loss < pt.loss {
                *pt = Point { w, loss, grad };
                self.mu = (self.mu * self.params.mu_dec).max(self.params.mu_min);
                return StepOutcome::Accepted;
            }
        }
        self.mu *= self.params.mu_inc;
        StepOutcome::Rejected
    }

    /// One epoch: raise `mu` until a step lowers the loss. Running past
    /// `mu_max` is an error.
    pub fn step<O: LeastSquares + ?Sized>(&mut self, obj: &O, pt: &mut Point) -> Result<StepOutcome, String> {
        let sys = Self::system(obj, &pt.w);
        if sys.jtr.iter().all(|&v| v == 0.0) {
            return Ok(StepOutcome::Stationary);
        }
        loop {
            if self.attempt(obj, pt, &sys) == StepOutcome::Accepted {
                return Ok(StepOutcome::Accepted);
            }
            if self.mu > self.params.mu_max {
                return Err(format!("Levenberg-Marquardt damping exceeded {:e}", self.params.mu_max));
            }
        }
    }
}

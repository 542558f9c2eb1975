//! Strong Wolfe line search: bracketing followed by zoom with safeguarded
//! cubic interpolation.

use thiserror::Error;

use super::{axpy, dot, Objective, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchParams {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Function evaluations allowed per search.
    pub max_evals: usize,
    pub alpha_max: f64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.5,
            max_evals: 25,
            alpha_max: 1e10,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LineSearchError {
    #[error("not a descent direction: directional derivative {0}")]
    NotDescent(f64),
    #[error("no strong Wolfe point within {evals} evaluations")]
    Exhausted { evals: usize },
}

/// A step length satisfying the strong Wolfe conditions, with whatever the
/// evaluation closure attached to that point.
#[derive(Debug, Clone, PartialEq)]
pub struct LineStep<T> {
    pub alpha: f64,
    pub value: f64,
    pub slope: f64,
    pub evals: usize,
    pub payload: T,
}

struct Sample<T> {
    alpha: f64,
    value: f64,
    slope: f64,
    payload: Option<T>,
}

/// Searches `phi(alpha) = (value, slope, payload)` for a strong Wolfe point,
/// starting from `alpha0`. `f0` and `g0` are the value and slope at zero.
pub fn line_search<T, F>(
    mut phi: F,
    f0: f64,
    g0: f64,
    alpha0: f64,
    params: &LineSearchParams,
) -> Result<LineStep<T>, LineSearchError>
where
    F: FnMut(f64) -> (f64, f64, T),
{
    if !(g0 < 0.0) {
        return Err(LineSearchError::NotDescent(g0));
    }
    let (c1, c2) = (params.c1, params.c2);
    let armijo = |a: f64, f: f64| f <= f0 + c1 * a * g0;
    let curvature = |g: f64| g.abs() <= -c2 * g0;

    let mut evals = 0;
    let mut eval = |a: f64, evals: &mut usize| {
        *evals += 1;
        let (value, slope, payload) = phi(a);
        Sample {
            alpha: a,
            value,
            slope,
            payload: Some(payload),
        }
    };
    let done = |s: Sample<T>, evals: usize| LineStep {
        alpha: s.alpha,
        value: s.value,
        slope: s.slope,
        evals,
        payload: s.payload.expect("evaluated sample"),
    };

    let mut prev = Sample {
        alpha: 0.0,
        value: f0,
        slope: g0,
        payload: None,
    };
    let mut alpha = alpha0.clamp(f64::MIN_POSITIVE, params.alpha_max);

    // bracketing phase
    let (mut lo, mut hi) = loop {
        if evals >= params.max_evals {
            return Err(LineSearchError::Exhausted { evals });
        }
        let cur = eval(alpha, &mut evals);
        if !cur.value.is_finite() || !armijo(cur.alpha, cur.value) || (prev.alpha > 0.0 && cur.value >= prev.value) {
            break (prev, cur);
        }
        if curvature(cur.slope) {
            return Ok(done(cur, evals));
        }
        if cur.slope >= 0.0 {
            break (cur, prev);
        }
        if alpha >= params.alpha_max {
            return Err(LineSearchError::Exhausted { evals });
        }
        alpha = (2.0 * alpha).min(params.alpha_max);
        prev = cur;
    };

    // zoom phase: `lo` always satisfies Armijo and has the lowest value seen
    loop {
        if evals >= params.max_evals {
            return Err(LineSearchError::Exhausted { evals });
        }
        let a = interpolate(&lo, &hi);
        let cur = eval(a, &mut evals);
        if !cur.value.is_finite() || !armijo(cur.alpha, cur.value) || cur.value >= lo.value {
            hi = cur;
        } else {
            if curvature(cur.slope) {
                return Ok(done(cur, evals));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
        if (hi.alpha - lo.alpha).abs() <= f64::EPSILON * lo.alpha.abs().max(1e-300) {
            return Err(LineSearchError::Exhausted { evals });
        }
    }
}

/// Minimizer of the cubic through both endpoints' values and slopes, kept at
/// least 10% of the interval away from either end; bisection otherwise.
fn interpolate<T>(lo: &Sample<T>, hi: &Sample<T>) -> f64 {
    let (a1, a2) = (lo.alpha, hi.alpha);
    let (left, right) = (a1.min(a2), a1.max(a2));
    let width = right - left;
    let mid = 0.5 * (a1 + a2);
    if !hi.value.is_finite() || !hi.slope.is_finite() {
        return mid;
    }
    let d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a1 - a2);
    let disc = d1 * d1 - lo.slope * hi.slope;
    if !(disc >= 0.0) {
        return mid;
    }
    let d2 = (a2 - a1).signum() * disc.sqrt();
    let denom = hi.slope - lo.slope + 2.0 * d2;
    if denom == 0.0 {
        return mid;
    }
    let a = a2 - (a2 - a1) * (hi.slope + d2 - d1) / denom;
    if a.is_finite() && a >= left + 0.1 * width && a <= right - 0.1 * width {
        a
    } else {
        mid
    }
}

/// Line search on `obj` from `pt` along `d`. The payload is the gradient at
/// the accepted point, so callers get the next iterate without re-evaluating.
pub fn search_along<O: Objective + ?Sized>(
    obj: &O,
    pt: &Point,
    d: &[f64],
    alpha0: f64,
    params: &LineSearchParams,
) -> Result<LineStep<Point>, LineSearchError> {
    let g0 = dot(&pt.grad, d);
    line_search(
        |a| {
            let w = axpy(&pt.w, a, d);
            let (f, g) = obj.value_grad(&w);
            let slope = dot(&g, d);
            (f, slope, Point { w, loss: f, grad: g })
        },
        pt.loss,
        g0,
        alpha0,
        params,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(a: f64) -> (f64, f64, ()) {
        ((a - 1.0).powi(2), 2.0 * (a - 1.0), ())
    }

    fn check_wolfe(step: &LineStep<()>, f0: f64, g0: f64, p: &LineSearchParams) {
        assert!(step.value <= f0 + p.c1 * step.alpha * g0);
        assert!(step.slope.abs() <= -p.c2 * g0);
    }

    #[test]
    fn parabola_from_various_starts() {
        let p = LineSearchParams::default();
        for a0 in [1e-6, 0.01, 0.5, 1.0, 1.7, 3.0, 100.0, 1e5] {
            let step = line_search(quad, 1.0, -2.0, a0, &p).unwrap();
            check_wolfe(&step, 1.0, -2.0, &p);
            assert!((step.alpha - 1.0).abs() <= 0.5, "a0={a0} alpha={}", step.alpha);
            assert!(step.evals <= p.max_evals);
        }
    }

    #[test]
    fn tight_curvature_finds_exact_minimum() {
        let p = LineSearchParams {
            c2: 1e-10,
            ..LineSearchParams::default()
        };
        let step = line_search(quad, 1.0, -2.0, 0.3, &p).unwrap();
        assert!((step.alpha - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ascent_direction_rejected() {
        let p = LineSearchParams::default();
        assert_eq!(
            line_search(quad, 1.0, 0.0, 1.0, &p).unwrap_err(),
            LineSearchError::NotDescent(0.0)
        );
        assert!(line_search(quad, 1.0, 2.0, 1.0, &p).is_err());
    }

    #[test]
    fn non_finite_values_shrink_the_step() {
        let p = LineSearchParams::default();
        let phi = |a: f64| {
            if a > 2.0 {
                (f64::NAN, f64::NAN, ())
            } else {
                quad(a)
            }
        };
        let step = line_search(phi, 1.0, -2.0, 50.0, &p).unwrap();
        check_wolfe(&step, 1.0, -2.0, &p);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // strictly decreasing linear function: no curvature point exists
        let p = LineSearchParams::default();
        let err = line_search(|a| (-a, -1.0, ()), 0.0, -1.0, 1.0, &p).unwrap_err();
        assert_eq!(err, LineSearchError::Exhausted { evals: 25 });
    }

    #[test]
    fn armijo_holds_on_a_wiggly_function() {
        let p = LineSearchParams::default();
        let phi = |a: f64| (a.sin() * 3.0 + 0.1 * a * a - 2.0 * a, 3.0 * a.cos() + 0.2 * a - 2.0, ());
        let (f0, g0) = (0.0, 1.0);
        // slope at zero is +1: flip sign of x to get a descent problem
        let flipped = |a: f64| {
            let (f, g, _) = phi(-a);
            (f, -g, ())
        };
        for a0 in [0.01, 0.3, 1.0, 4.0, 20.0] {
            let step = line_search(flipped, f0, -g0, a0, &p).unwrap();
            check_wolfe(&step, f0, -g0, &p);
        }
    }
}

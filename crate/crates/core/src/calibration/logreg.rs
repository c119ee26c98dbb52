//! Prior-weighted logistic regression on one feature, slope constrained to
//! be non-negative, solved by projected damped Newton.

use crate::error::{Error, Result};
use crate::metrics::softplus;

/// Training settings shared by the calibrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Target prior used to weight the two classes.
    pub effective_prior: f64,
    pub max_iters: usize,
    /// Convergence threshold on the projected gradient norm.
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { effective_prior: 0.5, max_iters: 100, tolerance: 1e-8 }
    }
}

impl TrainConfig {
    /// Weights the classes by their share of the training data instead of
    /// `0.5`.
    pub fn empirical_prior(n_pos: usize, n_neg: usize) -> Self {
        Self { effective_prior: n_pos as f64 / (n_pos + n_neg) as f64, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.effective_prior > 0.0 && self.effective_prior < 1.0) {
            return Err(Error::invalid("effective prior must lie in (0, 1)"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Outcome of a successful fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegFit {
    pub slope: f64,
    pub offset: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Objective value at the start and after every accepted step.
    pub objective_trace: Vec<f64>,
}

struct Objective<'a> {
    pos: &'a [f64],
    neg: &'a [f64],
    w_pos: f64,
    w_neg: f64,
    logit_prior: f64,
}

struct Eval {
    value: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Neumaier-compensated sum. Near the optimum a Newton step lowers the
/// objective by a few ulps only, which naive summation cannot resolve.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn total(&self) -> f64 {
        self.s + self.c
    }
}

impl Objective<'_> {
    fn value(&self, w: f64, b: f64) -> f64 {
        let shift = b + self.logit_prior;
        let (mut p, mut n) = (Sum::default(), Sum::default());
        self.pos.iter().for_each(|&s| p.add(softplus(-(w * s + shift))));
        self.neg.iter().for_each(|&s| n.add(softplus(w * s + shift)));
        self.w_pos * p.total() + self.w_neg * n.total()
    }

    fn eval(&self, w: f64, b: f64) -> Eval {
        let shift = b + self.logit_prior;
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        let mut add = |s: f64, weight: f64, dz: f64, d2z: f64| {
            g[0] += weight * dz * s;
            g[1] += weight * dz;
            h[0][0] += weight * d2z * s * s;
            h[0][1] += weight * d2z * s;
            h[1][1] += weight * d2z;
        };
        for &s in self.pos {
            let z = w * s + shift;
            let q = sigmoid(-z);
            add(s, self.w_pos, -q, q * (1.0 - q));
        }
        for &s in self.neg {
            let z = w * s + shift;
            let q = sigmoid(z);
            add(s, self.w_neg, q, q * (1.0 - q));
        }
        h[1][0] = h[0][1];
        Eval { value: self.value(w, b), grad: g, hess: h }
    }
}

/// Gradient with the slope component zeroed when the `w >= 0` bound is
/// active and the gradient pushes against it.
fn projected(w: f64, g: [f64; 2]) -> [f64; 2] {
    if w <= 0.0 && g[0] > 0.0 {
        [0.0, g[1]]
    } else {
        g
    }
}

fn norm(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Newton direction with Levenberg damping until the system is solvable.
fn newton_direction(e: &Eval, fix_slope: bool) -> [f64; 2] {
    let g = e.grad;
    if fix_slope {
        let h = e.hess[1][1].max(1e-12);
        return [0.0, -g[1] / h];
    }
    let mut damping = 0.0;
    let scale = e.hess[0][0].abs().max(e.hess[1][1].abs()).max(1e-300);
    loop {
        let a = e.hess[0][0] + damping;
        let d = e.hess[1][1] + damping;
        let c = e.hess[0][1];
        let det = a * d - c * c;
        if det > 1e-14 * scale * scale && det.is_finite() {
            return [-(d * g[0] - c * g[1]) / det, -(a * g[1] - c * g[0]) / det];
        }
        damping = if damping == 0.0 { 1e-10 * scale.max(1e-8) } else { damping * 10.0 };
        if damping > 1e12 {
            return [-g[0], -g[1]];
        }
    }
}

/// Fits `llr = slope * s + offset` with `slope >= 0`, minimizing
///
/// `pi * mean_pos softplus(-(z)) + (1 - pi) * mean_neg softplus(z)`,
/// `z = slope * s + offset + logit(pi)`.
pub fn fit_logreg_traced(pos: &[f64], neg: &[f64], tc: &TrainConfig) -> Result<LogRegFit> {
    tc.validate()?;
    if pos.is_empty() {
        return Err(Error::EmptyClass("positive".into()));
    }
    if neg.is_empty() {
        return Err(Error::EmptyClass("negative".into()));
    }
    if pos.iter().chain(neg).any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("training score".into()));
    }
    let first = pos[0];
    if pos.iter().chain(neg).all(|&s| s == first) {
        return Err(Error::invalid("all training scores are identical"));
    }

    let pi = tc.effective_prior;
    let obj = Objective {
        pos,
        neg,
        w_pos: pi / pos.len() as f64,
        w_neg: (1.0 - pi) / neg.len() as f64,
        logit_prior: (pi / (1.0 - pi)).ln(),
    };

    let (mut w, mut b) = (0.0, 0.0);
    let mut current = obj.eval(w, b);
    let mut trace = vec![current.value];
    for iter in 0..tc.max_iters {
        let pg = projected(w, current.grad);
        let gn = norm(pg);
        if gn <= tc.tolerance {
            return Ok(LogRegFit { slope: w, offset: b, iterations: iter, grad_norm: gn, objective_trace: trace });
        }
        let fix_slope = w <= 0.0 && current.grad[0] > 0.0;
        let mut d = newton_direction(&current, fix_slope);
        if d[0] * pg[0] + d[1] * pg[1] >= 0.0 {
            // not a descent direction
            d = [-pg[0], -pg[1]];
        }

        // Armijo backtracking on the projected path
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-20 {
            let nw = (w + step * d[0]).max(0.0);
            let nb = b + step * d[1];
            let decrease = pg[0] * (nw - w) + pg[1] * (nb - b);
            let value = obj.value(nw, nb);
            if value <= current.value + 1e-4 * decrease && value < current.value {
                accepted = Some((nw, nb));
                break;
            }
            step *= 0.5;
        }
        if accepted.is_none() {
            // near the optimum the decrease can fall below rounding; take the
            // full step if it does not increase the objective and it shrinks
            // the gradient
            let nw = (w + d[0]).max(0.0);
            let nb = b + d[1];
            let e = obj.eval(nw, nb);
            if e.value <= current.value && norm(projected(nw, e.grad)) < gn {
                accepted = Some((nw, nb));
            }
        }
        let Some((nw, nb)) = accepted else {
            // a predicted decrease below the objective's resolution means the
            // iterate is optimal to working precision
            let predicted = -0.5 * (d[0] * pg[0] + d[1] * pg[1]);
            if predicted <= 8.0 * f64::EPSILON * current.value.abs().max(1.0) {
                return Ok(LogRegFit { slope: w, offset: b, iterations: iter, grad_norm: gn, objective_trace: trace });
            }
            return Err(Error::NonConvergence { iterations: iter, grad_norm: gn });
        };
        w = nw;
        b = nb;
        current = obj.eval(w, b);
        trace.push(current.value);
    }
    let gn = norm(projected(w, current.grad));
    if gn <= tc.tolerance {
        return Ok(LogRegFit { slope: w, offset: b, iterations: tc.max_iters, grad_norm: gn, objective_trace: trace });
    }
    Err(Error::NonConvergence { iterations: tc.max_iters, grad_norm: gn })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_tails() {
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let pos = [0.3, 1.2, -0.4, 2.0];
        let neg = [-1.0, 0.1, -2.5];
        let obj =
            Objective { pos: &pos, neg: &neg, w_pos: 0.3 / 4.0, w_neg: 0.7 / 3.0, logit_prior: (0.3f64 / 0.7).ln() };
        let (w, b) = (0.7, -0.2);
        let e = obj.eval(w, b);
        let h = 1e-6;
        let gw = (obj.value(w + h, b) - obj.value(w - h, b)) / (2.0 * h);
        let gb = (obj.value(w, b + h) - obj.value(w, b - h)) / (2.0 * h);
        assert!((gw - e.grad[0]).abs() < 1e-8);
        assert!((gb - e.grad[1]).abs() < 1e-8);
        let hww = (obj.eval(w + h, b).grad[0] - obj.eval(w - h, b).grad[0]) / (2.0 * h);
        let hwb = (obj.eval(w, b + h).grad[0] - obj.eval(w, b - h).grad[0]) / (2.0 * h);
        assert!((hww - e.hess[0][0]).abs() < 1e-7);
        assert!((hwb - e.hess[0][1]).abs() < 1e-7);
    }

    #[test]
    fn objective_decreases_and_converges() {
        let pos: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() + 0.8).collect();
        let neg: Vec<f64> = (0..40).map(|i| (i as f64 * 0.53).cos() - 0.6).collect();
        let fit = fit_logreg_traced(&pos, &neg, &TrainConfig::default()).unwrap();
        assert!(fit.grad_norm <= 1e-8);
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(fit.slope > 0.0);
    }

    #[test]
    fn reversed_classes_pin_slope_at_zero() {
        let fit = fit_logreg_traced(&[-1.0, -2.0, -0.5], &[1.0, 2.0, 0.7], &TrainConfig::default()).unwrap();
        assert_eq!(fit.slope, 0.0);
        // balanced prior and no usable slope: LLR 0
        assert!(fit.offset.abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        let tc = TrainConfig::default();
        assert!(matches!(fit_logreg_traced(&[], &[1.0], &tc), Err(Error::EmptyClass(_))));
        assert!(fit_logreg_traced(&[1.0, 1.0], &[1.0], &tc).is_err());
        assert!(fit_logreg_traced(&[1.0], &[0.0], &TrainConfig { max_iters: 0, ..tc }).is_err());
        assert!(fit_logreg_traced(&[1.0], &[0.0], &TrainConfig { effective_prior: 1.0, ..tc }).is_err());
    }

    #[test]
    fn iteration_cap_reports_gradient() {
        let pos: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let neg: Vec<f64> = (0..30).map(|i| i as f64 * 0.1 - 1.0).collect();
        let tc = TrainConfig { max_iters: 1, tolerance: 1e-14, ..TrainConfig::default() };
        match fit_logreg_traced(&pos, &neg, &tc) {
            Err(Error::NonConvergence { iterations: 1, grad_norm }) => assert!(grad_norm > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! Derivative-free local minimization, a thin wrapper over argmin's Nelder–Mead.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = (self.0)(p);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

/// Minimizes `f` from `start` with an initial simplex of edge `step`.
/// Returns the best point and value.
pub(crate) fn minimize<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], step: f64, max_iters: u64) -> (Vec<f64>, f64) {
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .expect("non-negative tolerance");
    let result = Executor::new(Objective(f), solver)
        .configure(|state| state.max_iters(max_iters))
        .run();
    match result {
        Ok(res) => {
            let state = res.state;
            let best = state.best_param.unwrap_or_else(|| start.to_vec());
            (best, state.best_cost)
        }
        Err(_) => (start.to_vec(), f64::NAN),
    }
}

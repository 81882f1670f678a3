//! Derivative-free local minimization (Nelder-Mead, via `argmin`).

use argmin::core::{
    CostFunction, Error as ArgminError, Executor, State, TerminationReason, TerminationStatus,
};
use argmin::solver::neldermead::NelderMead;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    /// Standard deviation of the simplex values at which the search stops.
    pub f_tol: f64,
    pub max_iters: u64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.1,
            f_tol: 1e-14,
            max_iters: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: u64,
    pub converged: bool,
}

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok((self.0)(p))
    }
}

pub fn nelder_mead<F>(f: F, start: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(opts.f_tol)
        .expect("non-negative tolerance");
    let fallback = || Minimum {
        x: start.to_vec(),
        value: f(start),
        evals: 1,
        converged: false,
    };
    let res = match Executor::new(Objective(&f), solver)
        .configure(|s| s.max_iters(opts.max_iters).counting(true))
        .run()
    {
        Ok(res) => res,
        Err(_) => return fallback(),
    };
    let state = res.state();
    let Some(x) = state.get_best_param().cloned() else {
        return fallback();
    };
    Minimum {
        value: state.get_best_cost(),
        evals: state
            .get_func_counts()
            .get("cost_count")
            .copied()
            .unwrap_or(0),
        converged: matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        ),
        x,
    }
}

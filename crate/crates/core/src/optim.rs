//! Limited-memory BFGS with a backtracking Armijo line search.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct LbfgsOptions {
    /// History length.
    pub memory: usize,
    pub max_iterations: usize,
    /// Converged when the gradient infinity-norm drops below this.
    pub gradient_tolerance: f64,
    pub max_step: f64,
    /// Also converged after `STALL_ITERATIONS` consecutive steps whose
    /// decrease is below this fraction of `max(|f|, 1)`.
    pub value_tolerance: f64,
}

const STALL_ITERATIONS: usize = 5;

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            max_step: 1.0,
            value_tolerance: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Minimizes `f`, which returns the value and writes the gradient into its
/// second argument. The returned value never exceeds `f(x0)`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &LbfgsOptions) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    if n == 0 {
        return LbfgsResult {
            x,
            value: fx,
            gradient_norm: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut g_new = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut stalled = 0;
    let mut flat = 0;

    for iter in 0..opts.max_iterations {
        let gnorm = inf_norm(&g);
        if gnorm < opts.gradient_tolerance {
            return LbfgsResult {
                x,
                value: fx,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
            };
        }

        // Two-loop recursion for d = −H·g.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            for di in d.iter_mut() {
                *di *= gamma;
            }
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let dmax = inf_norm(&d);
        let mut step = if history.is_empty() {
            (opts.max_step / dmax).min(1.0)
        } else {
            1.0
        };
        if step * dmax > opts.max_step {
            step = opts.max_step / dmax;
        }

        let mut accepted = false;
        let mut f_new = fx;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            f_new = f(&x_new, &mut g_new);
            if f_new <= fx + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || f_new > fx {
            // No decrease at machine precision: restart from steepest descent once, then give up.
            if history.is_empty() {
                stalled += 1;
            }
            history.clear();
            if stalled > 1 {
                return LbfgsResult {
                    x,
                    value: fx,
                    gradient_norm: gnorm,
                    iterations: iter,
                    converged: false,
                };
            }
            continue;
        }
        stalled = 0;
        if fx - f_new <= opts.value_tolerance * fx.abs().max(1.0) {
            flat += 1;
        } else {
            flat = 0;
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).max(1e-300) {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        if flat >= STALL_ITERATIONS {
            let gnorm = inf_norm(&g);
            return LbfgsResult {
                x,
                value: fx,
                gradient_norm: gnorm,
                iterations: iter + 1,
                converged: true,
            };
        }
    }
    let gnorm = inf_norm(&g);
    LbfgsResult {
        x,
        value: fx,
        gradient_norm: gnorm,
        iterations: opts.max_iterations,
        converged: gnorm < opts.gradient_tolerance,
    }
}

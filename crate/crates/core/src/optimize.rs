//! Derivative-free Nelder–Mead minimization.

use crate::error::{Error, Result};

const MAX_RESTARTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Simplex size (max-norm distance of every vertex to the best) at which to stop.
    pub x_tolerance: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iterations: 5000, x_tolerance: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl NelderMead {
    /// Minimize `f` from `x0` with initial simplex offsets `step`.
    ///
    /// Non-finite objective values are treated as `+∞`. After each
    /// convergence the search restarts from the best vertex with a fresh
    /// simplex until a restart no longer improves; the result is never worse
    /// than `f(x0)`.
    pub fn minimize<F>(&self, f: F, x0: &[f64], step: &[f64]) -> Result<Minimum>
    where
        F: Fn(&[f64]) -> f64,
    {
        if x0.is_empty() || x0.len() != step.len() {
            return Err(Error::InvalidInput("start point and step sizes must match".into()));
        }
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let seed = eval(x0);
        let mut used = 0;
        let mut best = Minimum { x: x0.to_vec(), value: seed, iterations: 0 };
        for _ in 0..MAX_RESTARTS {
            let budget = self.max_iterations - used;
            let (m, converged) = self.run(&eval, &best.x, step, budget);
            used += m.iterations;
            let improved = m.value < best.value;
            let stalled = !improved
                || (best.value - m.value).abs() <= 1e-12 * best.value.abs()
                    && m.x.iter().zip(&best.x).all(|(a, b)| (a - b).abs() <= self.x_tolerance);
            if improved {
                best = Minimum { iterations: used, ..m };
            }
            if !converged {
                return Err(Error::Convergence {
                    iterations: used,
                    best: best.x,
                    best_objective: best.value,
                });
            }
            if stalled {
                break;
            }
        }
        best.iterations = used;
        Ok(best)
    }

    fn run<F>(&self, f: &F, x0: &[f64], step: &[f64], budget: usize) -> (Minimum, bool)
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step[i];
            let v = f(&x);
            simplex.push((x, v));
        }
        let mut iterations = 0;
        let converged = loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if size <= self.x_tolerance {
                break true;
            }
            if iterations >= budget {
                break false;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].clone();
            let toward = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (w - c)).collect()
            };
            let xr = toward(-1.0);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = toward(-2.0);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = toward(-0.5);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = toward(0.5);
                    let fc = f(&xc);
                    (xc, fc)
                };
                if fc < worst.1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for (x, v) in simplex.iter_mut().skip(1) {
                        for (xi, bi) in x.iter_mut().zip(&best) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        *v = f(x);
                    }
                }
            }
        };
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        (Minimum { x, value, iterations }, converged)
    }
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, x_tolerance: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > x_tolerance {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

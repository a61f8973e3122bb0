//! Derivative-free minimization with the Nelder–Mead simplex method.

use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_iter: 1000, f_tol: 1e-14, x_tol: 1e-10 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Minimizes `f` from `x0` with an initial simplex of axis steps `step`.
/// Non-finite values are treated as `+∞`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, opts: NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += step;
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let (alpha, gamma, rho, shrink) = (1.0, 2.0, 0.5, 0.5);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
    };

    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);

        let spread = vals[n] - vals[0];
        let diam = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol && diam <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for x in &simplex[..n] {
            for k in 0..n {
                centroid[k] += x[k] / n as f64;
            }
        }
        let xr = combine(&centroid, &simplex[n], -alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = combine(&centroid, &simplex[n], -gamma);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        // contraction, outside or inside
        let (xc, fc) = if fr < vals[n] {
            let xc = combine(&centroid, &xr, rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = combine(&centroid, &simplex[n], rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for k in 1..=n {
            simplex[k] = combine(&simplex[0], &simplex[k], shrink);
            vals[k] = eval(&simplex[k], &mut evals);
        }
    }
    let best = (0..=n).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    NelderMeadResult {
        x: simplex[best].clone(),
        f: vals[best],
        iterations,
        evaluations: evals,
        converged,
        trace,
    }
}

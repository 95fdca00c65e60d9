//! Box-constrained limited-memory BFGS.
//!
//! A projected variant: variables sitting on a bound with the gradient pointing
//! outward are frozen for the step, the L-BFGS direction is built on the rest,
//! and an Armijo backtracking search runs along the projected path. Stopping
//! rules mirror the usual L-BFGS-B defaults (projected-gradient and relative
//! decrease tests).

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    /// Projected-gradient infinity-norm threshold.
    pub gtol: f64,
    /// Relative function decrease threshold.
    pub ftol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { memory: 10, max_iterations: 200, gtol: 1e-5, ftol: 2.220446049250313e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    /// No step satisfying the sufficient-decrease test could be found.
    Stalled,
    MaxIterations,
    /// The objective was not finite at the starting point.
    Failed,
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub status: ConvergenceStatus,
}

/// Minimize `f` over the box `[lower, upper]`.
///
/// `f` returns `None` where the objective cannot be evaluated; the line search
/// treats such points as infinitely bad.
pub fn minimize<F>(mut f: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &LbfgsOptions) -> Minimum
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let Some((mut fx, mut g)) = f(&x).filter(|(v, g)| v.is_finite() && g.iter().all(|gi| gi.is_finite())) else {
        return Minimum { x, value: f64::INFINITY, gradient: vec![f64::NAN; n], iterations: 0, status: ConvergenceStatus::Failed };
    };

    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();

    for iter in 0..opts.max_iterations {
        let free: Vec<bool> = (0..n)
            .map(|i| !((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)))
            .collect();
        let pg_norm = (0..n).filter(|&i| free[i]).fold(0.0_f64, |m, i| m.max(g[i].abs()));
        if pg_norm < opts.gtol {
            return Minimum { x, value: fx, gradient: g, iterations: iter, status: ConvergenceStatus::Converged };
        }

        let mut tried_steepest = s_hist.is_empty();
        let mut dir = two_loop(&g, &free, &s_hist, &y_hist);
        if dot(&dir, &g) >= 0.0 {
            dir = steepest(&g, &free);
            s_hist.clear();
            y_hist.clear();
            tried_steepest = true;
        }

        let step = loop {
            let t0 = if s_hist.is_empty() { (1.0 / inf_norm(&dir)).min(1.0) } else { 1.0 };
            match line_search(&mut f, &x, fx, &g, &dir, t0, &project) {
                Some(found) => break Some(found),
                None if !tried_steepest => {
                    dir = steepest(&g, &free);
                    s_hist.clear();
                    y_hist.clear();
                    tried_steepest = true;
                }
                None => break None,
            }
        };
        let Some((x_new, f_new, g_new)) = step else {
            return Minimum { x, value: fx, gradient: g, iterations: iter, status: ConvergenceStatus::Stalled };
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * norm(&s) * norm(&y) && sy > 0.0 {
            if s_hist.len() == opts.memory {
                s_hist.remove(0);
                y_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(y);
        }

        let decrease = fx - f_new;
        x = x_new;
        g = g_new;
        let scale = fx.abs().max(f_new.abs()).max(1.0);
        fx = f_new;
        if decrease <= opts.ftol * scale {
            return Minimum { x, value: fx, gradient: g, iterations: iter + 1, status: ConvergenceStatus::Converged };
        }
    }
    Minimum { x, value: fx, gradient: g, iterations: opts.max_iterations, status: ConvergenceStatus::MaxIterations }
}

type Step = (Vec<f64>, f64, Vec<f64>);

fn line_search<F>(
    f: &mut F,
    x: &[f64],
    fx: f64,
    g: &[f64],
    dir: &[f64],
    t0: f64,
    project: &impl Fn(&mut [f64]),
) -> Option<Step>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    const C1: f64 = 1e-4;
    let mut t = t0;
    for _ in 0..40 {
        let mut xt: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + t * di).collect();
        project(&mut xt);
        let delta: Vec<f64> = xt.iter().zip(x).map(|(a, b)| a - b).collect();
        if delta.iter().all(|d| *d == 0.0) {
            return None;
        }
        if let Some((ft, gt)) = f(&xt) {
            if ft.is_finite() && gt.iter().all(|v| v.is_finite()) && ft <= fx + C1 * dot(g, &delta) {
                return Some((xt, ft, gt));
            }
        }
        t *= 0.5;
    }
    None
}

fn two_loop(g: &[f64], free: &[bool], s_hist: &[Vec<f64>], y_hist: &[Vec<f64>]) -> Vec<f64> {
    let mask = |v: &[f64]| -> Vec<f64> { v.iter().zip(free).map(|(x, &f)| if f { *x } else { 0.0 }).collect() };
    let mut q = mask(g);
    let k = s_hist.len();
    let mut alpha = vec![0.0; k];
    let rho: Vec<f64> = (0..k).map(|i| 1.0 / dot(&s_hist[i], &y_hist[i])).collect();
    for i in (0..k).rev() {
        alpha[i] = rho[i] * dot(&mask(&s_hist[i]), &q);
        let yi = mask(&y_hist[i]);
        for (qj, yj) in q.iter_mut().zip(&yi) {
            *qj -= alpha[i] * yj;
        }
    }
    if k > 0 {
        let gamma = dot(&s_hist[k - 1], &y_hist[k - 1]) / dot(&y_hist[k - 1], &y_hist[k - 1]);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for i in 0..k {
        let beta = rho[i] * dot(&mask(&y_hist[i]), &q);
        let si = mask(&s_hist[i]);
        for (qj, sj) in q.iter_mut().zip(&si) {
            *qj += (alpha[i] - beta) * sj;
        }
    }
    mask(&q).into_iter().map(|v| -v).collect()
}

fn steepest(g: &[f64], free: &[bool]) -> Vec<f64> {
    g.iter().zip(free).map(|(gi, &f)| if f { -gi } else { 0.0 }).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

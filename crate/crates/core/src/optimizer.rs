//! BFGS with a strong-Wolfe line search.
//!
//! Both adaptive loops minimize through this module: the energy directly and
//! the overlap as `1 − |⟨target|ψ⟩|²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsOptions {
    /// Convergence threshold on the gradient infinity-norm.
    pub gtol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Trial steps per line search before giving up.
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            max_iter: 500,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub theta_opt: Vec<f64>,
    pub objective_value: f64,
    pub n_evaluations: usize,
    pub n_iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Point {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

struct Counter<F> {
    f: F,
    evals: usize,
    best: Option<Point>,
}

impl<F> Counter<F>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.evals += 1;
        let (f, g) = (self.f)(x)?;
        if f.is_nan() || g.iter().any(|v| v.is_nan()) {
            return Err(Error::NanObjective(self.evals));
        }
        if self.best.as_ref().is_none_or(|b| f < b.f) {
            self.best = Some(Point {
                x: x.to_vec(),
                f,
                g: g.clone(),
            });
        }
        Ok((f, g))
    }
}

/// Outcome of one line search: the accepted step, or `None` after
/// exhausting the trial budget.
fn line_search<F>(
    obj: &mut Counter<F>,
    start: &Point,
    dir: &[f64],
    alpha_init: f64,
    opts: &BfgsOptions,
) -> Result<Option<Point>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let phi0 = start.f;
    let dphi0 = dot(&start.g, dir);
    let step = |a: f64| -> Vec<f64> {
        start
            .x
            .iter()
            .zip(dir)
            .map(|(x, d)| x + a * d)
            .collect()
    };
    let mut trials = 0usize;
    let probe = |obj: &mut Counter<F>, a: f64| -> Result<(Point, f64)> {
        let x = step(a);
        let (f, g) = obj.eval(&x)?;
        let dphi = dot(&g, dir);
        Ok((Point { x, f, g }, dphi))
    };

    // (alpha, phi, dphi)
    let mut prev = (0.0, phi0, dphi0);
    let mut alpha = alpha_init;
    let bracket;
    loop {
        if trials >= opts.max_line_search {
            return Ok(None);
        }
        trials += 1;
        let (pt, dphi) = probe(obj, alpha)?;
        if pt.f > phi0 + opts.c1 * alpha * dphi0 || (trials > 1 && pt.f >= prev.1) {
            bracket = (prev, (alpha, pt.f, dphi));
            break;
        }
        if dphi.abs() <= -opts.c2 * dphi0 {
            return Ok(Some(pt));
        }
        if dphi >= 0.0 {
            bracket = ((alpha, pt.f, dphi), prev);
            break;
        }
        prev = (alpha, pt.f, dphi);
        alpha *= 2.0;
    }

    // zoom
    let (mut lo, mut hi) = bracket;
    while trials < opts.max_line_search {
        trials += 1;
        let a = interpolate(lo, hi);
        let (pt, dphi) = probe(obj, a)?;
        if pt.f > phi0 + opts.c1 * a * dphi0 || pt.f >= lo.1 {
            hi = (a, pt.f, dphi);
        } else {
            if dphi.abs() <= -opts.c2 * dphi0 {
                return Ok(Some(pt));
            }
            if dphi * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, pt.f, dphi);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1.0) {
            break;
        }
    }
    Ok(None)
}

/// Cubic interpolation between two bracket ends, safeguarded into the
/// middle 80% of the interval; bisection when the cubic is ill-posed.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, d0) = lo;
    let (a1, f1, d1) = hi;
    let width = a1 - a0;
    let mid = 0.5 * (a0 + a1);
    let t1 = d0 + d1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = t1 * t1 - d0 * d1;
    if !disc.is_finite() || disc < 0.0 {
        return mid;
    }
    let t2 = width.signum() * disc.sqrt();
    let denom = d1 - d0 + 2.0 * t2;
    if denom == 0.0 {
        return mid;
    }
    let a = a1 - width * (d1 + t2 - t1) / denom;
    let (lo_b, hi_b) = if width > 0.0 {
        (a0 + 0.1 * width, a1 - 0.1 * width)
    } else {
        (a1 - 0.1 * width, a0 + 0.1 * width)
    };
    if a.is_finite() && a >= lo_b && a <= hi_b {
        a
    } else {
        mid
    }
}

/// Minimize `objective`, which returns the value and gradient at a point.
///
/// Returns the best point seen. The objective at the returned point never
/// exceeds the objective at `theta0`. A line search that fails to satisfy
/// the strong Wolfe conditions within `max_line_search` trials ends the run
/// with `converged = false`.
pub fn minimize<F>(objective: F, theta0: &[f64], opts: &BfgsOptions) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = theta0.len();
    let mut obj = Counter {
        f: objective,
        evals: 0,
        best: None,
    };
    let (f0, g0) = obj.eval(theta0)?;
    let mut cur = Point {
        x: theta0.to_vec(),
        f: f0,
        g: g0,
    };
    let mut converged = inf_norm(&cur.g) <= opts.gtol;
    let mut iterations = 0;
    let mut hinv = identity(n);
    let mut first = true;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut dir = mat_vec(&hinv, &cur.g, n);
        dir.iter_mut().for_each(|d| *d = -*d);
        if dot(&dir, &cur.g) >= 0.0 {
            hinv = identity(n);
            dir = cur.g.iter().map(|g| -g).collect();
        }
        let alpha0 = if first {
            (1.0 / inf_norm(&cur.g)).min(1.0)
        } else {
            1.0
        };
        let Some(next) = line_search(&mut obj, &cur, &dir, alpha0, opts)? else {
            break;
        };
        let s: Vec<f64> = next.x.iter().zip(&cur.x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&cur.g).map(|(a, b)| a - b).collect();
        let ys = dot(&y, &s);
        if ys > 1e-300 {
            if first {
                let scale = ys / dot(&y, &y);
                hinv.iter_mut().for_each(|h| *h = 0.0);
                for i in 0..n {
                    hinv[i * n + i] = scale;
                }
            }
            bfgs_update(&mut hinv, &s, &y, ys, n);
            first = false;
        }
        cur = next;
        converged = inf_norm(&cur.g) <= opts.gtol;
    }

    let best = obj.best.take().expect("at least one evaluation");
    let (x, f, g) = if best.f < cur.f {
        (best.x, best.f, best.g)
    } else {
        (cur.x, cur.f, cur.g)
    };
    let gradient_norm = inf_norm(&g);
    Ok(OptimizeResult {
        theta_opt: x,
        objective_value: f,
        n_evaluations: obj.evals,
        n_iterations: iterations,
        converged: gradient_norm <= opts.gtol,
        gradient_norm,
    })
}

/// [`minimize`] followed by `restarts` further runs from seeded uniform
/// perturbations (half-width `scale`) of the best point; keeps the best.
pub fn minimize_with_restarts<F>(
    mut objective: F,
    theta0: &[f64],
    opts: &BfgsOptions,
    restarts: usize,
    seed: u64,
    scale: f64,
) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut best = minimize(&mut objective, theta0, opts)?;
    let mut total = best.n_evaluations;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let start: Vec<f64> = best
            .theta_opt
            .iter()
            .map(|t| t + rng.random_range(-scale..=scale))
            .collect();
        let trial = minimize(&mut objective, &start, opts)?;
        total += trial.n_evaluations;
        if trial.objective_value < best.objective_value {
            best = trial;
        }
    }
    best.n_evaluations = total;
    Ok(best)
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/(yᵀs)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64, n: usize) {
    let rho = 1.0 / ys;
    let hy = mat_vec(h, y, n);
    let yhy = dot(y, &hy);
    let factor = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += factor * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

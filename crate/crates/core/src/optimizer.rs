//! Bounded two-parameter minimizer: coarse grid seeding followed by
//! Polak-Ribiere nonlinear conjugate gradient in log-parameter space.
//!
//! The search variable is `u = ln p`, which keeps both parameters positive
//! without barrier terms; iterates are projected onto `[ln lo, ln hi]^2`.
//! Gradients are finite differences in `u`.

use crate::error::{Error, Result};

/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Largest trial step, in log units, along any coordinate.
const MAX_LOG_STEP: f64 = 1.0;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    pub max_iterations: usize,
    /// Finite-difference step in log-parameter space.
    pub gradient_step: f64,
    /// Stop once an accepted step changes the objective by less than this
    /// fraction of its magnitude.
    pub convergence_tol: f64,
    /// Seed points, evaluated before any descent.
    pub init_grid: Vec<[f64; 2]>,
    /// Most descents started from seeds that beat their lattice neighbours.
    pub max_starts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let seeds = [0.3, 0.5, 0.7, 1.0, 1.4, 2.0, 3.0, 4.5];
        Self {
            max_iterations: 50,
            gradient_step: 1e-3,
            convergence_tol: 1e-4,
            init_grid: seeds.iter().flat_map(|&a| seeds.iter().map(move |&b| [a, b])).collect(),
            max_starts: 3,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iterations == 0
            || self.max_starts == 0
            || !positive(self.gradient_step)
            || !positive(self.convergence_tol)
            || self.init_grid.is_empty()
            || self.init_grid.iter().flatten().any(|&v| !positive(v))
        {
            return Err(Error::InvalidConfig(format!("invalid optimizer settings: {self:?}")));
        }
        Ok(())
    }
}

/// The box `[lo, hi]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(Error::InvalidConfig(format!("invalid bounds [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: [f64; 2],
    pub value: f64,
    /// Accepted descent steps, summed over all starts.
    pub iterations: usize,
    pub evaluations: usize,
    /// Values along the winning descent, from its seed to its end.
    pub history: Vec<f64>,
}

/// Central differences `(f(p + h e_i) - f(p - h e_i)) / 2h`.
pub fn finite_diff_gradient<F>(mut objective: F, point: [f64; 2], step: f64) -> [f64; 2]
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut grad = [0.0; 2];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut fwd = point;
        let mut back = point;
        fwd[i] += step;
        back[i] -= step;
        *g = (objective(fwd) - objective(back)) / (2.0 * step);
    }
    grad
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

struct LogSpace<F> {
    objective: F,
    lo: f64,
    hi: f64,
    bounds: Bounds,
    evaluations: usize,
}

impl<F: FnMut([f64; 2]) -> f64> LogSpace<F> {
    fn to_point(&self, u: [f64; 2]) -> [f64; 2] {
        [self.bounds.clamp(u[0].exp()), self.bounds.clamp(u[1].exp())]
    }

    fn eval(&mut self, u: [f64; 2]) -> f64 {
        self.evaluations += 1;
        let p = self.to_point(u);
        (self.objective)(p)
    }

    fn project(&self, u: [f64; 2]) -> [f64; 2] {
        [u[0].clamp(self.lo, self.hi), u[1].clamp(self.lo, self.hi)]
    }

    /// Central differences, one-sided within `step` of a face.
    fn gradient(&mut self, u: [f64; 2], fu: f64, step: f64) -> [f64; 2] {
        let mut grad = [0.0; 2];
        for i in 0..2 {
            let mut fwd = u;
            let mut back = u;
            fwd[i] += step;
            back[i] -= step;
            grad[i] = if back[i] < self.lo {
                (self.eval(fwd) - fu) / step
            } else if fwd[i] > self.hi {
                (fu - self.eval(back)) / step
            } else {
                (self.eval(fwd) - self.eval(back)) / (2.0 * step)
            };
        }
        grad
    }

    /// Zeroes components that point out of the box at an active face.
    fn project_gradient(&self, u: [f64; 2], g: [f64; 2]) -> [f64; 2] {
        let mut pg = g;
        for i in 0..2 {
            if (u[i] <= self.lo && g[i] > 0.0) || (u[i] >= self.hi && g[i] < 0.0) {
                pg[i] = 0.0;
            }
        }
        pg
    }
}

/// Minimizes `objective` over `bounds^2`.
///
/// Every seed is evaluated; each seed that is no worse than its neighbours
/// on the seed lattice starts a descent (best first, at most
/// `settings.max_starts`), and the best endpoint is returned. The result is
/// never worse than the best seed point. A non-finite objective value during
/// a descent ends that descent at its last finite iterate.
pub fn minimize<F>(objective: F, bounds: Bounds, settings: &OptimizerSettings) -> Result<Minimum>
where
    F: FnMut([f64; 2]) -> f64,
{
    settings.validate()?;
    let mut space = LogSpace {
        objective,
        lo: bounds.lo.ln(),
        hi: bounds.hi.ln(),
        bounds,
        evaluations: 0,
    };

    let mut seeds: Vec<([f64; 2], f64)> = Vec::with_capacity(settings.init_grid.len());
    for seed in &settings.init_grid {
        let u = space.project([bounds.clamp(seed[0]).ln(), bounds.clamp(seed[1]).ln()]);
        if seeds.iter().any(|(v, _)| *v == u) {
            continue;
        }
        let f = space.eval(u);
        seeds.push((u, f));
    }
    let starts = lattice_minima(&seeds, settings.max_starts);
    let Some(&first) = starts.first() else {
        let (u, f) = seeds[0];
        return Ok(Minimum {
            point: space.to_point(u),
            value: f,
            iterations: 0,
            evaluations: space.evaluations,
            history: vec![f],
        });
    };

    let mut iterations = 0;
    let mut best: Option<([f64; 2], f64, Vec<f64>)> = None;
    for (u, fu) in starts.into_iter().map(|i| seeds[i]) {
        let run = space.descend(u, fu, settings);
        iterations += run.3;
        if best.as_ref().map_or(true, |b| run.1 < b.1) {
            best = Some((run.0, run.1, run.2));
        }
    }
    let (u, value, history) = best.unwrap_or((seeds[first].0, seeds[first].1, vec![seeds[first].1]));
    Ok(Minimum {
        point: space.to_point(u),
        value,
        iterations,
        evaluations: space.evaluations,
        history,
    })
}

/// Indices of finite seeds no worse than any lattice neighbour, best first.
///
/// Neighbours are seeds whose coordinates sit at adjacent (or equal) ranks
/// among the distinct values on each axis. Ties go to the earlier seed.
fn lattice_minima(seeds: &[([f64; 2], f64)], limit: usize) -> Vec<usize> {
    let rank = |axis: usize| {
        let mut vals: Vec<f64> = seeds.iter().map(|(u, _)| u[axis]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        seeds
            .iter()
            .map(|(u, _)| vals.partition_point(|&v| v < u[axis]) as isize)
            .collect::<Vec<_>>()
    };
    let (rx, ry) = (rank(0), rank(1));
    let mut minima: Vec<usize> = (0..seeds.len())
        .filter(|&i| {
            let fi = seeds[i].1;
            fi.is_finite()
                && (0..seeds.len()).all(|j| {
                    j == i
                        || (rx[i] - rx[j]).abs() > 1
                        || (ry[i] - ry[j]).abs() > 1
                        || fi < seeds[j].1
                        || (fi == seeds[j].1 && i < j)
                        || !seeds[j].1.is_finite()
                })
        })
        .collect();
    minima.sort_by(|&a, &b| seeds[a].1.total_cmp(&seeds[b].1).then(a.cmp(&b)));
    minima.truncate(limit);
    minima
}

impl<F: FnMut([f64; 2]) -> f64> LogSpace<F> {
    /// Projected PR+ conjugate gradient from `u`. Returns the final point,
    /// its value, the value history and the number of accepted steps.
    fn descend(
        &mut self,
        mut u: [f64; 2],
        mut fu: f64,
        settings: &OptimizerSettings,
    ) -> ([f64; 2], f64, Vec<f64>, usize) {
        let mut history = vec![fu];
        let mut iterations = 0;
        let mut direction = [0.0; 2];
        let mut prev_grad: Option<[f64; 2]> = None;
        let mut since_restart = 0usize;
        let mut last_step: Option<(f64, f64)> = None;

        'outer: while iterations < settings.max_iterations {
            let grad = self.gradient(u, fu, settings.gradient_step);
            if !(grad[0].is_finite() && grad[1].is_finite()) {
                break;
            }
            let pg = self.project_gradient(u, grad);
            if dot(pg, pg).sqrt() <= 1e-12 * (1.0 + fu.abs()) {
                break;
            }

            let steepest = [-pg[0], -pg[1]];
            let mut is_steepest = true;
            direction = match prev_grad {
                Some(prev) if since_restart < 2 => {
                    // PR+: beta clipped at zero
                    let beta = (dot(pg, [pg[0] - prev[0], pg[1] - prev[1]]) / dot(prev, prev)).max(0.0);
                    let d = [steepest[0] + beta * direction[0], steepest[1] + beta * direction[1]];
                    if dot(d, pg) < 0.0 && beta.is_finite() {
                        is_steepest = beta == 0.0;
                        d
                    } else {
                        steepest
                    }
                }
                _ => steepest,
            };
            if is_steepest {
                since_restart = 0;
            }
            for i in 0..2 {
                if (u[i] <= self.lo && direction[i] < 0.0) || (u[i] >= self.hi && direction[i] > 0.0) {
                    direction[i] = 0.0;
                }
            }
            let max_comp = direction[0].abs().max(direction[1].abs());
            if max_comp == 0.0 {
                break;
            }

            let slope = dot(pg, direction);
            let cap = MAX_LOG_STEP / max_comp;
            // initial trial: scale the last accepted step by the ratio of directional slopes
            let mut alpha = match last_step {
                Some((a, s)) if s < 0.0 && slope < 0.0 => (a * s / slope).min(cap),
                _ => cap.min(1.0),
            };
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let cand = self.project([u[0] + alpha * direction[0], u[1] + alpha * direction[1]]);
                let fc = self.eval(cand);
                if !fc.is_finite() {
                    break 'outer;
                }
                let decrease = dot(pg, [cand[0] - u[0], cand[1] - u[1]]).min(0.0);
                if fc < fu && fc <= fu + ARMIJO_C1 * decrease {
                    accepted = Some((alpha, cand, fc));
                    break;
                }
                alpha *= 0.5;
            }

            let Some((alpha, mut cand, mut fc)) = accepted else {
                if is_steepest {
                    break;
                }
                // retry from steepest descent
                prev_grad = None;
                last_step = None;
                continue;
            };

            // one safeguarded step to the minimum of the quadratic through
            // f(0), f'(0) and f(alpha)
            let curvature = fc - fu - slope * alpha;
            let mut step = alpha;
            if curvature > 0.0 {
                let quad = -slope * alpha * alpha / (2.0 * curvature);
                if quad.is_finite()
                    && quad > 0.1 * alpha
                    && quad < 4.0 * alpha
                    && quad <= cap
                    && (quad - alpha).abs() > 1e-3 * alpha
                {
                    let refined = self.project([u[0] + quad * direction[0], u[1] + quad * direction[1]]);
                    let fr = self.eval(refined);
                    if fr.is_finite() && fr < fc {
                        cand = refined;
                        fc = fr;
                        step = quad;
                    }
                }
            }
            last_step = Some((step, slope));

            let change = (fu - fc).abs() / fu.abs().max(f64::MIN_POSITIVE);
            u = cand;
            fu = fc;
            iterations += 1;
            since_restart += 1;
            prev_grad = Some(pg);
            history.push(fu);
            if change < settings.convergence_tol {
                break;
            }
        }
        (u, fu, history, iterations)
    }
}

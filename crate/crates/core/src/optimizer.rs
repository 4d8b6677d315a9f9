//! Welfare maximization over box-constrained controls, with an augmented
//! Lagrangian handling the cumulative-emissions cap and the optional
//! per-period temperature cap.
//!
//! Inner solver: limited-memory quasi-Newton with gradient projection on
//! the box, stopping on the projected-gradient infinity norm. Outer loop:
//! first-order multiplier updates with penalty growth whenever the
//! violation shrinks slower than a fixed ratio. Everything is
//! deterministic: fixed starting point, no randomized steps.

use crate::diffkernel::{reverse_sweep, DualSeeds};
use crate::dynamics::{simulate_rhs, Controls, Trajectory};
use crate::error::SimError;
use crate::params::Params;

/// Which control a pin fixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinTarget {
    S,
    Mu,
}

/// Hard-fix one control coordinate (upstream-convention pins such as a
/// fixed first-period abatement rate; off unless a scenario asks).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pin {
    /// 1-based period.
    pub period: usize,
    pub target: PinTarget,
    pub value: f64,
}

/// Constraint set of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConstraints {
    /// Per-period cap T_AT(t) <= temp_cap, all t.
    pub temp_cap: Option<f64>,
    /// Whether the cumulative industrial-emissions cap is active.
    pub cumulative_cap_enabled: bool,
    pub pinned_controls: Vec<Pin>,
}

impl Default for ScenarioConstraints {
    fn default() -> Self {
        ScenarioConstraints {
            temp_cap: None,
            cumulative_cap_enabled: true,
            pinned_controls: Vec::new(),
        }
    }
}

/// Nonnegative inequality multipliers at the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    /// One per period when a temperature cap is present, else empty.
    pub temp: Vec<f64>,
    /// Cumulative-emissions cap multiplier.
    pub cumulative: f64,
}

/// One outer-iteration log record.
#[derive(Debug, Clone)]
pub struct OuterLog {
    pub iter: usize,
    pub w: f64,
    pub kkt_residual: f64,
    pub max_violation: f64,
    pub penalty: f64,
}

impl std::fmt::Display for OuterLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "iter {:>3}  W {:+.12e}  kkt {:.3e}  max_violation {:.3e}  penalty {:.3e}",
            self.iter, self.w, self.kkt_residual, self.max_violation, self.penalty
        )
    }
}

/// Optimization outcome. `converged == false` still carries the best
/// iterate found.
#[derive(Debug, Clone)]
pub struct OptResult {
    pub controls: Controls,
    pub w_star: f64,
    pub multipliers: Multipliers,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<OuterLog>,
}

/// Tolerances and iteration limits.
#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    /// Scaled KKT residual defining convergence.
    pub tol: f64,
    /// Projected-gradient infinity norm target of the inner solver.
    pub inner_gtol: f64,
    pub inner_max_iter: usize,
    pub outer_max_iter: usize,
    pub penalty0: f64,
    pub penalty_growth: f64,
    /// Outer penalty grows when violation fails to shrink below this
    /// fraction of the previous one.
    pub violation_ratio: f64,
    pub lbfgs_memory: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tol: 1e-8,
            inner_gtol: 1e-11,
            inner_max_iter: 20_000,
            outer_max_iter: 60,
            penalty0: 10.0,
            penalty_growth: 3.0,
            violation_ratio: 0.25,
            lbfgs_memory: 10,
        }
    }
}

/// Coordinate-wise clamp of the controls onto the box, honoring pins.
pub fn project(u: &Controls, p: &Params, sc: &ScenarioConstraints) -> Controls {
    let (lo, hi) = bounds(p, sc);
    let n = p.t_max;
    let mut x: Vec<f64> = u.s.iter().chain(u.mu.iter()).copied().collect();
    clamp_vec(&mut x, &lo, &hi);
    Controls::new(x[..n].to_vec(), x[n..].to_vec())
}

/// One multiplier/penalty update: lambda' = max(0, lambda + penalty *
/// violation); the penalty grows by the fixed factor when the worst
/// violation shrinks slower than `ratio` times the previous worst.
pub fn al_update(
    multipliers: &[f64],
    violations: &[f64],
    penalty: f64,
    prev_worst: f64,
    opts: &OptimizeOptions,
) -> (Vec<f64>, f64) {
    let updated: Vec<f64> = multipliers
        .iter()
        .zip(violations)
        .map(|(l, g)| (l + penalty * g).max(0.0))
        .collect();
    let worst = violations.iter().copied().fold(0.0, f64::max);
    let penalty = if worst > opts.violation_ratio * prev_worst {
        (penalty * opts.penalty_growth).min(1e12)
    } else {
        penalty
    };
    (updated, penalty)
}

fn bounds(p: &Params, sc: &ScenarioConstraints) -> (Vec<f64>, Vec<f64>) {
    let n = p.t_max;
    let mut lo = vec![0.0; 2 * n];
    let mut hi = vec![1.0; 2 * n];
    hi[n..].copy_from_slice(&p.pi35);
    for pin in &sc.pinned_controls {
        let idx = match pin.target {
            PinTarget::S => pin.period - 1,
            PinTarget::Mu => n + pin.period - 1,
        };
        lo[idx] = pin.value;
        hi[idx] = pin.value;
    }
    (lo, hi)
}

fn clamp_vec(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn projected_grad_inf(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let step = (x[i] - g[i]).clamp(lo[i], hi[i]);
        worst = worst.max((x[i] - step).abs());
    }
    worst
}

/// Augmented-Lagrangian value and gradient (as a minimization of -A).
struct AlEval {
    neg_a: f64,
    grad: Vec<f64>, // gradient of -A
    tr: Trajectory,
}

struct AlProblem<'a> {
    p: &'a Params,
    sc: &'a ScenarioConstraints,
    a_e: &'a [f64],
    a_c: &'a [f64],
    lam_temp: Vec<f64>,
    lam_cum: f64,
    rho: f64,
}

impl AlProblem<'_> {
    fn eval(&self, x: &[f64]) -> Result<AlEval, SimError> {
        let n = self.p.t_max;
        let u = Controls::new(x[..n].to_vec(), x[n..].to_vec());
        let tr = simulate_rhs(self.p, &u, self.a_e, self.a_c)?;
        let mut a = tr.w;
        let mut seeds = DualSeeds::default();
        if let Some(cap) = self.sc.temp_cap {
            let mut temp = vec![0.0; n];
            for t in 0..n {
                let g = tr.t_at[t] - cap;
                let m = (self.lam_temp[t] + self.rho * g).max(0.0);
                a -= (m * m - self.lam_temp[t] * self.lam_temp[t]) / (2.0 * self.rho);
                temp[t] = m;
            }
            seeds.temp = temp;
        }
        if self.sc.cumulative_cap_enabled {
            let g = tr.e_ind.iter().sum::<f64>() - self.p.pi19;
            let m = (self.lam_cum + self.rho * g).max(0.0);
            a -= (m * m - self.lam_cum * self.lam_cum) / (2.0 * self.rho);
            seeds.cumulative = m;
        }
        let sweep = reverse_sweep(self.p, &u, &tr, &seeds);
        let mut grad = Vec::with_capacity(2 * n);
        grad.extend(sweep.d_s.iter().map(|v| -v));
        grad.extend(sweep.d_mu.iter().map(|v| -v));
        Ok(AlEval {
            neg_a: -a,
            grad,
            tr,
        })
    }
}

/// Projected L-BFGS minimization of the augmented Lagrangian. Returns
/// (x, eval at x, projected-gradient inf norm, iterations).
fn solve_inner(
    prob: &AlProblem,
    mut x: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    opts: &OptimizeOptions,
) -> Result<(Vec<f64>, AlEval, f64, usize), SimError> {
    clamp_vec(&mut x, lo, hi);
    let mut cur = prob.eval(&x)?;
    let m = opts.lbfgs_memory;
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();
    let mut iters = 0;
    let mut pg = projected_grad_inf(&x, &cur.grad, lo, hi);
    // objective values are only trustworthy to ~1e-15 relative; near the
    // optimum the Armijo decrease falls below that, so accept steps within
    // the noise band and stop once no real progress accumulates
    let mut stall = 0;

    let mut prev_mask: Vec<bool> = Vec::new();

    while pg > opts.inner_gtol && iters < opts.inner_max_iter && stall < 50 {
        iters += 1;
        // freeze coordinates sitting at a bound with the gradient pushing
        // outward; quasi-Newton steps act on the free subspace only
        const AT_BOUND: f64 = 1e-12;
        let mask: Vec<bool> = (0..x.len())
            .map(|i| {
                !((x[i] <= lo[i] + AT_BOUND && cur.grad[i] > 0.0)
                    || (x[i] >= hi[i] - AT_BOUND && cur.grad[i] < 0.0))
            })
            .collect();
        if mask != prev_mask {
            // curvature pairs from a different active set mislead the
            // two-loop recursion; restart the memory
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            prev_mask = mask.clone();
        }
        let masked = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .zip(&mask)
                .map(|(x, m)| if *m { *x } else { 0.0 })
                .collect()
        };
        let gm = masked(&cur.grad);

        // two-loop recursion on the free subspace
        let mut d: Vec<f64> = gm.iter().map(|g| -g).collect();
        let k = s_hist.len();
        let mut alphas = vec![0.0; k];
        for j in (0..k).rev() {
            let a = rho_hist[j] * dot(&s_hist[j], &d);
            alphas[j] = a;
            axpy(-a, &y_hist[j], &mut d);
        }
        if k > 0 {
            let j = k - 1;
            let gamma = dot(&s_hist[j], &y_hist[j]) / dot(&y_hist[j], &y_hist[j]);
            for v in d.iter_mut() {
                *v *= gamma;
            }
        }
        for j in 0..k {
            let b = rho_hist[j] * dot(&y_hist[j], &d);
            axpy(alphas[j] - b, &s_hist[j], &mut d);
        }
        // fall back to steepest descent if the direction is not descent
        if dot(&gm, &d) >= 0.0 {
            d = gm.iter().map(|g| -g).collect();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // projected backtracking line search (Armijo on the projected
        // step). The initial step is capped so its infinity norm never
        // exceeds ~2 box widths: penalty-dominated gradients can be
        // orders of magnitude above the box scale, and a fixed number of
        // halvings from alpha = 1 would still leave an uphill step.
        let d_inf = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut alpha = if d_inf > 2.0 { 2.0 / d_inf } else { 1.0 };
        let mut accepted: Option<(Vec<f64>, AlEval)> = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x
                .iter()
                .zip(&d)
                .map(|(xi, di)| xi + alpha * di)
                .collect();
            clamp_vec(&mut trial, lo, hi);
            let step: Vec<f64> = trial.iter().zip(&x).map(|(t, xi)| t - xi).collect();
            let gs = dot(&cur.grad, &step);
            if step.iter().all(|v| *v == 0.0) {
                break;
            }
            let fuzz = 1e-15 * cur.neg_a.abs();
            match prob.eval(&trial) {
                Ok(ev) => {
                    if ev.neg_a <= cur.neg_a + 1e-4 * gs.min(0.0) + fuzz {
                        accepted = Some((trial, ev));
                        break;
                    }
                }
                Err(SimError::Domain { .. }) => {
                    // line search restores domain validity by shrinking
                }
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
        }
        let Some((x_new, ev_new)) = accepted else {
            // no acceptable step; declare the inner loop finished at the
            // current projected-gradient level
            break;
        };
        if ev_new.neg_a < cur.neg_a - 1e-15 * cur.neg_a.abs() {
            stall = 0;
        } else {
            stall += 1;
        }
        let s_vec: Vec<f64> = masked(&x_new.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        let y_vec: Vec<f64> =
            masked(&ev_new.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect::<Vec<_>>());
        let sy = dot(&s_vec, &y_vec);
        let ss = dot(&s_vec, &s_vec).sqrt();
        let yy = dot(&y_vec, &y_vec).sqrt();
        if sy > 1e-12 * ss * yy {
            if s_hist.len() == m {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
            s_hist.push(s_vec);
            y_hist.push(y_vec);
            rho_hist.push(1.0 / sy);
        }
        x = x_new;
        cur = ev_new;
        pg = projected_grad_inf(&x, &cur.grad, lo, hi);
    }
    Ok((x, cur, pg, iters))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Deterministic starting point: s = 0.25, mu ramping linearly from 0.03
/// to min(1, pi35).
pub fn default_start(p: &Params) -> Controls {
    let n = p.t_max;
    let s = vec![0.25; n];
    let denom = (n - 1).max(1) as f64;
    let mu = (0..n)
        .map(|t| 0.03 + (t as f64 / denom) * (p.pi35[t].min(1.0) - 0.03))
        .collect();
    Controls::new(s, mu)
}

/// Warm-start state for perturbed re-solves (the re-optimization oracle).
#[derive(Debug, Clone)]
pub struct WarmStart {
    pub controls: Controls,
    pub multipliers: Multipliers,
}

/// Maximize welfare under the scenario constraints.
pub fn optimize(
    p: &Params,
    sc: &ScenarioConstraints,
    opts: &OptimizeOptions,
) -> Result<OptResult, SimError> {
    optimize_rhs(p, sc, opts, &vec![0.0; p.t_max], &vec![0.0; p.t_max], None)
}

/// As [`optimize`] but on the problem with perturbed right-hand sides,
/// optionally warm-started from a previous solution.
pub fn optimize_rhs(
    p: &Params,
    sc: &ScenarioConstraints,
    opts: &OptimizeOptions,
    a_e: &[f64],
    a_c: &[f64],
    warm: Option<&WarmStart>,
) -> Result<OptResult, SimError> {
    let n = p.t_max;
    let (lo, hi) = bounds(p, sc);
    let start = match warm {
        Some(w) => w.controls.clone(),
        None => default_start(p),
    };
    let mut x: Vec<f64> = start.s.iter().chain(start.mu.iter()).copied().collect();
    clamp_vec(&mut x, &lo, &hi);

    let mut lam_temp = match (sc.temp_cap, warm) {
        (Some(_), Some(w)) if w.multipliers.temp.len() == n => w.multipliers.temp.clone(),
        (Some(_), _) => vec![0.0; n],
        (None, _) => Vec::new(),
    };
    let mut lam_cum = warm.map(|w| w.multipliers.cumulative).unwrap_or(0.0);
    let mut rho = opts.penalty0;
    let mut prev_worst = f64::INFINITY;
    let mut log = Vec::new();
    let mut total_inner = 0;
    let mut last_pg = f64::INFINITY;
    let mut converged = false;
    let mut kkt = f64::INFINITY;
    let mut final_eval: Option<AlEval> = None;

    for outer in 0..opts.outer_max_iter {
        let prob = AlProblem {
            p,
            sc,
            a_e,
            a_c,
            lam_temp: lam_temp.clone(),
            lam_cum,
            rho,
        };
        let (x_new, ev, pg, inner_iters) = solve_inner(&prob, x, &lo, &hi, opts)?;
        x = x_new;
        total_inner += inner_iters;
        last_pg = pg;

        // constraint violations at the inner solution
        let mut violations: Vec<f64> = Vec::new();
        let mut multipliers: Vec<f64> = Vec::new();
        if sc.temp_cap.is_some() {
            let cap = sc.temp_cap.unwrap();
            for t in 0..n {
                violations.push(ev.tr.t_at[t] - cap);
            }
            multipliers.extend(lam_temp.iter().copied());
        }
        if sc.cumulative_cap_enabled {
            violations.push(ev.tr.e_ind.iter().sum::<f64>() - p.pi19);
            multipliers.push(lam_cum);
        }
        let worst = violations.iter().copied().fold(0.0, f64::max);

        // first-order multiplier update
        let (updated, rho_new) = al_update(&multipliers, &violations, rho, prev_worst, opts);
        let mut idx = 0;
        if sc.temp_cap.is_some() {
            lam_temp.copy_from_slice(&updated[..n]);
            idx = n;
        }
        if sc.cumulative_cap_enabled {
            lam_cum = updated[idx];
        }

        // scaled KKT residual: stationarity, feasibility, complementarity
        let w_scale = ev.tr.w.abs().max(1.0);
        let comp = multipliers
            .iter()
            .zip(&violations)
            .map(|(l, g)| (l * g).abs())
            .fold(0.0, f64::max);
        kkt = (pg / w_scale).max(worst).max(comp / w_scale);
        log.push(OuterLog {
            iter: outer + 1,
            w: ev.tr.w,
            kkt_residual: kkt,
            max_violation: worst,
            penalty: rho,
        });
        final_eval = Some(ev);
        if kkt <= opts.tol {
            converged = true;
            break;
        }
        rho = rho_new;
        prev_worst = worst.max(1e-300);
    }

    let ev = final_eval.expect("at least one outer iteration runs");
    let controls = Controls::new(x[..n].to_vec(), x[n..].to_vec());
    // report W of the raw objective at the returned controls
    let _ = last_pg;
    Ok(OptResult {
        controls,
        w_star: ev.tr.w,
        multipliers: Multipliers {
            temp: lam_temp,
            cumulative: lam_cum,
        },
        kkt_residual: kkt,
        iterations: total_inner,
        converged,
        log,
    })
}

//! Survival-probability Monte Carlo and power-law exponent fits.

pub mod experiments;

use serde::Serialize;
use std::ops::ControlFlow;

use crate::error::{domain, Result};
use crate::levymodel::{Boundary, LevyModel};
use crate::parallel::count_paths;
use crate::passage::PassageTracker;
use crate::rng::StreamId;
use crate::simulate::{process_for_model, GridPolicy, ProcessSpec, TimeGrid};
use crate::stats::{weighted_line_fit, wilson_interval};

pub use experiments::*;

/// Normal quantile used for every reported interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    #[serde(rename = "T")]
    pub t: f64,
    pub n_paths: u64,
    pub survivors: u64,
    pub p_hat: f64,
    /// Wilson interval for `p`, mapped to `ln p`; the lower end is `−∞` when
    /// no path survived.
    pub log_ci: (f64, f64),
    pub seed: u64,
}

impl SurvivalEstimate {
    pub fn from_counts(t: f64, survivors: u64, n_paths: u64, seed: u64) -> Self {
        let (lo, hi) = wilson_interval(survivors, n_paths, Z95);
        Self { t, n_paths, survivors, p_hat: survivors as f64 / n_paths as f64, log_ci: (lo.ln(), hi.ln()), seed }
    }

    pub fn censored(&self) -> bool {
        self.survivors == 0
    }

    /// Binomial standard error of `p_hat`.
    pub fn se(&self) -> f64 {
        crate::stats::binomial_se(self.survivors, self.n_paths)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub rho_hat: f64,
    pub stderr: f64,
    pub r2: f64,
    pub intercept: f64,
    /// Horizons used in the fit.
    pub grid: Vec<f64>,
    /// Horizons dropped for having no survivors.
    pub dropped: Vec<f64>,
}

/// Weighted least squares of `ln p̂` on `ln T` with inverse-variance
/// weights; `rho_hat = −slope`.
pub fn fit_exponent(estimates: &[SurvivalEstimate]) -> Result<ExponentFit> {
    let mut used = Vec::new();
    let mut dropped = Vec::new();
    for e in estimates {
        if e.p_hat > 0.0 && e.t > 0.0 {
            used.push(e);
        } else {
            log::warn!("dropping T = {} from the exponent fit: no survivors", e.t);
            dropped.push(e.t);
        }
    }
    if used.len() < 4 {
        return domain(format!("exponent fit needs at least 4 usable horizons, got {}", used.len()));
    }
    let x: Vec<f64> = used.iter().map(|e| e.t.ln()).collect();
    let y: Vec<f64> = used.iter().map(|e| e.p_hat.ln()).collect();
    let w: Vec<f64> = used
        .iter()
        .map(|e| {
            let n = e.n_paths.max(1) as f64;
            let p = e.p_hat.min(1.0);
            // delta-method variance of ln p̂, floored for p̂ = 1
            let var = ((1.0 - p) / (n * p)).max(0.25 / (n * n));
            1.0 / var
        })
        .collect();
    let fit = weighted_line_fit(&x, &y, &w);
    Ok(ExponentFit {
        rho_hat: -fit.slope,
        stderr: fit.slope_se,
        r2: fit.r2,
        intercept: fit.intercept,
        grid: used.iter().map(|e| e.t).collect(),
        dropped,
    })
}

/// `n` horizons geometrically spaced from `t_min` to `t_max`.
pub fn geometric_horizons(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || n < 2 {
        return domain(format!("need 0 < T_min < T_max and at least 2 points, got {t_min}, {t_max}, {n}"));
    }
    let r = (t_max / t_min).ln() / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| (t_min.ln() + r * i as f64).exp()).collect();
    v[0] = t_min;
    v[n - 1] = t_max;
    // exact powers of two stay exact
    for x in v.iter_mut() {
        let r = x.round();
        if (*x - r).abs() < 1e-9 * r.max(1.0) {
            *x = r;
        }
    }
    Ok(v)
}

/// Settings of one survival run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalRun {
    pub t_grid: Vec<f64>,
    pub n_paths: u64,
    pub grid_policy: GridPolicy,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Also check left limits and post-jump values at compound-Poisson epochs.
    pub monitor_jumps: bool,
}

impl SurvivalRun {
    pub fn new(t_grid: Vec<f64>, n_paths: u64, grid_policy: GridPolicy, seed: u64) -> Self {
        Self { t_grid, n_paths, grid_policy, seed, threads: None, monitor_jumps: true }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    fn check(&self) -> Result<()> {
        if self.n_paths == 0 {
            return domain("n_paths must be at least 1");
        }
        if self.t_grid.is_empty() {
            return domain("T grid is empty");
        }
        if self.t_grid.windows(2).any(|w| !(w[1] > w[0])) || self.t_grid[0] < 0.0 {
            return domain("T grid must be nonnegative and strictly increasing");
        }
        Ok(())
    }

    /// Monitoring grid: the policy's grid to the largest horizon with every
    /// horizon inserted.
    pub fn monitoring_grid(&self) -> Result<TimeGrid> {
        let t_max = *self.t_grid.last().unwrap();
        if t_max == 0.0 {
            return TimeGrid::new(vec![0.0]);
        }
        TimeGrid::with_policy(self.grid_policy, t_max)?.merged(&self.t_grid)
    }

    /// Survivor counts `[boundary][horizon]` for `spec`: each path is run
    /// once to the largest horizon and its first violation time per boundary
    /// decides survival at every horizon.
    pub fn counts(&self, spec: &ProcessSpec, boundaries: &[Boundary]) -> Result<Vec<Vec<u64>>> {
        self.check()?;
        let grid = self.monitoring_grid()?;
        let nt = self.t_grid.len();
        let flat = count_paths(self.n_paths, boundaries.len() * nt, self.threads, |i, c| {
            let mut tracker = PassageTracker::new(boundaries, self.monitor_jumps);
            spec.run(grid.points(), &mut StreamId::new(self.seed, i).rng(), |p| tracker.observe(p));
            for (b, &tau) in tracker.first_violations().iter().enumerate() {
                for (j, &t) in self.t_grid.iter().enumerate() {
                    if tau > t {
                        c[b * nt + j] += 1;
                    }
                }
            }
        })?;
        Ok(flat.chunks(nt).map(|c| c.to_vec()).collect())
    }

    /// [`counts`](Self::counts) wrapped into estimates.
    pub fn estimates(&self, spec: &ProcessSpec, boundaries: &[Boundary]) -> Result<Vec<Vec<SurvivalEstimate>>> {
        let counts = self.counts(spec, boundaries)?;
        Ok(counts
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .zip(&self.t_grid)
                    .map(|(k, &t)| SurvivalEstimate::from_counts(t, k, self.n_paths, self.seed))
                    .collect()
            })
            .collect())
    }
}

/// `P(X(t) ≤ f(t), t ≤ T)` for every `T` in `t_grid`, on shared paths.
pub fn survival_probability(
    model: &LevyModel,
    boundary: &Boundary,
    t_grid: &[f64],
    n_paths: u64,
    grid_policy: GridPolicy,
    seed: u64,
) -> Result<Vec<SurvivalEstimate>> {
    let run = SurvivalRun::new(t_grid.to_vec(), n_paths, grid_policy, seed);
    let spec = process_for_model(model)?;
    Ok(run.estimates(&spec, std::slice::from_ref(boundary))?.remove(0))
}

/// Several boundaries evaluated on the same paths.
pub fn survival_probabilities(
    model: &LevyModel,
    boundaries: &[Boundary],
    run: &SurvivalRun,
) -> Result<Vec<Vec<SurvivalEstimate>>> {
    let spec = process_for_model(model)?;
    run.estimates(&spec, boundaries)
}

/// Survival estimated on the same paths with monitoring steps `Δt`, `2Δt`
/// and `4Δt`, and the implied discretization bias at `Δt` and `2Δt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub dt: [f64; 3],
    /// `[step][horizon]`.
    pub estimates: Vec<Vec<SurvivalEstimate>>,
    /// Estimated excess survival `p(step) − p(continuous)` for the two finer
    /// steps, `[step][horizon]`, from a `√Δt` error expansion.
    pub bias: Vec<Vec<f64>>,
}

pub fn refinement_study(
    model: &LevyModel,
    boundary: &Boundary,
    t_grid: &[f64],
    n_paths: u64,
    dt: f64,
    seed: u64,
    threads: Option<usize>,
) -> Result<RefinementStudy> {
    let run = SurvivalRun { threads, ..SurvivalRun::new(t_grid.to_vec(), n_paths, GridPolicy::Uniform { dt }, seed) };
    run.check()?;
    for &t in t_grid {
        let k = t / (4.0 * dt);
        if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return domain(format!("horizon {t} is not a multiple of 4 dt = {}", 4.0 * dt));
        }
    }
    let spec = process_for_model(model)?;
    let grid = TimeGrid::with_policy(GridPolicy::Uniform { dt }, *t_grid.last().unwrap())?;
    let nt = t_grid.len();
    let strides = [1usize, 2, 4];
    let b = std::slice::from_ref(boundary);
    let flat = count_paths(n_paths, 3 * nt, threads, |i, c| {
        let mut trackers: Vec<PassageTracker> = strides.iter().map(|_| PassageTracker::new(b, true)).collect();
        spec.run(grid.points(), &mut StreamId::new(seed, i).rng(), |p| {
            if let crate::simulate::PathPoint::Grid { index, t, x } = p {
                for (s, tr) in strides.iter().zip(trackers.iter_mut()) {
                    if index % s == 0 {
                        tr.check(t, x);
                    }
                }
            }
            // the coarsest step is the last to see a crossing
            if trackers[2].first_violations()[0].is_finite() {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        for (s, tr) in trackers.iter().enumerate() {
            let tau = tr.first_violations()[0];
            for (j, &t) in t_grid.iter().enumerate() {
                if tau > t {
                    c[s * nt + j] += 1;
                }
            }
        }
    })?;
    let estimates: Vec<Vec<SurvivalEstimate>> = flat
        .chunks(nt)
        .map(|row| row.iter().zip(t_grid).map(|(&k, &t)| SurvivalEstimate::from_counts(t, k, n_paths, seed)).collect())
        .collect();
    let factor = 1.0 / (std::f64::consts::SQRT_2 - 1.0);
    let bias = (0..2)
        .map(|s| (0..nt).map(|j| (estimates[s + 1][j].p_hat - estimates[s][j].p_hat) * factor).collect())
        .collect();
    Ok(RefinementStudy { dt: [dt, 2.0 * dt, 4.0 * dt], estimates, bias })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(ts: &[f64], f: impl Fn(f64) -> f64) -> Vec<SurvivalEstimate> {
        ts.iter()
            .map(|&t| SurvivalEstimate { t, n_paths: 100_000, survivors: 0, p_hat: f(t), log_ci: (0.0, 0.0), seed: 0 })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let ts = [10.0, 100.0, 1000.0, 10_000.0];
        let fit = fit_exponent(&synthetic(&ts, |t| t.powf(-0.5))).unwrap();
        assert!((fit.rho_hat - 0.5).abs() < 1e-12);
        let fit = fit_exponent(&synthetic(&ts, |t| 7.0 * t.powf(-0.3))).unwrap();
        assert!((fit.rho_hat - 0.3).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let e = synthetic(&[10.0, 100.0, 1000.0], |t| 1.0 / t);
        assert!(fit_exponent(&e).is_err());
        let mut e = synthetic(&[10.0, 100.0, 1000.0, 1e4, 1e5], |t| 1.0 / t);
        e[4].p_hat = 0.0;
        let fit = fit_exponent(&e).unwrap();
        assert_eq!(fit.dropped, vec![1e5]);
    }

    #[test]
    fn horizons() {
        let h = geometric_horizons(16.0, 16384.0, 8).unwrap();
        assert_eq!(h.len(), 8);
        assert_eq!(h[0], 16.0);
        assert_eq!(h[7], 16384.0);
        let h = geometric_horizons(4.0, 4096.0, 6).unwrap();
        assert_eq!(h, vec![4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0]);
    }

    #[test]
    fn zero_horizon_survives() {
        let m = LevyModel::brownian(1.0, 0.0);
        let e =
            survival_probability(&m, &Boundary::constant(1.0), &[0.0, 1.0], 100, GridPolicy::Uniform { dt: 0.01 }, 3)
                .unwrap();
        assert_eq!(e[0].p_hat, 1.0);
        assert!(e[1].p_hat < 1.0);
        assert!(survival_probability(&m, &Boundary::constant(1.0), &[1.0], 0, GridPolicy::Integers, 3).is_err());
    }
}

//! Numerical fluctuation theory: the Laplace exponent `κ(a, 0)` of the
//! ladder process, ladder records of sampled paths, renewal-function
//! estimates and positivity (Spitzer) profiles.

use serde::Serialize;
use std::ops::ControlFlow;

use crate::decompose::{build_decomposition, DecompositionSide};
use crate::error::{domain, Error, Result};
use crate::levymodel::LevyModel;
use crate::parallel::count_paths;
use crate::quad::simpson;
use crate::rng::{derive_seed, StreamId};
use crate::simulate::{
    process_for_model, process_for_subordinator, process_for_y, PathPoint, PathSample, ProcessSpec, TimeGrid,
};

/// `t ↦ P(X(t) ≥ 0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PositivityProfile {
    Constant {
        rho: f64,
    },
    /// Monte Carlo estimates on increasing times, interpolated linearly in
    /// `ln t` and held constant outside the table.
    Tabulated {
        t: Vec<f64>,
        p: Vec<f64>,
        se: Vec<f64>,
    },
}

impl PositivityProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            PositivityProfile::Constant { rho } => {
                if !(0.0..=1.0).contains(rho) {
                    return domain(format!("positivity must lie in [0, 1], got {rho}"));
                }
            }
            PositivityProfile::Tabulated { t, p, se } => {
                if t.is_empty() || t.len() != p.len() || t.len() != se.len() {
                    return domain("tabulated profile needs equally long, nonempty t, p and se");
                }
                if t[0] <= 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
                    return domain("tabulated profile times must be positive and increasing");
                }
                if let Some(bad) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                    return domain(format!("positivity must lie in [0, 1], got {bad}"));
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, time: f64) -> f64 {
        match self {
            PositivityProfile::Constant { rho } => *rho,
            PositivityProfile::Tabulated { t, p, .. } => {
                if time <= t[0] {
                    return p[0];
                }
                let last = t.len() - 1;
                if time >= t[last] {
                    return p[last];
                }
                let i = t.partition_point(|&s| s <= time) - 1;
                let w = (time.ln() - t[i].ln()) / (t[i + 1].ln() - t[i].ln());
                p[i] + w * (p[i + 1] - p[i])
            }
        }
    }
}

/// `κ(a, 0) = exp(∫₀^∞ (e^{−t} − e^{−at}) t^{−1} P(X(t) ≥ 0) dt)` with the
/// local time normalized to `c = 1`; `b > 0` is not supported.
pub fn kappa(profile: &PositivityProfile, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return domain(format!("kappa needs a > 0, got {a}"));
    }
    if b != 0.0 {
        if b > 0.0 {
            return Err(Error::Unsupported("kappa(a, b) with b > 0 needs the joint law of (t, X(t))".into()));
        }
        return domain(format!("kappa needs b >= 0, got {b}"));
    }
    profile.validate()?;
    if a == 1.0 {
        return Ok(1.0);
    }
    // t = e^u; the integrand decays double-exponentially at both ends
    let integrand = |u: f64| {
        let t = u.exp();
        ((-t).exp() - (-a * t).exp()) * profile.at(t)
    };
    Ok(simpson(integrand, -40.0, 40.0, 10_000).exp())
}

/// Strict records of the running supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSample {
    pub epochs: Vec<f64>,
    pub heights: Vec<f64>,
}

/// Record epochs and heights from monitored `(t, x)` pairs; `(0, 0)` is the
/// first record.
pub fn ladder_from_points<I: IntoIterator<Item = (f64, f64)>>(points: I) -> LadderSample {
    let mut epochs = vec![0.0];
    let mut heights = vec![0.0];
    let mut sup = 0.0;
    for (t, x) in points {
        if x > sup {
            sup = x;
            epochs.push(t);
            heights.push(x);
        }
    }
    LadderSample { epochs, heights }
}

/// Ladder records along all monitored points of a path.
pub fn ladder_process(path: &PathSample) -> LadderSample {
    ladder_from_points(path.monitored().into_iter().skip(1))
}

/// `V̂(x)`: mean number of records with height below `x`, each record
/// carrying one unit of local time.
pub fn renewal_estimate(samples: &[LadderSample], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return domain("renewal estimate needs at least one ladder sample");
    }
    let total: usize = samples.iter().map(|s| s.heights.iter().filter(|&&h| h < x).count()).sum();
    Ok(total as f64 / samples.len() as f64)
}

/// Record counts below each level in `xs`, streamed along one path of
/// `spec` and stopped once the supremum passes every level.
fn record_counts<R: rand::RngCore>(spec: &ProcessSpec, times: &[f64], rng: &mut R, xs: &[f64], counts: &mut [u64]) {
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sup = 0.0;
    let record = |h: f64, counts: &mut [u64]| {
        for (c, &x) in counts.iter_mut().zip(xs) {
            if h < x {
                *c += 1;
            }
        }
    };
    record(0.0, counts);
    spec.run(times, rng, |p| {
        let mut see = |x: f64| {
            if x > sup {
                sup = x;
                record(x, counts);
            }
        };
        match p {
            PathPoint::Grid { index: 0, .. } => {}
            PathPoint::Grid { x, .. } => see(x),
            PathPoint::Jump { pre, post, .. } => {
                see(pre);
                see(post);
            }
        }
        if sup >= x_max {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
}

/// `V̂(x)` for each `x` in `xs` over `n_paths` paths of `model` on `grid`.
pub fn renewal_function(
    model: &LevyModel,
    grid: &TimeGrid,
    xs: &[f64],
    n_paths: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<f64>> {
    if n_paths == 0 {
        return domain("renewal estimate needs at least one path");
    }
    let spec = process_for_model(model)?;
    let counts = count_paths(n_paths, xs.len(), threads, |i, c| {
        record_counts(&spec, grid.points(), &mut StreamId::new(seed, i).rng(), xs, c)
    })?;
    Ok(counts.iter().map(|&c| c as f64 / n_paths as f64).collect())
}

/// Tabulated `P̂(X(t) ≥ 0)` with binomial standard errors.
pub fn spitzer_profile(
    model: &LevyModel,
    t_grid: &[f64],
    n_paths: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<PositivityProfile> {
    if n_paths == 0 {
        return domain("spitzer profile needs at least one path");
    }
    let spec = process_for_model(model)?;
    let grid = TimeGrid::new(std::iter::once(0.0).chain(t_grid.iter().cloned()).collect())?;
    let counts = count_paths(n_paths, t_grid.len(), threads, |i, c| {
        spec.run_on_grid(grid.points(), &mut StreamId::new(seed, i).rng(), |index, _, x| {
            if index > 0 && x >= 0.0 {
                c[index - 1] += 1;
            }
            ControlFlow::Continue(())
        });
    })?;
    let n = n_paths as f64;
    let p: Vec<f64> = counts.iter().map(|&k| k as f64 / n).collect();
    let se = p.iter().map(|q| (q * (1.0 - q) / n).sqrt()).collect();
    Ok(PositivityProfile::Tabulated { t: t_grid.to_vec(), p, se })
}

/// Small-time positivity check: whether `P(X(t) ≥ 0)` stays below
/// `1 − 10⁻³` at `t ∈ {10⁻³, 10⁻²}`. Reported, not asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallTimePositivity {
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub se: Vec<f64>,
    pub below_one: bool,
}

pub fn small_time_positivity(model: &LevyModel, n_paths: u64, seed: u64) -> Result<SmallTimePositivity> {
    let t = vec![1e-3, 1e-2];
    let PositivityProfile::Tabulated { p, se, .. } = spitzer_profile(model, &t, n_paths, seed, None)? else {
        unreachable!("spitzer_profile always tabulates")
    };
    let below_one = p.iter().all(|&q| q < 1.0 - 1e-3);
    Ok(SmallTimePositivity { t, p, se, below_one })
}

/// `V̂_T(x)` for `Y_T` against `V̂(x)` for `X = Y_T − S_T` on the same paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalGap {
    pub horizon: f64,
    pub delta: f64,
    pub v_y: f64,
    pub v_x: f64,
    pub gap: f64,
}

/// Renewal functions of `Y_T` and `X` for each horizon in `horizons`, with
/// common random streams across horizons.
pub fn renewal_convergence(
    model: &LevyModel,
    x: f64,
    horizons: &[f64],
    grid: &TimeGrid,
    n_paths: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<RenewalGap>> {
    let mut out = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let dec = build_decomposition(model, h, DecompositionSide::NegativeJumps)?;
        let y_spec = process_for_y(model, &dec)?;
        let s_spec = process_for_subordinator(&dec);
        let counts = count_paths(n_paths, 2, threads, |i, c| {
            let y = record_path(&y_spec, grid, StreamId::new(derive_seed(seed, 1), i));
            let s = record_path(&s_spec, grid, StreamId::new(derive_seed(seed, 2), i));
            let ly = ladder_from_points(grid.points().iter().cloned().zip(y.iter().cloned()).skip(1));
            let lx =
                ladder_from_points(grid.points().iter().cloned().zip(y.iter().zip(&s).map(|(a, b)| a - b)).skip(1));
            c[0] += ly.heights.iter().filter(|&&v| v < x).count() as u64;
            c[1] += lx.heights.iter().filter(|&&v| v < x).count() as u64;
        })?;
        let v_y = counts[0] as f64 / n_paths as f64;
        let v_x = counts[1] as f64 / n_paths as f64;
        out.push(RenewalGap { horizon: h, delta: dec.delta, v_y, v_x, gap: (v_y - v_x).abs() });
    }
    Ok(out)
}

fn record_path(spec: &ProcessSpec, grid: &TimeGrid, stream: StreamId) -> Vec<f64> {
    let mut v = Vec::with_capacity(grid.len());
    spec.run_on_grid(grid.points(), &mut stream.rng(), |_, _, x| {
        v.push(x);
        ControlFlow::Continue(())
    });
    v
}

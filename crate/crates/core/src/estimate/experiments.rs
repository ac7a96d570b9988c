//! Experiments built on the horizon-dependent decomposition.

use serde::Serialize;
use std::ops::ControlFlow;

use crate::decompose::{build_decomposition, delta, snapped_floor, Decomposition, DecompositionSide};
use crate::error::{domain, Result};
use crate::levymodel::{Boundary, LevyModel};
use crate::parallel::count_paths;
use crate::rng::{derive_seed, StreamId};
use crate::rvcalc::{RegVaryingTail, Side, SlowlyVarying};
use crate::simulate::{
    process_for_model, process_for_subordinator, process_for_y, CompoundPoisson, GridPolicy, ProcessSpec, TimeGrid,
};

use super::{fit_exponent, ExponentFit, SurvivalEstimate, SurvivalRun};

/// Smallest horizon accepted by the decomposition experiments.
pub const MIN_HORIZON: f64 = 16.0;

fn require_alpha_below_one(model: &LevyModel) -> Result<f64> {
    match model.alpha() {
        Some(a) if a < 1.0 => Ok(a),
        Some(a) => domain(format!("this experiment requires alpha < 1, got {a}")),
        None => domain("this experiment requires a jump component"),
    }
}

fn require_horizon(t: f64) -> Result<()> {
    if !(t >= MIN_HORIZON && t.is_finite()) {
        return domain(format!("decomposition experiments require T >= {MIN_HORIZON}, got {t}"));
    }
    Ok(())
}

/// Lower bound `P(X ≤ 1 − t^γ) ≥ P(Y_T ≤ 1/2) · P(−S_T ≤ 1/2 − t^γ)` on
/// `[0, T]`, each factor from an independent path set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductBoundReport {
    #[serde(rename = "T")]
    pub t: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lhs: SurvivalEstimate,
    pub y_factor: SurvivalEstimate,
    pub s_factor: SurvivalEstimate,
    pub rhs: f64,
    pub diff: f64,
    pub diff_se: f64,
    /// `lhs ≥ rhs − 3 SE`.
    pub holds: bool,
    /// Set when the model has no negative jumps, so `S_T ≡ 0`.
    pub degenerate: bool,
}

pub fn product_bound_check(
    model: &LevyModel,
    t: f64,
    gamma: f64,
    n_paths: u64,
    seed: u64,
    grid_policy: GridPolicy,
    threads: Option<usize>,
) -> Result<ProductBoundReport> {
    require_horizon(t)?;
    require_alpha_below_one(model)?;
    let degenerate = model.jump_tails().0.is_none();
    let dec = if degenerate {
        Decomposition::zero(delta(t)?, DecompositionSide::NegativeJumps)
    } else {
        build_decomposition(model, t, DecompositionSide::NegativeJumps)?
    };
    let run = |s: u64| SurvivalRun { threads, ..SurvivalRun::new(vec![t], n_paths, grid_policy, s) };

    let x_spec = process_for_model(model)?;
    let lhs = run(derive_seed(seed, 1)).estimates(&x_spec, &[Boundary::decreasing(gamma, 1.0)])?.remove(0).remove(0);

    let y_spec = process_for_y(model, &dec)?;
    let y_factor = run(derive_seed(seed, 2)).estimates(&y_spec, &[Boundary::constant(0.5)])?.remove(0).remove(0);

    // −S_T is nonincreasing and the boundary 1/2 − t^γ decreases, so checking
    // left limits at jump epochs and the horizon is exact
    let neg_s =
        ProcessSpec { jumps: CompoundPoisson { left: dec.jump_table().cloned(), right: None }, ..Default::default() };
    let exact = SurvivalRun {
        threads,
        ..SurvivalRun::new(vec![t], n_paths, GridPolicy::Uniform { dt: t }, derive_seed(seed, 3))
    };
    let s_factor = exact.estimates(&neg_s, &[Boundary::decreasing(gamma, 0.5)])?.remove(0).remove(0);

    let rhs = y_factor.p_hat * s_factor.p_hat;
    let rhs_se = ((s_factor.p_hat * y_factor.se()).powi(2) + (y_factor.p_hat * s_factor.se()).powi(2)).sqrt();
    let diff = lhs.p_hat - rhs;
    let diff_se = (lhs.se().powi(2) + rhs_se.powi(2)).sqrt();
    Ok(ProductBoundReport {
        t,
        gamma,
        delta: dec.delta,
        holds: diff >= -3.0 * diff_se,
        lhs,
        y_factor,
        s_factor,
        rhs,
        diff,
        diff_se,
        degenerate,
    })
}

/// `P(S_N(n) ≥ (n+1)^γ for n = N₁, …, N)` with
/// `N₁ = ⌊(ln ln N)^{4/(1−γα−ε)}⌋`, plus the same event over `n = 1, …, N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaN0NReport {
    pub n: u64,
    pub n1: u64,
    pub delta: f64,
    pub epsilon: f64,
    /// `N₁ > N`: the event is vacuous and `p̂ = 1`.
    pub window_empty: bool,
    pub estimate: SurvivalEstimate,
    pub full_window: SurvivalEstimate,
}

pub fn lemma_n0n_experiment(
    alpha: f64,
    gamma: f64,
    ell: SlowlyVarying,
    n: u64,
    n_paths: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<LemmaN0NReport> {
    let ga = gamma * alpha;
    if !(ga > 0.0 && ga < 1.0) {
        return domain(format!("need 0 < gamma*alpha < 1, got {ga}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("need alpha in (0, 1), got {alpha}"));
    }
    if n_paths == 0 {
        return domain("n_paths must be at least 1");
    }
    let big_n = n as f64;
    require_horizon(big_n)?;
    let epsilon = ga.min(1.0 - ga) / 2.0;
    let ll = big_n.ln().ln();
    let n1_real = ll.powf(4.0 / (1.0 - ga - epsilon));
    let n1 = if n1_real > 1e18 { u64::MAX } else { snapped_floor(n1_real).max(1) };
    let window_empty = n1 > n;

    let tail = RegVaryingTail::new(alpha, ell, Side::Left)?;
    let model = LevyModel::from_tails(0.0, 0.0, Some(tail), None);
    let dec = build_decomposition(&model, big_n, DecompositionSide::NegativeJumps)?;
    let spec = process_for_subordinator(&dec);
    let times: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let level = |k: usize| ((k + 1) as f64).powf(gamma);
    let counts = count_paths(n_paths, 2, threads, |i, c| {
        let (mut in_window, mut everywhere) = (true, true);
        spec.run_on_grid(&times, &mut StreamId::new(seed, i).rng(), |index, _, x| {
            if index >= 1 && x < level(index) {
                everywhere = false;
                if index as u64 >= n1 {
                    in_window = false;
                }
            }
            if in_window || everywhere {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        });
        c[0] += u64::from(in_window);
        c[1] += u64::from(everywhere);
    })?;
    Ok(LemmaN0NReport {
        n,
        n1,
        delta: dec.delta,
        epsilon,
        window_empty,
        estimate: SurvivalEstimate::from_counts(big_n, counts[0], n_paths, seed),
        full_window: SurvivalEstimate::from_counts(big_n, counts[1], n_paths, seed),
    })
}

/// Integer-time survival below `x` for `Y_T` (big positive jumps split off)
/// and for `X = Y_T + S_T` assembled from the same `Y_T` paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSurvivalReport {
    pub y: SurvivalEstimate,
    pub x: SurvivalEstimate,
    pub delta: f64,
    /// Number of paths on which `X` survived but `Y_T` did not (always 0).
    pub ordering_violations: u64,
}

pub fn discrete_survival_experiment(
    model: &LevyModel,
    t: f64,
    x: f64,
    seed: u64,
    n_paths: u64,
    threads: Option<usize>,
) -> Result<DiscreteSurvivalReport> {
    require_horizon(t)?;
    require_alpha_below_one(model)?;
    if n_paths == 0 {
        return domain("n_paths must be at least 1");
    }
    let dec = build_decomposition(model, t, DecompositionSide::PositiveJumps)?;
    let y_spec = process_for_y(model, &dec)?;
    let s_spec = process_for_subordinator(&dec);
    let grid = TimeGrid::with_policy(GridPolicy::Integers, t.floor())?;
    let (sy, ss) = (derive_seed(seed, 11), derive_seed(seed, 12));
    let counts = count_paths(n_paths, 3, threads, |i, c| {
        // X ≥ Y pathwise, so both verdicts are settled at Y's first crossing
        // and only that prefix of S is compared
        let y = grid_values_until(&y_spec, &grid, StreamId::new(sy, i), |v| v > x);
        let s = grid_values_until(&s_spec, &grid, StreamId::new(ss, i), |_| false);
        let y_ok = y.len() == grid.len() && y.iter().skip(1).all(|&v| v <= x);
        let x_ok = y.iter().zip(&s).skip(1).all(|(a, b)| a + b <= x) && s.len() >= y.len();
        let x_survives = x_ok && y.len() == grid.len();
        c[0] += u64::from(y_ok);
        c[1] += u64::from(x_survives);
        // on a path where Y crossed, X must have crossed no later
        c[2] += u64::from(x_ok && !y_ok);
    })?;
    Ok(DiscreteSurvivalReport {
        y: SurvivalEstimate::from_counts(t, counts[0], n_paths, seed),
        x: SurvivalEstimate::from_counts(t, counts[1], n_paths, seed),
        delta: dec.delta,
        ordering_violations: counts[2],
    })
}

/// [`discrete_survival_experiment`] over several horizons, each with its own
/// decomposition, and the exponent fitted to the `Y_T` estimates.
pub fn discrete_survival_exponent(
    model: &LevyModel,
    horizons: &[f64],
    x: f64,
    seed: u64,
    n_paths: u64,
    threads: Option<usize>,
) -> Result<(Vec<DiscreteSurvivalReport>, ExponentFit)> {
    let reports = horizons
        .iter()
        .map(|&t| discrete_survival_experiment(model, t, x, seed, n_paths, threads))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&reports.iter().map(|r| r.y.clone()).collect::<Vec<_>>())?;
    Ok((reports, fit))
}

/// Grid values of one path, stopping after the first index where `stop`
/// holds (that value included).
fn grid_values_until(spec: &ProcessSpec, grid: &TimeGrid, stream: StreamId, stop: impl Fn(f64) -> bool) -> Vec<f64> {
    let mut v = Vec::with_capacity(grid.len());
    spec.run_on_grid(grid.points(), &mut stream.rng(), |index, _, x| {
        v.push(x);
        if index > 0 && stop(x) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::StableParams;

    #[test]
    fn preconditions() {
        let m = LevyModel::strictly_stable(StableParams::symmetric(1.5).unwrap()).unwrap();
        assert!(product_bound_check(&m, 64.0, 1.0, 10, 0, GridPolicy::Integers, None).is_err());
        let m = LevyModel::strictly_stable(StableParams::symmetric(0.7).unwrap()).unwrap();
        assert!(product_bound_check(&m, 8.0, 1.0, 10, 0, GridPolicy::Integers, None).is_err());
        assert!(lemma_n0n_experiment(0.5, 2.5, SlowlyVarying::ONE, 100, 10, 0, None).is_err());
    }

    #[test]
    fn large_level_small_horizon() {
        let m = LevyModel::strictly_stable(StableParams::symmetric(0.7).unwrap()).unwrap();
        let r = discrete_survival_experiment(&m, 16.0, 1e12, 5, 2000, None).unwrap();
        assert_eq!(r.y.p_hat, 1.0);
        assert_eq!(r.ordering_violations, 0);
    }
}

use std::ops::ControlFlow;

use passage_core::decompose::{build_decomposition, delta, DecompositionSide};
use passage_core::fluctuation::{
    kappa, ladder_process, renewal_convergence, renewal_estimate, renewal_function, spitzer_profile, PositivityProfile,
};
use passage_core::levymodel::LevyModel;
use passage_core::parallel::count_paths;
use passage_core::rng::StreamId;
use passage_core::simulate::{process_for_subordinator, sample_path, GridPolicy, TimeGrid};
use passage_core::stable::{norming_function, positivity_parameter, StableParams};

fn stable(alpha: f64, beta: f64) -> LevyModel {
    LevyModel::strictly_stable(StableParams::new(alpha, beta, 1.0).unwrap()).unwrap()
}

fn tabulated(p: PositivityProfile) -> (Vec<f64>, Vec<f64>) {
    match p {
        PositivityProfile::Tabulated { p, se, .. } => (p, se),
        PositivityProfile::Constant { .. } => panic!("expected a tabulated profile"),
    }
}

#[test]
fn brownian_record_count_grows_with_refinement() {
    let bm = LevyModel::brownian(1.0, 0.0);
    let mean_records = |dt: f64| {
        let grid = TimeGrid::with_policy(GridPolicy::Uniform { dt }, 1.0).unwrap();
        renewal_function(&bm, &grid, &[f64::INFINITY], 4000, 31, None).unwrap()[0]
    };
    let coarse = mean_records(1e-2);
    let fine = mean_records(1e-3);
    eprintln!("mean Brownian records on [0,1]: dt=1e-2 {coarse:.3}, dt=1e-3 {fine:.3}");
    assert!(fine > coarse);
}

#[test]
fn renewal_estimate_is_monotone_and_vanishes_at_zero() {
    let model = stable(0.7, 0.0);
    let grid = TimeGrid::with_policy(GridPolicy::Uniform { dt: 0.1 }, 20.0).unwrap();
    let samples: Vec<_> =
        (0..500).map(|i| ladder_process(&sample_path(&model, &grid, StreamId::new(4, i)).unwrap())).collect();
    assert_eq!(renewal_estimate(&samples, 0.0).unwrap(), 0.0);
    let xs = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 50.0];
    let v: Vec<f64> = xs.iter().map(|&x| renewal_estimate(&samples, x).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
    for s in &samples {
        assert!(s.heights.windows(2).all(|w| w[0] < w[1]));
        assert!(s.epochs.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn drifting_brownian_renewal_function_is_linear() {
    // unit drift: the ladder height process is the running supremum itself,
    // so V(x) is linear and the record count below x scales with x
    let bm = LevyModel::brownian(1.0, 1.0);
    let grid = TimeGrid::with_policy(GridPolicy::Uniform { dt: 1e-3 }, 40.0).unwrap();
    let v = renewal_function(&bm, &grid, &[1.0, 2.0], 100_000, 32, None).unwrap();
    let ratio = v[1] / v[0];
    eprintln!("V(1) = {:.3}, V(2) = {:.3}, ratio {ratio:.4}", v[0], v[1]);
    assert!((ratio - 2.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn symmetric_profile_is_one_half() {
    let t = [0.5, 2.0, 8.0, 32.0];
    let (p, se) = tabulated(spitzer_profile(&stable(0.7, 0.0), &t, 40_000, 11, None).unwrap());
    for (q, s) in p.iter().zip(&se) {
        assert!((q - 0.5).abs() <= 3.0 * s, "{q} ± {s}");
    }
}

#[test]
fn subordinator_profile_is_one() {
    let (p, _) = tabulated(spitzer_profile(&stable(0.5, 1.0), &[0.1, 1.0, 10.0], 10_000, 12, None).unwrap());
    assert!(p.iter().all(|&q| q == 1.0), "{p:?}");
}

#[test]
fn skewed_profile_approaches_closed_form() {
    let params = StableParams::new(0.7, 0.5, 1.0).unwrap();
    let rho = positivity_parameter(&params).unwrap();
    let t = [1.0, 10.0, 100.0];
    let (p, se) = tabulated(spitzer_profile(&stable(0.7, 0.5), &t, 100_000, 13, None).unwrap());
    let last = p.len() - 1;
    assert!((p[last] - rho).abs() <= 3.0 * se[last], "{} vs {rho} (se {})", p[last], se[last]);
}

#[test]
fn kappa_matches_frullani_and_is_monotone() {
    for rho in [0.3, 0.5, 0.7] {
        let profile = PositivityProfile::Constant { rho };
        let grid: Vec<f64> = (-3..=3).map(|k| 2f64.powi(k)).collect();
        let k: Vec<f64> = grid.iter().map(|&a| kappa(&profile, a, 0.0).unwrap()).collect();
        assert!(k.windows(2).all(|w| w[0] <= w[1]));
        for (a, v) in grid.iter().zip(&k) {
            assert!((v / a.powf(rho) - 1.0).abs() < 1e-3, "rho {rho} a {a}: {v}");
        }
    }
    let half = PositivityProfile::Constant { rho: 0.5 };
    assert!((kappa(&half, 0.25, 0.0).unwrap() - 0.5).abs() < 5e-4);
}

#[test]
fn split_renewal_function_approaches_the_original() {
    let model = LevyModel::strictly_stable(StableParams::from_levy_constants(0.7, 1.0, 1.0).unwrap()).unwrap();
    let grid = TimeGrid::with_policy(GridPolicy::Uniform { dt: 0.05 }, 10.0).unwrap();
    let gaps = renewal_convergence(&model, 1.0, &[1e2, 1e4, 1e6], &grid, 20_000, 14, None).unwrap();
    for g in &gaps {
        eprintln!("T = {:e}: delta {:.4}, V_Y {:.4}, V_X {:.4}, gap {:.4}", g.horizon, g.delta, g.v_y, g.v_x, g.gap);
    }
    assert!(gaps.windows(2).all(|w| w[1].gap <= w[0].gap));
}

#[test]
fn split_off_subordinator_tail_probability_decays() {
    // P(S_T(t) > c(t) δ^{1/(2α)}) at integer t above δ^{-1/2}, for growing T
    let model = stable(0.7, 0.0);
    let t = 4.0;
    let c = norming_function(&model, t).unwrap();
    let mut probs = Vec::new();
    for horizon in [1e2, 1e6, 1e12, 1e24] {
        let d = delta(horizon).unwrap();
        assert!(t > d.powf(-0.5));
        let dec = build_decomposition(&model, horizon, DecompositionSide::NegativeJumps).unwrap();
        let spec = process_for_subordinator(&dec);
        let level = c * d.powf(1.0 / 1.4);
        let n = 200_000;
        let k = count_paths(n, 1, None, |i, out| {
            spec.run_on_grid(&[0.0, t], &mut StreamId::new(15, i).rng(), |index, _, x| {
                if index == 1 && x > level {
                    out[0] += 1;
                }
                ControlFlow::Continue(())
            });
        })
        .unwrap()[0];
        let p = k as f64 / n as f64;
        eprintln!("T = {horizon:e}: delta {d:.4}, P = {p:.5}, P / delta^(1/3) = {:.4}", p / d.cbrt());
        probs.push(p);
    }
    assert!(probs.windows(2).all(|w| w[1] < w[0]), "{probs:?}");
}

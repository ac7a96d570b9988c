//! Dispatch of a validated configuration to the library.

use crate::estimate::{
    discrete_survival_experiment, fit_exponent, lemma_n0n_experiment, product_bound_check, ExponentFit,
    SurvivalEstimate, SurvivalRun, Z95,
};
use crate::fluctuation::{kappa, spitzer_profile, PositivityProfile};
use crate::levymodel::{Boundary, BoundaryKind, LevyModel};
use crate::passage::{brownian_integral_test, Classification, TestFunction};
use crate::simulate::process_for_model;
use crate::Result;

use super::config::{ExperimentConfig, ExperimentKind};

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment_id: String,
    pub kind: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub boundary_kind: String,
    pub t: f64,
    pub n_paths: u64,
    pub survivors: u64,
    pub p_hat: f64,
    pub ln_p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Survival estimates of one curve, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotGroup {
    pub label: String,
    pub points: Vec<SurvivalEstimate>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Results {
    pub rows: Vec<Row>,
    pub plot: Vec<PlotGroup>,
    /// Human-readable one-line findings (fits, flags, verdicts).
    pub summary: Vec<String>,
}

pub fn boundary_kind_name(b: &Boundary) -> &'static str {
    match b.kind {
        BoundaryKind::Constant => "constant",
        BoundaryKind::Decreasing => "decreasing",
        BoundaryKind::Increasing => "increasing",
    }
}

fn plot_label(b: &Boundary) -> String {
    match b.kind {
        BoundaryKind::Constant => format!("constant:level={}", b.level),
        _ => format!("{}:gamma={}:level={}", boundary_kind_name(b), b.gamma, b.level),
    }
}

struct RowMaker<'a> {
    cfg: &'a ExperimentConfig,
    alpha: f64,
    beta: f64,
}

impl RowMaker<'_> {
    fn blank(&self, kind: &str, gamma: f64, boundary_kind: &str) -> Row {
        Row {
            experiment_id: self.cfg.id.clone(),
            kind: kind.into(),
            alpha: self.alpha,
            beta: self.beta,
            gamma,
            boundary_kind: boundary_kind.into(),
            t: f64::NAN,
            n_paths: 0,
            survivors: 0,
            p_hat: f64::NAN,
            ln_p: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            seed: self.cfg.run.seed,
        }
    }

    fn estimate(&self, kind: &str, gamma: f64, boundary_kind: &str, e: &SurvivalEstimate) -> Row {
        Row {
            t: e.t,
            n_paths: e.n_paths,
            survivors: e.survivors,
            p_hat: e.p_hat,
            ln_p: e.p_hat.ln(),
            ci_low: e.log_ci.0,
            ci_high: e.log_ci.1,
            seed: e.seed,
            ..self.blank(kind, gamma, boundary_kind)
        }
    }

    /// Fit row: `p_hat` carries `ρ̂`, `ln_p` its standard error and the
    /// interval is `ρ̂ ± 1.96 SE`.
    fn fit(&self, gamma: f64, boundary_kind: &str, n_paths: u64, fit: Option<&ExponentFit>) -> Row {
        let mut r = Row { n_paths, ..self.blank("fit", gamma, boundary_kind) };
        if let Some(f) = fit {
            r.p_hat = f.rho_hat;
            r.ln_p = f.stderr;
            r.ci_low = f.rho_hat - Z95 * f.stderr;
            r.ci_high = f.rho_hat + Z95 * f.stderr;
        }
        r
    }
}

fn fit_or_warn(points: &[SurvivalEstimate], label: &str, summary: &mut Vec<String>) -> Option<ExponentFit> {
    match fit_exponent(points) {
        Ok(f) => {
            summary.push(format!(
                "{label}: rho_hat = {:.4} (se {:.4}, r2 {:.4}, {} horizons, {} dropped)",
                f.rho_hat,
                f.stderr,
                f.r2,
                f.grid.len(),
                f.dropped.len()
            ));
            Some(f)
        }
        Err(e) => {
            log::warn!("{label}: no exponent fit: {e}");
            summary.push(format!("{label}: no exponent fit ({e})"));
            None
        }
    }
}

/// Runs the configured experiment. All randomness is keyed by the seed, so
/// the rows do not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Results> {
    let model = if matches!(cfg.kind, ExperimentKind::Kappa | ExperimentKind::IntegralTest) {
        None
    } else {
        Some(cfg.model.build()?)
    };
    let (alpha, beta) = match model.as_ref().map(LevyModel::attraction_params) {
        Some(Ok(p)) => (p.alpha, p.beta),
        _ => (cfg.model.alpha.unwrap_or(f64::NAN), f64::NAN),
    };
    let mk = RowMaker { cfg, alpha, beta };
    let threads = Some(cfg.run.threads);
    let run = &cfg.run;
    let mut out = Results::default();

    match cfg.kind {
        ExperimentKind::Survival | ExperimentKind::Exponent => {
            let model = model.expect("model built above");
            let spec = process_for_model(&model)?;
            let sr = SurvivalRun { threads, ..SurvivalRun::new(run.horizons()?, run.n_paths, run.grid, run.seed) };
            let est = sr.estimates(&spec, &cfg.boundaries)?;
            for (b, points) in cfg.boundaries.iter().zip(est) {
                let name = boundary_kind_name(b);
                out.rows.extend(points.iter().map(|e| mk.estimate("survival", b.gamma, name, e)));
                if cfg.kind == ExperimentKind::Exponent {
                    let f = fit_or_warn(&points, &plot_label(b), &mut out.summary);
                    out.rows.push(mk.fit(b.gamma, name, run.n_paths, f.as_ref()));
                }
                out.plot.push(PlotGroup { label: plot_label(b), points });
            }
        }
        ExperimentKind::LemmaN0N => {
            let gamma = cfg.boundaries[0].gamma;
            let alpha = cfg.model.alpha.expect("checked by config");
            let n = run.t_max as u64;
            let r = lemma_n0n_experiment(alpha, gamma, cfg.model.slowly_varying(), n, run.n_paths, run.seed, threads)?;
            out.rows.push(mk.estimate("lemma-n0N", gamma, "increasing", &r.estimate));
            out.rows.push(mk.estimate("lemma-n0N-full", gamma, "increasing", &r.full_window));
            out.summary.push(format!(
                "N = {}, N1 = {}, delta = {:.6}, epsilon = {}, window empty: {}, p_hat = {}, full-window p_hat = {}",
                r.n, r.n1, r.delta, r.epsilon, r.window_empty, r.estimate.p_hat, r.full_window.p_hat
            ));
        }
        ExperimentKind::ProductBound => {
            let model = model.expect("model built above");
            for b in &cfg.boundaries {
                for t in run.horizons()? {
                    let r = product_bound_check(&model, t, b.gamma, run.n_paths, run.seed, run.grid, threads)?;
                    out.rows.push(mk.estimate("product-lhs", b.gamma, "decreasing", &r.lhs));
                    out.rows.push(mk.estimate("product-y", b.gamma, "constant", &r.y_factor));
                    out.rows.push(mk.estimate("product-s", b.gamma, "decreasing", &r.s_factor));
                    out.rows.push(Row {
                        t,
                        n_paths: run.n_paths,
                        p_hat: r.rhs,
                        ln_p: r.rhs.ln(),
                        ..mk.blank("product-rhs", b.gamma, "decreasing")
                    });
                    out.summary.push(format!(
                        "gamma = {}, T = {t}: lhs {} vs product {} (diff {:.3e}, se {:.3e}) holds: {}{}",
                        b.gamma,
                        r.lhs.p_hat,
                        r.rhs,
                        r.diff,
                        r.diff_se,
                        r.holds,
                        if r.degenerate { " (no negative jumps)" } else { "" }
                    ));
                }
            }
        }
        ExperimentKind::Kappa => {
            for &rho in &cfg.kappa_rho {
                let profile = PositivityProfile::Constant { rho };
                for &a in &cfg.kappa_a {
                    let k = kappa(&profile, a, 0.0)?;
                    out.rows.push(Row {
                        t: a,
                        p_hat: k,
                        ln_p: k.ln(),
                        ..mk.blank("kappa", f64::NAN, &format!("rho={rho}"))
                    });
                    out.summary.push(format!("rho = {rho}, a = {a}: kappa = {k}, a^rho = {}", a.powf(rho)));
                }
            }
        }
        ExperimentKind::Spitzer => {
            let model = model.expect("model built above");
            let horizons = run.horizons()?;
            let PositivityProfile::Tabulated { p, .. } =
                spitzer_profile(&model, &horizons, run.n_paths, run.seed, threads)?
            else {
                unreachable!("spitzer_profile tabulates")
            };
            let points: Vec<SurvivalEstimate> = horizons
                .iter()
                .zip(&p)
                .map(|(&t, &q)| {
                    let k = (q * run.n_paths as f64).round() as u64;
                    SurvivalEstimate::from_counts(t, k, run.n_paths, run.seed)
                })
                .collect();
            out.rows.extend(points.iter().map(|e| mk.estimate("spitzer", f64::NAN, "positivity", e)));
            if let Ok(rho) = model.rho() {
                out.summary.push(format!("closed-form rho = {rho}"));
            }
        }
        ExperimentKind::IntegralTest => {
            let mut fns: Vec<(f64, String, TestFunction)> = Vec::new();
            if let Some((coeff, gamma)) = cfg.integral {
                fns.push((gamma, "power".into(), TestFunction::Power { coeff, gamma }));
            }
            for b in &cfg.boundaries {
                fns.push((b.gamma, boundary_kind_name(b).into(), TestFunction::Boundary(*b)));
            }
            for (gamma, what, f) in fns {
                let r = brownian_integral_test(&f)?;
                let class = match r.classification {
                    Classification::Convergent => "convergent",
                    Classification::Divergent => "divergent",
                    Classification::Unclassified => "unclassified",
                };
                out.rows.push(Row { p_hat: r.value, ln_p: r.value.ln(), ..mk.blank("integral-test", gamma, class) });
                out.summary.push(format!("{what} gamma = {gamma}: integral {} ({class})", r.value));
            }
        }
        ExperimentKind::DiscreteSurvival => {
            let model = model.expect("model built above");
            let x = cfg.boundaries[0].level;
            let horizons = run.horizons()?;
            let mut ys = Vec::new();
            let mut xs = Vec::new();
            for &t in &horizons {
                let r = discrete_survival_experiment(&model, t, x, run.seed, run.n_paths, threads)?;
                out.rows.push(mk.estimate("discrete-y", f64::NAN, "constant", &r.y));
                out.rows.push(mk.estimate("discrete-x", f64::NAN, "constant", &r.x));
                out.summary.push(format!(
                    "T = {t}: delta = {:.6}, P(Y_T <= x) = {}, P(X <= x) = {}, ordering violations = {}",
                    r.delta, r.y.p_hat, r.x.p_hat, r.ordering_violations
                ));
                ys.push(r.y);
                xs.push(r.x);
            }
            if horizons.len() >= 4 {
                let f = fit_or_warn(&ys, "Y_T", &mut out.summary);
                out.rows.push(mk.fit(f64::NAN, "constant", run.n_paths, f.as_ref()));
            }
            out.plot.push(PlotGroup { label: format!("Y_T:level={x}"), points: ys });
            out.plot.push(PlotGroup { label: format!("X:level={x}"), points: xs });
        }
    }
    Ok(out)
}

//! Horizon-dependent split of the big jumps on one side of a Lévy process.
//!
//! For a horizon `T` with `δ = δ(T)`, the jumps of size `y > 1` on the chosen
//! side are thinned: a fraction
//! `w(y) = δ · ℓ(δ^{1/α}/y) / ℓ(1/y)` is moved into a compound-Poisson
//! subordinator `S_T`, the rest stays with the process `Y_T`. On the
//! negative-jump side `X = Y_T − S_T`, on the positive-jump side
//! `X = Y_T + S_T`.

use serde::Serialize;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::levymodel::LevyModel;
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::rvcalc::{RegVaryingTail, Side};
use crate::simulate::jumps::JumpTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionSide {
    /// Big negative jumps are split off: `X = Y_T − S_T`.
    NegativeJumps,
    /// Big positive jumps are split off: `X = Y_T + S_T`.
    PositiveJumps,
}

impl DecompositionSide {
    pub fn tail_side(self) -> Side {
        match self {
            DecompositionSide::NegativeJumps => Side::Left,
            DecompositionSide::PositiveJumps => Side::Right,
        }
    }

    /// Sign with which `S_T` enters `X`.
    pub fn sign(self) -> f64 {
        match self {
            DecompositionSide::NegativeJumps => -1.0,
            DecompositionSide::PositiveJumps => 1.0,
        }
    }
}

/// `min(1 / ln ln T, 1/2)`.
pub fn delta(t: f64) -> Result<f64> {
    if !(t > std::f64::consts::E) || !t.is_finite() {
        return domain(format!("delta(T) needs T > e, got {t}"));
    }
    Ok((1.0 / t.ln().ln()).min(0.5))
}

/// Fraction of the density at jump size `y` moved into the subordinator.
#[inline]
pub fn splitoff_weight(tail: &RegVaryingTail, delta: f64, y: f64) -> f64 {
    if y < 1.0 {
        return 0.0;
    }
    delta * tail.ell.ratio(delta.powf(1.0 / tail.alpha) / y, 1.0 / y)
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Horizon the split was built for; `None` when built from `δ` directly.
    pub horizon: Option<f64>,
    pub delta: f64,
    pub side: DecompositionSide,
    /// The split tail; `None` for the zero decomposition (`S_T ≡ 0`).
    pub tail: Option<RegVaryingTail>,
    /// `Λ = ∫ ν_S`.
    pub total_mass: f64,
    table: Option<Arc<JumpTable>>,
}

/// Splits the tail of `model` on `side` for horizon `t`.
pub fn build_decomposition(model: &LevyModel, t: f64, side: DecompositionSide) -> Result<Decomposition> {
    let d = delta(t)?;
    let mut dec = Decomposition::from_delta(model, d, side)?;
    dec.horizon = Some(t);
    Ok(dec)
}

impl Decomposition {
    /// Same split with `δ ∈ (0, 1/2]` given directly.
    pub fn from_delta(model: &LevyModel, delta: f64, side: DecompositionSide) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return domain(format!("delta must lie in (0, 1/2], got {delta}"));
        }
        let (left, right) = model.jump_tails();
        let tail = match side.tail_side() {
            Side::Left => left,
            Side::Right => right,
        }
        .ok_or_else(|| {
            let which = match side {
                DecompositionSide::NegativeJumps => "left",
                DecompositionSide::PositiveJumps => "right",
            };
            Error::Domain(format!("decomposition needs a {which} tail in the model"))
        })?;
        tail.validate()?;
        validate_split(&tail, delta)?;
        let density = move |y: f64| splitoff_weight(&tail, delta, y) * tail.density(y);
        let total_mass = integrate_to_infinity(density, 1.0, QuadOptions::default()).value;
        let table = JumpTable::build(density, 1.0, None, tail.alpha)?;
        Ok(Self { horizon: None, delta, side, tail: Some(tail), total_mass, table: Some(Arc::new(table)) })
    }

    /// The degenerate split with no mass: `S_T ≡ 0`, `Y_T = X`.
    pub fn zero(delta: f64, side: DecompositionSide) -> Self {
        Self { horizon: None, delta, side, tail: None, total_mass: 0.0, table: None }
    }

    /// Density of the original tail at jump size `y > 0`.
    pub fn nu(&self, y: f64) -> f64 {
        self.tail.map_or(0.0, |t| t.density(y))
    }

    /// Density of the subordinator's Lévy measure at `y > 0`.
    pub fn nu_s(&self, y: f64) -> f64 {
        self.tail.map_or(0.0, |t| splitoff_weight(&t, self.delta, y) * t.density(y))
    }

    /// Density of what stays with `Y_T` on this side.
    pub fn nu_rest(&self, y: f64) -> f64 {
        self.tail.map_or(0.0, |t| (1.0 - splitoff_weight(&t, self.delta, y)) * t.density(y))
    }

    pub fn jump_table(&self) -> Option<&Arc<JumpTable>> {
        self.table.as_ref()
    }

    /// Same decomposition with the total mass recomputed at refined tolerance.
    pub fn total_mass_refined(&self) -> f64 {
        match self.tail {
            None => 0.0,
            Some(tail) => {
                let d = self.delta;
                integrate_to_infinity(
                    |y| splitoff_weight(&tail, d, y) * tail.density(y),
                    1.0,
                    QuadOptions::default().refined(),
                )
                .value
            }
        }
    }
}

/// `ν_rest ≥ 0` on 512 log-spaced points of `[1, 10⁶]` and at `y = 1`.
fn validate_split(tail: &RegVaryingTail, delta: f64) -> Result<()> {
    let grid = std::iter::once(1.0).chain((0..512).map(|i| 10f64.powf(6.0 * i as f64 / 511.0)));
    for y in grid {
        let w = delta * tail.ell.ratio(delta.powf(1.0 / tail.alpha) / y, 1.0 / y);
        let rest = (1.0 - w) * tail.density(y);
        if rest < 0.0 {
            return Err(Error::DecompositionInvalid { x: y, value: rest });
        }
    }
    Ok(())
}

/// Upper bound on `E exp(−λ S_T(1))`, with a warning outside `λ ≤ 0.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceBound {
    pub value: f64,
    pub warning: Option<String>,
}

/// `exp(−(1/(4α)) · δ · λ^α · ℓ(λ δ^{1/α}))`.
pub fn laplace_bound(dec: &Decomposition, lambda: f64) -> Result<LaplaceBound> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("laplace bound needs lambda > 0, got {lambda}"));
    }
    let warning =
        (lambda > 0.1).then(|| format!("lambda = {lambda} exceeds 0.1; the small-lambda regime may not hold"));
    let value = match dec.tail {
        None => 1.0,
        Some(t) => {
            let a = t.alpha;
            let ell = t.ell.value(lambda * dec.delta.powf(1.0 / a));
            (-(1.0 / (4.0 * a)) * dec.delta * lambda.powf(a) * ell).exp()
        }
    };
    Ok(LaplaceBound { value, warning })
}

/// `⌊(ln T)^{3/(1 − αγ − ε)}⌋`.
pub fn t0_threshold(t: f64, alpha: f64, gamma: f64, epsilon: f64) -> Result<u64> {
    let ag = alpha * gamma;
    if !(ag - epsilon > 0.0 && ag + epsilon < 1.0 && epsilon > 0.0) {
        return domain(format!(
            "need 0 < alpha*gamma - eps and alpha*gamma + eps < 1, got alpha*gamma = {ag}, eps = {epsilon}"
        ));
    }
    if !(t >= std::f64::consts::E) {
        return domain(format!("T0 threshold needs T >= e, got {t}"));
    }
    Ok(snapped_floor(t.ln().powf(3.0 / (1.0 - ag - epsilon))))
}

/// Floor that treats values within rounding distance of an integer as that
/// integer, so that exact powers such as `2^12` computed through logarithms
/// do not lose one.
pub(crate) fn snapped_floor(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rvcalc::SlowlyVarying;
    use std::f64::consts::E;

    fn pareto_model(alpha: f64, ell: SlowlyVarying) -> LevyModel {
        let t = RegVaryingTail::new(alpha, ell, Side::Left).unwrap();
        let r = RegVaryingTail::new(alpha, ell, Side::Right).unwrap();
        LevyModel::from_tails(0.0, 0.0, Some(t), Some(r))
    }

    #[test]
    fn delta_values() {
        assert!((delta(E.powf(E * E)).unwrap() - 0.5).abs() < 1e-15);
        assert!((delta(E.powf(E.powi(4))).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(delta(100.0).unwrap(), 0.5);
        assert!(delta(E).is_err());
        assert!(delta(2.0).is_err());
    }

    #[test]
    fn total_mass_constant_ell() {
        let m = pareto_model(0.5, SlowlyVarying::ONE);
        let d = Decomposition::from_delta(&m, 0.5, DecompositionSide::NegativeJumps).unwrap();
        assert!((d.total_mass - 1.0).abs() < 1e-9, "{}", d.total_mass);
        let d = Decomposition::from_delta(&m, 0.25, DecompositionSide::PositiveJumps).unwrap();
        assert!((d.total_mass - 0.5).abs() < 1e-9);
        let d = build_decomposition(&m, E.powf(E * E), DecompositionSide::NegativeJumps).unwrap();
        assert!((d.delta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn total_mass_log_power_refined() {
        let m = pareto_model(0.7, SlowlyVarying::LogPower { p: 1.0 });
        let d = Decomposition::from_delta(&m, 0.5, DecompositionSide::NegativeJumps).unwrap();
        let fine = d.total_mass_refined();
        assert!(((d.total_mass - fine) / fine).abs() < 1e-6);
        assert!((d.jump_table().unwrap().total() - fine).abs() / fine < 1e-6);
    }

    #[test]
    fn split_identity() {
        let m = pareto_model(0.7, SlowlyVarying::LogPower { p: 2.0 });
        let d = Decomposition::from_delta(&m, 0.4, DecompositionSide::NegativeJumps).unwrap();
        for i in 0..200 {
            let y = 1.001 * (100.0f64 / 1.001).powf(i as f64 / 199.0);
            let rel = (d.nu_s(y) + d.nu_rest(y) - d.nu(y)).abs() / d.nu(y);
            assert!(rel < 1e-12);
            assert!(d.nu_rest(y) >= 0.0);
        }
        assert_eq!(d.nu_s(0.5), 0.0);
        assert_eq!(d.nu_rest(0.5), d.nu(0.5));
    }

    #[test]
    fn invalid_split_is_reported() {
        // δ ℓ(δ^{1/α}/y)/ℓ(1/y) exceeds 1 near y = 1 for a steep log power
        let m = pareto_model(0.7, SlowlyVarying::LogPower { p: 8.0 });
        match Decomposition::from_delta(&m, 0.5, DecompositionSide::NegativeJumps) {
            Err(Error::DecompositionInvalid { x, value }) => {
                assert!(x >= 1.0 && value < 0.0);
            }
            other => panic!("expected invalid decomposition, got {other:?}"),
        }
    }

    #[test]
    fn missing_tail() {
        let m = LevyModel::from_tails(
            0.0,
            0.0,
            None,
            Some(RegVaryingTail::new(0.5, SlowlyVarying::ONE, Side::Right).unwrap()),
        );
        assert!(Decomposition::from_delta(&m, 0.5, DecompositionSide::NegativeJumps).is_err());
        assert!(Decomposition::from_delta(&m, 0.5, DecompositionSide::PositiveJumps).is_ok());
    }

    #[test]
    fn laplace_bound_values() {
        let m = pareto_model(0.5, SlowlyVarying::ONE);
        let d = Decomposition::from_delta(&m, 0.5, DecompositionSide::NegativeJumps).unwrap();
        let b = laplace_bound(&d, 0.01).unwrap();
        assert!((b.value - (-0.025f64).exp()).abs() < 1e-15 && b.warning.is_none());
        assert!((laplace_bound(&d, 0.04).unwrap().value - (-0.05f64).exp()).abs() < 1e-15);
        assert!(laplace_bound(&d, 1e-12).unwrap().value > 1.0 - 1e-6);
        assert!(laplace_bound(&d, 0.5).unwrap().warning.is_some());
        assert!(laplace_bound(&d, 0.0).is_err());
    }

    #[test]
    fn total_mass_decreases_with_horizon() {
        let m = pareto_model(0.5, SlowlyVarying::ONE);
        let mut last = f64::INFINITY;
        for t in [1e2, 1e4, 1e8, 1e16, 1e64, 1e256] {
            let d = build_decomposition(&m, t, DecompositionSide::NegativeJumps).unwrap();
            assert!((d.total_mass - 2.0 * d.delta).abs() < 1e-9);
            assert!(d.total_mass <= last);
            last = d.total_mass;
        }
    }

    #[test]
    fn t0_values() {
        assert_eq!(t0_threshold(E * E, 0.5, 1.0, 0.25).unwrap(), 4096);
        assert_eq!(t0_threshold(E, 0.5, 1.0, 0.25).unwrap(), 1);
        assert_eq!(t0_threshold(E.powi(3), 0.5, 0.5, 0.15).unwrap(), 243);
        assert!(t0_threshold(100.0, 0.5, 1.0, 0.6).is_err());
        assert!(t0_threshold(100.0, 0.9, 1.0, 0.2).is_err());
    }
}

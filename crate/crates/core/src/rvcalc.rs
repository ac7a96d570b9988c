//! Slowly varying functions at zero and regularly varying Lévy tails.
//!
//! A tail is described by its density `|x|^{-α-1} ℓ(1/|x|)` on one half-line.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{domain, Result};
use crate::quad::{integrate_to_infinity, QuadOptions};

/// A function slowly varying at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SlowlyVarying {
    /// `ℓ(x) = c`, `c > 0`.
    Constant { c: f64 },
    /// `ℓ(x) = (ln(e + 1/x))^p`.
    LogPower { p: f64 },
}

impl SlowlyVarying {
    pub const ONE: SlowlyVarying = SlowlyVarying::Constant { c: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            SlowlyVarying::Constant { c } if !(c > 0.0 && c.is_finite()) => {
                domain(format!("constant slowly varying function needs c > 0, got {c}"))
            }
            SlowlyVarying::LogPower { p } if !p.is_finite() => domain("log-power exponent must be finite"),
            _ => Ok(()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, SlowlyVarying::Constant { .. })
    }

    /// Evaluates `ℓ(x)` without argument checks.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant { c } => c,
            SlowlyVarying::LogPower { p } => (E + 1.0 / x).ln().powf(p),
        }
    }

    /// `ℓ(a) / ℓ(b)`, exactly 1 for the constant family.
    #[inline]
    pub fn ratio(&self, a: f64, b: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant { .. } => 1.0,
            SlowlyVarying::LogPower { p } => ((E + 1.0 / a).ln() / (E + 1.0 / b).ln()).powf(p),
        }
    }
}

/// Evaluates `ℓ(x)` for `x > 0`.
pub fn eval_slowly_varying(spec: &SlowlyVarying, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("slowly varying function evaluated at non-finite x = {x}"));
    }
    if x <= 0.0 {
        return domain(format!("slowly varying function needs x > 0, got {x}"));
    }
    spec.validate()?;
    Ok(spec.value(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A one-sided regularly varying Lévy tail with density `y^{-α-1} ℓ(1/y)`, `y = |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegVaryingTail {
    pub alpha: f64,
    pub ell: SlowlyVarying,
    pub side: Side,
}

impl RegVaryingTail {
    pub fn new(alpha: f64, ell: SlowlyVarying, side: Side) -> Result<Self> {
        let t = Self { alpha, ell, side };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return domain(format!("tail index must lie in (0, 2), got {}", self.alpha));
        }
        self.ell.validate()
    }

    /// Density at distance `y > 0` from the origin.
    #[inline]
    pub fn density(&self, y: f64) -> f64 {
        y.powf(-self.alpha - 1.0) * self.ell.value(1.0 / y)
    }

    /// Closed-form tail mass for constant `ℓ`.
    fn closed_form_mass(&self, x: f64) -> Option<f64> {
        match self.ell {
            SlowlyVarying::Constant { c } => Some(c * x.powf(-self.alpha) / self.alpha),
            SlowlyVarying::LogPower { .. } => None,
        }
    }

    /// `∫_lo^hi y^k · density(y) dy`, `0 ≤ lo < hi ≤ ∞` restricted to finite `hi`.
    /// Used for small-jump moments; `k + 1 − α > 0` is required when `lo = 0`.
    pub fn moment(&self, k: f64, lo: f64, hi: f64, opts: QuadOptions) -> f64 {
        if let SlowlyVarying::Constant { c } = self.ell {
            let e = k - self.alpha;
            return if e.abs() < 1e-15 {
                c * (hi / lo).ln()
            } else {
                c * (hi.powf(e) - if lo > 0.0 { lo.powf(e) } else { 0.0 }) / e
            };
        }
        // log substitution handles the power singularity at 0
        let g = |s: f64| {
            let y = s.exp();
            y.powf(k + 1.0) * self.density(y)
        };
        let s_hi = hi.ln();
        let s_lo = if lo > 0.0 {
            lo.ln()
        } else {
            // integrand ~ e^{(k-α)s}: stop where it has decayed by 1e-16
            s_hi - 37.0 / (k - self.alpha).max(1e-3)
        };
        crate::quad::integrate(g, s_lo, s_hi, opts).value
    }
}

/// `ν₊(x)` or `ν₋(x)`: mass of the tail beyond distance `x`.
pub fn tail_mass(tail: &RegVaryingTail, x: f64) -> Result<f64> {
    tail_mass_with(tail, x, QuadOptions::default())
}

pub fn tail_mass_with(tail: &RegVaryingTail, x: f64, opts: QuadOptions) -> Result<f64> {
    if tail.alpha <= 0.0 {
        return domain(format!("tail integral diverges for alpha = {}", tail.alpha));
    }
    tail.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("tail mass needs finite x > 0, got {x}"));
    }
    if let Some(m) = tail.closed_form_mass(x) {
        return Ok(m);
    }
    Ok(integrate_to_infinity(|y| tail.density(y), x, opts).value)
}

/// Largest `λ₀` on the geometric grid `λ_k = 10^{-k/4}`, `λ ≥ 1e-300`, such that
/// `ℓ(λ) ≥ λ^ε` holds at every grid point below `λ₀`. `None` if the bound
/// fails at the smallest grid point.
pub fn potter_threshold(ell: &SlowlyVarying, epsilon: f64) -> Option<f64> {
    let grid: Vec<f64> = (0..=1200).map(|k| 10f64.powf(-(k as f64) / 4.0)).collect();
    let mut threshold = None;
    for &lam in grid.iter().rev() {
        if ell.value(lam) >= lam.powf(epsilon) {
            threshold = Some(lam);
        } else {
            break;
        }
    }
    threshold
}

/// Largest `x₀` on a geometric grid in `[1e-300, 1]` such that
/// `|ℓ(λx)/ℓ(x) − 1| < tol` for every grid point `x ≤ x₀`.
pub fn slow_variation_threshold(ell: &SlowlyVarying, lambda: f64, tol: f64) -> Option<f64> {
    let mut threshold = None;
    for k in (0..=1200).rev() {
        let x = 10f64.powf(-(k as f64) / 4.0);
        if (ell.ratio(lambda * x, x) - 1.0).abs() < tol {
            threshold = Some(x);
        } else {
            break;
        }
    }
    threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family() {
        assert_eq!(eval_slowly_varying(&SlowlyVarying::ONE, 0.37).unwrap(), 1.0);
    }

    #[test]
    fn log_power_values() {
        let l1 = SlowlyVarying::LogPower { p: 1.0 };
        assert!((eval_slowly_varying(&l1, 1.0).unwrap() - 1.313_261_687_518_222_8).abs() < 1e-15);
        // 40-digit reference: (ln(e + 100))^2
        let l2 = SlowlyVarying::LogPower { p: 2.0 };
        let v = eval_slowly_varying(&l2, 0.01).unwrap();
        assert!((v - 21.455_332_407_428_988).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(eval_slowly_varying(&SlowlyVarying::ONE, f64::NAN).is_err());
        assert!(eval_slowly_varying(&SlowlyVarying::ONE, f64::INFINITY).is_err());
        assert!(eval_slowly_varying(&SlowlyVarying::ONE, 0.0).is_err());
        assert!(SlowlyVarying::Constant { c: 0.0 }.validate().is_err());
        let t = RegVaryingTail { alpha: 0.0, ell: SlowlyVarying::ONE, side: Side::Left };
        assert!(tail_mass(&t, 1.0).is_err());
        let t = RegVaryingTail { alpha: -0.5, ell: SlowlyVarying::ONE, side: Side::Left };
        assert!(tail_mass(&t, 1.0).is_err());
    }

    #[test]
    fn closed_form_tail_masses() {
        let t = RegVaryingTail::new(0.5, SlowlyVarying::ONE, Side::Left).unwrap();
        assert_eq!(tail_mass(&t, 1.0).unwrap(), 2.0);
        assert_eq!(tail_mass(&t, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn karamata_ratio_is_exact_for_constant_ell() {
        let t = RegVaryingTail::new(0.7, SlowlyVarying::ONE, Side::Right).unwrap();
        for x in [1.0, 2.0, 10.0, 1e3, 1e6] {
            let r = tail_mass(&t, x).unwrap() * x.powf(0.7) * 0.7;
            assert!((r - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn log_power_tail_mass_against_independent_simpson() {
        let t = RegVaryingTail::new(0.7, SlowlyVarying::LogPower { p: 1.0 }, Side::Right).unwrap();
        let got = tail_mass(&t, 2.0).unwrap();
        // independent oracle: Simpson in s = ln y on [ln 2, ln 2 + 80], 2e6 panels
        let s0 = 2f64.ln();
        let oracle = crate::quad::simpson(
            |s: f64| {
                let y = s.exp();
                y.powf(-1.7) * (E + y).ln() * y
            },
            s0,
            s0 + 80.0,
            2_000_000,
        );
        assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
        let refined = tail_mass_with(&t, 2.0, QuadOptions::default().refined()).unwrap();
        assert!(((got - refined) / refined).abs() < 1e-8);
    }

    #[test]
    fn moments_match_closed_form() {
        let t = RegVaryingTail::new(0.7, SlowlyVarying::LogPower { p: 0.0 }, Side::Right).unwrap();
        // p = 0 is the constant 1 evaluated through the quadrature path
        let got = t.moment(2.0, 0.0, 1e-3, QuadOptions::default());
        let exact = 1e-3f64.powf(1.3) / 1.3;
        assert!(((got - exact) / exact).abs() < 1e-8, "{got} {exact}");
        let got = t.moment(1.0, 1e-3, 1.0, QuadOptions::default());
        let exact = (1.0 - 1e-3f64.powf(0.3)) / 0.3;
        assert!(((got - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn potter_bound_holds_near_zero() {
        for p in [-2.0, -0.5, 0.5, 2.0] {
            for eps in [0.05, 0.2] {
                let ell = SlowlyVarying::LogPower { p };
                let lam0 = potter_threshold(&ell, eps).expect("bound holds near zero");
                assert!(lam0 > 0.0);
                let mut lam: f64 = lam0;
                while lam >= 1e-300 {
                    assert!(ell.value(lam) >= lam.powf(eps));
                    lam /= 1.7;
                }
            }
        }
    }

    #[test]
    fn slow_variation_threshold_reported() {
        for p in [-1.0, 1.0, 3.0] {
            let ell = SlowlyVarying::LogPower { p };
            for lambda in [0.5, 2.0] {
                let x0 = slow_variation_threshold(&ell, lambda, 0.01);
                assert!(x0.is_some(), "p={p} lambda={lambda}");
                let x0 = x0.unwrap();
                assert!((ell.ratio(lambda * x0, x0) - 1.0).abs() < 0.01);
            }
        }
        assert_eq!(slow_variation_threshold(&SlowlyVarying::ONE, 2.0, 0.01), Some(1.0));
    }
}

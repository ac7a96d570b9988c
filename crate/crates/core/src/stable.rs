//! Strictly stable laws: sampling, positivity parameter, Lévy-measure
//! constants and the norming function.
//!
//! Parameterization: `E exp(iuZ(1)) = exp(-σ^α |u|^α (1 − iβ tan(πα/2) sgn u))`
//! for `α ≠ 1`; for `α = 1` only the symmetric (Cauchy) case is supported.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::levymodel::LevyModel;
use crate::rng::{exp1, open01, StreamId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        let p = Self { alpha, beta, scale };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return domain(format!("stable index must lie in (0, 2), got {}", self.alpha));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return domain(format!("skewness must lie in [-1, 1], got {}", self.beta));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return domain(format!("scale must be positive, got {}", self.scale));
        }
        if self.alpha == 1.0 && self.beta != 0.0 {
            return Err(Error::Unsupported(
                "alpha = 1 with beta != 0 is not strictly stable without a drift convention".into(),
            ));
        }
        Ok(())
    }

    /// Weights `(c₊, c₋)` of the Lévy density `c± |x|^{-α-1}`.
    pub fn levy_constants(&self) -> (f64, f64) {
        let total = if self.alpha == 1.0 {
            2.0 * self.scale / PI
        } else {
            let g = libm::tgamma(-self.alpha);
            self.scale.powf(self.alpha) / (-g * (FRAC_PI_2 * self.alpha).cos())
        };
        (0.5 * total * (1.0 + self.beta), 0.5 * total * (1.0 - self.beta))
    }

    /// Inverse of [`levy_constants`](Self::levy_constants).
    pub fn from_levy_constants(alpha: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        let total = c_plus + c_minus;
        if !(total > 0.0) {
            return domain("stable law needs positive total jump weight");
        }
        let beta = (c_plus - c_minus) / total;
        let scale = if alpha == 1.0 {
            total * PI / 2.0
        } else {
            let g = libm::tgamma(-alpha);
            (total * (-g * (FRAC_PI_2 * alpha).cos())).powf(1.0 / alpha)
        };
        Self::new(alpha, beta, scale)
    }

    /// Drift `b` that makes the triplet `(b, 0, ν)` with the truncated
    /// compensator `1_{|x|≤1}` reproduce this strictly stable law.
    pub fn compensator_drift(&self) -> f64 {
        if self.alpha == 1.0 {
            return 0.0;
        }
        let (cp, cm) = self.levy_constants();
        (cp - cm) / (1.0 - self.alpha)
    }

    /// Closed-form characteristic exponent `Ψ(u)`, returned as `(re, im)`.
    pub fn characteristic_exponent(&self, u: f64) -> (f64, f64) {
        let m = (self.scale * u.abs()).powf(self.alpha);
        if self.alpha == 1.0 {
            return (-self.scale * u.abs(), 0.0);
        }
        let t = (FRAC_PI_2 * self.alpha).tan();
        (-m, m * self.beta * t * u.signum())
    }

    /// One draw of `Z(1)` by the Chambers–Mallows–Stuck transform.
    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (open01(rng) - 0.5);
        let w = exp1(rng);
        self.scale * standard_cms(self.alpha, self.beta, v, w)
    }
}

#[inline]
fn standard_cms(alpha: f64, beta: f64, v: f64, w: f64) -> f64 {
    if alpha == 1.0 {
        return v.tan();
    }
    let t = beta * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let arg = alpha * (v + b);
    s * arg.sin() / v.cos().powf(1.0 / alpha) * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `n` i.i.d. draws of `Z(1)` from the given stream.
pub fn sample_stable(params: &StableParams, n: usize, stream: StreamId) -> Result<Vec<f64>> {
    params.validate()?;
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let mut rng = stream.rng();
    Ok((0..n).map(|_| params.draw(&mut rng)).collect())
}

/// `ρ = P(Z(1) > 0)`.
pub fn positivity_parameter(params: &StableParams) -> Result<f64> {
    params.validate()?;
    if params.alpha == 1.0 {
        return Ok(0.5);
    }
    let a = params.alpha;
    let skew = params.beta * (FRAC_PI_2 * a).tan();
    // the branch above 1/2 is computed and the other taken as its complement;
    // 1 − m is exact for m in [1/2, 1], so ρ(α, −β) = 1 − ρ(α, β) holds bitwise
    let m = 0.5 + skew.abs().atan() / (PI * a);
    Ok(if skew >= 0.0 { m } else { 1.0 - m })
}

/// `c(t) = scale · t^{1/α}` for the model's domain-of-attraction parameters.
pub fn norming_function(model: &LevyModel, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("norming function needs t > 0, got {t}"));
    }
    let p = model.attraction_params()?;
    Ok(p.scale * t.powf(1.0 / p.alpha))
}

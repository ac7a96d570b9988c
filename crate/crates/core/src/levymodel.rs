//! Lévy triplets, moving boundaries, the characteristic exponent and model
//! validation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::quad::{gk15, integrate, wynn_epsilon, QuadOptions};
use crate::rvcalc::{tail_mass_with, RegVaryingTail, Side, SlowlyVarying};
use crate::stable::{positivity_parameter, StableParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulationMode {
    /// Stable increments drawn exactly on every grid cell.
    Exact,
    /// Gaussian + drift + compound-Poisson jumps above a cutoff, small jumps
    /// replaced by a variance-matched Gaussian.
    Perturbed,
}

/// A Lévy process given by its triplet `(b, σ², ν)` with `ν` described by
/// regularly varying tails, plus domain-of-attraction metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    pub b: f64,
    pub sigma2: f64,
    pub tail_left: Option<RegVaryingTail>,
    pub tail_right: Option<RegVaryingTail>,
    pub stable: Option<StableParams>,
    /// Supplied positivity parameter; overrides the closed form when set.
    pub rho: Option<f64>,
    pub mode: SimulationMode,
}

impl LevyModel {
    /// The strictly stable process with the given parameters, simulated exactly.
    pub fn strictly_stable(params: StableParams) -> Result<Self> {
        params.validate()?;
        let (cp, cm) = params.levy_constants();
        let tail = |c: f64, side| {
            (c > 0.0).then_some(RegVaryingTail { alpha: params.alpha, ell: SlowlyVarying::Constant { c }, side })
        };
        Ok(Self {
            b: params.compensator_drift(),
            sigma2: 0.0,
            tail_left: tail(cm, Side::Left),
            tail_right: tail(cp, Side::Right),
            stable: Some(params),
            rho: None,
            mode: SimulationMode::Exact,
        })
    }

    /// Brownian motion with drift; no jumps.
    pub fn brownian(sigma2: f64, drift: f64) -> Self {
        Self {
            b: drift,
            sigma2,
            tail_left: None,
            tail_right: None,
            stable: None,
            rho: None,
            mode: SimulationMode::Perturbed,
        }
    }

    /// A general triplet with regularly varying tails, simulated in perturbed mode.
    pub fn from_tails(
        b: f64,
        sigma2: f64,
        tail_left: Option<RegVaryingTail>,
        tail_right: Option<RegVaryingTail>,
    ) -> Self {
        Self { b, sigma2, tail_left, tail_right, stable: None, rho: None, mode: SimulationMode::Perturbed }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn with_mode(mut self, mode: SimulationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn tail(&self, side: Side) -> Option<&RegVaryingTail> {
        match side {
            Side::Left => self.tail_left.as_ref(),
            Side::Right => self.tail_right.as_ref(),
        }
    }

    /// Tail index shared by the jump part, if any.
    pub fn alpha(&self) -> Option<f64> {
        self.stable
            .map(|s| s.alpha)
            .or_else(|| self.tail_left.map(|t| t.alpha))
            .or_else(|| self.tail_right.map(|t| t.alpha))
    }

    /// Stable law of the domain of attraction. For tails without a `stable`
    /// block, a log-power `ℓ` contributes its value at 1 as the weight; the
    /// norming then holds up to slow variation.
    pub fn attraction_params(&self) -> Result<StableParams> {
        if let Some(s) = self.stable {
            return Ok(s);
        }
        let weight = |t: &Option<RegVaryingTail>| match t {
            Some(t) => match t.ell {
                SlowlyVarying::Constant { c } => c,
                SlowlyVarying::LogPower { .. } => t.ell.value(1.0),
            },
            None => 0.0,
        };
        let alpha = match (self.tail_left, self.tail_right) {
            (Some(l), Some(r)) if l.alpha != r.alpha => {
                // the heavier tail dominates
                return if l.alpha < r.alpha {
                    StableParams::from_levy_constants(l.alpha, 0.0, weight(&self.tail_left))
                } else {
                    StableParams::from_levy_constants(r.alpha, weight(&self.tail_right), 0.0)
                };
            }
            _ => self
                .alpha()
                .ok_or_else(|| Error::InvalidModel("model has no jump component; no domain of attraction".into()))?,
        };
        StableParams::from_levy_constants(alpha, weight(&self.tail_right), weight(&self.tail_left))
    }

    /// Positivity parameter: supplied value first, closed form otherwise.
    pub fn rho(&self) -> Result<f64> {
        match self.rho {
            Some(r) => Ok(r),
            None => positivity_parameter(&self.attraction_params()?),
        }
    }

    /// Tails used for jumps: explicit tails, or those implied by `stable`.
    pub fn jump_tails(&self) -> (Option<RegVaryingTail>, Option<RegVaryingTail>) {
        if self.tail_left.is_some() || self.tail_right.is_some() {
            return (self.tail_left, self.tail_right);
        }
        match self.stable.and_then(|s| Self::strictly_stable(s).ok()) {
            Some(m) => (m.tail_left, m.tail_right),
            None => (None, None),
        }
    }

    /// Fails on the first error-severity violation.
    pub fn check(&self) -> Result<()> {
        let report = validate_model(self, ValidationMode::General);
        let first = report.errors().next().map(|v| format!("{}: {}", v.field, v.message));
        match first {
            Some(msg) => Err(Error::InvalidModel(msg)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Constant,
    Decreasing,
    Increasing,
}

/// `level`, `level − t^γ` or `level + t^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub kind: BoundaryKind,
    pub gamma: f64,
    pub level: f64,
}

impl Boundary {
    pub fn constant(level: f64) -> Self {
        Self { kind: BoundaryKind::Constant, gamma: 0.0, level }
    }
    pub fn decreasing(gamma: f64, level: f64) -> Self {
        Self { kind: BoundaryKind::Decreasing, gamma, level }
    }
    pub fn increasing(gamma: f64, level: f64) -> Self {
        Self { kind: BoundaryKind::Increasing, gamma, level }
    }

    pub fn label(&self) -> String {
        match self.kind {
            BoundaryKind::Constant => format!("constant(level={})", self.level),
            BoundaryKind::Decreasing => {
                format!("decreasing(gamma={},level={})", self.gamma, self.level)
            }
            BoundaryKind::Increasing => {
                format!("increasing(gamma={},level={})", self.gamma, self.level)
            }
        }
    }
}

/// `Ψ(u)` from the triplet; the jump integral is evaluated by quadrature.
pub fn characteristic_exponent(model: &LevyModel, u: f64) -> Result<Complex64> {
    characteristic_exponent_with(model, u, QuadOptions::default())
}

pub fn characteristic_exponent_with(model: &LevyModel, u: f64, opts: QuadOptions) -> Result<Complex64> {
    if !u.is_finite() {
        return domain("characteristic exponent needs finite u");
    }
    if model.sigma2 < 0.0 {
        return domain("sigma2 negative");
    }
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (left, right) = model.jump_tails();
    let v = u.abs();
    let mut re = -0.5 * model.sigma2 * v * v;
    let mut im = model.b * v;
    for (tail, sign) in [(right, 1.0), (left, -1.0)] {
        if let Some(t) = tail {
            t.validate()?;
            let (r, i) = side_exponent(&t, v, opts)?;
            re += r;
            im += sign * i;
        }
    }
    let psi = Complex64::new(re, im);
    Ok(if u < 0.0 { psi.conj() } else { psi })
}

/// Contribution `∫ (e^{iuy} − 1 − 1_{y≤1} iuy) f(y) dy` of one tail, `u > 0`,
/// as `(re, im)` for the positive half-line.
fn side_exponent(tail: &RegVaryingTail, u: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    let alpha = tail.alpha;
    // [0, eps]: leading Taylor terms
    let eps = 1e-9 * (1.0 / u).min(1.0);
    let ell0 = tail.ell.value(1.0 / eps);
    let m2 = ell0 * eps.powf(2.0 - alpha) / (2.0 - alpha);
    let m3 = ell0 * eps.powf(3.0 - alpha) / (3.0 - alpha);
    let mut re = -0.5 * u * u * m2;
    let mut im = -u * u * u * m3 / 6.0;

    // [eps, 1] in s = ln y
    let re_inner = integrate(
        |s: f64| {
            let y = s.exp();
            let h = (0.5 * u * y).sin();
            -2.0 * h * h * tail.density(y) * y
        },
        eps.ln(),
        0.0,
        opts,
    );
    let im_inner = integrate(
        |s: f64| {
            let y = s.exp();
            let z = u * y;
            let d = if z < 1e-2 {
                let z3 = z * z * z;
                -z3 / 6.0 + z3 * z * z / 120.0
            } else {
                z.sin() - z
            };
            d * tail.density(y) * y
        },
        eps.ln(),
        0.0,
        opts,
    );
    re += re_inner.value;
    im += im_inner.value;

    // [1, ∞): oscillatory parts over half periods, accelerated
    let cos_tail = oscillatory_tail(tail, u, |z| z.cos(), FRAC_PI_2, opts);
    let sin_tail = oscillatory_tail(tail, u, |z| z.sin(), 0.0, opts);
    re += cos_tail - tail_mass_with(tail, 1.0, opts)?;
    im += sin_tail;
    Ok((re, im))
}

/// `∫_1^∞ w(uy) f(y) dy` for `w ∈ {cos, sin}`, where `w` vanishes at
/// `uy = phase + kπ`. The head up to the first zero is integrated
/// adaptively; the remaining half periods alternate in sign and their partial
/// sums are accelerated by Wynn's ε-algorithm.
fn oscillatory_tail<W: Fn(f64) -> f64>(tail: &RegVaryingTail, u: f64, w: W, phase: f64, opts: QuadOptions) -> f64 {
    let f = |y: f64| w(u * y) * tail.density(y);
    let k0 = ((u - phase) / PI).floor() + 1.0;
    let first_zero = (phase + k0 * PI) / u;
    let mut acc = integrate(f, 1.0, first_zero, opts).value;
    let h = PI / u;
    let terms = 40 + 20 * usize::from(opts.rel_tol < 1e-9);
    let mut sums = Vec::with_capacity(terms + 1);
    sums.push(acc);
    for k in 0..terms {
        let a = first_zero + k as f64 * h;
        let b = a + h;
        let mid = 0.5 * (a + b);
        let term =
            if opts.rel_tol < 1e-9 { integrate(f, a, b, opts).value } else { gk15(&f, a, mid).0 + gk15(&f, mid, b).0 };
        acc += term;
        sums.push(acc);
    }
    wynn_epsilon(&sums)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    fn push(&mut self, field: &str, message: impl Into<String>, severity: Severity) {
        self.violations.push(Violation { field: field.into(), message: message.into(), severity });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    General,
    /// Extra checks required before verifying the moving-boundary exponents.
    Theorem,
}

/// Checks the model's invariants and collects every violation found.
pub fn validate_model(model: &LevyModel, mode: ValidationMode) -> ValidationReport {
    use Severity::*;
    let mut report = ValidationReport::default();
    let theorem = mode == ValidationMode::Theorem;

    if model.sigma2 < 0.0 {
        report.push("sigma2", "sigma2 negative", Error);
    } else if !model.sigma2.is_finite() {
        report.push("sigma2", "sigma2 not finite", Error);
    }
    if !model.b.is_finite() {
        report.push("b", "drift not finite", Error);
    }
    for (field, tail) in [("tail_left", model.tail_left), ("tail_right", model.tail_right)] {
        if let Some(t) = tail {
            if let Err(e) = t.validate() {
                report.push(field, e.to_string(), Error);
                continue;
            }
            // ∫ (1 ∧ y²) ν(dy) on this side
            let opts = QuadOptions::default();
            let inner = t.moment(2.0, 0.0, 1.0, opts);
            let outer = tail_mass_with(&t, 1.0, opts).unwrap_or(f64::INFINITY);
            if !(inner + outer).is_finite() {
                report.push(field, "Lévy integrability ∫(1 ∧ x²) ν(dx) < ∞ fails", Error);
            }
        }
    }
    if let Some(s) = model.stable {
        if let Err(e) = s.validate() {
            report.push("stable", e.to_string(), Error);
        }
    }
    let has_jumps = model.stable.is_some() || model.tail_left.is_some() || model.tail_right.is_some();
    if !has_jumps {
        report.push(
            "tails",
            "no stable block or regularly varying tail: no domain-of-attraction metadata",
            if theorem { Error } else { Warning },
        );
    }
    if model.mode == SimulationMode::Exact && model.stable.is_none() {
        report.push("mode", "exact simulation requires a stable block", Error);
    }

    if let Some(r) = model.rho {
        if !(0.0..=1.0).contains(&r) {
            report.push("rho", format!("positivity parameter {r} outside [0, 1]"), Error);
        }
        if let Ok(closed) = model.attraction_params().and_then(|p| positivity_parameter(&p)) {
            if (closed - r).abs() > 1e-6 {
                report.push(
                    "rho",
                    format!("supplied rho {r} differs from closed form {closed}; supplied value used"),
                    Warning,
                );
            }
        }
    }

    if theorem {
        match model.alpha() {
            Some(a) if a >= 1.0 => {
                report.push("alpha", "theorem verification requires alpha < 1 (alpha >= 1 is excluded)", Error)
            }
            _ => {}
        }
        match model.rho() {
            Ok(r) if r > 0.0 && r < 1.0 => {}
            Ok(r) => report.push("rho", format!("theorem verification requires rho in (0, 1), got {r}"), Error),
            Err(e) => report.push("rho", e.to_string(), Error),
        }
    }
    report
}

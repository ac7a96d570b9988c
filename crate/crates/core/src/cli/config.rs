//! Flat `section.key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; list values are
//! comma-separated. Unknown keys are rejected so that typos surface as
//! field-level errors instead of silently using defaults.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use crate::levymodel::{Boundary, BoundaryKind, LevyModel, SimulationMode};
use crate::rvcalc::{RegVaryingTail, Side, SlowlyVarying};
use crate::simulate::GridPolicy;
use crate::stable::StableParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Every problem found in a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigError {
    pub errors: Vec<FieldError>,
}

impl ConfigError {
    pub fn single(field: &str, message: impl Into<String>) -> Self {
        Self { errors: vec![FieldError { field: field.into(), message: message.into() }] }
    }

    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError { field: field.into(), message: message.into() });
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", e.field, e.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Survival,
    Exponent,
    #[serde(rename = "lemma-n0N")]
    LemmaN0N,
    ProductBound,
    Kappa,
    Spitzer,
    IntegralTest,
    DiscreteSurvival,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Survival,
        Self::Exponent,
        Self::LemmaN0N,
        Self::ProductBound,
        Self::Kappa,
        Self::Spitzer,
        Self::IntegralTest,
        Self::DiscreteSurvival,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Survival => "survival",
            Self::Exponent => "exponent",
            Self::LemmaN0N => "lemma-n0N",
            Self::ProductBound => "product-bound",
            Self::Kappa => "kappa",
            Self::Spitzer => "spitzer",
            Self::IntegralTest => "integral-test",
            Self::DiscreteSurvival => "discrete-survival",
        }
    }

    fn needs_model(self) -> bool {
        !matches!(self, Self::Kappa | Self::IntegralTest | Self::LemmaN0N)
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EllFamily {
    Constant,
    LogPower,
}

/// The model block as written, before it is turned into a [`LevyModel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    /// Absent for a Brownian model.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub scale: Option<f64>,
    /// Lévy-density constants `c₊, c₋`; an alternative to `beta`/`scale`.
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    pub sigma2: f64,
    pub drift: f64,
    pub ell: EllFamily,
    pub ell_c: f64,
    pub ell_p: f64,
    pub mode: SimulationMode,
}

impl ModelConfig {
    fn stable_params(&self, alpha: f64) -> crate::Result<StableParams> {
        match (self.c_plus, self.c_minus) {
            (None, None) => StableParams::new(alpha, self.beta, self.scale.unwrap_or(1.0)),
            (cp, cm) => StableParams::from_levy_constants(alpha, cp.unwrap_or(0.0), cm.unwrap_or(0.0)),
        }
    }

    pub fn slowly_varying(&self) -> SlowlyVarying {
        match self.ell {
            EllFamily::Constant => SlowlyVarying::Constant { c: self.ell_c },
            EllFamily::LogPower => SlowlyVarying::LogPower { p: self.ell_p },
        }
    }

    /// Builds and validates the model.
    pub fn build(&self) -> crate::Result<LevyModel> {
        let Some(alpha) = self.alpha else {
            let m = LevyModel::brownian(self.sigma2, self.drift);
            m.check()?;
            return Ok(m);
        };
        let params = self.stable_params(alpha)?;
        let mut model = match self.mode {
            SimulationMode::Exact => LevyModel::strictly_stable(params)?,
            SimulationMode::Perturbed => {
                let (cp, cm) = params.levy_constants();
                let tail = |c: f64, side| -> crate::Result<Option<RegVaryingTail>> {
                    if c <= 0.0 {
                        return Ok(None);
                    }
                    let ell = match self.ell {
                        EllFamily::Constant => SlowlyVarying::Constant { c: c * self.ell_c },
                        EllFamily::LogPower => SlowlyVarying::LogPower { p: self.ell_p },
                    };
                    RegVaryingTail::new(alpha, ell, side).map(Some)
                };
                let centre = match self.ell {
                    EllFamily::Constant if alpha != 1.0 => {
                        StableParams::from_levy_constants(alpha, cp * self.ell_c, cm * self.ell_c)?.compensator_drift()
                    }
                    _ => 0.0,
                };
                LevyModel::from_tails(centre, 0.0, tail(cm, Side::Left)?, tail(cp, Side::Right)?)
            }
        };
        model.b += self.drift;
        model.sigma2 = self.sigma2;
        model.check()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub n_paths: u64,
    pub seed: u64,
    pub threads: usize,
    pub grid: GridPolicy,
}

impl RunConfig {
    /// Horizons `T_min … T_max`, geometric; a single point means `T_max`.
    pub fn horizons(&self) -> crate::Result<Vec<f64>> {
        if self.t_points == 1 {
            return Ok(vec![self.t_max]);
        }
        crate::estimate::geometric_horizons(self.t_min, self.t_max, self.t_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub kind: ExperimentKind,
    pub model: ModelConfig,
    pub boundaries: Vec<Boundary>,
    pub run: RunConfig,
    pub kappa_rho: Vec<f64>,
    pub kappa_a: Vec<f64>,
    /// `f(t) = coeff · t^γ` for the integral test; the boundary block is used
    /// when absent.
    pub integral: Option<(f64, f64)>,
}

/// Overrides applied on top of the file, as given on the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

const KEYS: &[&str] = &[
    "experiment.id",
    "experiment.kind",
    "model.alpha",
    "model.beta",
    "model.scale",
    "model.c_plus",
    "model.c_minus",
    "model.sigma2",
    "model.drift",
    "model.ell",
    "model.ell_c",
    "model.ell_p",
    "model.mode",
    "boundary.kind",
    "boundary.gamma",
    "boundary.level",
    "run.T_min",
    "run.T_max",
    "run.T_points",
    "run.n_paths",
    "run.seed",
    "run.threads",
    "run.grid",
    "run.dt",
    "run.refine",
    "run.ratio",
    "kappa.rho",
    "kappa.a",
    "integral.coeff",
    "integral.gamma",
];

/// Splits the text into a key map; duplicate and unknown keys are errors.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let (map, err) = collect_pairs(text);
    if err.errors.is_empty() {
        Ok(map)
    } else {
        Err(err)
    }
}

/// Like [`parse_pairs`], but keeps the valid pairs alongside the errors so
/// that later checks can still report on them.
fn collect_pairs(text: &str) -> (BTreeMap<String, String>, ConfigError) {
    let mut map = BTreeMap::new();
    let mut err = ConfigError::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            err.push(&format!("line {}", n + 1), "expected `section.key = value`");
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            err.push(k, "unknown key");
        } else if map.insert(k.to_string(), v.to_string()).is_some() {
            err.push(k, "key given more than once");
        }
    }
    (map, err)
}

struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
    err: ConfigError,
}

impl<'a> Reader<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.raw(key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(e) => {
                self.err.push(key, format!("cannot parse {v:?}: {e}"));
                None
            }
        }
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> T
    where
        T::Err: fmt::Display,
    {
        self.get(key).unwrap_or(default)
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        let Some(v) = self.raw(key) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for item in v.split(',') {
            match item.trim().parse::<T>() {
                Ok(x) => out.push(x),
                Err(e) => self.err.push(key, format!("cannot parse list item {:?}: {e}", item.trim())),
            }
        }
        out
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        if self.raw(key).is_none() {
            self.err.push(key, "required key missing");
            return None;
        }
        self.get(key)
    }
}

fn parse_kind(s: &str) -> Result<BoundaryKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "constant" => Ok(BoundaryKind::Constant),
        "decreasing" => Ok(BoundaryKind::Decreasing),
        "increasing" => Ok(BoundaryKind::Increasing),
        _ => Err(format!("unknown boundary kind {s:?}")),
    }
}

/// `list` broadcast to length `n` (a single value repeats).
fn broadcast(list: &[f64], n: usize, default: f64) -> Option<Vec<f64>> {
    match list.len() {
        0 => Some(vec![default; n]),
        1 => Some(vec![list[0]; n]),
        m if m == n => Some(list.to_vec()),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, overrides: Overrides) -> Result<Self, ConfigError> {
        let (map, err) = collect_pairs(text);
        let mut r = Reader { map: &map, err };

        let kind: Option<ExperimentKind> = r.require("experiment.kind");
        let id = r.raw("experiment.id").unwrap_or("experiment").to_string();
        if id.is_empty() || id.contains([',', '\n', '"']) {
            r.err.push("experiment.id", "must be non-empty without commas or quotes");
        }

        let mode = match r.raw("model.mode").unwrap_or("exact") {
            "exact" => SimulationMode::Exact,
            "perturbed" => SimulationMode::Perturbed,
            other => {
                r.err.push("model.mode", format!("expected exact or perturbed, got {other:?}"));
                SimulationMode::Exact
            }
        };
        let ell = match r.raw("model.ell").unwrap_or("constant") {
            "constant" => EllFamily::Constant,
            "log-power" => EllFamily::LogPower,
            other => {
                r.err.push("model.ell", format!("expected constant or log-power, got {other:?}"));
                EllFamily::Constant
            }
        };
        let model = ModelConfig {
            alpha: r.get("model.alpha"),
            beta: r.or("model.beta", 0.0),
            scale: r.get("model.scale"),
            c_plus: r.get("model.c_plus"),
            c_minus: r.get("model.c_minus"),
            sigma2: r.or("model.sigma2", 0.0),
            drift: r.or("model.drift", 0.0),
            ell,
            ell_c: r.or("model.ell_c", 1.0),
            ell_p: r.or("model.ell_p", 0.0),
            mode,
        };
        let uses_constants = model.c_plus.is_some() || model.c_minus.is_some();
        if uses_constants && (model.scale.is_some() || map.contains_key("model.beta")) {
            r.err.push("model.c_plus", "give either beta/scale or c_plus/c_minus, not both");
        }
        if mode == SimulationMode::Exact && ell != EllFamily::Constant {
            r.err.push("model.ell", "exact mode simulates a strictly stable law; use mode = perturbed for log-power");
        }

        let kinds: Vec<String> = r.list("boundary.kind");
        let gammas: Vec<f64> = r.list("boundary.gamma");
        let levels: Vec<f64> = r.list("boundary.level");
        let mut boundaries = Vec::new();
        let n_b = kinds.len().max(gammas.len());
        let kinds = if kinds.is_empty() && n_b > 0 { vec!["increasing".to_string(); n_b] } else { kinds };
        match (broadcast(&gammas, kinds.len(), 0.0), broadcast(&levels, kinds.len(), 1.0)) {
            (Some(g), Some(l)) => {
                for ((k, g), l) in kinds.iter().zip(g).zip(l) {
                    match parse_kind(k) {
                        Ok(BoundaryKind::Constant) => boundaries.push(Boundary::constant(l)),
                        Ok(kind) => {
                            if !(g > 0.0 && g.is_finite()) {
                                r.err.push("boundary.gamma", format!("moving boundaries need gamma > 0, got {g}"));
                            }
                            boundaries.push(Boundary { kind, gamma: g, level: l });
                        }
                        Err(e) => r.err.push("boundary.kind", e),
                    }
                }
            }
            _ => r.err.push("boundary.gamma", "gamma and level lists must have one entry or one per boundary kind"),
        }
        if boundaries.iter().any(|b| !b.level.is_finite()) {
            r.err.push("boundary.level", "levels must be finite");
        }

        let grid = match r.raw("run.grid").unwrap_or("geometric") {
            "uniform" => GridPolicy::Uniform { dt: r.or("run.dt", 0.25) },
            "integers" => GridPolicy::Integers,
            "geometric" => GridPolicy::Geometric {
                dt: r.or("run.dt", 0.25),
                refine: r.or("run.refine", 10),
                ratio: r.or("run.ratio", 2.0),
            },
            other => {
                r.err.push("run.grid", format!("expected uniform, integers or geometric, got {other:?}"));
                GridPolicy::Integers
            }
        };
        if let GridPolicy::Uniform { dt } | GridPolicy::Geometric { dt, .. } = grid {
            if !(dt > 0.0 && dt.is_finite()) {
                r.err.push("run.dt", format!("must be positive, got {dt}"));
            }
        }
        if let GridPolicy::Geometric { ratio, .. } = grid {
            if !(ratio > 1.0) {
                r.err.push("run.ratio", format!("must exceed 1, got {ratio}"));
            }
        }

        let seed = match overrides.seed {
            Some(s) => Some(s),
            None => {
                if !map.contains_key("run.seed") {
                    r.err.push("run.seed", "an explicit seed is required (config or --seed)");
                }
                r.get("run.seed")
            }
        };
        let threads = overrides.threads.unwrap_or_else(|| r.or("run.threads", 1usize));
        if threads == 0 {
            r.err.push("run.threads", "must be at least 1");
        }
        let t_max: f64 = r.or("run.T_max", 0.0);
        let run = RunConfig {
            t_min: r.or("run.T_min", t_max),
            t_max,
            t_points: r.or("run.T_points", 1usize),
            n_paths: r.or("run.n_paths", 10_000u64),
            seed: seed.unwrap_or(0),
            threads,
            grid,
        };

        let cfg = ExperimentConfig {
            id,
            kind: kind.unwrap_or(ExperimentKind::Survival),
            model,
            boundaries,
            run,
            kappa_rho: r.list("kappa.rho"),
            kappa_a: r.list("kappa.a"),
            integral: match (r.get::<f64>("integral.coeff"), r.get::<f64>("integral.gamma")) {
                (None, None) => None,
                (c, g) => Some((c.unwrap_or(1.0), g.unwrap_or(0.0))),
            },
        };
        let mut err = r.err;
        if kind.is_some() {
            cfg.check_kind(&map, &mut err);
        }
        if err.errors.is_empty() {
            Ok(cfg)
        } else {
            Err(err)
        }
    }

    fn check_kind(&self, map: &BTreeMap<String, String>, err: &mut ConfigError) {
        use ExperimentKind::*;
        let run = &self.run;
        let needs_horizons = !matches!(self.kind, Kappa | IntegralTest);
        if needs_horizons {
            if !map.contains_key("run.T_max") {
                err.push("run.T_max", "required key missing");
            } else if !(run.t_max > 0.0 && run.t_max.is_finite()) {
                err.push("run.T_max", format!("must be positive, got {}", run.t_max));
            }
            if run.t_points == 0 {
                err.push("run.T_points", "must be at least 1");
            } else if run.t_points > 1 && !(run.t_min > 0.0 && run.t_min < run.t_max) {
                err.push("run.T_min", "need 0 < T_min < T_max for a geometric T grid");
            }
            if run.n_paths == 0 {
                err.push("run.n_paths", "must be at least 1");
            }
        }
        if self.kind == Exponent && run.t_points < 4 {
            err.push("run.T_points", format!("exponent fits need at least 4 horizons, got {}", run.t_points));
        }
        if matches!(self.kind, Survival | Exponent | ProductBound | LemmaN0N | DiscreteSurvival)
            && self.boundaries.is_empty()
        {
            err.push("boundary.kind", "at least one boundary is required");
        }
        if self.kind == ProductBound && self.boundaries.iter().any(|b| b.kind != BoundaryKind::Decreasing) {
            err.push("boundary.kind", "product-bound uses decreasing boundaries 1 - t^gamma only");
        }
        if self.kind == LemmaN0N {
            if self.boundaries.len() != 1 {
                err.push("boundary.gamma", "lemma-n0N takes exactly one gamma");
            }
            if self.model.alpha.is_none() {
                err.push("model.alpha", "required key missing");
            }
            if run.t_max.fract() != 0.0 {
                err.push("run.T_max", "lemma-n0N uses an integer N = T_max");
            }
        }
        if self.kind == DiscreteSurvival && self.boundaries.len() != 1 {
            err.push("boundary.level", "discrete-survival takes exactly one level x");
        }
        if self.kind == Kappa {
            if self.kappa_rho.is_empty() {
                err.push("kappa.rho", "required key missing");
            }
            if self.kappa_a.is_empty() {
                err.push("kappa.a", "required key missing");
            }
        }
        if self.kind == IntegralTest && self.integral.is_none() && self.boundaries.is_empty() {
            err.push("integral.gamma", "give integral.coeff/integral.gamma or a boundary block");
        }
        if self.kind.needs_model() {
            if let Err(e) = self.model.build() {
                err.push("model", e.to_string());
            }
        }
    }

    /// Canonical text form; parsing it back yields the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        kv("experiment.id", self.id.clone());
        kv("experiment.kind", self.kind.name().into());
        let m = &self.model;
        if let Some(a) = m.alpha {
            kv("model.alpha", a.to_string());
        }
        if m.c_plus.is_some() || m.c_minus.is_some() {
            kv("model.c_plus", m.c_plus.unwrap_or(0.0).to_string());
            kv("model.c_minus", m.c_minus.unwrap_or(0.0).to_string());
        } else {
            kv("model.beta", m.beta.to_string());
            if let Some(sc) = m.scale {
                kv("model.scale", sc.to_string());
            }
        }
        kv("model.sigma2", m.sigma2.to_string());
        kv("model.drift", m.drift.to_string());
        kv(
            "model.ell",
            match m.ell {
                EllFamily::Constant => "constant",
                EllFamily::LogPower => "log-power",
            }
            .into(),
        );
        kv("model.ell_c", m.ell_c.to_string());
        kv("model.ell_p", m.ell_p.to_string());
        kv(
            "model.mode",
            match m.mode {
                SimulationMode::Exact => "exact",
                SimulationMode::Perturbed => "perturbed",
            }
            .into(),
        );
        if !self.boundaries.is_empty() {
            let kinds: Vec<&str> = self
                .boundaries
                .iter()
                .map(|b| match b.kind {
                    BoundaryKind::Constant => "constant",
                    BoundaryKind::Decreasing => "decreasing",
                    BoundaryKind::Increasing => "increasing",
                })
                .collect();
            kv("boundary.kind", kinds.join(", "));
            kv("boundary.gamma", join(&self.boundaries.iter().map(|b| b.gamma).collect::<Vec<_>>()));
            kv("boundary.level", join(&self.boundaries.iter().map(|b| b.level).collect::<Vec<_>>()));
        }
        let r = &self.run;
        kv("run.T_min", r.t_min.to_string());
        kv("run.T_max", r.t_max.to_string());
        kv("run.T_points", r.t_points.to_string());
        kv("run.n_paths", r.n_paths.to_string());
        kv("run.seed", r.seed.to_string());
        kv("run.threads", r.threads.to_string());
        match r.grid {
            GridPolicy::Uniform { dt } => {
                kv("run.grid", "uniform".into());
                kv("run.dt", dt.to_string());
            }
            GridPolicy::Integers | GridPolicy::Explicit => kv("run.grid", "integers".into()),
            GridPolicy::Geometric { dt, refine, ratio } => {
                kv("run.grid", "geometric".into());
                kv("run.dt", dt.to_string());
                kv("run.refine", refine.to_string());
                kv("run.ratio", ratio.to_string());
            }
        }
        if !self.kappa_rho.is_empty() {
            kv("kappa.rho", join(&self.kappa_rho));
        }
        if !self.kappa_a.is_empty() {
            kv("kappa.a", join(&self.kappa_a));
        }
        if let Some((c, g)) = self.integral {
            kv("integral.coeff", c.to_string());
            kv("integral.gamma", g.to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
        experiment.kind = exponent   # fit
        model.alpha = 0.7
        boundary.kind = constant, decreasing, increasing
        boundary.gamma = 0, 1.0, 1.3
        run.T_min = 16
        run.T_max = 16384
        run.T_points = 8
        run.n_paths = 1000
        run.seed = 42
    ";

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(BASE, Overrides::default()).unwrap();
        assert_eq!(c.kind, ExperimentKind::Exponent);
        assert_eq!(c.boundaries.len(), 3);
        assert_eq!(c.boundaries[2], Boundary::increasing(1.3, 1.0));
        assert_eq!(c.run.threads, 1);
        let again = ExperimentConfig::parse(&c.to_text(), Overrides::default()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn overrides_win() {
        let c = ExperimentConfig::parse(BASE, Overrides { seed: Some(7), threads: Some(4) }).unwrap();
        assert_eq!((c.run.seed, c.run.threads), (7, 4));
    }

    #[test]
    fn field_level_errors() {
        let text =
            BASE.replace("run.seed = 42", "").replace("run.T_points = 8", "run.T_points = 3") + "model.bogus = 1\n";
        let e = ExperimentConfig::parse(&text, Overrides::default()).unwrap_err();
        assert_eq!(e.errors[0].field, "model.bogus");
        let e = ExperimentConfig::parse(
            &BASE.replace("run.seed = 42", "").replace("run.T_points = 8", "run.T_points = 3"),
            Overrides::default(),
        )
        .unwrap_err();
        let fields: Vec<&str> = e.errors.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"run.seed"), "{fields:?}");
        assert!(fields.contains(&"run.T_points"), "{fields:?}");
        let e = ExperimentConfig::parse(&BASE.replace("0.7", "2.5"), Overrides::default()).unwrap_err();
        assert_eq!(e.errors[0].field, "model");
    }

    #[test]
    fn zero_threads_rejected() {
        let e = ExperimentConfig::parse(BASE, Overrides { seed: None, threads: Some(0) }).unwrap_err();
        assert_eq!(e.errors[0].field, "run.threads");
    }

    #[test]
    fn models() {
        let perturbed = ModelConfig {
            alpha: Some(0.5),
            beta: 0.0,
            scale: None,
            c_plus: Some(1.0),
            c_minus: Some(1.0),
            sigma2: 0.0,
            drift: 0.0,
            ell: EllFamily::LogPower,
            ell_c: 1.0,
            ell_p: 2.0,
            mode: SimulationMode::Perturbed,
        };
        let m = perturbed.build().unwrap();
        assert_eq!(m.tail_left.unwrap().ell, SlowlyVarying::LogPower { p: 2.0 });
        let exact = ModelConfig { ell: EllFamily::Constant, mode: SimulationMode::Exact, ..perturbed.clone() };
        let m = exact.build().unwrap();
        let (cp, cm) = m.stable.unwrap().levy_constants();
        assert!((cp - 1.0).abs() < 1e-12 && (cm - 1.0).abs() < 1e-12);
        let bm = ModelConfig { alpha: None, sigma2: 1.0, ..perturbed };
        assert_eq!(bm.build().unwrap(), LevyModel::brownian(1.0, 0.0));
    }
}

//! Boundary evaluation, survival predicates on paths and the Brownian
//! integral test.

use serde::Serialize;
use std::ops::ControlFlow;

use crate::error::{domain, Result};
use crate::levymodel::{Boundary, BoundaryKind};
use crate::simulate::{PathPoint, PathSample};

/// `f(t)` for the boundary: `level`, `level − t^γ` or `level + t^γ`.
#[inline]
pub fn boundary_value(b: &Boundary, t: f64) -> f64 {
    match b.kind {
        BoundaryKind::Constant => b.level,
        BoundaryKind::Decreasing => b.level - t.powf(b.gamma),
        BoundaryKind::Increasing => b.level + t.powf(b.gamma),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalVerdict {
    pub survived: bool,
    /// Index into [`PathSample::monitored`] of the first point above the boundary.
    pub first_crossing_index: Option<usize>,
    pub first_crossing_time: Option<f64>,
}

/// Whether the path stays at or below the boundary at every monitored point.
pub fn survives(path: &PathSample, b: &Boundary) -> SurvivalVerdict {
    survives_up_to(path, b, f64::INFINITY)
}

/// [`survives`] restricted to monitored times `t ≤ horizon`.
pub fn survives_up_to(path: &PathSample, b: &Boundary, horizon: f64) -> SurvivalVerdict {
    let hit = path
        .monitored()
        .into_iter()
        .enumerate()
        .take_while(|(_, (t, _))| *t <= horizon)
        .find(|(_, (t, x))| *x > boundary_value(b, *t));
    SurvivalVerdict {
        survived: hit.is_none(),
        first_crossing_index: hit.map(|(i, _)| i),
        first_crossing_time: hit.map(|(_, (t, _))| t),
    }
}

/// Streaming first-violation times for several boundaries along one path.
#[derive(Debug, Clone)]
pub struct PassageTracker<'a> {
    boundaries: &'a [Boundary],
    tau: Vec<f64>,
    open: usize,
    monitor_jumps: bool,
}

impl<'a> PassageTracker<'a> {
    pub fn new(boundaries: &'a [Boundary], monitor_jumps: bool) -> Self {
        Self { boundaries, tau: vec![f64::INFINITY; boundaries.len()], open: boundaries.len(), monitor_jumps }
    }

    #[inline]
    pub fn check(&mut self, t: f64, x: f64) {
        for (b, tau) in self.boundaries.iter().zip(self.tau.iter_mut()) {
            if tau.is_infinite() && x > boundary_value(b, t) {
                *tau = t;
                self.open -= 1;
            }
        }
    }

    /// Feeds one path point; breaks once every boundary has been crossed.
    #[inline]
    pub fn observe(&mut self, p: PathPoint) -> ControlFlow<()> {
        match p {
            PathPoint::Grid { t, x, .. } => self.check(t, x),
            PathPoint::Jump { t, pre, post } if self.monitor_jumps => {
                self.check(t, pre);
                self.check(t, post);
            }
            PathPoint::Jump { .. } => {}
        }
        if self.open == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }

    /// First monitored violation time per boundary (`∞` if none).
    pub fn first_violations(&self) -> &[f64] {
        &self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Convergent,
    Divergent,
    /// No envelope was supplied for tabulated data beyond its last sample.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralTestResult {
    pub classification: Classification,
    /// `∫₁^∞ |f(t)| t^{-3/2} dt`; infinite when divergent, the partial
    /// integral over the data when unclassified.
    pub value: f64,
}

/// A function `f` on `[1, ∞)` for the integral test.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Boundary(Boundary),
    /// `c · t^γ`.
    Power {
        coeff: f64,
        gamma: f64,
    },
    /// Samples `f(t_i)` on increasing `t_i ≥ 1`; `envelope_gamma` gives the
    /// growth `|f(t)| ≈ |f(t_last)| (t/t_last)^γ` beyond the last sample.
    Tabulated {
        t: Vec<f64>,
        f: Vec<f64>,
        envelope_gamma: Option<f64>,
    },
}

/// `∫₁^∞ |f(t)| t^{-3/2} dt`: finite iff the probability that Brownian motion
/// stays below `f` up to `T` decays like `T^{-1/2}`.
pub fn brownian_integral_test(f: &TestFunction) -> Result<IntegralTestResult> {
    let convergent = |value| IntegralTestResult { classification: Classification::Convergent, value };
    let divergent = IntegralTestResult { classification: Classification::Divergent, value: f64::INFINITY };
    match f {
        TestFunction::Power { coeff, gamma } => {
            if *coeff == 0.0 {
                Ok(convergent(0.0))
            } else if *gamma < 0.5 {
                Ok(convergent(coeff.abs() / (0.5 - gamma)))
            } else {
                Ok(divergent)
            }
        }
        TestFunction::Boundary(b) => {
            let (a, s) = match b.kind {
                BoundaryKind::Constant => (b.level, 0.0),
                BoundaryKind::Decreasing => (b.level, -1.0),
                BoundaryKind::Increasing => (b.level, 1.0),
            };
            if b.gamma == 0.0 {
                return Ok(convergent(2.0 * (a + s).abs()));
            }
            if s != 0.0 && b.gamma >= 0.5 {
                return Ok(divergent);
            }
            Ok(convergent(abs_power_integral(a, s, b.gamma)))
        }
        TestFunction::Tabulated { t, f, envelope_gamma } => {
            if t.len() != f.len() || t.len() < 2 {
                return domain("tabulated function needs at least two (t, f) samples of equal length");
            }
            if t[0] < 1.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
                return domain("tabulated abscissae must be increasing and start at t >= 1");
            }
            let g = |i: usize| f[i].abs() * t[i].powf(-1.5);
            let partial: f64 = (1..t.len()).map(|i| 0.5 * (g(i - 1) + g(i)) * (t[i] - t[i - 1])).sum();
            let last = t.len() - 1;
            match envelope_gamma {
                None => Ok(IntegralTestResult { classification: Classification::Unclassified, value: partial }),
                Some(ge) if *ge < 0.5 => {
                    let tail = f[last].abs() * t[last].powf(-0.5) / (0.5 - ge);
                    Ok(convergent(partial + tail))
                }
                Some(_) if f[last] == 0.0 => Ok(convergent(partial)),
                Some(_) => Ok(divergent),
            }
        }
    }
}

/// `∫₁^∞ |a + s t^γ| t^{-3/2} dt` for `γ < 1/2` (or `s = 0`).
fn abs_power_integral(a: f64, s: f64, gamma: f64) -> f64 {
    // antiderivative of (a + s t^γ) t^{-3/2}, vanishing at ∞
    let anti = |t: f64| -2.0 * a * t.powf(-0.5) + s * t.powf(gamma - 0.5) / (gamma - 0.5);
    let at_inf = 0.0;
    let mut cuts = vec![1.0];
    if s != 0.0 && -a / s > 1.0 {
        cuts.push((-a / s).powf(1.0 / gamma));
    }
    let mut total = 0.0;
    for (i, &lo) in cuts.iter().enumerate() {
        let hi_val = cuts.get(i + 1).map_or(at_inf, |&h| anti(h));
        total += (hi_val - anti(lo)).abs();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamId;
    use crate::simulate::{JumpRecord, TimeGrid};

    fn path(grid: Vec<f64>, values: Vec<f64>) -> PathSample {
        PathSample { grid: TimeGrid::new(grid).unwrap(), values, jumps: vec![], stream: StreamId::new(0, 0) }
    }

    #[test]
    fn boundary_values() {
        assert_eq!(boundary_value(&Boundary::decreasing(1.0, 1.0), 1.0), 0.0);
        assert_eq!(boundary_value(&Boundary::decreasing(1.0, 1.0), 0.0), 1.0);
        assert_eq!(boundary_value(&Boundary::increasing(0.5, 1.0), 4.0), 3.0);
        assert_eq!(boundary_value(&Boundary::constant(2.0), 9.0), 2.0);
    }

    #[test]
    fn zero_path_verdicts() {
        let g: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
        let p = path(g.clone(), vec![0.0; g.len()]);
        let v = survives(&p, &Boundary::decreasing(1.0, 1.0));
        assert!(!v.survived);
        assert_eq!(v.first_crossing_time, Some(1.25));
        assert_eq!(v.first_crossing_index, Some(5));
        assert!(survives(&p, &Boundary::constant(1.0)).survived);
        assert!(survives_up_to(&p, &Boundary::decreasing(1.0, 1.0), 1.0).survived);
    }

    #[test]
    fn drift_below_parabola() {
        let g: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let p = path(g.clone(), g.clone());
        assert!(survives(&p, &Boundary::increasing(2.0, 1.0)).survived);
    }

    #[test]
    fn jump_left_limits_are_monitored() {
        let mut p = path(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 0.0]);
        p.jumps.push(JumpRecord { t: 1.5, pre: 2.0, post: 0.0 });
        let v = survives(&p, &Boundary::constant(1.0));
        assert!(!v.survived);
        assert_eq!(v.first_crossing_time, Some(1.5));
    }

    #[test]
    fn tracker_matches_predicate() {
        let bs = [Boundary::constant(1.0), Boundary::decreasing(1.0, 1.0)];
        let mut tr = PassageTracker::new(&bs, true);
        for (k, t) in [0.0, 0.5, 1.0, 1.5].into_iter().enumerate() {
            let _ = tr.observe(PathPoint::Grid { index: k, t, x: 0.2 });
        }
        assert_eq!(tr.first_violations(), &[f64::INFINITY, 1.0]);
    }

    #[test]
    fn integral_test_closed_forms() {
        let c = |f| brownian_integral_test(&f).unwrap();
        let r = c(TestFunction::Power { coeff: 1.0, gamma: 0.0 });
        assert_eq!(r.classification, Classification::Convergent);
        assert!((r.value - 2.0).abs() < 1e-15);
        let r = c(TestFunction::Power { coeff: 1.0, gamma: 0.25 });
        assert!((r.value - 4.0).abs() < 1e-15);
        assert_eq!(c(TestFunction::Power { coeff: 1.0, gamma: 0.5 }).classification, Classification::Divergent);
        let r = c(TestFunction::Boundary(Boundary::constant(1.0)));
        assert!((r.value - 2.0).abs() < 1e-15);
        // 1 + t^{1/4}: 2 + 4
        let r = c(TestFunction::Boundary(Boundary::increasing(0.25, 1.0)));
        assert!((r.value - 6.0).abs() < 1e-12);
        assert_eq!(c(TestFunction::Boundary(Boundary::decreasing(1.0, 1.0))).classification, Classification::Divergent);
    }

    #[test]
    fn sign_change_is_split() {
        // |2 − t^{1/4}| changes sign at t = 16
        let got = brownian_integral_test(&TestFunction::Boundary(Boundary::decreasing(0.25, 2.0))).unwrap().value;
        let numeric = crate::quad::integrate_to_infinity(
            |t| (2.0 - t.powf(0.25)).abs() * t.powf(-1.5),
            1.0,
            crate::quad::QuadOptions::default(),
        )
        .value;
        assert!((got - numeric).abs() < 1e-6 * numeric, "{got} {numeric}");
    }

    #[test]
    fn tabulated() {
        let t: Vec<f64> = (0..=4000).map(|i| 10f64.powf(i as f64 / 1000.0)).collect();
        let f: Vec<f64> = t.iter().map(|_| 1.0).collect();
        let r = brownian_integral_test(&TestFunction::Tabulated { t: t.clone(), f: f.clone(), envelope_gamma: None })
            .unwrap();
        assert_eq!(r.classification, Classification::Unclassified);
        let r = brownian_integral_test(&TestFunction::Tabulated { t, f, envelope_gamma: Some(0.0) }).unwrap();
        assert_eq!(r.classification, Classification::Convergent);
        assert!((r.value - 2.0).abs() < 1e-5, "{}", r.value);
    }
}

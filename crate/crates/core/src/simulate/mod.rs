//! Path generation for `X`, `Y_T` and `S_T` on time grids with per-path
//! random streams.

pub mod grid;
pub mod jumps;
pub mod process;

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::decompose::{splitoff_weight, Decomposition, DecompositionSide};
use crate::error::{Error, Result};
use crate::levymodel::{LevyModel, SimulationMode};
use crate::rng::StreamId;
use crate::rvcalc::{RegVaryingTail, Side, SlowlyVarying};
use crate::stable::StableParams;

pub use grid::{GridPolicy, TimeGrid};
pub use jumps::JumpTable;
pub use process::{CompoundPoisson, PathPoint, ProcessSpec};

/// Jumps smaller than this are replaced by a variance-matched Gaussian.
pub const SMALL_JUMP_CUTOFF: f64 = 1e-3;

/// One jump of a sampled path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub t: f64,
    pub pre: f64,
    pub post: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
    pub stream: StreamId,
}

impl PathSample {
    pub fn jump_times(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.t).collect()
    }

    /// All monitored `(t, value)` pairs in time order: grid values, and for
    /// each jump its left limit followed by the post-jump value.
    pub fn monitored(&self) -> Vec<(f64, f64)> {
        let pts = self.grid.points();
        let mut out = Vec::with_capacity(pts.len() + 2 * self.jumps.len());
        let mut j = 0;
        for (k, &t) in pts.iter().enumerate() {
            while j < self.jumps.len() && self.jumps[j].t <= t && k > 0 {
                out.push((self.jumps[j].t, self.jumps[j].pre));
                out.push((self.jumps[j].t, self.jumps[j].post));
                j += 1;
            }
            out.push((t, self.values[k]));
        }
        out
    }
}

/// Weight profile of a one-sided jump measure built from a tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterWeight {
    /// The tail itself on `y > 1`.
    Full,
    /// `1 − w(y)` with `w` the split-off fraction for `δ`.
    Remainder { delta: f64 },
    /// `w(y)`.
    SplitOff { delta: f64 },
    /// Nothing beyond 1.
    Zero,
}

/// One side of a jump measure: `inner · f(y)` on `(0, 1]`, `outer(y) · f(y)`
/// on `(1, ∞)`, with `f` the tail density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideMeasure {
    pub tail: RegVaryingTail,
    pub inner: f64,
    pub outer: OuterWeight,
}

impl SideMeasure {
    pub fn full(tail: RegVaryingTail) -> Self {
        Self { tail, inner: 1.0, outer: OuterWeight::Full }
    }

    #[inline]
    pub fn density(&self, y: f64) -> f64 {
        let w = if y <= 1.0 {
            self.inner
        } else {
            match self.outer {
                OuterWeight::Full => 1.0,
                OuterWeight::Remainder { delta } => 1.0 - splitoff_weight(&self.tail, delta, y),
                OuterWeight::SplitOff { delta } => splitoff_weight(&self.tail, delta, y),
                OuterWeight::Zero => 0.0,
            }
        };
        w * self.tail.density(y)
    }

    /// Jump table for sizes above the small-jump cutoff.
    fn table(&self) -> Result<Option<Arc<JumpTable>>> {
        let lo = if self.inner > 0.0 { SMALL_JUMP_CUTOFF } else { 1.0 };
        let hi = match self.outer {
            OuterWeight::Zero => Some(1.0),
            _ => None,
        };
        if self.inner == 0.0 && hi.is_some() {
            return Ok(None);
        }
        let m = *self;
        let t = JumpTable::build(move |y| m.density(y), lo, hi, self.tail.alpha)?;
        Ok((t.total() > 0.0).then(|| Arc::new(t)))
    }
}

/// Triplet `(b, σ², left + right)` in the truncated convention, simulated with
/// jumps above [`SMALL_JUMP_CUTOFF`] exactly and smaller ones by their mean
/// and variance.
pub fn perturbed_spec(
    b: f64,
    sigma2: f64,
    left: Option<SideMeasure>,
    right: Option<SideMeasure>,
) -> Result<ProcessSpec> {
    let opts = crate::quad::QuadOptions::default();
    let eta = SMALL_JUMP_CUTOFF;
    let mut drift = b;
    let mut var = sigma2;
    let mut jumps = CompoundPoisson::default();
    for (m, sign) in [(left, -1.0), (right, 1.0)] {
        let Some(m) = m else { continue };
        if m.inner > 0.0 {
            drift -= sign * m.inner * m.tail.moment(1.0, eta, 1.0, opts);
            var += m.inner * m.tail.moment(2.0, 0.0, eta, opts);
        }
        let table = m.table()?;
        if sign < 0.0 {
            jumps.left = table;
        } else {
            jumps.right = table;
        }
    }
    Ok(ProcessSpec { stable: None, drift, sigma: var.max(0.0).sqrt(), jumps })
}

/// Simulation recipe for `X` itself.
pub fn process_for_model(model: &LevyModel) -> Result<ProcessSpec> {
    model.check()?;
    match model.mode {
        SimulationMode::Exact => {
            let s = model.stable.ok_or_else(|| Error::InvalidModel("exact mode requires stable parameters".into()))?;
            Ok(ProcessSpec {
                stable: Some(s),
                drift: model.b - s.compensator_drift(),
                sigma: model.sigma2.sqrt(),
                jumps: CompoundPoisson::default(),
            })
        }
        SimulationMode::Perturbed => {
            let (l, r) = model.jump_tails();
            perturbed_spec(model.b, model.sigma2, l.map(SideMeasure::full), r.map(SideMeasure::full))
        }
    }
}

/// Simulation recipe for `Y_T`, the process left after splitting off `S_T`.
///
/// For an exactly simulated stable model with `α < 1`, `Y_T` is written as a
/// stable process with the split side's weight scaled by `1 − δ`, minus (or
/// plus) an independent subordinator carrying `δ` times the small jumps of
/// that side. Otherwise `Y_T` is simulated from its thinned triplet.
pub fn process_for_y(model: &LevyModel, dec: &Decomposition) -> Result<ProcessSpec> {
    let Some(tail) = dec.tail else {
        return process_for_model(model);
    };
    model.check()?;
    let delta = dec.delta;
    let side = dec.side.tail_side();
    let stable_exact =
        model.mode == SimulationMode::Exact && matches!(tail.ell, SlowlyVarying::Constant { .. }) && tail.alpha < 1.0;
    if let (true, Some(s)) = (stable_exact, model.stable) {
        let (cp, cm) = s.levy_constants();
        let (cp2, cm2) = match side {
            Side::Left => (cp, (1.0 - delta) * cm),
            Side::Right => ((1.0 - delta) * cp, cm),
        };
        let reduced = StableParams::from_levy_constants(s.alpha, cp2, cm2)?;
        let v = SideMeasure { tail, inner: delta, outer: OuterWeight::Zero };
        // V is a plain sum of jumps; in the truncated convention its drift is
        // the first moment of its measure.
        let sign = dec.side.sign();
        let b_v = sign * delta * tail.moment(1.0, 0.0, 1.0, crate::quad::QuadOptions::default());
        let extra = model.b - s.compensator_drift();
        let (l, r) = match side {
            Side::Left => (Some(v), None),
            Side::Right => (None, Some(v)),
        };
        let mut spec = perturbed_spec(extra + b_v, model.sigma2, l, r)?;
        spec.stable = Some(reduced);
        return Ok(spec);
    }
    let (l, r) = model.jump_tails();
    let thinned = SideMeasure { tail, inner: 1.0, outer: OuterWeight::Remainder { delta } };
    let (l, r) = match side {
        Side::Left => (Some(thinned), r.map(SideMeasure::full)),
        Side::Right => (l.map(SideMeasure::full), Some(thinned)),
    };
    perturbed_spec(model.b, model.sigma2, l, r)
}

/// Simulation recipe for the subordinator `S_T` (nonnegative jumps only).
pub fn process_for_subordinator(dec: &Decomposition) -> ProcessSpec {
    ProcessSpec { jumps: CompoundPoisson { left: None, right: dec.jump_table().cloned() }, ..Default::default() }
}

/// Records the full path of `spec` on `grid`.
pub fn sample_process_path(spec: &ProcessSpec, grid: &TimeGrid, stream: StreamId) -> PathSample {
    let mut values = Vec::with_capacity(grid.len());
    let mut jumps = Vec::new();
    let mut rng = stream.rng();
    spec.run(grid.points(), &mut rng, |p| {
        match p {
            PathPoint::Grid { x, .. } => values.push(x),
            PathPoint::Jump { t, pre, post } => jumps.push(JumpRecord { t, pre, post }),
        }
        ControlFlow::Continue(())
    });
    PathSample { grid: grid.clone(), values, jumps, stream }
}

/// One path of `X`.
pub fn sample_path(model: &LevyModel, grid: &TimeGrid, stream: StreamId) -> Result<PathSample> {
    Ok(sample_process_path(&process_for_model(model)?, grid, stream))
}

/// One path of `S_T`.
pub fn sample_subordinator_path(dec: &Decomposition, grid: &TimeGrid, stream: StreamId) -> PathSample {
    sample_process_path(&process_for_subordinator(dec), grid, stream)
}

/// One path of `Y_T`.
pub fn sample_y_path(model: &LevyModel, dec: &Decomposition, grid: &TimeGrid, stream: StreamId) -> Result<PathSample> {
    Ok(sample_process_path(&process_for_y(model, dec)?, grid, stream))
}

/// `X = Y_T ∓ S_T` assembled on a common grid from separately sampled paths
/// (grid values only).
pub fn recombine(y: &PathSample, s: &PathSample, side: DecompositionSide) -> Vec<f64> {
    y.values.iter().zip(&s.values).map(|(a, b)| a + side.sign() * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{correlation, ks_two_sample, mean_se};

    #[test]
    fn pure_drift_path() {
        let m = LevyModel::brownian(0.0, 1.0);
        let g = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let p = sample_path(&m, &g, StreamId::new(1, 0)).unwrap();
        assert_eq!(p.values, vec![0.0, 1.0, 2.0]);
        assert!(p.jumps.is_empty());
    }

    #[test]
    fn gaussian_mean() {
        let m = LevyModel::brownian(1.0, 0.0);
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let spec = process_for_model(&m).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|i| sample_process_path(&spec, &g, StreamId::new(4, i)).values[1]).collect();
        let (mean, _) = mean_se(&xs);
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn stable_self_similarity() {
        let p = StableParams::symmetric(0.7).unwrap();
        let m = LevyModel::strictly_stable(p).unwrap();
        let g = TimeGrid::new(vec![0.0, 4.0]).unwrap();
        let spec = process_for_model(&m).unwrap();
        let n = 100_000;
        let scaled: Vec<f64> = (0..n)
            .map(|i| sample_process_path(&spec, &g, StreamId::new(8, i)).values[1] / 4f64.powf(1.0 / 0.7))
            .collect();
        let direct = crate::stable::sample_stable(&p, n as usize, StreamId::new(9, 0)).unwrap();
        let d = ks_two_sample(&scaled, &direct);
        assert!(d < 1.628 * (2.0 / n as f64).sqrt(), "{d}");
    }

    #[test]
    fn disjoint_increments_uncorrelated() {
        let m = LevyModel::strictly_stable(StableParams::new(0.7, 0.3, 1.0).unwrap()).unwrap();
        let g = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let spec = process_for_model(&m).unwrap();
        let n = 100_000u64;
        let (mut a, mut b) = (vec![], vec![]);
        for i in 0..n {
            let v = sample_process_path(&spec, &g, StreamId::new(10, i)).values;
            // a bounded transform keeps the sample correlation meaningful
            // despite infinite variance
            a.push(v[1].atan());
            b.push((v[2] - v[1]).atan());
        }
        let r = correlation(&a, &b);
        assert!(r.abs() < 3.0 / (n as f64).sqrt(), "{r}");
    }

    #[test]
    fn monitored_order() {
        let p = PathSample {
            grid: TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap(),
            values: vec![0.0, 0.5, 3.0],
            jumps: vec![JumpRecord { t: 1.5, pre: 1.0, post: 2.0 }],
            stream: StreamId::new(0, 0),
        };
        assert_eq!(p.monitored(), vec![(0.0, 0.0), (1.0, 0.5), (1.5, 1.0), (1.5, 2.0), (2.0, 3.0)]);
    }
}

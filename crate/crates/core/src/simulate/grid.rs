//! Monitoring grids.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum GridPolicy {
    /// `0, dt, 2dt, …`
    Uniform { dt: f64 },
    /// `0, 1, 2, …`
    Integers,
    /// `refine` extra points `dt·ratio^{-k}` between 0 and `dt`, then uniform `dt`.
    Geometric { dt: f64, refine: u32, ratio: f64 },
    /// Points given explicitly.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
    policy: GridPolicy,
}

impl TimeGrid {
    /// Grid from explicit points: starts at 0, strictly increasing, finite.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        Self::checked(points, GridPolicy::Explicit)
    }

    fn checked(points: Vec<f64>, policy: GridPolicy) -> Result<Self> {
        if points.first() != Some(&0.0) {
            return domain("time grid must start at 0");
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return domain(format!("time grid must be strictly increasing, found {} then {}", w[0], w[1]));
            }
        }
        Ok(Self { points, policy })
    }

    /// Builds the grid for `policy` up to `horizon`, with `horizon` as last point.
    pub fn with_policy(policy: GridPolicy, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return domain(format!("grid horizon must be positive, got {horizon}"));
        }
        let mut pts = vec![0.0];
        let uniform = |pts: &mut Vec<f64>, dt: f64| -> Result<()> {
            if !(dt > 0.0) {
                return domain(format!("grid step must be positive, got {dt}"));
            }
            let n = (horizon / dt - 1e-9).ceil().max(1.0) as u64;
            if n > 500_000_000 {
                return domain(format!("grid with {n} points is too large"));
            }
            pts.extend((1..=n).map(|k| (k as f64 * dt).min(horizon)));
            Ok(())
        };
        match policy {
            GridPolicy::Uniform { dt } => uniform(&mut pts, dt)?,
            GridPolicy::Integers => uniform(&mut pts, 1.0)?,
            GridPolicy::Geometric { dt, refine, ratio } => {
                if !(ratio > 1.0) {
                    return domain(format!("geometric grid ratio must exceed 1, got {ratio}"));
                }
                pts.extend((1..=refine).rev().map(|k| dt * ratio.powi(-(k as i32))).filter(|&t| t < horizon));
                uniform(&mut pts, dt)?;
            }
            GridPolicy::Explicit => return domain("explicit grids are built with TimeGrid::new"),
        }
        pts.dedup();
        Self::checked(pts, policy)
    }

    /// Adds `extra` points in `(0, horizon]`; points beyond the horizon extend it.
    pub fn merged(&self, extra: &[f64]) -> Result<Self> {
        let mut pts = self.points.clone();
        for &t in extra {
            if !(t >= 0.0 && t.is_finite()) {
                return domain(format!("grid point must be nonnegative, got {t}"));
            }
            pts.push(t);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Self::checked(pts, self.policy)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn policy(&self) -> GridPolicy {
        self.policy
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

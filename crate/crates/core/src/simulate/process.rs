//! Path stepping for processes of the form
//! stable increments + drift + Brownian part + signed compound-Poisson jumps.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::rng::exp1;
use crate::stable::StableParams;

use super::jumps::JumpTable;

/// Compound-Poisson jumps: `right` tables give positive jumps, `left`
/// tables negative ones.
#[derive(Debug, Clone, Default)]
pub struct CompoundPoisson {
    pub left: Option<Arc<JumpTable>>,
    pub right: Option<Arc<JumpTable>>,
}

impl CompoundPoisson {
    pub fn rate(&self) -> f64 {
        self.left.as_ref().map_or(0.0, |t| t.total()) + self.right.as_ref().map_or(0.0, |t| t.total())
    }

    #[inline]
    fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let l = self.left.as_ref().map_or(0.0, |t| t.total());
        let r = self.right.as_ref().map_or(0.0, |t| t.total());
        let u = crate::rng::open01(rng) * (l + r);
        if u < r {
            self.right.as_ref().unwrap().draw(rng)
        } else {
            -self.left.as_ref().unwrap().draw(rng)
        }
    }
}

/// A process `X(t) = Z(t) + d·t + s·W(t) + J(t)` with `Z` strictly stable,
/// `W` standard Brownian motion and `J` compound Poisson.
#[derive(Debug, Clone, Default)]
pub struct ProcessSpec {
    pub stable: Option<StableParams>,
    pub drift: f64,
    pub sigma: f64,
    pub jumps: CompoundPoisson,
}

/// A monitored point of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathPoint {
    Grid {
        index: usize,
        t: f64,
        x: f64,
    },
    /// A jump at epoch `t` from the left limit `pre` to `post`.
    Jump {
        t: f64,
        pre: f64,
        post: f64,
    },
}

impl ProcessSpec {
    pub fn is_zero(&self) -> bool {
        self.stable.is_none() && self.drift == 0.0 && self.sigma == 0.0 && self.jumps.rate() == 0.0
    }

    #[inline]
    fn continuous<R: RngCore + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        let mut dx = self.drift * dt;
        if self.sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            dx += self.sigma * dt.sqrt() * z;
        }
        if let Some(p) = &self.stable {
            dx += dt.powf(1.0 / p.alpha) * p.draw(rng);
        }
        dx
    }

    /// Walks one path over `times` (which start at 0), calling `visit` at
    /// every grid point and every jump in time order. Stops early when
    /// `visit` breaks.
    pub fn run<R, V>(&self, times: &[f64], rng: &mut R, mut visit: V)
    where
        R: RngCore + ?Sized,
        V: FnMut(PathPoint) -> ControlFlow<()>,
    {
        let mut x = 0.0;
        let mut t = 0.0;
        if visit(PathPoint::Grid { index: 0, t: 0.0, x: 0.0 }).is_break() {
            return;
        }
        let rate = self.jumps.rate();
        let mut next_jump = if rate > 0.0 { exp1(rng) / rate } else { f64::INFINITY };
        for (index, &target) in times.iter().enumerate().skip(1) {
            while next_jump <= target {
                x += self.continuous(next_jump - t, rng);
                t = next_jump;
                let pre = x;
                x += self.jumps.draw(rng);
                if visit(PathPoint::Jump { t, pre, post: x }).is_break() {
                    return;
                }
                next_jump = t + exp1(rng) / rate;
            }
            if target > t {
                x += self.continuous(target - t, rng);
                t = target;
            }
            if visit(PathPoint::Grid { index, t, x }).is_break() {
                return;
            }
        }
    }

    /// Like [`run`](Self::run) but only grid values are produced: the
    /// continuous part takes one increment per cell and the jumps falling in
    /// the cell are added at its end. The law at the grid points is the same.
    pub fn run_on_grid<R, V>(&self, times: &[f64], rng: &mut R, mut visit: V)
    where
        R: RngCore + ?Sized,
        V: FnMut(usize, f64, f64) -> ControlFlow<()>,
    {
        let mut x = 0.0;
        if visit(0, 0.0, 0.0).is_break() {
            return;
        }
        let rate = self.jumps.rate();
        let mut next_jump = if rate > 0.0 { exp1(rng) / rate } else { f64::INFINITY };
        for (index, w) in times.windows(2).enumerate() {
            x += self.continuous(w[1] - w[0], rng);
            while next_jump <= w[1] {
                x += self.jumps.draw(rng);
                next_jump += exp1(rng) / rate;
            }
            if visit(index + 1, w[1], x).is_break() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamId;

    #[test]
    fn drift_only_is_deterministic() {
        let p = ProcessSpec { drift: 2.0, ..Default::default() };
        let mut seen = vec![];
        p.run(&[0.0, 0.5, 1.5], &mut StreamId::new(0, 0).rng(), |pt| {
            if let PathPoint::Grid { x, .. } = pt {
                seen.push(x);
            }
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn early_stop() {
        let p = ProcessSpec { drift: 1.0, ..Default::default() };
        let mut n = 0;
        p.run(&[0.0, 1.0, 2.0, 3.0], &mut StreamId::new(0, 0).rng(), |_| {
            n += 1;
            if n == 2 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        assert_eq!(n, 2);
    }
}

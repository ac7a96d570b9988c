//! Inverse-CDF tables for one-sided jump laws with finite mass.

use rand::RngCore;

use crate::error::{domain, Result};
use crate::quad::gk15;
use crate::rng::open01;

const KNOTS: usize = 4096;
/// Fraction of the mass left to the Pareto extrapolation beyond the last knot.
const TAIL_FRACTION: f64 = 1e-12;

/// Monotone table of the cumulative jump mass on log-spaced knots; `ln y` is
/// interpolated linearly in the cumulative mass. Beyond the last knot the
/// law is continued as a Pareto tail with index `tail_alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTable {
    ln_knots: Vec<f64>,
    cumulative: Vec<f64>,
    tail_mass: f64,
    tail_alpha: f64,
    total: f64,
}

impl JumpTable {
    /// Tabulates `density` on `[lo, hi]`, or on `[lo, ∞)` when `hi` is `None`.
    /// A knot is placed at `y = 1` whenever it is interior, since the
    /// densities used here switch weights there.
    pub fn build<F: Fn(f64) -> f64>(density: F, lo: f64, hi: Option<f64>, tail_alpha: f64) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite()) {
            return domain(format!("jump table needs a positive lower end, got {lo}"));
        }
        let y_max = match hi {
            Some(h) if h > lo => h,
            Some(h) => return domain(format!("jump table range [{lo}, {h}] is empty")),
            None => far_end(&density, lo, tail_alpha),
        };
        let ln_knots = knots(lo.ln(), y_max.ln());
        let g = |s: f64| {
            let y = s.exp();
            density(y) * y
        };
        let mut cumulative = Vec::with_capacity(ln_knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in ln_knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            acc += gk15(&g, w[0], mid).0 + gk15(&g, mid, w[1]).0;
            cumulative.push(acc);
        }
        let tail_mass = if hi.is_some() { 0.0 } else { density(y_max) * y_max / tail_alpha };
        Ok(Self { ln_knots, cumulative, tail_mass, tail_alpha, total: acc + tail_mass })
    }

    /// Total tabulated mass (the compound-Poisson rate).
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Smallest representable jump size.
    pub fn lower(&self) -> f64 {
        self.ln_knots[0].exp()
    }

    /// Jump size with cumulative mass `u · total`, `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let m = u * self.total;
        let last = *self.cumulative.last().unwrap();
        if m >= last {
            let y_max = self.ln_knots.last().unwrap().exp();
            let remaining = (self.total - m).max(f64::MIN_POSITIVE);
            if self.tail_mass == 0.0 {
                return y_max;
            }
            return y_max * (self.tail_mass / remaining).powf(1.0 / self.tail_alpha);
        }
        let i = self.cumulative.partition_point(|&c| c <= m).clamp(1, self.cumulative.len() - 1) - 1;
        let (c0, c1) = (self.cumulative[i], self.cumulative[i + 1]);
        let frac = if c1 > c0 { (m - c0) / (c1 - c0) } else { 0.0 };
        (self.ln_knots[i] + frac * (self.ln_knots[i + 1] - self.ln_knots[i])).exp()
    }

    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }
}

/// Point beyond which a Pareto continuation holds less than `TAIL_FRACTION`
/// of the mass.
fn far_end<F: Fn(f64) -> f64>(density: &F, lo: f64, tail_alpha: f64) -> f64 {
    let head = density(lo) * lo / tail_alpha;
    let mut y = lo.max(1.0) * 2.0;
    while density(y) * y / tail_alpha > TAIL_FRACTION * head && y < 1e300 {
        y *= 2.0;
    }
    y
}

fn knots(a: f64, b: f64) -> Vec<f64> {
    let n = KNOTS - 1;
    if a < 0.0 && b > 0.0 {
        // split the budget proportionally so that ln y = 0 is a knot
        let left = (((-a) / (b - a)) * n as f64).round().clamp(1.0, (n - 1) as f64) as usize;
        let right = n - left;
        let mut v: Vec<f64> = (0..left).map(|i| a + (0.0 - a) * i as f64 / left as f64).collect();
        v.extend((0..=right).map(|i| b * i as f64 / right as f64));
        v
    } else {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_quantiles() {
        // density y^{-1.5} on [1, ∞): mass 2, quantile (1-u)^{-2}
        let t = JumpTable::build(|y: f64| y.powf(-1.5), 1.0, None, 0.5).unwrap();
        assert!((t.total() - 2.0).abs() < 1e-9, "{}", t.total());
        for u in [0.01f64, 0.3, 0.5, 0.9, 0.999] {
            let exact = (1.0 - u).powf(-2.0);
            assert!(((t.quantile(u) - exact) / exact).abs() < 1e-4, "u={u}");
        }
    }

    #[test]
    fn bounded_range_and_knot_at_one() {
        let t = JumpTable::build(|y: f64| if y <= 1.0 { 1.0 / y } else { 0.5 / y }, 1e-3, Some(10.0), 1.0).unwrap();
        let exact = (1e3f64).ln() + 0.5 * 10f64.ln();
        assert!((t.total() - exact).abs() < 1e-10);
        assert!(t.ln_knots.contains(&0.0));
        let u1 = (1e3f64).ln() / exact;
        assert!((t.quantile(u1) - 1.0).abs() < 1e-9);
        assert!(t.quantile(0.999_999) <= 10.0 + 1e-9);
    }
}

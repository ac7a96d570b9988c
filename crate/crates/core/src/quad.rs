//! Numerical integration: adaptive Gauss–Kronrod on finite intervals,
//! log-substituted integrals over `[a, ∞)` for power-law densities, and
//! Wynn's ε-algorithm for oscillatory tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae, descending; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 4000 }
    }
}

impl QuadOptions {
    /// Tolerances tightened by a factor of `1e-4`, used for cross-checks.
    pub fn refined(self) -> Self {
        Self { abs_tol: self.abs_tol * 1e-4, rel_tol: self.rel_tol * 1e-4, max_intervals: self.max_intervals * 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Gauss–Kronrod pass on `[a, b]`: returns (kronrod, |kronrod − gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0 };
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) && heap.len() < opts.max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed the accumulated cancellation of the running updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    QuadResult { value, error }
}

/// Integrates a density `f(y)` over `[a, ∞)`, `a > 0`, via `y = e^s`.
///
/// The upper limit in `s` is advanced until the transformed integrand drops
/// below `1e-16` of its value at the left endpoint.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> QuadResult {
    debug_assert!(a > 0.0);
    let g = |s: f64| {
        let y = s.exp();
        f(y) * y
    };
    let s0 = a.ln();
    let cutoff = truncation_point(&g, s0);
    integrate(g, s0, cutoff, opts)
}

/// First `s ≥ s0 + 1` (in unit steps) where `|g(s)| < 1e-16 |g(s0)|` and the
/// integrand is decreasing.
pub(crate) fn truncation_point<G: Fn(f64) -> f64>(g: &G, s0: f64) -> f64 {
    let head = g(s0).abs();
    if head == 0.0 || !head.is_finite() {
        return s0 + 1.0;
    }
    let mut s = s0 + 1.0;
    let mut prev = g(s).abs();
    // 2000 e-folds covers any index above 0.02
    for _ in 0..2000 {
        let next = g(s + 1.0).abs();
        if prev < 1e-16 * head && next <= prev {
            return s;
        }
        prev = next;
        s += 1.0;
    }
    s
}

/// Wynn's ε-algorithm applied to a sequence of partial sums; returns the
/// last even-column estimate with the smallest change.
pub fn wynn_epsilon(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    if n < 3 {
        return partial_sums.last().copied().unwrap_or(0.0);
    }
    // columns stored as rows of decreasing length
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = *partial_sums.last().unwrap();
    let mut best_delta = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut column = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let inv = if diff == 0.0 { f64::INFINITY } else { 1.0 / diff };
            next.push(prev[i + 1] + inv);
        }
        column += 1;
        if column.is_multiple_of(2) && next.len() >= 2 {
            let k = next.len();
            let delta = (next[k - 1] - next[k - 2]).abs();
            if next[k - 1].is_finite() && delta < best_delta {
                best = next[k - 1];
                best_delta = delta;
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Composite Simpson rule with `panels` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default());
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, QuadOptions::default());
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn power_tail() {
        let r = integrate_to_infinity(|y: f64| y.powf(-1.5), 1.0, QuadOptions::default());
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut sums = Vec::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            sums.push(s);
        }
        assert!((wynn_epsilon(&sums) - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn simpson_sine() {
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 1000);
        assert!((v - 2.0).abs() < 1e-10);
    }
}

//! Shape diagnostics for sampled sweep curves.

use serde::Serialize;

/// Counts of midpoint-convexity and midpoint-concavity violations over all
/// equally spaced index triples `(k - h, k, k + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MidpointViolations {
    /// `f(k) > (f(k-h) + f(k+h)) / 2 + tol`
    pub convexity: usize,
    /// `f(k) < (f(k-h) + f(k+h)) / 2 - tol`
    pub concavity: usize,
}

impl MidpointViolations {
    /// Neither convex nor concave on the sampled points.
    pub fn neither(&self) -> bool {
        self.convexity > 0 && self.concavity > 0
    }
}

pub fn midpoint_violations(values: &[f64], tol: f64) -> MidpointViolations {
    let n = values.len();
    let mut out = MidpointViolations { convexity: 0, concavity: 0 };
    for k in 1..n.saturating_sub(1) {
        for h in 1..=k.min(n - 1 - k) {
            let mid = 0.5 * (values[k - h] + values[k + h]);
            if values[k] > mid + tol {
                out.convexity += 1;
            } else if values[k] < mid - tol {
                out.concavity += 1;
            }
        }
    }
    out
}

/// One-sided secant slopes next to `gamma = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeGap {
    pub left_slope: f64,
    pub right_slope: f64,
    /// Spread (max - min) of consecutive secant slopes on each side.
    pub left_variation: f64,
    pub right_variation: f64,
}

impl SlopeGap {
    pub fn jump(&self) -> f64 {
        (self.right_slope - self.left_slope).abs()
    }

    /// The slope jump exceeds `factor` times the larger within-side spread.
    pub fn is_kink(&self, factor: f64) -> bool {
        self.jump() > factor * self.left_variation.max(self.right_variation)
    }
}

fn secants(pts: &[(f64, f64)]) -> Vec<f64> {
    pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Compare secant slopes over the `per_side` grid points closest to zero on
/// each side (zero itself excluded). `gammas` must be ascending. Returns
/// `None` when a side has fewer than two points.
pub fn slope_gap_at_zero(gammas: &[f64], values: &[f64], per_side: usize) -> Option<SlopeGap> {
    assert_eq!(gammas.len(), values.len());
    let split = gammas.partition_point(|&g| g < 0.0);
    let right_start = gammas[split..].iter().position(|&g| g > 0.0).map(|o| split + o)?;

    let left: Vec<(f64, f64)> = (split.saturating_sub(per_side)..split).map(|k| (gammas[k], values[k])).collect();
    let right: Vec<(f64, f64)> =
        (right_start..(right_start + per_side).min(gammas.len())).map(|k| (gammas[k], values[k])).collect();
    if left.len() < 2 || right.len() < 2 {
        return None;
    }
    let (sl, sr) = (secants(&left), secants(&right));
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Some(SlopeGap {
        left_slope: mean(&sl),
        right_slope: mean(&sr),
        left_variation: spread(&sl),
        right_variation: spread(&sr),
    })
}

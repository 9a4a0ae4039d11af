//! Confidence floors for mutual information estimated from counts.
//!
//! With probability at least `1 - delta` the empirical joint distribution of
//! `n` samples over `K` outcomes lies within L1 distance `eps(n, K, delta)` of
//! the true one, where
//!
//! ```text
//! P(||p_hat - p||_1 >= eps) <= (2^K - 2) exp(-n eps^2 / 2)
//! ```
//!
//! Any lower bound on the mutual information over that ball therefore holds
//! for the true distribution with the same probability.

use serde::Serialize;

use crate::dist::{mutual_information, InfoValue, JointDist, Mat2, ValidationPolicy};
use crate::error::{Error, Result};
use crate::solver::SolverConfig;
use crate::sweep::{lower_bound, BoundReport};

/// Observed 2 x M_y contingency table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsTable {
    rows: [Vec<u64>; 2],
    n: u64,
}

impl CountsTable {
    pub fn new(first: Vec<u64>, second: Vec<u64>) -> Result<Self> {
        if first.is_empty() || first.len() != second.len() {
            return Err(Error::Shape(format!("count rows of length {} and {}", first.len(), second.len())));
        }
        let n = first
            .iter()
            .chain(&second)
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidParameter("total count overflows u64".into()))?;
        if n == 0 {
            return Err(Error::ZeroTotal);
        }
        Ok(Self { rows: [first, second], n })
    }

    /// Parse the plain-text format: two non-empty lines of whitespace-separated
    /// nonnegative integers with equal counts per line.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != 2 {
            return Err(Error::Parse(format!("expected 2 non-empty lines, found {}", lines.len())));
        }
        let parse_line = |(idx, line): (usize, &&str)| -> Result<Vec<u64>> {
            line.split_whitespace()
                .map(|tok| tok.parse::<u64>().map_err(|e| Error::Parse(format!("line {}: {tok:?}: {e}", idx + 1))))
                .collect()
        };
        let mut it = lines.iter().enumerate().map(parse_line);
        let first = it.next().expect("two lines")?;
        let second = it.next().expect("two lines")?;
        Self::new(first, second)
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn my(&self) -> usize {
        self.rows[0].len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let scale = |row: &[u64]| -> Result<Vec<u64>> {
            row.iter()
                .map(|&c| c.checked_mul(factor).ok_or_else(|| Error::InvalidParameter("count overflow".into())))
                .collect()
        };
        Self::new(scale(&self.rows[0])?, scale(&self.rows[1])?)
    }
}

/// Empirical joint distribution `counts / n`.
pub fn empirical_joint(c: &CountsTable) -> Result<(JointDist, u64)> {
    if c.n == 0 {
        return Err(Error::ZeroTotal);
    }
    let n = c.n as f64;
    let data = c.rows.iter().flatten().map(|&v| v as f64 / n).collect();
    let m = Mat2::from_flat(data, c.my())?;
    // Exact up to rounding of the divisions, which stays far inside SUM_TOL.
    let j = JointDist::new(&m.to_rows(), ValidationPolicy::Strict)?;
    Ok((j, c.n))
}

/// Sample size `n`, outcome count `K` and failure probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceSpec {
    pub delta: f64,
    pub k: usize,
    pub n: u64,
}

impl ConfidenceSpec {
    pub fn new(delta: f64, k: usize, n: u64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
        }
        if k < 2 {
            return Err(Error::InvalidParameter(format!("alphabet size must be at least 2, got {k}")));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        Ok(Self { delta, k, n })
    }
}

/// `ln(2^K - 2)`, without forming `2^K` for large `K`.
fn ln_pow2_minus_two(k: usize) -> f64 {
    if k <= 60 {
        (((1u64 << k) - 2) as f64).ln()
    } else {
        k as f64 * std::f64::consts::LN_2 + (-(2f64).powi(1 - k as i32)).ln_1p()
    }
}

/// L1 radius `min(2, sqrt((2 / n) ln((2^K - 2) / delta)))`.
pub fn epsilon_for_confidence(spec: &ConfidenceSpec) -> f64 {
    let log_term = ln_pow2_minus_two(spec.k) - spec.delta.ln();
    (2.0 / spec.n as f64 * log_term).sqrt().min(2.0)
}

#[derive(Debug, Clone)]
pub struct ConfidenceReport {
    pub i_hat: InfoValue,
    pub eps: f64,
    pub spec: ConfidenceSpec,
    pub bound: BoundReport,
}

impl ConfidenceReport {
    /// Lower end of the confidence interval.
    pub fn floor(&self) -> InfoValue {
        self.bound.bound
    }
}

/// Empirical mutual information, the radius for `K = 2 M_y` and the bound
/// over that ball.
pub fn mi_confidence_floor(
    c: &CountsTable,
    delta: f64,
    n_points: usize,
    cfg: &SolverConfig,
) -> Result<ConfidenceReport> {
    let (p_hat, n) = empirical_joint(c)?;
    let spec = ConfidenceSpec::new(delta, 2 * c.my(), n)?;
    let eps = epsilon_for_confidence(&spec);
    let bound = lower_bound(&p_hat, eps, n_points, cfg)?;
    Ok(ConfidenceReport { i_hat: mutual_information(&p_hat), eps, spec, bound })
}

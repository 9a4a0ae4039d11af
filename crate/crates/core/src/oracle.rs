//! Brute-force reference minimizers and random feasible points, for checking
//! the Frank–Wolfe solver and the sweep on small instances. Nothing here is
//! used by [`crate::sweep::lower_bound`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::dist::{l1_distance, marginal_x, InfoValue, JointDist, Mat2, LOG_ZERO};
use crate::error::{Error, Result};
use crate::solver::{feasible_init, InnerProblem};
use crate::sweep::qx_of_gamma;

/// Largest `M_y` the exhaustive search accepts.
pub const MAX_BRUTE_COLUMNS: usize = 3;

const FEAS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid step for exhaustive search.
    pub resolution: f64,
    /// Number of random feasible points drawn by consumers that sample.
    pub samples: usize,
    pub seed: u64,
}

impl OracleConfig {
    /// Default resolution: `1e-3` for two columns, `5e-3` otherwise.
    pub fn for_columns(my: usize) -> Self {
        let resolution = if my <= 2 { 1e-3 } else { 5e-3 };
        Self { resolution, samples: 1000, seed: 42 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution <= 0.1) {
            return Err(Error::InvalidParameter(format!("resolution must lie in (0, 0.1], got {}", self.resolution)));
        }
        if self.samples < 1 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Minimum found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub value: InfoValue,
    pub argmin: JointDist,
    /// Worst-case excess of `value` over the true minimum attributable to
    /// grid quantization, in nats.
    pub slack: f64,
    /// Feasible grid points evaluated.
    pub evaluated: usize,
    /// Offset of the best marginal (`brute_force_bound` only; zero otherwise).
    pub gamma: f64,
}

/// `n` random feasible points for `prob`, deterministic in `seed`.
///
/// Rows are drawn as scaled Dirichlet vectors (alternating flat and sparse
/// concentration) and blended towards the rescaled reference until the L1
/// constraint holds; half of the draws land on the constraint boundary.
pub fn random_feasible(prob: &InnerProblem, n: usize, seed: u64) -> Vec<JointDist> {
    let anchor = feasible_init(prob).expect("InnerProblem guarantees a feasible anchor");
    let my = prob.p().my();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat = Gamma::new(1.0, 1.0).expect("valid shape");
    let sparse = Gamma::new(0.3, 1.0).expect("valid shape");

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let dist = if k % 2 == 0 { &flat } else { &sparse };
        let mut raw = Mat2::zeros(my);
        for i in 0..2 {
            let row = raw.row_mut(i);
            row.iter_mut().for_each(|v| *v = dist.sample(&mut rng));
            let total: f64 = row.iter().sum();
            let target = prob.qx().get(i);
            if total > 0.0 {
                row.iter_mut().for_each(|v| *v *= target / total);
            } else {
                row.fill(target / my as f64);
            }
        }
        let blended = |lambda: f64, k: usize| {
            let (a, r) = (anchor.as_slice()[k], raw.as_slice()[k]);
            (a + lambda * (r - a)).max(0.0)
        };
        let fits = |lambda: f64| {
            let dist: f64 = (0..2 * my).map(|k| (blended(lambda, k) - prob.p().as_slice()[k]).abs()).sum();
            dist <= prob.eps()
        };

        // Largest lambda in [0, 1] keeping the blend feasible; the L1 distance
        // is convex in lambda and feasible at 0.
        let mut lambda_max = 1.0;
        if !fits(1.0) {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lambda_max = lo;
        }
        let lambda = if rng.random_bool(0.5) { lambda_max } else { lambda_max * rng.random::<f64>() };
        let candidate = Mat2::from_flat((0..2 * my).map(|k| blended(lambda, k)).collect(), my).expect("shape");
        let q = if fits(lambda) { candidate } else { anchor.values().clone() };
        out.push(JointDist::from_mat_unchecked(q));
    }
    out
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x <= LOG_ZERO {
        0.0
    } else {
        x * x.ln()
    }
}

fn binary_entropy(t: f64) -> f64 {
    -xlogx(t) - xlogx(1.0 - t)
}

/// Continuity bound for `I = H(X) + H(Y) - H(X, Y)` with `H(X)` fixed when
/// the joint moves by at most `l1` in L1 distance (Fannes–Audenaert, applied
/// to `H(Y)` and `H(X, Y)`).
fn continuity_slack(l1: f64, my: usize) -> f64 {
    let t = (0.5 * l1).min(0.5);
    let term = |k: usize| t * ((k.max(2) - 1) as f64).ln() + binary_entropy(t);
    term(my) + term(2 * my)
}

struct RowPoint {
    values: Vec<f64>,
    cost: f64,
    neg_entropy: f64,
}

/// All grid points of row `i` whose own L1 cost fits in `budget`. The grid is
/// anchored at `anchor` so the anchor row itself is always included.
fn row_points(p_row: &[f64], anchor: &[f64], target: f64, budget: f64, h: f64) -> Vec<RowPoint> {
    let my = p_row.len();
    let free = my - 1;
    let mut out = Vec::new();

    // Integer offset range for free coordinate j.
    let range = |j: usize| {
        let lo_val = (p_row[j] - budget).max(0.0);
        let hi_val = (p_row[j] + budget).min(target);
        let lo = ((lo_val - anchor[j]) / h - 1e-9).ceil() as i64;
        let hi = ((hi_val - anchor[j]) / h + 1e-9).floor() as i64;
        (lo, hi)
    };

    let mut push = |coords: &[f64]| {
        let used: f64 = coords.iter().sum();
        let mut last = target - used;
        if last < 0.0 {
            if last < -1e-12 {
                return;
            }
            last = 0.0;
        }
        let mut values = coords.to_vec();
        values.push(last);
        let cost = l1_distance(&values, p_row).expect("shape");
        if cost <= budget + FEAS_EPS {
            let neg_entropy = values.iter().map(|&v| xlogx(v)).sum();
            out.push(RowPoint { values, cost, neg_entropy });
        }
    };

    match free {
        0 => push(&[]),
        1 => {
            let (lo, hi) = range(0);
            for k in lo..=hi {
                let c = (anchor[0] + k as f64 * h).max(0.0);
                push(&[c]);
            }
        }
        2 => {
            let (lo0, hi0) = range(0);
            let (lo1, hi1) = range(1);
            for k0 in lo0..=hi0 {
                let c0 = (anchor[0] + k0 as f64 * h).max(0.0);
                for k1 in lo1..=hi1 {
                    let c1 = (anchor[1] + k1 as f64 * h).max(0.0);
                    push(&[c0, c1]);
                }
            }
        }
        _ => unreachable!("guarded by MAX_BRUTE_COLUMNS"),
    }
    out
}

/// Exhaustive grid search for the inner minimum (`M_y <= 3`).
pub fn brute_force_inner(prob: &InnerProblem, cfg: &OracleConfig) -> Result<BruteForceResult> {
    cfg.validate()?;
    let my = prob.p().my();
    if my > MAX_BRUTE_COLUMNS {
        return Err(Error::DimensionGuard { my });
    }
    let anchor = feasible_init(prob)?;
    let eps = prob.eps();
    let (qx, px) = (prob.qx(), prob.px());
    let base = [(qx.get(0) - px.get(0)).abs(), (qx.get(1) - px.get(1)).abs()];
    let h = cfg.resolution;

    let rows: Vec<Vec<RowPoint>> = (0..2)
        .map(|i| {
            let budget = (eps - base[1 - i]).max(0.0);
            row_points(prob.p().row(i), anchor.row(i), qx.get(i), budget, h)
        })
        .collect();
    let mut second: Vec<&RowPoint> = rows[1].iter().collect();
    second.sort_by(|a, b| a.cost.total_cmp(&b.cost));

    let const_term = xlogx(qx.get(0)) + xlogx(qx.get(1));

    // (value, index in rows[0], index in `second`, evaluated count)
    let best = rows[0]
        .par_iter()
        .enumerate()
        .map(|(a_idx, a)| {
            let mut best = (f64::INFINITY, usize::MAX, usize::MAX, 0usize);
            for (b_idx, b) in second.iter().enumerate() {
                if a.cost + b.cost > eps + FEAS_EPS {
                    break;
                }
                let cols: f64 = a.values.iter().zip(&b.values).map(|(x, y)| xlogx(x + y)).sum();
                let value = a.neg_entropy + b.neg_entropy - cols - const_term;
                best.3 += 1;
                if value < best.0 {
                    best = (value, a_idx, b_idx, best.3);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX, 0),
            |x, y| {
                let count = x.3 + y.3;
                let keep_x = x.0 < y.0 || (x.0 == y.0 && (x.1, x.2) <= (y.1, y.2));
                let w = if keep_x { x } else { y };
                (w.0, w.1, w.2, count)
            },
        );

    let (value, a_idx, b_idx, evaluated) = best;
    if a_idx == usize::MAX {
        // The anchor is always on the grid, so this only fires on round-off.
        return Err(Error::Infeasible { marginal_distance: base[0] + base[1], eps });
    }
    let data: Vec<f64> = rows[0][a_idx].values.iter().chain(&second[b_idx].values).copied().collect();
    let argmin = JointDist::from_mat_unchecked(Mat2::from_flat(data, my)?);
    // Rounding a minimizer to the grid moves each free coordinate by at most
    // h and the dependent one by at most (M_y - 1) h, in each row.
    let slack = continuity_slack(4.0 * (my.max(2) - 1) as f64 * h, my);
    Ok(BruteForceResult { value: InfoValue::from_nats(value.max(0.0)), argmin, slack, evaluated, gamma: 0.0 })
}

/// Minimum of [`brute_force_inner`] over offsets `gamma` in `[-eps/2, eps/2]`
/// sampled at the same resolution (endpoints and zero included).
pub fn brute_force_bound(p: &JointDist, eps: f64, cfg: &OracleConfig) -> Result<BruteForceResult> {
    cfg.validate()?;
    if p.my() > MAX_BRUTE_COLUMNS {
        return Err(Error::DimensionGuard { my: p.my() });
    }
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps must lie in [0, 2], got {eps}")));
    }
    let half = 0.5 * eps;
    let steps = (half / cfg.resolution).floor() as i64;
    let mut gammas: Vec<f64> = (-steps..=steps).map(|k| k as f64 * cfg.resolution).collect();
    if half > 0.0 {
        gammas.insert(0, -half);
        gammas.push(half);
    }
    gammas.dedup();

    let px = marginal_x(p);
    let mut best: Option<BruteForceResult> = None;
    let mut evaluated = 0;
    for gamma in gammas {
        let prob = InnerProblem::new(p.clone(), qx_of_gamma(&px, gamma), eps)?;
        let mut r = brute_force_inner(&prob, cfg)?;
        evaluated += r.evaluated;
        r.gamma = gamma;
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one offset");
    best.evaluated = evaluated;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{mutual_information, product, MarginalX, MarginalY, ValidationPolicy};

    fn ex1() -> JointDist {
        JointDist::new(&[[0.017, 0.285], [0.424, 0.274]], ValidationPolicy::Strict).unwrap()
    }

    #[test]
    fn random_points_are_feasible() {
        let p = JointDist::new(&[[0.1, 0.25, 0.05], [0.3, 0.2, 0.1]], ValidationPolicy::Strict).unwrap();
        let prob = InnerProblem::new(p, MarginalX::new([0.35, 0.65]).unwrap(), 0.25).unwrap();
        let pts = random_feasible(&prob, 500, 7);
        assert_eq!(pts.len(), 500);
        for q in &pts {
            assert!(prob.is_feasible(q, 1e-12, 0.0));
        }
        let on_boundary =
            pts.iter().filter(|q| l1_distance(q.as_slice(), prob.p().as_slice()).unwrap() > 0.25 - 1e-9).count();
        assert!(on_boundary > 100);
    }

    #[test]
    fn random_points_deterministic_and_trivial_at_zero_radius() {
        let p = ex1();
        let prob = InnerProblem::new(p.clone(), marginal_x(&p), 0.2).unwrap();
        assert_eq!(random_feasible(&prob, 20, 42), random_feasible(&prob, 20, 42));
        assert_ne!(random_feasible(&prob, 20, 42), random_feasible(&prob, 20, 43));

        let prob = InnerProblem::new(p.clone(), marginal_x(&p), 0.0).unwrap();
        assert!(random_feasible(&prob, 10, 1).iter().all(|q| *q == p));
    }

    #[test]
    fn brute_inner_endpoints() {
        let p = ex1();
        let cfg = OracleConfig::for_columns(2);
        let prob = InnerProblem::new(p.clone(), marginal_x(&p), 0.0).unwrap();
        let r = brute_force_inner(&prob, &cfg).unwrap();
        assert!((r.value.nats() - mutual_information(&p).nats()).abs() < 1e-15);
        assert_eq!(r.evaluated, 1);

        let prob = InnerProblem::new(p.clone(), MarginalX::new([0.5, 0.5]).unwrap(), 2.0).unwrap();
        let r = brute_force_inner(&prob, &cfg).unwrap();
        assert!(r.value.nats() <= r.slack);
        assert!(r.value.nats() < 1e-5);
    }

    #[test]
    fn dimension_guard() {
        let p = JointDist::new(&[[0.1, 0.1, 0.1, 0.2], [0.1, 0.1, 0.1, 0.2]], ValidationPolicy::Strict).unwrap();
        let prob = InnerProblem::new(p.clone(), marginal_x(&p), 0.1).unwrap();
        let cfg = OracleConfig::for_columns(4);
        assert_eq!(brute_force_inner(&prob, &cfg).unwrap_err(), Error::DimensionGuard { my: 4 });
        assert_eq!(brute_force_bound(&p, 0.1, &cfg).unwrap_err(), Error::DimensionGuard { my: 4 });
    }

    #[test]
    fn brute_bound_endpoints() {
        let p = ex1();
        let cfg = OracleConfig { resolution: 5e-3, ..OracleConfig::for_columns(2) };
        let r = brute_force_bound(&p, 0.0, &cfg).unwrap();
        assert!((r.value.nats() - mutual_information(&p).nats()).abs() < 1e-15);

        let prod = product(&MarginalX::new([0.3, 0.7]).unwrap(), &MarginalY::new(vec![0.6, 0.4]).unwrap());
        let r = brute_force_bound(&prod, 0.2, &cfg).unwrap();
        assert!(r.value.nats() < 1e-15);
    }

    #[test]
    fn slack_shrinks_with_resolution() {
        assert!(continuity_slack(4e-3, 2) < continuity_slack(4e-2, 2));
        assert!(continuity_slack(0.0, 3) == 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = OracleConfig { resolution: 0.5, ..OracleConfig::for_columns(2) };
        assert!(bad.validate().is_err());
        let bad = OracleConfig { samples: 0, ..OracleConfig::for_columns(2) };
        assert!(bad.validate().is_err());
    }
}

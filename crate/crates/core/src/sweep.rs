//! Outer minimization over the binary marginal.
//!
//! Since `V(q_X, p_X) <= V(q_XY, p_XY) <= eps`, only marginals within L1
//! distance `eps` of `p_X` matter. For binary `X` these form a segment
//! parameterized by a single offset `gamma` in `[-eps/2, eps/2]`; the bound
//! is the smallest inner minimum over an equidistant grid on that segment.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{marginal_x, mutual_information, InfoValue, JointDist, MarginalX};
use crate::error::{Error, Result};
use crate::solver::{inner_minimize, InnerProblem, InnerResult, SolveStatus, SolverConfig};

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 1000;

/// Largest change of the bound, in bits, under grid doubling for which the
/// grid is considered fine enough.
pub const REFINE_TOL_BITS: f64 = 1e-4;

/// Equidistant offsets spanning `[-eps/2, eps/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaGrid {
    eps: f64,
    points: Vec<f64>,
}

impl GammaGrid {
    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=2.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps must lie in [0, 2], got {eps}")))
    }
}

/// Grid of `n_points` offsets; a single point at zero when `n_points == 1` or
/// `eps == 0`. Points at mirrored indices are exact negatives of each other.
pub fn make_grid(eps: f64, n_points: usize) -> Result<GammaGrid> {
    check_eps(eps)?;
    if n_points == 0 {
        return Err(Error::InvalidParameter("n_points must be at least 1".into()));
    }
    if n_points == 1 || eps == 0.0 {
        return Ok(GammaGrid { eps, points: vec![0.0] });
    }
    let last = (n_points - 1) as f64;
    let points = (0..n_points).map(|k| eps * (2.0 * k as f64 - last) / (2.0 * last)).collect();
    Ok(GammaGrid { eps, points })
}

/// `q_X = (p_X(1) + gamma, p_X(2) - gamma)`, clamped to `[0, 1]`.
pub fn qx_of_gamma(px: &MarginalX, gamma: f64) -> MarginalX {
    MarginalX([(px.get(0) + gamma).clamp(0.0, 1.0), (px.get(1) - gamma).clamp(0.0, 1.0)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Converged,
    IterCap,
    Failed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Converged => "converged",
            PointStatus::IterCap => "itercap",
            PointStatus::Failed => "failed",
        }
    }
}

/// One grid evaluation. A solver error is kept on the point rather than
/// aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: f64,
    pub qx: MarginalX,
    pub result: std::result::Result<InnerResult, Error>,
}

impl SweepPoint {
    pub fn value(&self) -> Option<InfoValue> {
        self.result.as_ref().ok().map(|r| r.value)
    }

    pub fn gap(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.gap)
    }

    pub fn argmin(&self) -> Option<&JointDist> {
        self.result.as_ref().ok().map(|r| &r.argmin)
    }

    pub fn status(&self) -> PointStatus {
        match &self.result {
            Ok(r) if r.status == SolveStatus::Converged => PointStatus::Converged,
            Ok(_) => PointStatus::IterCap,
            Err(_) => PointStatus::Failed,
        }
    }
}

fn solve_point(p: &JointDist, px: &MarginalX, eps: f64, gamma: f64, cfg: &SolverConfig) -> SweepPoint {
    let qx = qx_of_gamma(px, gamma);
    let result = InnerProblem::new(p.clone(), qx, eps).and_then(|prob| inner_minimize(&prob, cfg));
    SweepPoint { gamma, qx, result }
}

/// Solve the inner problem at every grid offset. Points are evaluated in
/// parallel and returned in grid order.
pub fn sweep(p: &JointDist, eps: f64, grid: &GammaGrid, cfg: &SolverConfig) -> Result<Vec<SweepPoint>> {
    check_eps(eps)?;
    cfg.validate()?;
    if grid.eps != eps {
        return Err(Error::InvalidParameter(format!(
            "grid was built for eps = {}, sweep called with eps = {eps}",
            grid.eps
        )));
    }
    let px = marginal_x(p);
    Ok(grid.points.par_iter().map(|&gamma| solve_point(p, &px, eps, gamma, cfg)).collect())
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub eps: f64,
    /// Smallest mutual information found; never above `i_of_p`.
    pub bound: InfoValue,
    pub arg_gamma: f64,
    pub argmin: JointDist,
    pub curve: Vec<SweepPoint>,
    pub i_of_p: InfoValue,
    /// False when a point that failed or hit the iteration cap could still
    /// hold a value below the reported bound.
    pub certified: bool,
}

impl BoundReport {
    /// Smallest certified lower end `value - gap` over the curve, in nats.
    pub fn certified_floor(&self) -> Option<f64> {
        self.curve
            .iter()
            .filter_map(|pt| pt.result.as_ref().ok().map(|r| (r.value.nats() - r.gap).max(0.0)))
            .reduce(f64::min)
    }
}

/// Sweep `n_points` offsets and return the smallest inner minimum.
pub fn lower_bound(p: &JointDist, eps: f64, n_points: usize, cfg: &SolverConfig) -> Result<BoundReport> {
    let grid = make_grid(eps, n_points)?;
    let curve = sweep(p, eps, &grid, cfg)?;
    let i_of_p = mutual_information(p);

    let mut best: Option<(usize, f64)> = None;
    for (k, pt) in curve.iter().enumerate() {
        if let Some(v) = pt.value() {
            if best.is_none_or(|(_, b)| v.nats() < b) {
                best = Some((k, v.nats()));
            }
        }
    }
    let (arg, best_nats) = match best {
        Some(b) => b,
        None => {
            return Err(curve
                .into_iter()
                .find_map(|pt| pt.result.err())
                .unwrap_or_else(|| Error::InvalidParameter("empty grid".into())))
        }
    };

    let certified = curve.iter().all(|pt| match &pt.result {
        Ok(r) if r.status == SolveStatus::Converged => true,
        Ok(r) => r.value.nats() - r.gap > best_nats,
        Err(_) => false,
    });

    // q = p is always feasible; only matters when the grid skips gamma = 0.
    let (bound, arg_gamma, argmin) = if i_of_p.nats() < best_nats {
        (i_of_p, 0.0, p.clone())
    } else {
        let pt = &curve[arg];
        (InfoValue::from_nats(best_nats), pt.gamma, pt.argmin().cloned().expect("point has a value"))
    };

    Ok(BoundReport { eps, bound, arg_gamma, argmin, curve, i_of_p, certified })
}

/// Result of comparing the bound at `n` and `2n` grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineCheck {
    pub n_points: usize,
    pub bound_bits: f64,
    pub refined_bound_bits: f64,
    pub change_bits: f64,
    pub sufficient: bool,
}

pub fn refine_check(p: &JointDist, eps: f64, n_points: usize, cfg: &SolverConfig) -> Result<RefineCheck> {
    let coarse = lower_bound(p, eps, n_points, cfg)?;
    let fine = lower_bound(p, eps, 2 * n_points, cfg)?;
    Ok(refine_from(&coarse, &fine, n_points))
}

/// Compare two reports computed on `n_points` and `2 * n_points` offsets.
pub fn refine_from(coarse: &BoundReport, fine: &BoundReport, n_points: usize) -> RefineCheck {
    let change_bits = (coarse.bound.bits() - fine.bound.bits()).abs();
    RefineCheck {
        n_points,
        bound_bits: coarse.bound.bits(),
        refined_bound_bits: fine.bound.bits(),
        change_bits,
        sufficient: change_bits < REFINE_TOL_BITS,
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "gamma,I_bits,I_nats,gap_nats,status";

/// Write the curve as CSV, one row per grid point in ascending `gamma`.
pub fn write_curve_csv<W: Write>(curve: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for pt in curve {
        let (bits, nats, gap) = match &pt.result {
            Ok(r) => (r.value.bits(), r.value.nats(), r.gap),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig(pt.gamma, 12),
            format_sig(bits, 12),
            format_sig(nats, 12),
            format_sig(gap, 12),
            pt.status().as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ValidationPolicy;

    fn ex1() -> JointDist {
        JointDist::new(&[[0.017, 0.285], [0.424, 0.274]], ValidationPolicy::Strict).unwrap()
    }

    #[test]
    fn qx_offsets() {
        let px = MarginalX::new([0.302, 0.698]).unwrap();
        assert_eq!(qx_of_gamma(&px, 0.0), px);
        let q = qx_of_gamma(&px, 0.15);
        assert!((q.get(0) - 0.452).abs() < 1e-15 && (q.get(1) - 0.548).abs() < 1e-15);
        let px = MarginalX::new([0.9, 0.1]).unwrap();
        assert_eq!(qx_of_gamma(&px, 0.2).values(), [1.0, 0.0]);
        let px = MarginalX::new([0.1, 0.9]).unwrap();
        assert_eq!(qx_of_gamma(&px, -0.2).values(), [0.0, 1.0]);
    }

    #[test]
    fn grids() {
        let g = make_grid(0.3, 3).unwrap();
        assert_eq!(g.points(), &[-0.15, 0.0, 0.15]);
        assert_eq!(make_grid(0.0, 100).unwrap().points(), &[0.0]);
        assert_eq!(make_grid(1.0, 1).unwrap().points(), &[0.0]);

        let g = make_grid(0.1, 1000).unwrap();
        assert_eq!(g.len(), 1000);
        assert_eq!(g.points()[0], -0.05);
        assert_eq!(g.points()[999], 0.05);
        let step = 0.1 / 999.0;
        for w in g.points().windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-15);
        }
        for k in 0..1000 {
            assert_eq!(g.points()[k], -g.points()[999 - k]);
        }

        assert!(make_grid(2.5, 10).is_err());
        assert!(make_grid(0.5, 0).is_err());
    }

    #[test]
    fn sweep_degenerate_cases() {
        let p = ex1();
        let cfg = SolverConfig::default();
        let grid = make_grid(0.0, 10).unwrap();
        let curve = sweep(&p, 0.0, &grid, &cfg).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].value().unwrap(), mutual_information(&p));

        let grid = make_grid(2.0, 1).unwrap();
        let curve = sweep(&p, 2.0, &grid, &cfg).unwrap();
        assert!(curve[0].value().unwrap().nats() <= cfg.gap_tol);

        let grid = make_grid(0.3, 5).unwrap();
        assert!(sweep(&p, 0.2, &grid, &cfg).is_err());
    }

    #[test]
    fn bound_is_below_reference_value() {
        let p = ex1();
        let r = lower_bound(&p, 0.3, 51, &SolverConfig::default()).unwrap();
        assert!(r.certified);
        assert!(r.bound <= r.i_of_p);
        let min = r.curve.iter().filter_map(|pt| pt.value()).map(|v| v.nats()).fold(f64::INFINITY, f64::min);
        assert_eq!(r.bound.nats(), min);
        assert!(r.certified_floor().unwrap() <= r.bound.nats());
    }

    #[test]
    fn tiny_radius_falls_back_to_reference() {
        // Two grid points at +-eps/2 spend the whole budget on the marginal
        // shift; q = p itself is still feasible and may be better.
        let p = ex1();
        let r = lower_bound(&p, 1e-9, 2, &SolverConfig::default()).unwrap();
        assert!(r.bound <= r.i_of_p);
    }

    #[test]
    fn uncertified_when_capped() {
        let p = JointDist::new(&[[0.1, 0.25, 0.05], [0.3, 0.2, 0.1]], ValidationPolicy::Strict).unwrap();
        let cfg = SolverConfig { max_iters: 1, gap_tol: 1e-14, ..SolverConfig::default() };
        let r = lower_bound(&p, 0.2, 5, &cfg).unwrap();
        assert!(!r.certified);
        assert!(r.curve.iter().any(|pt| pt.status() == PointStatus::IterCap));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.15, 12), "0.15");
        assert_eq!(format_sig(-0.15, 12), "-0.15");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(1.234e-9, 12), "1.234e-9");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(f64::NAN, 12), "NaN");
        assert_eq!(format_sig(123.456, 4), "123.5");
    }

    #[test]
    fn csv_layout() {
        let p = ex1();
        let grid = make_grid(0.3, 3).unwrap();
        let curve = sweep(&p, 0.3, &grid, &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&curve, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-0.15,"));
        assert!(lines[2].starts_with("0,"));
        assert!(lines.iter().skip(1).all(|l| l.ends_with(",converged")));
        let fields: Vec<f64> = lines[2].split(',').take(4).map(|f| f.parse().unwrap()).collect();
        assert!((fields[1] * std::f64::consts::LN_2 - fields[2]).abs() < 1e-11);
    }
}

//! The inner problem: for a fixed binary marginal `q_X`, minimize
//! `I(q_X q_{Y|X})` over conditionals subject to `||q_X q_{Y|X} - p||_1 <= eps`.
//!
//! The objective is convex in `q_XY` on the affine slice with fixed row sums,
//! and the feasible set is a polytope with a cheap exact linear oracle, so a
//! pairwise Frank–Wolfe method with exact line search is used. The
//! Frank–Wolfe duality gap `<grad, x - s>` bounds the suboptimality of every
//! iterate and is returned as a certificate.

mod line_search;
mod lmo;

pub use lmo::linear_oracle;

use serde::{Deserialize, Serialize};

use crate::dist::{l1_distance, marginal_x, mi_nats_raw, InfoValue, JointDist, MarginalX, Mat2};
use crate::error::{Error, Result};

/// Slack allowed on the marginal feasibility condition, absorbing round-off
/// in `q_X` constructions.
pub(crate) const FEAS_TOL: f64 = 1e-12;

/// Atoms whose weight falls below this are dropped from the active set.
const WEIGHT_EPS: f64 = 1e-15;

/// Reference joint `p`, fixed marginal `q_X` and L1 radius `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProblem {
    p: JointDist,
    px: MarginalX,
    qx: MarginalX,
    eps: f64,
}

impl InnerProblem {
    pub fn new(p: JointDist, qx: MarginalX, eps: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("eps must lie in [0, 2], got {eps}")));
        }
        let px = marginal_x(&p);
        let marginal_distance = (qx.get(0) - px.get(0)).abs() + (qx.get(1) - px.get(1)).abs();
        if marginal_distance > eps + FEAS_TOL {
            return Err(Error::Infeasible { marginal_distance, eps });
        }
        Ok(Self { p, px, qx, eps })
    }

    #[inline]
    pub fn p(&self) -> &JointDist {
        &self.p
    }

    #[inline]
    pub fn px(&self) -> MarginalX {
        self.px
    }

    #[inline]
    pub fn qx(&self) -> MarginalX {
        self.qx
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Whether `q` satisfies all constraints: nonnegativity, row sums equal to
    /// `q_X` within `row_tol`, and `||q - p||_1 <= eps + l1_tol`.
    pub fn is_feasible(&self, q: &JointDist, row_tol: f64, l1_tol: f64) -> bool {
        if q.my() != self.p.my() || q.as_slice().iter().any(|&v| v < 0.0) {
            return false;
        }
        let rows_ok = (0..2).all(|i| (q.row(i).iter().sum::<f64>() - self.qx.get(i)).abs() <= row_tol);
        rows_ok && l1_distance(q.as_slice(), self.p.as_slice()).is_ok_and(|v| v <= self.eps + l1_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once the duality gap falls to this many nats.
    pub gap_tol: f64,
    pub max_iters: usize,
    /// Entries below this are clamped when evaluating the gradient.
    pub interior_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gap_tol: 1e-7, max_iters: 50_000, interior_floor: 1e-12 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gap_tol.is_nan() || self.gap_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("gap_tol must be positive, got {}", self.gap_tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.interior_floor > 0.0 && self.interior_floor <= 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "interior_floor must lie in (0, 1e-9], got {}",
                self.interior_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    /// Duality gap at or below `gap_tol`.
    Converged,
    /// Stopped by the iteration cap (or a stalled line search) before
    /// certifying the gap.
    IterCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub value: InfoValue,
    pub argmin: JointDist,
    /// Bound on the suboptimality of `value`, in nats: the smaller of the
    /// Frank–Wolfe duality gap at `argmin` and `value` itself.
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Feasible starting point: each row of `p` rescaled to the target row sum,
/// with empty rows filled uniformly. Its L1 distance to `p` is exactly
/// `V(q_X, p_X)`.
pub fn feasible_init(prob: &InnerProblem) -> Result<JointDist> {
    init_raw(prob).map(JointDist::from_mat_unchecked)
}

fn init_raw(prob: &InnerProblem) -> Result<Mat2> {
    let my = prob.p.my();
    let mut q = prob.p.values().clone();
    for i in 0..2 {
        let mass = prob.px.get(i);
        let target = prob.qx.get(i);
        let row = q.row_mut(i);
        if mass > 0.0 {
            let scale = target / mass;
            row.iter_mut().for_each(|v| *v *= scale);
        } else {
            row.fill(target / my as f64);
        }
    }
    let v = l1_distance(q.as_slice(), prob.p.as_slice())?;
    if v > prob.eps + FEAS_TOL {
        return Err(Error::Infeasible { marginal_distance: v, eps: prob.eps });
    }
    Ok(q)
}

/// Gradient of `I` on the slice with fixed row sums: entry `(i, j)` is
/// `ln(q(i,j) / q_Y(j)) = ln q_{X|Y}(i|j)`. Entries are clamped at
/// `interior_floor` before taking logarithms.
pub fn mi_gradient(q: &JointDist, interior_floor: f64) -> Mat2 {
    let mut out = Mat2::zeros(q.my());
    gradient_into(q.values(), interior_floor, &mut out);
    out
}

fn gradient_into(q: &Mat2, floor: f64, out: &mut Mat2) {
    let my = q.cols();
    let src = q.as_slice();
    let dst = out.as_mut_slice();
    for j in 0..my {
        let a = src[j].max(floor);
        let b = src[my + j].max(floor);
        let col = (a + b).ln();
        dst[j] = a.ln() - col;
        dst[my + j] = b.ln() - col;
    }
}

fn axpy(t: f64, d: &[f64], x: &mut [f64]) {
    for (xi, di) in x.iter_mut().zip(d) {
        *xi = (*xi + t * di).max(0.0);
    }
}

/// Active-set bookkeeping for the pairwise variant: `x = sum_k w_k atom_k`.
struct ActiveSet {
    atoms: Vec<Mat2>,
    weights: Vec<f64>,
}

impl ActiveSet {
    fn find(&self, s: &Mat2) -> Option<usize> {
        self.atoms.iter().position(|a| a.as_slice().iter().zip(s.as_slice()).all(|(u, v)| (u - v).abs() <= 1e-15))
    }

    fn add(&mut self, s: Mat2, w: f64) {
        match self.find(&s) {
            Some(k) => self.weights[k] += w,
            None => {
                self.atoms.push(s);
                self.weights.push(w);
            }
        }
    }

    fn prune(&mut self) {
        let mut k = 0;
        while k < self.atoms.len() {
            if self.weights[k] <= WEIGHT_EPS {
                self.atoms.swap_remove(k);
                self.weights.swap_remove(k);
            } else {
                k += 1;
            }
        }
    }

    /// Atom with the largest `<grad, a>`.
    fn away(&self, grad: &Mat2) -> usize {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (k, a) in self.atoms.iter().enumerate() {
            let v = grad.dot(a);
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        best
    }

    fn combination(&self, out: &mut Mat2) {
        let total: f64 = self.weights.iter().sum();
        let dst = out.as_mut_slice();
        dst.fill(0.0);
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            for (o, v) in dst.iter_mut().zip(a.as_slice()) {
                *o += w / total * v;
            }
        }
    }
}

/// Minimize `I(q)` over the feasible polytope of `prob`.
pub fn inner_minimize(prob: &InnerProblem, cfg: &SolverConfig) -> Result<InnerResult> {
    cfg.validate()?;
    let my = prob.p.my();
    let start = init_raw(prob)?;
    let mut x = start.clone();
    let mut active = ActiveSet { atoms: vec![start], weights: vec![1.0] };
    let mut grad = Mat2::zeros(my);
    let mut dir = vec![0.0; 2 * my];

    let mut steps = 0;
    let (gap, status) = loop {
        gradient_into(&x, cfg.interior_floor, &mut grad);
        let s = lmo::lmo(&grad, prob)?;
        // I >= 0, so the objective value itself also bounds the suboptimality;
        // this matters on the boundary, where the clamped gradient overstates
        // the linear gap.
        let gap = (grad.dot(&x) - grad.dot(&s)).max(0.0).min(mi_nats_raw(x.as_slice(), my));
        if gap <= cfg.gap_tol {
            break (gap, SolveStatus::Converged);
        }
        if steps >= cfg.max_iters {
            break (gap, SolveStatus::IterCap);
        }

        // Pairwise step: shift weight from the worst active atom to s.
        let k = active.away(&grad);
        for ((d, si), ai) in dir.iter_mut().zip(s.as_slice()).zip(active.atoms[k].as_slice()) {
            *d = si - ai;
        }
        let t_max = active.weights[k];
        let t = line_search::exact_step(x.as_slice(), &dir, my, t_max);
        if t > 0.0 {
            active.weights[k] -= t;
            active.add(s, t);
        } else {
            // Plain Frank–Wolfe step towards s.
            for ((d, si), xi) in dir.iter_mut().zip(s.as_slice()).zip(x.as_slice()) {
                *d = si - xi;
            }
            let t = line_search::exact_step(x.as_slice(), &dir, my, 1.0);
            if t <= 0.0 {
                break (gap, SolveStatus::IterCap);
            }
            active.weights.iter_mut().for_each(|w| *w *= 1.0 - t);
            active.add(s, t);
            axpy(t, &dir, x.as_mut_slice());
            active.prune();
            steps += 1;
            continue;
        }
        active.prune();
        steps += 1;
        if steps % 64 == 0 {
            active.combination(&mut x);
        } else {
            axpy(t, &dir, x.as_mut_slice());
        }
    };

    Ok(InnerResult {
        value: InfoValue::from_nats(mi_nats_raw(x.as_slice(), my)),
        argmin: JointDist::from_mat_unchecked(x),
        gap,
        iterations: steps,
        status,
    })
}

//! Exact linear minimization over the feasible polytope
//! `{q >= 0, row sums = q_X, ||q - p||_1 <= eps}`.
//!
//! In the split form `q = p + u+ - u-` the LP decouples: within a row, mass
//! is only ever added to the cheapest column and removed from the most
//! expensive ones, so every unit of L1 budget beyond the mandatory
//! `|q_X(i) - p_X(i)|` buys a "move" whose value is half the gradient gap
//! between source and sink. Moves from both rows form a fractional knapsack
//! over one shared budget, which a sort solves exactly.

use std::cmp::Ordering;

use super::{InnerProblem, FEAS_TOL};
use crate::dist::{JointDist, Mat2};
use crate::error::{Error, Result};

struct Move {
    gain: f64,
    mass: f64,
    row: usize,
    col: usize,
}

/// Vertex of the feasible polytope minimizing `<grad, q>`. Ties are broken in
/// favour of the lowest (row, column) index.
pub fn linear_oracle(grad: &Mat2, prob: &InnerProblem) -> Result<JointDist> {
    lmo(grad, prob).map(JointDist::from_mat_unchecked)
}

pub(crate) fn lmo(grad: &Mat2, prob: &InnerProblem) -> Result<Mat2> {
    let my = prob.p().my();
    if grad.cols() != my {
        return Err(Error::DimensionMismatch { left: grad.cols(), right: my });
    }
    let mut q = prob.p().values().clone();
    let px = prob.px();
    let qx = prob.qx();
    let mut base_cost = 0.0;
    let mut sink = [0usize; 2];
    let mut moves = Vec::with_capacity(2 * my);

    for (i, sink_i) in sink.iter_mut().enumerate() {
        let g = grad.row(i);
        let jmin = (1..my).fold(0, |best, j| if g[j] < g[best] { j } else { best });
        *sink_i = jmin;

        let mut order: Vec<usize> = (0..my).filter(|&j| j != jmin).collect();
        order.sort_by(|&a, &b| g[b].partial_cmp(&g[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

        let delta = qx.get(i) - px.get(i);
        base_cost += delta.abs();
        let row = q.row_mut(i);
        if delta >= 0.0 {
            row[jmin] += delta;
        } else {
            let mut need = -delta;
            for &j in order.iter().chain(std::iter::once(&jmin)) {
                if need <= 0.0 {
                    break;
                }
                let take = need.min(row[j]);
                row[j] -= take;
                need -= take;
            }
        }

        for &j in &order {
            if row[j] > 0.0 && g[j] > g[jmin] {
                moves.push(Move { gain: g[j] - g[jmin], mass: row[j], row: i, col: j });
            }
        }
    }

    if base_cost > prob.eps() + FEAS_TOL {
        return Err(Error::Infeasible { marginal_distance: base_cost, eps: prob.eps() });
    }

    moves.sort_by(|a, b| {
        b.gain.partial_cmp(&a.gain).unwrap_or(Ordering::Equal).then(a.row.cmp(&b.row)).then(a.col.cmp(&b.col))
    });

    let mut budget = (prob.eps() - base_cost).max(0.0);
    for mv in moves {
        if budget <= 0.0 {
            break;
        }
        let amount = mv.mass.min(0.5 * budget);
        let row = q.row_mut(mv.row);
        row[mv.col] -= amount;
        row[sink[mv.row]] += amount;
        budget -= 2.0 * amount;
    }
    Ok(q)
}

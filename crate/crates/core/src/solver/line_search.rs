//! Exact line search for mutual information along a direction with zero row
//! sums, `phi(t) = I(x + t d)` on `[0, t_max]`.

/// First and second derivative of `phi` at `t`:
/// `phi'(t) = sum_ij d_ij ln y_ij - sum_j dY_j ln yY_j` with `y = x + t d`.
fn derivatives(x: &[f64], d: &[f64], my: usize, t: f64) -> (f64, f64) {
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for j in 0..my {
        let (da, db) = (d[j], d[my + j]);
        let dc = da + db;
        let ya = x[j] + t * da;
        let yb = x[my + j] + t * db;
        let yc = ya + yb;
        if yc <= 0.0 {
            // Whole column vanishes: ln(y_ij / yY_j) tends to ln(d_ij / dY_j).
            if dc != 0.0 {
                for dd in [da, db] {
                    if dd != 0.0 {
                        d1 += dd * (dd / dc).ln();
                    }
                }
            }
            continue;
        }
        for (y, dd) in [(ya, da), (yb, db)] {
            if dd == 0.0 {
                continue;
            }
            if y <= 0.0 {
                return (if dd < 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }, f64::INFINITY);
            }
            d1 += dd * y.ln();
            d2 += dd * dd / y;
        }
        if dc != 0.0 {
            d1 -= dc * yc.ln();
            d2 -= dc * dc / yc;
        }
    }
    (d1, d2.max(0.0))
}

/// Minimizer of the convex function `phi` over `[0, t_max]` via safeguarded
/// Newton on `phi'`. Returns `0` when `d` is not a descent direction.
pub(crate) fn exact_step(x: &[f64], d: &[f64], my: usize, t_max: f64) -> f64 {
    if t_max <= 0.0 {
        return 0.0;
    }
    let (g0, _) = derivatives(x, d, my, 0.0);
    if g0 >= 0.0 || g0.is_nan() {
        return 0.0;
    }
    let (g_hi, _) = derivatives(x, d, my, t_max);
    if g_hi <= 0.0 {
        return t_max;
    }

    let (mut lo, mut hi) = (0.0, t_max);
    let mut t = 0.5 * t_max;
    for _ in 0..100 {
        let (g1, g2) = derivatives(x, d, my, t);
        if g1 == 0.0 {
            return t;
        }
        if g1 < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 1e-15 * t_max {
            break;
        }
        let newton = t - g1 / g2;
        t = if g2 > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (t - lo).min(hi - t) <= 1e-17 * t_max {
            break;
        }
    }
    // phi' <= 0 on [0, lo], so lo never overshoots the minimizer.
    if lo > 0.0 {
        lo
    } else {
        t
    }
}

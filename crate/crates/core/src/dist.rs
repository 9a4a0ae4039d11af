//! Distribution value types over a binary `X` and a finite `Y`, together with
//! the basic information measures: relative entropy, mutual information and
//! variational (L1) distance.
//!
//! All logarithms are natural; [`InfoValue`] converts to bits on demand.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on total mass for strict validation.
pub const SUM_TOL: f64 = 1e-9;

/// Entries at or below this value are treated as exact zeros inside logarithms.
pub const LOG_ZERO: f64 = 1e-15;

/// A dense 2 x `cols` matrix of reals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2 {
    data: Vec<f64>,
    cols: usize,
}

impl Mat2 {
    pub fn zeros(cols: usize) -> Self {
        Self { data: vec![0.0; 2 * cols], cols }
    }

    /// Build from a flat row-major buffer of length `2 * cols`.
    pub fn from_flat(data: Vec<f64>, cols: usize) -> Result<Self> {
        if cols == 0 || data.len() != 2 * cols {
            return Err(Error::Shape(format!("{} values for {} columns", data.len(), cols)));
        }
        Ok(Self { data, cols })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if rows.len() != 2 {
            return Err(Error::Shape(format!("got {} rows", rows.len())));
        }
        let (r0, r1) = (rows[0].as_ref(), rows[1].as_ref());
        if r0.is_empty() || r0.len() != r1.len() {
            return Err(Error::Shape(format!("row lengths {} and {}", r0.len(), r1.len())));
        }
        let mut data = Vec::with_capacity(2 * r0.len());
        data.extend_from_slice(r0);
        data.extend_from_slice(r1);
        Ok(Self { data, cols: r0.len() })
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        vec![self.row(0).to_vec(), self.row(1).to_vec()]
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Mat2) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Return a copy with the columns reordered: column `j` of the result is
    /// column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Mat2 {
        assert_eq!(perm.len(), self.cols);
        let mut out = Mat2::zeros(self.cols);
        for i in 0..2 {
            for (j, &src) in perm.iter().enumerate() {
                out.set(i, j, self.get(i, src));
            }
        }
        out
    }

    /// Return a copy with the two rows exchanged.
    pub fn swap_rows(&self) -> Mat2 {
        let mut data = Vec::with_capacity(self.data.len());
        data.extend_from_slice(self.row(1));
        data.extend_from_slice(self.row(0));
        Mat2 { data, cols: self.cols }
    }
}

/// How [`validate_joint`] treats inputs whose mass is not exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationPolicy {
    /// Reject unless the total mass is within [`SUM_TOL`] of one.
    #[default]
    Strict,
    /// Divide by the total mass (which must be positive).
    Renormalize,
}

/// Joint distribution of a binary `X` (rows) and a finite `Y` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    values: Mat2,
}

/// JSON schema for joint distributions: `{"pxy": [[...], [...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointJson {
    pub pxy: Vec<Vec<f64>>,
}

impl JointDist {
    pub fn new<R: AsRef<[f64]>>(rows: &[R], policy: ValidationPolicy) -> Result<Self> {
        validate_joint(rows, policy)
    }

    /// Wrap a matrix produced by internal arithmetic (compose, solver iterates)
    /// without re-checking the mass constraint.
    pub(crate) fn from_mat_unchecked(values: Mat2) -> Self {
        Self { values }
    }

    pub fn from_json_str(s: &str, policy: ValidationPolicy) -> Result<Self> {
        let parsed: JointJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        validate_joint(&parsed.pxy, policy)
    }

    pub fn to_json(&self) -> JointJson {
        JointJson { pxy: self.values.to_rows() }
    }

    /// Number of `Y` outcomes.
    #[inline]
    pub fn my(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values.get(row, col)
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        self.values.row(row)
    }

    #[inline]
    pub fn values(&self) -> &Mat2 {
        &self.values
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn total_mass(&self) -> f64 {
        self.as_slice().iter().sum()
    }

    pub fn permute_cols(&self, perm: &[usize]) -> JointDist {
        JointDist { values: self.values.permute_cols(perm) }
    }

    pub fn swap_rows(&self) -> JointDist {
        JointDist { values: self.values.swap_rows() }
    }
}

/// Marginal distribution of the binary variable `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalX(pub(crate) [f64; 2]);

impl MarginalX {
    pub fn new(values: [f64; 2]) -> Result<Self> {
        check_prob_vector(&values)?;
        Ok(Self(values))
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    #[inline]
    pub fn values(&self) -> [f64; 2] {
        self.0
    }
}

/// Marginal distribution of `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalY(pub(crate) Vec<f64>);

impl MarginalY {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("empty marginal".into()));
        }
        check_prob_vector(&values)?;
        Ok(Self(values))
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Row-conditional distribution `q(y | x)`; each row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional(pub(crate) Mat2);

impl Conditional {
    pub fn new<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = Mat2::from_rows(rows)?;
        for i in 0..2 {
            check_prob_vector(m.row(i))?;
        }
        Ok(Self(m))
    }

    #[inline]
    pub fn values(&self) -> &Mat2 {
        &self.0
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0.get(row, col)
    }
}

fn check_prob_vector(values: &[f64]) -> Result<()> {
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: 0, col: k });
        }
        if v < 0.0 {
            return Err(Error::NegativeEntry { row: 0, col: k, value: v });
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::MassMismatch { sum });
    }
    Ok(())
}

/// Unit in which information values are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Bits,
    Nats,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Bits => f.write_str("bits"),
            Unit::Nats => f.write_str("nats"),
        }
    }
}

/// An information quantity, stored in nats. May be `+inf` for relative
/// entropies with a support violation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InfoValue(f64);

impl InfoValue {
    pub const ZERO: InfoValue = InfoValue(0.0);

    #[inline]
    pub fn from_nats(nats: f64) -> Self {
        Self(nats)
    }

    #[inline]
    pub fn from_bits(bits: f64) -> Self {
        Self(bits * std::f64::consts::LN_2)
    }

    #[inline]
    pub fn nats(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    #[inline]
    pub fn in_unit(self, unit: Unit) -> f64 {
        match unit {
            Unit::Bits => self.bits(),
            Unit::Nats => self.nats(),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// Anything that can be viewed as a flat vector of probabilities.
pub trait Probabilities {
    fn probs(&self) -> &[f64];
}

impl Probabilities for JointDist {
    fn probs(&self) -> &[f64] {
        self.as_slice()
    }
}

impl Probabilities for MarginalX {
    fn probs(&self) -> &[f64] {
        &self.0
    }
}

impl Probabilities for MarginalY {
    fn probs(&self) -> &[f64] {
        &self.0
    }
}

/// Validate a raw 2 x M_y matrix as a joint distribution.
pub fn validate_joint<R: AsRef<[f64]>>(rows: &[R], policy: ValidationPolicy) -> Result<JointDist> {
    let mut m = Mat2::from_rows(rows)?;
    let cols = m.cols();
    for (k, &v) in m.as_slice().iter().enumerate() {
        let (row, col) = (k / cols, k % cols);
        if !v.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
        if v < 0.0 {
            return Err(Error::NegativeEntry { row, col, value: v });
        }
    }
    let sum: f64 = m.as_slice().iter().sum();
    match policy {
        ValidationPolicy::Strict => {
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::MassMismatch { sum });
            }
        }
        ValidationPolicy::Renormalize => {
            if sum <= 0.0 {
                return Err(Error::ZeroMass);
            }
            m.as_mut_slice().iter_mut().for_each(|v| *v /= sum);
        }
    }
    Ok(JointDist { values: m })
}

pub fn marginal_x(j: &JointDist) -> MarginalX {
    MarginalX([j.row(0).iter().sum(), j.row(1).iter().sum()])
}

pub fn marginal_y(j: &JointDist) -> MarginalY {
    MarginalY(column_sums(j.values()))
}

pub(crate) fn column_sums(m: &Mat2) -> Vec<f64> {
    m.row(0).iter().zip(m.row(1)).map(|(a, b)| a + b).collect()
}

/// Conditional distribution of `Y` given each value of `X`. Rows with zero
/// marginal mass are filled uniformly.
pub fn conditional_y_given_x(j: &JointDist) -> Conditional {
    let px = marginal_x(j);
    let my = j.my();
    let mut out = Mat2::zeros(my);
    for i in 0..2 {
        let mass = px.get(i);
        let row = out.row_mut(i);
        if mass <= LOG_ZERO {
            row.fill(1.0 / my as f64);
        } else {
            for (dst, &v) in row.iter_mut().zip(j.row(i)) {
                *dst = v / mass;
            }
        }
    }
    Conditional(out)
}

/// Joint distribution `q(x, y) = q(x) q(y | x)`.
pub fn compose(qx: &MarginalX, c: &Conditional) -> JointDist {
    let mut out = Mat2::zeros(c.0.cols());
    for i in 0..2 {
        for (dst, &v) in out.row_mut(i).iter_mut().zip(c.0.row(i)) {
            *dst = qx.get(i) * v;
        }
    }
    JointDist { values: out }
}

/// Product distribution `q(x) q(y)`.
pub fn product(qx: &MarginalX, qy: &MarginalY) -> JointDist {
    let mut out = Mat2::zeros(qy.0.len());
    for i in 0..2 {
        for (dst, &v) in out.row_mut(i).iter_mut().zip(&qy.0) {
            *dst = qx.get(i) * v;
        }
    }
    JointDist { values: out }
}

/// `D(p || q) = sum p_k ln(p_k / q_k)`, with `0 ln(0/q) = 0` and `+inf` when
/// `p_k > 0 = q_k`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<InfoValue> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: q.len() });
    }
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a <= LOG_ZERO {
            continue;
        }
        if b <= LOG_ZERO {
            return Ok(InfoValue(f64::INFINITY));
        }
        acc += a * (a / b).ln();
    }
    Ok(InfoValue(acc.max(0.0)))
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x <= LOG_ZERO {
        0.0
    } else {
        x * x.ln()
    }
}

/// Mutual information in nats of a flat row-major 2 x `my` matrix, computed
/// as `H(X) + H(Y) - H(X, Y)`.
pub(crate) fn mi_nats_raw(data: &[f64], my: usize) -> f64 {
    let (r0, r1) = data.split_at(my);
    let mut joint = 0.0;
    let mut cols = 0.0;
    let (mut s0, mut s1) = (0.0, 0.0);
    for (&a, &b) in r0.iter().zip(r1) {
        joint += xlogx(a) + xlogx(b);
        cols += xlogx(a + b);
        s0 += a;
        s1 += b;
    }
    (joint - cols - xlogx(s0) - xlogx(s1)).max(0.0)
}

/// `I(X; Y) = D(p_XY || p_X p_Y)`.
pub fn mutual_information(j: &JointDist) -> InfoValue {
    InfoValue(mi_nats_raw(j.as_slice(), j.my()))
}

/// L1 distance between two distributions of the same shape; lies in `[0, 2]`.
pub fn variational_distance<P: Probabilities + ?Sized>(a: &P, b: &P) -> Result<f64> {
    l1_distance(a.probs(), b.probs())
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

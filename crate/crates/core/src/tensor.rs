//! Dense complex linear algebra over multi-qudit registers.
//!
//! Basis indices are big-endian in wire order: wire 0 is the most significant
//! digit. Every operator in the crate follows this convention.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default max-norm tolerance for operator comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default cap on the total register dimension `d^wires`.
pub const DEFAULT_DIM_CAP: u128 = 4096;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Qudit dimension, always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dim(u32);

impl Dim {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Dim(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `d^k`, or `None` on overflow.
    pub fn pow(self, k: usize) -> Option<usize> {
        (self.0 as usize).checked_pow(k as u32)
    }
}

impl TryFrom<u32> for Dim {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dim::new(d)
    }
}

impl From<Dim> for u32 {
    fn from(d: Dim) -> u32 {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Network member owning a wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Leader,
    /// Person `P_j`, numbered from 1.
    Person(u32),
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Leader => write!(f, "leader"),
            Party::Person(j) => write!(f, "p{j}"),
        }
    }
}

impl FromStr for Party {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "leader" {
            return Ok(Party::Leader);
        }
        s.strip_prefix('p')
            .and_then(|j| j.parse::<u32>().ok())
            .filter(|&j| j >= 1)
            .map(Party::Person)
            .ok_or_else(|| format!("unknown party `{s}`"))
    }
}

impl Serialize for Party {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Party {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireInfo {
    pub label: String,
    pub owner: Option<Party>,
}

/// A register of `d`-level wires with party ownership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuditSystem {
    pub d: Dim,
    pub wires: Vec<WireInfo>,
}

impl QuditSystem {
    pub fn new(d: Dim) -> Self {
        QuditSystem { d, wires: Vec::new() }
    }

    /// Unowned system of `m` wires labelled `w0..`.
    pub fn uniform(d: Dim, m: usize) -> Self {
        let wires = (0..m)
            .map(|i| WireInfo { label: format!("w{i}"), owner: None })
            .collect();
        QuditSystem { d, wires }
    }

    pub fn add_wire(&mut self, label: impl Into<String>, owner: Party) -> usize {
        self.wires.push(WireInfo { label: label.into(), owner: Some(owner) });
        self.wires.len() - 1
    }

    pub fn len(&self) -> usize {
        self.wires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
    }

    /// `d^wires` without overflow.
    pub fn total_dim(&self) -> u128 {
        (self.d.get() as u128).saturating_pow(self.wires.len() as u32)
    }

    pub fn check_cap(&self, cap: u128) -> Result<usize> {
        let dim = self.total_dim();
        if dim > cap {
            return Err(Error::DimensionCapExceeded { dim, cap });
        }
        Ok(dim as usize)
    }

    pub fn wire_by_label(&self, label: &str) -> Option<usize> {
        self.wires.iter().position(|w| w.label == label)
    }

    pub fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.wires.len() {
            return Err(Error::WireOutOfRange { index: w, wires: self.wires.len() });
        }
        Ok(())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real matrix from nested rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: v.len() });
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Integer power of a square matrix; negative powers use the adjoint, so
    /// they are only meaningful for unitaries.
    pub fn powi(&self, k: i64) -> Self {
        assert!(self.is_square(), "powi on non-square matrix");
        let base = if k < 0 { self.adjoint() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = &self.adjoint() * self;
        g.max_abs_diff(&Self::identity(self.rows)).unwrap_or(f64::INFINITY)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let err = self.unitarity_error();
        if err > tol {
            return Err(Error::NotUnitary(err));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for the checked form.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shape mismatch")
    }
}

/// Complex amplitude vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl StateVector {
    /// Normalized state; rejects vectors whose norm is off by more than 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes, normalized: true })
    }

    /// Unnormalized branch residue.
    pub fn residue(amplitudes: Vec<Complex64>) -> Self {
        StateVector { amplitudes, normalized: false }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        StateVector { amplitudes, normalized: true }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Rescale to unit norm; fails on a zero vector.
    pub fn normalize(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ProbabilityUnderflow(0.0));
        }
        let amplitudes = self.amplitudes.into_iter().map(|a| a / n).collect();
        Ok(StateVector { amplitudes, normalized: true })
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |r, c| self.amplitudes[r] * other.amplitudes[c].conj())
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product, `a`'s indices most significant.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Kronecker product of a list, first factor most significant.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors.into_iter().fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

pub fn tensor_states(a: &StateVector, b: &StateVector) -> StateVector {
    let amplitudes = a.amplitudes.iter().flat_map(|x| b.amplitudes.iter().map(move |y| x * y)).collect();
    StateVector { amplitudes, normalized: a.normalized && b.normalized }
}

/// Digits of `index` in base `d`, most significant first.
pub fn digits(mut index: usize, d: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Reorder the tensor factors of an operator on `m` wires of dimension `d`.
///
/// Position `p` of the result carries the factor that sat at position
/// `order[p]` of the input.
pub fn permute_wires(op: &ComplexMatrix, d: Dim, order: &[usize]) -> Result<ComplexMatrix> {
    let m = order.len();
    let dim = d.pow(m).ok_or(Error::DimensionCapExceeded { dim: u128::MAX, cap: DEFAULT_DIM_CAP })?;
    if op.rows != dim || op.cols != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: op.rows });
    }
    check_distinct(order, m)?;
    let du = d.as_usize();
    let map: Vec<usize> = (0..dim)
        .map(|old| {
            let od = digits(old, du, m);
            let nd: Vec<usize> = order.iter().map(|&src| od[src]).collect();
            from_digits(&nd, du)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(map[r], map[c])] = op[(r, c)];
        }
    }
    Ok(out)
}

/// Permute the tensor factors of a state; same convention as [`permute_wires`].
pub fn permute_state(state: &StateVector, d: Dim, order: &[usize]) -> Result<StateVector> {
    let m = order.len();
    let du = d.as_usize();
    if d.pow(m) != Some(state.dim()) {
        return Err(Error::DimensionMismatch { expected: d.pow(m).unwrap_or(0), actual: state.dim() });
    }
    check_distinct(order, m)?;
    let mut out = vec![ZERO; state.dim()];
    for (old, &a) in state.amplitudes.iter().enumerate() {
        let od = digits(old, du, m);
        let nd: Vec<usize> = order.iter().map(|&src| od[src]).collect();
        out[from_digits(&nd, du)] = a;
    }
    Ok(StateVector { amplitudes: out, normalized: state.normalized })
}

fn check_distinct(targets: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &t in targets {
        if t >= m {
            return Err(Error::WireOutOfRange { index: t, wires: m });
        }
        if std::mem::replace(&mut seen[t], true) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Full-register operator acting as `op` on `targets` (in listed order) and
/// as identity elsewhere.
pub fn embed(op: &ComplexMatrix, targets: &[usize], sys: &QuditSystem) -> Result<ComplexMatrix> {
    let m = sys.len();
    check_distinct(targets, m)?;
    let k = targets.len();
    let expected = sys.d.pow(k).unwrap_or(usize::MAX);
    if op.rows != expected || op.cols != expected {
        return Err(Error::DimensionMismatch { expected, actual: op.rows });
    }
    sys.check_cap(DEFAULT_DIM_CAP)?;
    let rest: Vec<usize> = (0..m).filter(|w| !targets.contains(w)).collect();
    let rest_dim = sys.d.pow(rest.len()).unwrap_or(usize::MAX);
    let big = tensor(op, &ComplexMatrix::identity(rest_dim));
    // `big` lives on [targets.., rest..]; move each wire back to its slot.
    let mut layout: Vec<usize> = targets.to_vec();
    layout.extend(&rest);
    let mut order = vec![0; m];
    for (pos, &w) in layout.iter().enumerate() {
        order[w] = pos;
    }
    permute_wires(&big, sys.d, &order)
}

/// Orthogonal projector onto `|outcome⟩` at `wire`.
pub fn projector(outcome: u32, wire: usize, sys: &QuditSystem) -> Result<ComplexMatrix> {
    if outcome >= sys.d.get() {
        return Err(Error::OutcomeOutOfRange { outcome, d: sys.d.get() });
    }
    sys.check_wire(wire)?;
    let dim = sys.check_cap(DEFAULT_DIM_CAP)?;
    let du = sys.d.as_usize();
    let stride = du.pow((sys.len() - 1 - wire) as u32);
    let diag: Vec<Complex64> =
        (0..dim).map(|i| if (i / stride) % du == outcome as usize { ONE } else { ZERO }).collect();
    Ok(ComplexMatrix::diagonal(&diag))
}

/// Whether `a = e^{iθ} b` within `tol` in max-norm.
///
/// θ is read off the largest-magnitude entry of `b` and returned in `[0, 2π)`.
pub fn equal_up_to_global_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    a.check_same_shape(b)?;
    let (idx, pivot) = b
        .data
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    if pivot == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let ratio = a.data[idx] / b.data[idx];
    let theta = if ratio.norm() == 0.0 { 0.0 } else { ratio.arg() };
    let phase = Complex64::from_polar(1.0, theta);
    let dev = a.data.iter().zip(&b.data).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max);
    Ok((dev <= tol, theta.rem_euclid(std::f64::consts::TAU)))
}

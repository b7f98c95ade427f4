//! Transformations that are block diagonal in some basis of one wire.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::{controlled, fourier, gaussian};
use crate::tensor::{permute_wires, ComplexMatrix, Dim};

use super::{conjugate_first, qudits_for};

/// Eigenbasis a compressed wire is diagonal in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// Unitary taking the computational basis to this axis' eigenbasis.
    pub fn frame(self, d: Dim) -> ComplexMatrix {
        match self {
            Axis::Z => ComplexMatrix::identity(d.as_usize()),
            Axis::X => fourier(d),
            Axis::Y => &gaussian(d) * &fourier(d),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::Config(format!("unknown axis `{s}`"))),
        }
    }
}

/// How the compressed wire is framed around the block-diagonal core.
#[derive(Debug, Clone, PartialEq)]
pub enum Compression {
    Z,
    X,
    Y,
    /// `(U ⊗ I) · C(T) · (V ⊗ I)` for arbitrary single-qudit `U`, `V`.
    General { u: ComplexMatrix, v: ComplexMatrix },
}

impl Compression {
    pub fn axis(&self) -> Option<Axis> {
        match self {
            Compression::Z => Some(Axis::Z),
            Compression::X => Some(Axis::X),
            Compression::Y => Some(Axis::Y),
            Compression::General { .. } => None,
        }
    }
}

/// A unitary on `wires` qudits that acts as `Σ_ℓ P_ℓ ⊗ T(ℓ)` with the
/// projectors `P_ℓ` living on `wire`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedTransformation {
    pub d: Dim,
    pub wires: usize,
    pub wire: usize,
    pub kind: Compression,
    pub blocks: Vec<ComplexMatrix>,
}

impl CompressedTransformation {
    pub fn new(d: Dim, wires: usize, wire: usize, kind: Compression, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if wire >= wires {
            return Err(Error::WireOutOfRange { index: wire, wires });
        }
        if blocks.len() != d.as_usize() {
            return Err(Error::DimensionMismatch { expected: d.as_usize(), actual: blocks.len() });
        }
        let rest = d.pow(wires - 1).ok_or_else(|| Error::Config("dimension overflows usize".into()))?;
        for b in &blocks {
            if !b.is_square() || b.rows() != rest {
                return Err(Error::DimensionMismatch { expected: rest, actual: b.rows() });
            }
            b.ensure_unitary(1e-10)?;
        }
        if let Compression::General { u, v } = &kind {
            for m in [u, v] {
                if m.rows() != d.as_usize() || !m.is_square() {
                    return Err(Error::DimensionMismatch { expected: d.as_usize(), actual: m.rows() });
                }
                m.ensure_unitary(1e-10)?;
            }
        }
        Ok(CompressedTransformation { d, wires, wire, kind, blocks })
    }

    /// The matrix with the compressed wire moved to the front.
    pub fn matrix_compressed_first(&self) -> ComplexMatrix {
        let core = controlled(&self.blocks).expect("validated blocks");
        match &self.kind {
            Compression::General { u, v } => {
                let rest = ComplexMatrix::identity(core.rows() / u.rows());
                let left = crate::tensor::tensor(u, &rest);
                let right = crate::tensor::tensor(v, &rest);
                &(&left * &core) * &right
            }
            kind => conjugate_first(&core, &kind.axis().expect("not general").frame(self.d)),
        }
    }

    /// The matrix in the original wire order.
    pub fn matrix(&self) -> ComplexMatrix {
        let order = front_order(self.wires, self.wire);
        let mut inverse = vec![0; self.wires];
        for (p, &o) in order.iter().enumerate() {
            inverse[o] = p;
        }
        permute_wires(&self.matrix_compressed_first(), self.d, &inverse).expect("valid order")
    }

    /// Recover the blocks of `m` seen as compressed along `axis` on `wire`.
    pub fn detect(m: &ComplexMatrix, d: Dim, wire: usize, axis: Axis, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(m.rows(), m.cols(), m.cols(), m.rows()));
        }
        let wires = qudits_for(m.rows(), d).ok_or(Error::DimensionMismatch { expected: d.as_usize(), actual: m.rows() })?;
        if wire >= wires {
            return Err(Error::WireOutOfRange { index: wire, wires });
        }
        m.ensure_unitary(1e-9)?;
        let front = permute_wires(m, d, &front_order(wires, wire))?;
        let core = conjugate_first(&front, &axis.frame(d).adjoint());
        let n = core.rows() / d.as_usize();
        for r in 0..core.rows() {
            for c in 0..core.cols() {
                if r / n != c / n && core[(r, c)].norm() > tol {
                    return Err(Error::NotCompressed("off-diagonal control block"));
                }
            }
        }
        let blocks = (0..d.as_usize())
            .map(|l| ComplexMatrix::from_fn(n, n, |r, c| core[(l * n + r, l * n + c)]))
            .collect();
        let kind = match axis {
            Axis::X => Compression::X,
            Axis::Y => Compression::Y,
            Axis::Z => Compression::Z,
        };
        CompressedTransformation::new(d, wires, wire, kind, blocks)
    }
}

/// Order that brings `wire` to the front, keeping the rest in place.
fn front_order(wires: usize, wire: usize) -> Vec<usize> {
    std::iter::once(wire).chain((0..wires).filter(|&w| w != wire)).collect()
}

/// True when `m` is block diagonal in the computational basis of `wire`.
pub fn is_z_compressed(m: &ComplexMatrix, d: Dim, wire: usize, tol: f64) -> bool {
    CompressedTransformation::detect(m, d, wire, Axis::Z, tol).is_ok()
}

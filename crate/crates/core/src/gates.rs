//! Qudit Pauli, Fourier and Gaussian gates, controlled constructors, and the
//! `|Max⟩` / `|GHZ⟩` resource states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{digits, ComplexMatrix, Dim, StateVector, ONE, ZERO};

/// Roots of unity for dimension `d`: `ω = e^{2πi/d}` and `ζ = e^{iπ(d+1)/d}`.
///
/// `ζ² = ω` and `ζ^{d²} = 1` for every `d`, since `d(d+1)` is even.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConvention {
    pub d: Dim,
    pub omega: Complex64,
    pub zeta: Complex64,
}

impl PhaseConvention {
    pub fn new(d: Dim) -> Self {
        PhaseConvention { d, omega: omega_pow(d, 1), zeta: zeta_pow(d, 1) }
    }

    pub fn omega_pow(&self, k: i64) -> Complex64 {
        omega_pow(self.d, k)
    }

    pub fn zeta_pow(&self, k: i64) -> Complex64 {
        zeta_pow(self.d, k)
    }
}

/// `ω^k`, reduced mod `d` before evaluating the exponential.
pub fn omega_pow(d: Dim, k: i64) -> Complex64 {
    let d = d.get() as i64;
    let r = k.rem_euclid(d);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
}

/// `ζ^k = e^{iπ(d+1)k/d}`, reduced mod `2d`.
pub fn zeta_pow(d: Dim, k: i64) -> Complex64 {
    let d = d.get() as i64;
    let r = ((d + 1) * k.rem_euclid(2 * d)).rem_euclid(2 * d);
    Complex64::from_polar(1.0, PI * r as f64 / d as f64)
}

/// Shift: `X|k⟩ = |k+1 mod d⟩`.
pub fn pauli_x(d: Dim) -> ComplexMatrix {
    let n = d.as_usize();
    ComplexMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { ONE } else { ZERO })
}

/// Clock: `Z|k⟩ = ω^k|k⟩`.
pub fn pauli_z(d: Dim) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..d.get() as i64).map(|k| omega_pow(d, k)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// `F[j,k] = ω^{jk}/√d`, so that `F X F⁻¹ = Z`.
pub fn fourier(d: Dim) -> ComplexMatrix {
    let n = d.as_usize();
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| omega_pow(d, (j * k) as i64) * s)
}

/// Gaussian `G = diag(ζ^{k²})`.
pub fn gaussian(d: Dim) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..d.get() as i64).map(|k| zeta_pow(d, k * k)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// `Y` defined through `G X G⁻¹ = Y⁻¹`, i.e. `Y = G X⁻¹ G⁻¹`.
///
/// Works out to `Y|k⟩ = ζ ω^{-k} |k−1⟩ = ζ X⁻¹Z⁻¹|k⟩`.
pub fn pauli_y(d: Dim) -> ComplexMatrix {
    let g = gaussian(d);
    &(&g * &pauli_x(d).adjoint()) * &g.adjoint()
}

/// All named single-qudit gates for one dimension.
#[derive(Debug, Clone)]
pub struct GateSet {
    pub phases: PhaseConvention,
    pub x: ComplexMatrix,
    pub x_inv: ComplexMatrix,
    pub z: ComplexMatrix,
    pub z_inv: ComplexMatrix,
    pub y: ComplexMatrix,
    pub y_inv: ComplexMatrix,
    pub f: ComplexMatrix,
    pub f_inv: ComplexMatrix,
    pub g: ComplexMatrix,
    pub g_inv: ComplexMatrix,
}

impl GateSet {
    pub fn new(d: Dim) -> Self {
        let (x, z, y, f, g) = (pauli_x(d), pauli_z(d), pauli_y(d), fourier(d), gaussian(d));
        GateSet {
            phases: PhaseConvention::new(d),
            x_inv: x.adjoint(),
            z_inv: z.adjoint(),
            y_inv: y.adjoint(),
            f_inv: f.adjoint(),
            g_inv: g.adjoint(),
            x,
            z,
            y,
            f,
            g,
        }
    }
}

/// `Σ_ℓ |ℓ⟩⟨ℓ| ⊗ blocks[ℓ]` with the control as the most significant wire.
///
/// The number of blocks is the control dimension.
pub fn controlled(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let d = blocks.len();
    Dim::new(d as u32)?;
    let n = blocks[0].rows();
    for b in blocks {
        if !b.is_square() || b.rows() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: b.rows() });
        }
        b.ensure_unitary(1e-10)?;
    }
    Ok(ComplexMatrix::from_fn(d * n, d * n, |r, c| {
        if r / n == c / n {
            blocks[r / n][(r % n, c % n)]
        } else {
            ZERO
        }
    }))
}

/// Base gate of a [`GateName`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGate {
    I,
    X,
    Y,
    Z,
    F,
    G,
}

impl BaseGate {
    const ALL: [BaseGate; 6] = [BaseGate::I, BaseGate::X, BaseGate::Y, BaseGate::Z, BaseGate::F, BaseGate::G];

    pub fn matrix(self, d: Dim) -> ComplexMatrix {
        match self {
            BaseGate::I => ComplexMatrix::identity(d.as_usize()),
            BaseGate::X => pauli_x(d),
            BaseGate::Y => pauli_y(d),
            BaseGate::Z => pauli_z(d),
            BaseGate::F => fourier(d),
            BaseGate::G => gaussian(d),
        }
    }

    fn symbol(self) -> char {
        match self {
            BaseGate::I => 'I',
            BaseGate::X => 'X',
            BaseGate::Y => 'Y',
            BaseGate::Z => 'Z',
            BaseGate::F => 'F',
            BaseGate::G => 'G',
        }
    }
}

/// Symbolic gate name: `[C]B[^k]`.
///
/// A `C` prefix builds the two-wire gate `Σ_ℓ |ℓ⟩⟨ℓ| ⊗ B^{kℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateName {
    pub controlled: bool,
    pub base: BaseGate,
    pub power: i64,
}

impl GateName {
    pub fn new(base: BaseGate, power: i64) -> Self {
        GateName { controlled: false, base, power }
    }

    pub fn controlled(base: BaseGate, power: i64) -> Self {
        GateName { controlled: true, base, power }
    }

    pub fn arity(&self) -> usize {
        if self.controlled {
            2
        } else {
            1
        }
    }

    pub fn matrix(&self, d: Dim) -> ComplexMatrix {
        let base = self.base.matrix(d);
        if self.controlled {
            let blocks: Vec<ComplexMatrix> =
                (0..d.get() as i64).map(|l| base.powi(self.power * l)).collect();
            controlled(&blocks).expect("powers of a unitary are unitary")
        } else {
            base.powi(self.power)
        }
    }

    /// Label of the gate applied to the target wire, without the `C` prefix.
    pub fn target_label(&self) -> String {
        GateName { controlled: false, ..*self }.to_string()
    }

    /// Look for a named gate of the given arity equal to `m` within `tol`.
    pub fn recognize(m: &ComplexMatrix, d: Dim, tol: f64) -> Option<GateName> {
        let arity = match m.rows() {
            r if r == d.as_usize() => 1,
            r if Some(r) == d.pow(2) => 2,
            _ => return None,
        };
        // F and G have orders 4 and up to 2d, the Paulis d.
        let span = 2 * d.get() as i64;
        for base in BaseGate::ALL {
            for power in 0..span {
                let name = GateName { controlled: arity == 2, base, power };
                let skip = match base {
                    BaseGate::I => arity == 2 || power != 1,
                    _ => power == 0,
                };
                if skip {
                    continue;
                }
                if name.matrix(d).max_abs_diff(m).is_ok_and(|e| e <= tol) {
                    return Some(name.canonical(d));
                }
            }
        }
        None
    }

    /// Prefer `B^-1` to `B^{d-1}` for the Paulis.
    fn canonical(self, d: Dim) -> Self {
        let d = d.get() as i64;
        match self.base {
            BaseGate::X | BaseGate::Y | BaseGate::Z if d > 2 && self.power == d - 1 => GateName { power: -1, ..self },
            _ => self,
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.controlled {
            write!(f, "C")?;
        }
        write!(f, "{}", self.base.symbol())?;
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

impl FromStr for GateName {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (controlled, rest) = match s.strip_prefix('C') {
            Some(r) if !r.is_empty() => (true, r),
            _ => (false, s),
        };
        let (sym, power) = match rest.split_once('^') {
            Some((b, p)) => (b, p.parse::<i64>().map_err(|_| format!("bad power in `{s}`"))?),
            None => (rest, 1),
        };
        let base = match sym {
            "I" => BaseGate::I,
            "X" => BaseGate::X,
            "Y" => BaseGate::Y,
            "Z" => BaseGate::Z,
            "F" => BaseGate::F,
            "G" => BaseGate::G,
            _ => return Err(format!("unknown gate `{s}`")),
        };
        Ok(GateName { controlled, base, power })
    }
}

/// `|Max⟩ = d^{(1−s)/2} Σ_{Σk ≡ 0 mod d} |k⃗⟩` over `shares` qudits.
pub fn max_state(d: Dim, shares: usize) -> Result<StateVector> {
    if shares < 2 {
        return Err(Error::TooFewShares(shares));
    }
    let du = d.as_usize();
    let dim = d.pow(shares).ok_or(Error::DimensionCapExceeded { dim: u128::MAX, cap: u128::MAX })?;
    let amp = Complex64::new((du as f64).powf((1.0 - shares as f64) / 2.0), 0.0);
    let amps = (0..dim)
        .map(|i| if digits(i, du, shares).iter().sum::<usize>() % du == 0 { amp } else { ZERO })
        .collect();
    StateVector::new(amps)
}

/// `|GHZ⟩ = d^{-1/2} Σ_k |k,…,k⟩` over `shares` qudits.
pub fn ghz_state(d: Dim, shares: usize) -> Result<StateVector> {
    if shares < 2 {
        return Err(Error::TooFewShares(shares));
    }
    let du = d.as_usize();
    let dim = d.pow(shares).ok_or(Error::DimensionCapExceeded { dim: u128::MAX, cap: u128::MAX })?;
    let amp = Complex64::new(1.0 / (du as f64).sqrt(), 0.0);
    let mut amps = vec![ZERO; dim];
    // |k,…,k⟩ sits at k·(1 + d + … + d^{s−1})
    let step = (0..shares).fold(0, |acc, _| acc * du + 1);
    for k in 0..du {
        amps[k * step] = amp;
    }
    StateVector::new(amps)
}

/// Seeded, approximately Haar-distributed unitary.
///
/// Gram–Schmidt on the columns of a complex Gaussian matrix; the implicit
/// triangular factor has a real positive diagonal, which fixes the phases.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim < 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    for j in 0..dim {
        // two passes of modified Gram-Schmidt keep the columns orthogonal to
        // well below 1e-12
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[i];
                let proj: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                for (v, a) in rest[0].iter_mut().zip(q) {
                    *v -= proj * a;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

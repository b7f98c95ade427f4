//! Qudit circuit simulation and branch-wise verification of compressed
//! teleportation protocols.
//!
//! The crate builds protocols in which a leader and `n` parties share one
//! multi-party entangled resource state and realize a jointly controlled
//! transformation `Σ_ℓ |ℓ⟩⟨ℓ| ⊗ T_n(ℓ) ⊗ ⋯ ⊗ T_1(ℓ)` with two rounds of
//! classical messages. Every measurement branch is enumerated exactly and
//! compared to the target up to a global phase.

pub mod circuit;
pub mod error;
pub mod gates;
mod par;
pub mod protocols;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, Dim, Party, QuditSystem, StateVector};

/// Whether the crate was built with rayon support.
pub fn parallel_enabled() -> bool {
    par::enabled()
}

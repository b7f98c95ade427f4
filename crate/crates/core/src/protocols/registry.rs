//! Protocols addressable by name.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::random_unitary;
use crate::tensor::{ComplexMatrix, Dim};
use crate::verify::ResourceClaim;

use super::{
    baseline_bidirectional, build_ct_controlled, build_ct_x_compressed, demo_swap, demo_toffoli, swap_matrix,
    target_tc_data_order, target_x_data_order, toffoli_matrix, two_person_teleport, CompressedTransformation,
    Compression, NetworkSpec,
};

pub const PROTOCOLS: [&str; 7] =
    ["ct-controlled", "ct-x", "ct-x-simplified", "two-person", "swap", "toffoli", "baseline-bidir"];

/// A built protocol with the map every branch should realize and the
/// resources it is expected to use.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    pub name: String,
    pub d: Dim,
    pub n: usize,
    pub seed: u64,
    pub circuit: Circuit,
    pub target: ComplexMatrix,
    pub claim: ResourceClaim,
}

fn single_party(name: &str, n: usize) -> Result<()> {
    if n != 1 {
        return Err(Error::Config(format!("{name} has exactly one party, got n={n}")));
    }
    Ok(())
}

/// Build protocol `name` for dimension `d` and `n` parties. Random blocks
/// and gates are drawn from `seed`; fixed demos ignore it.
pub fn instantiate(name: &str, d: u32, n: usize, seed: u64) -> Result<ProtocolInstance> {
    let dim = Dim::new(d)?;
    let claim = |edits, cdits, rounds| ResourceClaim { edits, cdits, rounds: Some(rounds) };
    let (circuit, target, claim) = match name {
        "ct-controlled" => {
            let spec = NetworkSpec::random(dim, n, seed)?;
            (build_ct_controlled(&spec)?, target_tc_data_order(&spec)?, claim(1, 2 * n, 2))
        }
        "ct-x" | "ct-x-simplified" => {
            let spec = NetworkSpec::random(dim, n, seed)?;
            let c = build_ct_x_compressed(&spec, name == "ct-x-simplified")?;
            (c, target_x_data_order(&spec)?, claim(1, 2 * n, 2))
        }
        "two-person" => {
            single_party(name, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let blocks = (0..d).map(|_| random_unitary(dim.as_usize(), rng.next_u64())).collect::<Result<_>>()?;
            let gate = CompressedTransformation::new(dim, 2, 0, Compression::Z, blocks)?;
            (two_person_teleport(&gate)?, gate.matrix_compressed_first(), claim(1, 2, 2))
        }
        "swap" => {
            single_party(name, n)?;
            (demo_swap(dim)?, swap_matrix(dim), claim(3, 6, 6))
        }
        "toffoli" => {
            single_party(name, n)?;
            if d != 2 {
                return Err(Error::Config(format!("toffoli is defined for d=2, got d={d}")));
            }
            (demo_toffoli()?, toffoli_matrix(), claim(1, 2, 2))
        }
        "baseline-bidir" => {
            single_party(name, n)?;
            let gate = random_unitary(dim.as_usize(), seed)?;
            (baseline_bidirectional(&gate, dim)?, gate, claim(2, 4, 2))
        }
        other => return Err(Error::UnknownProtocol(other.to_string())),
    };
    Ok(ProtocolInstance { name: name.to_string(), d: dim, n, seed, circuit, target, claim })
}

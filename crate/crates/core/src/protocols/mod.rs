//! Compressed teleportation circuits and their targets.
//!
//! A leader holding one control qudit and `n` parties each able to apply a
//! controlled transformation `Σ_ℓ |ℓ⟩⟨ℓ| ⊗ T_j(ℓ)` share one `(n+1)`-qudit
//! resource state. After one broadcast from the leader and one reply from
//! each party, the network has applied
//! `T_c = Σ_ℓ |ℓ⟩⟨ℓ| ⊗ T_n(ℓ) ⊗ ⋯ ⊗ T_1(ℓ)` on the data, for every outcome.
//!
//! Circuit wires are laid out as `[qL, gL, g1, t1…, g2, t2…, …]`: leader data,
//! leader share, then each party's share followed by its data wires.

mod compressed;
mod demos;
mod registry;

pub use compressed::{is_z_compressed, Axis, CompressedTransformation, Compression};
pub use demos::{baseline_bidirectional, demo_swap, demo_toffoli, swap_matrix, teleport, toffoli_matrix, two_person_teleport};
pub use registry::{instantiate, ProtocolInstance, PROTOCOLS};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Exponent, Gate, Instruction, NamedState, Resource};
use crate::error::{Error, Result};
use crate::gates::{controlled, fourier, random_unitary, BaseGate, GateName};
use crate::tensor::{permute_wires, tensor, tensor_all, ComplexMatrix, Dim, Party, QuditSystem};

/// Per-party controlled transformations of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub d: Dim,
    /// `blocks[j][ℓ]` is `T_{j+1}(ℓ)`.
    pub blocks: Vec<Vec<ComplexMatrix>>,
}

impl NetworkSpec {
    pub fn new(d: Dim, blocks: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let spec = NetworkSpec { d, blocks };
        spec.validate()?;
        Ok(spec)
    }

    /// One data qudit per party with seeded random blocks.
    pub fn random(d: Dim, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = (0..n)
            .map(|_| (0..d.get()).map(|_| random_unitary(d.as_usize(), rng.next_u64())).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        NetworkSpec::new(d, blocks)
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    /// Data qudits held by party `j` (0-based).
    pub fn party_width(&self, j: usize) -> usize {
        qudits_for(self.blocks[j][0].rows(), self.d).expect("validated")
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Config("network needs at least one party".into()));
        }
        for list in &self.blocks {
            if list.len() != self.d.as_usize() {
                return Err(Error::DimensionMismatch { expected: self.d.as_usize(), actual: list.len() });
            }
            let n = list[0].rows();
            qudits_for(n, self.d).ok_or(Error::DimensionMismatch { expected: self.d.as_usize(), actual: n })?;
            for b in list {
                if !b.is_square() || b.rows() != n {
                    return Err(Error::DimensionMismatch { expected: n, actual: b.rows() });
                }
                b.ensure_unitary(1e-10)?;
            }
        }
        Ok(())
    }
}

/// `k` with `d^k = n`.
pub(crate) fn qudits_for(n: usize, d: Dim) -> Option<usize> {
    (0..=usize::BITS as usize).find(|&k| d.pow(k) == Some(n))
}

/// `Σ_ℓ |ℓ⟩⟨ℓ| ⊗ T_n(ℓ) ⊗ ⋯ ⊗ T_1(ℓ)`, leader control first and the party
/// factors in descending order.
pub fn target_tc(spec: &NetworkSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let blocks: Vec<ComplexMatrix> = (0..spec.d.as_usize())
        .map(|l| tensor_all(spec.blocks.iter().rev().map(|list| &list[l])))
        .collect();
    controlled(&blocks)
}

/// [`target_tc`] with its factors reordered to the circuit data order
/// `[qL, party 1, …, party n]`.
pub fn target_tc_data_order(spec: &NetworkSpec) -> Result<ComplexMatrix> {
    let tc = target_tc(spec)?;
    let widths: Vec<usize> = (0..spec.n()).map(|j| spec.party_width(j)).collect();
    // position of party j's first wire in the descending layout
    let mut start_desc = vec![0; spec.n()];
    let mut pos = 1;
    for j in (0..spec.n()).rev() {
        start_desc[j] = pos;
        pos += widths[j];
    }
    let mut order = vec![0];
    for j in 0..spec.n() {
        order.extend(start_desc[j]..start_desc[j] + widths[j]);
    }
    permute_wires(&tc, spec.d, &order)
}

/// Conjugate the first tensor factor of `op` by `frame`.
pub(crate) fn conjugate_first(op: &ComplexMatrix, frame: &ComplexMatrix) -> ComplexMatrix {
    let rest = ComplexMatrix::identity(op.rows() / frame.rows());
    let e = tensor(frame, &rest);
    &(&e * op) * &e.adjoint()
}

/// X-compressed counterpart of the target: `F_L · T_c · F_L⁻¹` in data order.
pub fn target_x_data_order(spec: &NetworkSpec) -> Result<ComplexMatrix> {
    Ok(conjugate_first(&target_tc_data_order(spec)?, &fourier(spec.d)))
}

/// Wires used by one protocol instance.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub leader: usize,
    pub leader_share: usize,
    /// `(share, data wires)` per party.
    pub parties: Vec<(usize, Vec<usize>)>,
}

impl Layout {
    /// Fresh circuit in the standard wire order.
    pub fn standard(spec: &NetworkSpec) -> (Circuit, Layout) {
        let mut c = Circuit::new(QuditSystem::new(spec.d));
        let leader = c.add_wire("qL", Party::Leader);
        let leader_share = c.add_wire("gL", Party::Leader);
        let parties = (0..spec.n())
            .map(|j| {
                let p = Party::Person(j as u32 + 1);
                let share = c.add_wire(format!("g{}", j + 1), p);
                let w = spec.party_width(j);
                let data = (0..w)
                    .map(|k| {
                        let label = if w == 1 { format!("t{}", j + 1) } else { format!("t{}_{}", j + 1, k) };
                        c.add_wire(label, p)
                    })
                    .collect();
                (share, data)
            })
            .collect();
        (c, Layout { leader, leader_share, parties })
    }

    fn shares(&self) -> Vec<usize> {
        std::iter::once(self.leader_share).chain(self.parties.iter().map(|p| p.0)).collect()
    }
}

fn named(d: Dim, base: BaseGate, power: i64) -> Gate {
    Gate::named(GateName::new(base, power), d)
}

/// Append the controlled-transformation protocol on a prepared layout.
/// Classical wires get `suffix` appended to their labels.
pub(crate) fn ct_controlled_into(c: &mut Circuit, lay: &Layout, blocks: &[Vec<ComplexMatrix>], suffix: &str) -> Result<()> {
    let d = c.d();
    c.prepare(Resource::named(NamedState::Ghz, d, lay.parties.len() + 1)?, &lay.shares())?;
    // copy the leader's control value into the shares: gL ends up at ℓ − k
    c.unitary(named(d, BaseGate::F, -1), &[lay.leader_share])?;
    c.named(GateName::controlled(BaseGate::Z, 1), &[lay.leader_share, lay.leader])?;
    c.unitary(named(d, BaseGate::F, -1), &[lay.leader_share])?;
    let m = c.measure(lay.leader_share, format!("m{suffix}"))?;
    let mut replies = Vec::new();
    for (j, ((share, data), list)) in lay.parties.iter().zip(blocks).enumerate() {
        c.controlled_by(named(d, BaseGate::X, 1), &[*share], Exponent::wire(m))?;
        let mut targets = vec![*share];
        targets.extend(data);
        c.unitary(Gate::inline(controlled(list)?), &targets)?;
        c.unitary(named(d, BaseGate::F, -1), &[*share])?;
        replies.push(c.measure(*share, format!("l{}{suffix}", j + 1))?);
    }
    c.controlled_by(named(d, BaseGate::Z, 1), &[lay.leader], Exponent::sum(replies))
}

/// Party gate for the X-compressed protocol: `(F ⊗ I) · C(T) · (F⁻¹ ⊗ I)`.
pub(crate) fn x_party_gate(list: &[ComplexMatrix], d: Dim) -> Result<ComplexMatrix> {
    Ok(conjugate_first(&controlled(list)?, &fourier(d)))
}

/// Append the X-compressed protocol on a prepared layout.
pub(crate) fn ct_x_into(
    c: &mut Circuit,
    lay: &Layout,
    blocks: &[Vec<ComplexMatrix>],
    simplified: bool,
    suffix: &str,
) -> Result<()> {
    let d = c.d();
    c.prepare(Resource::named(NamedState::Max, d, lay.parties.len() + 1)?, &lay.shares())?;
    c.named(GateName::controlled(BaseGate::X, 1), &[lay.leader_share, lay.leader])?;
    c.unitary(named(d, BaseGate::F, -1), &[lay.leader_share])?;
    if !simplified {
        c.named(GateName::controlled(BaseGate::X, -1), &[lay.leader_share, lay.leader])?;
    }
    let m = c.measure(lay.leader_share, format!("m{suffix}"))?;
    let mut replies = Vec::new();
    for (j, ((share, data), list)) in lay.parties.iter().zip(blocks).enumerate() {
        c.controlled_by(named(d, BaseGate::Z, -1), &[*share], Exponent::wire(m))?;
        let mut targets = vec![*share];
        targets.extend(data);
        c.unitary(Gate::inline(x_party_gate(list, d)?), &targets)?;
        replies.push(c.measure(*share, format!("l{}{suffix}", j + 1))?);
    }
    let mut exp = Exponent::sum(replies);
    if !simplified {
        exp = exp.plus(m, 1);
    }
    c.controlled_by(named(d, BaseGate::X, 1), &[lay.leader], exp)
}

/// Protocol for a controlled (Z-compressed) network transformation, sharing
/// one GHZ state. Every branch is proportional to [`target_tc_data_order`].
pub fn build_ct_controlled(spec: &NetworkSpec) -> Result<Circuit> {
    spec.validate()?;
    let (mut c, lay) = Layout::standard(spec);
    ct_controlled_into(&mut c, &lay, &spec.blocks, "")?;
    Ok(c)
}

/// Protocol for the X-compressed network transformation, sharing one
/// `|Max⟩` state. With `simplified`, the leader's controlled `X⁻¹` and the
/// matching correction are dropped; the branch maps are unchanged.
pub fn build_ct_x_compressed(spec: &NetworkSpec, simplified: bool) -> Result<Circuit> {
    spec.validate()?;
    let (mut c, lay) = Layout::standard(spec);
    ct_x_into(&mut c, &lay, &spec.blocks, simplified, "")?;
    Ok(c)
}

/// The single data wire owned by the leader.
pub(crate) fn leader_data_wire(c: &Circuit) -> Result<usize> {
    let outs = c.data_outputs();
    let candidates: Vec<usize> = c
        .data_inputs()
        .into_iter()
        .filter(|w| outs.contains(w) && c.system().wires[*w].owner == Some(Party::Leader))
        .collect();
    match candidates.as_slice() {
        [w] => Ok(*w),
        _ => Err(Error::Config(format!("expected one leader data wire, found {}", candidates.len()))),
    }
}

/// Move a protocol between X-, Y- and Z-compressed forms by conjugating every
/// operation on the leader's data wire with the local frame change.
///
/// The frames are `I` for Z, `F` for X and `G·F` for Y, so a protocol whose
/// target is `V_from T V_from⁻¹` ends up targeting `V_to T V_to⁻¹`.
pub fn conjugate_variant(c: &Circuit, from: Axis, to: Axis) -> Result<Circuit> {
    if from == to {
        return Ok(c.clone());
    }
    let d = c.d();
    let frame = &to.frame(d) * &from.frame(d).adjoint();
    let leader = leader_data_wire(c)?;
    let conj = |gate: &Gate, targets: &[usize]| -> Gate {
        let pos = targets.iter().position(|&t| t == leader).expect("caller checked");
        let factors: Vec<ComplexMatrix> = (0..targets.len())
            .map(|k| if k == pos { frame.clone() } else { ComplexMatrix::identity(d.as_usize()) })
            .collect();
        let e = tensor_all(&factors);
        Gate::recognized(&(&e * &gate.matrix) * &e.adjoint(), d)
    };
    let mut out = Vec::with_capacity(c.instructions().len());
    for ins in c.instructions() {
        let touches = ins.quantum_targets().contains(&leader);
        out.push(match ins {
            Instruction::Unitary { gate, targets } if touches => {
                Instruction::Unitary { gate: conj(gate, targets), targets: targets.clone() }
            }
            Instruction::ClassicallyControlled { gate, targets, exponent } if touches => {
                Instruction::ClassicallyControlled {
                    gate: conj(gate, targets),
                    targets: targets.clone(),
                    exponent: exponent.clone(),
                }
            }
            Instruction::Measure { .. } if touches => {
                return Err(Error::Config("leader data wire is measured".into()));
            }
            other => other.clone(),
        });
    }
    Circuit::from_parts(c.system().clone(), c.classical_wires().to_vec(), out)
}

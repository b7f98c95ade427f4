//! Ready-made circuits: plain teleportation, two-person gate teleportation,
//! a distributed swap and Toffoli, and the teleport-there-and-back baseline.

use crate::circuit::{Circuit, Exponent, Gate, NamedState, Resource};
use crate::error::{Error, Result};
use crate::gates::{pauli_x, pauli_z, BaseGate, GateName};
use crate::tensor::{ComplexMatrix, Dim, Party, QuditSystem};

use super::{
    build_ct_controlled, build_ct_x_compressed, conjugate_variant, ct_controlled_into, ct_x_into, Axis,
    CompressedTransformation, Compression, Layout, NetworkSpec,
};

/// Append qudit teleportation of `src` onto `dst`, consuming the pair
/// `(near, dst)`. Outcome labels get `suffix`.
fn teleport_into(c: &mut Circuit, src: usize, near: usize, dst: usize, suffix: &str) -> Result<()> {
    let d = c.d();
    c.prepare(Resource::named(NamedState::Ghz, d, 2)?, &[near, dst])?;
    c.named(GateName::controlled(BaseGate::X, -1), &[src, near])?;
    let a = c.measure(near, format!("a{suffix}"))?;
    c.named(GateName::new(BaseGate::F, -1), &[src])?;
    let b = c.measure(src, format!("b{suffix}"))?;
    c.controlled_by(Gate::named(GateName::new(BaseGate::X, -1), d), &[dst], Exponent::wire(a))?;
    c.controlled_by(Gate::named(GateName::new(BaseGate::Z, 1), d), &[dst], Exponent::wire(b))
}

/// Teleport one qudit from the leader to party 1. Every branch is `I / d`.
pub fn teleport(d: Dim) -> Circuit {
    let mut c = Circuit::new(QuditSystem::new(d));
    let q = c.add_wire("q", Party::Leader);
    let near = c.add_wire("eA", Party::Leader);
    let far = c.add_wire("eB", Party::Person(1));
    teleport_into(&mut c, q, near, far, "").expect("fixed circuit");
    c
}

/// Two-person protocol for a compressed transformation. The leader holds the
/// compressed wire; party 1 holds the rest and applies the blocks.
///
/// Branch maps are proportional to [`CompressedTransformation::matrix_compressed_first`].
pub fn two_person_teleport(gate: &CompressedTransformation) -> Result<Circuit> {
    let spec = NetworkSpec::new(gate.d, vec![gate.blocks.clone()])?;
    match &gate.kind {
        Compression::Z => build_ct_controlled(&spec),
        Compression::X => build_ct_x_compressed(&spec, true),
        Compression::Y => conjugate_variant(&build_ct_x_compressed(&spec, true)?, Axis::X, Axis::Y),
        Compression::General { u, v } => {
            let (mut c, lay) = Layout::standard(&spec);
            c.unitary(Gate::recognized(v.clone(), gate.d), &[lay.leader])?;
            ct_controlled_into(&mut c, &lay, &spec.blocks, "")?;
            c.unitary(Gate::recognized(u.clone(), gate.d), &[lay.leader])?;
            Ok(c)
        }
    }
}

/// Qubit Toffoli (controls on wires 0 and 1) as a compressed transformation
/// on wire 0 with blocks `I` and CNOT.
pub fn toffoli_matrix() -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |r, c| {
        let src = if c >= 6 { c ^ 1 } else { c };
        if r == src {
            crate::tensor::ONE
        } else {
            crate::tensor::ZERO
        }
    })
}

/// Toffoli between a leader holding one control and a party holding the
/// other control and the target.
pub fn demo_toffoli() -> Result<Circuit> {
    let d = Dim::new(2)?;
    let cnot = GateName::controlled(BaseGate::X, 1).matrix(d);
    let gate = CompressedTransformation::new(d, 3, 0, Compression::Z, vec![ComplexMatrix::identity(4), cnot])?;
    two_person_teleport(&gate)
}

/// Two-qudit swap `|a, b⟩ ↦ |b, a⟩`.
pub fn swap_matrix(d: Dim) -> ComplexMatrix {
    let n = d.as_usize();
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r == (c % n) * n + c / n {
            crate::tensor::ONE
        } else {
            crate::tensor::ZERO
        }
    })
}

/// Swap the leader's qudit `b` with party 1's qudit `a` using three
/// compressed teleportations: `CX_{a→b} · CX⁻¹_{b→a} · CX_{a→b}` followed by
/// the local negation `F²` on `a`. Data order is `[b, a]`.
pub fn demo_swap(d: Dim) -> Result<Circuit> {
    let mut c = Circuit::new(QuditSystem::new(d));
    let b = c.add_wire("b", Party::Leader);
    let a = c.add_wire("a", Party::Person(1));
    let x = pauli_x(d);
    let z = pauli_z(d);
    // CX_{a→b} is X-compressed on b with blocks Z^{-ℓ}; CX⁻¹_{b→a} is
    // Z-compressed on b with blocks X^{-ℓ}.
    let z_blocks: Vec<ComplexMatrix> = (0..d.get() as i64).map(|l| z.powi(-l)).collect();
    let x_blocks: Vec<ComplexMatrix> = (0..d.get() as i64).map(|l| x.powi(-l)).collect();
    for k in 1..=3 {
        let leader_share = c.add_wire(format!("gL_{k}"), Party::Leader);
        let share = c.add_wire(format!("g1_{k}"), Party::Person(1));
        let lay = Layout { leader: b, leader_share, parties: vec![(share, vec![a])] };
        let suffix = format!("_{k}");
        if k == 2 {
            ct_controlled_into(&mut c, &lay, std::slice::from_ref(&x_blocks), &suffix)?;
        } else {
            ct_x_into(&mut c, &lay, std::slice::from_ref(&z_blocks), true, &suffix)?;
        }
    }
    if d.get() > 2 {
        c.named(GateName::new(BaseGate::F, 2), &[a])?;
    }
    Ok(c)
}

/// Baseline for a single-qudit `gate` held by the leader and applied to
/// party 1's qudit: teleport the qudit to the leader, apply, teleport back.
/// Every branch is `gate / d²`.
pub fn baseline_bidirectional(gate: &ComplexMatrix, d: Dim) -> Result<Circuit> {
    if gate.rows() != d.as_usize() || !gate.is_square() {
        return Err(Error::DimensionMismatch { expected: d.as_usize(), actual: gate.rows() });
    }
    let mut c = Circuit::new(QuditSystem::new(d));
    let q = c.add_wire("q", Party::Person(1));
    let there_near = c.add_wire("e1B", Party::Person(1));
    let there_far = c.add_wire("e1A", Party::Leader);
    let back_near = c.add_wire("e2A", Party::Leader);
    let back_far = c.add_wire("e2B", Party::Person(1));
    teleport_into(&mut c, q, there_near, there_far, "1")?;
    c.unitary(Gate::recognized(gate.clone(), d), &[there_far])?;
    teleport_into(&mut c, there_far, back_near, back_far, "2")?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{enumerate_branches, ledger};
    use crate::gates::{fourier, random_unitary};
    use crate::tensor::equal_up_to_global_phase;

    fn dim(d: u32) -> Dim {
        Dim::new(d).unwrap()
    }

    fn all_branches_equal(c: &Circuit, target: &ComplexMatrix, scale: f64) {
        let bd = enumerate_branches(c).unwrap();
        for b in &bd.branches {
            let k = b.kraus.scale(scale.into());
            assert!(equal_up_to_global_phase(&k, target, 1e-9).unwrap().0, "branch {:?}", b.outcomes);
        }
        assert!(bd.completeness_error() < 1e-9);
    }

    #[test]
    fn teleport_is_identity_per_branch() {
        for d in [2, 3, 5] {
            let c = teleport(dim(d));
            let bd = enumerate_branches(&c).unwrap();
            assert_eq!(bd.len(), (d * d) as usize);
            for b in &bd.branches {
                let k = b.kraus.scale((d as f64).into());
                assert!(k.max_abs_diff(&ComplexMatrix::identity(d as usize)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn toffoli_oracle_matrix() {
        let t = toffoli_matrix();
        assert_eq!(t.column(6), crate::StateVector::basis(8, 7).amplitudes());
        assert_eq!(t.column(3), crate::StateVector::basis(8, 3).amplitudes());
        assert!(t.is_unitary(0.0));
    }

    #[test]
    fn toffoli_four_branches() {
        let c = demo_toffoli().unwrap();
        let bd = enumerate_branches(&c).unwrap();
        assert_eq!(bd.len(), 4);
        all_branches_equal(&c, &toffoli_matrix(), 2.0);
        let l = ledger(&c).unwrap();
        assert_eq!((l.edits, l.total_cdits), (1, 2));
    }

    #[test]
    fn swap_qubits_and_qutrits() {
        let c = demo_swap(dim(2)).unwrap();
        assert_eq!(enumerate_branches(&c).unwrap().len(), 64);
        all_branches_equal(&c, &swap_matrix(dim(2)), 8.0);
        let l = ledger(&c).unwrap();
        assert_eq!((l.edits, l.total_cdits), (3, 6));

        let c3 = demo_swap(dim(3)).unwrap();
        let bd = crate::circuit::enumerate_branches_with(&c3, &crate::circuit::SimOptions::with_cap(1 << 16)).unwrap();
        assert_eq!(bd.len(), 729);
        for b in &bd.branches {
            let k = b.kraus.scale(27.0.into());
            assert!(equal_up_to_global_phase(&k, &swap_matrix(dim(3)), 1e-9).unwrap().0);
        }
    }

    #[test]
    fn two_person_each_kind() {
        let d = dim(3);
        let blocks: Vec<_> = (0..3).map(|s| random_unitary(3, 40 + s).unwrap()).collect();
        let u = random_unitary(3, 1).unwrap();
        let v = fourier(d);
        for kind in [Compression::Z, Compression::X, Compression::Y, Compression::General { u, v }] {
            let g = CompressedTransformation::new(d, 2, 0, kind, blocks.clone()).unwrap();
            let c = two_person_teleport(&g).unwrap();
            all_branches_equal(&c, &g.matrix_compressed_first(), 3.0);
        }
    }

    #[test]
    fn two_person_cz_and_qudit_shift() {
        let d = dim(2);
        let cz = GateName::controlled(BaseGate::Z, 1).matrix(d);
        for wire in [0, 1] {
            let g = CompressedTransformation::detect(&cz, d, wire, Axis::Z, 1e-12).unwrap();
            let c = two_person_teleport(&g).unwrap();
            all_branches_equal(&c, &cz, 2.0);
            let l = ledger(&c).unwrap();
            assert_eq!((l.edits, l.total_cdits), (1, 2));
        }
        let d5 = dim(5);
        let cx3 = GateName::controlled(BaseGate::X, 3).matrix(d5);
        let g = CompressedTransformation::detect(&cx3, d5, 0, Axis::Z, 1e-12).unwrap();
        all_branches_equal(&two_person_teleport(&g).unwrap(), &cx3, 5.0);
    }

    #[test]
    fn baseline_costs_two_edits() {
        let d = dim(3);
        let u = random_unitary(3, 11).unwrap();
        let c = baseline_bidirectional(&u, d).unwrap();
        let bd = enumerate_branches(&c).unwrap();
        assert_eq!(bd.len(), 81);
        for b in &bd.branches {
            assert!(b.kraus.scale(9.0.into()).max_abs_diff(&u).unwrap() < 1e-10);
        }
        let l = ledger(&c).unwrap();
        assert_eq!((l.edits, l.total_cdits, l.rounds), (2, 4, 2));
        assert!(baseline_bidirectional(&u, dim(2)).is_err());
    }
}

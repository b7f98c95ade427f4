//! Entanglement and classical-communication accounting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::tensor::Party;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CditFlow {
    pub sender: Party,
    pub receiver: Party,
    pub count: usize,
}

/// Resources a circuit consumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    /// Entangled resource states spread over at least two parties. One
    /// two-share state is one edit.
    pub edits: usize,
    /// Shares over all counted resource states.
    pub shares: usize,
    pub cdits: Vec<CditFlow>,
    pub total_cdits: usize,
    /// Longest chain of cross-party classical dependencies.
    pub rounds: usize,
}

/// Count resources from the party annotations.
///
/// A cdit is one classical wire delivered to one distinct receiving party; a
/// party's round level is the number of message hops its actions can depend on.
pub fn ledger(c: &Circuit) -> Result<ResourceLedger> {
    let sys = c.system();
    let owner = |w: usize| sys.wires[w].owner.ok_or_else(|| Error::MissingOwner(sys.wires[w].label.clone()));

    let mut edits = 0;
    let mut shares = 0;
    let mut level: BTreeMap<Party, usize> = BTreeMap::new();
    let mut cwire_level = vec![0usize; c.measurement_count()];
    let mut cwire_owner: Vec<Option<Party>> = vec![None; c.measurement_count()];
    let mut delivered: BTreeSet<(usize, Party)> = BTreeSet::new();
    let mut flows: BTreeMap<(Party, Party), usize> = BTreeMap::new();

    for ins in c.instructions() {
        match ins {
            Instruction::PrepareResource { targets, .. } => {
                let parties = targets.iter().map(|&t| owner(t)).collect::<Result<BTreeSet<_>>>()?;
                if parties.len() >= 2 {
                    edits += 1;
                    shares += targets.len();
                }
            }
            Instruction::Measure { target, result } => {
                let p = owner(*target)?;
                cwire_owner[*result] = Some(p);
                cwire_level[*result] = *level.entry(p).or_default();
            }
            Instruction::ClassicallyControlled { targets, exponent, .. } => {
                let receivers = targets.iter().map(|&t| owner(t)).collect::<Result<BTreeSet<_>>>()?;
                for receiver in receivers {
                    let mut need = *level.entry(receiver).or_default();
                    for &(w, coef) in &exponent.terms {
                        if coef % c.d().get() == 0 {
                            continue;
                        }
                        let sender = cwire_owner[w].expect("measured before read");
                        if sender == receiver {
                            need = need.max(cwire_level[w]);
                        } else {
                            need = need.max(cwire_level[w] + 1);
                            if delivered.insert((w, receiver)) {
                                *flows.entry((sender, receiver)).or_default() += 1;
                            }
                        }
                    }
                    level.insert(receiver, need);
                }
            }
            Instruction::Unitary { .. } => {}
        }
    }

    let cdits: Vec<CditFlow> =
        flows.into_iter().map(|((sender, receiver), count)| CditFlow { sender, receiver, count }).collect();
    let total_cdits = cdits.iter().map(|f| f.count).sum();
    let rounds = level.values().copied().max().unwrap_or(0);
    Ok(ResourceLedger { edits, shares, cdits, total_cdits, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Exponent, Gate, NamedState, Resource};
    use crate::gates::{BaseGate, GateName};
    use crate::tensor::{Dim, QuditSystem};

    #[test]
    fn no_measurements_no_cdits() {
        let d = Dim::new(2).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("a", Party::Leader);
        sys.add_wire("b", Party::Person(1));
        let mut c = Circuit::new(sys);
        c.named(GateName::controlled(BaseGate::X, 1), &[0, 1]).unwrap();
        let l = ledger(&c).unwrap();
        assert_eq!((l.edits, l.total_cdits, l.rounds), (0, 0, 0));
    }

    #[test]
    fn local_feed_forward_is_free() {
        let d = Dim::new(2).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("a", Party::Leader);
        sys.add_wire("b", Party::Leader);
        let mut c = Circuit::new(sys);
        let m = c.measure(0, "m").unwrap();
        c.controlled_by(Gate::named(GateName::new(BaseGate::X, 1), d), &[1], Exponent::wire(m)).unwrap();
        let l = ledger(&c).unwrap();
        assert_eq!((l.total_cdits, l.rounds), (0, 0));
    }

    #[test]
    fn one_message_per_receiver_per_wire() {
        let d = Dim::new(3).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("a", Party::Leader);
        sys.add_wire("b", Party::Person(1));
        sys.add_wire("c", Party::Person(1));
        sys.add_wire("e", Party::Person(2));
        let mut c = Circuit::new(sys);
        c.prepare(Resource::named(NamedState::Ghz, d, 3).unwrap(), &[1, 2, 3]).unwrap();
        let m = c.measure(0, "m").unwrap();
        let x = Gate::named(GateName::new(BaseGate::X, 1), d);
        c.controlled_by(x.clone(), &[1], Exponent::wire(m)).unwrap();
        c.controlled_by(x.clone(), &[2], Exponent::wire(m)).unwrap();
        c.controlled_by(x.clone(), &[3], Exponent::wire(m)).unwrap();
        // zero coefficient is not a dependency
        c.controlled_by(x, &[3], Exponent { constant: 1, terms: vec![(m, 3)] }).unwrap();
        let l = ledger(&c).unwrap();
        assert_eq!(l.edits, 1);
        assert_eq!(l.shares, 3);
        assert_eq!(l.total_cdits, 2);
        assert_eq!(l.rounds, 1);
    }

    #[test]
    fn missing_owner_is_an_error() {
        let d = Dim::new(2).unwrap();
        let mut c = Circuit::new(QuditSystem::uniform(d, 2));
        c.measure(0, "m").unwrap();
        assert_eq!(ledger(&c).unwrap_err(), Error::MissingOwner("w0".into()));
    }
}

//! Circuit representation over quantum and classical wires.
//!
//! Wires that are never the target of a [`Instruction::PrepareResource`] are
//! the data inputs; wires that are never measured are the data outputs. A
//! prepared wire must be untouched before its preparation, and a measured wire
//! is never used again.

mod format;
mod ledger;
mod sim;

pub use format::{parse_circuit, render_text, write_circuit};
pub use ledger::{ledger, CditFlow, ResourceLedger};
pub use sim::{enumerate_branches, enumerate_branches_with, sample, Branch, BranchDecomposition, SimOptions};

use crate::error::{Error, Result};
use crate::gates::{ghz_state, max_state, GateName};
use crate::tensor::{ComplexMatrix, Dim, Party, QuditSystem, StateVector};

/// A unitary, optionally carrying a symbolic name it can be rebuilt from.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: Option<GateName>,
    pub matrix: ComplexMatrix,
}

impl Gate {
    pub fn named(name: GateName, d: Dim) -> Self {
        Gate { name: Some(name), matrix: name.matrix(d) }
    }

    pub fn inline(matrix: ComplexMatrix) -> Self {
        Gate { name: None, matrix }
    }

    /// Use a symbolic name when `matrix` matches one within 1e-12.
    pub fn recognized(matrix: ComplexMatrix, d: Dim) -> Self {
        match GateName::recognize(&matrix, d, 1e-12) {
            Some(name) => Gate::named(name, d),
            None => Gate::inline(matrix),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    Ghz,
    Max,
}

impl NamedState {
    pub fn as_str(self) -> &'static str {
        match self {
            NamedState::Ghz => "ghz",
            NamedState::Max => "max",
        }
    }
}

/// State loaded into fresh wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Resource {
    pub name: Option<NamedState>,
    pub state: StateVector,
}

impl Resource {
    pub fn named(name: NamedState, d: Dim, shares: usize) -> Result<Self> {
        let state = match name {
            NamedState::Ghz => ghz_state(d, shares)?,
            NamedState::Max => max_state(d, shares)?,
        };
        Ok(Resource { name: Some(name), state })
    }

    pub fn inline(state: StateVector) -> Self {
        Resource { name: None, state }
    }
}

/// Affine exponent `c₀ + Σ cᵢ·mᵢ` over classical wires, evaluated mod d.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Exponent {
    pub constant: u32,
    /// `(classical wire, coefficient)` pairs.
    pub terms: Vec<(usize, u32)>,
}

impl Exponent {
    pub fn wire(cwire: usize) -> Self {
        Exponent { constant: 0, terms: vec![(cwire, 1)] }
    }

    pub fn sum(cwires: impl IntoIterator<Item = usize>) -> Self {
        Exponent { constant: 0, terms: cwires.into_iter().map(|w| (w, 1)).collect() }
    }

    pub fn plus(mut self, cwire: usize, coefficient: u32) -> Self {
        self.terms.push((cwire, coefficient));
        self
    }

    pub fn eval(&self, values: &[Option<u32>], d: Dim) -> Result<u32> {
        let d = d.get() as u64;
        let mut acc = self.constant as u64 % d;
        for &(w, c) in &self.terms {
            let v = values.get(w).copied().flatten().ok_or_else(|| Error::ReadBeforeWrite(format!("#{w}")))?;
            acc = (acc + c as u64 % d * v as u64) % d;
        }
        Ok(acc as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Unitary { gate: Gate, targets: Vec<usize> },
    Measure { target: usize, result: usize },
    ClassicallyControlled { gate: Gate, targets: Vec<usize>, exponent: Exponent },
    PrepareResource { resource: Resource, targets: Vec<usize> },
}

impl Instruction {
    pub fn quantum_targets(&self) -> &[usize] {
        match self {
            Instruction::Unitary { targets, .. }
            | Instruction::ClassicallyControlled { targets, .. }
            | Instruction::PrepareResource { targets, .. } => targets,
            Instruction::Measure { target, .. } => std::slice::from_ref(target),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalWire {
    pub label: String,
    pub owner: Option<Party>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WireState {
    Untouched,
    Live,
    Measured,
}

/// Ordered instruction list over a [`QuditSystem`] plus classical wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    system: QuditSystem,
    classical: Vec<ClassicalWire>,
    instructions: Vec<Instruction>,
    wire_state: Vec<WireState>,
}

impl Circuit {
    pub fn new(system: QuditSystem) -> Self {
        let wire_state = vec![WireState::Untouched; system.len()];
        Circuit { system, classical: Vec::new(), instructions: Vec::new(), wire_state }
    }

    /// Rebuild and revalidate a circuit from its parts.
    pub fn from_parts(system: QuditSystem, classical: Vec<ClassicalWire>, instructions: Vec<Instruction>) -> Result<Self> {
        let mut c = Circuit::new(system);
        for ins in instructions {
            if let Instruction::Measure { target, result } = ins {
                let cw = classical
                    .get(result)
                    .cloned()
                    .ok_or_else(|| Error::ReadBeforeWrite(format!("#{result}")))?;
                if result != c.classical.len() {
                    return Err(Error::ClassicalRewrite(cw.label));
                }
                c.measure(target, cw.label)?;
            } else {
                c.push(ins)?;
            }
        }
        if c.classical.len() != classical.len() {
            return Err(Error::Config("classical wire without a writing measurement".into()));
        }
        c.classical = classical;
        Ok(c)
    }

    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    pub fn d(&self) -> Dim {
        self.system.d
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn classical_wires(&self) -> &[ClassicalWire] {
        &self.classical
    }

    pub fn add_wire(&mut self, label: impl Into<String>, owner: Party) -> usize {
        self.wire_state.push(WireState::Untouched);
        self.system.add_wire(label, owner)
    }

    pub fn prepare(&mut self, resource: Resource, targets: &[usize]) -> Result<()> {
        self.push(Instruction::PrepareResource { resource, targets: targets.to_vec() })
    }

    pub fn unitary(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        self.push(Instruction::Unitary { gate, targets: targets.to_vec() })
    }

    pub fn named(&mut self, name: GateName, targets: &[usize]) -> Result<()> {
        let gate = Gate::named(name, self.d());
        self.unitary(gate, targets)
    }

    /// Measure `target` into a new classical wire and return its index.
    pub fn measure(&mut self, target: usize, label: impl Into<String>) -> Result<usize> {
        let label = label.into();
        if self.classical.iter().any(|c| c.label == label) {
            return Err(Error::ClassicalRewrite(label));
        }
        self.system.check_wire(target)?;
        self.check_live(target, "measure")?;
        let result = self.classical.len();
        self.classical.push(ClassicalWire { label, owner: self.system.wires[target].owner });
        self.wire_state[target] = WireState::Measured;
        self.instructions.push(Instruction::Measure { target, result });
        Ok(result)
    }

    pub fn controlled_by(&mut self, gate: Gate, targets: &[usize], exponent: Exponent) -> Result<()> {
        self.push(Instruction::ClassicallyControlled { gate, targets: targets.to_vec(), exponent })
    }

    pub fn push(&mut self, ins: Instruction) -> Result<()> {
        let d = self.d();
        match &ins {
            Instruction::Unitary { gate, targets } => {
                self.check_targets(targets)?;
                check_gate(gate, targets.len(), d)?;
                self.touch(targets)?;
            }
            Instruction::ClassicallyControlled { gate, targets, exponent } => {
                self.check_targets(targets)?;
                check_gate(gate, targets.len(), d)?;
                for &(w, _) in &exponent.terms {
                    if w >= self.classical.len() {
                        return Err(Error::ReadBeforeWrite(format!("#{w}")));
                    }
                }
                self.touch(targets)?;
            }
            Instruction::PrepareResource { resource, targets } => {
                self.check_targets(targets)?;
                let expected = d.pow(targets.len()).unwrap_or(usize::MAX);
                if resource.state.dim() != expected {
                    return Err(Error::DimensionMismatch { expected, actual: resource.state.dim() });
                }
                if !resource.state.is_normalized() {
                    return Err(Error::NotNormalized(resource.state.norm()));
                }
                for &t in targets {
                    if self.wire_state[t] != WireState::Untouched {
                        return Err(Error::WireNotLive {
                            wire: self.system.wires[t].label.clone(),
                            reason: "prepared after first use",
                        });
                    }
                }
                for &t in targets {
                    self.wire_state[t] = WireState::Live;
                }
            }
            Instruction::Measure { target, result } => {
                // Route through `measure` so the classical wire is created.
                let label = self
                    .classical
                    .get(*result)
                    .map(|c| c.label.clone())
                    .unwrap_or_else(|| format!("c{result}"));
                if *result != self.classical.len() {
                    return Err(Error::ClassicalRewrite(label));
                }
                self.measure(*target, label)?;
                return Ok(());
            }
        }
        self.instructions.push(ins);
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            self.system.check_wire(t)?;
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    fn check_live(&self, t: usize, what: &'static str) -> Result<()> {
        if self.wire_state[t] == WireState::Measured {
            return Err(Error::WireNotLive { wire: self.system.wires[t].label.clone(), reason: what });
        }
        Ok(())
    }

    fn touch(&mut self, targets: &[usize]) -> Result<()> {
        for &t in targets {
            self.check_live(t, "used after measurement")?;
        }
        for &t in targets {
            self.wire_state[t] = WireState::Live;
        }
        Ok(())
    }

    /// Wires never targeted by a resource preparation, ascending.
    pub fn data_inputs(&self) -> Vec<usize> {
        let mut prepared = vec![false; self.system.len()];
        for ins in &self.instructions {
            if let Instruction::PrepareResource { targets, .. } = ins {
                for &t in targets {
                    prepared[t] = true;
                }
            }
        }
        (0..self.system.len()).filter(|&w| !prepared[w]).collect()
    }

    /// Wires never measured, ascending.
    pub fn data_outputs(&self) -> Vec<usize> {
        (0..self.system.len()).filter(|&w| self.wire_state[w] != WireState::Measured).collect()
    }

    /// Ancilla wires: everything that is not a data input.
    pub fn ancillas(&self) -> Vec<usize> {
        let inputs = self.data_inputs();
        (0..self.system.len()).filter(|w| !inputs.contains(w)).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.d().pow(self.data_inputs().len()).unwrap_or(usize::MAX)
    }

    pub fn output_dim(&self) -> usize {
        self.d().pow(self.data_outputs().len()).unwrap_or(usize::MAX)
    }

    pub fn measurement_count(&self) -> usize {
        self.classical.len()
    }
}

fn check_gate(gate: &Gate, arity: usize, d: Dim) -> Result<()> {
    let expected = d.pow(arity).unwrap_or(usize::MAX);
    if gate.matrix.rows() != expected || !gate.matrix.is_square() {
        return Err(Error::DimensionMismatch { expected, actual: gate.matrix.rows() });
    }
    gate.matrix.ensure_unitary(1e-9)
}

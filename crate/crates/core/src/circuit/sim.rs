//! Exact branch enumeration and Born-rule sampling.
//!
//! The simulator carries a register whose rows span the currently live wires
//! and whose columns span the data input basis. Preparations append wires and
//! measurements drop them, so a branch never stores more than it needs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{digits, from_digits, ComplexMatrix, StateVector, DEFAULT_DIM_CAP, ZERO};

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Upper bound on `d^wires` for the whole circuit.
    pub dim_cap: u128,
    /// Fan out over branches and register columns with rayon. Ignored when
    /// the `parallel` feature is off.
    pub parallel: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { dim_cap: DEFAULT_DIM_CAP, parallel: true }
    }
}

impl SimOptions {
    pub fn with_cap(dim_cap: u128) -> Self {
        SimOptions { dim_cap, ..Self::default() }
    }

    pub fn sequential() -> Self {
        SimOptions { parallel: false, ..Self::default() }
    }
}

/// One measurement record and the map it induces on the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// One digit per measurement, in instruction order.
    pub outcomes: Vec<u32>,
    /// Data-in to data-out map for this record.
    pub kraus: ComplexMatrix,
    /// Probability for a maximally mixed data input: `‖K‖²_F / dim_in`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    /// Sorted lexicographically by outcome record.
    pub branches: Vec<Branch>,
    pub input_dim: usize,
    pub output_dim: usize,
}

impl BranchDecomposition {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.branches.iter().map(|b| b.weight).sum()
    }

    /// `‖Σ_b K_b†K_b − I‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.input_dim, self.input_dim);
        for b in &self.branches {
            acc = acc.add(&(&b.kraus.adjoint() * &b.kraus)).expect("branch shapes agree");
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.input_dim)).expect("square")
    }

    pub fn get(&self, outcomes: &[u32]) -> Option<&Branch> {
        self.branches.binary_search_by(|b| b.outcomes.as_slice().cmp(outcomes)).ok().map(|i| &self.branches[i])
    }

    /// Largest entrywise Kraus difference against another decomposition, or
    /// infinity when the outcome records differ.
    pub fn max_kraus_diff(&self, other: &Self) -> f64 {
        if self.branches.len() != other.branches.len() {
            return f64::INFINITY;
        }
        self.branches
            .iter()
            .zip(&other.branches)
            .map(|(a, b)| {
                if a.outcomes != b.outcomes {
                    return f64::INFINITY;
                }
                a.kraus.max_abs_diff(&b.kraus).unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

/// Column-major amplitudes over the live wires, one column per data input.
#[derive(Debug, Clone)]
struct Register {
    d: usize,
    wires: Vec<usize>,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Register {
    fn identity(d: usize, wires: Vec<usize>) -> Self {
        let rows = d.pow(wires.len() as u32);
        let mut data = vec![ZERO; rows * rows];
        for i in 0..rows {
            data[i * rows + i] = Complex64::new(1.0, 0.0);
        }
        Register { d, wires, rows, cols: rows, data }
    }

    fn from_state(d: usize, wires: Vec<usize>, state: &[Complex64]) -> Self {
        Register { d, rows: state.len(), cols: 1, wires, data: state.to_vec() }
    }

    fn position(&self, wire: usize) -> usize {
        self.wires.iter().position(|&w| w == wire).expect("validated circuit keeps targets live")
    }

    fn stride(&self, pos: usize) -> usize {
        self.d.pow((self.wires.len() - 1 - pos) as u32)
    }

    fn apply(&mut self, gate: &ComplexMatrix, targets: &[usize], parallel: bool) {
        let strides: Vec<usize> = targets.iter().map(|&t| self.stride(self.position(t))).collect();
        let k = targets.len();
        let gdim = gate.rows();
        let d = self.d;
        let offsets: Vec<usize> =
            (0..gdim).map(|t| digits(t, d, k).iter().zip(&strides).map(|(x, s)| x * s).sum()).collect();
        let bases: Vec<usize> =
            (0..self.rows).filter(|&i| strides.iter().all(|&s| (i / s) % d == 0)).collect();
        let g = gate.as_slice();
        let rows = self.rows;
        let parallel = parallel && self.cols > 1 && rows * self.cols >= 1 << 12;
        par::for_each_chunk_mut(&mut self.data, rows, parallel, |col| {
            let mut buf = vec![ZERO; gdim];
            for &base in &bases {
                for (slot, &off) in buf.iter_mut().zip(&offsets) {
                    *slot = col[base + off];
                }
                for (r, &off) in offsets.iter().enumerate() {
                    let row = &g[r * gdim..(r + 1) * gdim];
                    col[base + off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
                }
            }
        });
    }

    /// Tensor `state` onto the register as new least-significant wires.
    fn prepare(&mut self, state: &[Complex64], targets: &[usize]) {
        let sd = state.len();
        let new_rows = self.rows * sd;
        let mut data = vec![ZERO; new_rows * self.cols];
        for c in 0..self.cols {
            let src = &self.data[c * self.rows..(c + 1) * self.rows];
            let dst = &mut data[c * new_rows..(c + 1) * new_rows];
            for (r, &a) in src.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (s, &b) in state.iter().enumerate() {
                    dst[r * sd + s] = a * b;
                }
            }
        }
        self.wires.extend_from_slice(targets);
        self.rows = new_rows;
        self.data = data;
    }

    /// Squared norm of the slice where `wire` reads `outcome`, per column summed.
    fn outcome_probabilities(&self, wire: usize) -> Vec<f64> {
        let s = self.stride(self.position(wire));
        let mut p = vec![0.0; self.d];
        for c in 0..self.cols {
            for (i, a) in self.data[c * self.rows..(c + 1) * self.rows].iter().enumerate() {
                p[(i / s) % self.d] += a.norm_sqr();
            }
        }
        p
    }

    /// Keep the `outcome` slice of `wire` and drop the wire.
    fn project(&self, wire: usize, outcome: usize) -> Register {
        let pos = self.position(wire);
        let lo = self.stride(pos);
        let new_rows = self.rows / self.d;
        let mut data = Vec::with_capacity(new_rows * self.cols);
        for c in 0..self.cols {
            let col = &self.data[c * self.rows..(c + 1) * self.rows];
            for j in 0..new_rows {
                let (hi, low) = (j / lo, j % lo);
                data.push(col[(hi * self.d + outcome) * lo + low]);
            }
        }
        let mut wires = self.wires.clone();
        wires.remove(pos);
        Register { d: self.d, wires, rows: new_rows, cols: self.cols, data }
    }

    fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    /// Rows reordered so the live wires read in ascending wire order.
    fn into_matrix(self) -> ComplexMatrix {
        let m = self.wires.len();
        let mut sorted = self.wires.clone();
        sorted.sort_unstable();
        let order: Vec<usize> = self.wires.iter().map(|w| sorted.binary_search(w).unwrap()).collect();
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let live = digits(r, self.d, m);
            let mut asc = vec![0; m];
            for (pos, &x) in live.iter().enumerate() {
                asc[order[pos]] = x;
            }
            let target = from_digits(&asc, self.d);
            for c in 0..self.cols {
                out[(target, c)] = self.data[c * self.rows + r];
            }
        }
        out
    }
}

/// Split on every measurement and return the Kraus map of each outcome record.
pub fn enumerate_branches(c: &Circuit) -> Result<BranchDecomposition> {
    enumerate_branches_with(c, &SimOptions::default())
}

pub fn enumerate_branches_with(c: &Circuit, opts: &SimOptions) -> Result<BranchDecomposition> {
    c.system().check_cap(opts.dim_cap)?;
    let d = c.d().as_usize();
    let inputs = c.data_inputs();
    let reg = Register::identity(d, inputs);
    let values = vec![None; c.measurement_count()];
    let raw = run_branches(c, reg, 0, Vec::new(), values, opts)?;
    let input_dim = c.input_dim();
    let branches = raw
        .into_iter()
        .map(|(outcomes, kraus)| {
            let weight = kraus.frobenius_sqr() / input_dim as f64;
            Branch { outcomes, kraus, weight }
        })
        .collect();
    Ok(BranchDecomposition { branches, input_dim, output_dim: c.output_dim() })
}

type RawBranch = (Vec<u32>, ComplexMatrix);

fn run_branches(
    c: &Circuit,
    mut reg: Register,
    start: usize,
    outcomes: Vec<u32>,
    values: Vec<Option<u32>>,
    opts: &SimOptions,
) -> Result<Vec<RawBranch>> {
    let d = c.d();
    for (pc, ins) in c.instructions().iter().enumerate().skip(start) {
        match ins {
            Instruction::Unitary { gate, targets } => reg.apply(&gate.matrix, targets, opts.parallel),
            Instruction::ClassicallyControlled { gate, targets, exponent } => {
                let e = exponent.eval(&values, d)?;
                if e != 0 {
                    reg.apply(&gate.matrix.powi(e as i64), targets, opts.parallel);
                }
            }
            Instruction::PrepareResource { resource, targets } => reg.prepare(resource.state.amplitudes(), targets),
            Instruction::Measure { target, result } => {
                let children: Vec<u32> = (0..d.get()).collect();
                let reg = &reg;
                let results = par::map_collect(children, opts.parallel, |k| {
                    let sub = reg.project(*target, k as usize);
                    let mut rec = outcomes.clone();
                    rec.push(k);
                    let mut vals = values.clone();
                    vals[*result] = Some(k);
                    run_branches(c, sub, pc + 1, rec, vals, opts)
                });
                let mut all = Vec::new();
                for r in results {
                    all.extend(r?);
                }
                return Ok(all);
            }
        }
    }
    Ok(vec![(outcomes, reg.into_matrix())])
}

/// Sample one measurement record for a concrete input and return the
/// normalized output state on the data outputs.
pub fn sample(c: &Circuit, input: &StateVector, seed: u64) -> Result<(Vec<u32>, StateVector)> {
    let expected = c.input_dim();
    if input.dim() != expected {
        return Err(Error::DimensionMismatch { expected, actual: input.dim() });
    }
    let d = c.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reg = Register::from_state(d.as_usize(), c.data_inputs(), input.amplitudes());
    let mut values = vec![None; c.measurement_count()];
    let mut outcomes = Vec::new();
    for ins in c.instructions() {
        match ins {
            Instruction::Unitary { gate, targets } => reg.apply(&gate.matrix, targets, false),
            Instruction::ClassicallyControlled { gate, targets, exponent } => {
                let e = exponent.eval(&values, d)?;
                if e != 0 {
                    reg.apply(&gate.matrix.powi(e as i64), targets, false);
                }
            }
            Instruction::PrepareResource { resource, targets } => reg.prepare(resource.state.amplitudes(), targets),
            Instruction::Measure { target, result } => {
                let probs = reg.outcome_probabilities(*target);
                let total: f64 = probs.iter().sum();
                if total.is_nan() || total <= f64::MIN_POSITIVE {
                    return Err(Error::ProbabilityUnderflow(total));
                }
                let u = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = probs.len() - 1;
                for (k, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        chosen = k;
                        break;
                    }
                }
                let p = probs[chosen] / total;
                if p < 1e-300 {
                    return Err(Error::ProbabilityUnderflow(p));
                }
                reg = reg.project(*target, chosen);
                reg.scale(1.0 / probs[chosen].sqrt());
                values[*result] = Some(chosen as u32);
                outcomes.push(chosen as u32);
            }
        }
    }
    let out = reg.into_matrix().column(0);
    let state = StateVector::residue(out);
    Ok((outcomes, state.normalize()?))
}

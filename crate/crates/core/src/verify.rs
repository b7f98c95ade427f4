//! Branch-by-branch comparison of circuits against target maps, resource
//! claims, parameter sweeps and report serialization.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{enumerate_branches_with, ledger, BranchDecomposition, Circuit, Instruction, ResourceLedger, SimOptions};
use crate::error::{Error, Result};
use crate::par;
use crate::protocols::{instantiate, ProtocolInstance};
use crate::tensor::ComplexMatrix;

pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

/// Expected resource use. `rounds: None` leaves rounds unchecked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceClaim {
    pub edits: usize,
    pub cdits: usize,
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub pass: bool,
    pub ledger: ResourceLedger,
    /// One line per field that differs.
    pub mismatches: Vec<String>,
}

/// Compare `ledger(c)` to `expected` field by field.
pub fn verify_resource_claims(c: &Circuit, expected: &ResourceClaim) -> Result<ClaimCheck> {
    let l = ledger(c)?;
    let mut mismatches = Vec::new();
    if l.edits != expected.edits {
        mismatches.push(format!("edits: expected {}, got {}", expected.edits, l.edits));
    }
    if l.total_cdits != expected.cdits {
        mismatches.push(format!("cdits: expected {}, got {}", expected.cdits, l.total_cdits));
    }
    if let Some(r) = expected.rounds {
        if l.rounds != r {
            mismatches.push(format!("rounds: expected {r}, got {}", l.rounds));
        }
    }
    Ok(ClaimCheck { pass: mismatches.is_empty(), ledger: l, mismatches })
}

/// Edit and cdit ratios of a protocol against a baseline.
pub fn savings(protocol: &ResourceLedger, baseline: &ResourceLedger) -> (f64, f64) {
    (
        protocol.edits as f64 / baseline.edits as f64,
        protocol.total_cdits as f64 / baseline.total_cdits as f64,
    )
}

/// Deviation statistics of a branch decomposition against a target.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCheck {
    pub branch_count: usize,
    /// `max_b max|√N·K_b − e^{iθ_b}·T|` with `θ_b` read off the target's
    /// largest entry.
    pub max_deviation: f64,
    pub weight_sum_error: f64,
    pub phases: Vec<f64>,
}

/// Compare each branch, rescaled by `√(branch count)`, to `target`.
pub fn check_decomposition(bd: &BranchDecomposition, target: &ComplexMatrix) -> Result<BranchCheck> {
    if target.rows() != bd.output_dim || target.cols() != bd.input_dim {
        return Err(Error::ShapeMismatch(target.rows(), target.cols(), bd.output_dim, bd.input_dim));
    }
    let pivot = target
        .as_slice()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .ok_or(Error::ZeroOperator)?;
    let t = target.as_slice()[pivot];
    if t.norm() == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let scale = (bd.len() as f64).sqrt();
    let mut max_deviation: f64 = 0.0;
    let mut phases = Vec::with_capacity(bd.len());
    for b in &bd.branches {
        let k = b.kraus.as_slice();
        let theta = (k[pivot] * scale / t).arg().rem_euclid(std::f64::consts::TAU);
        let rot = Complex64::from_polar(1.0, theta);
        let dev = k.iter().zip(target.as_slice()).map(|(&x, &y)| (x * scale - rot * y).norm()).fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
        phases.push(theta);
    }
    Ok(BranchCheck { branch_count: bd.len(), max_deviation, weight_sum_error: (bd.weight_sum() - 1.0).abs(), phases })
}

/// Outcome of one verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub protocol: String,
    pub d: u32,
    pub n: usize,
    pub seed: Option<u64>,
    pub branch_count: usize,
    pub max_deviation: f64,
    pub weight_sum_error: f64,
    pub phases: Vec<f64>,
    pub ledger: Option<ResourceLedger>,
    pub claim: Option<ResourceClaim>,
    pub claims_hold: bool,
    pub pass: bool,
    /// Cell not run because it would exceed the dimension cap.
    pub skipped: bool,
    pub note: Option<String>,
    pub tol: f64,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time: f64,
}

impl VerificationReport {
    fn failed(protocol: &str, d: u32, n: usize, seed: Option<u64>, tol: f64, err: &Error) -> Self {
        VerificationReport {
            protocol: protocol.to_string(),
            d,
            n,
            seed,
            branch_count: 0,
            max_deviation: f64::NAN,
            weight_sum_error: f64::NAN,
            phases: Vec::new(),
            ledger: None,
            claim: None,
            claims_hold: false,
            pass: false,
            skipped: matches!(err, Error::DimensionCapExceeded { .. }),
            note: Some(err.to_string()),
            tol,
            wall_time: 0.0,
        }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        let status = if self.skipped {
            "SKIP"
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!(
            "{status} {} d={} n={} seed={seed} branches={} max_dev={:.3e} weight_err={:.3e}",
            self.protocol, self.d, self.n, self.branch_count, self.max_deviation, self.weight_sum_error
        );
        if let Some(l) = &self.ledger {
            line.push_str(&format!(" edits={} cdits={} rounds={}", l.edits, l.total_cdits, l.rounds));
        }
        if let Some(note) = &self.note {
            line.push_str(&format!(" ({note})"));
        }
        line
    }
}

/// Verify `c` against `target` with default simulation options.
pub fn verify(c: &Circuit, target: &ComplexMatrix, tol: f64) -> Result<VerificationReport> {
    verify_with(c, target, tol, &SimOptions::default())
}

pub fn verify_with(c: &Circuit, target: &ComplexMatrix, tol: f64, opts: &SimOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    if target.rows() != c.output_dim() || target.cols() != c.input_dim() {
        return Err(Error::ShapeMismatch(target.rows(), target.cols(), c.output_dim(), c.input_dim()));
    }
    let bd = enumerate_branches_with(c, opts)?;
    let check = check_decomposition(&bd, target)?;
    let l = ledger(c).ok();
    let pass = check.max_deviation <= tol && check.weight_sum_error <= tol;
    Ok(VerificationReport {
        protocol: "circuit".into(),
        d: c.d().get(),
        n: 0,
        seed: None,
        branch_count: check.branch_count,
        max_deviation: check.max_deviation,
        weight_sum_error: check.weight_sum_error,
        phases: check.phases,
        ledger: l,
        claim: None,
        claims_hold: true,
        pass,
        skipped: false,
        note: None,
        tol,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Verify a named instance, including its resource claim.
pub fn verify_instance(inst: &ProtocolInstance, tol: f64, opts: &SimOptions) -> VerificationReport {
    let seed = Some(inst.seed);
    let d = inst.d.get();
    let run = || -> Result<VerificationReport> {
        let mut r = verify_with(&inst.circuit, &inst.target, tol, opts)?;
        let claims = verify_resource_claims(&inst.circuit, &inst.claim)?;
        r.protocol = inst.name.clone();
        r.n = inst.n;
        r.seed = seed;
        r.claim = Some(inst.claim);
        r.claims_hold = claims.pass;
        r.pass &= claims.pass;
        if !claims.pass {
            r.note = Some(claims.mismatches.join("; "));
        }
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport::failed(&inst.name, d, inst.n, seed, tol, &e))
}

/// Build and verify a protocol by name. Never returns an error: problems are
/// recorded in the report.
pub fn verify_named(protocol: &str, d: u32, n: usize, seed: u64, tol: f64, opts: &SimOptions) -> VerificationReport {
    match instantiate(protocol, d, n, seed) {
        Ok(inst) => verify_instance(&inst, tol, opts),
        Err(e) => VerificationReport::failed(protocol, d, n, Some(seed), tol, &e),
    }
}

/// Verify every `(d, n, seed)` cell, in that nesting order. Failures and
/// cap violations are reported per cell.
pub fn sweep(protocol: &str, ds: &[u32], ns: &[usize], seeds: &[u64], tol: f64, opts: &SimOptions) -> Vec<VerificationReport> {
    let cells: Vec<(u32, usize, u64)> =
        ds.iter().flat_map(|&d| ns.iter().flat_map(move |&n| seeds.iter().map(move |&s| (d, n, s)))).collect();
    // cells run in parallel; each cell simulates on its own thread
    let inner = SimOptions { parallel: false, ..*opts };
    par::map_collect(cells, opts.parallel, |(d, n, s)| verify_named(protocol, d, n, s, tol, &inner))
}

/// Copies of `c` with the constant of one classically controlled exponent
/// bumped by one, paired with the instruction index.
pub fn mutate_corrections(c: &Circuit) -> Result<Vec<(usize, Circuit)>> {
    let mut out = Vec::new();
    for (i, ins) in c.instructions().iter().enumerate() {
        if let Instruction::ClassicallyControlled { gate, targets, exponent } = ins {
            let mut exponent = exponent.clone();
            exponent.constant = (exponent.constant + 1) % c.d().get();
            let mut instructions = c.instructions().to_vec();
            instructions[i] = Instruction::ClassicallyControlled { gate: gate.clone(), targets: targets.clone(), exponent };
            out.push((i, Circuit::from_parts(c.system().clone(), c.classical_wires().to_vec(), instructions)?));
        }
    }
    Ok(out)
}

/// One JSON object per line.
pub fn write_json_lines<W: Write>(reports: &[VerificationReport], mut w: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub const CSV_HEADER: [&str; 7] = ["protocol", "d", "n", "seed", "branches", "max_dev", "pass"];

/// Summary table with one row per report.
pub fn write_csv<W: Write>(reports: &[VerificationReport], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        wr.write_record([
            r.protocol.clone(),
            r.d.to_string(),
            r.n.to_string(),
            r.seed.map_or_else(String::new, |s| s.to_string()),
            r.branch_count.to_string(),
            format!("{:.3e}", r.max_deviation),
            r.pass.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

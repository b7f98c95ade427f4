//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use ctsim::circuit::{enumerate_branches_with, ledger, sample, SimOptions};
use ctsim::gates::{fourier, gaussian, ghz_state, max_state, omega_pow, pauli_x, pauli_y, pauli_z, random_unitary};
use ctsim::protocols::{
    baseline_bidirectional, build_ct_controlled, build_ct_x_compressed, demo_swap, demo_toffoli, instantiate,
    swap_matrix, target_tc_data_order, target_x_data_order, toffoli_matrix, NetworkSpec,
};
use ctsim::tensor::{digits, tensor_all};
use ctsim::verify::{check_decomposition, mutate_corrections, savings, verify, verify_with};
use ctsim::{Dim, StateVector};

const GRID: [(u32, usize); 7] = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2), (2, 3)];
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const VERIFY_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;

/// (5, 2) uses 6 wires of dimension 5.
fn grid_opts() -> SimOptions {
    SimOptions::with_cap(5u128.pow(6))
}

fn dim(d: u32) -> Dim {
    Dim::new(d).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_dev: f64 = 0.0;
    let mut worst_weight: f64 = 0.0;
    let mut failures = Vec::new();
    for (d, n) in GRID {
        for seed in SEEDS {
            let spec = NetworkSpec::random(dim(d), n, seed).unwrap();
            let c = build_ct_controlled(&spec).unwrap();
            let target = target_tc_data_order(&spec).unwrap();
            let bd = enumerate_branches_with(&c, &grid_opts()).unwrap();
            let check = check_decomposition(&bd, &target).unwrap();
            let expected = (d as usize).pow(n as u32 + 1);
            let w = 1.0 / expected as f64;
            let weight_err = bd.branches.iter().map(|b| (b.weight - w).abs()).fold(0.0, f64::max);
            worst_dev = worst_dev.max(check.max_deviation);
            worst_weight = worst_weight.max(weight_err);
            if check.max_deviation > VERIFY_TOL || bd.len() != expected || weight_err > WEIGHT_TOL {
                failures.push(format!("(d={d}, n={n}, seed={seed})"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty(),
        format!(
            "{} cells, max dev {worst_dev:.2e} (tol {VERIFY_TOL:e}), max weight err {worst_weight:.2e} (tol {WEIGHT_TOL:e}), {secs:.1}s{}",
            GRID.len() * SEEDS.len(),
            if failures.is_empty() { String::new() } else { format!(", failing {}", failures.join(" ")) }
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_dev: f64 = 0.0;
    let mut worst_diff: f64 = 0.0;
    let mut failures = Vec::new();
    for (d, n) in GRID {
        for seed in SEEDS {
            let spec = NetworkSpec::random(dim(d), n, seed).unwrap();
            let target = target_x_data_order(&spec).unwrap();
            let full = enumerate_branches_with(&build_ct_x_compressed(&spec, false).unwrap(), &grid_opts()).unwrap();
            let simple = enumerate_branches_with(&build_ct_x_compressed(&spec, true).unwrap(), &grid_opts()).unwrap();
            let check = check_decomposition(&simple, &target).unwrap();
            let diff = full.max_kraus_diff(&simple);
            worst_dev = worst_dev.max(check.max_deviation);
            worst_diff = worst_diff.max(diff);
            if check.max_deviation > VERIFY_TOL || check.weight_sum_error > VERIFY_TOL || diff > 1e-10 {
                failures.push(format!("(d={d}, n={n}, seed={seed})"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max dev vs F-conjugated target {worst_dev:.2e} (tol {VERIFY_TOL:e}), simplified vs full {worst_diff:.2e} (tol 1e-10){}",
            if failures.is_empty() { String::new() } else { format!(", failing {}", failures.join(" ")) }
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst_ghz: f64 = 0.0;
    let mut worst_max: f64 = 0.0;
    for d in 2..=7u32 {
        for shares in 2..=4usize {
            let dd = dim(d);
            let f = tensor_all(&vec![fourier(dd); shares]);
            let max = max_state(dd, shares).unwrap();
            let ghz = ghz_state(dd, shares).unwrap();
            let mapped = StateVector::residue(f.apply(max.amplitudes()).unwrap());
            worst_ghz = worst_ghz.max(mapped.max_abs_diff(&ghz));
            // support is the digit strings summing to 0 mod d
            let amp = (d as f64).powf((1.0 - shares as f64) / 2.0);
            for (i, a) in max.amplitudes().iter().enumerate() {
                let sum: usize = digits(i, d as usize, shares).iter().sum();
                let expect = if sum.is_multiple_of(d as usize) { amp } else { 0.0 };
                worst_max = worst_max.max((a.re - expect).abs().max(a.im.abs()));
            }
        }
    }
    outcome(
        worst_ghz <= IDENTITY_TOL && worst_max <= 1e-15,
        format!("GHZ vs F^s Max {worst_ghz:.2e} (tol {IDENTITY_TOL:e}), Max amplitudes {worst_max:.2e} (tol 1e-15)"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=7u32 {
        let dd = dim(d);
        let (x, z, f, g) = (pauli_x(dd), pauli_z(dd), fourier(dd), gaussian(dd));
        let fxf = &(&f * &x) * &f.adjoint();
        let gxg = &(&g * &x) * &g.adjoint();
        let zx = &z * &x;
        let wxz = (&x * &z).scale(omega_pow(dd, 1));
        worst = worst
            .max(fxf.max_abs_diff(&z).unwrap())
            .max(gxg.max_abs_diff(&pauli_y(dd).adjoint()).unwrap())
            .max(zx.max_abs_diff(&wxz).unwrap());
    }
    outcome(worst <= IDENTITY_TOL, format!("max residual over d=2..7 {worst:.2e} (tol {IDENTITY_TOL:e})"))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in 1..=3usize {
        let spec = NetworkSpec::random(dim(2), n, 0).unwrap();
        let l = ledger(&build_ct_controlled(&spec).unwrap()).unwrap();
        let ok = (l.edits, l.total_cdits, l.rounds) == (1, 2 * n, 2);
        pass &= ok;
        parts.push(format!("n={n}: {} edit {} cdits {} rounds", l.edits, l.total_cdits, l.rounds));
    }
    let two = ledger(&instantiate("two-person", 2, 1, 0).unwrap().circuit).unwrap();
    let base = ledger(&baseline_bidirectional(&pauli_z(dim(2)), dim(2)).unwrap()).unwrap();
    let (edit_ratio, cdit_ratio) = savings(&two, &base);
    pass &= (two.edits, two.total_cdits) == (1, 2) && (base.edits, base.total_cdits) == (2, 4);
    pass &= edit_ratio == 0.5 && cdit_ratio == 0.5;
    parts.push(format!("two-person {} edit {} cdits", two.edits, two.total_cdits));
    parts.push(format!("baseline {} edits {} cdits", base.edits, base.total_cdits));
    parts.push(format!("edit ratio {edit_ratio}, cdit ratio {cdit_ratio}"));
    outcome(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let toffoli = verify(&demo_toffoli().unwrap(), &toffoli_matrix(), VERIFY_TOL).unwrap();
    let d = dim(2);
    let swap = verify(&demo_swap(d).unwrap(), &swap_matrix(d), VERIFY_TOL).unwrap();
    outcome(
        toffoli.pass && swap.pass,
        format!(
            "toffoli {} branches dev {:.2e}; swap {} branches dev {:.2e} (tol {VERIFY_TOL:e})",
            toffoli.branch_count, toffoli.max_deviation, swap.branch_count, swap.max_deviation
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut mutants = 0;
    let mut caught = 0;
    let mut min_dev = f64::INFINITY;
    for (d, n) in GRID {
        for seed in SEEDS {
            let spec = NetworkSpec::random(dim(d), n, seed).unwrap();
            let c = build_ct_controlled(&spec).unwrap();
            let target = target_tc_data_order(&spec).unwrap();
            for (_, m) in mutate_corrections(&c).unwrap() {
                let r = verify_with(&m, &target, VERIFY_TOL, &grid_opts()).unwrap();
                mutants += 1;
                min_dev = min_dev.min(r.max_deviation);
                if !r.pass && r.max_deviation >= 0.05 {
                    caught += 1;
                }
            }
        }
    }
    // magnitude sensitivity: scale one branch by 1.01
    let spec = NetworkSpec::random(dim(2), 1, 0).unwrap();
    let mut bd = enumerate_branches_with(&build_ct_controlled(&spec).unwrap(), &SimOptions::default()).unwrap();
    bd.branches[1].kraus = bd.branches[1].kraus.scale(1.01.into());
    let scaled = check_decomposition(&bd, &target_tc_data_order(&spec).unwrap()).unwrap();
    let scaled_fails = scaled.max_deviation > VERIFY_TOL || scaled.weight_sum_error > VERIFY_TOL;
    outcome(
        caught == mutants && scaled_fails,
        format!(
            "{caught}/{mutants} exponent mutants fail, min dev {min_dev:.3} (need >= 0.05); 1.01-scaled branch dev {:.2e} fails: {scaled_fails}",
            scaled.max_deviation
        ),
    )
}

fn criterion_8() -> Outcome {
    const RUNS: usize = 10_000;
    let d = dim(2);
    let spec = NetworkSpec::random(d, 1, 0).unwrap();
    let c = build_ct_controlled(&spec).unwrap();
    let target = target_tc_data_order(&spec).unwrap();
    let input = StateVector::new(random_unitary(4, 99).unwrap().column(0)).unwrap();
    let expected = StateVector::residue(target.apply(input.amplitudes()).unwrap());
    let mut counts = [0usize; 4];
    let mut min_fid: f64 = 1.0;
    for seed in 0..RUNS as u64 {
        let (outcomes, out) = sample(&c, &input, seed).unwrap();
        counts[(outcomes[0] * 2 + outcomes[1]) as usize] += 1;
        min_fid = min_fid.min(out.fidelity(&expected));
    }
    let p = 0.25;
    let sigma = (p * (1.0 - p) / RUNS as f64).sqrt();
    let worst_z = counts.iter().map(|&k| ((k as f64 / RUNS as f64) - p).abs() / sigma).fold(0.0, f64::max);
    outcome(
        worst_z <= 5.0 && min_fid >= 1.0 - 1e-10,
        format!("counts {counts:?}, worst |z| {worst_z:.2} (limit 5), min fidelity 1-{:.1e} (limit 1-1e-10)", 1.0 - min_fid),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("protocol correctness", criterion_1),
        ("x-compressed variant", criterion_2),
        ("state identities", criterion_3),
        ("gate relations", criterion_4),
        ("resource claims", criterion_5),
        ("demonstrations", criterion_6),
        ("negative controls", criterion_7),
        ("sampling consistency", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{status}] {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

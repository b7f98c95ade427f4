//! Line-oriented circuit text format and the fixed-width wire diagram.
//!
//! ```text
//! system d=2 wires=qL:leader,gL:leader,g1:p1,t1:p1
//! prep ghz gL,g1
//! u CZ gL,qL
//! meas gL -> m
//! cgate X g1 exp=0+1*m
//! ```
//!
//! Gates are either symbolic names (`X`, `F^-1`, `CZ`, ...) or inline
//! row-major matrices `m:re,im;re,im;...`. Prepared states are `ghz`, `max`
//! or inline `v:re,im;...`. Lines starting with `#` are comments.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Circuit, ClassicalWire, Exponent, Gate, Instruction, NamedState, Resource};
use crate::error::{Error, Result};
use crate::gates::GateName;
use crate::tensor::{ComplexMatrix, Dim, Party, QuditSystem, StateVector, WireInfo};

pub fn write_circuit(c: &Circuit) -> String {
    let sys = c.system();
    let mut out = String::new();
    let wires: Vec<String> = sys
        .wires
        .iter()
        .map(|w| match w.owner {
            Some(p) => format!("{}:{}", w.label, p),
            None => w.label.clone(),
        })
        .collect();
    writeln!(out, "system d={} wires={}", sys.d, wires.join(",")).unwrap();
    let wl = |ts: &[usize]| ts.iter().map(|&t| sys.wires[t].label.as_str()).collect::<Vec<_>>().join(",");
    for ins in c.instructions() {
        match ins {
            Instruction::PrepareResource { resource, targets } => {
                let state = match resource.name {
                    Some(n) => n.as_str().to_string(),
                    None => format!("v:{}", amplitudes(resource.state.amplitudes())),
                };
                writeln!(out, "prep {} {}", state, wl(targets)).unwrap();
            }
            Instruction::Unitary { gate, targets } => {
                writeln!(out, "u {} {}", gate_token(gate), wl(targets)).unwrap();
            }
            Instruction::Measure { target, result } => {
                writeln!(out, "meas {} -> {}", sys.wires[*target].label, c.classical_wires()[*result].label).unwrap();
            }
            Instruction::ClassicallyControlled { gate, targets, exponent } => {
                let mut exp = exponent.constant.to_string();
                for &(w, coef) in &exponent.terms {
                    write!(exp, "+{}*{}", coef, c.classical_wires()[w].label).unwrap();
                }
                writeln!(out, "cgate {} {} exp={}", gate_token(gate), wl(targets), exp).unwrap();
            }
        }
    }
    out
}

fn gate_token(g: &Gate) -> String {
    match g.name {
        Some(n) => n.to_string(),
        None => format!("m:{}", amplitudes(g.matrix.as_slice())),
    }
}

fn amplitudes(v: &[Complex64]) -> String {
    v.iter().map(|z| format!("{},{}", z.re, z.im)).collect::<Vec<_>>().join(";")
}

fn parse_amplitudes(s: &str, line: usize) -> Result<Vec<Complex64>> {
    s.split(';')
        .map(|pair| {
            let (re, im) = pair.split_once(',').ok_or_else(|| perr(line, format!("bad amplitude `{pair}`")))?;
            let re = re.parse::<f64>().map_err(|_| perr(line, format!("bad real part `{re}`")))?;
            let im = im.parse::<f64>().map_err(|_| perr(line, format!("bad imaginary part `{im}`")))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|ch| !ch.is_whitespace() && !",:;=+*#".contains(ch))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(c) = circuit.as_mut() else {
            circuit = Some(parse_system(&toks, line)?);
            continue;
        };
        let at = |e: Error| match e {
            Error::Parse { .. } => e,
            other => perr(line, other.to_string()),
        };
        match toks.as_slice() {
            ["prep", state, wires] => {
                let targets = wire_list(c.system(), wires, line)?;
                let resource = match *state {
                    "ghz" => Resource::named(NamedState::Ghz, c.d(), targets.len()).map_err(at)?,
                    "max" => Resource::named(NamedState::Max, c.d(), targets.len()).map_err(at)?,
                    s => match s.strip_prefix("v:") {
                        Some(v) => Resource::inline(StateVector::new(parse_amplitudes(v, line)?).map_err(at)?),
                        None => return Err(perr(line, format!("unknown state `{s}`"))),
                    },
                };
                c.prepare(resource, &targets).map_err(at)?;
            }
            ["u", gate, wires] => {
                let targets = wire_list(c.system(), wires, line)?;
                let gate = parse_gate(gate, c.d(), line)?;
                c.unitary(gate, &targets).map_err(at)?;
            }
            ["meas", q, "->", cw] => {
                let target = wire_list(c.system(), q, line)?[0];
                if !valid_label(cw) {
                    return Err(perr(line, format!("bad classical label `{cw}`")));
                }
                c.measure(target, *cw).map_err(at)?;
            }
            ["cgate", gate, wires, exp] => {
                let targets = wire_list(c.system(), wires, line)?;
                let gate = parse_gate(gate, c.d(), line)?;
                let exponent = parse_exponent(exp, c.classical_wires(), c.d(), line)?;
                c.controlled_by(gate, &targets, exponent).map_err(at)?;
            }
            _ => return Err(perr(line, format!("unrecognized instruction `{body}`"))),
        }
    }
    circuit.ok_or_else(|| perr(0, "missing system line"))
}

fn parse_system(toks: &[&str], line: usize) -> Result<Circuit> {
    let (d, wires) = match toks {
        ["system", d, wires] => (d, wires),
        _ => return Err(perr(line, "expected `system d=<int> wires=<label:owner,...>`")),
    };
    let d = d
        .strip_prefix("d=")
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| perr(line, format!("bad dimension `{d}`")))?;
    let d = Dim::new(d).map_err(|e| perr(line, e.to_string()))?;
    let wires = wires.strip_prefix("wires=").ok_or_else(|| perr(line, "missing wires="))?;
    let mut sys = QuditSystem::new(d);
    for w in wires.split(',').filter(|w| !w.is_empty()) {
        let (label, owner) = match w.split_once(':') {
            Some((l, o)) => (l, Some(o.parse::<Party>().map_err(|e| perr(line, e))?)),
            None => (w, None),
        };
        if !valid_label(label) || sys.wire_by_label(label).is_some() {
            return Err(perr(line, format!("bad or duplicate wire label `{label}`")));
        }
        sys.wires.push(WireInfo { label: label.to_string(), owner });
    }
    Ok(Circuit::new(sys))
}

fn wire_list(sys: &QuditSystem, s: &str, line: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(|l| sys.wire_by_label(l).ok_or_else(|| perr(line, format!("unknown wire `{l}`"))))
        .collect()
}

fn parse_gate(tok: &str, d: Dim, line: usize) -> Result<Gate> {
    if let Some(m) = tok.strip_prefix("m:") {
        let entries = parse_amplitudes(m, line)?;
        let n = (entries.len() as f64).sqrt().round() as usize;
        let matrix = ComplexMatrix::from_vec(n, n, entries).map_err(|e| perr(line, e.to_string()))?;
        return Ok(Gate::inline(matrix));
    }
    let name: GateName = tok.parse().map_err(|e| perr(line, e))?;
    Ok(Gate::named(name, d))
}

fn parse_exponent(tok: &str, cwires: &[ClassicalWire], d: Dim, line: usize) -> Result<Exponent> {
    let body = tok.strip_prefix("exp=").ok_or_else(|| perr(line, "missing exp="))?;
    let mut parts = body.split('+');
    let constant = parts
        .next()
        .and_then(|c| c.parse::<u32>().ok())
        .ok_or_else(|| perr(line, format!("bad exponent constant in `{tok}`")))?;
    let mut exp = Exponent { constant: constant % d.get(), terms: Vec::new() };
    for term in parts {
        let (coef, label) = term.split_once('*').ok_or_else(|| perr(line, format!("bad term `{term}`")))?;
        let coef = coef.parse::<u32>().map_err(|_| perr(line, format!("bad coefficient `{coef}`")))?;
        let w = cwires
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| perr(line, Error::ReadBeforeWrite(label.to_string()).to_string()))?;
        exp.terms.push((w, coef % d.get()));
    }
    Ok(exp)
}

/// Fixed-width wire diagram as `#` comment lines followed by the circuit text,
/// so the rendering parses back to the same circuit.
pub fn render_text(c: &Circuit) -> String {
    let sys = c.system();
    let m = sys.len();
    let heads: Vec<String> = sys
        .wires
        .iter()
        .map(|w| match w.owner {
            Some(p) => format!("{} [{}]", w.label, p),
            None => w.label.clone(),
        })
        .collect();
    let head_w = heads.iter().map(|h| h.chars().count()).max().unwrap_or(0);
    let mut rows: Vec<String> = heads.iter().map(|h| format!("{h:<head_w$} ")).collect();

    // wire status: 0 = not yet prepared, 1 = quantum, 2 = classical
    let ancillas = c.ancillas();
    let mut status: Vec<u8> = (0..m).map(|w| if ancillas.contains(&w) { 0 } else { 1 }).collect();

    for (i, ins) in c.instructions().iter().enumerate() {
        let mut cells: Vec<Option<String>> = vec![None; m];
        let targets = ins.quantum_targets();
        match ins {
            Instruction::Unitary { gate, targets } | Instruction::ClassicallyControlled { gate, targets, .. } => {
                let suffix = match ins {
                    Instruction::ClassicallyControlled { exponent, .. } => {
                        format!("^({})", exponent_text(exponent, c.classical_wires()))
                    }
                    _ => String::new(),
                };
                match gate.name {
                    Some(n) if n.controlled => {
                        cells[targets[0]] = Some("*".into());
                        cells[targets[1]] = Some(format!("{}{}", n.target_label(), suffix));
                    }
                    Some(n) => cells[targets[0]] = Some(format!("{n}{suffix}")),
                    None if targets.len() == 1 => cells[targets[0]] = Some(format!("U{i}{suffix}")),
                    None => {
                        for (k, &t) in targets.iter().enumerate() {
                            cells[t] = Some(format!("U{i}.{k}{suffix}"));
                        }
                    }
                }
            }
            Instruction::Measure { target, result } => {
                cells[*target] = Some(format!("M>{}", c.classical_wires()[*result].label));
            }
            Instruction::PrepareResource { resource, targets } => {
                let name = resource.name.map_or_else(|| format!("psi{i}"), |n| n.as_str().to_string());
                for &t in targets {
                    cells[t] = Some(name.clone());
                }
            }
        }
        let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1) + 2;
        let (lo, hi) = (targets.iter().min().copied().unwrap_or(0), targets.iter().max().copied().unwrap_or(0));
        for w in 0..m {
            let fill = match status[w] {
                0 => ' ',
                1 => '-',
                _ => '=',
            };
            let cell = match &cells[w] {
                Some(g) => g.clone(),
                None if targets.len() > 1 && w > lo && w < hi => "|".into(),
                None => String::new(),
            };
            let pad = width - cell.chars().count();
            let left = pad / 2;
            let fill_l = if cells[w].is_some() && status[w] == 0 { ' ' } else { fill };
            rows[w].extend(std::iter::repeat_n(fill_l, left));
            rows[w].push_str(&cell);
            let after = match ins {
                Instruction::PrepareResource { .. } if cells[w].is_some() => '-',
                Instruction::Measure { target, .. } if *target == w => '=',
                _ => fill,
            };
            rows[w].extend(std::iter::repeat_n(after, pad - left));
        }
        match ins {
            Instruction::PrepareResource { targets, .. } => targets.iter().for_each(|&t| status[t] = 1),
            Instruction::Measure { target, .. } => status[*target] = 2,
            _ => {}
        }
    }

    let mut out = format!(
        "# d={} wires={} instructions={} measurements={}\n#\n",
        sys.d,
        m,
        c.instructions().len(),
        c.measurement_count()
    );
    for r in rows {
        writeln!(out, "# {}", r.trim_end()).unwrap();
    }
    out.push_str("#\n");
    out.push_str(&write_circuit(c));
    out
}

fn exponent_text(e: &Exponent, cwires: &[ClassicalWire]) -> String {
    let mut parts: Vec<String> = e
        .terms
        .iter()
        .map(|&(w, coef)| match coef {
            1 => cwires[w].label.clone(),
            k => format!("{k}{}", cwires[w].label),
        })
        .collect();
    if e.constant != 0 || parts.is_empty() {
        parts.insert(0, e.constant.to_string());
    }
    parts.join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{random_unitary, BaseGate};

    fn cnot_circuit() -> Circuit {
        let d = Dim::new(2).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("a", Party::Leader);
        sys.add_wire("b", Party::Person(1));
        let mut c = Circuit::new(sys);
        c.named(GateName::controlled(BaseGate::X, 1), &[0, 1]).unwrap();
        c
    }

    #[test]
    fn identity_render_has_header_and_bare_wires() {
        let d = Dim::new(2).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("q", Party::Leader);
        let c = Circuit::new(sys);
        let text = render_text(&c);
        assert_eq!(text, "# d=2 wires=1 instructions=0 measurements=0\n#\n# q [leader]\n#\nsystem d=2 wires=q:leader\n");
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn cnot_render_places_glyphs() {
        let text = render_text(&cnot_circuit());
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[2].starts_with("# a [leader]") && lines[2].contains('*'));
        assert!(lines[3].starts_with("# b [p1]") && lines[3].contains('X'));
        assert!(!lines[2].contains('X'));
    }

    #[test]
    fn inline_gates_and_states_round_trip() {
        let d = Dim::new(3).unwrap();
        let mut sys = QuditSystem::new(d);
        sys.add_wire("a", Party::Leader);
        sys.add_wire("b", Party::Person(2));
        sys.wires.push(WireInfo { label: "free".into(), owner: None });
        let mut c = Circuit::new(sys);
        let psi = StateVector::new(random_unitary(3, 8).unwrap().column(1)).unwrap();
        c.prepare(Resource::inline(psi), &[1]).unwrap();
        c.unitary(Gate::inline(random_unitary(9, 2).unwrap()), &[1, 0]).unwrap();
        let m = c.measure(1, "m").unwrap();
        c.controlled_by(Gate::inline(random_unitary(3, 3).unwrap()), &[2], Exponent { constant: 2, terms: vec![(m, 2)] })
            .unwrap();
        let text = write_circuit(&c);
        assert_eq!(parse_circuit(&text).unwrap(), c);
        assert_eq!(parse_circuit(&render_text(&c)).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_circuit("system d=2 wires=a:leader\nu Q a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_circuit("system d=2 wires=a:leader,b:p1\ncgate X b exp=0+1*m\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_circuit("system d=1 wires=a:leader\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_circuit("# only a comment\n").is_err());
        assert!(parse_circuit("system d=2 wires=a:boss\n").is_err());
        assert!(parse_circuit("system d=2 wires=a:leader\nmeas a -> m\nmeas a -> n\n").is_err());
    }
}

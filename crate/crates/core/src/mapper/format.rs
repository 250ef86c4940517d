//! Line-oriented text format for mapped circuits.
//!
//! ```text
//! qmap-mapped 1
//! arch 2x2:alltoall/alltoall
//! cost dur_1q=1 dur_2q=1 dur_swap=1 dur_teleport=1 swap_primitive_count=3 readout_rate=1000000 control_bits_per_gate=1000
//! config placement=block seed=0 allow_full=true lookahead=0
//! digest circuit=<sha256> arch=<sha256> config=<sha256>
//! circuit name=bell
//! src OPENQASM 2.0;
//! src qreg q[3];
//! src cx q[0],q[2];
//! initial 0 1 2
//! final 3 1 2
//! depth 2
//! ops 2
//! t=0 teleport p=0>3 c=0>1 d=1
//! t=1 gate g=0 p=3,2 d=1
//! ```
//!
//! Field order is fixed so that identical mappings produce identical files.
//! The digests are recomputed on load; any mismatch is reported as tampering.
//! Gate labels are not stored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    cost_line, MappedCircuit, MapperConfig, OpKind, Placement, PlacementStrategy, TimedOp,
};
use crate::arch::{Architecture, CostModel};
use crate::circuit::parse_circuit;

const MAGIC: &str = "qmap-mapped 1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{what} digest mismatch (file was modified)")]
    Tampered { what: &'static str },
}

pub fn write_mapped(m: &MappedCircuit) -> String {
    let mut out = String::new();
    let cfg = &m.config;
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "arch {}", m.arch.name());
    let _ = writeln!(out, "cost {}", cost_line(&cfg.cost));
    let _ = writeln!(out, "config {}", cfg.canonical());
    let _ = writeln!(
        out,
        "digest circuit={} arch={} config={}",
        m.circuit_digest(),
        m.arch_digest(),
        cfg.digest()
    );
    let _ = writeln!(out, "circuit name={}", m.circuit.name());
    for line in m.circuit.to_qasm().lines() {
        let _ = writeln!(out, "src {line}");
    }
    let _ = writeln!(out, "initial {}", join(m.initial.as_slice()));
    let _ = writeln!(out, "final {}", join(m.final_placement.as_slice()));
    let _ = writeln!(out, "depth {}", m.depth);
    let _ = writeln!(out, "ops {}", m.ops.len());
    for op in &m.ops {
        let _ = writeln!(out, "{}", op_line(op));
    }
    out
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn op_line(op: &TimedOp) -> String {
    let body = match &op.kind {
        OpKind::Gate { gate, physical } => {
            let ps: Vec<String> = physical.iter().map(usize::to_string).collect();
            format!("gate g={gate} p={}", ps.join(","))
        }
        OpKind::Swap { a, b } => format!("swap p={a},{b}"),
        OpKind::Teleport {
            src,
            dst,
            src_core,
            dst_core,
        } => format!("teleport p={src}>{dst} c={src_core}>{dst_core}"),
        OpKind::Exchange {
            a,
            b,
            core_a,
            core_b,
        } => format!("exchange p={a},{b} c={core_a},{core_b}"),
    };
    format!("t={} {body} d={}", op.timestep, op.duration)
}

struct Lines<'a> {
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn err(line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: line + 1,
            message: message.into(),
        }
    }

    /// Next line, which must start with `key `; returns (line index, rest).
    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str), FormatError> {
        match self.iter.next() {
            Some((i, line)) => line
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' ').or((rest.is_empty()).then_some("")))
                .map(|rest| (i, rest))
                .ok_or_else(|| Self::err(i, format!("expected `{key}`"))),
            None => Err(FormatError::Syntax {
                line: 0,
                message: format!("unexpected end of file, expected `{key}`"),
            }),
        }
    }
}

/// Splits `a=1 b=2` into pairs, in order.
fn fields(line: usize, text: &str) -> Result<Vec<(&str, &str)>, FormatError> {
    text.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| Lines::err(line, format!("malformed field `{tok}`")))
        })
        .collect()
}

fn field<'a>(line: usize, fs: &[(&str, &'a str)], key: &str) -> Result<&'a str, FormatError> {
    fs.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Lines::err(line, format!("missing field `{key}`")))
}

fn num<T: std::str::FromStr>(line: usize, text: &str) -> Result<T, FormatError> {
    text.parse()
        .map_err(|_| Lines::err(line, format!("invalid number `{text}`")))
}

fn pair(line: usize, text: &str, sep: char) -> Result<(usize, usize), FormatError> {
    let (a, b) = text
        .split_once(sep)
        .ok_or_else(|| Lines::err(line, format!("expected `a{sep}b`, got `{text}`")))?;
    Ok((num(line, a)?, num(line, b)?))
}

fn placement(line: usize, text: &str, n_physical: usize) -> Result<Placement, FormatError> {
    let v2p = text
        .split_whitespace()
        .map(|t| num(line, t))
        .collect::<Result<Vec<usize>, _>>()?;
    Placement::new(v2p, n_physical).map_err(|e| Lines::err(line, e.to_string()))
}

pub fn parse_mapped(text: &str) -> Result<MappedCircuit, FormatError> {
    let mut lines = Lines {
        iter: text.lines().enumerate().peekable(),
    };
    match lines.iter.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(Lines::err(0, format!("expected `{MAGIC}` header"))),
    }

    let (i, arch_text) = lines.keyed("arch")?;
    let arch: Architecture = arch_text
        .parse()
        .map_err(|e: crate::arch::ArchError| Lines::err(i, e.to_string()))?;

    let (i, cost_text) = lines.keyed("cost")?;
    let fs = fields(i, cost_text)?;
    let cost = CostModel {
        dur_1q: num(i, field(i, &fs, "dur_1q")?)?,
        dur_2q: num(i, field(i, &fs, "dur_2q")?)?,
        dur_swap: num(i, field(i, &fs, "dur_swap")?)?,
        dur_teleport: num(i, field(i, &fs, "dur_teleport")?)?,
        swap_primitive_count: num(i, field(i, &fs, "swap_primitive_count")?)?,
        readout_rate: num(i, field(i, &fs, "readout_rate")?)?,
        control_bits_per_gate: num(i, field(i, &fs, "control_bits_per_gate")?)?,
    };
    cost.validate().map_err(|e| Lines::err(i, e.to_string()))?;

    let (i, cfg_text) = lines.keyed("config")?;
    let fs = fields(i, cfg_text)?;
    let config = MapperConfig {
        placement: field(i, &fs, "placement")?
            .parse::<PlacementStrategy>()
            .map_err(|e| Lines::err(i, e))?,
        seed: num(i, field(i, &fs, "seed")?)?,
        allow_full: num(i, field(i, &fs, "allow_full")?)?,
        lookahead: num(i, field(i, &fs, "lookahead")?)?,
        cost,
    };

    let (i, digest_text) = lines.keyed("digest")?;
    let fs = fields(i, digest_text)?;
    let (circuit_digest, arch_digest, config_digest) = (
        field(i, &fs, "circuit")?.to_string(),
        field(i, &fs, "arch")?.to_string(),
        field(i, &fs, "config")?.to_string(),
    );

    let (i, name_text) = lines.keyed("circuit")?;
    let name = name_text
        .strip_prefix("name=")
        .ok_or_else(|| Lines::err(i, "expected `name=`"))?;

    let mut source = String::new();
    let mut src_start = None;
    while let Some((j, line)) = lines.iter.peek().copied() {
        let Some(rest) = line.strip_prefix("src ").or((line == "src").then_some("")) else {
            break;
        };
        src_start.get_or_insert(j);
        source.push_str(rest);
        source.push('\n');
        lines.iter.next();
    }
    let circuit = parse_circuit(&source)
        .map_err(|e| {
            Lines::err(
                src_start.unwrap_or(i) + e.line - 1,
                format!("embedded circuit: {}", e.kind),
            )
        })?
        .with_name(name);

    let (i, initial_text) = lines.keyed("initial")?;
    let initial = placement(i, initial_text, arch.total_qubits())?;
    let (i, final_text) = lines.keyed("final")?;
    let final_placement = placement(i, final_text, arch.total_qubits())?;
    let (i, depth_text) = lines.keyed("depth")?;
    let depth = num(i, depth_text)?;
    let (i, count_text) = lines.keyed("ops")?;
    let count: usize = num(i, count_text)?;

    let mut ops = Vec::with_capacity(count);
    for (i, line) in lines.iter.by_ref() {
        if line.trim().is_empty() {
            continue;
        }
        ops.push(parse_op(i, line)?);
    }
    if ops.len() != count {
        return Err(Lines::err(
            i,
            format!("header announces {count} ops, found {}", ops.len()),
        ));
    }

    let m = MappedCircuit {
        arch,
        circuit,
        config,
        initial,
        ops,
        final_placement,
        depth,
    };
    if m.circuit_digest() != circuit_digest {
        return Err(FormatError::Tampered { what: "circuit" });
    }
    if m.arch_digest() != arch_digest {
        return Err(FormatError::Tampered { what: "arch" });
    }
    if m.config.digest() != config_digest {
        return Err(FormatError::Tampered { what: "config" });
    }
    Ok(m)
}

fn parse_op(i: usize, line: &str) -> Result<TimedOp, FormatError> {
    let mut toks = line.split_whitespace();
    let t = toks
        .next()
        .and_then(|t| t.strip_prefix("t="))
        .ok_or_else(|| Lines::err(i, "expected `t=<int>`"))?;
    let timestep = num(i, t)?;
    let kind_name = toks
        .next()
        .ok_or_else(|| Lines::err(i, "missing op kind"))?;
    let rest: Vec<&str> = toks.collect();
    let joined = rest.join(" ");
    let fs = fields(i, &joined)?;
    let duration = num(i, field(i, &fs, "d")?)?;
    let p = field(i, &fs, "p")?;
    let kind = match kind_name {
        "gate" => OpKind::Gate {
            gate: num(i, field(i, &fs, "g")?)?,
            physical: p.split(',').map(|x| num(i, x)).collect::<Result<_, _>>()?,
        },
        "swap" => {
            let (a, b) = pair(i, p, ',')?;
            OpKind::Swap { a, b }
        }
        "teleport" => {
            let (src, dst) = pair(i, p, '>')?;
            let (src_core, dst_core) = pair(i, field(i, &fs, "c")?, '>')?;
            OpKind::Teleport {
                src,
                dst,
                src_core,
                dst_core,
            }
        }
        "exchange" => {
            let (a, b) = pair(i, p, ',')?;
            let (core_a, core_b) = pair(i, field(i, &fs, "c")?, ',')?;
            OpKind::Exchange {
                a,
                b,
                core_a,
                core_b,
            }
        }
        other => return Err(Lines::err(i, format!("unknown op kind `{other}`"))),
    };
    Ok(TimedOp {
        timestep,
        duration,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::Topology::{AllToAll, Line};
    use crate::circuit::{gen_random, Circuit, Gate};
    use crate::mapper::map_circuit;

    fn sample() -> MappedCircuit {
        let arch = Architecture::build(2, 2, AllToAll, AllToAll).unwrap();
        let c = Circuit::new("bell", 3, vec![Gate::cx(0, 2)]).unwrap();
        let cfg = MapperConfig {
            allow_full: true,
            ..MapperConfig::default()
        };
        map_circuit(&c, &arch, &cfg).unwrap()
    }

    #[test]
    fn fixture_layout() {
        let text = write_mapped(&sample());
        let tail: Vec<&str> = text.lines().rev().take(6).collect();
        assert_eq!(
            tail,
            vec![
                "t=1 gate g=0 p=3,2 d=1",
                "t=0 teleport p=0>3 c=0>1 d=1",
                "ops 2",
                "depth 2",
                "final 3 1 2",
                "initial 0 1 2",
            ]
        );
        assert!(text.starts_with("qmap-mapped 1\narch 2x2:alltoall/alltoall\n"));
    }

    #[test]
    fn reparses_to_the_same_mapping() {
        let arch = Architecture::build(3, 4, Line, Line).unwrap();
        let c = gen_random(9, 40, 0.7, 11).unwrap();
        let m = map_circuit(&c, &arch, &MapperConfig::default()).unwrap();
        let back = parse_mapped(&write_mapped(&m)).unwrap();
        // gate labels are annotations and are not stored
        assert_eq!(back.circuit.to_qasm(), m.circuit.to_qasm());
        assert_eq!(back.circuit.name(), m.circuit.name());
        assert_eq!(
            (
                &back.arch,
                &back.config,
                &back.initial,
                &back.ops,
                &back.final_placement,
                back.depth
            ),
            (
                &m.arch,
                &m.config,
                &m.initial,
                &m.ops,
                &m.final_placement,
                m.depth
            )
        );
        assert_eq!(write_mapped(&back), write_mapped(&m));
    }

    #[test]
    fn detects_tampering() {
        let text = write_mapped(&sample());
        let edited = text.replace("src cx q[0],q[2];", "src cx q[1],q[2];");
        assert!(matches!(
            parse_mapped(&edited),
            Err(FormatError::Tampered { what: "circuit" })
        ));
        let edited = text.replace("allow_full=true", "allow_full=false");
        assert!(matches!(
            parse_mapped(&edited),
            Err(FormatError::Tampered { what: "config" })
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = write_mapped(&sample()).replace("t=1 gate", "t=x gate");
        match parse_mapped(&text) {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, text.lines().count()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_mapped("not a mapped file").is_err());
    }
}

use std::ops::Deref;

use thiserror::Error;

use super::{MappedCircuit, OpKind, Placement};
use crate::circuit::DependencyDag;

/// First invariant a mapped circuit breaks. `op` indexes `MappedCircuit::ops`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("initial placement covers {got} virtual / {physical} physical qubits, expected {want} / {total}")]
    PlacementShape {
        got: usize,
        physical: usize,
        want: usize,
        total: usize,
    },
    #[error("op {op}: ops are not sorted by timestep")]
    Unsorted { op: usize },
    #[error("op {op}: zero duration")]
    ZeroDuration { op: usize },
    #[error("op {op}: physical qubit {qubit} out of range")]
    QubitOutOfRange { op: usize, qubit: usize },
    #[error("op {op}: physical qubit {qubit} used twice by one op")]
    RepeatedQubit { op: usize, qubit: usize },
    #[error("op {op}: resource conflict on physical qubit {qubit} (busy until {busy_until})")]
    ResourceConflict {
        op: usize,
        qubit: usize,
        busy_until: u64,
    },
    #[error("op {op}: unknown source gate {gate}")]
    UnknownGate { op: usize, gate: usize },
    #[error("op {op}: source gate {gate} emitted more than once")]
    DuplicateGate { op: usize, gate: usize },
    #[error("op {op}: gate {gate} has {got} physical operands, expected {want}")]
    OperandCount {
        op: usize,
        gate: usize,
        got: usize,
        want: usize,
    },
    #[error("op {op}: gate {gate} operand {position} on physical {physical} which holds {found:?}, expected virtual {expected}")]
    WrongOperand {
        op: usize,
        gate: usize,
        position: usize,
        physical: usize,
        expected: usize,
        found: Option<usize>,
    },
    #[error("op {op}: non-adjacent operands {a} and {b}")]
    NotAdjacent { op: usize, a: usize, b: usize },
    #[error("op {op}: gate {gate} starts before its predecessor {pred} finished")]
    DependencyOrder { op: usize, gate: usize, pred: usize },
    #[error("op {op}: teleport source {src} is empty")]
    EmptySource { op: usize, src: usize },
    #[error("op {op}: teleport destination {dst} is occupied")]
    OccupiedDestination { op: usize, dst: usize },
    #[error("op {op}: exchange slot {slot} is empty")]
    EmptyExchangeSlot { op: usize, slot: usize },
    #[error("op {op}: cross-core op between qubits of the same core {core}")]
    SameCore { op: usize, core: usize },
    #[error("op {op}: recorded cores do not match the physical qubits")]
    CoreMismatch { op: usize },
    #[error("source gate {gate} never emitted")]
    MissingGate { gate: usize },
    #[error("replayed placement differs from the recorded final placement")]
    FinalPlacement,
    #[error("recorded depth {recorded} but ops end at {actual}")]
    Depth { recorded: u64, actual: u64 },
}

/// Checks every structural and semantic invariant of `m`.
///
/// Routing ops are replayed from the initial placement; each gate must act on
/// the physical slots currently holding its virtual operands, on coupled
/// qubits, after all of its dependencies have finished.
pub fn verify_mapped(m: &MappedCircuit) -> Result<(), Violation> {
    let arch = &m.arch;
    let total = arch.total_qubits();
    let gates = m.circuit.gates();
    if m.initial.n_virtual() != m.circuit.n_qubits() || m.initial.n_physical() != total {
        return Err(Violation::PlacementShape {
            got: m.initial.n_virtual(),
            physical: m.initial.n_physical(),
            want: m.circuit.n_qubits(),
            total,
        });
    }

    let dag = DependencyDag::build(&m.circuit);
    let mut placement: Placement = m.initial.clone();
    let mut busy_until = vec![0u64; total];
    let mut gate_end: Vec<Option<u64>> = vec![None; gates.len()];
    let mut last_start = 0;

    for (at, op) in m.ops.iter().enumerate() {
        if op.timestep < last_start {
            return Err(Violation::Unsorted { op: at });
        }
        last_start = op.timestep;
        if op.duration == 0 {
            return Err(Violation::ZeroDuration { op: at });
        }

        let qubits = op.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= total {
                return Err(Violation::QubitOutOfRange { op: at, qubit: q });
            }
            if qubits[..i].contains(&q) {
                return Err(Violation::RepeatedQubit { op: at, qubit: q });
            }
            if busy_until[q] > op.timestep {
                return Err(Violation::ResourceConflict {
                    op: at,
                    qubit: q,
                    busy_until: busy_until[q],
                });
            }
        }
        for &q in &qubits {
            busy_until[q] = op.end();
        }

        match &op.kind {
            OpKind::Gate { gate, physical } => {
                let gate = *gate;
                let source = gates
                    .get(gate)
                    .ok_or(Violation::UnknownGate { op: at, gate })?;
                if gate_end[gate].is_some() {
                    return Err(Violation::DuplicateGate { op: at, gate });
                }
                if physical.len() != source.qubits().len() {
                    return Err(Violation::OperandCount {
                        op: at,
                        gate,
                        got: physical.len(),
                        want: source.qubits().len(),
                    });
                }
                for (position, (&p, &v)) in physical.iter().zip(source.qubits()).enumerate() {
                    if placement.virtual_at(p) != Some(v) {
                        return Err(Violation::WrongOperand {
                            op: at,
                            gate,
                            position,
                            physical: p,
                            expected: v,
                            found: placement.virtual_at(p),
                        });
                    }
                }
                if let [a, b] = physical[..] {
                    if !arch.adjacent(a, b) {
                        return Err(Violation::NotAdjacent { op: at, a, b });
                    }
                }
                for &pred in dag.predecessors(gate) {
                    match gate_end[pred] {
                        Some(end) if end <= op.timestep => {}
                        _ => return Err(Violation::DependencyOrder { op: at, gate, pred }),
                    }
                }
                gate_end[gate] = Some(op.end());
            }
            OpKind::Swap { a, b } => {
                if !arch.adjacent(*a, *b) {
                    return Err(Violation::NotAdjacent {
                        op: at,
                        a: *a,
                        b: *b,
                    });
                }
                placement.swap_physical(*a, *b);
            }
            OpKind::Teleport {
                src,
                dst,
                src_core,
                dst_core,
            } => {
                check_cores(arch, at, *src, *dst, *src_core, *dst_core)?;
                if placement.is_free(*src) {
                    return Err(Violation::EmptySource { op: at, src: *src });
                }
                if !placement.is_free(*dst) {
                    return Err(Violation::OccupiedDestination { op: at, dst: *dst });
                }
                placement.swap_physical(*src, *dst);
            }
            OpKind::Exchange {
                a,
                b,
                core_a,
                core_b,
            } => {
                check_cores(arch, at, *a, *b, *core_a, *core_b)?;
                for slot in [*a, *b] {
                    if placement.is_free(slot) {
                        return Err(Violation::EmptyExchangeSlot { op: at, slot });
                    }
                }
                placement.swap_physical(*a, *b);
            }
        }
    }

    if let Some(gate) = gate_end.iter().position(Option::is_none) {
        return Err(Violation::MissingGate { gate });
    }
    if placement != m.final_placement {
        return Err(Violation::FinalPlacement);
    }
    let actual = m.ops.iter().map(|op| op.end()).max().unwrap_or(0);
    if actual != m.depth {
        return Err(Violation::Depth {
            recorded: m.depth,
            actual,
        });
    }
    Ok(())
}

fn check_cores(
    arch: &crate::arch::Architecture,
    op: usize,
    a: usize,
    b: usize,
    core_a: usize,
    core_b: usize,
) -> Result<(), Violation> {
    if arch.core_of(a) != core_a || arch.core_of(b) != core_b {
        return Err(Violation::CoreMismatch { op });
    }
    if core_a == core_b {
        return Err(Violation::SameCore { op, core: core_a });
    }
    Ok(())
}

/// A mapped circuit that passed [`verify_mapped`]. Traffic analysis only
/// accepts this type.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedMapping(MappedCircuit);

impl VerifiedMapping {
    pub fn new(m: MappedCircuit) -> Result<Self, Violation> {
        verify_mapped(&m)?;
        Ok(Self(m))
    }

    pub fn into_inner(self) -> MappedCircuit {
        self.0
    }
}

impl Deref for VerifiedMapping {
    type Target = MappedCircuit;

    fn deref(&self) -> &MappedCircuit {
        &self.0
    }
}

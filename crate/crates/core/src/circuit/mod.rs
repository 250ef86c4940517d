//! Quantum circuits over virtual qubits.
//!
//! A [`Circuit`] is an ordered gate list. Program order is the only ordering
//! information carried; the dependency structure is derived on demand by
//! [`DependencyDag::build`].

mod dag;
mod generate;
mod parse;

pub use dag::DependencyDag;
pub use generate::{gen_qft, gen_qft_with, gen_random, QftOptions};
pub use parse::{parse_circuit, ParseError, ParseErrorKind};

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

/// The gate vocabulary. The mapper only cares about arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// Any single-qubit rotation other than a Hadamard (written `x` in text).
    SingleQubit,
    Hadamard,
    ControlledPhase,
    Cnot,
    Swap,
    Measure,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::SingleQubit | GateKind::Hadamard | GateKind::Measure => 1,
            GateKind::ControlledPhase | GateKind::Cnot | GateKind::Swap => 2,
        }
    }

    /// Mnemonic used by the textual format.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::SingleQubit => "x",
            GateKind::Hadamard => "h",
            GateKind::ControlledPhase => "cp",
            GateKind::Cnot => "cx",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("gate {index}: operand q[{qubit}] outside register of size {n_qubits}")]
    OperandOutOfRange {
        index: usize,
        qubit: usize,
        n_qubits: usize,
    },
    #[error("gate {index}: duplicate operand q[{qubit}]")]
    DuplicateOperand { index: usize, qubit: usize },
    #[error("gate {index}: controlled-phase requires an angle")]
    MissingAngle { index: usize },
    #[error("gate {index}: only controlled-phase carries an angle")]
    UnexpectedAngle { index: usize },
    #[error("gate {index}: measurements must form a trailing suffix of the circuit")]
    MeasureNotTrailing { index: usize },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

/// A single gate application on virtual qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
    angle: Option<f64>,
    label: String,
}

impl Gate {
    pub fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            qubits: [q, q],
            angle: None,
            label: String::new(),
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self {
            kind,
            qubits: [a, b],
            angle: None,
            label: String::new(),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::Hadamard, q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::SingleQubit, q)
    }

    pub fn measure(q: usize) -> Self {
        Self::single(GateKind::Measure, q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::Cnot, control, target)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::Swap, a, b)
    }

    pub fn cp(angle: f64, a: usize, b: usize) -> Self {
        Self {
            angle: Some(angle),
            ..Self::two(GateKind::ControlledPhase, a, b)
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// Virtual operands in their written order.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        if let Some(angle) = self.angle {
            // Debug formatting of f64 is the shortest exact round-trip form.
            write!(f, "({angle:?})")?;
        }
        match self.qubits() {
            [q] => write!(f, " q[{q}];"),
            [a, b] => write!(f, " q[{a}],q[{b}];"),
            _ => unreachable!(),
        }
    }
}

/// An ordered gate sequence over `n_qubits` virtual qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Validates every gate against the register and the trailing-measure rule.
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        gates: Vec<Gate>,
    ) -> Result<Self, CircuitError> {
        if n_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        let mut seen_measure = false;
        for (index, gate) in gates.iter().enumerate() {
            validate_gate(index, gate, n_qubits)?;
            if gate.kind == GateKind::Measure {
                seen_measure = true;
            } else if seen_measure {
                return Err(CircuitError::MeasureNotTrailing { index });
            }
        }
        Ok(Self {
            name: name.into(),
            n_qubits,
            gates,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Gate counts by kind plus ASAP depth.
    pub fn stats(&self) -> CircuitStats {
        let mut by_kind = BTreeMap::new();
        for gate in &self.gates {
            *by_kind.entry(gate.kind).or_insert(0) += 1;
        }
        CircuitStats {
            by_kind,
            total: self.gates.len(),
            two_qubit: self.two_qubit_count(),
            depth: DependencyDag::build(self).depth(),
        }
    }

    /// Renders the circuit in the textual format accepted by [`parse_circuit`].
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\n");
        if !self.name.is_empty() {
            let _ = writeln!(out, "// circuit: {}", self.name);
        }
        let _ = writeln!(out, "qreg q[{}];", self.n_qubits);
        for gate in &self.gates {
            let _ = writeln!(out, "{gate}");
        }
        out
    }
}

fn validate_gate(index: usize, gate: &Gate, n_qubits: usize) -> Result<(), CircuitError> {
    let arity = gate.kind.arity();
    for &qubit in gate.qubits() {
        if qubit >= n_qubits {
            return Err(CircuitError::OperandOutOfRange {
                index,
                qubit,
                n_qubits,
            });
        }
    }
    if arity == 2 && gate.qubits[0] == gate.qubits[1] {
        return Err(CircuitError::DuplicateOperand {
            index,
            qubit: gate.qubits[0],
        });
    }
    match (gate.kind, gate.angle) {
        (GateKind::ControlledPhase, None) => Err(CircuitError::MissingAngle { index }),
        (GateKind::ControlledPhase, Some(_)) | (_, None) => Ok(()),
        (_, Some(_)) => Err(CircuitError::UnexpectedAngle { index }),
    }
}

/// Summary counts of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitStats {
    pub by_kind: BTreeMap<GateKind, usize>,
    pub total: usize,
    pub two_qubit: usize,
    /// `1 + max ASAP layer`, or 0 for an empty circuit.
    pub depth: usize,
}

impl CircuitStats {
    pub fn count(&self, kind: GateKind) -> usize {
        self.by_kind.get(&kind).copied().unwrap_or(0)
    }
}

//! Mapping of circuits onto multi-core architectures.
//!
//! [`map_circuit`] places virtual qubits, then walks the gates in dependency
//! order inserting intra-core SWAP chains and inter-core teleports until every
//! two-qubit gate runs on coupled qubits of one core. Every op is scheduled
//! ASAP on the qubits it occupies. [`verify_mapped`] re-checks the result
//! independently and [`oracle_min_route`] gives the exact routing optimum on
//! tiny instances.

mod format;
mod oracle;
mod placement;
mod route;
mod verify;

pub use format::{parse_mapped, write_mapped, FormatError};
pub use oracle::{oracle_min_route, OracleError, ORACLE_MAX_GATES, ORACLE_MAX_QUBITS};
pub use placement::{initial_placement, Placement};
pub use route::{map_circuit, map_with_placement};
pub use verify::{verify_mapped, VerifiedMapping, Violation};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arch::{ArchError, Architecture, CostModel};
use crate::circuit::Circuit;
use crate::digest::sha256_hex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("circuit needs {needed} qubits but {available} are available{note}")]
    Capacity {
        needed: usize,
        available: usize,
        note: &'static str,
    },
    #[error("placement: {0}")]
    InvalidPlacement(String),
    #[error("routing deadlock at gate {gate}: {reason}")]
    Deadlock { gate: usize, reason: String },
    #[error(transparent)]
    Arch(#[from] ArchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlacementStrategy {
    /// Virtual qubit `v` on physical qubit `v`, filling cores in order.
    #[default]
    Block,
    /// Uniform injective assignment drawn from the config seed.
    Random,
}

impl fmt::Display for PlacementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlacementStrategy::Block => "block",
            PlacementStrategy::Random => "random",
        })
    }
}

impl FromStr for PlacementStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "block" | "block-round-robin" => Ok(PlacementStrategy::Block),
            "random" | "random-seeded" => Ok(PlacementStrategy::Random),
            other => Err(format!("unknown placement strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MapperConfig {
    pub placement: PlacementStrategy,
    pub seed: u64,
    /// Lift the one-free-slot-per-core reservation and enable the
    /// symmetric exchange primitive for cross-core gates between full cores.
    pub allow_full: bool,
    /// Upcoming gates consulted when choosing which state to evict in an
    /// exchange. 0 means purely greedy.
    pub lookahead: usize,
    pub cost: CostModel,
}

impl MapperConfig {
    /// Stable one-line rendering used in mapped-file headers and digests.
    pub fn canonical(&self) -> String {
        format!(
            "placement={} seed={} allow_full={} lookahead={}",
            self.placement, self.seed, self.allow_full, self.lookahead
        )
    }

    pub fn digest(&self) -> String {
        sha256_hex(format!("{}\n{}", self.canonical(), cost_line(&self.cost)).as_bytes())
    }
}

pub(crate) fn cost_line(cost: &CostModel) -> String {
    format!(
        "dur_1q={} dur_2q={} dur_swap={} dur_teleport={} swap_primitive_count={} readout_rate={} control_bits_per_gate={}",
        cost.dur_1q,
        cost.dur_2q,
        cost.dur_swap,
        cost.dur_teleport,
        cost.swap_primitive_count,
        cost.readout_rate,
        cost.control_bits_per_gate
    )
}

/// Payload of a scheduled physical operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpKind {
    /// Source gate `gate`, on physical operands in the gate's operand order.
    Gate { gate: usize, physical: Vec<usize> },
    /// Intra-core exchange of two coupled slots (either may be empty).
    Swap { a: usize, b: usize },
    /// Moves the state in `src` to the free slot `dst` in another core.
    Teleport {
        src: usize,
        dst: usize,
        src_core: usize,
        dst_core: usize,
    },
    /// Simultaneous cross-core state exchange; counts as two teleports.
    Exchange {
        a: usize,
        b: usize,
        core_a: usize,
        core_b: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedOp {
    pub timestep: u64,
    pub duration: u64,
    pub kind: OpKind,
}

impl TimedOp {
    /// Physical qubits held for the op's duration.
    pub fn qubits(&self) -> Vec<usize> {
        match &self.kind {
            OpKind::Gate { physical, .. } => physical.clone(),
            OpKind::Swap { a, b } | OpKind::Exchange { a, b, .. } => vec![*a, *b],
            OpKind::Teleport { src, dst, .. } => vec![*src, *dst],
        }
    }

    pub fn end(&self) -> u64 {
        self.timestep + self.duration
    }

    pub fn is_routing(&self) -> bool {
        !matches!(self.kind, OpKind::Gate { .. })
    }

    /// Teleports this op accounts for (exchange = 2).
    pub fn teleport_count(&self) -> u64 {
        match self.kind {
            OpKind::Teleport { .. } => 1,
            OpKind::Exchange { .. } => 2,
            _ => 0,
        }
    }
}

/// A circuit scheduled onto an architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedCircuit {
    pub arch: Architecture,
    pub circuit: Circuit,
    pub config: MapperConfig,
    pub initial: Placement,
    /// Sorted by timestep.
    pub ops: Vec<TimedOp>,
    pub final_placement: Placement,
    pub depth: u64,
}

impl MappedCircuit {
    pub fn swap_count(&self) -> u64 {
        self.ops
            .iter()
            .filter(|op| matches!(op.kind, OpKind::Swap { .. }))
            .count() as u64
    }

    pub fn teleport_count(&self) -> u64 {
        self.ops.iter().map(TimedOp::teleport_count).sum()
    }

    /// Inserted SWAPs plus teleports (exchange = 2).
    pub fn routing_op_count(&self) -> u64 {
        self.swap_count() + self.teleport_count()
    }

    /// Replays the routing ops from the initial placement.
    pub fn final_permutation(&self) -> Placement {
        let mut placement = self.initial.clone();
        for op in &self.ops {
            match op.kind {
                OpKind::Gate { .. } => {}
                OpKind::Swap { a, b } | OpKind::Exchange { a, b, .. } => {
                    placement.swap_physical(a, b)
                }
                OpKind::Teleport { src, dst, .. } => placement.swap_physical(src, dst),
            }
        }
        placement
    }

    pub fn verify(&self) -> Result<(), Violation> {
        verify_mapped(self)
    }

    pub fn into_verified(self) -> Result<VerifiedMapping, Violation> {
        VerifiedMapping::new(self)
    }

    pub fn circuit_digest(&self) -> String {
        sha256_hex(self.circuit.to_qasm().as_bytes())
    }

    pub fn arch_digest(&self) -> String {
        sha256_hex(format!("{}\n{}", self.arch.name(), cost_line(&self.config.cost)).as_bytes())
    }
}

/// Where each virtual state ends up after all routing.
pub fn final_permutation(m: &MappedCircuit) -> Placement {
    m.final_permutation()
}

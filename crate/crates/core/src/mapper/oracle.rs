//! Exact minimum routing cost for tiny instances.
//!
//! Uniform-cost search over `(slot contents, executed gates)`. Moves are one
//! intra-core SWAP (cost 1), one teleport into a free slot of another core
//! (cost 1), or one cross-core exchange (cost 2). Ready gates whose operands
//! are coupled execute for free; doing so eagerly never hurts because it
//! leaves the placement untouched.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use super::Placement;
use crate::arch::Architecture;
use crate::circuit::{Circuit, DependencyDag};

pub const ORACLE_MAX_QUBITS: usize = 8;
pub const ORACLE_MAX_GATES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: {physical} physical qubits (max {ORACLE_MAX_QUBITS}), {gates} gates (max {ORACLE_MAX_GATES})")]
    Guard { physical: usize, gates: usize },
    #[error("placement does not match the circuit and architecture")]
    Placement,
    #[error("no sequence of routing operations executes every gate")]
    Unreachable,
}

const EMPTY: u8 = u8::MAX;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct State {
    slots: Vec<u8>,
    done: u8,
}

/// Minimum number of SWAPs plus teleports (exchange = 2) needed to execute
/// every gate of `circuit` from `placement`.
pub fn oracle_min_route(
    circuit: &Circuit,
    arch: &Architecture,
    placement: &Placement,
) -> Result<u64, OracleError> {
    let physical = arch.total_qubits();
    if physical > ORACLE_MAX_QUBITS || circuit.len() > ORACLE_MAX_GATES {
        return Err(OracleError::Guard {
            physical,
            gates: circuit.len(),
        });
    }
    if placement.n_virtual() != circuit.n_qubits() || placement.n_physical() != physical {
        return Err(OracleError::Placement);
    }

    let dag = DependencyDag::build(circuit);
    let pred_mask: Vec<u8> = (0..circuit.len())
        .map(|g| dag.predecessors(g).iter().fold(0u8, |m, &p| m | (1 << p)))
        .collect();
    let all_done: u8 = ((1u16 << circuit.len()) - 1) as u8;

    let mut adjacent_pairs = Vec::new();
    let mut cross_pairs = Vec::new();
    for a in 0..physical {
        for b in a + 1..physical {
            if arch.adjacent(a, b) {
                adjacent_pairs.push((a, b));
            } else if arch.core_of(a) != arch.core_of(b) {
                cross_pairs.push((a, b));
            }
        }
    }

    let execute = |state: &mut State| {
        let locate = |slots: &[u8], v: usize| slots.iter().position(|&s| s as usize == v);
        loop {
            let mut progressed = false;
            for (g, gate) in circuit.gates().iter().enumerate() {
                let bit = 1u8 << g;
                if state.done & bit != 0 || state.done & pred_mask[g] != pred_mask[g] {
                    continue;
                }
                let runnable = match gate.qubits() {
                    [u, v] => {
                        let p = locate(&state.slots, *u).expect("state tracks every virtual qubit");
                        let q = locate(&state.slots, *v).expect("state tracks every virtual qubit");
                        arch.adjacent(p, q)
                    }
                    _ => true,
                };
                if runnable {
                    state.done |= bit;
                    progressed = true;
                }
            }
            if !progressed {
                return;
            }
        }
    };

    let mut start = State {
        slots: (0..physical)
            .map(|p| placement.virtual_at(p).map_or(EMPTY, |v| v as u8))
            .collect(),
        done: 0,
    };
    execute(&mut start);

    let mut best: HashMap<State, u64> = HashMap::from([(start.clone(), 0)]);
    let mut heap = BinaryHeap::from([Reverse((0u64, start))]);
    while let Some(Reverse((cost, state))) = heap.pop() {
        if state.done == all_done {
            return Ok(cost);
        }
        if best.get(&state).is_some_and(|&c| c < cost) {
            continue;
        }

        let mut moves: Vec<(u64, State)> = Vec::new();
        for &(a, b) in &adjacent_pairs {
            if state.slots[a] != EMPTY || state.slots[b] != EMPTY {
                let mut next = state.clone();
                next.slots.swap(a, b);
                moves.push((1, next));
            }
        }
        for &(a, b) in &cross_pairs {
            let (sa, sb) = (state.slots[a], state.slots[b]);
            if (sa == EMPTY) != (sb == EMPTY) {
                let mut next = state.clone();
                next.slots.swap(a, b);
                moves.push((1, next));
            } else if sa != EMPTY {
                let mut next = state.clone();
                next.slots.swap(a, b);
                moves.push((2, next));
            }
        }

        for (step, mut next) in moves {
            execute(&mut next);
            let total = cost + step;
            if best.get(&next).is_none_or(|&c| total < c) {
                best.insert(next.clone(), total);
                heap.push(Reverse((total, next)));
            }
        }
    }
    Err(OracleError::Unreachable)
}

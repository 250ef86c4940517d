use log::debug;

use super::{initial_placement, MapError, MappedCircuit, MapperConfig, OpKind, Placement, TimedOp};
use crate::arch::{Architecture, CostModel};
use crate::circuit::{Circuit, DependencyDag};

/// Maps `circuit` onto `arch` using the configured initial placement.
///
/// Unless `cfg.allow_full` is set, multi-core machines must keep one free
/// slot per core so that every cross-core gate can be served by a single
/// teleport.
pub fn map_circuit(
    circuit: &Circuit,
    arch: &Architecture,
    cfg: &MapperConfig,
) -> Result<MappedCircuit, MapError> {
    let placement = initial_placement(circuit, arch, cfg)?;
    map_with_placement(circuit, arch, cfg, placement)
}

/// Maps `circuit` starting from an explicit placement.
pub fn map_with_placement(
    circuit: &Circuit,
    arch: &Architecture,
    cfg: &MapperConfig,
    placement: Placement,
) -> Result<MappedCircuit, MapError> {
    cfg.cost.validate()?;
    check_headroom(circuit, arch, cfg)?;
    if placement.n_virtual() != circuit.n_qubits() || placement.n_physical() != arch.total_qubits()
    {
        return Err(MapError::InvalidPlacement(format!(
            "placement covers {} virtual / {} physical qubits, expected {} / {}",
            placement.n_virtual(),
            placement.n_physical(),
            circuit.n_qubits(),
            arch.total_qubits()
        )));
    }

    let dag = DependencyDag::build(circuit);
    let order = dag.layered_order();
    let mut router = Router {
        arch,
        cost: &cfg.cost,
        circuit,
        placement: placement.clone(),
        busy: vec![0; arch.total_qubits()],
        ops: Vec::with_capacity(circuit.len()),
        allow_full: cfg.allow_full,
        lookahead: cfg.lookahead,
        order: &order,
    };
    for pos in 0..order.len() {
        router.process(pos)?;
    }

    let Router {
        mut ops,
        placement: final_placement,
        ..
    } = router;
    ops.sort_by_key(|op| op.timestep);
    let depth = ops.iter().map(TimedOp::end).max().unwrap_or(0);
    debug!(
        "mapped {} gates onto {}: {} ops, depth {}",
        circuit.len(),
        arch.name(),
        ops.len(),
        depth
    );
    Ok(MappedCircuit {
        arch: arch.clone(),
        circuit: circuit.clone(),
        config: cfg.clone(),
        initial: placement,
        ops,
        final_placement,
        depth,
    })
}

fn check_headroom(
    circuit: &Circuit,
    arch: &Architecture,
    cfg: &MapperConfig,
) -> Result<(), MapError> {
    let n = circuit.n_qubits();
    if n > arch.total_qubits() {
        return Err(MapError::Capacity {
            needed: n,
            available: arch.total_qubits(),
            note: "",
        });
    }
    // A single core never teleports, so it has nothing to reserve.
    let usable = arch.n_cores() * (arch.qubits_per_core() - 1);
    if !cfg.allow_full && arch.n_cores() > 1 && n > usable {
        return Err(MapError::Capacity {
            needed: n,
            available: usable,
            note: " with one free slot reserved per core (use allow_full)",
        });
    }
    Ok(())
}

struct Router<'a> {
    arch: &'a Architecture,
    cost: &'a CostModel,
    circuit: &'a Circuit,
    placement: Placement,
    /// First timestep at which each physical qubit is idle again.
    busy: Vec<u64>,
    ops: Vec<TimedOp>,
    allow_full: bool,
    lookahead: usize,
    order: &'a [usize],
}

impl Router<'_> {
    fn schedule(&mut self, kind: OpKind, duration: u64) {
        let op = TimedOp {
            timestep: 0,
            duration,
            kind,
        };
        let qubits = op.qubits();
        let start = qubits.iter().map(|&q| self.busy[q]).max().unwrap_or(0);
        for &q in &qubits {
            self.busy[q] = start + duration;
        }
        self.ops.push(TimedOp {
            timestep: start,
            ..op
        });
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.placement.swap_physical(a, b);
        self.schedule(OpKind::Swap { a, b }, self.cost.dur_swap);
    }

    fn teleport(&mut self, src: usize, dst: usize) {
        debug_assert!(self.placement.is_free(dst));
        let (src_core, dst_core) = (self.arch.core_of(src), self.arch.core_of(dst));
        let hops = self.arch.core_hops(src_core, dst_core) as u64;
        self.placement.swap_physical(src, dst);
        self.schedule(
            OpKind::Teleport {
                src,
                dst,
                src_core,
                dst_core,
            },
            self.cost.dur_teleport * hops,
        );
    }

    fn exchange(&mut self, a: usize, b: usize) {
        let (core_a, core_b) = (self.arch.core_of(a), self.arch.core_of(b));
        let hops = self.arch.core_hops(core_a, core_b) as u64;
        self.placement.swap_physical(a, b);
        self.schedule(
            OpKind::Exchange {
                a,
                b,
                core_a,
                core_b,
            },
            self.cost.dur_teleport * hops,
        );
    }

    fn lowest_free(&self, core: usize) -> Option<usize> {
        self.placement.free_in(self.arch.core_qubits(core)).next()
    }

    fn process(&mut self, pos: usize) -> Result<(), MapError> {
        let index = self.order[pos];
        let circuit = self.circuit;
        let gate = &circuit.gates()[index];
        let virtuals = gate.qubits().to_vec();
        if let [u, v] = virtuals[..] {
            self.bring_together(pos, u, v)?;
        }
        let physical: Vec<usize> = virtuals
            .iter()
            .map(|&v| self.placement.physical(v))
            .collect();
        let duration = if gate.is_two_qubit() {
            self.cost.dur_2q
        } else {
            self.cost.dur_1q
        };
        self.schedule(
            OpKind::Gate {
                gate: index,
                physical,
            },
            duration,
        );
        Ok(())
    }

    /// Routes virtual qubits `u` and `v` onto coupled physical qubits.
    fn bring_together(&mut self, pos: usize, u: usize, v: usize) -> Result<(), MapError> {
        let gate = self.order[pos];
        if self.arch.qubits_per_core() < 2 {
            return Err(MapError::Deadlock {
                gate,
                reason: "cores hold a single qubit, so no two-qubit gate can execute".into(),
            });
        }
        let (p, q) = (self.placement.physical(u), self.placement.physical(v));
        let (core_u, core_v) = (self.arch.core_of(p), self.arch.core_of(q));

        if core_u != core_v {
            if let Some(dst) = self.lowest_free(core_v) {
                self.teleport(p, dst);
            } else if let Some(dst) = self.lowest_free(core_u) {
                self.teleport(q, dst);
            } else if self.allow_full {
                let victim = self.pick_victim(pos, core_v, q, &[u, v]);
                self.exchange(p, victim);
            } else if let Some(core) = self.relocation_core(core_u, core_v) {
                let free: Vec<usize> = self
                    .placement
                    .free_in(self.arch.core_qubits(core))
                    .take(2)
                    .collect();
                let (f1, f2) = (free[0], free[1]);
                self.teleport(p, f1);
                self.teleport(q, f2);
            } else {
                return Err(MapError::Deadlock {
                    gate,
                    reason: format!(
                        "cores {core_u} and {core_v} are full and no other core has two free slots"
                    ),
                });
            }
        }

        // Walk u's state toward v along a shortest path.
        let target = self.placement.physical(v);
        loop {
            let here = self.placement.physical(u);
            let dist = self.arch.hops(here, target);
            if dist <= 1 {
                break;
            }
            let next = self
                .arch
                .neighbors(here)
                .find(|&n| self.arch.hops(n, target) == dist - 1)
                .expect("connected coupling graph has a closer neighbour");
            self.swap(here, next);
        }
        Ok(())
    }

    /// Third core with at least two free slots, nearest to both endpoints.
    fn relocation_core(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.arch.n_cores())
            .filter(|&c| c != a && c != b)
            .filter(|&c| self.placement.free_in(self.arch.core_qubits(c)).count() >= 2)
            .min_by_key(|&c| (self.arch.core_hops(a, c) + self.arch.core_hops(b, c), c))
    }

    /// State in `core` to trade places with the incoming one.
    ///
    /// Prefers states not needed within the lookahead window, then slots
    /// closest to `partner`, then the lowest index.
    fn pick_victim(&self, pos: usize, core: usize, partner: usize, exclude: &[usize]) -> usize {
        let window = &self.order
            [(pos + 1).min(self.order.len())..(pos + 1 + self.lookahead).min(self.order.len())];
        let next_use = |v: usize| {
            window
                .iter()
                .position(|&g| self.circuit.gates()[g].qubits().contains(&v))
                .unwrap_or(usize::MAX)
        };
        self.arch
            .core_qubits(core)
            .filter_map(|p| self.placement.virtual_at(p).map(|v| (p, v)))
            .filter(|(_, v)| !exclude.contains(v))
            .min_by_key(|&(p, v)| {
                (
                    std::cmp::Reverse(next_use(v)),
                    self.arch.hops(p, partner),
                    p,
                )
            })
            .map(|(p, _)| p)
            .expect("a full core with two or more slots holds another state")
    }
}

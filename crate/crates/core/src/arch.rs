//! Modular quantum architectures: cores of uniformly sized qubit arrays joined
//! by an inter-core link graph.
//!
//! Physical qubit `p` lives in core `p / qubits_per_core` at local slot
//! `p % qubits_per_core`. Two-qubit gates only run between coupled slots of
//! the same core; moving a state between cores is a teleport.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArchError {
    #[error("{what} must be at least 1")]
    Zero { what: &'static str },
    #[error("cannot lay out {count} nodes as a 2D grid (prime > 3)")]
    GridInfeasible { count: usize },
    #[error("{level} topology is disconnected")]
    Disconnected { level: &'static str },
    #[error("unknown topology `{0}`")]
    UnknownTopology(String),
    #[error("malformed architecture shorthand `{0}` (expected e.g. 8x8:alltoall/alltoall)")]
    BadShorthand(String),
    #[error("physical qubit {qubit} out of range (machine has {total})")]
    QubitOutOfRange { qubit: usize, total: usize },
    #[error("core {core} out of range (machine has {n_cores})")]
    CoreOutOfRange { core: usize, n_cores: usize },
    #[error("qubits {p} and {q} are in different cores")]
    CrossCore { p: usize, q: usize },
    #[error("invalid cost model: {0}")]
    BadCost(String),
    #[error("architecture file: {0}")]
    File(String),
}

/// Coupling pattern used for intra-core slots or for the inter-core link graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Topology {
    AllToAll,
    Line,
    Ring,
    Grid,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::AllToAll => "alltoall",
            Topology::Line => "line",
            Topology::Ring => "ring",
            Topology::Grid => "grid",
        }
    }

    /// Adjacency lists over `count` nodes.
    fn adjacency(self, count: usize) -> Result<Vec<Vec<usize>>, ArchError> {
        let mut adj = vec![Vec::new(); count];
        let mut link = |a: usize, b: usize| {
            if a != b && !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        };
        match self {
            Topology::AllToAll => {
                for a in 0..count {
                    for b in a + 1..count {
                        link(a, b);
                    }
                }
            }
            Topology::Line => {
                for a in 1..count {
                    link(a - 1, a);
                }
            }
            Topology::Ring => {
                for a in 1..count {
                    link(a - 1, a);
                }
                if count > 2 {
                    link(count - 1, 0);
                }
            }
            Topology::Grid => {
                let (rows, cols) = grid_dims(count)?;
                for r in 0..rows {
                    for c in 0..cols {
                        let n = r * cols + c;
                        if c + 1 < cols {
                            link(n, n + 1);
                        }
                        if r + 1 < rows {
                            link(n, n + cols);
                        }
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(adj)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = ArchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alltoall" | "all-to-all" | "all2all" | "full" => Ok(Topology::AllToAll),
            "line" | "linear" => Ok(Topology::Line),
            "ring" | "cycle" => Ok(Topology::Ring),
            "grid" | "2d-grid" | "2dgrid" | "mesh" => Ok(Topology::Grid),
            _ => Err(ArchError::UnknownTopology(s.to_string())),
        }
    }
}

impl TryFrom<String> for Topology {
    type Error = ArchError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Topology> for String {
    fn from(t: Topology) -> Self {
        t.as_str().to_string()
    }
}

/// Factors `count` as `rows x cols` with `rows <= cols` and `rows` maximal.
///
/// Counts 1, 2 and 3 degenerate to a single row; larger primes are rejected.
pub fn grid_dims(count: usize) -> Result<(usize, usize), ArchError> {
    if count == 0 {
        return Err(ArchError::Zero { what: "grid size" });
    }
    let rows = (1..=count)
        .take_while(|r| r * r <= count)
        .filter(|&r| count.is_multiple_of(r))
        .last()
        .unwrap_or(1);
    if rows == 1 && count > 3 {
        return Err(ArchError::GridInfeasible { count });
    }
    Ok((rows, count / rows))
}

/// All-pairs hop counts by BFS; `None` if the graph is disconnected.
fn all_pairs_hops(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut out = Vec::with_capacity(n);
    for src in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return None;
        }
        out.push(dist);
    }
    Some(out)
}

/// Operation durations (in timesteps) and vertical-traffic constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub dur_1q: u64,
    pub dur_2q: u64,
    pub dur_swap: u64,
    /// Duration of a teleport across one inter-core hop.
    pub dur_teleport: u64,
    /// Primitive gates charged per SWAP in load metrics (3 CNOTs).
    pub swap_primitive_count: u64,
    /// Readout bandwidth per measured qubit, bits/s.
    pub readout_rate: u64,
    pub control_bits_per_gate: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            dur_1q: 1,
            dur_2q: 1,
            dur_swap: 1,
            dur_teleport: 1,
            swap_primitive_count: 3,
            readout_rate: 1_000_000,
            control_bits_per_gate: 1_000,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), ArchError> {
        let durations = [
            ("dur_1q", self.dur_1q),
            ("dur_2q", self.dur_2q),
            ("dur_swap", self.dur_swap),
            ("dur_teleport", self.dur_teleport),
        ];
        for (name, value) in durations {
            if value < 1 {
                return Err(ArchError::BadCost(format!("{name} must be >= 1")));
            }
        }
        if self.readout_rate == 0 || self.control_bits_per_gate == 0 {
            return Err(ArchError::BadCost("rates must be > 0".into()));
        }
        Ok(())
    }
}

/// A validated multi-core machine description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    n_cores: usize,
    qubits_per_core: usize,
    intra: Topology,
    inter: Topology,
    name: String,
    intra_adj: Vec<Vec<usize>>,
    intra_hops: Vec<Vec<usize>>,
    core_adj: Vec<Vec<usize>>,
    core_hops: Vec<Vec<usize>>,
}

impl Architecture {
    pub fn build(
        n_cores: usize,
        qubits_per_core: usize,
        intra: Topology,
        inter: Topology,
    ) -> Result<Self, ArchError> {
        if n_cores == 0 {
            return Err(ArchError::Zero { what: "n_cores" });
        }
        if qubits_per_core == 0 {
            return Err(ArchError::Zero {
                what: "qubits_per_core",
            });
        }
        let intra_adj = intra.adjacency(qubits_per_core)?;
        let intra_hops = all_pairs_hops(&intra_adj).ok_or(ArchError::Disconnected {
            level: "intra-core",
        })?;
        let core_adj = inter.adjacency(n_cores)?;
        let core_hops = all_pairs_hops(&core_adj).ok_or(ArchError::Disconnected {
            level: "inter-core",
        })?;
        Ok(Self {
            n_cores,
            qubits_per_core,
            intra,
            inter,
            name: format!("{n_cores}x{qubits_per_core}:{intra}/{inter}"),
            intra_adj,
            intra_hops,
            core_adj,
            core_hops,
        })
    }

    pub fn n_cores(&self) -> usize {
        self.n_cores
    }

    pub fn qubits_per_core(&self) -> usize {
        self.qubits_per_core
    }

    pub fn total_qubits(&self) -> usize {
        self.n_cores * self.qubits_per_core
    }

    pub fn intra_topology(&self) -> Topology {
        self.intra
    }

    pub fn inter_topology(&self) -> Topology {
        self.inter
    }

    /// Canonical shorthand, e.g. `8x8:alltoall/alltoall`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn core_of(&self, p: usize) -> usize {
        p / self.qubits_per_core
    }

    fn slot_of(&self, p: usize) -> usize {
        p % self.qubits_per_core
    }

    /// Physical qubit indices of `core`.
    pub fn core_qubits(&self, core: usize) -> std::ops::Range<usize> {
        core * self.qubits_per_core..(core + 1) * self.qubits_per_core
    }

    fn check_qubit(&self, p: usize) -> Result<(), ArchError> {
        if p < self.total_qubits() {
            Ok(())
        } else {
            Err(ArchError::QubitOutOfRange {
                qubit: p,
                total: self.total_qubits(),
            })
        }
    }

    /// True iff `p` and `q` share a core and are coupled there.
    pub fn are_adjacent(&self, p: usize, q: usize) -> Result<bool, ArchError> {
        self.check_qubit(p)?;
        self.check_qubit(q)?;
        Ok(self.core_of(p) == self.core_of(q)
            && self.intra_hops[self.slot_of(p)][self.slot_of(q)] == 1)
    }

    /// Shortest-path length inside a core.
    pub fn intra_distance(&self, p: usize, q: usize) -> Result<usize, ArchError> {
        self.check_qubit(p)?;
        self.check_qubit(q)?;
        if self.core_of(p) != self.core_of(q) {
            return Err(ArchError::CrossCore { p, q });
        }
        Ok(self.intra_hops[self.slot_of(p)][self.slot_of(q)])
    }

    /// Hop count over inter-core links.
    pub fn core_distance(&self, c1: usize, c2: usize) -> Result<usize, ArchError> {
        for core in [c1, c2] {
            if core >= self.n_cores {
                return Err(ArchError::CoreOutOfRange {
                    core,
                    n_cores: self.n_cores,
                });
            }
        }
        Ok(self.core_hops[c1][c2])
    }

    /// Physical neighbours of `p` within its core, ascending.
    pub fn neighbors(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.core_of(p) * self.qubits_per_core;
        self.intra_adj[self.slot_of(p)]
            .iter()
            .map(move |s| base + s)
    }

    /// Cores linked to `core`, ascending.
    pub fn linked_cores(&self, core: usize) -> &[usize] {
        &self.core_adj[core]
    }

    /// Unchecked same-core hop count for callers that already validated indices.
    pub(crate) fn hops(&self, p: usize, q: usize) -> usize {
        debug_assert_eq!(self.core_of(p), self.core_of(q));
        self.intra_hops[self.slot_of(p)][self.slot_of(q)]
    }

    pub(crate) fn core_hops(&self, c1: usize, c2: usize) -> usize {
        self.core_hops[c1][c2]
    }

    pub(crate) fn adjacent(&self, p: usize, q: usize) -> bool {
        self.core_of(p) == self.core_of(q) && self.hops(p, q) == 1
    }
}

impl FromStr for Architecture {
    type Err = ArchError;

    /// Parses `CxQ:intra/inter`, e.g. `8x8:alltoall/alltoall`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArchError::BadShorthand(s.to_string());
        let (dims, topo) = s.trim().split_once(':').ok_or_else(bad)?;
        let (cores, qubits) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
        let (intra, inter) = topo.split_once('/').ok_or_else(bad)?;
        let n_cores = cores.trim().parse().map_err(|_| bad())?;
        let qubits_per_core = qubits.trim().parse().map_err(|_| bad())?;
        Architecture::build(
            n_cores,
            qubits_per_core,
            intra.trim().parse()?,
            inter.trim().parse()?,
        )
    }
}

/// Contents of an architecture description file (TOML key/value).
///
/// ```toml
/// n_cores = 8
/// qubits_per_core = 8
/// intra = "alltoall"
/// inter = "ring"
///
/// [cost]
/// dur_teleport = 5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchFile {
    pub n_cores: usize,
    pub qubits_per_core: usize,
    pub intra: Topology,
    pub inter: Topology,
    #[serde(default)]
    pub cost: CostModel,
}

impl ArchFile {
    pub fn parse(text: &str) -> Result<(Architecture, CostModel), ArchError> {
        let file: ArchFile = toml::from_str(text).map_err(|e| ArchError::File(e.to_string()))?;
        file.cost.validate()?;
        let arch = Architecture::build(file.n_cores, file.qubits_per_core, file.intra, file.inter)?;
        Ok((arch, file.cost))
    }
}

//! Qubit traffic characterization of a verified mapping.
//!
//! Everything here is a pure function of a [`VerifiedMapping`]; analyses
//! can be recomputed at will and always agree.

mod export;

pub use export::{
    core_matrix_csv, per_qubit_csv, raster_csv, report_json, summary_csv, vertical_csv, CSV_FILES,
};

use serde::Serialize;

use crate::arch::CostModel;
use crate::circuit::GateKind;
use crate::mapper::{OpKind, VerifiedMapping};

/// Teleport counts per ordered (source core, destination core) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreMatrix {
    n_cores: usize,
    counts: Vec<u64>,
}

impl CoreMatrix {
    fn zeros(n_cores: usize) -> Self {
        Self {
            n_cores,
            counts: vec![0; n_cores * n_cores],
        }
    }

    pub fn n_cores(&self) -> usize {
        self.n_cores
    }

    pub fn get(&self, src: usize, dst: usize) -> u64 {
        self.counts[src * self.n_cores + dst]
    }

    fn add(&mut self, src: usize, dst: usize) {
        self.counts[src * self.n_cores + dst] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(i, j) + (j, i)` for every pair.
    pub fn symmetrized(&self) -> CoreMatrix {
        let mut out = Self::zeros(self.n_cores);
        for i in 0..self.n_cores {
            for j in 0..self.n_cores {
                out.counts[i * self.n_cores + j] = self.get(i, j) + self.get(j, i);
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.n_cores.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    /// Teleports each core takes part in, as source or destination.
    pub fn per_core_totals(&self) -> Vec<u64> {
        (0..self.n_cores)
            .map(|c| {
                (0..self.n_cores)
                    .map(|o| self.get(c, o) + self.get(o, c))
                    .sum()
            })
            .collect()
    }
}

/// Operations applied to one virtual qubit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QubitLoad {
    pub teleports: u64,
    /// Gates plus SWAP primitives, each SWAP counted `swap_primitive_count` times.
    pub intra_ops: u64,
}

impl QubitLoad {
    pub fn total(&self) -> u64 {
        self.teleports + self.intra_ops
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Activity {
    Idle,
    Compute,
    Communicate,
}

impl Activity {
    /// `I`, `C` or `M` as used in `raster.csv`.
    pub fn code(self) -> char {
        match self {
            Activity::Idle => 'I',
            Activity::Compute => 'C',
            Activity::Communicate => 'M',
        }
    }
}

/// Timestep x physical-qubit activity grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    depth: usize,
    n_qubits: usize,
    cells: Vec<Activity>,
}

impl Raster {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, timestep: usize, qubit: usize) -> Activity {
        self.cells[timestep * self.n_qubits + qubit]
    }

    pub fn row(&self, timestep: usize) -> &[Activity] {
        &self.cells[timestep * self.n_qubits..(timestep + 1) * self.n_qubits]
    }

    pub fn count(&self, timestep: usize, activity: Activity) -> usize {
        self.row(timestep)
            .iter()
            .filter(|&&a| a == activity)
            .count()
    }

    /// One string of activity codes per timestep.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.depth)
            .map(|t| self.row(t).iter().map(|a| a.code()).collect())
            .collect()
    }
}

impl Serialize for Raster {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Raster", 3)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("n_qubits", &self.n_qubits)?;
        st.serialize_field("rows", &self.row_strings())?;
        st.end()
    }
}

/// Host-to-QPU traffic per timestep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerticalSeries {
    pub control_bits: Vec<u64>,
    pub readout_bps: Vec<u64>,
    pub peak_control_bits: u64,
    pub peak_readout_bps: u64,
    pub readout_rate: u64,
}

impl VerticalSeries {
    /// Aggregate readout demand of `n_qubits` qubits read out concurrently, bits/s.
    pub fn projection(&self, n_qubits: u64) -> u128 {
        vertical_projection(n_qubits, self.readout_rate)
    }

    pub fn total_control_bits(&self) -> u64 {
        self.control_bits.iter().sum()
    }
}

/// `n_qubits * readout_rate` in exact integer arithmetic.
pub fn vertical_projection(n_qubits: u64, readout_rate: u64) -> u128 {
    n_qubits as u128 * readout_rate as u128
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub depth: u64,
    pub gate_ops: u64,
    pub total_swaps: u64,
    pub total_teleports: u64,
    /// Routing ops over all ops; an exchange contributes two to both.
    pub comm_ratio: f64,
    /// Coefficient of variation of per-virtual-qubit operation totals.
    pub load_cov: f64,
}

/// Energy accounting for the vertical link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyModel {
    pub joules_per_bit: f64,
    /// Budgets above this are flagged.
    pub warn_joules_per_bit: f64,
    /// Wall-clock length of one timestep, converting readout bits/s to bits.
    pub seconds_per_timestep: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            joules_per_bit: 1e-15,
            warn_joules_per_bit: 10e-15,
            seconds_per_timestep: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub total_bits: f64,
    pub joules: f64,
    pub joules_per_bit: f64,
    pub over_budget: bool,
}

impl EnergyModel {
    pub fn evaluate(&self, series: &VerticalSeries) -> EnergyReport {
        let readout_bits: f64 = series
            .readout_bps
            .iter()
            .map(|&bps| bps as f64 * self.seconds_per_timestep)
            .sum();
        let total_bits = series.total_control_bits() as f64 + readout_bits;
        EnergyReport {
            total_bits,
            joules: total_bits * self.joules_per_bit,
            joules_per_bit: self.joules_per_bit,
            over_budget: self.joules_per_bit > self.warn_joules_per_bit,
        }
    }
}

pub fn core_traffic_matrix(m: &VerifiedMapping) -> CoreMatrix {
    let mut matrix = CoreMatrix::zeros(m.arch.n_cores());
    for op in &m.ops {
        match op.kind {
            OpKind::Teleport {
                src_core, dst_core, ..
            } => matrix.add(src_core, dst_core),
            OpKind::Exchange { core_a, core_b, .. } => {
                matrix.add(core_a, core_b);
                matrix.add(core_b, core_a);
            }
            _ => {}
        }
    }
    matrix
}

/// Loads attributed to virtual qubits by replaying the placement.
pub fn per_qubit_counts(m: &VerifiedMapping) -> Vec<QubitLoad> {
    let spc = m.config.cost.swap_primitive_count;
    let mut loads = vec![QubitLoad::default(); m.circuit.n_qubits()];
    let mut placement = m.initial.clone();
    for op in &m.ops {
        match &op.kind {
            OpKind::Gate { gate, .. } => {
                for &v in m.circuit.gates()[*gate].qubits() {
                    loads[v].intra_ops += 1;
                }
            }
            OpKind::Swap { a, b } => {
                for p in [*a, *b] {
                    if let Some(v) = placement.virtual_at(p) {
                        loads[v].intra_ops += spc;
                    }
                }
                placement.swap_physical(*a, *b);
            }
            OpKind::Teleport { src, dst, .. } => {
                if let Some(v) = placement.virtual_at(*src) {
                    loads[v].teleports += 1;
                }
                placement.swap_physical(*src, *dst);
            }
            OpKind::Exchange { a, b, .. } => {
                for p in [*a, *b] {
                    if let Some(v) = placement.virtual_at(p) {
                        loads[v].teleports += 1;
                    }
                }
                placement.swap_physical(*a, *b);
            }
        }
    }
    loads
}

pub fn activity_raster(m: &VerifiedMapping) -> Raster {
    let depth = m.depth as usize;
    let n_qubits = m.arch.total_qubits();
    let mut cells = vec![Activity::Idle; depth * n_qubits];
    for op in &m.ops {
        let activity = if op.is_routing() {
            Activity::Communicate
        } else {
            Activity::Compute
        };
        for t in op.timestep..op.end() {
            for q in op.qubits() {
                cells[t as usize * n_qubits + q] = activity;
            }
        }
    }
    Raster {
        depth,
        n_qubits,
        cells,
    }
}

pub fn vertical_bandwidth(m: &VerifiedMapping, cost: &CostModel) -> VerticalSeries {
    let depth = m.depth as usize;
    let mut starts = vec![0u64; depth];
    let mut measuring = vec![0u64; depth];
    for op in &m.ops {
        starts[op.timestep as usize] += 1;
        if let OpKind::Gate { gate, .. } = op.kind {
            if m.circuit.gates()[gate].kind() == GateKind::Measure {
                for t in op.timestep..op.end() {
                    measuring[t as usize] += 1;
                }
            }
        }
    }
    let control_bits: Vec<u64> = starts
        .iter()
        .map(|&n| n * cost.control_bits_per_gate)
        .collect();
    let readout_bps: Vec<u64> = measuring.iter().map(|&n| n * cost.readout_rate).collect();
    VerticalSeries {
        peak_control_bits: control_bits.iter().copied().max().unwrap_or(0),
        peak_readout_bps: readout_bps.iter().copied().max().unwrap_or(0),
        control_bits,
        readout_bps,
        readout_rate: cost.readout_rate,
    }
}

pub fn summarize(m: &VerifiedMapping) -> Summary {
    let gate_ops = m.ops.iter().filter(|op| !op.is_routing()).count() as u64;
    let total_swaps = m.swap_count();
    let total_teleports = m.teleport_count();
    let routing = total_swaps + total_teleports;
    let all = gate_ops + routing;
    let comm_ratio = if all == 0 {
        0.0
    } else {
        routing as f64 / all as f64
    };
    Summary {
        depth: m.depth,
        gate_ops,
        total_swaps,
        total_teleports,
        comm_ratio,
        load_cov: coefficient_of_variation(
            &per_qubit_counts(m)
                .iter()
                .map(QubitLoad::total)
                .collect::<Vec<_>>(),
        ),
    }
}

/// Population standard deviation over mean; 0 when the mean is 0.
fn coefficient_of_variation(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    var.sqrt() / mean
}

/// All analyses of one mapping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficReport {
    pub architecture: String,
    pub circuit: String,
    pub core_matrix: CoreMatrix,
    pub core_matrix_symmetric: CoreMatrix,
    pub per_qubit: Vec<QubitLoad>,
    pub raster: Raster,
    pub vertical: VerticalSeries,
    pub summary: Summary,
    pub energy: EnergyReport,
    /// Readout demand of `projection_qubits` qubits at the configured rate.
    pub projection_qubits: u64,
    pub projection_bps: u128,
}

impl TrafficReport {
    pub const DEFAULT_PROJECTION_QUBITS: u64 = 1_000_000;

    pub fn analyze(m: &VerifiedMapping) -> Self {
        Self::analyze_with(m, &EnergyModel::default(), Self::DEFAULT_PROJECTION_QUBITS)
    }

    pub fn analyze_with(m: &VerifiedMapping, energy: &EnergyModel, projection_qubits: u64) -> Self {
        let core_matrix = core_traffic_matrix(m);
        let vertical = vertical_bandwidth(m, &m.config.cost);
        Self {
            architecture: m.arch.name().to_string(),
            circuit: m.circuit.name().to_string(),
            core_matrix_symmetric: core_matrix.symmetrized(),
            core_matrix,
            per_qubit: per_qubit_counts(m),
            raster: activity_raster(m),
            energy: energy.evaluate(&vertical),
            projection_qubits,
            projection_bps: vertical.projection(projection_qubits),
            vertical,
            summary: summarize(m),
        }
    }
}

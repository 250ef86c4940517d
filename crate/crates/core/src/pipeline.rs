//! File-level commands: generate, map, analyze, oracle comparison.
//!
//! Each command computes all of its outputs in memory first and only then
//! writes them, each through a temporary file renamed into place, so a
//! failing run leaves no partial output behind. Runs that produce files
//! also write a `manifest.json` recording input digests and output hashes.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{ArchError, ArchFile, Architecture, CostModel};
use crate::circuit::{
    gen_qft_with, gen_random, parse_circuit, Circuit, CircuitError, ParseError, QftOptions,
};
use crate::digest::sha256_hex;
use crate::mapper::{
    map_circuit, oracle_min_route, parse_mapped, write_mapped, FormatError, MapError,
    MappedCircuit, MapperConfig, OracleError, PlacementStrategy, VerifiedMapping, Violation,
};
use crate::traffic::{self, TrafficReport};

pub const MAPPED_FILE: &str = "mapped.qmap";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    MappedFile { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("mapping failed verification: {0}")]
    Verification(#[from] Violation),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("manifest: {0}")]
    Manifest(String),
}

impl PipelineError {
    /// 0 ok, 1 usage, 2 parse, 3 capacity, 4 verification/deadlock, 5 oracle guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) | PipelineError::Io { .. } | PipelineError::Circuit(_) => 1,
            PipelineError::Arch(ArchError::File(_)) => 2,
            PipelineError::Arch(_) => 1,
            PipelineError::Parse { .. } => 2,
            PipelineError::MappedFile { source, .. } => match source {
                FormatError::Syntax { .. } => 2,
                FormatError::Tampered { .. } => 4,
            },
            PipelineError::Map(MapError::Capacity { .. }) => 3,
            PipelineError::Map(MapError::Arch(_)) => 1,
            PipelineError::Map(_) => 4,
            PipelineError::Verification(_) | PipelineError::Manifest(_) => 4,
            PipelineError::Oracle(OracleError::Guard { .. }) => 5,
            PipelineError::Oracle(_) => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Writes every `(name, contents)` pair under `dir`, each via a temporary
/// file in the same directory followed by a rename.
fn write_atomically(dir: &Path, files: &[(String, String)]) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, contents) in files {
        let target = dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
        tmp.write_all(contents.as_bytes())
            .map_err(io_err(tmp.path()))?;
        tmp.persist(&target).map_err(|e| io_err(&target)(e.error))?;
    }
    Ok(())
}

/// Writes one file through a temporary sibling and a rename.
pub fn write_file_atomically(path: &Path, contents: &str) -> Result<(), PipelineError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| PipelineError::Usage(format!("not a file path: {}", path.display())))?;
    write_atomically(
        dir,
        &[(name.to_string_lossy().into_owned(), contents.to_string())],
    )
}

/// Where the machine description comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArchSpec {
    /// `CxQ:intra/inter`, default costs.
    Shorthand(String),
    /// TOML file with optional cost overrides.
    File(PathBuf),
}

impl ArchSpec {
    pub fn load(&self) -> Result<(Architecture, CostModel), PipelineError> {
        match self {
            ArchSpec::Shorthand(s) => Ok((s.parse()?, CostModel::default())),
            ArchSpec::File(path) => Ok(ArchFile::parse(&read_text(path)?)?),
        }
    }
}

/// Reads a circuit file; the circuit is named after the file stem.
pub fn load_circuit(path: &Path) -> Result<Circuit, PipelineError> {
    let text = read_text(path)?;
    let circuit = parse_circuit(&text).map_err(|source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(circuit.with_name(stem))
}

pub fn load_mapped(path: &Path) -> Result<MappedCircuit, PipelineError> {
    parse_mapped(&read_text(path)?).map_err(|source| PipelineError::MappedFile {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Qft {
        n: usize,
        options: QftOptions,
    },
    Random {
        n: usize,
        gates: usize,
        p2: f64,
        seed: u64,
    },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Circuit, PipelineError> {
        Ok(match *self {
            GenSpec::Qft { n, options } => gen_qft_with(n, options)?,
            GenSpec::Random { n, gates, p2, seed } => gen_random(n, gates, p2, seed)?,
        })
    }
}

/// Generates a circuit and writes it to `out` if given. Returns the text.
pub fn cmd_gen(spec: &GenSpec, out: Option<&Path>) -> Result<String, PipelineError> {
    let text = spec.generate()?.to_qasm();
    if let Some(path) = out {
        write_file_atomically(path, &text)?;
        info!("wrote {}", path.display());
    }
    Ok(text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapRequest {
    pub circuit: PathBuf,
    pub arch: ArchSpec,
    pub placement: PlacementStrategy,
    pub seed: u64,
    pub allow_full: bool,
    pub lookahead: usize,
    /// Overrides the teleport duration from the architecture costs.
    pub dur_teleport: Option<u64>,
    pub out_dir: PathBuf,
}

impl MapRequest {
    pub fn new(circuit: impl Into<PathBuf>, arch: ArchSpec, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            circuit: circuit.into(),
            arch,
            placement: PlacementStrategy::Block,
            seed: 0,
            allow_full: false,
            lookahead: 0,
            dur_teleport: None,
            out_dir: out_dir.into(),
        }
    }

    fn config(&self, mut cost: CostModel) -> MapperConfig {
        if let Some(d) = self.dur_teleport {
            cost.dur_teleport = d;
        }
        MapperConfig {
            placement: self.placement,
            seed: self.seed,
            allow_full: self.allow_full,
            lookahead: self.lookahead,
            cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigests {
    pub circuit: String,
    pub arch: String,
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub depth: u64,
    pub swaps: u64,
    pub teleports: u64,
    pub comm_ratio: f64,
}

/// Provenance record written next to a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub inputs: InputDigests,
    pub outputs: Vec<OutputFile>,
    pub duration_seconds: f64,
    pub summary: RunSummary,
}

impl RunManifest {
    fn new(
        command: &str,
        m: &MappedCircuit,
        summary: RunSummary,
        files: &[(String, String)],
        started: Instant,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: m.config.seed,
            inputs: InputDigests {
                circuit: m.circuit_digest(),
                arch: m.arch_digest(),
                config: m.config.digest(),
            },
            outputs: files
                .iter()
                .map(|(name, contents)| OutputFile {
                    path: name.clone(),
                    sha256: sha256_hex(contents.as_bytes()),
                })
                .collect(),
            duration_seconds: started.elapsed().as_secs_f64(),
            summary,
        }
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Loads `dir/manifest.json` and re-checks every recorded digest: output
    /// file hashes and, when the run produced a mapped file, its inputs.
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let manifest: RunManifest = serde_json::from_str(&read_text(&path)?)
            .map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        for out in &manifest.outputs {
            let file = dir.join(&out.path);
            let actual = sha256_hex(&fs::read(&file).map_err(io_err(&file))?);
            if actual != out.sha256 {
                return Err(PipelineError::Manifest(format!(
                    "{} does not match its recorded digest",
                    out.path
                )));
            }
            if out.path == MAPPED_FILE {
                let m = load_mapped(&file)?;
                let inputs = InputDigests {
                    circuit: m.circuit_digest(),
                    arch: m.arch_digest(),
                    config: m.config.digest(),
                };
                if inputs != manifest.inputs {
                    return Err(PipelineError::Manifest(
                        "input digests do not match the mapped file".into(),
                    ));
                }
            }
        }
        Ok(manifest)
    }
}

fn run_summary(m: &VerifiedMapping) -> RunSummary {
    let s = traffic::summarize(m);
    RunSummary {
        depth: s.depth,
        swaps: s.total_swaps,
        teleports: s.total_teleports,
        comm_ratio: s.comm_ratio,
    }
}

#[derive(Debug, Clone)]
pub struct MapOutcome {
    pub mapping: VerifiedMapping,
    pub manifest: RunManifest,
}

/// Maps and verifies a circuit, then writes `mapped.qmap` and the manifest.
/// Nothing is written unless verification passes.
pub fn cmd_map(req: &MapRequest) -> Result<MapOutcome, PipelineError> {
    let started = Instant::now();
    let circuit = load_circuit(&req.circuit)?;
    let (arch, cost) = req.arch.load()?;
    let cfg = req.config(cost);
    let mapping = map_circuit(&circuit, &arch, &cfg)?.into_verified()?;
    info!(
        "mapped {} onto {}: depth {}, {} swaps, {} teleports",
        circuit.name(),
        arch.name(),
        mapping.depth,
        mapping.swap_count(),
        mapping.teleport_count()
    );

    let mut files = vec![(MAPPED_FILE.to_string(), write_mapped(&mapping))];
    let manifest = RunManifest::new("map", &mapping, run_summary(&mapping), &files, started);
    files.push((MANIFEST_FILE.to_string(), manifest.to_json()));
    write_atomically(&req.out_dir, &files)?;
    Ok(MapOutcome { mapping, manifest })
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub report: TrafficReport,
    pub manifest: RunManifest,
}

/// Verifies a mapped file and writes the five CSVs, `report.json` and a manifest.
pub fn cmd_analyze(mapped_path: &Path, out_dir: &Path) -> Result<AnalyzeOutcome, PipelineError> {
    let started = Instant::now();
    let mapping = load_mapped(mapped_path)?.into_verified()?;
    let report = TrafficReport::analyze(&mapping);

    let csvs = [
        traffic::core_matrix_csv(&report.core_matrix),
        traffic::per_qubit_csv(&report.per_qubit),
        traffic::raster_csv(&report.raster),
        traffic::vertical_csv(&report.vertical),
        traffic::summary_csv(&report.summary),
    ];
    let mut files: Vec<(String, String)> = traffic::CSV_FILES
        .iter()
        .map(|n| n.to_string())
        .zip(csvs)
        .collect();
    files.push((REPORT_FILE.to_string(), traffic::report_json(&report)));
    let summary = RunSummary {
        depth: report.summary.depth,
        swaps: report.summary.total_swaps,
        teleports: report.summary.total_teleports,
        comm_ratio: report.summary.comm_ratio,
    };
    let manifest = RunManifest::new("analyze", &mapping, summary, &files, started);
    files.push((MANIFEST_FILE.to_string(), manifest.to_json()));
    write_atomically(out_dir, &files)?;
    Ok(AnalyzeOutcome { report, manifest })
}

/// Heuristic routing cost against the exact optimum from the same placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub heuristic: u64,
    pub optimal: u64,
}

impl OracleComparison {
    /// `heuristic / optimal`; 1 when both are zero.
    pub fn ratio(&self) -> f64 {
        match (self.heuristic, self.optimal) {
            (0, 0) => 1.0,
            (h, o) => h as f64 / o as f64,
        }
    }
}

/// Compares the mapper with the exact oracle. Full cores are allowed so
/// that every instance within the guard is routable by both.
pub fn cmd_oracle(
    circuit_path: &Path,
    arch: &ArchSpec,
    placement: PlacementStrategy,
    seed: u64,
) -> Result<OracleComparison, PipelineError> {
    let circuit = load_circuit(circuit_path)?;
    let (arch, cost) = arch.load()?;
    compare_with_oracle(
        &circuit,
        &arch,
        &MapperConfig {
            placement,
            seed,
            allow_full: true,
            lookahead: 0,
            cost,
        },
    )
}

pub fn compare_with_oracle(
    circuit: &Circuit,
    arch: &Architecture,
    cfg: &MapperConfig,
) -> Result<OracleComparison, PipelineError> {
    let physical = arch.total_qubits();
    if physical > crate::mapper::ORACLE_MAX_QUBITS
        || circuit.len() > crate::mapper::ORACLE_MAX_GATES
    {
        return Err(OracleError::Guard {
            physical,
            gates: circuit.len(),
        }
        .into());
    }
    let mapping = map_circuit(circuit, arch, cfg)?.into_verified()?;
    let optimal = oracle_min_route(circuit, arch, &mapping.initial)?;
    Ok(OracleComparison {
        heuristic: mapping.routing_op_count(),
        optimal,
    })
}

//! Mapping of quantum circuits onto multi-core quantum processors, and
//! characterization of the qubit traffic the mapping produces.
//!
//! The usual flow is circuit -> [`mapper::map_circuit`] -> verified mapping
//! -> [`traffic::TrafficReport`]. [`pipeline`] wraps that flow with file
//! I/O and run manifests; the `qmap` binary is a thin front end over it.

pub mod arch;
pub mod circuit;
pub mod digest;
pub mod mapper;
pub mod pipeline;
pub mod traffic;

pub use arch::{ArchError, Architecture, CostModel, Topology};
pub use circuit::{gen_qft, gen_random, parse_circuit, Circuit, Gate, GateKind};
pub use mapper::{map_circuit, MapError, MappedCircuit, MapperConfig, VerifiedMapping};
pub use traffic::TrafficReport;

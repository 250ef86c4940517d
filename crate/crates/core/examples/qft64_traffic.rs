//! The 64-qubit QFT on eight fully connected 8-qubit cores: map it, run
//! every traffic analysis and write the CSVs.
//!
//!     cargo run --release --example qft64_traffic [out_dir]

use std::path::PathBuf;

use qmap::circuit::gen_qft;
use qmap::mapper::{map_circuit, MapperConfig};
use qmap::traffic::{self, Activity, TrafficReport};
use qmap::Architecture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "qft64-traffic".into())
        .into();
    let arch: Architecture = "8x8:alltoall/alltoall".parse()?;
    let circuit = gen_qft(64)?;
    let cfg = MapperConfig {
        allow_full: true,
        ..MapperConfig::default()
    };
    let mapping = map_circuit(&circuit, &arch, &cfg)?.into_verified()?;
    let report = TrafficReport::analyze(&mapping);

    let s = &report.summary;
    println!(
        "depth {}  gates {}  teleports {}  swaps {}  comm_ratio {:.3}  load CoV {:.3}",
        s.depth, s.gate_ops, s.total_teleports, s.total_swaps, s.comm_ratio, s.load_cov
    );

    println!("teleports between cores (src rows, dst columns):");
    for row in report.core_matrix.rows() {
        println!(
            "  {}",
            row.iter().map(|c| format!("{c:>4}")).collect::<String>()
        );
    }

    let busiest = (0..report.raster.depth())
        .max_by_key(|&t| report.raster.count(t, Activity::Communicate))
        .unwrap_or(0);
    println!(
        "busiest communication step {busiest}: {} of 64 qubits communicating",
        report.raster.count(busiest, Activity::Communicate)
    );

    let (hot, load) = report
        .per_qubit
        .iter()
        .enumerate()
        .max_by_key(|(_, l)| l.total())
        .expect("64 qubits");
    println!(
        "most loaded qubit q{hot}: {} teleports, {} local ops",
        load.teleports, load.intra_ops
    );

    std::fs::create_dir_all(&out)?;
    std::fs::write(
        out.join("core_matrix.csv"),
        traffic::core_matrix_csv(&report.core_matrix),
    )?;
    std::fs::write(
        out.join("per_qubit.csv"),
        traffic::per_qubit_csv(&report.per_qubit),
    )?;
    std::fs::write(out.join("raster.csv"), traffic::raster_csv(&report.raster))?;
    std::fs::write(
        out.join("vertical.csv"),
        traffic::vertical_csv(&report.vertical),
    )?;
    std::fs::write(
        out.join("summary.csv"),
        traffic::summary_csv(&report.summary),
    )?;
    println!("wrote CSVs to {}", out.display());
    Ok(())
}

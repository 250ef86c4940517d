//! Sweep two-qubit density and inter-core topology for random workloads
//! and compare how much of the schedule goes to communication.
//!
//!     cargo run --release --example random_workloads

use qmap::circuit::gen_random;
use qmap::mapper::{map_circuit, MapperConfig};
use qmap::traffic::summarize;
use qmap::Architecture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = MapperConfig::default();
    println!(
        "{:<22} {:>4} {:>6} {:>6} {:>6} {:>7}",
        "arch", "p2", "depth", "swaps", "telep", "comm"
    );
    for spec in [
        "4x8:alltoall/alltoall",
        "4x8:alltoall/line",
        "4x8:grid/ring",
    ] {
        let arch: Architecture = spec.parse()?;
        for p2 in [0.2, 0.5, 0.8] {
            let circuit = gen_random(24, 400, p2, 2024)?;
            let mapping = map_circuit(&circuit, &arch, &cfg)?.into_verified()?;
            let s = summarize(&mapping);
            println!(
                "{:<22} {:>4.1} {:>6} {:>6} {:>6} {:>7.3}",
                spec, p2, s.depth, s.total_swaps, s.total_teleports, s.comm_ratio
            );
        }
    }
    Ok(())
}

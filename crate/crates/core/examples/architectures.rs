//! Build multi-core machines from shorthand and from a TOML description,
//! and query coupling and core distances.
//!
//!     cargo run --example architectures

use qmap::arch::{ArchFile, Architecture, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spec in ["8x8:alltoall/alltoall", "4x9:grid/ring", "6x4:line/grid"] {
        let arch: Architecture = spec.parse()?;
        let far = (0..arch.n_cores())
            .map(|c| arch.core_distance(0, c))
            .collect::<Result<Vec<_>, _>>()?;
        println!(
            "{:<24} {} qubits, core 0 links {:?}, hops from core 0 {:?}",
            arch.name(),
            arch.total_qubits(),
            arch.linked_cores(0),
            far
        );
    }

    let grid = Architecture::build(2, 6, Topology::Grid, Topology::Line)?;
    println!(
        "grid core: neighbours of q1 {:?}, distance q0->q5 {}",
        grid.neighbors(1).collect::<Vec<_>>(),
        grid.intra_distance(0, 5)?
    );
    println!("q5 and q6 coupled? {}", grid.are_adjacent(5, 6)?);

    let (arch, cost) = ArchFile::parse(
        r#"
n_cores = 4
qubits_per_core = 5
intra = "ring"
inter = "line"

[cost]
dur_teleport = 4
"#,
    )?;
    println!(
        "{} with teleport duration {} per hop",
        arch.name(),
        cost.dur_teleport
    );

    if let Err(e) = "7x7:grid/alltoall".parse::<Architecture>() {
        println!("rejected: {e}");
    }
    Ok(())
}

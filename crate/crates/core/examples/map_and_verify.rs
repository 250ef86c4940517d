//! Map a random workload onto a small line-of-lines machine, verify the
//! schedule, and print the first routing decisions.
//!
//!     cargo run --example map_and_verify

use qmap::circuit::gen_random;
use qmap::mapper::{map_circuit, write_mapped, MapperConfig, OpKind, PlacementStrategy};
use qmap::Architecture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arch: Architecture = "3x4:line/line".parse()?;
    let circuit = gen_random(8, 24, 0.6, 7)?;
    let cfg = MapperConfig {
        placement: PlacementStrategy::Random,
        seed: 3,
        ..MapperConfig::default()
    };

    let mapping = map_circuit(&circuit, &arch, &cfg)?.into_verified()?;
    println!(
        "{} on {}: depth {}, {} swaps, {} teleports",
        circuit.name(),
        arch.name(),
        mapping.depth,
        mapping.swap_count(),
        mapping.teleport_count()
    );
    println!("initial {:?}", mapping.initial.as_slice());
    println!("final   {:?}", mapping.final_placement.as_slice());

    for op in mapping.ops.iter().filter(|op| op.is_routing()).take(6) {
        match op.kind {
            OpKind::Swap { a, b } => println!("  t={:<3} swap {a}<->{b}", op.timestep),
            OpKind::Teleport {
                src,
                dst,
                src_core,
                dst_core,
            } => println!(
                "  t={:<3} teleport {src}->{dst} (core {src_core}->{dst_core}, {} steps)",
                op.timestep, op.duration
            ),
            OpKind::Exchange { a, b, .. } => println!("  t={:<3} exchange {a}<->{b}", op.timestep),
            OpKind::Gate { .. } => {}
        }
    }

    // The on-disk form carries digests; editing it is detected on load.
    let text = write_mapped(&mapping);
    println!("mapped file: {} lines", text.lines().count());

    // Without --allow-full a multi-core machine keeps one free slot per core.
    let too_big = gen_random(10, 10, 0.5, 1)?;
    if let Err(e) = map_circuit(&too_big, &arch, &MapperConfig::default()) {
        println!("rejected: {e}");
    }
    Ok(())
}

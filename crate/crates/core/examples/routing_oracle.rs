//! Compare the greedy router with the exact minimum routing cost on tiny
//! instances.
//!
//!     cargo run --example routing_oracle

use qmap::circuit::{gen_random, Circuit, Gate};
use qmap::mapper::{map_circuit, oracle_min_route, MapperConfig};
use qmap::Architecture;

fn compare(
    label: &str,
    circuit: &Circuit,
    arch: &Architecture,
) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = MapperConfig {
        allow_full: true,
        ..MapperConfig::default()
    };
    let mapping = map_circuit(circuit, arch, &cfg)?.into_verified()?;
    let optimal = oracle_min_route(circuit, arch, &mapping.initial)?;
    println!(
        "{label:<28} heuristic {:>2}  optimal {:>2}",
        mapping.routing_op_count(),
        optimal
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    compare(
        "2x2 cx(0,2)",
        &Circuit::new("", 3, vec![Gate::cx(0, 2)])?,
        &"2x2:alltoall/alltoall".parse()?,
    )?;
    compare(
        "line of 4, cx(0,3)",
        &Circuit::new("", 4, vec![Gate::cx(0, 3)])?,
        &"1x4:line/alltoall".parse()?,
    )?;
    compare(
        "full 2x2, cx(0,2)",
        &Circuit::new("", 4, vec![Gate::cx(0, 2)])?,
        &"2x2:alltoall/alltoall".parse()?,
    )?;

    let arch: Architecture = "2x4:line/line".parse()?;
    for seed in 0..8 {
        let c = gen_random(6, 6, 0.8, seed)?;
        compare(&format!("random seed {seed} on 2x4"), &c, &arch)?;
    }
    Ok(())
}

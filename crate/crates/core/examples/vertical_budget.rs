//! Control and readout traffic between host and processor, its projection
//! to large machines, and the resulting link energy.
//!
//!     cargo run --example vertical_budget

use qmap::circuit::{gen_qft_with, QftOptions};
use qmap::mapper::{map_circuit, MapperConfig};
use qmap::traffic::{vertical_bandwidth, vertical_projection, EnergyModel};
use qmap::{Architecture, CostModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arch: Architecture = "4x5:alltoall/alltoall".parse()?;
    let circuit = gen_qft_with(
        16,
        QftOptions {
            bit_reversal: false,
            measure: true,
        },
    )?;
    let mapping = map_circuit(&circuit, &arch, &MapperConfig::default())?.into_verified()?;

    let cost = CostModel::default();
    let series = vertical_bandwidth(&mapping, &cost);
    println!(
        "peak control {} bits/step, peak readout {} b/s over {} steps",
        series.peak_control_bits,
        series.peak_readout_bps,
        series.control_bits.len()
    );

    for qubits in [1_000u64, 1_000_000, 100_000_000] {
        let bps = vertical_projection(qubits, cost.readout_rate);
        println!(
            "{qubits:>11} qubits read out at once: {bps} b/s ({:.1} Tb/s)",
            bps as f64 / 1e12
        );
    }

    for fj in [1.0, 5.0, 20.0] {
        let model = EnergyModel {
            joules_per_bit: fj * 1e-15,
            ..EnergyModel::default()
        };
        let e = model.evaluate(&series);
        println!(
            "{fj:>4} fJ/bit: {:.0} bits, {:.3e} J{}",
            e.total_bits,
            e.joules,
            if e.over_budget { "  (over budget)" } else { "" }
        );
    }
    Ok(())
}

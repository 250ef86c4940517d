//! Parse a circuit from text, inspect its gate mix and dependency layers,
//! and print it back.
//!
//!     cargo run --example parse_and_inspect

use qmap::circuit::{parse_circuit, DependencyDag, GateKind};

const SOURCE: &str = "\
OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[4];
h q[0];
cp(pi/2) q[0],q[1];
cp(pi/4) q[0],q[2];
h q[1];
cx q[2],q[3];
swap q[1],q[3];
measure q[0];
measure q[3];
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = parse_circuit(SOURCE)?.with_name("demo");
    let stats = circuit.stats();
    println!(
        "{}: {} qubits, {} gates ({} two-qubit), depth {}",
        circuit.name(),
        circuit.n_qubits(),
        stats.total,
        stats.two_qubit,
        stats.depth
    );
    for kind in [
        GateKind::Hadamard,
        GateKind::ControlledPhase,
        GateKind::Cnot,
        GateKind::Swap,
        GateKind::Measure,
    ] {
        println!("  {:<8} {}", kind.mnemonic(), stats.count(kind));
    }

    let dag = DependencyDag::build(&circuit);
    println!("layered schedule:");
    for g in dag.layered_order() {
        println!("  layer {}  {}", dag.layer(g), circuit.gates()[g]);
    }

    // Errors carry line and column.
    match parse_circuit("qreg q[2];\ncx q[0],q[5];\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }

    print!("{}", circuit.to_qasm());
    Ok(())
}

use std::f64::consts::PI;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitError, Gate};

/// Variants of the QFT generator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QftOptions {
    /// Append the final bit-reversal SWAP stage.
    pub bit_reversal: bool,
    /// Append a measurement on every qubit.
    pub measure: bool,
}

/// QFT without the bit-reversal stage: `n` Hadamards and `n(n-1)/2` controlled phases.
pub fn gen_qft(n: usize) -> Result<Circuit, CircuitError> {
    gen_qft_with(n, QftOptions::default())
}

pub fn gen_qft_with(n: usize, options: QftOptions) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidParameter(
            "QFT needs at least one qubit".into(),
        ));
    }
    let mut gates = Vec::with_capacity(n + n * (n - 1) / 2);
    for i in 0..n {
        gates.push(Gate::h(i).with_label("qft"));
        for j in i + 1..n {
            let angle = PI / 2f64.powi((j - i) as i32);
            gates.push(Gate::cp(angle, i, j).with_label("qft"));
        }
    }
    if options.bit_reversal {
        for i in 0..n / 2 {
            gates.push(Gate::swap(i, n - 1 - i).with_label("qft-reverse"));
        }
    }
    if options.measure {
        gates.extend((0..n).map(|q| Gate::measure(q).with_label("readout")));
    }
    Circuit::new(format!("qft{n}"), n, gates)
}

/// Random circuit with exactly `round(p2 * gates)` CNOTs.
///
/// Two-qubit operands are drawn uniformly over unordered distinct pairs and
/// emitted low index first. Output depends only on the arguments.
pub fn gen_random(n: usize, gates: usize, p2: f64, seed: u64) -> Result<Circuit, CircuitError> {
    if !(0.0..=1.0).contains(&p2) {
        return Err(CircuitError::InvalidParameter(format!(
            "two-qubit fraction {p2} outside [0, 1]"
        )));
    }
    if n == 0 || (p2 > 0.0 && n < 2) {
        return Err(CircuitError::InvalidParameter(format!(
            "{n} qubit(s) is too few for two-qubit fraction {p2}"
        )));
    }
    let two_qubit = (p2 * gates as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_two = vec![false; gates];
    for pos in index::sample(&mut rng, gates, two_qubit) {
        is_two[pos] = true;
    }
    let n_pairs = n * (n - 1) / 2;
    let list = is_two
        .into_iter()
        .map(|two| {
            if two {
                let (a, b) = unrank_pair(rng.gen_range(0..n_pairs), n);
                Gate::cx(a, b).with_label("random")
            } else {
                let q = rng.gen_range(0..n);
                let gate = if rng.gen_bool(0.5) {
                    Gate::h(q)
                } else {
                    Gate::x(q)
                };
                gate.with_label("random")
            }
        })
        .collect();
    Circuit::new(format!("random{n}x{gates}s{seed}"), n, list)
}

/// Maps `0..n(n-1)/2` onto pairs `(a, b)` with `a < b`, row by row.
fn unrank_pair(mut rank: usize, n: usize) -> (usize, usize) {
    for a in 0..n {
        let row = n - 1 - a;
        if rank < row {
            return (a, a + 1 + rank);
        }
        rank -= row;
    }
    unreachable!("pair rank out of range")
}

use super::Circuit;

/// Immediate-dependency DAG of a circuit.
///
/// Gate `g` has `h` as a predecessor when `h` is the most recent earlier gate
/// touching one of `g`'s operands. Layers are ASAP: sources sit at layer 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    predecessors: Vec<Vec<usize>>,
    layers: Vec<usize>,
}

impl DependencyDag {
    pub fn build(circuit: &Circuit) -> Self {
        let mut last_on_qubit: Vec<Option<usize>> = vec![None; circuit.n_qubits()];
        let mut predecessors = Vec::with_capacity(circuit.len());
        let mut layers = Vec::with_capacity(circuit.len());

        for (index, gate) in circuit.gates().iter().enumerate() {
            let mut preds: Vec<usize> = gate
                .qubits()
                .iter()
                .filter_map(|&q| last_on_qubit[q])
                .collect();
            preds.sort_unstable();
            preds.dedup();

            let layer = preds.iter().map(|&p| layers[p] + 1).max().unwrap_or(0);
            for &q in gate.qubits() {
                last_on_qubit[q] = Some(index);
            }
            predecessors.push(preds);
            layers.push(layer);
        }

        Self {
            predecessors,
            layers,
        }
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn predecessors(&self, gate: usize) -> &[usize] {
        &self.predecessors[gate]
    }

    pub fn layer(&self, gate: usize) -> usize {
        self.layers[gate]
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn max_layer(&self) -> Option<usize> {
        self.layers.iter().copied().max()
    }

    /// Number of ASAP layers; 0 for an empty circuit.
    pub fn depth(&self) -> usize {
        self.max_layer().map_or(0, |l| l + 1)
    }

    /// Gate indices ordered by (layer, program index). This is a topological order.
    pub fn layered_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&g| (self.layers[g], g));
        order
    }

    /// All dependency edges `(pred, succ)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.predecessors
            .iter()
            .enumerate()
            .flat_map(|(g, preds)| preds.iter().map(move |&p| (p, g)))
    }
}

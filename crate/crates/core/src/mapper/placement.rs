use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MapError, MapperConfig, PlacementStrategy};
use crate::arch::Architecture;
use crate::circuit::Circuit;

/// Injective assignment of virtual qubits to physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    v2p: Vec<usize>,
    p2v: Vec<Option<usize>>,
}

impl Placement {
    pub fn new(v2p: Vec<usize>, n_physical: usize) -> Result<Self, MapError> {
        let mut p2v = vec![None; n_physical];
        for (v, &p) in v2p.iter().enumerate() {
            match p2v.get_mut(p) {
                None => {
                    return Err(MapError::InvalidPlacement(format!(
                        "virtual {v} -> physical {p} out of range {n_physical}"
                    )))
                }
                Some(Some(other)) => {
                    return Err(MapError::InvalidPlacement(format!(
                        "virtual {v} and {other} share physical {p}"
                    )))
                }
                Some(slot) => *slot = Some(v),
            }
        }
        Ok(Self { v2p, p2v })
    }

    pub fn identity(n_virtual: usize, n_physical: usize) -> Result<Self, MapError> {
        Self::new((0..n_virtual).collect(), n_physical)
    }

    pub fn n_virtual(&self) -> usize {
        self.v2p.len()
    }

    pub fn n_physical(&self) -> usize {
        self.p2v.len()
    }

    pub fn physical(&self, v: usize) -> usize {
        self.v2p[v]
    }

    pub fn virtual_at(&self, p: usize) -> Option<usize> {
        self.p2v[p]
    }

    pub fn is_free(&self, p: usize) -> bool {
        self.p2v[p].is_none()
    }

    /// Virtual-to-physical map, indexed by virtual qubit.
    pub fn as_slice(&self) -> &[usize] {
        &self.v2p
    }

    /// Exchanges the contents of two physical slots; either may be empty.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        self.p2v.swap(a, b);
        if let Some(v) = self.p2v[a] {
            self.v2p[v] = a;
        }
        if let Some(v) = self.p2v[b] {
            self.v2p[v] = b;
        }
    }

    /// Free physical slots within `range`, ascending.
    pub fn free_in(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = usize> + '_ {
        range.filter(move |&p| self.p2v[p].is_none())
    }
}

/// Initial virtual-to-physical assignment. Only raw capacity is checked here.
pub fn initial_placement(
    circuit: &Circuit,
    arch: &Architecture,
    cfg: &MapperConfig,
) -> Result<Placement, MapError> {
    let n = circuit.n_qubits();
    let total = arch.total_qubits();
    if n > total {
        return Err(MapError::Capacity {
            needed: n,
            available: total,
            note: "",
        });
    }
    let v2p = match cfg.placement {
        PlacementStrategy::Block => (0..n).collect(),
        PlacementStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut slots: Vec<usize> = (0..total).collect();
            slots.shuffle(&mut rng);
            slots.truncate(n);
            slots
        }
    };
    Placement::new(v2p, total)
}

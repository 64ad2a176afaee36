//! Enumeration of the two-qubit Clifford group (modulo global phase).
//!
//! Elements are generated breadth-first from the identity with the generators
//! `H_a, H_b, S_a, S_b, CX_ab`, so every entry carries a shortest elementary
//! gate sequence. Two elements are identified when they conjugate
//! `X_a, Z_a, X_b, Z_b` to the same signed Pauli operators.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{IccrError, Result};
use crate::gate::{elementary_table, GateKind, GateRecord, LocalTable};

/// |C_2 / U(1)|
pub const GROUP_ORDER: usize = 11520;

/// Elementary gate on the local pair: `pos = 0` acts on site `a` (or on `a→b`
/// for two-qubit gates), `pos = 1` acts on site `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalGate {
    pub kind: GateKind,
    pub pos: u8,
}

impl LocalGate {
    pub fn place(&self, a: usize, b: usize) -> GateRecord {
        if self.kind.is_two_qubit() {
            GateRecord::two(self.kind, a, b)
        } else if self.pos == 0 {
            GateRecord::single(self.kind, a)
        } else {
            GateRecord::single(self.kind, b)
        }
    }

    fn table(&self) -> &'static LocalTable {
        elementary_table(self.kind, self.pos as usize)
    }
}

#[derive(Debug, Clone)]
pub struct Clifford2Entry {
    pub local: LocalTable,
    /// Gates in acting order.
    pub sequence: Vec<LocalGate>,
}

/// Canonical key of a group element: signed images of the four generators.
pub fn canonical_key(t: &LocalTable) -> u32 {
    t.images.iter().enumerate().fold(0u32, |acc, (k, img)| {
        let field = (img.bits as u32) | (((img.phase as u32 >> 1) & 1) << 4);
        acc | (field << (5 * k))
    })
}

const GENERATORS: [LocalGate; 5] = [
    LocalGate {
        kind: GateKind::H,
        pos: 0,
    },
    LocalGate {
        kind: GateKind::H,
        pos: 1,
    },
    LocalGate {
        kind: GateKind::S,
        pos: 0,
    },
    LocalGate {
        kind: GateKind::S,
        pos: 1,
    },
    LocalGate {
        kind: GateKind::CX,
        pos: 0,
    },
];

fn enumerate() -> Vec<Clifford2Entry> {
    let mut entries = vec![Clifford2Entry {
        local: LocalTable::identity(),
        sequence: Vec::new(),
    }];
    let mut seen = HashMap::with_capacity(GROUP_ORDER);
    seen.insert(canonical_key(&entries[0].local), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for g in GENERATORS {
            let next = entries[idx].local.then(g.table());
            let key = canonical_key(&next);
            if seen.contains_key(&key) {
                continue;
            }
            let mut sequence = entries[idx].sequence.clone();
            sequence.push(g);
            seen.insert(key, entries.len());
            queue.push_back(entries.len());
            entries.push(Clifford2Entry {
                local: next,
                sequence,
            });
        }
    }
    assert_eq!(entries.len(), GROUP_ORDER, "two-qubit Clifford enumeration");
    entries
}

/// The full group table, built on first use.
pub fn table() -> &'static [Clifford2Entry] {
    static TABLE: OnceLock<Vec<Clifford2Entry>> = OnceLock::new();
    TABLE.get_or_init(enumerate)
}

/// Index of the element with the given conjugation action, if it is Clifford.
pub fn index_of(t: &LocalTable) -> Option<u16> {
    static INDEX: OnceLock<HashMap<u32, u16>> = OnceLock::new();
    let index = INDEX.get_or_init(|| {
        table()
            .iter()
            .enumerate()
            .map(|(i, e)| (canonical_key(&e.local), i as u16))
            .collect()
    });
    index.get(&canonical_key(t)).copied()
}

/// Uniformly random two-qubit Clifford on sites `(a, b)`, as one composite gate.
/// Use [`GateRecord::elementary`] for its elementary-gate expansion.
pub fn random_two_qubit_clifford<R: Rng + ?Sized>(
    rng: &mut R,
    a: usize,
    b: usize,
) -> Result<GateRecord> {
    if a == b {
        return Err(IccrError::IdenticalSites(a));
    }
    let idx = rng.random_range(0..GROUP_ORDER) as u16;
    Ok(GateRecord::two(GateKind::Clifford2(idx), a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::LocalPauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_has_expected_order() {
        assert_eq!(table().len(), GROUP_ORDER);
        assert_eq!(table()[0].sequence.len(), 0);
    }

    #[test]
    fn sequences_reproduce_tables() {
        for (i, e) in table().iter().enumerate().step_by(97) {
            let t = e
                .sequence
                .iter()
                .fold(LocalTable::identity(), |acc, g| acc.then(g.table()));
            assert_eq!(canonical_key(&t), canonical_key(&e.local), "entry {i}");
        }
    }

    #[test]
    fn images_are_hermitian_and_symplectic() {
        for e in table() {
            let im = &e.local.images;
            for img in im {
                assert_eq!(img.phase & 1, 0);
                assert_ne!(img.bits, 0);
            }
            let anti = |p: LocalPauli, q: LocalPauli| {
                let pq = p.mul(q);
                let qp = q.mul(p);
                pq.phase != qp.phase
            };
            assert!(anti(im[0], im[1]));
            assert!(anti(im[2], im[3]));
            for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                assert!(!anti(im[i], im[j]));
            }
        }
    }

    #[test]
    fn elementary_gates_are_members() {
        for kind in [
            GateKind::CZ,
            GateKind::CY,
            GateKind::Swap,
            GateKind::Sdg,
            GateKind::Y,
        ] {
            assert!(index_of(elementary_table(kind, 0)).is_some(), "{kind:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            assert_eq!(
                random_two_qubit_clifford(&mut r1, 0, 1).unwrap(),
                random_two_qubit_clifford(&mut r2, 0, 1).unwrap()
            );
        }
        assert!(random_two_qubit_clifford(&mut r1, 2, 2).is_err());
    }

    #[test]
    fn sampling_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws_per = 100usize;
        let mut counts = vec![0u32; GROUP_ORDER];
        for _ in 0..GROUP_ORDER * draws_per {
            let g = random_two_qubit_clifford(&mut rng, 0, 1).unwrap();
            // identify the element through its conjugation action
            let idx = index_of(g.local_table()).unwrap();
            counts[idx as usize] += 1;
        }
        let mean = draws_per as f64;
        let sigma = (mean * (1.0 - 1.0 / GROUP_ORDER as f64)).sqrt();
        let worst = counts
            .iter()
            .map(|&c| (c as f64 - mean).abs() / sigma)
            .fold(0.0, f64::max);
        assert!(worst < 5.0, "max deviation {worst} sigma");
    }
}

//! Clifford gate records and their action on local Pauli operators.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford2;
use crate::error::{IccrError, Result};
use crate::pauli::mul_assign_words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    /// Controlled-X, control on the first site.
    CX,
    /// Controlled-Y, control on the first site.
    CY,
    CZ,
    Swap,
    /// Element of the two-qubit Clifford group, indexed into [`crate::clifford2::table`].
    Clifford2(u16),
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        matches!(
            self,
            GateKind::CX | GateKind::CY | GateKind::CZ | GateKind::Swap | GateKind::Clifford2(_)
        )
    }

    /// 2×2 matrix of a single-qubit gate, row-major, in the Z basis.
    pub fn matrix1(self) -> Option<[[Complex64; 2]; 2]> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Some(match self {
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[l, o], [o, i]],
            GateKind::Sdg => [[l, o], [o, -i]],
            GateKind::X => [[o, l], [l, o]],
            GateKind::Y => [[o, -i], [i, o]],
            GateKind::Z => [[l, o], [o, -l]],
            _ => return None,
        })
    }
}

/// One gate applied to one or two sites. For single-qubit gates both entries
/// of `sites` hold the same index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: GateKind,
    pub sites: [usize; 2],
}

impl GateRecord {
    pub fn single(kind: GateKind, site: usize) -> Self {
        debug_assert!(!kind.is_two_qubit());
        GateRecord {
            kind,
            sites: [site, site],
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        debug_assert!(kind.is_two_qubit());
        GateRecord {
            kind,
            sites: [a, b],
        }
    }

    pub fn h(a: usize) -> Self {
        Self::single(GateKind::H, a)
    }
    pub fn s(a: usize) -> Self {
        Self::single(GateKind::S, a)
    }
    pub fn sdg(a: usize) -> Self {
        Self::single(GateKind::Sdg, a)
    }
    pub fn x(a: usize) -> Self {
        Self::single(GateKind::X, a)
    }
    pub fn y(a: usize) -> Self {
        Self::single(GateKind::Y, a)
    }
    pub fn z(a: usize) -> Self {
        Self::single(GateKind::Z, a)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::CX, control, target)
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Self::two(GateKind::CY, control, target)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::CZ, a, b)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::Swap, a, b)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.is_two_qubit()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for &s in self.active_sites() {
            if s >= n_qubits {
                return Err(IccrError::SiteOutOfRange { site: s, n_qubits });
            }
        }
        if self.is_two_qubit() && self.sites[0] == self.sites[1] {
            return Err(IccrError::IdenticalSites(self.sites[0]));
        }
        if let GateKind::Clifford2(idx) = self.kind {
            if idx as usize >= clifford2::GROUP_ORDER {
                return Err(IccrError::Config(format!(
                    "two-qubit Clifford index {idx} out of range"
                )));
            }
        }
        Ok(())
    }

    pub fn active_sites(&self) -> &[usize] {
        if self.is_two_qubit() {
            &self.sites
        } else {
            &self.sites[..1]
        }
    }

    /// Conjugation table `G† P G` on the gate's local sites.
    pub fn local_table(&self) -> &'static LocalTable {
        match self.kind {
            GateKind::Clifford2(idx) => &clifford2::table()[idx as usize].local,
            k => elementary_table(k, 0),
        }
    }

    /// Expansion into elementary gates (identity for non-composite gates).
    pub fn elementary(&self) -> Vec<GateRecord> {
        match self.kind {
            GateKind::Clifford2(idx) => clifford2::table()[idx as usize]
                .sequence
                .iter()
                .map(|g| g.place(self.sites[0], self.sites[1]))
                .collect(),
            _ => vec![*self],
        }
    }
}

impl fmt::Display for GateRecord {
    /// Sites are printed 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Clifford2(idx) => {
                write!(f, "C2[{idx}]({},{})", self.sites[0] + 1, self.sites[1] + 1)
            }
            k if k.is_two_qubit() => {
                write!(f, "{k:?}({},{})", self.sites[0] + 1, self.sites[1] + 1)
            }
            k => write!(f, "{k:?}({})", self.sites[0] + 1),
        }
    }
}

/// Pauli operator on at most two local sites `a`, `b`.
///
/// Bit layout: bit 0 = x_a, bit 1 = z_a, bit 2 = x_b, bit 3 = z_b. The phase is
/// the letter-convention exponent of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LocalPauli {
    pub bits: u8,
    pub phase: u8,
}

impl LocalPauli {
    pub const fn new(bits: u8, phase: u8) -> Self {
        LocalPauli { bits, phase }
    }

    #[inline]
    fn words(self) -> (u64, u64) {
        let b = self.bits as u64;
        let x = (b & 1) | ((b >> 1) & 2);
        let z = ((b >> 1) & 1) | ((b >> 2) & 2);
        (x, z)
    }

    #[inline]
    fn from_words(x: u64, z: u64, phase: u8) -> Self {
        let bits = (x & 1) | ((z & 1) << 1) | ((x & 2) << 1) | ((z & 2) << 2);
        LocalPauli {
            bits: bits as u8,
            phase,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: LocalPauli) -> LocalPauli {
        let (mut ax, mut az) = self.words();
        let (bx, bz) = other.words();
        let mut xs = [ax];
        let mut zs = [az];
        let e = mul_assign_words(&mut xs, &mut zs, self.phase, &[bx], &[bz], other.phase);
        ax = xs[0];
        az = zs[0];
        Self::from_words(ax, az, e)
    }

    /// Number of sites carrying a Y letter.
    fn y_count(self) -> u8 {
        let (x, z) = self.words();
        (x & z).count_ones() as u8
    }

    pub fn shifted_to_b(self) -> LocalPauli {
        LocalPauli {
            bits: (self.bits & 0b11) << 2,
            phase: self.phase,
        }
    }
}

pub(crate) const XA: u8 = 0b0001;
pub(crate) const ZA: u8 = 0b0010;
pub(crate) const XB: u8 = 0b0100;
pub(crate) const ZB: u8 = 0b1000;

/// Conjugation action `P ↦ G† P G` of a gate on its local sites.
#[derive(Debug, Clone)]
pub struct LocalTable {
    /// Images of X_a, Z_a, X_b, Z_b.
    pub images: [LocalPauli; 4],
    /// Image of every phase-free local letter pattern, indexed by its bits.
    pub table: [LocalPauli; 16],
}

impl LocalTable {
    pub fn from_images(images: [LocalPauli; 4]) -> Self {
        let mut table = [LocalPauli::default(); 16];
        for (bits, slot) in table.iter_mut().enumerate() {
            let p = LocalPauli::new(bits as u8, 0);
            // i^{#Y} X_a^xa Z_a^za X_b^xb Z_b^zb
            let mut acc = LocalPauli::new(0, p.y_count() & 3);
            for (k, img) in images.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    acc = acc.mul(*img);
                }
            }
            *slot = acc;
        }
        LocalTable { images, table }
    }

    /// `G† P G` for an arbitrary local Pauli.
    #[inline]
    pub fn conjugate(&self, p: LocalPauli) -> LocalPauli {
        let img = self.table[p.bits as usize];
        LocalPauli::new(img.bits, (img.phase + p.phase) & 3)
    }

    pub fn identity() -> Self {
        Self::from_images([
            LocalPauli::new(XA, 0),
            LocalPauli::new(ZA, 0),
            LocalPauli::new(XB, 0),
            LocalPauli::new(ZB, 0),
        ])
    }

    /// Table of the gate sequence `first` then `second` (acting order).
    pub fn then(&self, second: &LocalTable) -> LocalTable {
        // (g2 g1)† P (g2 g1) = g1† (g2† P g2) g1
        let images = second.images.map(|img| self.conjugate(img));
        Self::from_images(images)
    }
}

fn elementary_images(kind: GateKind) -> [LocalPauli; 4] {
    const P: u8 = 0;
    const M: u8 = 2;
    let y_a = XA | ZA;
    let y_b = XB | ZB;
    let lp = LocalPauli::new;
    let single = |x: LocalPauli, z: LocalPauli| [x, z, lp(XB, P), lp(ZB, P)];
    match kind {
        GateKind::H => single(lp(ZA, P), lp(XA, P)),
        GateKind::S => single(lp(y_a, M), lp(ZA, P)),
        GateKind::Sdg => single(lp(y_a, P), lp(ZA, P)),
        GateKind::X => single(lp(XA, P), lp(ZA, M)),
        GateKind::Y => single(lp(XA, M), lp(ZA, M)),
        GateKind::Z => single(lp(XA, M), lp(ZA, P)),
        GateKind::CX => [lp(XA | XB, P), lp(ZA, P), lp(XB, P), lp(ZA | ZB, P)],
        GateKind::CY => [lp(XA | y_b, P), lp(ZA, P), lp(ZA | XB, P), lp(ZA | ZB, P)],
        GateKind::CZ => [lp(XA | ZB, P), lp(ZA, P), lp(ZA | XB, P), lp(ZB, P)],
        GateKind::Swap => [lp(XB, P), lp(ZB, P), lp(XA, P), lp(ZA, P)],
        GateKind::Clifford2(_) => unreachable!("composite gates have table entries"),
    }
}

const ELEMENTARY: [GateKind; 10] = [
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::CX,
    GateKind::CY,
    GateKind::CZ,
    GateKind::Swap,
];

/// Table for an elementary gate placed on local site `a` (`pos = 0`) or, for
/// single-qubit gates, on local site `b` (`pos = 1`).
pub(crate) fn elementary_table(kind: GateKind, pos: usize) -> &'static LocalTable {
    static TABLES: OnceLock<Vec<[LocalTable; 2]>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        ELEMENTARY
            .iter()
            .map(|&k| {
                let imgs = elementary_images(k);
                let on_a = LocalTable::from_images(imgs);
                let on_b = if k.is_two_qubit() {
                    on_a.clone()
                } else {
                    LocalTable::from_images([
                        LocalPauli::new(XA, 0),
                        LocalPauli::new(ZA, 0),
                        imgs[0].shifted_to_b(),
                        imgs[1].shifted_to_b(),
                    ])
                };
                [on_a, on_b]
            })
            .collect()
    });
    let idx = ELEMENTARY
        .iter()
        .position(|&k| k == kind)
        .expect("elementary gate");
    &tables[idx][pos]
}

//! Clifford unitaries stored as the conjugation images of all generators.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{IccrError, Result};
use crate::gate::{GateKind, GateRecord, LocalTable};
use crate::pauli::{mul_assign_words, words_for, Pauli, PauliString, WORD_BITS};

/// Tableau of a Clifford unitary `U`.
///
/// Row `2q` holds `U† X_q U` and row `2q + 1` holds `U† Z_q U`, each as a packed
/// Pauli string with a letter-convention phase.
///
/// Two ways of growing `U` are provided:
///
/// * [`compose`](Self::compose) applies gates after `U`, i.e. `U ← G U`. This
///   only rewrites the rows of the generators the gate touches.
/// * [`prepend`](Self::prepend) applies gates before `U`, i.e. `U ← U G`. This
///   rewrites the columns of the gate sites in every row.
///
/// For example, starting from the identity, `compose([H_0])` followed by
/// `prepend([S_0])` yields `U = H S`, which maps `Z_0` to
/// `U† Z_0 U = S† X_0 S = -Y_0`.
#[derive(Clone)]
pub struct CliffordTableau {
    n: usize,
    stride: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    phases: Vec<u8>,
    log: Option<VecDeque<GateRecord>>,
}

/// Symplectic checks in debug builds are skipped above this size.
const DEBUG_CHECK_MAX_N: usize = 24;

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let stride = words_for(n + 1);
        let mut t = CliffordTableau {
            n,
            stride,
            xs: vec![0; 2 * n * stride],
            zs: vec![0; 2 * n * stride],
            phases: vec![0; 2 * n],
            log: None,
        };
        for q in 0..n {
            t.set_generator_row(q);
        }
        t
    }

    /// Identity tableau that also records every gate for later replay.
    pub fn identity_with_log(n: usize) -> Self {
        let mut t = Self::identity(n);
        t.log = Some(VecDeque::new());
        t
    }

    fn set_generator_row(&mut self, q: usize) {
        let (w, b) = (q / WORD_BITS, q % WORD_BITS);
        let rx = 2 * q * self.stride;
        let rz = (2 * q + 1) * self.stride;
        self.xs[rx..rx + self.stride].fill(0);
        self.zs[rx..rx + self.stride].fill(0);
        self.xs[rz..rz + self.stride].fill(0);
        self.zs[rz..rz + self.stride].fill(0);
        self.xs[rx + w] |= 1 << b;
        self.zs[rz + w] |= 1 << b;
        self.phases[2 * q] = 0;
        self.phases[2 * q + 1] = 0;
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Gates applied so far in acting order, when logging is enabled and the
    /// log is still valid.
    pub fn replay_log(&self) -> Option<Vec<GateRecord>> {
        self.log.as_ref().map(|l| l.iter().copied().collect())
    }

    pub fn has_replay_log(&self) -> bool {
        self.log.is_some()
    }

    fn row_string(&self, r: usize) -> PauliString {
        let w = words_for(self.n);
        let off = r * self.stride;
        PauliString::from_raw(
            self.n,
            self.xs[off..off + w].to_vec(),
            self.zs[off..off + w].to_vec(),
            self.phases[r],
        )
    }

    /// `U† X_q U`.
    pub fn x_image(&self, q: usize) -> PauliString {
        self.row_string(2 * q)
    }

    /// `U† Z_q U`.
    pub fn z_image(&self, q: usize) -> PauliString {
        self.row_string(2 * q + 1)
    }

    fn check_size(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(IccrError::SizeMismatch {
                expected: self.n,
                found: p.n_qubits(),
            });
        }
        Ok(())
    }

    /// `U† p U`, in O(N · |support(p)|).
    pub fn conjugate_adjoint(&self, p: &PauliString) -> Result<PauliString> {
        self.check_size(p)?;
        let s = self.stride;
        let mut ax = vec![0u64; s];
        let mut az = vec![0u64; s];
        // i^e ⊗σ = i^{e + #Y} X^x Z^z
        let mut e = p.phase().exponent() as u32;
        for site in p.support() {
            let (px, pz) = p.get(site).bits();
            if px && pz {
                e += 1;
            }
            if px {
                let off = 2 * site * s;
                e = mul_assign_words(
                    &mut ax,
                    &mut az,
                    e as u8 & 3,
                    &self.xs[off..off + s],
                    &self.zs[off..off + s],
                    self.phases[2 * site],
                ) as u32;
            }
            if pz {
                let off = (2 * site + 1) * s;
                e = mul_assign_words(
                    &mut ax,
                    &mut az,
                    e as u8 & 3,
                    &self.xs[off..off + s],
                    &self.zs[off..off + s],
                    self.phases[2 * site + 1],
                ) as u32;
            }
        }
        let w = words_for(self.n);
        ax.truncate(w);
        az.truncate(w);
        Ok(PauliString::from_raw(self.n, ax, az, (e & 3) as u8))
    }

    fn validate(&self, gates: &[GateRecord]) -> Result<()> {
        gates.iter().try_for_each(|g| g.validate(self.n))
    }

    /// `U ← G_k ⋯ G_1 U` for `gates = [G_1, …, G_k]` in acting order.
    pub fn compose(&mut self, gates: &[GateRecord]) -> Result<()> {
        self.validate(gates)?;
        for g in gates {
            self.compose_one(g);
        }
        if let Some(log) = self.log.as_mut() {
            log.extend(gates.iter().copied());
        }
        self.debug_check();
        Ok(())
    }

    fn compose_one(&mut self, g: &GateRecord) {
        let s = self.stride;
        let table = g.local_table();
        let sites = g.active_sites();
        let n_gen = 2 * sites.len();
        // old rows X_a, Z_a, X_b, Z_b
        let mut old_x = vec![0u64; 4 * s];
        let mut old_z = vec![0u64; 4 * s];
        let mut old_p = [0u8; 4];
        for (k, &site) in sites.iter().enumerate() {
            for t in 0..2 {
                let r = 2 * site + t;
                let slot = 2 * k + t;
                old_x[slot * s..(slot + 1) * s].copy_from_slice(&self.xs[r * s..(r + 1) * s]);
                old_z[slot * s..(slot + 1) * s].copy_from_slice(&self.zs[r * s..(r + 1) * s]);
                old_p[slot] = self.phases[r];
            }
        }
        for gen in 0..n_gen {
            let img = table.images[gen];
            let r = 2 * sites[gen / 2] + gen % 2;
            let (rx, rz) = (
                &mut self.xs[r * s..(r + 1) * s],
                &mut self.zs[r * s..(r + 1) * s],
            );
            rx.fill(0);
            rz.fill(0);
            let y_count = ((img.bits & (img.bits >> 1) & 0b0101) as u32).count_ones();
            let mut e = (img.phase as u32 + y_count) as u8 & 3;
            for slot in 0..n_gen {
                if img.bits & (1 << slot) != 0 {
                    e = mul_assign_words(
                        rx,
                        rz,
                        e,
                        &old_x[slot * s..(slot + 1) * s],
                        &old_z[slot * s..(slot + 1) * s],
                        old_p[slot],
                    );
                }
            }
            self.phases[r] = e;
        }
    }

    /// `U ← U G_k ⋯ G_1` for `gates = [G_1, …, G_k]` in acting order, so the
    /// gates act on the state before `U` does.
    ///
    /// Consecutive single-qubit gates of one kind on distinct sites, and
    /// consecutive CNOTs onto one target from distinct controls, are applied
    /// to each row as a single word-parallel update.
    pub fn prepend(&mut self, gates: &[GateRecord]) -> Result<()> {
        self.validate(gates)?;
        if gates.is_empty() {
            return Ok(());
        }
        let mut ops = batch_ops(gates, self.stride);
        ops.reverse();
        let ops = fuse_singles(ops, self.stride);
        let s = self.stride;
        for r in 0..2 * self.n {
            let rx = &mut self.xs[r * s..(r + 1) * s];
            let rz = &mut self.zs[r * s..(r + 1) * s];
            let mut phase = self.phases[r];
            for op in &ops {
                phase = op.conjugate_row(rx, rz, phase);
            }
            self.phases[r] = phase;
        }
        if let Some(log) = self.log.as_mut() {
            for g in gates.iter().rev() {
                log.push_front(*g);
            }
        }
        self.debug_check();
        Ok(())
    }

    /// Extends `U` to `U ⊗ 1` on one extra qubit, appended at index `n`.
    pub fn add_qubit(&mut self) {
        let new_n = self.n + 1;
        if words_for(new_n + 1) > self.stride {
            let new_stride = words_for(new_n + 1);
            let rows = 2 * self.n;
            let mut xs = vec![0u64; rows * new_stride];
            let mut zs = vec![0u64; rows * new_stride];
            for r in 0..rows {
                xs[r * new_stride..r * new_stride + self.stride]
                    .copy_from_slice(&self.xs[r * self.stride..(r + 1) * self.stride]);
                zs[r * new_stride..r * new_stride + self.stride]
                    .copy_from_slice(&self.zs[r * self.stride..(r + 1) * self.stride]);
            }
            self.xs = xs;
            self.zs = zs;
            self.stride = new_stride;
        }
        self.xs.resize(2 * new_n * self.stride, 0);
        self.zs.resize(2 * new_n * self.stride, 0);
        self.phases.resize(2 * new_n, 0);
        self.n = new_n;
        self.set_generator_row(new_n - 1);
    }

    /// Removes qubit `a`, which must be unentangled: `U† Z_a U = ±Z_a` and
    /// `U† X_a U` acts only on `a`. Invalidates the replay log.
    pub fn drop_qubit(&mut self, a: usize) -> Result<()> {
        if a >= self.n {
            return Err(IccrError::SiteOutOfRange {
                site: a,
                n_qubits: self.n,
            });
        }
        let zimg = self.z_image(a);
        if zimg.weight() != 1 || zimg.get(a) != Pauli::Z {
            return Err(IccrError::AncillaEntangled(format!(
                "image of Z_{} is {zimg}",
                a + 1
            )));
        }
        let ximg = self.x_image(a);
        if ximg.weight() != 1 || !matches!(ximg.get(a), Pauli::X | Pauli::Y) {
            return Err(IccrError::AncillaEntangled(format!(
                "image of X_{} is {ximg}",
                a + 1
            )));
        }
        let s = self.stride;
        let (wa, ba) = (a / WORD_BITS, a % WORD_BITS);
        for r in 0..2 * self.n {
            if r / 2 == a {
                continue;
            }
            if (self.xs[r * s + wa] | self.zs[r * s + wa]) >> ba & 1 != 0 {
                return Err(IccrError::AncillaEntangled(format!(
                    "row {} acts on qubit {}",
                    r + 1,
                    a + 1
                )));
            }
        }
        self.xs.drain(2 * a * s..(2 * a + 2) * s);
        self.zs.drain(2 * a * s..(2 * a + 2) * s);
        self.phases.drain(2 * a..2 * a + 2);
        self.n -= 1;
        for r in 0..2 * self.n {
            remove_bit(&mut self.xs[r * s..(r + 1) * s], a);
            remove_bit(&mut self.zs[r * s..(r + 1) * s], a);
        }
        self.log = None;
        self.debug_check();
        Ok(())
    }

    /// Checks the symplectic condition and that all images are Hermitian.
    pub fn is_symplectic(&self) -> bool {
        let rows: Vec<PauliString> = (0..2 * self.n).map(|r| self.row_string(r)).collect();
        for (i, ri) in rows.iter().enumerate() {
            if !ri.is_hermitian() {
                return false;
            }
            for (j, rj) in rows.iter().enumerate().skip(i + 1) {
                let partners = i / 2 == j / 2;
                let commute = ri.commutes(rj).expect("same size");
                if commute == partners {
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    fn debug_check(&self) {
        debug_assert!(
            self.n > DEBUG_CHECK_MAX_N || self.is_symplectic(),
            "tableau lost the symplectic condition"
        );
    }
}

/// Sparse bit mask: `(word index, bits)` for the non-empty words.
type Mask = Vec<(usize, u64)>;

fn mask_of(sites: &[usize], stride: usize) -> Mask {
    let mut words = vec![0u64; stride];
    for &i in sites {
        words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }
    words
        .into_iter()
        .enumerate()
        .filter(|&(_, m)| m != 0)
        .collect()
}

/// A single-qubit gate as a branch-free update of the masked bits of a word.
/// Every field is all ones or all zeros. The `sign_*` fields select the
/// letters whose sign flips, `swap` exchanges x and z, and `z_from_x` adds x
/// into z.
#[derive(Clone, Copy)]
struct SingleUpdate {
    sign_y: u64,
    sign_x: u64,
    sign_z: u64,
    swap: u64,
    z_from_x: u64,
}

impl SingleUpdate {
    fn of(kind: GateKind) -> Self {
        let on = |b: bool| if b { !0 } else { 0 };
        let (y, x, z, swap, z_from_x) = match kind {
            GateKind::H => (true, false, false, true, false),
            GateKind::S => (false, true, false, false, true),
            GateKind::Sdg => (true, false, false, false, true),
            GateKind::X => (true, false, true, false, false),
            GateKind::Y => (false, true, true, false, false),
            GateKind::Z => (true, true, false, false, false),
            _ => unreachable!("single-qubit gate"),
        };
        SingleUpdate {
            sign_y: on(y),
            sign_x: on(x),
            sign_z: on(z),
            swap: on(swap),
            z_from_x: on(z_from_x),
        }
    }

    /// Updates the bits of `(x, z)` selected by `m`; returns the bits whose
    /// letter changes sign.
    #[inline]
    fn apply(&self, x: &mut u64, z: &mut u64, m: u64) -> u64 {
        let (xm, zm) = (*x & m, *z & m);
        let sign = (xm & zm & self.sign_y) | (xm & !zm & self.sign_x) | (zm & !xm & self.sign_z);
        let zs = zm ^ (xm & self.z_from_x);
        let nx = (xm & !self.swap) | (zm & self.swap);
        let nz = (zs & !self.swap) | (xm & self.swap);
        *x = (*x & !m) | nx;
        *z = (*z & !m) | nz;
        sign
    }
}

/// One column update of [`CliffordTableau::prepend`].
enum ColumnOp<'a> {
    /// The same single-qubit gate on every site of the mask.
    Single(GateKind, Mask),
    /// Several [`ColumnOp::Single`] updates, applied word by word in order.
    /// Each layer holds a dense mask of `stride` words; `words` lists the
    /// words touched by any layer.
    Singles {
        layers: Vec<(SingleUpdate, Vec<u64>)>,
        words: Vec<usize>,
    },
    /// `CX_{c→t}` for every control `c` in the mask.
    FanIn { target: usize, controls: Mask },
    Local {
        table: &'a LocalTable,
        a: usize,
        b: usize,
        two: bool,
    },
}

/// Groups gates (in acting order) into column updates (in acting order).
fn batch_ops(gates: &[GateRecord], stride: usize) -> Vec<ColumnOp<'_>> {
    let mut ops = Vec::new();
    let mut seen = vec![0u64; stride];
    let bit = |i: usize| (i / WORD_BITS, 1u64 << (i % WORD_BITS));
    let mut k = 0;
    while k < gates.len() {
        let g = gates[k];
        let mut sites = vec![g.sites[0]];
        let (w0, b0) = bit(g.sites[0]);
        seen[w0] |= b0;
        let mut end = k + 1;
        let fresh = |seen: &mut Vec<u64>, i: usize| {
            let (w, b) = bit(i);
            let new = seen[w] & b == 0;
            seen[w] |= b;
            new
        };
        let op = match g.kind {
            GateKind::H | GateKind::S | GateKind::Sdg | GateKind::X | GateKind::Y | GateKind::Z => {
                while end < gates.len()
                    && gates[end].kind == g.kind
                    && fresh(&mut seen, gates[end].sites[0])
                {
                    sites.push(gates[end].sites[0]);
                    end += 1;
                }
                ColumnOp::Single(g.kind, mask_of(&sites, stride))
            }
            GateKind::CX => {
                let target = g.sites[1];
                while end < gates.len()
                    && gates[end].kind == GateKind::CX
                    && gates[end].sites[1] == target
                    && fresh(&mut seen, gates[end].sites[0])
                {
                    sites.push(gates[end].sites[0]);
                    end += 1;
                }
                ColumnOp::FanIn {
                    target,
                    controls: mask_of(&sites, stride),
                }
            }
            _ => ColumnOp::Local {
                table: g.local_table(),
                a: g.sites[0],
                b: g.sites[1],
                two: g.is_two_qubit(),
            },
        };
        for &i in &sites {
            seen[i / WORD_BITS] = 0;
        }
        ops.push(op);
        k = end;
    }
    ops
}

/// Merges runs of [`ColumnOp::Single`] into [`ColumnOp::Singles`].
fn fuse_singles(ops: Vec<ColumnOp<'_>>, stride: usize) -> Vec<ColumnOp<'_>> {
    let mut out: Vec<ColumnOp<'_>> = Vec::with_capacity(ops.len());
    for op in ops {
        let ColumnOp::Single(kind, mask) = op else {
            out.push(op);
            continue;
        };
        let mut dense = vec![0u64; stride];
        for &(w, m) in &mask {
            dense[w] = m;
        }
        let layer = (SingleUpdate::of(kind), dense);
        match out.last_mut() {
            Some(ColumnOp::Singles { layers, .. }) => layers.push(layer),
            _ => out.push(ColumnOp::Singles {
                layers: vec![layer],
                words: Vec::new(),
            }),
        }
    }
    for op in &mut out {
        if let ColumnOp::Singles { layers, words } = op {
            *words = (0..stride)
                .filter(|&w| layers.iter().any(|(_, m)| m[w] != 0))
                .collect();
        }
    }
    out
}

/// Adds the bits of `v` to per-position two-bit counters `(ones, twos)`.
#[inline]
fn count_mod4(ones: &mut u64, twos: &mut u64, v: u64) {
    *twos ^= *ones & v;
    *ones ^= v;
}

/// Total of per-position two-bit counters, modulo 4.
fn total_mod4(ones: u64, twos: u64) -> u8 {
    ((ones.count_ones() + 2 * twos.count_ones()) & 3) as u8
}

impl ColumnOp<'_> {
    /// `G† P G` for the row `P = i^phase ⊗ σ(x, z)`; returns the new phase.
    fn conjugate_row(&self, rx: &mut [u64], rz: &mut [u64], phase: u8) -> u8 {
        let mut e = phase;
        match self {
            ColumnOp::Singles { layers, words } => {
                // Each sign flip adds 2 to the phase, so only the parity of
                // the number of flips matters.
                let mut flips = 0u64;
                for &w in words {
                    let (mut x, mut z) = (rx[w], rz[w]);
                    for (update, mask) in layers {
                        flips ^= update.apply(&mut x, &mut z, mask[w]);
                    }
                    rx[w] = x;
                    rz[w] = z;
                }
                e = e.wrapping_add(2 * (flips.count_ones() & 1) as u8);
            }
            ColumnOp::Single(..) => unreachable!("fused into Singles before use"),
            ColumnOp::FanIn { target, controls } => {
                // A CNOT network maps X^x Z^z to X^x' Z^z' without a sign, so
                // only the Y count of the letter convention changes: on the
                // controls when z_t = 1 flips their z bits, and on the target
                // when the parity of the control x bits flips x_t.
                let (tw, tb) = (target / WORD_BITS, target % WORD_BITS);
                let zt = (rz[tw] >> tb) & 1 == 1;
                let mut parity = 0u64;
                let (mut before1, mut before2, mut after1, mut after2) = (0u64, 0u64, 0u64, 0u64);
                if zt {
                    for &(w, m) in controls {
                        let xm = rx[w] & m;
                        parity ^= xm;
                        count_mod4(&mut before1, &mut before2, xm & rz[w]);
                        count_mod4(&mut after1, &mut after2, xm & !rz[w]);
                        rz[w] ^= m;
                    }
                } else {
                    for &(w, m) in controls {
                        parity ^= rx[w] & m;
                    }
                }
                let mut ys_before = total_mod4(before1, before2);
                let mut ys_after = total_mod4(after1, after2);
                if parity.count_ones() & 1 == 1 {
                    let xt = (rx[tw] >> tb) & 1 == 1;
                    if zt {
                        if xt {
                            ys_before += 1;
                        } else {
                            ys_after += 1;
                        }
                    }
                    rx[tw] ^= 1 << tb;
                }
                e = e.wrapping_add(ys_before).wrapping_sub(ys_after);
            }
            ColumnOp::Local { table, a, b, two } => {
                let (wa, ba) = (a / WORD_BITS, a % WORD_BITS);
                let mut bits = (((rx[wa] >> ba) & 1) | (((rz[wa] >> ba) & 1) << 1)) as u8;
                let (wb, bb) = (b / WORD_BITS, b % WORD_BITS);
                if *two {
                    bits |= ((((rx[wb] >> bb) & 1) << 2) | (((rz[wb] >> bb) & 1) << 3)) as u8;
                }
                if bits == 0 {
                    return e;
                }
                let img = table.table[bits as usize];
                e = e.wrapping_add(img.phase);
                let ma = 1u64 << ba;
                rx[wa] = (rx[wa] & !ma) | ((img.bits as u64 & 1) << ba);
                rz[wa] = (rz[wa] & !ma) | (((img.bits as u64 >> 1) & 1) << ba);
                if *two {
                    let mb = 1u64 << bb;
                    rx[wb] = (rx[wb] & !mb) | (((img.bits as u64 >> 2) & 1) << bb);
                    rz[wb] = (rz[wb] & !mb) | (((img.bits as u64 >> 3) & 1) << bb);
                }
            }
        }
        e & 3
    }
}

/// Deletes bit `a` from a packed bit vector, shifting higher bits down.
fn remove_bit(words: &mut [u64], a: usize) {
    let (wa, ba) = (a / WORD_BITS, a % WORD_BITS);
    let low = if ba == 0 {
        0
    } else {
        words[wa] & ((1u64 << ba) - 1)
    };
    let high = if ba == 63 {
        0
    } else {
        (words[wa] >> (ba + 1)) << ba
    };
    words[wa] = low | high;
    for w in wa + 1..words.len() {
        let carry = words[w] & 1;
        words[w - 1] |= carry << 63;
        words[w] >>= 1;
    }
}

impl PartialEq for CliffordTableau {
    /// Compares the represented unitaries; replay logs are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && (0..2 * self.n).all(|r| self.row_string(r) == other.row_string(r))
    }
}

impl fmt::Display for CliffordTableau {
    /// One line per generator image, sites 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            writeln!(f, "X{} -> {}", q + 1, self.x_image(q))?;
            writeln!(f, "Z{} -> {}", q + 1, self.z_image(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau(n = {})\n{self}", self.n)
    }
}

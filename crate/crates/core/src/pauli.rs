//! Phased Pauli strings in symplectic form.
//!
//! A string is stored as `i^phase · σ(x_0,z_0) ⊗ … ⊗ σ(x_{n-1},z_{n-1})` where
//! `σ(1,0) = X`, `σ(0,1) = Z` and `σ(1,1) = Y`. The x and z components are
//! packed 64 sites per word.

use std::fmt;
use std::str::FromStr;

use crate::error::{IccrError, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Power of `i` multiplying a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    #[inline]
    pub fn from_exponent(e: u32) -> Self {
        Phase((e & 3) as u8)
    }

    #[inline]
    pub fn exponent(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

/// Product `a · b` of two packed strings, written into `a`. Phases are letter
/// convention exponents of `i`.
#[inline]
pub(crate) fn mul_assign_words(
    ax: &mut [u64],
    az: &mut [u64],
    a_phase: u8,
    bx: &[u64],
    bz: &[u64],
    b_phase: u8,
) -> u8 {
    // Convert both factors to the X^x Z^z form: Y = i X Z.
    let mut e: u32 = a_phase as u32 + b_phase as u32;
    for w in 0..ax.len() {
        let (xa, za, xb, zb) = (ax[w], az[w], bx[w], bz[w]);
        e += (xa & za).count_ones();
        e += (xb & zb).count_ones();
        // Z^za X^xb = (-1)^{za·xb} X^xb Z^za
        e += 2 * (za & xb).count_ones();
        let (xr, zr) = (xa ^ xb, za ^ zb);
        // Back to letter form.
        e += 3 * (xr & zr).count_ones();
        ax[w] = xr;
        az[w] = zr;
    }
    (e & 3) as u8
}

/// Phased N-qubit Pauli operator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: Phase::PLUS_ONE,
        }
    }

    /// A single Pauli letter on `site`.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n);
        s.check_site(site)?;
        s.set(site, p);
        Ok(s)
    }

    pub fn from_letters(phase: Phase, letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (k, &p) in letters.iter().enumerate() {
            s.set(k, p);
        }
        s.phase = phase;
        s
    }

    /// Builds a string from raw packed words. Bits at positions `>= n` must be zero.
    pub(crate) fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        PauliString {
            n,
            x,
            z,
            phase: Phase::from_exponent(phase as u32),
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n {
            return Err(IccrError::SiteOutOfRange {
                site,
                n_qubits: self.n,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, site: usize) -> Pauli {
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    /// Overwrites the letter on `site`; the phase is left untouched.
    #[inline]
    pub fn set(&mut self, site: usize, p: Pauli) {
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        let (px, pz) = p.bits();
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((px as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((pz as u64) << b);
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut out = self.clone();
        let e = mul_assign_words(
            &mut out.x,
            &mut out.z,
            self.phase.exponent(),
            &other.x,
            &other.z,
            other.phase.exponent(),
        );
        out.phase = Phase::from_exponent(e as u32);
        Ok(out)
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(IccrError::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// True iff the symplectic inner product is even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        Ok(acc % 2 == 0)
    }

    /// Sites where the string acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (&xw, &zw)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = xw | zw;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD_BITS + b);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Inverse in the Pauli group. Letters are involutions, so only the phase changes.
    pub fn inverse(&self) -> PauliString {
        let mut out = self.clone();
        out.phase = Phase::from_exponent((4 - self.phase.exponent() as u32) & 3);
        out
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|k| self.get(k)).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        for k in 0..self.n {
            write!(f, "{}", self.get(k).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = IccrError;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| IccrError::PauliParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::PLUS_I, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if body.is_empty() {
            return Err(err("no sites"));
        }
        let letters = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(err(&format!("unexpected character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(phase, &letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    // Dense matrix of a string, qubit k on bit k of the basis index.
    #[allow(clippy::needless_range_loop)]
    fn dense(s: &PauliString) -> Vec<Vec<Complex64>> {
        let n = s.n_qubits();
        let dim = 1usize << n;
        let i = Complex64::new(0.0, 1.0);
        let ph = i.powu(s.phase().exponent() as u32);
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let mut row = col;
            let mut amp = ph;
            for k in 0..n {
                let bit = (col >> k) & 1;
                match s.get(k) {
                    Pauli::I => {}
                    Pauli::X => row ^= 1 << k,
                    Pauli::Z => {
                        if bit == 1 {
                            amp = -amp
                        }
                    }
                    Pauli::Y => {
                        row ^= 1 << k;
                        amp *= if bit == 0 { i } else { -i };
                    }
                }
            }
            m[row][col] = amp;
        }
        m
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let d = a.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for r in 0..d {
            for c in 0..d {
                for k in 0..d {
                    out[r][c] += a[r][k] * b[k][c];
                }
            }
        }
        out
    }

    fn close(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(p("X").multiply(&p("X")).unwrap(), p("+I"));
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("-iY"));
        let prod = p("XZ").multiply(&p("ZZ")).unwrap();
        assert_eq!(prod, p("-iYI"));
        // dense cross-check of the last one
        assert!(close(
            &matmul(&dense(&p("XZ")), &dense(&p("ZZ"))),
            &dense(&prod)
        ));
    }

    #[test]
    fn multiply_size_mismatch() {
        assert!(matches!(
            p("XX").multiply(&p("X")),
            Err(IccrError::SizeMismatch { .. })
        ));
        assert!(p("XX").commutes(&p("X")).is_err());
    }

    #[test]
    fn commutes_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        // Y-Z and X-Z anticommute on two sites, so the strings commute.
        assert!(p("YZX").commutes(&p("ZZZ")).unwrap());
        assert!(!p("YZX").commutes(&p("ZZI")).unwrap());
    }

    #[test]
    fn support_examples() {
        assert_eq!(p("IXI").support(), vec![1]);
        assert!(PauliString::identity(5).support().is_empty());
        assert_eq!(p("XYZI").support(), vec![0, 1, 2]);
    }

    #[test]
    fn support_across_words() {
        let mut s = PauliString::identity(130);
        s.set(0, Pauli::X);
        s.set(64, Pauli::Y);
        s.set(129, Pauli::Z);
        assert_eq!(s.support(), vec![0, 64, 129]);
        assert_eq!(s.weight(), 3);
        let sq = s.multiply(&s).unwrap();
        assert!(sq.is_identity_up_to_phase());
        assert_eq!(sq.phase(), Phase::PLUS_ONE);
    }

    #[test]
    fn text_format() {
        assert_eq!(p("-iXIZY").to_string(), "-iXIZY");
        assert_eq!(p("XZ").to_string(), "+XZ");
        assert_eq!(p("iY").phase(), Phase::PLUS_I);
        assert!("".parse::<PauliString>().is_err());
        assert!("+XQ".parse::<PauliString>().is_err());
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        (0u8..4, prop::collection::vec(0u8..4, n)).prop_map(|(ph, ls)| {
            let letters: Vec<Pauli> = ls
                .into_iter()
                .map(|l| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l as usize])
                .collect();
            PauliString::from_letters(Phase::from_exponent(ph as u32), &letters)
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(s in (1usize..80).prop_flat_map(arb_string)) {
            let back: PauliString = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn associative_and_inverse((a, b, c) in (1usize..70).prop_flat_map(|n| (arb_string(n), arb_string(n), arb_string(n)))) {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let one = a.multiply(&a.inverse()).unwrap();
            prop_assert!(one.is_identity_up_to_phase());
            prop_assert_eq!(one.phase(), Phase::PLUS_ONE);
        }

        #[test]
        fn product_matches_dense((a, b) in (1usize..4).prop_flat_map(|n| (arb_string(n), arb_string(n)))) {
            let prod = a.multiply(&b).unwrap();
            prop_assert!(close(&matmul(&dense(&a), &dense(&b)), &dense(&prod)));
        }

        #[test]
        fn commutes_matches_dense((a, b) in (1usize..5).prop_flat_map(|n| (arb_string(n), arb_string(n)))) {
            let (da, db) = (dense(&a), dense(&b));
            let ab = matmul(&da, &db);
            let ba = matmul(&db, &da);
            prop_assert_eq!(a.commutes(&b).unwrap(), close(&ab, &ba));
        }

        #[test]
        fn support_of_product((a, b) in (1usize..100).prop_flat_map(|n| (arb_string(n), arb_string(n)))) {
            let prod = a.multiply(&b).unwrap();
            let sa = a.support();
            let sb = b.support();
            for k in prod.support() {
                prop_assert!(sa.contains(&k) || sb.contains(&k));
            }
        }
    }
}

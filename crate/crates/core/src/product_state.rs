//! Product states of single qubits, with exact tracking of stabilizer factors.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{IccrError, Result};
use crate::gate::GateKind;
use crate::pauli::{Pauli, PauliString};

/// Amplitude distance below which a qubit is snapped to a stabilizer state.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// The six single-qubit stabilizer states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stabilizer {
    ZPlus,
    ZMinus,
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl Stabilizer {
    pub const ALL: [Stabilizer; 6] = [
        Stabilizer::ZPlus,
        Stabilizer::ZMinus,
        Stabilizer::XPlus,
        Stabilizer::XMinus,
        Stabilizer::YPlus,
        Stabilizer::YMinus,
    ];

    /// Bloch vector with entries in {-1, 0, 1}.
    pub fn bloch(self) -> [i8; 3] {
        match self {
            Stabilizer::XPlus => [1, 0, 0],
            Stabilizer::XMinus => [-1, 0, 0],
            Stabilizer::YPlus => [0, 1, 0],
            Stabilizer::YMinus => [0, -1, 0],
            Stabilizer::ZPlus => [0, 0, 1],
            Stabilizer::ZMinus => [0, 0, -1],
        }
    }

    fn from_bloch(v: [i8; 3]) -> Self {
        match v {
            [1, 0, 0] => Stabilizer::XPlus,
            [-1, 0, 0] => Stabilizer::XMinus,
            [0, 1, 0] => Stabilizer::YPlus,
            [0, -1, 0] => Stabilizer::YMinus,
            [0, 0, 1] => Stabilizer::ZPlus,
            [0, 0, -1] => Stabilizer::ZMinus,
            _ => unreachable!("not a stabilizer Bloch vector"),
        }
    }

    pub fn opposite(self) -> Self {
        let [x, y, z] = self.bloch();
        Self::from_bloch([-x, -y, -z])
    }

    /// The Pauli letter this state is an eigenstate of.
    pub fn axis(self) -> Pauli {
        match self {
            Stabilizer::XPlus | Stabilizer::XMinus => Pauli::X,
            Stabilizer::YPlus | Stabilizer::YMinus => Pauli::Y,
            Stabilizer::ZPlus | Stabilizer::ZMinus => Pauli::Z,
        }
    }

    /// Eigenvalue under `p`, if the state is an eigenstate of it.
    pub fn eigenvalue(self, p: Pauli) -> Option<i8> {
        let b = self.bloch();
        match p {
            Pauli::I => Some(1),
            Pauli::X => (b[0] != 0).then_some(b[0]),
            Pauli::Y => (b[1] != 0).then_some(b[1]),
            Pauli::Z => (b[2] != 0).then_some(b[2]),
        }
    }

    /// Canonical amplitudes in the Z basis.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Stabilizer::ZPlus => [c(1.0, 0.0), c(0.0, 0.0)],
            Stabilizer::ZMinus => [c(0.0, 0.0), c(1.0, 0.0)],
            Stabilizer::XPlus => [c(h, 0.0), c(h, 0.0)],
            Stabilizer::XMinus => [c(h, 0.0), c(-h, 0.0)],
            Stabilizer::YPlus => [c(h, 0.0), c(0.0, h)],
            Stabilizer::YMinus => [c(h, 0.0), c(0.0, -h)],
        }
    }

    /// Image under a single-qubit Clifford gate.
    pub fn apply(self, kind: GateKind) -> Self {
        let [x, y, z] = self.bloch();
        let v = match kind {
            GateKind::H => [z, -y, x],
            GateKind::S => [-y, x, z],
            GateKind::Sdg => [y, -x, z],
            GateKind::X => [x, -y, -z],
            GateKind::Y => [-x, y, -z],
            GateKind::Z => [-x, -y, z],
            _ => unreachable!("two-qubit gate on a single qubit"),
        };
        Self::from_bloch(v)
    }

    pub fn label(self) -> &'static str {
        match self {
            Stabilizer::ZPlus => "Z+",
            Stabilizer::ZMinus => "Z-",
            Stabilizer::XPlus => "X+",
            Stabilizer::XMinus => "X-",
            Stabilizer::YPlus => "Y+",
            Stabilizer::YMinus => "Y-",
        }
    }
}

/// Normalized single-qubit state with its stabilizer classification.
///
/// Amplitudes are the coefficients of the Z eigenstates `|0⟩` (Z = +1) and
/// `|1⟩` (Z = -1). Qubits classified as stabilizer states hold the canonical
/// amplitudes of their class, so Clifford rotations on them are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitState {
    amps: [Complex64; 2],
    class: Option<Stabilizer>,
}

impl SingleQubitState {
    /// Normalizes and classifies `a0 |0⟩ + a1 |1⟩`.
    pub fn from_amplitudes(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(IccrError::InvalidArgument(
                "single-qubit amplitudes have zero norm".into(),
            ));
        }
        let mut s = SingleQubitState {
            amps: [a0 / norm, a1 / norm],
            class: None,
        };
        s.classify();
        Ok(s)
    }

    pub fn stabilizer(c: Stabilizer) -> Self {
        SingleQubitState {
            amps: c.amplitudes(),
            class: Some(c),
        }
    }

    /// `|0⟩`.
    pub fn zero() -> Self {
        Self::stabilizer(Stabilizer::ZPlus)
    }

    /// `cos θ |0⟩ + sin θ |1⟩`.
    pub fn from_angle(theta: f64) -> Self {
        Self::from_amplitudes(
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        )
        .expect("unit vector")
    }

    /// `(|0⟩ + i^q |1⟩)/√2`, the eigenstates of X (q even) and Y (q odd).
    pub fn local(q: u8) -> Self {
        Self::stabilizer(match q & 3 {
            0 => Stabilizer::XPlus,
            1 => Stabilizer::YPlus,
            2 => Stabilizer::XMinus,
            _ => Stabilizer::YMinus,
        })
    }

    /// `(|0⟩ + e^{iπ/4} |1⟩)/√2`.
    pub fn t_state() -> Self {
        Self::from_amplitudes(
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        )
        .expect("unit vector")
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let theta = z.acos();
        Self::from_amplitudes(
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        )
        .expect("unit vector")
    }

    #[inline]
    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amps
    }

    #[inline]
    pub fn classification(&self) -> Option<Stabilizer> {
        self.class
    }

    #[inline]
    pub fn is_stabilizer(&self) -> bool {
        self.class.is_some()
    }

    fn classify(&mut self) {
        for c in Stabilizer::ALL {
            let [o0, o1] = c.opposite().amplitudes();
            let dist = (o0.conj() * self.amps[0] + o1.conj() * self.amps[1]).norm();
            if dist < CLASSIFY_TOL {
                self.amps = c.amplitudes();
                self.class = Some(c);
                return;
            }
        }
        self.class = None;
    }

    /// Expectation values of X, Y and Z.
    pub fn bloch(&self) -> [f64; 3] {
        if let Some(c) = self.class {
            return c.bloch().map(f64::from);
        }
        let [a0, a1] = self.amps;
        let c = a0.conj() * a1;
        [2.0 * c.re, 2.0 * c.im, a0.norm_sqr() - a1.norm_sqr()]
    }

    pub fn expect(&self, p: Pauli) -> f64 {
        let b = self.bloch();
        match p {
            Pauli::I => 1.0,
            Pauli::X => b[0],
            Pauli::Y => b[1],
            Pauli::Z => b[2],
        }
    }

    /// Applies a single-qubit Clifford gate.
    pub fn apply(&mut self, kind: GateKind) -> Result<()> {
        if kind.is_two_qubit() {
            return Err(IccrError::WrongGateArity {
                expected: "single-qubit",
                got: format!("{kind:?}"),
            });
        }
        if let Some(c) = self.class {
            *self = Self::stabilizer(c.apply(kind));
            return Ok(());
        }
        let m = kind.matrix1().expect("single-qubit gate");
        let [a0, a1] = self.amps;
        self.amps = [m[0][0] * a0 + m[0][1] * a1, m[1][0] * a0 + m[1][1] * a1];
        self.classify();
        Ok(())
    }

    /// `|⟨ψ(q)|α⟩|²` with `ψ(q) = (|0⟩ + i^q |1⟩)/√2`.
    pub fn overlap_with_local(&self, q: u8) -> f64 {
        let [x, y, _] = self.bloch();
        match q & 3 {
            0 => (1.0 + x) / 2.0,
            1 => (1.0 + y) / 2.0,
            2 => (1.0 - x) / 2.0,
            _ => (1.0 - y) / 2.0,
        }
    }

    pub fn label(&self) -> &'static str {
        self.class.map_or("NonStabilizer", Stabilizer::label)
    }
}

/// Product state `⊗_i |α_i⟩`. Stabilizer factors are classified per site and
/// never reordered.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    qubits: Vec<SingleQubitState>,
}

impl ProductState {
    pub fn new(qubits: Vec<SingleQubitState>) -> Self {
        ProductState { qubits }
    }

    pub fn uniform(n: usize, q: SingleQubitState) -> Self {
        ProductState { qubits: vec![q; n] }
    }

    /// `|0⟩^⊗n`.
    pub fn zeros(n: usize) -> Self {
        Self::uniform(n, SingleQubitState::zero())
    }

    /// `(cos θ |0⟩ + sin θ |1⟩)^⊗n`.
    pub fn from_angle(n: usize, theta: f64) -> Self {
        Self::uniform(n, SingleQubitState::from_angle(theta))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        ProductState {
            qubits: (0..n).map(|_| SingleQubitState::random(rng)).collect(),
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    #[inline]
    pub fn qubit(&self, i: usize) -> &SingleQubitState {
        &self.qubits[i]
    }

    pub fn qubits(&self) -> &[SingleQubitState] {
        &self.qubits
    }

    fn check_site(&self, i: usize) -> Result<()> {
        if i >= self.qubits.len() {
            return Err(IccrError::SiteOutOfRange {
                site: i,
                n_qubits: self.qubits.len(),
            });
        }
        Ok(())
    }

    pub fn set_qubit(&mut self, i: usize, q: SingleQubitState) -> Result<()> {
        self.check_site(i)?;
        self.qubits[i] = q;
        Ok(())
    }

    pub fn push(&mut self, q: SingleQubitState) {
        self.qubits.push(q);
    }

    pub fn remove(&mut self, i: usize) -> Result<SingleQubitState> {
        self.check_site(i)?;
        Ok(self.qubits.remove(i))
    }

    pub fn swap(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        self.qubits.swap(i, j);
        Ok(())
    }

    /// `⟨Ψ|p|Ψ⟩` for a Hermitian string.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<f64> {
        if p.n_qubits() != self.n_qubits() {
            return Err(IccrError::SizeMismatch {
                expected: self.n_qubits(),
                found: p.n_qubits(),
            });
        }
        let sign = p
            .phase()
            .sign()
            .ok_or_else(|| IccrError::NotHermitian(p.to_string()))?;
        let prod: f64 = p
            .support()
            .into_iter()
            .map(|i| self.qubits[i].expect(p.get(i)))
            .product();
        Ok(f64::from(sign) * prod)
    }

    pub fn apply_single_qubit_clifford(&mut self, i: usize, kind: GateKind) -> Result<()> {
        self.check_site(i)?;
        self.qubits[i].apply(kind)
    }

    /// `⟨Ψ|π_i(q)|Ψ⟩` for the projector onto `(|0⟩ + i^q |1⟩)/√2` on site `i`.
    pub fn overlap_with_local(&self, i: usize, q: u8) -> Result<f64> {
        self.check_site(i)?;
        Ok(self.qubits[i].overlap_with_local(q))
    }

    /// Number of stabilizer-classified qubits.
    pub fn rank(&self) -> usize {
        self.qubits.iter().filter(|q| q.is_stabilizer()).count()
    }

    pub fn nullity(&self) -> usize {
        self.n_qubits() - self.rank()
    }

    /// CSV dump, one line per site: `index,class,re(a0),im(a0),re(a1),im(a1)`
    /// with 1-based indices.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("index,class,re_a0,im_a0,re_a1,im_a1\n");
        for (i, q) in self.qubits.iter().enumerate() {
            let [a0, a1] = q.amplitudes();
            let _ = writeln!(
                out,
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                i + 1,
                q.label(),
                a0.re,
                a0.im,
                a1.re,
                a1.im
            );
        }
        out
    }
}

//! Exact statevector reference for small systems.
//!
//! Basis index bit `k` set means qubit `k` is in `|1⟩` (Z eigenvalue −1).

use num_complex::Complex64;

use crate::error::{IccrError, Result};
use crate::gate::{GateKind, GateRecord};
use crate::magic::sre_from_squares;
use crate::pauli::PauliString;
use crate::product_state::{ProductState, SingleQubitState};
use crate::renorm::ZERO_PROBABILITY;
use crate::tableau::CliffordTableau;

/// Largest register for statevector operations.
pub const STATE_CAP: usize = 14;
/// Largest register for exact Rényi entropies (4^N Pauli strings).
pub const SRE_CAP: usize = 8;
/// Largest register for applying a tableau without a gate log.
pub const TABLEAU_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(IccrError::CapExceeded { cap, requested: n });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0⟩^⊗n`.
    pub fn zeros(n: usize) -> Result<Self> {
        check_cap(n, STATE_CAP)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(DenseState { n, amps })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(n, STATE_CAP)?;
        if amps.len() != 1 << n {
            return Err(IccrError::SizeMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let mut d = DenseState { n, amps };
        let norm = d.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(IccrError::InvalidArgument("zero vector".into()));
        }
        d.scale(1.0 / norm);
        Ok(d)
    }

    /// Kronecker expansion of a product state.
    pub fn from_product(state: &ProductState) -> Result<Self> {
        let n = state.n_qubits();
        check_cap(n, STATE_CAP)?;
        let mut amps = vec![ONE; 1 << n];
        for (idx, a) in amps.iter_mut().enumerate() {
            for (k, q) in state.qubits().iter().enumerate() {
                *a *= q.amplitudes()[(idx >> k) & 1];
            }
        }
        Ok(DenseState { n, amps })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn scale(&mut self, c: f64) {
        for a in &mut self.amps {
            *a *= c;
        }
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

    /// Appends a qubit in state `q` at index `n`.
    pub fn with_qubit(&self, q: &SingleQubitState) -> Result<Self> {
        check_cap(self.n + 1, STATE_CAP)?;
        let [a0, a1] = q.amplitudes();
        let mut amps = Vec::with_capacity(2 << self.n);
        amps.extend(self.amps.iter().map(|&a| a * a0));
        amps.extend(self.amps.iter().map(|&a| a * a1));
        Ok(DenseState {
            n: self.n + 1,
            amps,
        })
    }

    /// Applies a 2×2 matrix on `site`.
    pub fn apply_matrix1(&mut self, site: usize, m: &[[Complex64; 2]; 2]) -> Result<()> {
        self.check_site(site)?;
        let bit = 1 << site;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    /// `T = diag(1, e^{iπ/4})` on `site`.
    pub fn apply_t(&mut self, site: usize) -> Result<()> {
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        self.apply_matrix1(site, &[[ONE, ZERO], [ZERO, t]])
    }

    /// Applies gates in acting order; composite gates are expanded.
    pub fn apply_gates(&mut self, gates: &[GateRecord]) -> Result<()> {
        for g in gates {
            g.validate(self.n)?;
        }
        for g in gates {
            for e in g.elementary() {
                self.apply_elementary(&e);
            }
        }
        Ok(())
    }

    fn apply_elementary(&mut self, g: &GateRecord) {
        if let Some(m) = g.kind.matrix1() {
            self.apply_matrix1(g.sites[0], &m).expect("validated site");
            return;
        }
        let (c, t) = (1usize << g.sites[0], 1usize << g.sites[1]);
        for i in 0..self.amps.len() {
            match g.kind {
                GateKind::CX => {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
                GateKind::CY => {
                    if i & c != 0 && i & t == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = -I * a1;
                        self.amps[i | t] = I * a0;
                    }
                }
                GateKind::CZ => {
                    if i & c != 0 && i & t != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
                GateKind::Swap => {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, (i & !c) | t);
                    }
                }
                _ => unreachable!("elementary two-qubit gate"),
            }
        }
    }

    fn check_pauli(&self, p: &PauliString) -> Result<(usize, usize, Complex64)> {
        if p.n_qubits() != self.n {
            return Err(IccrError::SizeMismatch {
                expected: self.n,
                found: p.n_qubits(),
            });
        }
        let x = p.x_words().first().copied().unwrap_or(0) as usize;
        let z = p.z_words().first().copied().unwrap_or(0) as usize;
        // i^e ⊗σ = i^{e + #Y} X^x Z^z
        let e = (p.phase().exponent() as u32 + (x & z).count_ones()) % 4;
        Ok((x, z, I.powu(e)))
    }

    /// `|ψ⟩ ← p|ψ⟩`, phase included.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        let (x, z, c) = self.check_pauli(p)?;
        let old = self.amps.clone();
        for (y, a) in self.amps.iter_mut().enumerate() {
            let src = y ^ x;
            let sign = if (z & src).count_ones() % 2 == 1 {
                -c
            } else {
                c
            };
            *a = sign * old[src];
        }
        Ok(())
    }

    /// `⟨ψ|p|ψ⟩`.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<Complex64> {
        let mut pd = self.clone();
        pd.apply_pauli(p)?;
        overlap(self, &pd)
    }

    /// Projects onto the `s` eigenspace of a Hermitian `p`, normalizes, and
    /// returns the Born probability `(1 + s⟨p⟩)/2`.
    pub fn project_pauli(&mut self, p: &PauliString, s: i8) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(IccrError::NotHermitian(p.to_string()));
        }
        let mut pd = self.clone();
        pd.apply_pauli(p)?;
        let sf = f64::from(s);
        for (a, b) in self.amps.iter_mut().zip(&pd.amps) {
            *a = (*a + sf * b) / 2.0;
        }
        let prob = self.norm().powi(2);
        if prob < ZERO_PROBABILITY {
            return Err(IccrError::ZeroProbability { probability: prob });
        }
        self.scale(1.0 / prob.sqrt());
        Ok(prob)
    }

    /// Squared expectations of all `4^N` unsigned Pauli strings, via one
    /// Walsh-Hadamard transform per X pattern.
    fn pauli_spectrum(&self) -> Result<Vec<f64>> {
        check_cap(self.n, SRE_CAP)?;
        let dim = self.amps.len();
        let mut out = Vec::with_capacity(dim * dim);
        let mut v = vec![ZERO; dim];
        for x in 0..dim {
            for (u, slot) in v.iter_mut().enumerate() {
                *slot = self.amps[u ^ x].conj() * self.amps[u];
            }
            let mut h = 1;
            while h < dim {
                for blk in (0..dim).step_by(2 * h) {
                    for i in blk..blk + h {
                        let (a, b) = (v[i], v[i + h]);
                        v[i] = a + b;
                        v[i + h] = a - b;
                    }
                }
                h *= 2;
            }
            out.extend(v.iter().map(|c| c.norm_sqr()));
        }
        Ok(out)
    }

    /// `M_n` from the full Pauli spectrum; `n = 1` is the Shannon limit.
    pub fn exact_sre(&self, n: f64) -> Result<f64> {
        if !n.is_finite() || n <= 0.0 {
            return Err(IccrError::InvalidOrder(n));
        }
        Ok(sre_from_squares(&self.pauli_spectrum()?, n, self.n))
    }

    /// `u|ψ⟩` up to a global phase, from the tableau alone.
    ///
    /// `⟨y|u|ψ⟩ = ⟨u†y|ψ⟩`, where `u†|0⟩` is the state stabilized by the images
    /// of all `Z_q`, and `u†|y⟩ = ∏_{q ∈ y} (u† X_q u) u†|0⟩`.
    pub fn apply_tableau(&self, u: &CliffordTableau) -> Result<DenseState> {
        check_cap(self.n, TABLEAU_CAP)?;
        if u.n_qubits() != self.n {
            return Err(IccrError::SizeMismatch {
                expected: self.n,
                found: u.n_qubits(),
            });
        }
        let dim = self.amps.len();
        let zimg: Vec<PauliString> = (0..self.n).map(|q| u.z_image(q)).collect();
        let ximg: Vec<PauliString> = (0..self.n).map(|q| u.x_image(q)).collect();
        let mut col = None;
        for start in 0..dim {
            let mut amps = vec![ZERO; dim];
            amps[start] = ONE;
            let mut v = DenseState { n: self.n, amps };
            for g in &zimg {
                let mut gv = v.clone();
                gv.apply_pauli(g)?;
                for (a, b) in v.amps.iter_mut().zip(&gv.amps) {
                    *a = (*a + b) / 2.0;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                v.scale(1.0 / norm);
                col = Some(v);
                break;
            }
        }
        let mut col = col.expect("stabilizer group has a common eigenvector");
        let mut out = vec![ZERO; dim];
        out[0] = overlap(&col, self)?;
        for k in 1..dim {
            let gray = k ^ (k >> 1);
            let flipped = (gray ^ ((k - 1) ^ ((k - 1) >> 1))).trailing_zeros() as usize;
            col.apply_pauli(&ximg[flipped])?;
            out[gray] = overlap(&col, self)?;
        }
        Ok(DenseState {
            n: self.n,
            amps: out,
        })
    }
}

/// `⟨a|b⟩`.
pub fn overlap(a: &DenseState, b: &DenseState) -> Result<Complex64> {
    if a.n != b.n {
        return Err(IccrError::SizeMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    Ok(overlap(a, b)?.norm_sqr())
}

/// The exact renormalized state `V† Π |Ψ₁⟩ / N` of a measurement step, where
/// `Π = (1 + s ∏_{i∈S} Z_i)/2` and `V = S^q ∏ CX_{i→i*} X^b` on the target
/// `i*` with `b = (1 − s)/2`.
pub fn exact_projected_replacement(
    psi1: &DenseState,
    support: &[usize],
    i_star: usize,
    q_star: u8,
    s: i8,
) -> Result<DenseState> {
    if !support.contains(&i_star) {
        return Err(IccrError::InvalidArgument(format!(
            "target {} is not in the support",
            i_star + 1
        )));
    }
    let n = psi1.n_qubits();
    let mut zs = PauliString::identity(n);
    for &i in support {
        psi1.check_site(i)?;
        zs.set(i, crate::pauli::Pauli::Z);
    }
    let mut d = psi1.clone();
    d.project_pauli(&zs, s)?;
    let mut v_dag = Vec::new();
    match q_star & 3 {
        1 => v_dag.push(GateRecord::sdg(i_star)),
        2 => v_dag.push(GateRecord::z(i_star)),
        3 => v_dag.push(GateRecord::s(i_star)),
        _ => {}
    }
    for &i in support.iter().rev() {
        if i != i_star {
            v_dag.push(GateRecord::cx(i, i_star));
        }
    }
    if s < 0 {
        v_dag.push(GateRecord::x(i_star));
    }
    d.apply_gates(&v_dag)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford2::random_two_qubit_clifford;
    use crate::pauli::{Pauli, Phase};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn close(a: &DenseState, b: &DenseState, tol: f64) -> bool {
        a.amps
            .iter()
            .zip(&b.amps)
            .all(|(x, y)| (x - y).norm() < tol)
    }

    fn random_gates(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<GateRecord> {
        let singles = [
            GateRecord::h,
            GateRecord::s,
            GateRecord::sdg,
            GateRecord::x,
            GateRecord::y,
            GateRecord::z,
        ];
        let pairs = [
            GateRecord::cx,
            GateRecord::cy,
            GateRecord::cz,
            GateRecord::swap,
        ];
        (0..count)
            .map(|_| {
                let a = rng.random_range(0..n);
                if n >= 2 && rng.random_bool(0.6) {
                    let b = (a + rng.random_range(1..n)) % n;
                    if rng.random_bool(0.5) {
                        random_two_qubit_clifford(rng, a, b).unwrap()
                    } else {
                        pairs[rng.random_range(0..4)](a, b)
                    }
                } else {
                    singles[rng.random_range(0..6)](a)
                }
            })
            .collect()
    }

    fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
        let letters: Vec<Pauli> = (0..n)
            .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
            .collect();
        PauliString::from_letters(Phase::from_exponent(2 * rng.random_range(0..2)), &letters)
    }

    #[test]
    fn from_product_examples() {
        let d = DenseState::from_product(&ProductState::zeros(2)).unwrap();
        assert_eq!(d.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        let d = DenseState::from_product(&ProductState::from_angle(1, PI / 7.0)).unwrap();
        assert!((d.amps[0].re - (PI / 7.0).cos()).abs() < 1e-15);
        assert!((d.amps[1].re - (PI / 7.0).sin()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = DenseState::from_product(&ProductState::random(5, &mut rng)).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-12);
        assert!(DenseState::from_product(&ProductState::zeros(15)).is_err());
    }

    #[test]
    fn gate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d0 = DenseState::from_product(&ProductState::random(2, &mut rng)).unwrap();
        let mut d = d0.clone();
        d.apply_gates(&[GateRecord::h(1), GateRecord::h(1)])
            .unwrap();
        assert!(close(&d, &d0, 1e-12));
        // |1,0⟩ (index 1) goes to |1,1⟩ (index 3)
        let mut amps = vec![ZERO; 4];
        amps[1] = ONE;
        let mut d = DenseState::from_amplitudes(2, amps).unwrap();
        d.apply_gates(&[GateRecord::cx(0, 1)]).unwrap();
        assert_eq!(d.amps[3], ONE);
        assert!(d.apply_gates(&[GateRecord::cx(0, 2)]).is_err());
    }

    #[test]
    fn gates_match_explicit_matrix_product() {
        // Columns of the circuit's matrix, built gate by gate from basis vectors,
        // against the product of the individual gate matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 3;
        let gates = random_gates(&mut rng, n, 12);
        let dim = 1 << n;
        let gate_matrix = |g: &GateRecord| -> Vec<Vec<Complex64>> {
            (0..dim)
                .map(|c| {
                    let mut amps = vec![ZERO; dim];
                    amps[c] = ONE;
                    let mut d = DenseState { n, amps };
                    d.apply_gates(std::slice::from_ref(g)).unwrap();
                    d.amps
                })
                .collect()
        };
        let mut total: Vec<Vec<Complex64>> = (0..dim)
            .map(|c| (0..dim).map(|r| if r == c { ONE } else { ZERO }).collect())
            .collect();
        for g in &gates {
            let m = gate_matrix(g);
            total = total
                .iter()
                .map(|col| {
                    (0..dim)
                        .map(|r| (0..dim).map(|k| m[k][r] * col[k]).sum())
                        .collect()
                })
                .collect();
        }
        let psi = DenseState::from_product(&ProductState::random(n, &mut rng)).unwrap();
        let mut direct = psi.clone();
        direct.apply_gates(&gates).unwrap();
        let via: Vec<Complex64> = (0..dim)
            .map(|r| (0..dim).map(|c| total[c][r] * psi.amps[c]).sum())
            .collect();
        assert!(direct
            .amps
            .iter()
            .zip(&via)
            .all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn project_examples() {
        let mut d = DenseState::zeros(1).unwrap();
        assert_eq!(d.project_pauli(&p("Z"), 1).unwrap(), 1.0);
        let prob = d.project_pauli(&p("X"), 1).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        assert!((d.amps[0].re - d.amps[1].re).abs() < 1e-15);
        let mut d = DenseState::from_product(&ProductState::from_angle(2, PI / 7.0)).unwrap();
        let prob = d.project_pauli(&p("ZZ"), 1).unwrap();
        assert!((prob - 0.694370).abs() < 1e-6);
        let mut d = DenseState::zeros(1).unwrap();
        assert!(d.project_pauli(&p("Z"), -1).is_err());
    }

    #[test]
    fn projection_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = DenseState::from_product(&ProductState::random(4, &mut rng)).unwrap();
            let mut pd = random_pauli(&mut rng, 4);
            pd.set_phase(Phase::PLUS_ONE);
            if pd.is_identity_up_to_phase() {
                continue;
            }
            let a = d.clone().project_pauli(&pd, 1).unwrap();
            let b = d.clone().project_pauli(&pd, -1).unwrap();
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_examples() {
        let z = DenseState::zeros(1).unwrap();
        let mut x = z.clone();
        x.apply_gates(&[GateRecord::h(0)]).unwrap();
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&x, &z).unwrap() - 0.5).abs() < 1e-15);
        let mut one = z.clone();
        one.apply_gates(&[GateRecord::x(0)]).unwrap();
        assert_eq!(overlap(&z, &one).unwrap(), ZERO);
    }

    #[test]
    fn exact_sre_examples() {
        let mut d = DenseState::zeros(3).unwrap();
        d.apply_gates(&[GateRecord::h(0), GateRecord::cx(0, 1), GateRecord::s(2)])
            .unwrap();
        for n in [1.0, 2.0, 3.0] {
            assert!(d.exact_sre(n).unwrap().abs() < 1e-12);
        }
        let t = DenseState::from_product(&ProductState::new(vec![SingleQubitState::t_state()]))
            .unwrap();
        assert!((t.exact_sre(2.0).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        let q = DenseState::from_product(&ProductState::from_angle(1, PI / 7.0)).unwrap();
        assert!((q.exact_sre(2.0).unwrap() - 0.391_419_919_936_801_5).abs() < 1e-12);
        assert!((q.exact_sre(1.0).unwrap() - 0.481_990_652_808_072_4).abs() < 1e-12);
        assert!(DenseState::zeros(9).unwrap().exact_sre(2.0).is_err());
    }

    #[test]
    fn exact_sre_is_clifford_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=4 {
            let d = DenseState::from_product(&ProductState::random(n, &mut rng)).unwrap();
            let mut e = d.clone();
            e.apply_gates(&random_gates(&mut rng, n, 20)).unwrap();
            for k in [1.0, 2.0, 3.0] {
                assert!((d.exact_sre(k).unwrap() - e.exact_sre(k).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tableau_conjugation_matches_dense() {
        // u p' = p u with p' = u† p u, checked on random states including phases.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..10 {
                let gates = random_gates(&mut rng, n, 15);
                let mut u = CliffordTableau::identity(n);
                u.compose(&gates).unwrap();
                let psi = DenseState::from_product(&ProductState::random(n, &mut rng)).unwrap();
                for _ in 0..5 {
                    let pstr = random_pauli(&mut rng, n);
                    let pc = u.conjugate_adjoint(&pstr).unwrap();
                    assert!(pc.is_hermitian());
                    let mut lhs = psi.clone();
                    lhs.apply_pauli(&pc).unwrap();
                    lhs.apply_gates(&gates).unwrap();
                    let mut rhs = psi.clone();
                    rhs.apply_gates(&gates).unwrap();
                    rhs.apply_pauli(&pstr).unwrap();
                    assert!(close(&lhs, &rhs, 1e-12), "n={n} p={pstr} -> {pc}");
                }
            }
        }
    }

    #[test]
    fn tableau_application_matches_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=5 {
            let gates = random_gates(&mut rng, n, 25);
            let mut u = CliffordTableau::identity(n);
            u.compose(&gates).unwrap();
            let psi = DenseState::from_product(&ProductState::random(n, &mut rng)).unwrap();
            let via = psi.apply_tableau(&u).unwrap();
            let mut direct = psi.clone();
            direct.apply_gates(&gates).unwrap();
            assert!((fidelity(&via, &direct).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eq3_gadget_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            for _ in 0..5 {
                let psi = DenseState::from_product(&ProductState::random(n, &mut rng)).unwrap();
                let target = rng.random_range(0..n);
                let mut lhs = psi.clone();
                lhs.apply_t(target).unwrap();
                let lhs = lhs.with_qubit(&SingleQubitState::zero()).unwrap();
                let mut rhs = psi.with_qubit(&SingleQubitState::t_state()).unwrap();
                rhs.apply_gates(&[GateRecord::cx(target, n)]).unwrap();
                let mut za = PauliString::identity(n + 1);
                za.set(n, Pauli::Z);
                let mut proj = rhs.clone();
                proj.apply_pauli(&za).unwrap();
                let err: f64 = lhs
                    .amps
                    .iter()
                    .zip(rhs.amps.iter().zip(&proj.amps))
                    .map(|(l, (r, pr))| (l - std::f64::consts::SQRT_2 * (r + pr) / 2.0).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(err < 1e-12);
            }
        }
    }
}

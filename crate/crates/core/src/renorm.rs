//! One renormalization step: a Z measurement on the physical circuit is moved
//! onto the initial product state and replaced by a Clifford correction.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{IccrError, Result};
use crate::gate::GateRecord;
use crate::pauli::Pauli;
use crate::product_state::{ProductState, SingleQubitState};
use crate::tableau::CliffordTableau;

/// Outcome probabilities below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutcomePolicy {
    /// Sample the outcome from the Born rule.
    BornSample,
    /// Force outcome `+1`; used for T-gadget measurements.
    PostselectPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// The measured operator stabilizes the state; nothing changes.
    TrivialDrop,
    /// The target qubit is a stabilizer state; the update is exact.
    StabilizerTarget,
    /// The target qubit carries magic; the other support qubits are fitted.
    VariationalTarget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalConfig {
    pub max_sweeps: usize,
    /// Sweeping stops once `|overlap|` improves by less than this.
    pub tolerance: f64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        VariationalConfig {
            max_sweeps: 200,
            tolerance: 1e-12,
        }
    }
}

/// Diagnostics of one [`iccr_step`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub measured_site: usize,
    /// Measurement outcome `±1` (deterministic for [`Branch::TrivialDrop`]).
    pub outcome_s: i8,
    /// Probability of the realized outcome.
    pub probability: f64,
    /// Size of the simplified support.
    pub support_size: usize,
    pub target_site: Option<usize>,
    pub target_q: Option<u8>,
    /// `⟨approx|exact⟩` between the normalized renormalized states.
    pub overlap: Complex64,
    pub step_fidelity: f64,
    pub rank_delta: i32,
    pub branch: Branch,
    pub sweeps: usize,
    pub converged: bool,
}

/// Complex number `m · 2^e`, used for long products that would underflow.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: Complex64,
    e: i32,
}

impl Scaled {
    const ONE: Scaled = Scaled {
        m: Complex64::new(1.0, 0.0),
        e: 0,
    };

    fn renorm(mut self) -> Self {
        let a = self.m.norm();
        if a == 0.0 {
            return Scaled {
                m: Complex64::new(0.0, 0.0),
                e: 0,
            };
        }
        if !(2f64.powi(-200)..=2f64.powi(200)).contains(&a) {
            let k = a.log2().floor() as i32;
            self.m *= 2f64.powi(-k);
            self.e += k;
        }
        self
    }

    fn mul(self, c: Complex64) -> Self {
        Scaled {
            m: self.m * c,
            e: self.e,
        }
        .renorm()
    }

    fn mul_s(self, o: Scaled) -> Self {
        Scaled {
            m: self.m * o.m,
            e: self.e + o.e,
        }
        .renorm()
    }

    fn to_complex(self) -> Complex64 {
        self.m * 2f64.powi(self.e)
    }

    /// `a + s b` as a pair of coefficients sharing the larger exponent.
    fn combine(a: Scaled, b: Scaled) -> (Complex64, Complex64) {
        if a.m.norm() == 0.0 {
            return (Complex64::new(0.0, 0.0), b.m);
        }
        if b.m.norm() == 0.0 {
            return (a.m, Complex64::new(0.0, 0.0));
        }
        let e = a.e.max(b.e);
        (a.m * 2f64.powi(a.e - e), b.m * 2f64.powi(b.e - e))
    }
}

#[inline]
fn braket(b: &[Complex64; 2], a: &[Complex64; 2]) -> Complex64 {
    b[0].conj() * a[0] + b[1].conj() * a[1]
}

#[inline]
fn z_of(a: &[Complex64; 2]) -> [Complex64; 2] {
    [a[0], -a[1]]
}

/// `|0⟩ + i^q |1⟩`, unnormalized.
fn target_ket(q: u8) -> [Complex64; 2] {
    let i_q = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(q & 3) as usize];
    [Complex64::new(1.0, 0.0), i_q]
}

/// Result of [`optimize_support`].
#[derive(Debug, Clone)]
pub struct SupportSolution {
    /// New states for the support qubits, in the order of the input. The
    /// target entry holds `|0⟩`.
    pub betas: Vec<SingleQubitState>,
    /// `(A + s B)/2` with `A = ∏⟨β_i|α_i⟩` and `B = ∏⟨β_i|Z|α_i⟩`, where the
    /// target factor uses `|0⟩ + i^q |1⟩`. Equals `⟨approx|Π|Ψ⟩`.
    pub overlap: Complex64,
    pub sweeps: usize,
    pub converged: bool,
}

fn products(betas: &[[Complex64; 2]], alphas: &[[Complex64; 2]]) -> (Scaled, Scaled) {
    betas
        .iter()
        .zip(alphas)
        .fold((Scaled::ONE, Scaled::ONE), |(a, b), (bj, aj)| {
            (a.mul(braket(bj, aj)), b.mul(braket(bj, &z_of(aj))))
        })
}

fn half_sum(a: Scaled, b: Scaled, s: i8) -> Complex64 {
    (a.to_complex() + f64::from(s) * b.to_complex()) / 2.0
}

/// Fits a product state to the projection `(1 + s ∏Z)/2 ⊗|α_i⟩`, with the
/// target qubit fixed, by alternating single-site updates.
///
/// Sites are swept in ascending order starting from `β = α`; each update
/// `β_j ∝ c_A |α_j⟩ + s c_B Z|α_j⟩` maximizes `|overlap|` with the other sites
/// held fixed, so `|overlap|` never decreases.
pub fn optimize_support(
    alphas: &[SingleQubitState],
    i_star: usize,
    q_star: u8,
    s: i8,
    config: &VariationalConfig,
) -> Result<SupportSolution> {
    if alphas.len() < 2 {
        return Err(IccrError::InvalidArgument(format!(
            "support of size {} has nothing to optimize",
            alphas.len()
        )));
    }
    if i_star >= alphas.len() {
        return Err(IccrError::SiteOutOfRange {
            site: i_star,
            n_qubits: alphas.len(),
        });
    }
    if s != 1 && s != -1 {
        return Err(IccrError::InvalidArgument(format!("outcome {s} is not ±1")));
    }
    let m = alphas.len();
    let al: Vec<[Complex64; 2]> = alphas.iter().map(|a| a.amplitudes()).collect();
    let mut betas = al.clone();
    betas[i_star] = target_ket(q_star);
    let sf = f64::from(s);

    let (a0, b0) = products(&betas, &al);
    let mut best = half_sum(a0, b0, s).norm();
    let mut overlap = half_sum(a0, b0, s);
    let mut sweeps = 0;
    let mut converged = false;
    let mut suf_a = vec![Scaled::ONE; m + 1];
    let mut suf_b = vec![Scaled::ONE; m + 1];
    while sweeps < config.max_sweeps {
        for k in (0..m).rev() {
            suf_a[k] = suf_a[k + 1].mul(braket(&betas[k], &al[k]));
            suf_b[k] = suf_b[k + 1].mul(braket(&betas[k], &z_of(&al[k])));
        }
        let (mut pa, mut pb) = (Scaled::ONE, Scaled::ONE);
        for k in 0..m {
            if k != i_star {
                let ca = pa.mul_s(suf_a[k + 1]);
                let cb = pb.mul_s(suf_b[k + 1]);
                let (ca, cb) = Scaled::combine(ca, cb);
                let za = z_of(&al[k]);
                let v = [
                    ca * al[k][0] + sf * cb * za[0],
                    ca * al[k][1] + sf * cb * za[1],
                ];
                let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                if norm > 0.0 && norm.is_finite() {
                    betas[k] = [v[0] / norm, v[1] / norm];
                }
            }
            pa = pa.mul(braket(&betas[k], &al[k]));
            pb = pb.mul(braket(&betas[k], &z_of(&al[k])));
        }
        sweeps += 1;
        overlap = half_sum(pa, pb, s);
        let value = overlap.norm();
        if value - best < config.tolerance {
            converged = true;
            break;
        }
        best = value;
    }

    let betas = betas
        .iter()
        .enumerate()
        .map(|(k, b)| {
            if k == i_star {
                Ok(SingleQubitState::zero())
            } else {
                SingleQubitState::from_amplitudes(b[0], b[1])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportSolution {
        betas,
        overlap,
        sweeps,
        converged,
    })
}

/// `f = |overlap|² / N²`, where `N² = (1 + s ∏⟨Z_i⟩)/2` is the squared norm
/// of the projected state and `overlap` is [`SupportSolution::overlap`].
pub fn step_fidelity(overlap: Complex64, norm_sq: f64) -> Result<f64> {
    if norm_sq < ZERO_PROBABILITY {
        return Err(IccrError::ZeroProbability {
            probability: norm_sq,
        });
    }
    Ok((overlap.norm_sqr() / norm_sq).min(1.0))
}

/// Rotation `q` with `q P q† = Z` for the letter `P`, in acting order.
pub(crate) fn rotation_to_z(letter: Pauli, site: usize) -> Vec<GateRecord> {
    match letter {
        Pauli::X => vec![GateRecord::h(site)],
        Pauli::Y => vec![GateRecord::sdg(site), GateRecord::h(site)],
        _ => Vec::new(),
    }
}

/// Inverse of [`rotation_to_z`], in acting order.
pub(crate) fn rotation_from_z(letter: Pauli, site: usize) -> Vec<GateRecord> {
    match letter {
        Pauli::X => vec![GateRecord::h(site)],
        Pauli::Y => vec![GateRecord::h(site), GateRecord::s(site)],
        _ => Vec::new(),
    }
}

/// Removes the measurement of `Z_j`, applied after `u` to `u|Ψ⟩`.
///
/// On return `u|Ψ⟩` (with the updated `u` and `state`) approximates the
/// normalized post-measurement state. The steps are:
///
/// 1. `P = u† Z_j u`, simplified against stabilizer qubits that are
///    eigenstates of their letter of `P`.
/// 2. Rotate every remaining support qubit so that `P = ±∏ Z_i`; the inverse
///    rotations are prepended to `u`.
/// 3. Draw (or postselect) the outcome `s`.
/// 4. Pick the support qubit and local state `(|0⟩ + i^q |1⟩)/√2` of maximal
///    overlap and prepend `V = S^q ∏ CX_{i→i*} X^b`, which maps `|0⟩` on the
///    target plus a product state on the rest into the `±1` eigenspace.
/// 5. Set the target to `|0⟩` and, unless that is exact, fit the other
///    support qubits with [`optimize_support`].
///
/// The state and tableau are left untouched when an error is returned.
pub fn iccr_step<R: Rng + ?Sized>(
    state: &mut ProductState,
    u: &mut CliffordTableau,
    j: usize,
    policy: OutcomePolicy,
    rng: &mut R,
    config: &VariationalConfig,
) -> Result<IterationReport> {
    let n = state.n_qubits();
    if u.n_qubits() != n {
        return Err(IccrError::SizeMismatch {
            expected: n,
            found: u.n_qubits(),
        });
    }
    if j >= n {
        return Err(IccrError::SiteOutOfRange {
            site: j,
            n_qubits: n,
        });
    }
    let p = u.z_image(j);
    let mut sigma = p
        .phase()
        .sign()
        .ok_or_else(|| IccrError::NotHermitian(p.to_string()))?;
    let mut support: Vec<(usize, Pauli)> = Vec::new();
    for i in p.support() {
        let letter = p.get(i);
        match state
            .qubit(i)
            .classification()
            .and_then(|c| c.eigenvalue(letter))
        {
            Some(l) => sigma *= l,
            None => support.push((i, letter)),
        }
    }

    if support.is_empty() {
        if policy == OutcomePolicy::PostselectPlus && sigma < 0 {
            return Err(IccrError::ZeroProbability { probability: 0.0 });
        }
        return Ok(IterationReport {
            measured_site: j,
            outcome_s: sigma,
            probability: 1.0,
            support_size: 0,
            target_site: None,
            target_q: None,
            overlap: Complex64::new(1.0, 0.0),
            step_fidelity: 1.0,
            rank_delta: 0,
            branch: Branch::TrivialDrop,
            sweeps: 0,
            converged: true,
        });
    }

    let zprod: f64 = support
        .iter()
        .map(|&(i, l)| state.qubit(i).expect(l))
        .product();
    let e = f64::from(sigma) * zprod;
    let p_plus = (1.0 + e) / 2.0;
    let p_minus = (1.0 - e) / 2.0;
    let s: i8 = match policy {
        OutcomePolicy::PostselectPlus => {
            if p_plus < ZERO_PROBABILITY {
                return Err(IccrError::ZeroProbability {
                    probability: p_plus,
                });
            }
            1
        }
        OutcomePolicy::BornSample => {
            if p_plus < ZERO_PROBABILITY {
                -1
            } else if p_minus < ZERO_PROBABILITY || rng.random::<f64>() < p_plus {
                1
            } else {
                -1
            }
        }
    };
    let probability = if s > 0 { p_plus } else { p_minus };
    let s_eff = s * sigma;

    // Rotate to a Z string.
    let mut alphas = Vec::with_capacity(support.len());
    for &(i, letter) in &support {
        let mut a = *state.qubit(i);
        for g in rotation_to_z(letter, i) {
            a.apply(g.kind)?;
        }
        alphas.push(a);
    }
    // Same gates as `rotation_from_z` per site, grouped by kind so that the
    // tableau can apply each group in one pass.
    let undo: Vec<GateRecord> = support
        .iter()
        .filter(|&&(_, l)| l != Pauli::Z)
        .map(|&(i, _)| GateRecord::h(i))
        .chain(
            support
                .iter()
                .filter(|&&(_, l)| l == Pauli::Y)
                .map(|&(i, _)| GateRecord::s(i)),
        )
        .collect();

    // Target qubit and local phase.
    let (mut k_star, mut q_star, mut best) = (0usize, 0u8, f64::NEG_INFINITY);
    for (k, a) in alphas.iter().enumerate() {
        for q in 0..4u8 {
            let o = a.overlap_with_local(q);
            if o > best {
                (k_star, q_star, best) = (k, q, o);
            }
        }
    }
    let i_star = support[k_star].0;

    let mut v = Vec::with_capacity(support.len() + 1);
    if s_eff < 0 {
        v.push(GateRecord::x(i_star));
    }
    for &(i, _) in &support {
        if i != i_star {
            v.push(GateRecord::cx(i, i_star));
        }
    }
    match q_star {
        1 => v.push(GateRecord::s(i_star)),
        2 => v.push(GateRecord::z(i_star)),
        3 => v.push(GateRecord::sdg(i_star)),
        _ => {}
    }

    let rank_before = alphas.iter().filter(|a| a.is_stabilizer()).count() as i32;
    let exact = alphas[k_star].is_stabilizer() || support.len() == 1;
    let (betas, raw_overlap, sweeps, converged) = if exact {
        let mut betas = alphas.clone();
        betas[k_star] = SingleQubitState::zero();
        let al: Vec<_> = alphas.iter().map(|a| a.amplitudes()).collect();
        let mut bk: Vec<_> = al.clone();
        bk[k_star] = target_ket(q_star);
        let (a, b) = products(&bk, &al);
        (betas, half_sum(a, b, s_eff), 0, true)
    } else {
        let sol = optimize_support(&alphas, k_star, q_star, s_eff, config)?;
        (sol.betas, sol.overlap, sol.sweeps, sol.converged)
    };
    let step_fid = if exact {
        if probability < ZERO_PROBABILITY {
            return Err(IccrError::ZeroProbability { probability });
        }
        1.0
    } else {
        step_fidelity(raw_overlap, probability)?
    };
    let rank_after = betas.iter().filter(|b| b.is_stabilizer()).count() as i32;

    // U ← U · undo · V, with V acting first.
    v.extend(undo);
    u.prepend(&v)?;
    for (&(i, _), b) in support.iter().zip(betas) {
        state.set_qubit(i, b)?;
    }

    Ok(IterationReport {
        measured_site: j,
        outcome_s: s,
        probability,
        support_size: support.len(),
        target_site: Some(i_star),
        target_q: Some(q_star),
        overlap: raw_overlap / probability.sqrt(),
        step_fidelity: step_fid,
        rank_delta: rank_after - rank_before,
        branch: if alphas[k_star].is_stabilizer() {
            Branch::StabilizerTarget
        } else {
            Branch::VariationalTarget
        },
        sweeps,
        converged,
    })
}

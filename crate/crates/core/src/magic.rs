//! Stabilizer Rényi entropies and stabilizer nullity of product states.
//!
//! All quantities are in bits. For a product state the entropies are additive
//! over sites, so only single-qubit Pauli expectations are needed.

use serde::Serialize;

use crate::error::{IccrError, Result};
use crate::product_state::{ProductState, SingleQubitState};

/// Default entropy orders.
pub const DEFAULT_ORDERS: [f64; 3] = [1.0, 2.0, 3.0];

fn check_order(n: f64) -> Result<()> {
    if !n.is_finite() || n <= 0.0 {
        return Err(IccrError::InvalidOrder(n));
    }
    Ok(())
}

/// `M_n` from the squared expectations of all `4^N` unsigned Pauli strings,
/// identity included.
pub(crate) fn sre_from_squares(squares: &[f64], n: f64, n_qubits: usize) -> f64 {
    let dim = 2f64.powi(n_qubits as i32);
    if n == 1.0 {
        let h: f64 = squares
            .iter()
            .filter(|&&p2| p2 > 0.0)
            .map(|&p2| -(p2 / dim) * p2.log2())
            .sum();
        return h.max(0.0);
    }
    let sum: f64 = squares.iter().map(|&p2| p2.powf(n)).sum::<f64>() / dim;
    (sum.log2() / (1.0 - n)).max(0.0)
}

/// `M_n` of a single qubit; `n = 1` is the Shannon limit.
pub fn single_qubit_sre(q: &SingleQubitState, n: f64) -> Result<f64> {
    check_order(n)?;
    if q.is_stabilizer() {
        return Ok(0.0);
    }
    let [x, y, z] = q.bloch();
    Ok(sre_from_squares(&[1.0, x * x, y * y, z * z], n, 1))
}

/// `M_n` of a product state, by additivity.
pub fn sre(state: &ProductState, n: f64) -> Result<f64> {
    check_order(n)?;
    state.qubits().iter().map(|q| single_qubit_sre(q, n)).sum()
}

/// `ν = N − r`, with `r` the number of stabilizer qubits.
pub fn nullity(state: &ProductState) -> usize {
    state.nullity()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagicReport {
    pub n_qubits: usize,
    /// `(n, M_n)` pairs in the requested order.
    pub sre: Vec<(f64, f64)>,
    pub nullity: usize,
}

impl MagicReport {
    pub fn compute(state: &ProductState, orders: &[f64]) -> Result<Self> {
        let sre = orders
            .iter()
            .map(|&n| Ok((n, sre(state, n)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MagicReport {
            n_qubits: state.n_qubits(),
            sre,
            nullity: nullity(state),
        })
    }

    /// `M_n / N` for each order.
    pub fn sre_densities(&self) -> Vec<(f64, f64)> {
        let n = self.n_qubits.max(1) as f64;
        self.sre.iter().map(|&(k, m)| (k, m / n)).collect()
    }

    pub fn nullity_density(&self) -> f64 {
        self.nullity as f64 / self.n_qubits.max(1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_state::Stabilizer;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn stabilizer_states_have_no_magic() {
        for c in Stabilizer::ALL {
            for n in [0.5, 1.0, 2.0, 3.0] {
                assert_eq!(
                    single_qubit_sre(&SingleQubitState::stabilizer(c), n).unwrap(),
                    0.0
                );
            }
        }
        assert_eq!(sre(&ProductState::zeros(5), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms() {
        let t = SingleQubitState::t_state();
        assert!((single_qubit_sre(&t, 2.0).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        let q = SingleQubitState::from_angle(PI / 7.0);
        assert!((single_qubit_sre(&q, 2.0).unwrap() - 0.391_419_919_936_801_5).abs() < 1e-12);
        assert!((single_qubit_sre(&q, 1.0).unwrap() - 0.481_990_652_808_072_4).abs() < 1e-12);
        let s = ProductState::from_angle(10, PI / 7.0);
        assert!((sre(&s, 2.0).unwrap() - 3.914_199_199_368_015).abs() < 1e-11);
    }

    #[test]
    fn additivity_with_stabilizer_sites() {
        let q = SingleQubitState::from_angle(PI / 7.0);
        let mut s = ProductState::uniform(6, q);
        s.set_qubit(1, SingleQubitState::zero()).unwrap();
        s.set_qubit(4, SingleQubitState::local(1)).unwrap();
        let one = single_qubit_sre(&q, 2.0).unwrap();
        assert!((sre(&s, 2.0).unwrap() - 4.0 * one).abs() < 1e-12);
    }

    #[test]
    fn nullity_examples() {
        assert_eq!(nullity(&ProductState::from_angle(100, PI / 7.0)), 100);
        assert_eq!(nullity(&ProductState::zeros(7)), 0);
    }

    #[test]
    fn invalid_orders() {
        let q = SingleQubitState::zero();
        assert!(single_qubit_sre(&q, 0.0).is_err());
        assert!(single_qubit_sre(&q, -1.0).is_err());
        assert!(single_qubit_sre(&q, f64::NAN).is_err());
    }

    #[test]
    fn report_densities() {
        let s = ProductState::from_angle(4, PI / 7.0);
        let r = MagicReport::compute(&s, &DEFAULT_ORDERS).unwrap();
        assert_eq!(r.nullity, 4);
        assert_eq!(r.nullity_density(), 1.0);
        assert!((r.sre_densities()[1].1 - 0.391_419_919_936_801_5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn monotone_in_order_and_bounded(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = SingleQubitState::random(&mut rng);
            let m1 = single_qubit_sre(&q, 1.0).unwrap();
            let m2 = single_qubit_sre(&q, 2.0).unwrap();
            let m3 = single_qubit_sre(&q, 3.0).unwrap();
            prop_assert!(m1 >= m2 - 1e-12 && m2 >= m3 - 1e-12);
            prop_assert!(m1 <= 1.0 + 1e-12 && m3 >= 0.0);
        }
    }
}

//! Iterative Clifford circuit renormalization.
//!
//! A monitored Clifford circuit acting on a product state is represented as a
//! Clifford tableau `U` applied to a renormalized product state `|Ψ⟩`. Each
//! measurement (and each T gate, through a postselected gadget) is pushed back
//! onto `|Ψ⟩` and compensated by Clifford gates absorbed into `U`, so magic
//! measures of the physical state `U|Ψ⟩` can be read off the product state.

pub mod clifford2;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod gadget;
pub mod gate;
pub mod magic;
pub mod pauli;
pub mod product_state;
pub mod renorm;
pub mod tableau;
pub mod validation;

pub use clifford2::random_two_qubit_clifford;
pub use dense::DenseState;
pub use error::{IccrError, Result};
pub use experiment::{
    run_experiment, run_trajectory, AggregatedTable, Boundary, ExperimentConfig, TrajectoryResult,
    TrajectoryRow,
};
pub use gadget::{inject_t_gate, recycle_ancilla};
pub use gate::{GateKind, GateRecord};
pub use magic::{nullity, single_qubit_sre, sre, MagicReport};
pub use pauli::{Pauli, PauliString, Phase};
pub use product_state::{ProductState, SingleQubitState, Stabilizer};
pub use renorm::{
    iccr_step, optimize_support, step_fidelity, Branch, IterationReport, OutcomePolicy,
    SupportSolution, VariationalConfig,
};
pub use tableau::CliffordTableau;

/// Seedable random generator used throughout.
pub type SeededRng = rand_chacha::ChaCha8Rng;

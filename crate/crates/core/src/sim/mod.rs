//! Dense density-matrix simulation.
//!
//! Gates act as their ideal unitary followed by a depolarizing channel whose
//! strength depends on which CX gates overlap in time; idle qubits undergo
//! thermal relaxation for the length of every time slot.

mod channel;
mod density;
mod linalg;
mod run;

pub use channel::{depolarizing_channel, thermal_relaxation_channel, KrausChannel};
pub use density::DensityMatrix;
pub use linalg::gate_matrix;
pub use run::{
    circuit_unitary, evolve, outcome_distribution, run_ideal, run_scheduled, run_scheduled_observed, NoiseBinding,
    OutcomeDistribution, ShotMode, MAX_QUBITS,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("gate kind `{0}` has no unitary action")]
    UnsupportedKind(&'static str),
    #[error("channel acts on {expected} qubits but {found} targets were given")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid or repeated target qubits {0:?}")]
    BadTargets(Vec<usize>),
    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("schedule does not fit the device: {0}")]
    Mismatch(String),
    #[error("{0} qubits exceed the dense simulator capacity of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("state left the physical set: {0}")]
    Unphysical(String),
    #[error("sampled mode needs at least one shot")]
    NoShots,
}

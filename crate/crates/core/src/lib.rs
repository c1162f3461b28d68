//! Deterministic single-qubit Pauli measurement schedules for estimating many
//! Pauli observables at once, built by greedily derandomizing a
//! confidence-bound cost, plus a small exact statevector simulator to check
//! the schedules end to end.

pub mod bench;
pub mod confidence;
pub mod derandomizer;
pub mod error;
pub mod estimator;
pub mod io;
pub mod pauli;
pub mod schedule;
pub mod simulator;

pub use confidence::{
    conditional_expected_bound, confidence_bound, expected_confidence_bound, hit_count,
    CostParams, PartialAssignment,
};
pub use derandomizer::{
    derandomize, BudgetFreeParams, CostMode, DerandConfig, DerandOutcome, Derandomizer,
};
pub use error::{Error, Result};
pub use estimator::{estimate_all, rmse, EstimateReport, OutcomeRecord};
pub use pauli::{hits, parse_pauli, render_pauli, MeasurementBasis, ObservableSet, Pauli, PauliObservable};
pub use schedule::{randomized_schedule, Schedule, ScheduleOrigin};
pub use simulator::{ground_state, PauliSumHamiltonian, StateVector};

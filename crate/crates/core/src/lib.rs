//! Crosstalk workbench: characterize CX crosstalk on a simulated noisy device
//! with simultaneous randomized benchmarking, and mitigate it with a
//! crosstalk-adaptive scheduler.
//!
//! The crate is organised bottom-up:
//!
//! * [`circuit`]: gate IR, QASM subset, macro lowering, dependency DAG.
//! * [`device`]: coupling graph, error rates, relaxation times, crosstalk map.
//! * [`sim`]: dense density-matrix simulator driven by a schedule.
//! * [`clifford`]: Clifford tableaux, uniform sampling, gate synthesis.
//! * [`rb`]: RB / SRB sequences, decay fitting, device characterization.
//! * [`schedule`]: ParSched and XtalkSched.
//! * [`experiments`]: injection and comparison drivers, benchmark suite, reports.

pub mod circuit;
pub mod clifford;
pub mod device;
pub mod experiments;
pub mod rb;
pub mod schedule;
pub mod sim;

//! Measurement disturbance toolkit: exact error/disturbance metrics for
//! qubit measurements, shot-based estimators, error mitigation and a small
//! density-matrix circuit simulator.

pub mod error;
pub mod estimators;
pub mod fixtures;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod mitigation;
pub mod quantum;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use quantum::{Circuit, DensityOperator, MeasurementModel, NoiseModel, Pauli, Sign};

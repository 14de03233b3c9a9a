//! Impulsive fractional delay evolution equations with nonlocal history
//! conditions in a spectral sine truncation: Mittag-Leffler kernels, mild
//! solutions, regularized steering controls and direct optimal control.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllability;
pub mod error;
pub mod linalg;
pub mod mild_solver;
pub mod ml_special;
pub mod optimal_control;

pub mod quadrature;
pub mod scalar;
pub mod spectral_model;

pub use error::{Error, Regime, Result};
pub use scalar::Real;

pub type SpectralVector = spectral_model::SpectralVector<f64>;
pub type ProblemSpec = spectral_model::ProblemSpec<f64>;
pub type ProblemParams = spectral_model::ProblemParams<f64>;
pub type HistorySegment = spectral_model::HistorySegment<f64>;
pub type TimeGrid = mild_solver::TimeGrid<f64>;
pub type Trajectory = mild_solver::Trajectory<f64>;
pub type ControlSignal = mild_solver::ControlSignal<f64>;
pub type MlQuery = ml_special::MlQuery<f64>;
pub type Grammian = controllability::Grammian<f64>;
pub type SteerOptions = controllability::SteerOptions<f64>;
pub type SteerOutcome = controllability::SteerOutcome<f64>;
pub type CostDescriptor = optimal_control::CostDescriptor<f64>;
pub type ControlParameterization = optimal_control::ControlParameterization<f64>;

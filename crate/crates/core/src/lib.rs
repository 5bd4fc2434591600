//! Electron dynamics in an AC-driven coupled double quantum dot.
//!
//! The crate integrates the amplitude equations of the driven two-level
//! model and the equivalent two-coordinate angle equations, measures how well
//! the electron stays localized, compares the two formulations, and drives a
//! quantum-dot cellular automata majority circuit from the simulated
//! localization.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use dotsim_core::{integrate, localization_degree, Dot, Envelope, Scenario, SystemParams};
//!
//! let params = SystemParams::new(1.9, 5.05).unwrap();
//! let scenario = Scenario::new(params, Envelope::Constant).with_t_end(5.0);
//! let traj = integrate(&scenario).unwrap();
//! let report = localization_degree(&traj, Dot::Left, None).unwrap();
//! assert!(report.degree > 0.9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod qca;
pub mod real;

pub use analysis::{
    bench_formulations, compare_formulations, localization_degree, settled_window, sweep, BenchReport, Dot,
    FormulationBench, SweepParam,
};
pub use dynamics::{
    amplitudes_from_angles, angles_from_amplitudes, charging_from_capacitance, eval_drive, eval_envelope, phase_rate,
    rabi_from_field, rhs_amplitudes, rhs_angles,
};
pub use error::{Error, Result};
pub use integrator::{integrate, rk4_step, Formulation, InitialState, OdeVector, WarningKind};
pub use qca::{
    bit_from_polarization, cell_from_trajectory, cell_ket, majority, polarization, truth_table, Bit, Netlist,
};
pub use real::Real;

pub type SystemParams = dynamics::SystemParams<f64>;
pub type Envelope = dynamics::Envelope<f64>;
pub type AmplitudeState = dynamics::AmplitudeState<f64>;
pub type AngleState = dynamics::AngleState<f64>;
pub type Scenario = integrator::Scenario<f64>;
pub type Trajectory = integrator::Trajectory<f64>;
pub type LocalizationReport = analysis::LocalizationReport<f64>;
pub type DivergenceReport = analysis::DivergenceReport<f64>;
pub type SweepAxis = analysis::SweepAxis<f64>;
pub type SweepResult = analysis::SweepResult<f64>;
pub type QcaCellState = qca::QcaCellState<f64>;
pub type CellKet = qca::CellKet<f64>;
pub type Complex = num_complex::Complex<f64>;

#![allow(dead_code)]

use dotsim_core::{AngleState, Envelope, InitialState, Scenario, SystemParams};
use std::f64::consts::FRAC_PI_4;

/// Constant-envelope scenario with `omega_drive = 10`, starting in the left dot.
pub fn constant(omega_coulomb: f64, rabi_ratio: f64) -> Scenario {
    Scenario::new(SystemParams::new(omega_coulomb, rabi_ratio).unwrap(), Envelope::Constant)
}

/// Tanh-pulsed scenario starting in the right dot, window 15 tau.
pub fn tanh(omega_coulomb: f64, rabi_ratio: f64, tau: f64) -> Scenario {
    Scenario::new(SystemParams::new(omega_coulomb, rabi_ratio).unwrap(), Envelope::tanh_rise(tau).unwrap())
        .with_initial(InitialState::RightDot)
}

pub fn fig1() -> Scenario {
    constant(0.0, 5.05)
}

pub fn fig2() -> Scenario {
    constant(1.9, 5.05)
}

pub fn fig3() -> Scenario {
    constant(0.9, 5.05)
}

pub fn fig5() -> Scenario {
    tanh(0.0, 2.4, 2.0)
}

pub fn fig6() -> Scenario {
    tanh(0.0, 2.4, 5.2)
}

pub fn fig7() -> Scenario {
    tanh(0.675, 5.52, 5.2)
}

/// Fig. 2 parameters from the equal superposition, away from the angle poles.
pub fn fig2_superposition() -> Scenario {
    fig2().with_initial(InitialState::Custom(AngleState::new(FRAC_PI_4, 0.0)))
}

/// Free tunneling: no drive, no charging.
pub fn free_rabi() -> Scenario {
    constant(0.0, 0.0)
}

//! Physical model of one electron in an AC-driven double quantum dot.
//!
//! Frequencies are in units of the tunneling coupling `|k|` and times in
//! units of `1/|k|`. The electron state is either the complex amplitude pair
//! `(a_L, a_R)` or the trigonometric coordinates `(alpha, phi)` with
//! `a_L = cos(alpha) e^{i lambda}` and `a_R = sin(alpha) e^{i (lambda + phi)}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{wrap_angle, Real};

/// `|sin 2 alpha|` below which `cot(2 alpha)` is clamped to `±1/POLE_EPSILON`.
pub const POLE_EPSILON: f64 = 1e-8;

/// Distance an initial angle state is moved off a pole (`alpha ∈ {0, pi/2}`).
pub const POLE_SHIFT: f64 = 1e-6;

/// Normalization tolerance accepted by [`angles_from_amplitudes`].
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Elementary charge, CODATA 2018 (exact), in coulomb.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced Planck constant, CODATA 2018, in joule second.
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    /// Tunneling coupling. Signed; `|k|` is the frequency unit.
    pub k: T,
    /// Half the Coulomb charging angular frequency.
    pub omega_coulomb: T,
    /// Drive angular frequency.
    pub omega_drive: T,
    /// Rabi frequency of the drive divided by `omega_drive`.
    pub rabi_ratio: T,
    /// Drive phase in radians.
    pub phase: T,
}

impl<T: Real> SystemParams<T> {
    /// Drive angular frequency used when none is configured.
    pub const DEFAULT_OMEGA_DRIVE: f64 = 10.0;

    /// Parameters with `k = 1`, `omega_drive = 10` and zero drive phase.
    pub fn new(omega_coulomb: T, rabi_ratio: T) -> Result<Self> {
        let params = Self {
            k: T::one(),
            omega_coulomb,
            omega_drive: T::lit(Self::DEFAULT_OMEGA_DRIVE),
            rabi_ratio,
            phase: T::zero(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_k(mut self, k: T) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_omega_drive(mut self, omega_drive: T) -> Result<Self> {
        self.omega_drive = omega_drive;
        self.validate()?;
        Ok(self)
    }

    pub fn with_phase(mut self, phase: T) -> Result<Self> {
        self.phase = phase;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite =
            [self.k, self.omega_coulomb, self.omega_drive, self.rabi_ratio, self.phase].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.k == T::zero() {
            return Err(Error::InvalidParameter("tunneling coupling k must be nonzero".into()));
        }
        if self.omega_coulomb < T::zero() {
            return Err(Error::InvalidParameter("omega_coulomb must be >= 0".into()));
        }
        if self.omega_drive <= T::zero() {
            return Err(Error::InvalidParameter("omega_drive must be > 0".into()));
        }
        if self.rabi_ratio < T::zero() {
            return Err(Error::InvalidParameter("rabi_ratio must be >= 0".into()));
        }
        Ok(())
    }

    /// Rabi frequency `rabi_ratio * omega_drive`.
    pub fn rabi_frequency(&self) -> T {
        self.rabi_ratio * self.omega_drive
    }

    /// Upper bound of `|F(t)|`.
    pub fn drive_bound(&self) -> T {
        T::lit(0.5) * self.rabi_frequency()
    }
}

/// Slowly varying multiplier `f(t)` on the AC drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope<T> {
    /// `f(t) = 1`.
    Constant,
    /// `f(t) = tanh(t / tau)`, a semi-infinite pulse switched on at `t = 0`.
    TanhRise { tau: T },
}

impl<T: Real> Envelope<T> {
    pub fn tanh_rise(tau: T) -> Result<Self> {
        let env = Envelope::TanhRise { tau };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Constant => Ok(()),
            Envelope::TanhRise { tau } if tau > T::zero() && tau.is_finite() => Ok(()),
            Envelope::TanhRise { .. } => Err(Error::InvalidParameter("tanh rise time tau must be > 0".into())),
        }
    }
}

/// Evaluates the envelope at time `t`.
pub fn eval_envelope<T: Real>(env: &Envelope<T>, t: T) -> Result<T> {
    match *env {
        Envelope::Constant => Ok(T::one()),
        Envelope::TanhRise { tau } => {
            if t < T::zero() {
                return Err(Error::NegativeTime { t: t.as_f64() });
            }
            Ok((t / tau).tanh())
        }
    }
}

/// Drive term `F(t) = 1/2 * Omega_w * f(t) * cos(w t + theta)`.
pub fn eval_drive<T: Real>(params: &SystemParams<T>, env: &Envelope<T>, t: T) -> Result<T> {
    let f = eval_envelope(env, t)?;
    Ok(T::lit(0.5) * params.rabi_frequency() * f * (params.omega_drive * t + params.phase).cos())
}

/// Electron state as complex dot amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState<T> {
    pub left: Complex<T>,
    pub right: Complex<T>,
}

impl<T: Real> AmplitudeState<T> {
    pub fn new(left: Complex<T>, right: Complex<T>) -> Self {
        Self { left, right }
    }

    /// Electron fully in the left dot.
    pub fn left_dot() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// Electron fully in the right dot.
    pub fn right_dot() -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()))
    }

    /// `|a_L|^2 + |a_R|^2`.
    pub fn norm_sqr(&self) -> T {
        self.left.norm_sqr() + self.right.norm_sqr()
    }

    pub fn p_left(&self) -> T {
        self.left.norm_sqr()
    }

    pub fn p_right(&self) -> T {
        self.right.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.left.re, self.left.im, self.right.re, self.right.im].iter().all(|x| x.is_finite())
    }
}

/// Electron state in trigonometric coordinates.
///
/// `phi = xi - lambda` is the relative phase; `lambda` is the phase of `a_L`
/// and is only needed to rebuild the full amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleState<T> {
    pub alpha: T,
    pub phi: T,
    pub lambda: T,
}

impl<T: Real> AngleState<T> {
    pub fn new(alpha: T, phi: T) -> Self {
        Self { alpha, phi, lambda: T::zero() }
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    /// Equivalent state with `alpha ∈ [0, pi/2]` and both phases in `(-pi, pi]`.
    pub fn canonical(&self) -> Self {
        let pi = T::PI();
        let turns = (self.alpha / pi).floor();
        let r = (self.alpha - turns * pi).max(T::zero());
        let mut lambda = self.lambda;
        let mut phi = self.phi;
        // alpha + pi flips the sign of both amplitudes.
        if (turns * T::lit(0.5)).fract() != T::zero() {
            lambda += pi;
        }
        let alpha = if r > T::FRAC_PI_2() {
            // cos(pi - r) = -cos r while sin(pi - r) = sin r.
            lambda += pi;
            phi -= pi;
            pi - r
        } else {
            r
        };
        Self { alpha, phi: wrap_angle(phi), lambda: wrap_angle(lambda) }
    }

    pub fn p_left(&self) -> T {
        let c = self.alpha.cos();
        c * c
    }

    pub fn p_right(&self) -> T {
        let s = self.alpha.sin();
        s * s
    }

    /// True when `|sin 2 alpha| < eps`, i.e. on a coordinate singularity.
    pub fn near_pole(&self, eps: T) -> bool {
        (self.alpha + self.alpha).sin().abs() < eps
    }
}

/// Time derivative of an [`AmplitudeState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeDerivative<T> {
    pub d_left: Complex<T>,
    pub d_right: Complex<T>,
}

/// Time derivative of the `(alpha, phi)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleDerivative<T> {
    pub d_alpha: T,
    pub d_phi: T,
    /// Set when `cot(2 alpha)` had to be clamped near a pole.
    pub pole_clamped: bool,
}

/// Right-hand side of the amplitude equations.
///
/// ```text
/// da_L/dt = -i k a_R + i [F(t) + Omega (|a_R|^2 - |a_L|^2)] a_L
/// da_R/dt = -i k a_L - i [F(t) + Omega (|a_R|^2 - |a_L|^2)] a_R
/// ```
pub fn rhs_amplitudes<T: Real>(
    state: &AmplitudeState<T>,
    t: T,
    params: &SystemParams<T>,
    env: &Envelope<T>,
) -> Result<AmplitudeDerivative<T>> {
    let drive = eval_drive(params, env, t)?;
    Ok(amplitude_rate(state, drive, params))
}

#[inline]
pub(crate) fn amplitude_rate<T: Real>(
    state: &AmplitudeState<T>,
    drive: T,
    params: &SystemParams<T>,
) -> AmplitudeDerivative<T> {
    let g = drive + params.omega_coulomb * (state.right.norm_sqr() - state.left.norm_sqr());
    let ik = Complex::new(T::zero(), params.k);
    let ig = Complex::new(T::zero(), g);
    AmplitudeDerivative { d_left: -ik * state.right + ig * state.left, d_right: -ik * state.left - ig * state.right }
}

/// Right-hand side of the angle equations with the default pole epsilon.
///
/// ```text
/// dphi/dt   = -2 F(t) - 2 k cos(phi) cot(2 alpha) + 2 Omega cos(2 alpha)
/// dalpha/dt = -k sin(phi)
/// ```
pub fn rhs_angles<T: Real>(
    state: &AngleState<T>,
    t: T,
    params: &SystemParams<T>,
    env: &Envelope<T>,
) -> Result<AngleDerivative<T>> {
    rhs_angles_with_epsilon(state, t, params, env, T::lit(POLE_EPSILON))
}

pub fn rhs_angles_with_epsilon<T: Real>(
    state: &AngleState<T>,
    t: T,
    params: &SystemParams<T>,
    env: &Envelope<T>,
    pole_epsilon: T,
) -> Result<AngleDerivative<T>> {
    let drive = eval_drive(params, env, t)?;
    Ok(angle_rate(state.alpha, state.phi, drive, params, pole_epsilon))
}

#[inline]
pub(crate) fn angle_rate<T: Real>(
    alpha: T,
    phi: T,
    drive: T,
    params: &SystemParams<T>,
    pole_epsilon: T,
) -> AngleDerivative<T> {
    let two = T::lit(2.0);
    let (s2, c2) = (two * alpha).sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (cot, pole_clamped) = if s2.abs() < pole_epsilon {
        let sign = if s2 < T::zero() { -T::one() } else { T::one() };
        (c2.signum() * sign / pole_epsilon, true)
    } else {
        (c2 / s2, false)
    };
    AngleDerivative {
        d_alpha: -params.k * sp,
        d_phi: -two * drive - two * params.k * cp * cot + two * params.omega_coulomb * c2,
        pole_clamped,
    }
}

/// Rate of the reference phase `lambda`,
/// `dlambda/dt = F(t) - Omega cos(2 alpha) - k tan(alpha) cos(phi)`.
///
/// Probabilities do not depend on `lambda`; this is only needed to rebuild
/// the full amplitude derivative from the angle coordinates.
pub fn phase_rate<T: Real>(state: &AngleState<T>, t: T, params: &SystemParams<T>, env: &Envelope<T>) -> Result<T> {
    let drive = eval_drive(params, env, t)?;
    let two = T::lit(2.0);
    Ok(drive - params.omega_coulomb * (two * state.alpha).cos() - params.k * state.alpha.tan() * state.phi.cos())
}

/// `a_L = cos(alpha) e^{i lambda}`, `a_R = sin(alpha) e^{i (lambda + phi)}`.
pub fn amplitudes_from_angles<T: Real>(state: &AngleState<T>) -> AmplitudeState<T> {
    let (s, c) = state.alpha.sin_cos();
    AmplitudeState {
        left: Complex::from_polar(c, state.lambda),
        right: Complex::from_polar(s, state.lambda + state.phi),
    }
}

/// Inverts [`amplitudes_from_angles`] on a normalized state.
///
/// `alpha = atan2(|a_R|, |a_L|)`; a zero amplitude has phase 0.
pub fn angles_from_amplitudes<T: Real>(state: &AmplitudeState<T>) -> Result<AngleState<T>> {
    let norm = state.norm_sqr();
    if !((norm - T::one()).abs() <= T::lit(NORM_TOLERANCE)) {
        return Err(Error::NotNormalized { norm: norm.as_f64() });
    }
    Ok(angles_unchecked(state))
}

pub(crate) fn angles_unchecked<T: Real>(state: &AmplitudeState<T>) -> AngleState<T> {
    let (ml, mr) = (state.left.norm(), state.right.norm());
    let alpha = mr.atan2(ml);
    let lambda = if ml == T::zero() { T::zero() } else { state.left.arg() };
    let phi = if mr == T::zero() { T::zero() } else { wrap_angle(state.right.arg() - lambda) };
    AngleState { alpha, phi, lambda }
}

/// Rabi frequency `2 e E0 d / hbar` in rad/s, from a field amplitude in V/m and a
/// center-to-center dot distance in m.
pub fn rabi_from_field<T: Real>(field: T, distance: T) -> Result<T> {
    if !(distance > T::zero()) {
        return Err(Error::NonPositiveDistance(distance.as_f64()));
    }
    if !(field >= T::zero()) {
        return Err(Error::InvalidParameter("field amplitude must be >= 0".into()));
    }
    Ok(T::lit(2.0 * ELEMENTARY_CHARGE / HBAR) * field * distance)
}

/// Half Coulomb charging angular frequency `e^2 / (4 hbar C)` in rad/s for a
/// dot capacitance in farad.
pub fn charging_from_capacitance<T: Real>(capacitance: T) -> Result<T> {
    if !(capacitance > T::zero()) {
        return Err(Error::NonPositiveCapacitance(capacitance.as_f64()));
    }
    let e_over_hbar = T::lit(ELEMENTARY_CHARGE / HBAR);
    Ok(e_over_hbar * T::lit(ELEMENTARY_CHARGE) / (T::lit(4.0) * capacitance))
}

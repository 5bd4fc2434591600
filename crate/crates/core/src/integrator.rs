//! Fixed-step fourth-order Runge-Kutta propagation of either formulation.

use std::cell::Cell;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    amplitude_rate, amplitudes_from_angles, angle_rate, angles_unchecked, eval_drive, AmplitudeState, AngleState,
    Envelope, SystemParams, POLE_EPSILON, POLE_SHIFT,
};
use crate::error::{Error, Result};
use crate::real::{wrap_angle, Real};

/// Anything the Runge-Kutta stepper can advance.
pub trait OdeVector<T: Real>: Copy {
    /// `self + h * rate`.
    fn axpy(self, h: T, rate: Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl<T: Real> OdeVector<T> for T {
    #[inline]
    fn axpy(self, h: T, rate: Self) -> Self {
        self + h * rate
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> OdeVector<T> for Complex<T> {
    #[inline]
    fn axpy(self, h: T, rate: Self) -> Self {
        self + rate * h
    }

    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: Real, V: OdeVector<T>, const N: usize> OdeVector<T> for [V; N] {
    #[inline]
    fn axpy(self, h: T, rate: Self) -> Self {
        let mut out = self;
        for (o, r) in out.iter_mut().zip(rate) {
            *o = o.axpy(h, r);
        }
        out
    }

    fn all_finite(&self) -> bool {
        self.iter().all(OdeVector::all_finite)
    }
}

/// One classic RK4 step of `y' = rhs(y, t)` from `t` to `t + dt`.
pub fn rk4_step<T, S, F>(mut rhs: F, state: &S, t: T, dt: T) -> Result<S>
where
    T: Real,
    S: OdeVector<T>,
    F: FnMut(&S, T) -> Result<S>,
{
    let half = dt * T::lit(0.5);
    let k1 = rhs(state, t)?;
    let k2 = rhs(&state.axpy(half, k1), t + half)?;
    let k3 = rhs(&state.axpy(half, k2), t + half)?;
    let k4 = rhs(&state.axpy(dt, k3), t + dt)?;
    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    let next = state.axpy(sixth, k1).axpy(third, k2).axpy(third, k3).axpy(sixth, k4);
    if !next.all_finite() {
        return Err(Error::NonFiniteState { t: (t + dt).as_f64() });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Four real components: the complex amplitudes `(a_L, a_R)`.
    Amplitude,
    /// Two real components: `(alpha, phi)`.
    Angle,
}

impl Formulation {
    pub fn real_dimension(self) -> usize {
        match self {
            Formulation::Amplitude => 4,
            Formulation::Angle => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState<T> {
    LeftDot,
    RightDot,
    Custom(AngleState<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    /// `cot(2 alpha)` was clamped during a step.
    PoleClamped,
    /// A localized initial state was moved off the angle-coordinate pole.
    PoleShifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedWarning<T> {
    pub t: T,
    pub kind: WarningKind,
}

/// Everything needed for one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    pub params: SystemParams<T>,
    pub envelope: Envelope<T>,
    pub formulation: Formulation,
    pub initial: InitialState<T>,
    pub t_end: T,
    pub dt: T,
    pub sample_stride: usize,
}

impl<T: Real> Scenario<T> {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_STRIDE: usize = 10;
    /// Window length for constant envelopes, in `1/|k|`.
    pub const DEFAULT_CONSTANT_WINDOW: f64 = 50.0;
    /// Window length for tanh envelopes, in rise times.
    pub const DEFAULT_TANH_WINDOWS: f64 = 15.0;

    /// Amplitude formulation starting in the left dot, with default step,
    /// stride and window.
    pub fn new(params: SystemParams<T>, envelope: Envelope<T>) -> Self {
        Self {
            params,
            envelope,
            formulation: Formulation::Amplitude,
            initial: InitialState::LeftDot,
            t_end: Self::default_t_end(&envelope),
            dt: T::lit(Self::DEFAULT_DT),
            sample_stride: Self::DEFAULT_STRIDE,
        }
    }

    pub fn default_t_end(envelope: &Envelope<T>) -> T {
        match *envelope {
            Envelope::Constant => T::lit(Self::DEFAULT_CONSTANT_WINDOW),
            Envelope::TanhRise { tau } => T::lit(Self::DEFAULT_TANH_WINDOWS) * tau,
        }
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn with_initial(mut self, initial: InitialState<T>) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_t_end(mut self, t_end: T) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.envelope.validate()?;
        if !(self.t_end > T::zero() && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter("t_end must be > 0".into()));
        }
        if !(self.dt > T::zero() && self.dt <= self.t_end) {
            return Err(Error::InvalidParameter("dt must satisfy 0 < dt <= t_end".into()));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample_stride must be >= 1".into()));
        }
        if let InitialState::Custom(s) = self.initial {
            if !(s.alpha.is_finite() && s.phi.is_finite() && s.lambda.is_finite()) {
                return Err(Error::InvalidParameter("custom initial state must be finite".into()));
            }
        }
        Ok(())
    }

    /// Number of RK4 steps, `ceil(t_end / dt)` up to rounding noise.
    pub fn step_count(&self) -> usize {
        let ratio = self.t_end / self.dt;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) { nearest } else { ratio.ceil() };
        n.to_usize().unwrap_or(usize::MAX).max(1)
    }

    /// Time at the end of step `i`; the last step lands exactly on `t_end`.
    fn time_at(&self, i: usize, n: usize) -> T {
        if i >= n {
            self.t_end
        } else {
            T::from(i).unwrap() * self.dt
        }
    }

    /// Initial amplitudes for the amplitude formulation.
    pub fn initial_amplitudes(&self) -> AmplitudeState<T> {
        match self.initial {
            InitialState::LeftDot => AmplitudeState::left_dot(),
            InitialState::RightDot => AmplitudeState::right_dot(),
            InitialState::Custom(s) => amplitudes_from_angles(&s),
        }
    }

    /// Initial coordinates for the angle formulation and whether they had to
    /// be moved off a pole.
    ///
    /// A shifted state also takes the relative phase that a localized electron
    /// acquires as it starts to tunnel (`a_R ≈ -i k t a_L` near `alpha = 0`),
    /// which is the attracting branch of the `phi` equation.
    pub fn initial_angles(&self) -> (AngleState<T>, bool) {
        let state = match self.initial {
            InitialState::LeftDot => AngleState::new(T::zero(), T::zero()),
            InitialState::RightDot => AngleState::new(T::FRAC_PI_2(), T::zero()),
            InitialState::Custom(s) => s.canonical(),
        };
        if !state.near_pole(T::lit(POLE_EPSILON)) {
            return (state, false);
        }
        let sign = self.params.k.signum();
        let shift = T::lit(POLE_SHIFT);
        let shifted = if state.alpha < T::FRAC_PI_4() {
            AngleState { alpha: shift, phi: -sign * T::FRAC_PI_2(), lambda: state.lambda }
        } else {
            AngleState { alpha: T::FRAC_PI_2() - shift, phi: sign * T::FRAC_PI_2(), lambda: state.lambda }
        };
        (shifted, true)
    }
}

/// Sampled time series of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub formulation: Formulation,
    pub times: Vec<T>,
    pub p_left: Vec<T>,
    pub p_right: Vec<T>,
    /// Canonical `alpha ∈ [0, pi/2]`.
    pub alpha: Vec<T>,
    /// Relative phase wrapped to `(-pi, pi]`.
    pub phi: Vec<T>,
    /// For the angle formulation these carry the initial `lambda` as gauge.
    pub amplitudes: Vec<AmplitudeState<T>>,
    pub warnings: Vec<TimedWarning<T>>,
    /// Largest `| |a_L|^2 + |a_R|^2 - 1 |` seen at any step.
    pub norm_drift: T,
    pub steps: usize,
    pub rhs_evals: u64,
}

impl<T: Real> Trajectory<T> {
    fn with_capacity(formulation: Formulation, n: usize) -> Self {
        Self {
            formulation,
            times: Vec::with_capacity(n),
            p_left: Vec::with_capacity(n),
            p_right: Vec::with_capacity(n),
            alpha: Vec::with_capacity(n),
            phi: Vec::with_capacity(n),
            amplitudes: Vec::with_capacity(n),
            warnings: Vec::new(),
            norm_drift: T::zero(),
            steps: 0,
            rhs_evals: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_amplitudes(&self) -> Option<&AmplitudeState<T>> {
        self.amplitudes.last()
    }

    pub fn has_warning(&self, kind: WarningKind) -> bool {
        self.warnings.iter().any(|w| w.kind == kind)
    }

    fn push(&mut self, t: T, p_left: T, p_right: T, angles: AngleState<T>, amps: AmplitudeState<T>) {
        self.times.push(t);
        self.p_left.push(p_left);
        self.p_right.push(p_right);
        self.alpha.push(angles.alpha);
        self.phi.push(angles.phi);
        self.amplitudes.push(amps);
    }
}

/// Propagates a scenario from `t = 0` to `t_end`.
///
/// The amplitude formulation is never renormalized; its drift is reported in
/// [`Trajectory::norm_drift`] and the recorded probabilities are divided by
/// the current norm.
pub fn integrate<T: Real>(scenario: &Scenario<T>) -> Result<Trajectory<T>> {
    scenario.validate()?;
    match scenario.formulation {
        Formulation::Amplitude => integrate_amplitudes(scenario),
        Formulation::Angle => integrate_angles(scenario),
    }
}

fn is_sample(i: usize, n: usize, stride: usize) -> bool {
    i.is_multiple_of(stride) || i == n
}

fn integrate_amplitudes<T: Real>(sc: &Scenario<T>) -> Result<Trajectory<T>> {
    let n = sc.step_count();
    let mut traj = Trajectory::with_capacity(Formulation::Amplitude, n / sc.sample_stride + 2);
    let params = sc.params;
    let env = sc.envelope;

    let record = |traj: &mut Trajectory<T>, t: T, y: &[Complex<T>; 2]| {
        let amps = AmplitudeState::new(y[0], y[1]);
        let norm = amps.norm_sqr();
        let mut angles = angles_unchecked(&amps);
        angles.phi = wrap_angle(angles.phi);
        traj.push(t, amps.p_left() / norm, amps.p_right() / norm, angles, amps);
    };

    let init = sc.initial_amplitudes();
    let mut y = [init.left, init.right];
    traj.norm_drift = (init.norm_sqr() - T::one()).abs();
    record(&mut traj, T::zero(), &y);

    let mut evals = 0u64;
    let mut rhs = |s: &[Complex<T>; 2], t: T| -> Result<[Complex<T>; 2]> {
        evals += 1;
        let drive = eval_drive(&params, &env, t)?;
        let d = amplitude_rate(&AmplitudeState::new(s[0], s[1]), drive, &params);
        Ok([d.d_left, d.d_right])
    };
    for i in 1..=n {
        let t0 = sc.time_at(i - 1, n);
        let t1 = sc.time_at(i, n);
        y = rk4_step(&mut rhs, &y, t0, t1 - t0)?;
        let drift = (y[0].norm_sqr() + y[1].norm_sqr() - T::one()).abs();
        if drift > traj.norm_drift {
            traj.norm_drift = drift;
        }
        if is_sample(i, n, sc.sample_stride) {
            record(&mut traj, t1, &y);
        }
    }
    traj.steps = n;
    traj.rhs_evals = evals;
    Ok(traj)
}

fn integrate_angles<T: Real>(sc: &Scenario<T>) -> Result<Trajectory<T>> {
    let n = sc.step_count();
    let mut traj = Trajectory::with_capacity(Formulation::Angle, n / sc.sample_stride + 2);
    let params = sc.params;
    let env = sc.envelope;
    let eps = T::lit(POLE_EPSILON);

    let (init, shifted) = sc.initial_angles();
    if shifted {
        traj.warnings.push(TimedWarning { t: T::zero(), kind: WarningKind::PoleShifted });
    }
    let lambda = init.lambda;
    let record = |traj: &mut Trajectory<T>, t: T, y: &[T; 2]| {
        let state = AngleState { alpha: y[0], phi: y[1], lambda }.canonical();
        let amps = amplitudes_from_angles(&state);
        let (p_left, p_right) = (state.p_left(), state.p_right());
        let drift = (p_left + p_right - T::one()).abs();
        if drift > traj.norm_drift {
            traj.norm_drift = drift;
        }
        traj.push(t, p_left, p_right, state, amps);
    };

    let mut y = [init.alpha, init.phi];
    record(&mut traj, T::zero(), &y);

    let mut evals = 0u64;
    let clamped = Cell::new(false);
    let mut rhs = |s: &[T; 2], t: T| -> Result<[T; 2]> {
        evals += 1;
        let drive = eval_drive(&params, &env, t)?;
        let d = angle_rate(s[0], s[1], drive, &params, eps);
        clamped.set(clamped.get() | d.pole_clamped);
        Ok([d.d_alpha, d.d_phi])
    };
    for i in 1..=n {
        let t0 = sc.time_at(i - 1, n);
        let t1 = sc.time_at(i, n);
        y = rk4_step(&mut rhs, &y, t0, t1 - t0)?;
        if clamped.replace(false) {
            traj.warnings.push(TimedWarning { t: t0, kind: WarningKind::PoleClamped });
        }
        if is_sample(i, n, sc.sample_stride) {
            record(&mut traj, t1, &y);
        }
    }
    traj.steps = n;
    traj.rhs_evals = evals;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rhs_amplitudes;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn free(omega_coulomb: f64) -> SystemParams<f64> {
        SystemParams::new(omega_coulomb, 0.0).unwrap()
    }

    #[test]
    fn zero_rhs_leaves_state_unchanged() {
        let y = [1.5f64, -0.25, 3.0];
        let next = rk4_step(|_: &[f64; 3], _| Ok([0.0; 3]), &y, 0.0, 0.1).unwrap();
        assert_eq!(next, y);
    }

    #[test]
    fn exponential_growth_matches_taylor_polynomial() {
        let y = rk4_step(|y: &f64, _| Ok(*y), &1.0f64, 0.0, 0.1).unwrap();
        // RK4 reproduces the degree-4 Taylor polynomial of e^h for y' = y.
        let h: f64 = 0.1;
        let taylor = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((y - taylor).abs() < 1e-15);
        assert!((y - h.exp()).abs() < 1e-7);
    }

    #[test]
    fn single_rabi_step_matches_closed_form() {
        let p = free(0.0);
        let env = Envelope::Constant;
        let rhs = |s: &[Complex<f64>; 2], t: f64| {
            let d = rhs_amplitudes(&AmplitudeState::new(s[0], s[1]), t, &p, &env)?;
            Ok([d.d_left, d.d_right])
        };
        let y0 = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let y = rk4_step(rhs, &y0, 0.0, 1e-3).unwrap();
        assert!((y[0] - Complex::new(1e-3f64.cos(), 0.0)).norm() < 1e-12);
        assert!((y[1] - Complex::new(0.0, -(1e-3f64.sin()))).norm() < 1e-12);
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let r = rk4_step(|_: &f64, _| Ok(f64::NAN), &1.0, 0.0, 0.1);
        assert!(matches!(r, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn rabi_returns_to_left_dot_at_pi() {
        let sc = Scenario::new(free(0.0), Envelope::Constant).with_t_end(PI).with_dt(1e-3);
        let traj = integrate(&sc).unwrap();
        assert_eq!(*traj.times.last().unwrap(), PI);
        assert!((traj.p_left.last().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn single_step_window_records_two_samples() {
        for formulation in [Formulation::Amplitude, Formulation::Angle] {
            let sc = Scenario::new(SystemParams::new(1.9f64, 5.05).unwrap(), Envelope::Constant)
                .with_formulation(formulation)
                .with_initial(InitialState::Custom(AngleState::new(0.3, 0.2)))
                .with_t_end(1e-3)
                .with_dt(1e-3);
            let traj = integrate(&sc).unwrap();
            assert_eq!(traj.len(), 2);
            assert_eq!(traj.times, vec![0.0, 1e-3]);
            assert!((traj.alpha[0] - 0.3).abs() < 1e-15);
            assert!((traj.phi[0] - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn step_count_is_ceiling() {
        let sc = Scenario::new(free(0.0), Envelope::Constant).with_t_end(50.0).with_dt(1e-3);
        assert_eq!(sc.step_count(), 50_000);
        let sc = sc.with_t_end(0.0105);
        assert_eq!(sc.step_count(), 11);
        let traj = integrate(&sc.with_stride(4)).unwrap();
        assert_eq!(traj.times.len(), 4);
        assert_eq!(*traj.times.last().unwrap(), 0.0105);
        assert_eq!(traj.rhs_evals, 44);
    }

    #[test]
    fn localized_angle_start_is_shifted() {
        let sc = Scenario::new(free(0.0), Envelope::Constant).with_formulation(Formulation::Angle);
        let (s, shifted) = sc.initial_angles();
        assert!(shifted);
        assert_eq!(s.alpha, POLE_SHIFT);
        assert_eq!(s.phi, -FRAC_PI_2);

        let sc = sc.with_initial(InitialState::RightDot);
        let (s, shifted) = sc.initial_angles();
        assert!(shifted);
        assert!((s.alpha - (FRAC_PI_2 - POLE_SHIFT)).abs() < 1e-15);
        assert_eq!(s.phi, FRAC_PI_2);

        let sc = sc.with_initial(InitialState::Custom(AngleState::new(0.4, 0.1)));
        assert!(!sc.initial_angles().1);

        let traj = integrate(&sc.with_initial(InitialState::LeftDot).with_t_end(0.1)).unwrap();
        assert!(traj.has_warning(WarningKind::PoleShifted));
    }

    #[test]
    fn invalid_scenarios_rejected() {
        let base = Scenario::new(free(0.0), Envelope::Constant);
        assert!(integrate(&base.with_t_end(0.0)).is_err());
        assert!(integrate(&base.with_dt(0.0)).is_err());
        assert!(integrate(&base.with_t_end(1.0).with_dt(2.0)).is_err());
        assert!(integrate(&base.with_stride(0)).is_err());
    }

    #[test]
    fn default_windows() {
        let sc = Scenario::new(free(0.0), Envelope::Constant);
        assert_eq!(sc.t_end, 50.0);
        let sc = Scenario::new(free(0.0), Envelope::tanh_rise(2.0).unwrap());
        assert_eq!(sc.t_end, 30.0);
        assert_eq!(sc.dt, 1e-3);
        assert_eq!(sc.sample_stride, 10);
    }

    #[test]
    fn single_precision_integration_runs() {
        let p = SystemParams::<f32>::new(0.0, 0.0).unwrap();
        let sc = Scenario::new(p, Envelope::Constant).with_t_end(1.0).with_dt(1e-2);
        let traj = integrate(&sc).unwrap();
        let expected = 1.0f32.cos().powi(2);
        assert!((traj.p_left.last().unwrap() - expected).abs() < 1e-4);
    }
}

//! Localization metrics, cross-formulation checks, the effort benchmark and
//! parameter sweeps.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Envelope;
use crate::error::{Error, Result};
use crate::integrator::{integrate, Formulation, InitialState, Scenario, TimedWarning, Trajectory, WarningKind};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dot {
    Left,
    Right,
}

impl Dot {
    /// The dot the scenario's electron starts in (left for custom states).
    pub fn initially_occupied<T>(initial: &InitialState<T>) -> Self {
        match initial {
            InitialState::RightDot => Dot::Right,
            _ => Dot::Left,
        }
    }
}

/// Localization degree `1 - Var(p)` of one dot's probability series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport<T> {
    pub degree: T,
    pub variance: T,
    pub mean_p: T,
    pub window: (T, T),
    pub dot: Dot,
}

/// Population variance of the selected dot's probability samples inside
/// `window` (the whole trajectory when `None`), with uniform sample weights.
pub fn localization_degree<T: Real>(
    traj: &Trajectory<T>,
    dot: Dot,
    window: Option<(T, T)>,
) -> Result<LocalizationReport<T>> {
    let (first, last) = match (traj.times.first(), traj.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::EmptyTrajectory),
    };
    let (start, end) = window.unwrap_or((first, last));
    if !(start <= end && start >= T::zero() && end <= last) {
        return Err(Error::InvalidParameter(format!("window [{start}, {end}] is not inside [0, {last}]")));
    }
    let series = match dot {
        Dot::Left => &traj.p_left,
        Dot::Right => &traj.p_right,
    };
    let selected: Vec<T> =
        traj.times.iter().zip(series).filter(|(&t, _)| t >= start && t <= end).map(|(_, &p)| p).collect();
    if selected.len() < 2 {
        return Err(Error::EmptyWindow { start: start.as_f64(), end: end.as_f64() });
    }
    let n = T::from(selected.len()).unwrap();
    let mean = selected.iter().fold(T::zero(), |acc, &p| acc + p) / n;
    let variance = selected.iter().fold(T::zero(), |acc, &p| acc + (p - mean) * (p - mean)) / n;
    Ok(LocalizationReport { degree: T::one() - variance, variance, mean_p: mean, window: (start, end), dot })
}

/// Second half of the run, where a tanh-pulsed transfer has settled.
pub fn settled_window<T: Real>(traj: &Trajectory<T>) -> Option<(T, T)> {
    traj.times.last().map(|&end| (end * T::lit(0.5), end))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulationWarning<T> {
    pub formulation: Formulation,
    pub t: T,
    pub kind: WarningKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport<T> {
    /// `max |p_left(amplitude) - p_left(angle)|` over shared samples.
    pub max_abs_dp: T,
    pub at_time: T,
    pub warnings_merged: Vec<FormulationWarning<T>>,
}

impl<T: Real> DivergenceReport<T> {
    pub fn has_warning(&self, kind: WarningKind) -> bool {
        self.warnings_merged.iter().any(|w| w.kind == kind)
    }
}

fn tagged<T: Real>(traj: &Trajectory<T>) -> impl Iterator<Item = FormulationWarning<T>> + '_ {
    let formulation = traj.formulation;
    traj.warnings.iter().map(move |w: &TimedWarning<T>| FormulationWarning { formulation, t: w.t, kind: w.kind })
}

fn divergence<T: Real>(amp: &Trajectory<T>, ang: &Trajectory<T>) -> Result<DivergenceReport<T>> {
    if amp.times != ang.times {
        return Err(Error::InvalidParameter("trajectories are on different time grids".into()));
    }
    let mut max_abs_dp = T::zero();
    let mut at_time = amp.times.first().copied().unwrap_or_else(T::zero);
    for ((&t, &a), &b) in amp.times.iter().zip(&amp.p_left).zip(&ang.p_left) {
        let dp = (a - b).abs();
        if dp > max_abs_dp {
            max_abs_dp = dp;
            at_time = t;
        }
    }
    let mut warnings_merged: Vec<_> = tagged(amp).chain(tagged(ang)).collect();
    warnings_merged.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap_or(std::cmp::Ordering::Equal));
    Ok(DivergenceReport { max_abs_dp, at_time, warnings_merged })
}

/// Integrates the scenario in both formulations on the same time grid and
/// reports the largest disagreement in `p_left`.
pub fn compare_formulations<T: Real>(scenario: &Scenario<T>) -> Result<DivergenceReport<T>> {
    let amp = integrate(&scenario.with_formulation(Formulation::Amplitude))?;
    let ang = integrate(&scenario.with_formulation(Formulation::Angle))?;
    divergence(&amp, &ang)
}

/// Static count of elementary operations in one evaluation of each
/// right-hand side. Every `+ - * /`, every comparison and every
/// transcendental call (`cos`, `sin`, `tanh`) counts as one operation; sign
/// flips and multiplications by `i` are free.
pub mod flops {
    /// `F(t) = 0.5 * (r * w) * f * cos(w t + theta)` with `f = 1`.
    pub const DRIVE: &[(&str, u32)] = &[("w * t + theta", 2), ("cos", 1), ("0.5 * r * w * f", 3), ("* cos(...)", 1)];

    /// Complex amplitude pair, four real components.
    pub const AMPLITUDE: &[(&str, u32)] = &[
        ("|a_L|^2", 3),
        ("|a_R|^2", 3),
        ("Omega * (|a_R|^2 - |a_L|^2)", 2),
        ("G = F + ...", 1),
        ("-i k a_R", 2),
        ("i G a_L", 2),
        ("da_L sum (re, im)", 2),
        ("-i k a_L", 2),
        ("-i G a_R", 2),
        ("da_R sum (re, im)", 2),
    ];

    /// `(alpha, phi)`, two real components.
    pub const ANGLE: &[(&str, u32)] = &[
        ("2 alpha", 1),
        ("sin 2 alpha, cos 2 alpha", 2),
        ("pole test |sin 2 alpha| < eps", 2),
        ("cot = cos / sin", 1),
        ("sin phi, cos phi", 2),
        ("dalpha = -k sin phi", 1),
        ("2 F", 1),
        ("2 k cos phi cot", 3),
        ("2 Omega cos 2 alpha", 2),
        ("dphi sum", 2),
    ];

    pub fn total(table: &[(&str, u32)]) -> u32 {
        table.iter().map(|(_, n)| n).sum()
    }

    pub fn amplitude_rhs() -> u32 {
        total(DRIVE) + total(AMPLITUDE)
    }

    pub fn angle_rhs() -> u32 {
        total(DRIVE) + total(ANGLE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationBench {
    pub formulation: Formulation,
    pub real_ode_dimension: usize,
    pub rhs_flop_estimate: u32,
    pub steps: usize,
    pub rhs_eval_count: u64,
    /// Median over repeats, in seconds.
    pub wall_time_total: f64,
    pub wall_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub repeats: usize,
    pub amplitude: FormulationBench,
    pub angle: FormulationBench,
    /// Formulation with the smaller median wall time.
    pub faster: Formulation,
    pub divergence: DivergenceReport<f64>,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times both formulations on the calling thread and embeds the divergence
/// between the two trajectories.
pub fn bench_formulations<T: Real>(scenario: &Scenario<T>, repeats: usize) -> Result<BenchReport> {
    if repeats < 3 {
        return Err(Error::InvalidParameter("bench needs at least 3 repeats".into()));
    }
    let run = |formulation: Formulation| -> Result<(FormulationBench, Trajectory<T>)> {
        let sc = scenario.with_formulation(formulation);
        let mut times = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let start = Instant::now();
            let traj = integrate(&sc)?;
            times.push(start.elapsed().as_secs_f64());
            last = Some(traj);
        }
        let traj = last.expect("repeats >= 3");
        let mut sorted = times.clone();
        let bench = FormulationBench {
            formulation,
            real_ode_dimension: formulation.real_dimension(),
            rhs_flop_estimate: match formulation {
                Formulation::Amplitude => flops::amplitude_rhs(),
                Formulation::Angle => flops::angle_rhs(),
            },
            steps: traj.steps,
            rhs_eval_count: traj.rhs_evals,
            wall_time_total: median(&mut sorted),
            wall_times: times,
        };
        Ok((bench, traj))
    };
    let (amplitude, amp_traj) = run(Formulation::Amplitude)?;
    let (angle, ang_traj) = run(Formulation::Angle)?;
    let div = divergence(&amp_traj, &ang_traj)?;
    let divergence = DivergenceReport {
        max_abs_dp: div.max_abs_dp.as_f64(),
        at_time: div.at_time.as_f64(),
        warnings_merged: div
            .warnings_merged
            .iter()
            .map(|w| FormulationWarning { formulation: w.formulation, t: w.t.as_f64(), kind: w.kind })
            .collect(),
    };
    let faster =
        if angle.wall_time_total < amplitude.wall_time_total { Formulation::Angle } else { Formulation::Amplitude };
    Ok(BenchReport { repeats, amplitude, angle, faster, divergence })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    OmegaCoulomb,
    RabiRatio,
    Tau,
    OmegaDrive,
    Phase,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::OmegaCoulomb => "omega_coulomb",
            SweepParam::RabiRatio => "rabi_ratio",
            SweepParam::Tau => "tau",
            SweepParam::OmegaDrive => "omega_drive",
            SweepParam::Phase => "phase",
        }
    }

    /// Copy of `scenario` with this parameter set to `value`.
    pub fn apply<T: Real>(self, scenario: &Scenario<T>, value: T) -> Result<Scenario<T>> {
        let mut sc = *scenario;
        match self {
            SweepParam::OmegaCoulomb => sc.params.omega_coulomb = value,
            SweepParam::RabiRatio => sc.params.rabi_ratio = value,
            SweepParam::OmegaDrive => sc.params.omega_drive = value,
            SweepParam::Phase => sc.params.phase = value,
            SweepParam::Tau => match sc.envelope {
                Envelope::TanhRise { .. } => sc.envelope = Envelope::TanhRise { tau: value },
                Envelope::Constant => return Err(Error::InvalidParameter("a tau axis needs a tanh envelope".into())),
            },
        }
        sc.validate()?;
        Ok(sc)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_coulomb" => Ok(SweepParam::OmegaCoulomb),
            "rabi_ratio" => Ok(SweepParam::RabiRatio),
            "tau" => Ok(SweepParam::Tau),
            "omega_drive" => Ok(SweepParam::OmegaDrive),
            "phase" => Ok(SweepParam::Phase),
            other => Err(Error::UnknownAxisParameter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis<T> {
    pub param: SweepParam,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<T> {
    pub axes: Vec<SweepAxis<T>>,
    /// `degrees[i][j]` for value `i` of the first axis and `j` of the second
    /// (a single column for one axis).
    pub degrees: Vec<Vec<T>>,
    pub warning_counts: Vec<Vec<usize>>,
}

impl<T: Real> SweepResult<T> {
    pub fn cell_count(&self) -> usize {
        self.degrees.iter().map(Vec::len).sum()
    }

    /// `(axis values, degree, warnings)` for every cell in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<T>, T, usize)> + '_ {
        self.degrees.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().enumerate().map(move |(j, &deg)| {
                let mut coords = vec![self.axes[0].values[i]];
                if let Some(ax) = self.axes.get(1) {
                    coords.push(ax.values[j]);
                }
                (coords, deg, self.warning_counts[i][j])
            })
        })
    }
}

/// The scenario for grid cell `(i, j)`.
pub fn sweep_cell<T: Real>(base: &Scenario<T>, axes: &[SweepAxis<T>], i: usize, j: usize) -> Result<Scenario<T>> {
    let sc = axes[0].param.apply(base, axes[0].values[i])?;
    match axes.get(1) {
        Some(ax) => ax.param.apply(&sc, ax.values[j]),
        None => Ok(sc),
    }
}

/// Runs `integrate` + [`localization_degree`] over a 1- or 2-axis grid.
///
/// Cells are independent and evaluated on the rayon pool of the caller.
pub fn sweep<T: Real>(base: &Scenario<T>, axes: &[SweepAxis<T>], window: Option<(T, T)>) -> Result<SweepResult<T>> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidParameter("a sweep takes one or two axes".into()));
    }
    if axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::InvalidParameter("sweep axes must be nonempty".into()));
    }
    let rows = axes[0].values.len();
    let cols = axes.get(1).map_or(1, |a| a.values.len());
    let dot = Dot::initially_occupied(&base.initial);

    let cells: Vec<(T, usize)> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let sc = sweep_cell(base, axes, idx / cols, idx % cols)?;
            let traj = integrate(&sc)?;
            let report = localization_degree(&traj, dot, window)?;
            Ok((report.degree, traj.warnings.len()))
        })
        .collect::<Result<_>>()?;

    let degrees = cells.chunks(cols).map(|row| row.iter().map(|c| c.0).collect()).collect();
    let warning_counts = cells.chunks(cols).map(|row| row.iter().map(|c| c.1).collect()).collect();
    Ok(SweepResult { axes: axes.to_vec(), degrees, warning_counts })
}

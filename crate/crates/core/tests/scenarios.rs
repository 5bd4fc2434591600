mod common;

use dotsim_core::analysis::{settled_window, sweep_cell};
use dotsim_core::{
    bench_formulations, cell_from_trajectory, compare_formulations, integrate, localization_degree, polarization,
    sweep, AngleState, Dot, Error, Formulation, InitialState, SweepAxis, SweepParam, Trajectory, WarningKind,
};
use std::f64::consts::FRAC_PI_4;

fn check_trajectory_invariants(traj: &Trajectory) {
    let n = traj.times.len();
    assert!(n >= 2);
    for series in [&traj.p_left, &traj.p_right, &traj.alpha, &traj.phi] {
        assert_eq!(series.len(), n);
    }
    assert_eq!(traj.amplitudes.len(), n);
    assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    for (&l, &r) in traj.p_left.iter().zip(&traj.p_right) {
        assert!((-1e-9..=1.0 + 1e-9).contains(&l));
        assert!((-1e-9..=1.0 + 1e-9).contains(&r));
        assert!((l + r - 1.0).abs() < 1e-9);
    }
}

#[test]
fn trajectories_satisfy_invariants() {
    for sc in [common::fig2(), common::fig5(), common::fig7()] {
        for f in [Formulation::Amplitude, Formulation::Angle] {
            check_trajectory_invariants(&integrate(&sc.with_formulation(f)).unwrap());
        }
    }
}

#[test]
fn integration_is_deterministic() {
    for f in [Formulation::Amplitude, Formulation::Angle] {
        let sc = common::fig3().with_formulation(f).with_t_end(5.0);
        let a = integrate(&sc).unwrap();
        let b = integrate(&sc).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn rabi_matches_closed_form_over_ten_periods() {
    let traj = integrate(&common::free_rabi().with_t_end(10.0).with_stride(1)).unwrap();
    for (t, p) in traj.times.iter().zip(&traj.p_left) {
        assert!((p - t.cos().powi(2)).abs() < 1e-6);
    }
}

#[test]
fn rk4_norm_drift_is_fourth_order() {
    let sc = common::fig2().with_t_end(10.0);
    let coarse = integrate(&sc.with_dt(1e-3)).unwrap().norm_drift;
    let fine = integrate(&sc.with_dt(5e-4)).unwrap().norm_drift;
    assert!(fine * 8.0 <= coarse, "coarse {coarse:e}, fine {fine:e}");
}

#[test]
fn pole_adjacent_comparison() {
    let report = compare_formulations(&common::free_rabi().with_t_end(10.0)).unwrap();
    assert!(report.max_abs_dp <= 1e-5);
    assert!(report.has_warning(WarningKind::PoleShifted));
}

#[test]
fn divergence_shrinks_with_step() {
    let sc = common::fig2_superposition().with_t_end(20.0);
    let dps: Vec<f64> =
        [1e-2, 1e-3, 1e-4].iter().map(|&dt| compare_formulations(&sc.with_dt(dt)).unwrap().max_abs_dp).collect();
    assert!(dps[1] <= dps[0] && dps[2] <= dps[1], "{dps:?}");
}

#[test]
fn bench_counts_rhs_evaluations() {
    let sc = common::fig2_superposition().with_t_end(2.0).with_dt(3e-3);
    let report = bench_formulations(&sc, 3).unwrap();
    let steps = (2.0f64 / 3e-3).ceil() as u64;
    for b in [&report.amplitude, &report.angle] {
        assert_eq!(b.rhs_eval_count, 4 * steps);
        assert_eq!(b.steps as u64, steps);
        assert_eq!(b.wall_times.len(), 3);
    }
    assert_eq!(report.amplitude.real_ode_dimension, 4);
    assert_eq!(report.angle.real_ode_dimension, 2);
    let faster = if report.angle.wall_time_total < report.amplitude.wall_time_total {
        Formulation::Angle
    } else {
        Formulation::Amplitude
    };
    assert_eq!(report.faster, faster);
}

#[test]
fn single_cell_sweep_matches_direct_run() {
    let base = common::fig2().with_t_end(10.0);
    let axes = [SweepAxis { param: SweepParam::OmegaCoulomb, values: vec![1.9] }];
    let result = sweep(&base, &axes, None).unwrap();
    let direct = localization_degree(&integrate(&base).unwrap(), Dot::Left, None).unwrap();
    assert_eq!(result.degrees, vec![vec![direct.degree]]);
}

#[test]
fn charging_sweep_orders_figs_2_and_3() {
    let axes = [SweepAxis { param: SweepParam::OmegaCoulomb, values: vec![0.9, 1.9] }];
    let result = sweep(&common::fig2(), &axes, None).unwrap();
    assert!(result.degrees[1][0] > result.degrees[0][0]);

    let axes = [SweepAxis { param: SweepParam::OmegaCoulomb, values: vec![0.17, 0.6] }];
    let result = sweep(&common::fig2(), &axes, None).unwrap();
    for row in &result.degrees {
        assert!(row[0].is_finite() && (0.75..=1.0).contains(&row[0]));
    }
}

#[test]
fn two_axis_sweep_cells_are_independent() {
    let base = common::fig5().with_t_end(6.0);
    let axes = [
        SweepAxis { param: SweepParam::RabiRatio, values: vec![2.0, 2.4] },
        SweepAxis { param: SweepParam::Tau, values: vec![1.0, 2.0, 3.0] },
    ];
    let result = sweep(&base, &axes, None).unwrap();
    assert_eq!(result.cell_count(), 6);
    assert_eq!(result.cells().count(), 6);
    for i in 0..2 {
        for j in 0..3 {
            let sc = sweep_cell(&base, &axes, i, j).unwrap();
            assert_eq!(sc.params.rabi_ratio, axes[0].values[i]);
            let direct = localization_degree(&integrate(&sc).unwrap(), Dot::Right, None).unwrap();
            assert_eq!(result.degrees[i][j], direct.degree);
        }
    }
}

#[test]
fn sweep_rejects_bad_axes() {
    assert!(matches!("charge".parse::<SweepParam>(), Err(Error::UnknownAxisParameter(_))));
    let axes = [SweepAxis { param: SweepParam::Phase, values: vec![] }];
    assert!(sweep(&common::fig2(), &axes, None).is_err());
    assert!(sweep(&common::fig2(), &[], None).is_err());
}

#[test]
fn transfer_leaves_electron_in_left_dot() {
    let traj = integrate(&common::fig5()).unwrap();
    let cell = cell_from_trajectory(&traj, 1.0, 1.0).unwrap();
    assert!(cell.bottom.norm_sqr() >= 0.9, "{}", cell.bottom.norm_sqr());

    let angle = integrate(&common::fig5().with_formulation(Formulation::Angle)).unwrap();
    let settled = localization_degree(&angle, Dot::Left, settled_window(&angle)).unwrap();
    assert!(settled.mean_p >= 0.85);
}

#[test]
fn cell_mapping_from_trajectory() {
    let right = integrate(&common::free_rabi().with_initial(InitialState::RightDot).with_t_end(1e-3)).unwrap();
    let mut traj = right.clone();
    traj.amplitudes.truncate(1);
    let cell = cell_from_trajectory(&traj, 1.0, 1.0).unwrap();
    assert_eq!(cell.top.norm_sqr(), 1.0);

    let even = integrate(
        &common::free_rabi().with_initial(InitialState::Custom(AngleState::new(FRAC_PI_4, 0.0))).with_t_end(1e-3),
    )
    .unwrap();
    let mut traj = even;
    traj.amplitudes.truncate(1);
    for eta in [0.0, 0.5, 1.0] {
        let cell = cell_from_trajectory(&traj, eta, 1.0).unwrap();
        assert!((cell.top.norm_sqr() - 0.5).abs() < 1e-15);
        assert!(polarization(&cell).abs() < 1e-15);
    }

    traj.amplitudes.clear();
    assert!(matches!(cell_from_trajectory(&traj, 1.0, 1.0), Err(Error::EmptyTrajectory)));
}

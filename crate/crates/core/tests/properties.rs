use std::f64::consts::{FRAC_PI_2, PI};

use dotsim_core::dynamics::{eval_drive, rhs_amplitudes};
use dotsim_core::qca::{cell_ket, majority, polarization};
use dotsim_core::{
    amplitudes_from_angles, angles_from_amplitudes, localization_degree, AmplitudeState, AngleState, Complex, Dot,
    Envelope, Formulation, QcaCellState, SystemParams, Trajectory,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (0.1f64..3.0, prop::bool::ANY, 0.0f64..3.0, 0.5f64..20.0, 0.0f64..6.0, -PI..PI).prop_map(
        |(k, neg, omega_coulomb, omega_drive, rabi_ratio, phase)| SystemParams {
            k: if neg { -k } else { k },
            omega_coulomb,
            omega_drive,
            rabi_ratio,
            phase,
        },
    )
}

fn envelope() -> impl Strategy<Value = Envelope> {
    prop_oneof![Just(Envelope::Constant), (0.1f64..10.0).prop_map(|tau| Envelope::TanhRise { tau })]
}

fn amplitudes() -> impl Strategy<Value = AmplitudeState> {
    (0.0f64..FRAC_PI_2, -PI..PI, -PI..PI).prop_map(|(theta, pl, pr)| {
        AmplitudeState::new(Complex::from_polar(theta.cos(), pl), Complex::from_polar(theta.sin(), pr))
    })
}

fn p_series(p_left: Vec<f64>) -> Trajectory {
    let n = p_left.len();
    Trajectory {
        formulation: Formulation::Amplitude,
        times: (0..n).map(|i| i as f64).collect(),
        p_right: p_left.iter().map(|p| 1.0 - p).collect(),
        p_left,
        alpha: vec![0.0; n],
        phi: vec![0.0; n],
        amplitudes: Vec::new(),
        warnings: Vec::new(),
        norm_drift: 0.0,
        steps: 0,
        rhs_evals: 0,
    }
}

proptest! {
    #[test]
    fn amplitude_flow_preserves_norm(s in amplitudes(), p in params(), env in envelope(), t in 0.0f64..100.0) {
        let d = rhs_amplitudes(&s, t, &p, &env).unwrap();
        let rate = (s.left.conj() * d.d_left + s.right.conj() * d.d_right).re;
        prop_assert!(rate.abs() < 1e-12);
    }

    #[test]
    fn angle_round_trip(alpha in 1e-6f64..(FRAC_PI_2 - 1e-6), phi in -PI..PI, lambda in -PI..PI) {
        let s = AngleState::new(alpha, phi).with_lambda(lambda);
        let back = angles_from_amplitudes(&amplitudes_from_angles(&s)).unwrap();
        prop_assert!((back.alpha - alpha).abs() < 1e-12);
        let dphi = (back.phi - phi).rem_euclid(2.0 * PI);
        let dlambda = (back.lambda - lambda).rem_euclid(2.0 * PI);
        prop_assert!(dphi.min(2.0 * PI - dphi) < 1e-12);
        prop_assert!(dlambda.min(2.0 * PI - dlambda) < 1e-12);
    }

    #[test]
    fn probabilities_follow_alpha(alpha in -10.0f64..10.0, phi in -PI..PI, lambda in -PI..PI) {
        let s = AngleState::new(alpha, phi).with_lambda(lambda);
        let a = amplitudes_from_angles(&s);
        prop_assert!((a.p_left() - alpha.cos().powi(2)).abs() < 1e-15);
        prop_assert!((a.p_right() - alpha.sin().powi(2)).abs() < 1e-15);
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn drive_is_bounded(p in params(), env in envelope(), t in 0.0f64..1e3) {
        prop_assert!(eval_drive(&p, &env, t).unwrap().abs() <= p.drive_bound());
    }

    #[test]
    fn degree_is_bounded_and_dot_symmetric(p in prop::collection::vec(0.0f64..=1.0, 2..200)) {
        let traj = p_series(p);
        let left = localization_degree(&traj, Dot::Left, None).unwrap();
        let right = localization_degree(&traj, Dot::Right, None).unwrap();
        prop_assert!(left.degree >= 0.75 && left.degree <= 1.0);
        prop_assert!(left.variance >= 0.0);
        prop_assert!((left.degree - right.degree).abs() < 1e-12);
    }

    #[test]
    fn cell_ket_is_normalized(
        s in amplitudes(),
        eta in prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0],
        tau_d in 0.01f64..50.0,
    ) {
        let cell = QcaCellState::new(s.right, s.left, eta, tau_d).unwrap();
        prop_assert!((cell_ket(&cell).norm_sqr() - 1.0).abs() < 1e-9);
        let contrast = cell.top.norm_sqr() - cell.bottom.norm_sqr();
        let p = polarization(&cell);
        prop_assert!(p.abs() <= contrast.abs() + 1e-15);
        prop_assert!(p.abs() <= 1.0);
    }

    #[test]
    fn polarization_grows_with_coupling(theta in 0.0f64..(std::f64::consts::FRAC_PI_4 - 1e-3), e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0, tau_d in 0.01f64..10.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let top = Complex::new(theta.cos(), 0.0);
        let bottom = Complex::new(theta.sin(), 0.0);
        let p_lo = polarization(&QcaCellState::new(top, bottom, lo, tau_d).unwrap());
        let p_hi = polarization(&QcaCellState::new(top, bottom, hi, tau_d).unwrap());
        prop_assert!(p_lo <= p_hi);
    }

    #[test]
    fn majority_ignores_input_order(bits in prop::array::uniform3(prop::bool::ANY)) {
        let p = bits.map(|b| if b { -1.0 } else { 1.0 });
        let reference = majority(p[0], p[1], p[2], 0.05).unwrap();
        for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            prop_assert_eq!(majority(p[perm[0]], p[perm[1]], p[perm[2]], 0.05).unwrap(), reference);
        }
    }
}

#[test]
fn majority_with_fixed_input_is_and_or() {
    let pol = |b: bool| if b { -1.0 } else { 1.0 };
    for a in [false, true] {
        for b in [false, true] {
            assert_eq!(majority(pol(a), pol(b), pol(false), 0.05).unwrap(), pol(a && b));
            assert_eq!(majority(pol(a), pol(b), pol(true), 0.05).unwrap(), pol(a || b));
        }
    }
}

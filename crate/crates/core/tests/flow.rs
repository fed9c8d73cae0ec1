use approx::assert_relative_eq;
use invsq::flow::{s_cot_s, zero_energy_logderiv};
use invsq::{
    flow_delta_shell, flow_point, flow_rhs_square_well, flow_square_well, flow_trajectory, Coupling, Cutoff, Error,
    Extension, Scheme,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn setup(nu: f64, c: f64, ratio: f64) -> (Coupling, Extension, Cutoff) {
    let cp = Coupling::from_nu(nu).unwrap();
    let ext = Extension::new(c, 1.0).unwrap();
    let cut = Cutoff::from_ratio(ratio, &ext).unwrap();
    (cp, ext, cut)
}

#[test]
fn square_well_rhs_examples() {
    let (cp, ext, cut) = setup(0.5, 1.0, 0.1);
    assert_relative_eq!(flow_rhs_square_well(&cp, &ext, &cut).unwrap(), -1.0 / 9.0, max_relative = 1e-14);
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-12);
    assert!(flow_rhs_square_well(&cp, &ext, &cut).unwrap().abs() < 1e-11);
    let (cp, ext, cut) = setup(0.0, 1.0, (-2.0f64).exp());
    assert_relative_eq!(flow_rhs_square_well(&cp, &ext, &cut).unwrap(), -0.5, max_relative = 1e-14);
}

#[test]
fn square_well_principal_value_at_zero_rhs() {
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-14);
    let fp = flow_square_well(&cp, &ext, &cut).unwrap();
    assert_eq!(fp.branch_index, 0);
    assert_relative_eq!(fp.lambda, 2.467_401_100_272_339_7, max_relative = 1e-12);
}

#[test]
fn square_well_lambda_vanishes_as_rhs_tends_to_one() {
    // at ν = 1/2 the rhs is p/(p - c), below one for c < 0
    let (cp, ext, cut) = setup(0.5, -1e-3, 1e6);
    let rhs = flow_rhs_square_well(&cp, &ext, &cut).unwrap();
    assert!(rhs < 1.0 && rhs > 1.0 - 1e-8);
    let fp = flow_square_well(&cp, &ext, &cut).unwrap();
    assert_eq!(fp.branch_index, 0);
    assert!(fp.lambda > 0.0 && fp.lambda < 1e-7);
}

#[test]
fn square_well_switches_branch_past_pole() {
    let (cp, ext, cut) = setup(0.0, 1.0, (-1.0f64).exp() * (1.0 + 1e-6));
    let fp = flow_square_well(&cp, &ext, &cut).unwrap();
    assert_eq!(fp.branch_index, 1);
    assert!(fp.lambda > PI * PI && fp.lambda < 4.0 * PI * PI);
    let rhs = flow_rhs_square_well(&cp, &ext, &cut).unwrap();
    let s = fp.lambda.sqrt();
    assert!(((s_cot_s(s) - rhs) / rhs).abs() < 1e-9);
}

#[test]
fn delta_shell_examples() {
    let (cp, ext, cut) = setup(0.5, 1.0, 0.1);
    assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 10.0 / 9.0, max_relative = 1e-14);
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-14);
    assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 1.0, max_relative = 1e-13);
    let (cp, ext, cut) = setup(0.0, 2.0, (-1.0f64).exp());
    assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 2.5, max_relative = 1e-14);
    let (cp, ext, cut) = setup(0.75, 1.0, 0.01);
    let expected = (-0.25 * 0.001 - 1.25) / (0.001 - 1.0);
    assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, expected, max_relative = 1e-12);
    assert!((expected - 1.2515).abs() < 1e-4);
}

#[test]
fn delta_shell_negative_lambda_returned_as_is() {
    // p > c pushes the shell repulsive: λ = (0 - 0.01)/(0.5 - 0.01) at ν = 1/2... is negative
    let (cp, ext, cut) = setup(0.5, 0.01, 0.5);
    let lambda = flow_delta_shell(&cp, &ext, &cut).unwrap().lambda;
    assert!(lambda < 0.0);
    assert_relative_eq!(lambda, -0.01 / 0.49, max_relative = 1e-14);
}

#[test]
fn pole_is_a_structured_error() {
    let (cp, ext, cut) = setup(0.5, 0.5, 0.5);
    for scheme in Scheme::ALL {
        match flow_point(scheme, &cp, &ext, &cut) {
            Err(Error::FlowPole { ratio, critical_ratio }) => {
                assert_eq!(ratio, 0.5);
                assert_relative_eq!(critical_ratio, 0.5, max_relative = 1e-15);
            }
            other => panic!("{scheme}: {other:?}"),
        }
    }
    let (cp, ext, cut) = setup(0.0, 1.0, (-1.0f64).exp());
    match flow_point(Scheme::DeltaShell, &cp, &ext, &cut) {
        Err(Error::FlowPole { critical_ratio, .. }) => assert_relative_eq!(critical_ratio, (-1.0f64).exp()),
        // ln(e⁻¹) may round off the exact pole; then λ is merely huge
        Ok(fp) => assert!(fp.lambda.abs() > 1e14),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn trajectory_examples() {
    let cp = Coupling::from_nu(0.5).unwrap();
    let ext = Extension::new(1.0, 1.0).unwrap();
    let grid = [0.1, 0.2].map(|x| Cutoff::from_ratio(x, &ext).unwrap());
    let traj = flow_trajectory(Scheme::DeltaShell, &cp, &ext, &grid).unwrap();
    assert_relative_eq!(traj[0].as_ref().unwrap().lambda, 10.0 / 9.0, max_relative = 1e-14);
    assert_relative_eq!(traj[1].as_ref().unwrap().lambda, 10.0 / 8.0, max_relative = 1e-14);

    let ext = Extension::new(0.5, 1.0).unwrap();
    let grid = [0.1, 0.5, 0.9].map(|x| Cutoff::from_ratio(x, &ext).unwrap());
    let traj = flow_trajectory(Scheme::SquareWell, &cp, &ext, &grid).unwrap();
    assert!(traj[0].is_ok() && traj[2].is_ok());
    assert!(matches!(traj[1], Err(Error::FlowPole { .. })));
}

#[test]
fn trajectory_grid_validation() {
    let cp = Coupling::from_nu(0.5).unwrap();
    let ext = Extension::new(1.0, 1.0).unwrap();
    assert!(matches!(flow_trajectory(Scheme::DeltaShell, &cp, &ext, &[]), Err(Error::Usage(_))));
    let grid = [0.2, 0.1].map(|x| Cutoff::from_ratio(x, &ext).unwrap());
    assert!(matches!(flow_trajectory(Scheme::DeltaShell, &cp, &ext, &grid), Err(Error::Usage(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Both regulators reproduce the same exterior `r u₀'/u₀` at `R⁺`: the
    /// square-well interior through `√λ cot √λ`, the δ shell through the
    /// linear interior (`r u'/u = 1`) minus the jump `λ`.
    #[test]
    fn schemes_share_exterior_logderiv(
        nu in 0.0f64..0.999,
        c in 0.05f64..10.0,
        log_ratio in (1e-6f64).ln()..(0.5f64).ln(),
    ) {
        let (cp, ext, cut) = setup(nu, c, log_ratio.exp());
        let target = match zero_energy_logderiv(&cp, &ext, &cut) {
            Ok(t) => t,
            Err(_) => return Ok(()),
        };
        prop_assume!(target.abs() < 1e3);
        let sw = flow_square_well(&cp, &ext, &cut).unwrap();
        let ds = flow_delta_shell(&cp, &ext, &cut).unwrap();
        prop_assert!((1.0 - ds.lambda - target).abs() < 1e-10 * target.abs().max(1.0));
        let residual = s_cot_s(sw.lambda.sqrt()) - target;
        prop_assert!(residual.abs() < 1e-10 * target.abs().max(1.0), "residual {residual}");
    }

    #[test]
    fn square_well_root_is_tight(
        nu in 0.0f64..0.999,
        c in 0.1f64..10.0,
        log_ratio in (1e-6f64).ln()..(1e-2f64).ln(),
    ) {
        let (cp, ext, cut) = setup(nu, c, log_ratio.exp());
        let rhs = flow_rhs_square_well(&cp, &ext, &cut).unwrap();
        let fp = flow_square_well(&cp, &ext, &cut).unwrap();
        let s = fp.lambda.sqrt();
        prop_assert!(fp.lambda > 0.0);
        prop_assert!((s_cot_s(s) - rhs).abs() < 1e-12 * rhs.abs().max(1.0).powi(2));
        for n in 1..=2 {
            let pole = (n as f64 * PI).powi(2);
            prop_assert!((fp.lambda - pole).abs() > 1e-9);
        }
    }

    /// For small ν the extension `c_ν = 1 - 2ν/c` gives the exterior
    /// `x^ν - c_ν x^{-ν} ≈ (2ν/c)(1 + c ln x)`, the critical form with constant `c`.
    #[test]
    fn delta_shell_critical_continuity(
        c in 0.5f64..2.0,
        log_ratio in (1e-4f64).ln()..(0.5f64).ln(),
    ) {
        let ratio = log_ratio.exp();
        // keep clear of the pole at R/r0 = e^{-1/c}
        prop_assume!((1.0 + c * ratio.ln()).abs() > 0.05);
        let nu = 1e-6;
        let (near, ext, cut) = setup(nu, 1.0 - 2.0 * nu / c, ratio);
        let (critical, ext0, cut0) = setup(0.0, c, ratio);
        let a = flow_delta_shell(&near, &ext, &cut).unwrap().lambda;
        let b = flow_delta_shell(&critical, &ext0, &cut0).unwrap().lambda;
        prop_assert!(((a - b) / b).abs() < 1e-4, "{a} vs {b}");
    }
}

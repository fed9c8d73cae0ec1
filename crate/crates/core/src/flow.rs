//! Renormalization-group trajectories `λ(R)`.
//!
//! For each cutoff the counterterm strength is tuned so that the zero-energy
//! exterior solution `(r/r0)^{1/2+ν} - c (r/r0)^{1/2-ν}` (or
//! `(r/r0)^{1/2} [1 + c ln(r/r0)]` at `ν = 0`) is reproduced outside `R`.
//! Both schemes share the exterior log-derivative `r u₀'/u₀` at `R⁺`:
//!
//! * square well: `√λ cot √λ` must equal it (solved numerically),
//! * δ shell: `λ = 1 - r u₀'/u₀` because the free interior has `r u'/u = 1`.

use crate::error::{Error, Result};
use crate::model::{Coupling, Cutoff, Extension, Scheme};
use crate::roots::{brent, Tolerance};
use std::f64::consts::PI;

/// Denominators closer to zero than this are treated as a flow pole.
const POLE_EPS: f64 = 1e-300;

/// A point `(R, λ)` on the counterterm trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowPoint {
    pub cutoff: Cutoff,
    pub lambda: f64,
    /// Square-well branch: 0 for `√λ ∈ (0, π)`, 1 for `√λ ∈ (π, 2π)`.
    /// Always 0 for the δ shell.
    pub branch_index: u32,
}

/// `R/r0` at which the zero-energy exterior solution has a node, if any.
pub fn critical_ratio(coupling: &Coupling, ext: &Extension) -> Option<f64> {
    let nu = coupling.nu();
    if coupling.is_critical() {
        (ext.c != 0.0).then(|| (-1.0 / ext.c).exp())
    } else if ext.c > 0.0 {
        Some(ext.c.powf(1.0 / (2.0 * nu)))
    } else {
        None
    }
}

fn pole_error(coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Error {
    Error::FlowPole {
        ratio: cutoff.ratio(),
        critical_ratio: critical_ratio(coupling, ext).unwrap_or(f64::NAN),
    }
}

/// Exterior zero-energy log-derivative `R u₀'(R)/u₀(R)`.
pub fn zero_energy_logderiv(coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<f64> {
    let x = cutoff.ratio();
    let c = ext.c;
    if coupling.is_critical() {
        let den = 1.0 + c * x.ln();
        if den.abs() < POLE_EPS {
            return Err(pole_error(coupling, ext, cutoff));
        }
        return Ok(0.5 + c / den);
    }
    let nu = coupling.nu();
    let p = x.powf(2.0 * nu);
    let den = p - c;
    if den.abs() < POLE_EPS {
        return Err(pole_error(coupling, ext, cutoff));
    }
    Ok(((0.5 + nu) * p - c * (0.5 - nu)) / den)
}

/// The value `√λ cot √λ` must take for the square well at this cutoff.
pub fn flow_rhs_square_well(coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<f64> {
    zero_energy_logderiv(coupling, ext, cutoff)
}

/// `s cot s`, finite at `s = 0`.
pub fn s_cot_s(s: f64) -> f64 {
    if s.abs() < 1e-8 {
        1.0 - s * s / 3.0
    } else {
        s * s.cos() / s.sin()
    }
}

/// `(cos s - rhs · sin s / s)`, i.e. `(s cot s - rhs) · sin s / s`, written to
/// stay accurate as `s → 0`.
fn principal_branch_function(s: f64, rhs: f64) -> f64 {
    let half = 0.5 * s;
    let cos_m1 = -2.0 * half.sin().powi(2);
    let sinc_m1 = if s.abs() < 1e-4 {
        let s2 = s * s;
        -s2 / 6.0 + s2 * s2 / 120.0
    } else {
        s.sin() / s - 1.0
    };
    (1.0 - rhs) + cos_m1 - rhs * sinc_m1
}

/// Solves `√λ cot √λ = rhs` for the smallest `λ > 0`.
///
/// `s cot s` maps `(0, π)` onto `(-∞, 1)`, so `rhs < 1` lands on branch 0;
/// otherwise the root lies on `(π, 2π)`.
pub fn solve_square_well_lambda(rhs: f64) -> Result<(f64, u32)> {
    if !rhs.is_finite() {
        return Err(Error::numerical(format!("square-well flow target {rhs} is not finite")));
    }
    let tol = Tolerance { abs: 1e-16, rel: 1e-15, max_iter: 200 };
    let (s, branch) = if rhs < 1.0 {
        let s = brent(|s| principal_branch_function(s, rhs), 0.0, PI, tol)?;
        (s, 0)
    } else {
        let s = brent(|s| s * s.cos() - rhs * s.sin(), PI, 2.0 * PI, tol)?;
        (s, 1)
    };
    if s <= 0.0 {
        return Err(Error::numerical(format!(
            "square-well flow target {rhs} too close to 1: lambda underflows"
        )));
    }
    Ok((s * s, branch))
}

/// Square-well counterterm at this cutoff: smallest positive root of
/// `√λ cot √λ = RHS`.
pub fn flow_square_well(coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<FlowPoint> {
    let rhs = flow_rhs_square_well(coupling, ext, cutoff)?;
    let (lambda, branch_index) = solve_square_well_lambda(rhs)?;
    Ok(FlowPoint { cutoff: *cutoff, lambda, branch_index })
}

/// δ-shell counterterm, in closed form. May be zero or negative (repulsive
/// shell); the sign is returned as is.
pub fn flow_delta_shell(coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<FlowPoint> {
    let x = cutoff.ratio();
    let c = ext.c;
    let lambda = if coupling.is_critical() {
        let den = 1.0 + c * x.ln();
        if den.abs() < POLE_EPS {
            return Err(pole_error(coupling, ext, cutoff));
        }
        0.5 - c / den
    } else {
        let nu = coupling.nu();
        let p = x.powf(2.0 * nu);
        let den = p - c;
        if den.abs() < POLE_EPS {
            return Err(pole_error(coupling, ext, cutoff));
        }
        ((0.5 - nu) * p - c * (0.5 + nu)) / den
    };
    Ok(FlowPoint { cutoff: *cutoff, lambda, branch_index: 0 })
}

/// Scheme-dispatched counterterm.
pub fn flow_point(scheme: Scheme, coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<FlowPoint> {
    match scheme {
        Scheme::SquareWell => flow_square_well(coupling, ext, cutoff),
        Scheme::DeltaShell => flow_delta_shell(coupling, ext, cutoff),
    }
}

/// Maps the scheme's flow over a strictly increasing grid of cutoffs.
///
/// Poles and solver failures are reported per point; only a malformed grid
/// fails the whole call.
pub fn flow_trajectory(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    grid: &[Cutoff],
) -> Result<Vec<Result<FlowPoint>>> {
    if grid.is_empty() {
        return Err(Error::usage("flow trajectory needs at least one cutoff"));
    }
    if grid.windows(2).any(|w| w[1].radius() <= w[0].radius()) {
        return Err(Error::usage("flow trajectory cutoffs must be strictly increasing"));
    }
    Ok(grid.iter().map(|cut| flow_point(scheme, coupling, ext, cut)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(nu: f64, c: f64, ratio: f64) -> (Coupling, Extension, Cutoff) {
        let cp = Coupling::from_nu(nu).unwrap();
        let ext = Extension::new(c, 1.0).unwrap();
        let cut = Cutoff::from_ratio(ratio, &ext).unwrap();
        (cp, ext, cut)
    }

    #[test]
    fn rhs_examples() {
        let (cp, ext, cut) = setup(0.5, 1.0, 0.1);
        assert_relative_eq!(flow_rhs_square_well(&cp, &ext, &cut).unwrap(), -1.0 / 9.0, max_relative = 1e-14);
        let (cp, ext, cut) = setup(0.5, 1.0, 1e-14);
        assert!(flow_rhs_square_well(&cp, &ext, &cut).unwrap().abs() < 1e-13);
        let (cp, ext, cut) = setup(0.0, 1.0, (-2.0f64).exp());
        assert_relative_eq!(flow_rhs_square_well(&cp, &ext, &cut).unwrap(), -0.5, max_relative = 1e-14);
    }

    #[test]
    fn pole_is_reported_with_critical_ratio() {
        let (cp, ext, cut) = setup(0.5, 0.25, 0.25);
        match flow_square_well(&cp, &ext, &cut) {
            Err(Error::FlowPole { critical_ratio, .. }) => assert_relative_eq!(critical_ratio, 0.25),
            other => panic!("expected pole, got {other:?}"),
        }
        let (cp, ext, _) = setup(0.0, 1.0, 0.1);
        let cut = Cutoff::from_ratio((-1.0f64).exp(), &ext).unwrap();
        assert!(matches!(flow_delta_shell(&cp, &ext, &cut), Err(Error::FlowPole { .. })));
    }

    #[test]
    fn square_well_zero_rhs_gives_quarter_pi_squared() {
        let (lambda, branch) = solve_square_well_lambda(0.0).unwrap();
        assert_relative_eq!(lambda, (PI / 2.0).powi(2), max_relative = 1e-14);
        assert_eq!(branch, 0);
    }

    #[test]
    fn square_well_rhs_near_one_gives_small_lambda() {
        let (lambda, branch) = solve_square_well_lambda(1.0 - 1e-9).unwrap();
        assert_eq!(branch, 0);
        // s cot s ≈ 1 - λ/3
        assert_relative_eq!(lambda, 3e-9, max_relative = 1e-6);
    }

    #[test]
    fn square_well_branch_one_past_pole() {
        let (cp, ext, _) = setup(0.0, 1.0, 0.1);
        let cut = Cutoff::from_ratio((-1.0f64).exp() * (1.0 + 1e-6), &ext).unwrap();
        let rhs = flow_rhs_square_well(&cp, &ext, &cut).unwrap();
        assert!(rhs > 1.0);
        let fp = flow_square_well(&cp, &ext, &cut).unwrap();
        assert_eq!(fp.branch_index, 1);
        assert!(fp.lambda > PI * PI && fp.lambda < 4.0 * PI * PI);
        // s cot s is steep here: |d/ds| ≈ rhs²/π
        assert!((s_cot_s(fp.lambda.sqrt()) - rhs).abs() < 1e-8 * rhs);
    }

    #[test]
    fn delta_shell_examples() {
        let (cp, ext, cut) = setup(0.5, 1.0, 0.1);
        assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 10.0 / 9.0, max_relative = 1e-14);
        let (cp, ext, cut) = setup(0.5, 1.0, 1e-14);
        assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 1.0, max_relative = 1e-13);
        let (cp, ext, cut) = setup(0.0, 2.0, (-1.0f64).exp());
        assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, 2.5, max_relative = 1e-14);
    }

    #[test]
    fn trajectory_contract() {
        let cp = Coupling::from_nu(0.5).unwrap();
        let ext = Extension::new(1.0, 1.0).unwrap();
        let grid: Vec<_> = [0.1, 0.2].iter().map(|&x| Cutoff::from_ratio(x, &ext).unwrap()).collect();
        let traj = flow_trajectory(Scheme::DeltaShell, &cp, &ext, &grid).unwrap();
        assert_relative_eq!(traj[0].as_ref().unwrap().lambda, 10.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(traj[1].as_ref().unwrap().lambda, 10.0 / 8.0, max_relative = 1e-14);

        // ν = 1/2, c = 0.25 has its pole at R/r0 = 0.25
        let ext = Extension::new(0.25, 1.0).unwrap();
        let grid: Vec<_> = [0.1, 0.25, 0.3].iter().map(|&x| Cutoff::from_ratio(x, &ext).unwrap()).collect();
        let traj = flow_trajectory(Scheme::SquareWell, &cp, &ext, &grid).unwrap();
        assert!(traj[0].is_ok() && traj[2].is_ok());
        assert!(matches!(traj[1], Err(Error::FlowPole { .. })));

        assert!(flow_trajectory(Scheme::SquareWell, &cp, &ext, &[]).is_err());
        let rev = [grid[1], grid[0]];
        assert!(flow_trajectory(Scheme::SquareWell, &cp, &ext, &rev).is_err());
    }

    #[test]
    fn delta_shell_three_quarters() {
        let (cp, ext, cut) = setup(0.75, 1.0, 0.01);
        // (R/r0)^{1.5} = 1e-3
        let expect = (-0.25 * 1e-3 - 1.25) / (1e-3 - 1.0);
        assert_relative_eq!(flow_delta_shell(&cp, &ext, &cut).unwrap().lambda, expect, max_relative = 1e-13);
        assert_relative_eq!(expect, 1.2515, max_relative = 1e-4);
    }
}

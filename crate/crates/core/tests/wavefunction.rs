use approx::assert_relative_eq;
use invsq::specfun::{bessel_k, Order};
use invsq::wavefunction::{eval_wave, normalize, Side};
use invsq::{
    flow_point, solve_bound_state_exact, Coupling, Cutoff, Error, Extension, PiecewiseWave, Scheme, WaveKind,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn setup(nu: f64, c: f64, ratio: f64) -> (Coupling, Extension, Cutoff) {
    let cp = Coupling::from_nu(nu).unwrap();
    let ext = Extension::new(c, 1.0).unwrap();
    let cut = Cutoff::from_ratio(ratio, &ext).unwrap();
    (cp, ext, cut)
}

fn bound(scheme: Scheme, nu: f64, c: f64, ratio: f64) -> PiecewiseWave {
    let (cp, ext, cut) = setup(nu, c, ratio);
    let k = solve_bound_state_exact(scheme, &cp, &ext, &cut).unwrap().unwrap().k;
    PiecewiseWave::bound_state(scheme, &cp, &ext, &cut, k).unwrap()
}

fn k_of(nu: f64, z: f64) -> f64 {
    bessel_k(Order::new(nu).unwrap(), z).unwrap()
}

/// `∫_R^∞ r K_ν(kr)² dr` from the Lommel integral
/// `∫ x K_ν² dx = (x²/2)(K_ν² - K_{ν-1} K_{ν+1})`.
fn lommel_exterior(nu: f64, k: f64, big_r: f64) -> f64 {
    let a = k * big_r;
    let k_nu = k_of(nu, a);
    let k_below = k_of(1.0 - nu, a); // K_{ν-1} = K_{1-ν}
    let k_above = k_below + 2.0 * nu / a * k_nu;
    0.5 * a * a * (k_below * k_above - k_nu * k_nu) / (k * k)
}

/// `∫₀^R sin²(qr) dr` or `∫₀^R sinh²(qr) dr`, scaled by `1/R`.
fn interior_square_integral(x: f64, oscillating: bool) -> f64 {
    // (1/2)(1 ∓ sin(2x)/(2x)) with the series for sinh(2x)/(2x) - 1
    if oscillating {
        0.5 * (1.0 - (2.0 * x).sin() / (2.0 * x))
    } else {
        let t = 4.0 * x * x;
        let (mut term, mut sum) = (1.0, 0.0);
        for n in 1..40 {
            term *= t / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
        }
        0.5 * sum
    }
}

fn independent_mass(wave: &PiecewiseWave) -> f64 {
    let (nu, k, big_r) = (wave.coupling.nu(), wave.k.unwrap(), wave.cutoff.radius());
    let edge = big_r.sqrt() * k_of(nu, k * big_r);
    let interior = match wave.scheme {
        Scheme::SquareWell => {
            let x = (wave.lambda - (k * big_r).powi(2)).sqrt();
            edge * edge * big_r * interior_square_integral(x, true) / x.sin().powi(2)
        }
        Scheme::DeltaShell => {
            let x = k * big_r;
            edge * edge * big_r * interior_square_integral(x, false) / x.sinh().powi(2)
        }
    };
    interior + lommel_exterior(nu, k, big_r)
}

#[test]
fn half_order_exterior_value() {
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-3);
    let w = PiecewiseWave::bound_state(Scheme::SquareWell, &cp, &ext, &cut, 1.0).unwrap();
    assert_eq!(w.kind, WaveKind::BoundState);
    assert_relative_eq!(eval_wave(&w, 1.0).unwrap(), (PI / 2.0).sqrt() * (-1.0f64).exp(), max_relative = 1e-14);
}

#[test]
fn zero_energy_nodes() {
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-3);
    let w = PiecewiseWave::zero_energy(Scheme::SquareWell, &cp, &ext, &cut).unwrap();
    assert_eq!(w.kind, WaveKind::ZeroEnergy);
    assert_eq!(w.value(1.0).unwrap(), 0.0);
    let (cp, ext, cut) = setup(0.0, 1.0, 1e-3);
    let w = PiecewiseWave::zero_energy(Scheme::DeltaShell, &cp, &ext, &cut).unwrap();
    assert!(w.value((-1.0f64).exp()).unwrap().abs() < 1e-15);
    assert!(w.value(0.3).unwrap() < 0.0 && w.value(0.4).unwrap() > 0.0);
}

#[test]
fn zero_energy_is_not_normalizable() {
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-3);
    let w = PiecewiseWave::zero_energy(Scheme::DeltaShell, &cp, &ext, &cut).unwrap();
    assert!(matches!(normalize(&w), Err(Error::Usage(_))));
    assert_eq!(w.normalization, None);
}

#[test]
fn exponential_toy_normalization() {
    // √r K_{1/2}(r) = √(π/2) e^{-r}, whose normalized amplitude is √2
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-10);
    let w = PiecewiseWave::bound_state(Scheme::DeltaShell, &cp, &ext, &cut, 1.0).unwrap();
    let n = w.normalize().unwrap().normalization.unwrap();
    assert_relative_eq!(n * (PI / 2.0).sqrt(), 2f64.sqrt(), max_relative = 1e-9);
}

#[test]
fn interior_fraction_vanishes_with_cutoff() {
    let fractions: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&r| bound(Scheme::DeltaShell, 0.5, 1.0, r).interior_fraction().unwrap())
        .collect();
    for w in fractions.windows(2) {
        assert!(w[1] < 0.2 * w[0], "{fractions:?}");
    }
    assert!(fractions[3] < 1e-4);
}

#[test]
fn normalization_matches_lommel_integral() {
    for &(nu, c, ratio) in &[(0.0, 1.0, 1e-4), (0.25, 2.0, 1e-3), (0.5, 1.0, 1e-2), (0.8, 0.5, 1e-3), (1.0, 1.0, 1e-3)] {
        for scheme in Scheme::ALL {
            let w = bound(scheme, nu, c, ratio);
            let n = w.normalize().unwrap().normalization.unwrap();
            let mass = independent_mass(&w);
            assert!((n * n * mass - 1.0).abs() < 1e-10, "{scheme} nu = {nu}: {}", n * n * mass);
        }
    }
}

#[test]
fn square_well_matches_derivative_at_root() {
    for &nu in &[0.0, 0.3, 0.7] {
        let w = bound(Scheme::SquareWell, nu, 1.0, 1e-3);
        let r = w.cutoff.radius();
        let inside = w.log_derivative(r, Side::Interior).unwrap();
        let outside = w.log_derivative(r, Side::Exterior).unwrap();
        assert!((inside - outside).abs() < 1e-9, "nu = {nu}: {inside} vs {outside}");
    }
}

#[test]
fn critical_exterior_is_bessel_k0() {
    let w = bound(Scheme::SquareWell, 0.0, 1.0, 1e-4);
    let k = w.k.unwrap();
    for r in [1e-3f64, 0.1, 0.5, 2.0] {
        let expected = r.sqrt() * k_of(0.0, k * r);
        assert_relative_eq!(w.value(r).unwrap(), expected, max_relative = 1e-10);
    }
}

#[test]
fn bad_radius() {
    let w = bound(Scheme::DeltaShell, 0.5, 1.0, 1e-3);
    assert!(matches!(w.value(0.0), Err(Error::Domain(_))));
    assert!(matches!(w.value(-1.0), Err(Error::Domain(_))));
    let (cp, ext, cut) = setup(0.5, 1.0, 1e-3);
    assert!(PiecewiseWave::bound_state(Scheme::DeltaShell, &cp, &ext, &cut, -1.0).is_err());
}

proptest! {
    #[test]
    fn continuous_at_cutoff(
        nu in 0.0f64..=1.0,
        c in 0.2f64..5.0,
        log_ratio in (1e-6f64).ln()..(1e-2f64).ln(),
        log_k in -3.0f64..3.0,
        bound_kind in any::<bool>(),
        delta in any::<bool>(),
    ) {
        let (cp, ext, cut) = setup(nu, c, log_ratio.exp());
        let scheme = if delta { Scheme::DeltaShell } else { Scheme::SquareWell };
        let wave = if bound_kind {
            PiecewiseWave::bound_state(scheme, &cp, &ext, &cut, log_k.exp())
        } else {
            PiecewiseWave::zero_energy(scheme, &cp, &ext, &cut)
        };
        let Ok(w) = wave else { return Ok(()) };
        let r = cut.radius();
        let inner = w.value(r).unwrap();
        let outer = w.value(r * (1.0 + 4.0 * f64::EPSILON)).unwrap();
        prop_assert!((inner - outer).abs() <= 1e-12 * inner.abs().max(outer.abs()), "{inner} vs {outer}");
    }

    #[test]
    fn delta_shell_jump(
        nu in 0.0f64..=1.0,
        c in 0.2f64..5.0,
        log_ratio in (1e-6f64).ln()..(1e-2f64).ln(),
        log_k in -3.0f64..3.0,
    ) {
        let (cp, ext, cut) = setup(nu, c, log_ratio.exp());
        let lambda = flow_point(Scheme::DeltaShell, &cp, &ext, &cut).unwrap().lambda;
        let w = PiecewiseWave::bound_state(Scheme::DeltaShell, &cp, &ext, &cut, log_k.exp()).unwrap();
        let r = cut.radius();
        let jump = w.log_derivative(r, Side::Exterior).unwrap() - w.log_derivative(r, Side::Interior).unwrap();
        // at the bound-state root the jump is -λ; elsewhere the mismatch is the residual
        let residual = invsq::residual_delta_shell(&cp, lambda, &cut, log_k.exp()).unwrap().value;
        prop_assert!((jump + lambda - residual).abs() < 1e-12 * lambda.abs().max(1.0));
    }

    #[test]
    fn normalize_is_idempotent(
        nu in 0.0f64..=1.0,
        c in 0.2f64..5.0,
        log_ratio in (1e-6f64).ln()..(1e-2f64).ln(),
        delta in any::<bool>(),
    ) {
        let scheme = if delta { Scheme::DeltaShell } else { Scheme::SquareWell };
        let (cp, ext, cut) = setup(nu, c, log_ratio.exp());
        let Ok(Some(state)) = solve_bound_state_exact(scheme, &cp, &ext, &cut) else { return Ok(()) };
        let w = PiecewiseWave::bound_state(scheme, &cp, &ext, &cut, state.k).unwrap();
        let once = w.normalize().unwrap();
        let twice = once.normalize().unwrap();
        let (a, b) = (once.normalization.unwrap(), twice.normalization.unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}

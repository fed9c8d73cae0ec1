//! Analytic piecewise wavefunctions of the regularized problem.
//!
//! Every wave is built with exterior coefficient 1: the zero-energy exterior
//! is `(r/r0)^{1/2+ν} - c (r/r0)^{1/2-ν}` (or `(r/r0)^{1/2}[1 + c ln(r/r0)]`
//! at `ν = 0`) and the bound-state exterior is `√r K_ν(kr)`. The interior is
//! scaled to agree with the exterior at `R`, so continuity holds by
//! construction.

use crate::error::{Error, Result};
use crate::flow::flow_point;
use crate::model::{Coupling, Cutoff, Extension, Scheme};
use crate::quad;
use crate::specfun::{bessel_k_logderiv, bessel_k_scaled};

/// Upper end of the exterior quadrature in units of `1/k`; `t K_ν(t)²` is
/// below `e^{-120}` of its peak beyond it.
const TAIL_EXTENT: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    ZeroEnergy,
    BoundState,
}

/// Which analytic branch to use when evaluating at or near `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Interior {
    /// `sin(q r)`
    Oscillating(f64),
    /// `sinh(q r)`
    Growing(f64),
    /// `r`
    Linear,
}

impl Interior {
    fn for_wavenumber_squared(q2: f64) -> Self {
        if q2 > 0.0 {
            Interior::Oscillating(q2.sqrt())
        } else if q2 < 0.0 {
            Interior::Growing((-q2).sqrt())
        } else {
            Interior::Linear
        }
    }

    fn shape(&self, r: f64) -> f64 {
        match *self {
            Interior::Oscillating(q) => (q * r).sin(),
            Interior::Growing(q) => (q * r).sinh(),
            Interior::Linear => r,
        }
    }

    /// `r u'/u`
    fn logderiv(&self, r: f64) -> f64 {
        match *self {
            Interior::Oscillating(q) => crate::flow::s_cot_s(q * r),
            Interior::Growing(q) => crate::spectrum::x_coth_x(q * r),
            Interior::Linear => 1.0,
        }
    }

    /// `∫₀^R shape² dr / (R shape(R)²)`
    fn mass_ratio(&self, big_r: f64) -> f64 {
        match *self {
            Interior::Oscillating(q) => {
                let x = q * big_r;
                if x < 0.5 {
                    series_sq_integral(x, -1.0) / (x * x.sin().powi(2))
                } else {
                    0.5 / x.sin().powi(2) - 0.5 / (x * x.tan())
                }
            }
            Interior::Growing(q) => {
                let x = q * big_r;
                if x < 0.5 {
                    series_sq_integral(x, 1.0) / (x * x.sinh().powi(2))
                } else {
                    0.5 / (x * x.tanh()) - 0.5 / x.sinh().powi(2)
                }
            }
            Interior::Linear => 1.0 / 3.0,
        }
    }
}

/// `∫₀ˣ sin² t dt` (`sign = -1`) or `∫₀ˣ sinh² t dt` (`sign = 1`) for small x.
fn series_sq_integral(x: f64, sign: f64) -> f64 {
    // sin² t = Σ (∓1)^{n+1} (2t)^{2n} / (2 (2n)!)
    let x2 = x * x;
    let mut term = x * x2 / 3.0;
    let mut sum = term;
    for n in 2..12 {
        let nf = n as f64;
        term *= sign * 4.0 * x2 / ((2.0 * nf) * (2.0 * nf + 1.0));
        sum += term;
    }
    sum
}

/// Analytic wavefunction `u(r)` for one scheme, coupling and cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseWave {
    pub scheme: Scheme,
    pub coupling: Coupling,
    pub kind: WaveKind,
    pub ext: Extension,
    pub cutoff: Cutoff,
    pub lambda: f64,
    /// Bound-state momentum; `None` for the zero-energy solution.
    pub k: Option<f64>,
    /// Factor applied on top of the unit-exterior convention; `None` until
    /// normalized.
    pub normalization: Option<f64>,
    interior: Interior,
    /// `u(R)` with unit exterior coefficient.
    edge_value: f64,
}

impl PiecewiseWave {
    /// Zero-energy solution with `λ` taken from the flow at `R`.
    pub fn zero_energy(scheme: Scheme, coupling: &Coupling, ext: &Extension, cutoff: &Cutoff) -> Result<Self> {
        let lambda = flow_point(scheme, coupling, ext, cutoff)?.lambda;
        Self::build(scheme, coupling, ext, cutoff, lambda, None)
    }

    /// Bound state at momentum `k`, normally a root of the spectral condition.
    pub fn bound_state(scheme: Scheme, coupling: &Coupling, ext: &Extension, cutoff: &Cutoff, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain(format!("bound-state momentum k = {k} must be positive")));
        }
        let lambda = flow_point(scheme, coupling, ext, cutoff)?.lambda;
        Self::build(scheme, coupling, ext, cutoff, lambda, Some(k))
    }

    /// As the other constructors but with `λ` supplied directly.
    pub fn with_lambda(
        scheme: Scheme,
        coupling: &Coupling,
        ext: &Extension,
        cutoff: &Cutoff,
        lambda: f64,
        k: Option<f64>,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::domain(format!("lambda = {lambda} must be finite")));
        }
        Self::build(scheme, coupling, ext, cutoff, lambda, k)
    }

    fn build(
        scheme: Scheme,
        coupling: &Coupling,
        ext: &Extension,
        cutoff: &Cutoff,
        lambda: f64,
        k: Option<f64>,
    ) -> Result<Self> {
        let big_r = cutoff.radius();
        let energy = k.map_or(0.0, |k| -(k * k));
        let interior = match scheme {
            Scheme::SquareWell => Interior::for_wavenumber_squared(lambda / (big_r * big_r) + energy),
            Scheme::DeltaShell => Interior::for_wavenumber_squared(energy),
        };
        let mut wave = PiecewiseWave {
            scheme,
            coupling: *coupling,
            kind: if k.is_some() { WaveKind::BoundState } else { WaveKind::ZeroEnergy },
            ext: *ext,
            cutoff: *cutoff,
            lambda,
            k,
            normalization: None,
            interior,
            edge_value: 0.0,
        };
        wave.edge_value = wave.exterior(big_r);
        if interior.shape(big_r) == 0.0 {
            return Err(Error::domain(format!(
                "interior solution has a node at R = {big_r}; cannot match the exterior"
            )));
        }
        Ok(wave)
    }

    fn exterior(&self, r: f64) -> f64 {
        let nu = self.coupling.nu();
        match self.k {
            Some(k) => {
                let z = k * r;
                match bessel_k_scaled(self.coupling.order(), z) {
                    Ok(scaled) => r.sqrt() * scaled * (-z).exp(),
                    Err(_) => 0.0,
                }
            }
            None => {
                let x = r / self.ext.r0;
                if nu == 0.0 {
                    x.sqrt() * (1.0 + self.ext.c * x.ln())
                } else {
                    x.powf(0.5 + nu) - self.ext.c * x.powf(0.5 - nu)
                }
            }
        }
    }

    fn unnormalized(&self, r: f64) -> f64 {
        let big_r = self.cutoff.radius();
        if r > big_r {
            self.exterior(r)
        } else {
            self.edge_value * self.interior.shape(r) / self.interior.shape(big_r)
        }
    }

    /// `u(r)`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::domain(format!("radius r = {r} must be positive")));
        }
        Ok(self.normalization.unwrap_or(1.0) * self.unnormalized(r))
    }

    /// `r u'(r)/u(r)` from the chosen analytic branch.
    pub fn log_derivative(&self, r: f64, side: Side) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::domain(format!("radius r = {r} must be positive")));
        }
        match side {
            Side::Interior => Ok(self.interior.logderiv(r)),
            Side::Exterior => {
                let nu = self.coupling.nu();
                match self.k {
                    Some(k) => Ok(0.5 + bessel_k_logderiv(self.coupling.order(), k * r)?),
                    None => {
                        let x = r / self.ext.r0;
                        let c = self.ext.c;
                        if nu == 0.0 {
                            Ok(0.5 + c / (1.0 + c * x.ln()))
                        } else {
                            let p = x.powf(2.0 * nu);
                            Ok(((0.5 + nu) * p - c * (0.5 - nu)) / (p - c))
                        }
                    }
                }
            }
        }
    }

    /// `∫₀^∞ u² dr` of the unit-exterior form.
    fn unit_mass(&self) -> Result<f64> {
        let k = self
            .k
            .ok_or_else(|| Error::usage("zero-energy solutions are not normalizable"))?;
        let big_r = self.cutoff.radius();
        let interior = self.edge_value * self.edge_value * big_r * self.interior.mass_ratio(big_r);
        Ok(interior + exterior_mass(&self.coupling, k, big_r)?)
    }

    /// Fraction of `∫u²` inside the cutoff.
    pub fn interior_fraction(&self) -> Result<f64> {
        let big_r = self.cutoff.radius();
        let interior = self.edge_value * self.edge_value * big_r * self.interior.mass_ratio(big_r);
        Ok(interior / self.unit_mass()?)
    }

    /// Copy scaled to `∫₀^∞ u² dr = 1`.
    pub fn normalize(&self) -> Result<PiecewiseWave> {
        let mass = self.unit_mass()?;
        Ok(PiecewiseWave { normalization: Some(1.0 / mass.sqrt()), ..*self })
    }
}

/// `∫_R^∞ r K_ν(kr)² dr`.
fn exterior_mass(coupling: &Coupling, k: f64, big_r: f64) -> Result<f64> {
    let order = coupling.order();
    let a = k * big_r;
    let k_sq = |t: f64| -> f64 {
        bessel_k_scaled(order, t).map_or(f64::NAN, |s| {
            let v = s * (-t).exp();
            v * v
        })
    };
    let tol = 1e-13;
    let mut total = 0.0;
    let mut lower = a;
    if a < 1.0 {
        // t = e^s on geometric panels, one per decade
        let mut s_lo = a.ln();
        while s_lo < 0.0 {
            let s_hi = (s_lo + std::f64::consts::LN_10).min(0.0);
            total += quad::integrate(|s| (2.0 * s).exp() * k_sq(s.exp()), s_lo, s_hi, 0.0, tol)?;
            s_lo = s_hi;
        }
        lower = 1.0;
    }
    let upper = lower.max(a) + TAIL_EXTENT;
    let mut t_lo = lower;
    while t_lo < upper {
        let t_hi = (t_lo + 4.0).min(upper);
        total += quad::integrate(|t| t * k_sq(t), t_lo, t_hi, 0.0, tol)?;
        t_lo = t_hi;
    }
    Ok(total / (k * k))
}

/// `u(r)` of `wave`.
pub fn eval_wave(wave: &PiecewiseWave, r: f64) -> Result<f64> {
    wave.value(r)
}

/// See [`PiecewiseWave::normalize`].
pub fn normalize(wave: &PiecewiseWave) -> Result<PiecewiseWave> {
    wave.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sin_and_sinh_square_integrals() {
        for &x in &[1e-6f64, 0.1, 0.3, 0.49] {
            let sin_exact = x / 2.0 - (2.0 * x).sin() / 4.0;
            let sinh_exact = (2.0 * x).sinh() / 4.0 - x / 2.0;
            assert_relative_eq!(series_sq_integral(x, -1.0), sin_exact, max_relative = 1e-9);
            assert_relative_eq!(series_sq_integral(x, 1.0), sinh_exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn mass_ratio_continuous_across_series_switch() {
        for interior in [Interior::Oscillating(1.0), Interior::Growing(1.0)] {
            let below = interior.mass_ratio(0.5 - 1e-9);
            let above = interior.mass_ratio(0.5 + 1e-9);
            assert_relative_eq!(below, above, max_relative = 1e-7);
        }
    }

    #[test]
    fn zero_energy_nodes() {
        let ext = Extension::new(1.0, 1.0).unwrap();
        let cut = Cutoff::from_ratio(1e-3, &ext).unwrap();
        let half = PiecewiseWave::zero_energy(Scheme::SquareWell, &Coupling::from_nu(0.5).unwrap(), &ext, &cut).unwrap();
        assert_eq!(half.value(1.0).unwrap(), 0.0);
        let crit = PiecewiseWave::zero_energy(Scheme::DeltaShell, &Coupling::from_nu(0.0).unwrap(), &ext, &cut).unwrap();
        assert!(crit.value((-1.0f64).exp()).unwrap().abs() < 1e-16);
    }

    #[test]
    fn zero_energy_not_normalizable() {
        let ext = Extension::new(1.0, 1.0).unwrap();
        let cut = Cutoff::from_ratio(1e-3, &ext).unwrap();
        let w = PiecewiseWave::zero_energy(Scheme::DeltaShell, &Coupling::from_nu(0.3).unwrap(), &ext, &cut).unwrap();
        assert!(matches!(w.normalize(), Err(Error::Usage(_))));
    }
}

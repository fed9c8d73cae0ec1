//! Problem definition: couplings, self-adjoint-extension data, regulator
//! schemes and the regularized potentials.
//!
//! Units are `ħ = 2m = 1` throughout, so `g = 2mα/ħ² = α`, energies are
//! inverse lengths squared and every bound state has `E = -k²`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::Order;

/// Lower edge of the medium-weak coupling window.
pub const G_MIN: f64 = -0.25;
/// Upper edge of the medium-weak coupling window.
pub const G_MAX: f64 = 0.75;

/// Strength of the long-range `g/r²` tail and its Bessel index `ν = √(g + 1/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    g: f64,
    nu: f64,
}

impl Coupling {
    /// Builds a coupling from `g = 2mα/ħ²`.
    pub fn from_g(g: f64) -> Result<Self> {
        if !g.is_finite() || !(G_MIN..=G_MAX).contains(&g) {
            return Err(Error::domain(format!(
                "coupling g = {g} outside the medium-weak window [-0.25, 0.75]; \
                 the strong-coupling regime g < -1/4 and g > 3/4 are out of scope"
            )));
        }
        let nu = if g == G_MIN { 0.0 } else { (g + 0.25).sqrt() };
        Ok(Coupling { g, nu })
    }

    /// Builds a coupling from the index `ν ∈ [0, 1]`.
    pub fn from_nu(nu: f64) -> Result<Self> {
        if !nu.is_finite() || !(0.0..=1.0).contains(&nu) {
            return Err(Error::domain(format!(
                "index nu = {nu} outside [0, 1] (g window [-0.25, 0.75])"
            )));
        }
        Ok(Coupling { g: nu * nu - 0.25, nu })
    }

    #[inline]
    pub fn g(&self) -> f64 {
        self.g
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// True on the critical coupling `g = -1/4`, which has its own formulas.
    #[inline]
    pub fn is_critical(&self) -> bool {
        self.nu == 0.0
    }

    pub fn order(&self) -> Order {
        Order::new(self.nu).expect("nu is validated on construction")
    }
}

/// Free function form of [`Coupling::from_g`].
pub fn coupling_from_g(g: f64) -> Result<Coupling> {
    Coupling::from_g(g)
}

/// Self-adjoint-extension data: the constant `c` and the scale `r0` fixing
/// the zero-energy exterior solution `(r/r0)^{1/2+ν} - c (r/r0)^{1/2-ν}`.
///
/// Any finite `c` is legal; a shallow bound state exists only for `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extension {
    pub c: f64,
    pub r0: f64,
}

impl Extension {
    pub fn new(c: f64, r0: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::domain(format!("extension constant c = {c} must be finite")));
        }
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::domain(format!("scale r0 = {r0} must be positive")));
        }
        Ok(Extension { c, r0 })
    }

    pub fn supports_bound_state(&self) -> bool {
        self.c > 0.0
    }
}

/// Short-distance regulator replacing the potential inside `r < R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// `V = -λ/R²` for `r < R`.
    SquareWell,
    /// `V = -(λ/R) δ(r - R⁻)`, imposed as a jump of `r u'/u` by `-λ` at `R`.
    DeltaShell,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::SquareWell, Scheme::DeltaShell];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::SquareWell => "square-well",
            Scheme::DeltaShell => "delta-shell",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square-well" | "sw" => Ok(Scheme::SquareWell),
            "delta-shell" | "ds" => Ok(Scheme::DeltaShell),
            other => Err(Error::usage(format!(
                "unknown scheme '{other}' (expected square-well or delta-shell)"
            ))),
        }
    }
}

/// Cutoff radius `R` together with the cached ratio `R/r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    radius: f64,
    ratio: f64,
}

impl Cutoff {
    pub fn new(radius: f64, r0: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("cutoff R = {radius} must be positive")));
        }
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::domain(format!("scale r0 = {r0} must be positive")));
        }
        Ok(Cutoff { radius, ratio: radius / r0 })
    }

    /// Cutoff at `R = ratio · r0`.
    pub fn from_ratio(ratio: f64, ext: &Extension) -> Result<Self> {
        Cutoff::new(ratio * ext.r0, ext.r0)
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}

/// Regularized potential at radius `r`.
///
/// Outside the cutoff this is the tail `g/r²`. Inside it is `-λ/R²` for the
/// square well and `0` for the δ shell, whose strength `-λ/R` is not a
/// pointwise value; it enters only as the boundary jump at `R`.
pub fn potential_value(
    scheme: Scheme,
    coupling: &Coupling,
    lambda: f64,
    cutoff: &Cutoff,
    r: f64,
) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::domain(format!("radius r = {r} must be positive")));
    }
    let big_r = cutoff.radius();
    if r > big_r {
        return Ok(coupling.g() / (r * r));
    }
    Ok(match scheme {
        Scheme::SquareWell => -lambda / (big_r * big_r),
        Scheme::DeltaShell => 0.0,
    })
}

/// Binding energy `E = -k²`.
#[inline]
pub fn energy_from_k(k: f64) -> f64 {
    -(k * k)
}

/// Momentum `k = √(-E)` of a bound state.
#[inline]
pub fn k_from_energy(energy: f64) -> f64 {
    (-energy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_window() {
        assert_eq!(Coupling::from_g(0.0).unwrap().nu(), 0.5);
        let crit = Coupling::from_g(-0.25).unwrap();
        assert_eq!(crit.nu(), 0.0);
        assert!(crit.is_critical());
        assert_eq!(Coupling::from_g(0.75).unwrap().nu(), 1.0);
        let err = Coupling::from_g(2.0).unwrap_err();
        assert!(err.to_string().contains("strong-coupling"));
        assert!(Coupling::from_g(-0.3).is_err());
        assert!(Coupling::from_nu(1.5).is_err());
    }

    #[test]
    fn potential_examples() {
        let cp = Coupling::from_g(0.5).unwrap();
        let cut = Cutoff::new(1.0, 1.0).unwrap();
        assert_eq!(potential_value(Scheme::SquareWell, &cp, 2.0, &cut, 2.0).unwrap(), 0.125);
        assert_eq!(potential_value(Scheme::SquareWell, &cp, 2.0, &cut, 0.5).unwrap(), -2.0);
        assert_eq!(potential_value(Scheme::DeltaShell, &cp, 2.0, &cut, 0.5).unwrap(), 0.0);
        assert!(potential_value(Scheme::DeltaShell, &cp, 2.0, &cut, 0.0).is_err());
    }

    #[test]
    fn extension_and_cutoff_validation() {
        assert!(Extension::new(-3.0, 1.0).is_ok());
        assert!(Extension::new(1.0, 0.0).is_err());
        assert!(Extension::new(f64::INFINITY, 1.0).is_err());
        assert!(Cutoff::new(-1.0, 1.0).is_err());
        let cut = Cutoff::new(0.2, 2.0).unwrap();
        assert_eq!(cut.ratio(), 0.1);
    }

    #[test]
    fn scheme_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("box".parse::<Scheme>().is_err());
    }
}

//! Bound states of the regularized problem.
//!
//! The exact spectral conditions match the interior solution to the exterior
//! `u = √r K_ν(kr)` at the cutoff:
//!
//! * square well: `KR cot KR = 1/2 + kR K'_ν(kR)/K_ν(kR)`, with `K² = λ/R² - k²`;
//! * δ shell: `1/2 + kR K'_ν/K_ν - kR coth kR = -λ`, the free interior being
//!   `sinh(kr)`.
//!
//! Roots are located by scanning a logarithmic `k` grid for sign changes and
//! refining each bracket. Finding more than one root is reported as an error
//! rather than resolved, since a single shallow state is the property under
//! test. In the limit `kR → 0` both conditions reduce to the cutoff-free
//! momentum returned by [`closed_form_k`].

use crate::error::{Error, Result};
use crate::flow::{flow_point, FlowPoint};
use crate::model::{energy_from_k, Coupling, Cutoff, Extension, Scheme};
use crate::roots::{brent, Tolerance};
use crate::specfun::{bessel_k_logderiv, gamma_ratio, EULER_GAMMA, NU_CLOSED_FORM_MAX};

/// Below this (non-zero) index the generic formulas lose digits to
/// cancellation in `(kR/2)^{2ν} ≈ 1 + 2ν ln(kR/2)`.
pub const SMALL_NU_WARNING: f64 = 1e-4;

/// Number of points in the default root scan.
pub const SCAN_POINTS: usize = 400;

/// Relative tolerance on refined roots in `k`.
pub const K_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactMatching,
    ClosedForm,
    OdeOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactMatching => "exact",
            Method::ClosedForm => "closed-form",
            Method::OdeOracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    Normal,
    /// `0 < ν < 1e-4`: computed by the generic path, expect lost digits.
    SmallNu,
}

fn conditioning_for(coupling: &Coupling) -> Conditioning {
    let nu = coupling.nu();
    if nu > 0.0 && nu < SMALL_NU_WARNING {
        Conditioning::SmallNu
    } else {
        Conditioning::Normal
    }
}

/// A bound state `E = -k²` and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub k: f64,
    pub energy: f64,
    pub method: Method,
    /// `None` for the cutoff-free closed form.
    pub scheme: Option<Scheme>,
    pub cutoff: Option<Cutoff>,
    pub conditioning: Conditioning,
}

impl BoundState {
    pub fn new(k: f64, method: Method, scheme: Option<Scheme>, cutoff: Option<Cutoff>) -> Self {
        BoundState {
            k,
            energy: energy_from_k(k),
            method,
            scheme,
            cutoff,
            conditioning: Conditioning::Normal,
        }
    }

    fn with_conditioning(mut self, conditioning: Conditioning) -> Self {
        self.conditioning = conditioning;
        self
    }
}

/// Left side minus right side of a spectral condition at momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResidual {
    pub k: f64,
    pub value: f64,
}

/// `1/2 + z K'_ν(z)/K_ν(z)`: exterior `r u'/u` at `r = R`, `z = kR`.
fn exterior_logderiv(coupling: &Coupling, z: f64) -> Result<f64> {
    Ok(0.5 + bessel_k_logderiv(coupling.order(), z)?)
}

/// `x coth x`, finite at `x = 0`.
pub fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("momentum k = {k} must be positive")))
    }
}

/// `KR cot KR - [1/2 + kR K'_ν(kR)/K_ν(kR)]` for the square well.
///
/// Requires `k < k₀ = √λ/R` so the interior stays oscillatory. At a pole of
/// `cot` the value is a signed infinity.
pub fn residual_square_well(
    coupling: &Coupling,
    lambda: f64,
    cutoff: &Cutoff,
    k: f64,
) -> Result<SpectralResidual> {
    check_k(k)?;
    let z = k * cutoff.radius();
    let interior2 = lambda - z * z;
    if interior2.is_nan() || interior2 <= 0.0 {
        return Err(Error::domain(format!(
            "square-well residual needs k < sqrt(lambda)/R (kR = {z}, lambda = {lambda})"
        )));
    }
    let x = interior2.sqrt();
    let sin = x.sin();
    let lhs = if sin == 0.0 {
        f64::INFINITY.copysign(x.cos())
    } else {
        crate::flow::s_cot_s(x)
    };
    Ok(SpectralResidual { k, value: lhs - exterior_logderiv(coupling, z)? })
}

/// `1/2 + kR K'_ν(kR)/K_ν(kR) - kR coth kR + λ` for the δ shell.
pub fn residual_delta_shell(
    coupling: &Coupling,
    lambda: f64,
    cutoff: &Cutoff,
    k: f64,
) -> Result<SpectralResidual> {
    check_k(k)?;
    let z = k * cutoff.radius();
    Ok(SpectralResidual { k, value: exterior_logderiv(coupling, z)? - x_coth_x(z) + lambda })
}

pub fn residual(
    scheme: Scheme,
    coupling: &Coupling,
    lambda: f64,
    cutoff: &Cutoff,
    k: f64,
) -> Result<SpectralResidual> {
    match scheme {
        Scheme::SquareWell => residual_square_well(coupling, lambda, cutoff, k),
        Scheme::DeltaShell => residual_delta_shell(coupling, lambda, cutoff, k),
    }
}

/// Pole-free function with the same roots as the residual. For the square
/// well this is `cos x - (sin x / x) L`, `x = KR`, which never vanishes where
/// `sin x = 0`.
fn matching_function(scheme: Scheme, coupling: &Coupling, lambda: f64, cutoff: &Cutoff, k: f64) -> Result<f64> {
    match scheme {
        Scheme::SquareWell => {
            let z = k * cutoff.radius();
            let x = (lambda - z * z).sqrt();
            let sinc = if x < 1e-8 { 1.0 } else { x.sin() / x };
            Ok(x.cos() - sinc * exterior_logderiv(coupling, z)?)
        }
        Scheme::DeltaShell => Ok(residual_delta_shell(coupling, lambda, cutoff, k)?.value),
    }
}

/// Logarithmic grid of trial momenta scanned for sign changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanWindow {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl ScanWindow {
    /// `k ∈ [1e-8/r0, 0.999 k₀]` for the square well, `[1e-8/r0, 1e3/R]` for
    /// the δ shell.
    pub fn default_for(scheme: Scheme, ext: &Extension, flow: &FlowPoint) -> Self {
        let r = flow.cutoff.radius();
        let k_max = match scheme {
            Scheme::SquareWell => 0.999 * flow.lambda.max(0.0).sqrt() / r,
            Scheme::DeltaShell => 1e3 / r,
        };
        ScanWindow { k_min: 1e-8 / ext.r0, k_max, points: SCAN_POINTS }
    }

    /// Restricts the upper edge to `kR ≤ z_max`.
    pub fn capped_at_kr(mut self, cutoff: &Cutoff, z_max: f64) -> Self {
        self.k_max = self.k_max.min(z_max / cutoff.radius());
        self
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.points.max(2);
        let (a, b) = (self.k_min.ln(), self.k_max.ln());
        (0..n)
            .map(|i| match i {
                0 => self.k_min,
                _ if i == n - 1 => self.k_max,
                _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
            })
            .collect()
    }
}

/// All roots of the spectral condition inside `window`, in increasing `k`.
pub fn find_roots(scheme: Scheme, coupling: &Coupling, flow: &FlowPoint, window: &ScanWindow) -> Result<Vec<f64>> {
    if !(window.k_min > 0.0 && window.k_max > window.k_min) {
        return Ok(Vec::new());
    }
    let lambda = flow.lambda;
    let cutoff = flow.cutoff;
    let f = |k: f64| matching_function(scheme, coupling, lambda, &cutoff, k);
    let ks = window.grid();
    let values = ks.iter().map(|&k| f(k)).collect::<Result<Vec<_>>>()?;

    let tol = Tolerance { abs: 0.0, rel: K_REL_TOL, max_iter: 200 };
    let mut roots = Vec::new();
    for i in 0..ks.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(ks[i]);
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            let mut err = None;
            let root = brent(
                |k| match f(k) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        f64::NAN
                    }
                },
                ks[i],
                ks[i + 1],
                tol,
            );
            if let Some(e) = err {
                return Err(e);
            }
            roots.push(root?);
        }
    }
    if *values.last().unwrap() == 0.0 {
        roots.push(*ks.last().unwrap());
    }
    Ok(roots)
}

/// Exact bound state of the regularized problem at cutoff `R`, using the
/// default scan window.
pub fn solve_bound_state_exact(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    cutoff: &Cutoff,
) -> Result<Option<BoundState>> {
    let flow = flow_point(scheme, coupling, ext, cutoff)?;
    let window = ScanWindow::default_for(scheme, ext, &flow);
    solve_with_flow(scheme, coupling, &flow, &window)
}

/// As [`solve_bound_state_exact`] with an explicit scan window.
pub fn solve_bound_state_in(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    cutoff: &Cutoff,
    window: &ScanWindow,
) -> Result<Option<BoundState>> {
    let flow = flow_point(scheme, coupling, ext, cutoff)?;
    solve_with_flow(scheme, coupling, &flow, window)
}

fn solve_with_flow(
    scheme: Scheme,
    coupling: &Coupling,
    flow: &FlowPoint,
    window: &ScanWindow,
) -> Result<Option<BoundState>> {
    let roots = find_roots(scheme, coupling, flow, window)?;
    match roots.as_slice() {
        [] => Ok(None),
        [k] => Ok(Some(
            BoundState::new(*k, Method::ExactMatching, Some(scheme), Some(flow.cutoff))
                .with_conditioning(conditioning_for(coupling)),
        )),
        _ => Err(Error::Multiplicity { roots }),
    }
}

/// Cutoff-independent bound-state momentum.
///
/// `k = (2/r0) [Γ(1+ν) / (c Γ(1-ν))]^{1/2ν}` for `ν > 0` and `k = e^{1/c}/r0`
/// at `ν = 0`; no bound state for `c ≤ 0`.
pub fn closed_form_k(coupling: &Coupling, ext: &Extension) -> Result<Option<BoundState>> {
    let nu = coupling.nu();
    if nu > NU_CLOSED_FORM_MAX {
        return Err(Error::domain(format!(
            "closed form needs nu < 1 (got {nu}); Gamma(1 - nu) has a pole at nu = 1"
        )));
    }
    if ext.c <= 0.0 {
        return Ok(None);
    }
    let (c, r0) = (ext.c, ext.r0);
    let k = if coupling.is_critical() {
        (1.0 / c).exp() / r0
    } else if nu == 0.5 {
        1.0 / (c * r0)
    } else {
        let ratio = gamma_ratio(coupling.order())?;
        (2.0 / r0) * (ratio / c).powf(1.0 / (2.0 * nu))
    };
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Range(format!("closed-form k = {k} not representable (nu = {nu}, c = {c})")));
    }
    Ok(Some(BoundState::new(k, Method::ClosedForm, None, None).with_conditioning(conditioning_for(coupling))))
}

/// `R → 0` limit of the exact matching roots at the critical coupling,
/// `k = 2 e^{-γ} e^{1/c} / r0`.
///
/// The `ν = 0` closed form keeps only `K₀(z) ≈ -ln z`; the full small-argument
/// form `K₀(z) ≈ -ln(z/2) - γ` shifts `ln k` by the constant `ln 2 - γ`, and
/// the exact roots converge to this value instead.
pub fn critical_matching_limit_k(ext: &Extension) -> Option<f64> {
    (ext.c > 0.0).then(|| 2.0 * (-EULER_GAMMA).exp() * (1.0 / ext.c).exp() / ext.r0)
}

/// Low-energy (`kR ≪ 1`) form of the counterterm implied by a bound state at `k`.
///
/// Square well: the value `√λ cot √λ` must take. δ shell: `λ` itself.
pub fn lowenergy_lambda(scheme: Scheme, coupling: &Coupling, k: f64, cutoff: &Cutoff) -> Result<f64> {
    check_k(k)?;
    let z = k * cutoff.radius();
    let nu = coupling.nu();
    if coupling.is_critical() {
        let inv_log = 1.0 / z.ln();
        return Ok(match scheme {
            Scheme::SquareWell => 0.5 + inv_log,
            Scheme::DeltaShell => 0.5 - inv_log,
        });
    }
    if nu > NU_CLOSED_FORM_MAX {
        return Err(Error::domain("low-energy form needs nu < 1"));
    }
    let q = (0.5 * z).powf(2.0 * nu) / gamma_ratio(coupling.order())?;
    Ok(match scheme {
        Scheme::SquareWell => 0.5 + nu * (q + 1.0) / (q - 1.0),
        Scheme::DeltaShell => (nu + 0.5 + (nu - 0.5) * q) / (1.0 - q),
    })
}

/// One cutoff of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cutoff: Cutoff,
    /// `None` when no root was found in the scan window.
    pub k_exact: Option<f64>,
    pub rel_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub scheme: Scheme,
    pub k_closed: f64,
    pub rows: Vec<Result<ConvergenceRow>>,
    /// Deviations decrease along the list, each allowed to exceed its
    /// predecessor by at most 10%.
    pub monotone: bool,
}

/// Exact roots along a decreasing list of cutoffs, compared with the closed form.
pub fn convergence_study(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    cutoffs: &[Cutoff],
) -> Result<ConvergenceStudy> {
    if ext.c <= 0.0 {
        return Err(Error::usage("convergence study needs c > 0"));
    }
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1].radius() >= w[0].radius()) {
        return Err(Error::usage("convergence study cutoffs must be nonempty and strictly decreasing"));
    }
    if cutoffs[0].ratio() >= 0.1 {
        return Err(Error::usage("convergence study needs max R/r0 < 0.1"));
    }
    let k_closed = closed_form_k(coupling, ext)?
        .map(|b| b.k)
        .ok_or_else(|| Error::usage("no closed-form bound state"))?;
    let rows: Vec<Result<ConvergenceRow>> = cutoffs
        .iter()
        .map(|cut| {
            let state = solve_bound_state_exact(scheme, coupling, ext, cut)?;
            let k_exact = state.map(|b| b.k);
            Ok(ConvergenceRow {
                cutoff: *cut,
                k_exact,
                rel_deviation: k_exact.map(|k| ((k - k_closed) / k_closed).abs()),
            })
        })
        .collect();
    let devs: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.as_ref().ok().and_then(|r| r.rel_deviation))
        .collect();
    let monotone = devs.len() == rows.len() && devs.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    Ok(ConvergenceStudy { scheme, k_closed, rows, monotone })
}

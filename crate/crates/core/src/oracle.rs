//! Direct integration of the radial equation `-u'' + V u = E u`, independent
//! of Bessel functions and of the matching formulas.
//!
//! The equation is integrated in the logarithmic variable `x = ln r` with
//! `u = √r w`, which turns it into `w'' = f(x) w` with
//! `f = 1/4 + r² (V - E)`. In these variables the exterior is simply
//! `f = ν² + k² r²`, and a uniform step in `x` resolves both the cutoff scale
//! and the `e^{-kr}` tail with a few tens of thousands of nodes.
//!
//! The grid contains `R` as a node. Across that node the three-point Numerov
//! recurrence is replaced by one that carries the jumps of `f`, `f'` and (for
//! the δ shell) of `w'`, so the scheme stays fourth order. Solutions are
//! integrated outward from `r_min` with the regular start and inward from the
//! tail, each in its stable direction, and joined at a matching node near
//! `r = 1/k`.

use crate::error::{Error, Result};
use crate::flow::flow_point;
use crate::model::{Coupling, Cutoff, Extension, Scheme};
use crate::roots::{bisect, Tolerance};
use crate::spectrum::{BoundState, Method, ScanWindow};

/// Minimum number of Numerov steps of a default grid.
pub const MIN_STEPS: usize = 10_000;

/// Largest step in `ln r` of a default grid.
pub const DEFAULT_LOG_STEP: f64 = 2e-4;

/// Tail length in units of `1/k`.
const TAIL_EFOLDS: f64 = 25.0;

/// Inward integration starts no further out than this many decay lengths.
const INWARD_START_EFOLDS: f64 = 30.0;

const RESCALE_ABOVE: f64 = 1e250;

/// Radial grid: `r_min < R < r_max` and the number of steps between them.
///
/// The realized grid is uniform in `ln r` with `R` on a node, so the ends may
/// move outward by less than one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_steps: usize,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, n_steps: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::usage(format!("invalid grid range [{r_min}, {r_max}]")));
        }
        if n_steps < 16 {
            return Err(Error::usage(format!("grid needs at least 16 steps (got {n_steps})")));
        }
        Ok(GridSpec { r_min, r_max, n_steps })
    }

    /// `r_min = R·10⁻³`, `r_max = 25/k_estimate`, step at most
    /// [`DEFAULT_LOG_STEP`] in `ln r`.
    pub fn for_state(cutoff: &Cutoff, k_estimate: f64) -> Self {
        let r_min = cutoff.radius() * 1e-3;
        let r_max = (TAIL_EFOLDS / k_estimate).max(cutoff.radius() * 10.0);
        let n_steps = ((r_max / r_min).ln() / DEFAULT_LOG_STEP).ceil() as usize;
        GridSpec { r_min, r_max, n_steps: n_steps.max(MIN_STEPS) }
    }

    /// Grid long enough for the shallowest energy of the bracket.
    pub fn for_bracket(cutoff: &Cutoff, bracket: (f64, f64)) -> Self {
        let shallow = bracket.0.abs().min(bracket.1.abs());
        GridSpec::for_state(cutoff, shallow.sqrt())
    }
}

/// Energy bracket equivalent to the exact solver's scan window.
pub fn energy_bracket(window: &ScanWindow) -> (f64, f64) {
    (-(window.k_max * window.k_max), -(window.k_min * window.k_min))
}

/// Sampled reduced wavefunction at a fixed energy.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub r_samples: Vec<f64>,
    /// `u(r)`, scaled to `max |u| = 1`.
    pub u_samples: Vec<f64>,
    pub energy: f64,
    pub node_count: usize,
    /// Index of the node at `r = R`.
    pub cutoff_index: usize,
    /// Node where the outward and inward pieces are joined.
    pub matching_index: usize,
    /// Normalized Wronskian of the two pieces at the matching node; zero at
    /// an eigenvalue, sign changes across one.
    pub mismatch: f64,
    log_step: f64,
    w: Vec<f64>,
    f: Vec<f64>,
    f_cutoff_interior: f64,
}

impl RadialSolution {
    /// `r u'/u` at sample `i`, from the fourth-order Numerov-consistent
    /// difference. Not defined at the cutoff node or the grid ends.
    pub fn log_derivative(&self, i: usize) -> Option<f64> {
        if i == 0 || i + 1 >= self.w.len() || i == self.cutoff_index || self.w[i] == 0.0 {
            return None;
        }
        let h = self.log_step;
        let c = h * h / 6.0;
        let (f_lo, f_hi) = if i == self.cutoff_index + 1 {
            (self.f_exterior_at(i - 1), self.f[i + 1])
        } else if i + 1 == self.cutoff_index {
            (self.f[i - 1], self.f_interior_at(i + 1))
        } else {
            (self.f[i - 1], self.f[i + 1])
        };
        let dw = (self.w[i + 1] * (1.0 - c * f_hi) - self.w[i - 1] * (1.0 - c * f_lo)) / (2.0 * h);
        Some(0.5 + dw / self.w[i])
    }

    fn f_exterior_at(&self, i: usize) -> f64 {
        // f is stored with the exterior value at the cutoff node
        self.f[i]
    }

    fn f_interior_at(&self, i: usize) -> f64 {
        if i == self.cutoff_index {
            self.f_cutoff_interior
        } else {
            self.f[i]
        }
    }
}

struct LogGrid {
    h: f64,
    cutoff_index: usize,
    r: Vec<f64>,
}

impl LogGrid {
    fn build(spec: &GridSpec, cutoff: &Cutoff) -> Result<Self> {
        let big_r = cutoff.radius();
        if !(spec.r_min < big_r && big_r < spec.r_max) {
            return Err(Error::usage(format!(
                "grid [{}, {}] must bracket the cutoff R = {big_r}",
                spec.r_min, spec.r_max
            )));
        }
        let span_in = (big_r / spec.r_min).ln();
        let span_out = (spec.r_max / big_r).ln();
        let h0 = (span_in + span_out) / spec.n_steps as f64;
        let n_in = ((span_in / h0).round() as usize).max(2);
        let h = span_in / n_in as f64;
        let n_out = ((span_out / h).ceil() as usize).max(4);
        let r = (0..=n_in + n_out)
            .map(|i| {
                if i == n_in {
                    big_r
                } else {
                    big_r * ((i as f64 - n_in as f64) * h).exp()
                }
            })
            .collect();
        Ok(LogGrid { h, cutoff_index: n_in, r })
    }
}

/// Regularized problem at one energy, in the `w'' = f w` form.
struct Problem {
    scheme: Scheme,
    nu_sq: f64,
    lambda: f64,
    big_r: f64,
    energy: f64,
}

impl Problem {
    fn interior_potential(&self) -> f64 {
        match self.scheme {
            Scheme::SquareWell => -self.lambda / (self.big_r * self.big_r),
            Scheme::DeltaShell => 0.0,
        }
    }

    fn f_interior(&self, r: f64) -> f64 {
        0.25 + r * r * (self.interior_potential() - self.energy)
    }

    fn f_exterior(&self, r: f64) -> f64 {
        self.nu_sq - r * r * self.energy
    }

    fn fx_interior(&self, r: f64) -> f64 {
        2.0 * r * r * (self.interior_potential() - self.energy)
    }

    fn fx_exterior(&self, r: f64) -> f64 {
        -2.0 * r * r * self.energy
    }

    /// `K²` of the interior, `u'' = -K² u`.
    fn interior_wavenumber_squared(&self) -> f64 {
        self.energy - self.interior_potential()
    }

    /// Regular interior solution `u`, normalized to `u ≈ r` at the origin.
    fn regular_start(&self, r: f64) -> f64 {
        let kappa2 = self.interior_wavenumber_squared();
        if kappa2 > 0.0 {
            let kappa = kappa2.sqrt();
            (kappa * r).sin() / kappa
        } else if kappa2 < 0.0 {
            let kappa = (-kappa2).sqrt();
            (kappa * r).sinh() / kappa
        } else {
            r
        }
    }

    /// Jump of `dw/dx` across the cutoff, per unit `w`.
    fn derivative_jump(&self) -> f64 {
        match self.scheme {
            Scheme::SquareWell => 0.0,
            Scheme::DeltaShell => -self.lambda,
        }
    }
}

/// `ln(sin t / t)` as a function of `t²` (negative `t²` gives `ln(sinh t / t)`).
fn ln_sinc(t2: f64) -> f64 {
    if t2.abs() > 1.0 {
        let t = t2.abs().sqrt();
        return if t2 > 0.0 { (t.sin() / t).ln() } else { (t.sinh() / t).ln() };
    }
    let mut term = 1.0;
    let mut excess = 0.0;
    for j in 1..16 {
        let jf = j as f64;
        term *= -t2 / ((2.0 * jf) * (2.0 * jf + 1.0));
        excess += term;
    }
    excess.ln_1p()
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl DoubleDouble {
    fn new(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    fn add(&mut self, other: DoubleDouble) {
        let (s, e) = two_sum(self.hi, other.hi);
        let (hi, lo) = two_sum(s, e + self.lo + other.lo);
        self.hi = hi;
        self.lo = lo;
    }

    fn add_f64(&mut self, x: f64) {
        self.add(DoubleDouble::new(x));
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }

    fn scale(&mut self, factor: f64) {
        self.hi *= factor;
        self.lo *= factor;
    }
}

/// Outward pass, nodes `0..=last`.
///
/// Uses the summed form of the recurrence: with `z_n = (1 - h² f_n/12) w_n`
/// the second difference of `z` is `h² f_n w_n`, and both `z` and its first
/// difference are carried in double-double. This keeps the rounding
/// error of the logarithmic derivative at the level of the unit roundoff
/// instead of `ε/h`. The bound state at large `ν` and small `R` is fixed by
/// a regular admixture that can be ten orders of magnitude below the
/// irregular solution at `R`, so this matters.
fn integrate_outward(p: &Problem, grid: &LogGrid, last: usize, w: &mut [f64]) -> Result<()> {
    let h = grid.h;
    let h2 = h * h;
    let nc = grid.cutoff_index;
    let r = &grid.r;
    let a_in = |i: usize| 1.0 - h2 * p.f_interior(r[i]) / 12.0;
    let a_out = |i: usize| 1.0 - h2 * p.f_exterior(r[i]) / 12.0;
    let a_side = |i: usize| if i <= nc { a_in(i) } else { a_out(i) };
    for i in 0..2 {
        w[i] = p.regular_start(r[i]) / r[i].sqrt();
    }
    // z₁ - z₀ without cancellation: w₁/w₀ = e^{h/2} sinc(K r₁)/sinc(K r₀)
    let kappa2 = p.interior_wavenumber_squared();
    let log_ratio = 0.5 * h + ln_sinc(kappa2 * r[1] * r[1]) - ln_sinc(kappa2 * r[0] * r[0]);
    let dw = w[0] * log_ratio.exp_m1();
    let da = -h2 * (p.f_interior(r[1]) - p.f_interior(r[0])) / 12.0;
    let mut z = DoubleDouble::new(a_side(1) * w[1]);
    let mut delta = DoubleDouble::new(a_side(1) * dw + da * w[0]);
    for n in 1..last {
        if n == nc {
            let f_m = p.f_interior(r[n]);
            let f_p = p.f_exterior(r[n]);
            let fx_m = p.fx_interior(r[n]);
            let fx_p = p.fx_exterior(r[n]);
            // left derivative to O(h³) from the two interior samples
            let wp_m = ((w[n] - w[n - 1]) / h + 0.5 * h * f_m * w[n] - h2 / 6.0 * fx_m * w[n])
                / (1.0 + h2 / 6.0 * f_m);
            let j1 = p.derivative_jump() * w[n];
            let wp_p = wp_m + j1;
            let j3 = (fx_p - fx_m) * w[n] + f_p * wp_p - f_m * wp_m;
            let source = h * j1 + 5.0 / 12.0 * h2 * (f_p + f_m) * w[n] + h2 * h / 12.0 * j3;
            delta.add_f64(h2 * f_m / 6.0 * w[n]);
            delta.add_f64(source);
            z.add(delta);
            w[n + 1] = z.value() / a_out(n + 1);
            // continue with z defined on the exterior side of the cutoff node
            delta.add_f64(h2 * (f_p - f_m) / 12.0 * w[n]);
        } else {
            let f_n = if n < nc { p.f_interior(r[n]) } else { p.f_exterior(r[n]) };
            delta.add_f64(h2 * f_n * w[n]);
            z.add(delta);
            w[n + 1] = z.value() / a_side(n + 1);
        }
        if !w[n + 1].is_finite() {
            return Err(Error::numerical(format!("outward integration overflowed at r = {}", r[n + 1])));
        }
        if w[n + 1].abs() > RESCALE_ABOVE {
            for v in &mut w[..=n + 1] {
                *v /= RESCALE_ABOVE;
            }
            z.scale(1.0 / RESCALE_ABOVE);
            delta.scale(1.0 / RESCALE_ABOVE);
        }
    }
    Ok(())
}

/// Inward pass from `start` down to `stop`, exterior only.
fn integrate_inward(p: &Problem, grid: &LogGrid, start: usize, stop: usize, w: &mut [f64]) -> Result<()> {
    let h2 = grid.h * grid.h;
    let r = &grid.r;
    let k = (-p.energy).sqrt();
    w[start] = 1.0 / r[start].sqrt();
    w[start - 1] = (-k * (r[start - 1] - r[start])).exp() / r[start - 1].sqrt();
    for n in (stop + 1..start).rev() {
        let a_prev = 1.0 - h2 * p.f_exterior(r[n - 1]) / 12.0;
        let a_next = 1.0 - h2 * p.f_exterior(r[n + 1]) / 12.0;
        let next = (2.0 * w[n] * (1.0 + 5.0 * h2 * p.f_exterior(r[n]) / 12.0) - a_next * w[n + 1]) / a_prev;
        if !next.is_finite() {
            return Err(Error::numerical(format!("inward integration overflowed at r = {}", r[n - 1])));
        }
        w[n - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in &mut w[n - 1..=start] {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    Ok(())
}

struct Pieces {
    out: Vec<f64>,
    inward: Vec<f64>,
    start: usize,
    matching: usize,
    mismatch: f64,
}

fn integrate_pieces(p: &Problem, grid: &LogGrid) -> Result<Pieces> {
    let n = grid.r.len();
    let last = n - 1;
    let nc = grid.cutoff_index;
    let k = (-p.energy).sqrt();
    let index_of = |radius: f64| -> usize {
        let x = (radius / grid.r[nc]).ln() / grid.h + nc as f64;
        x.round().clamp(0.0, last as f64) as usize
    };
    let start = index_of(INWARD_START_EFOLDS / k).clamp(nc + 3, last);
    let matching = index_of(1.0 / k).clamp(nc + 1, start - 2);

    let mut out = vec![0.0; n];
    integrate_outward(p, grid, matching + 1, &mut out)?;
    let mut inward = vec![0.0; n];
    integrate_inward(p, grid, start, matching, &mut inward)?;

    let m = matching;
    let norm_out = out[m].hypot(out[m + 1]);
    let norm_in = inward[m].hypot(inward[m + 1]);
    let mismatch = (out[m + 1] * inward[m] - inward[m + 1] * out[m]) / (norm_out * norm_in);
    Ok(Pieces { out, inward, start, matching, mismatch })
}

fn problem_for(scheme: Scheme, coupling: &Coupling, lambda: f64, cutoff: &Cutoff, energy: f64) -> Result<Problem> {
    if !(energy < 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!("oracle needs a negative energy (got {energy})")));
    }
    Ok(Problem { scheme, nu_sq: coupling.nu() * coupling.nu(), lambda, big_r: cutoff.radius(), energy })
}

/// Integrates the regularized radial equation at energy `E < 0`.
///
/// The outward piece starts from the regular interior solution, the inward
/// piece from the decaying tail; they are joined continuously at the matching
/// node. At an eigenvalue the result is the bound-state wavefunction; away
/// from one it has a kink at the matching node measured by `mismatch`.
pub fn integrate_radial(
    scheme: Scheme,
    coupling: &Coupling,
    lambda: f64,
    cutoff: &Cutoff,
    energy: f64,
    grid: &GridSpec,
) -> Result<RadialSolution> {
    let p = problem_for(scheme, coupling, lambda, cutoff, energy)?;
    let lg = LogGrid::build(grid, cutoff)?;
    let pieces = integrate_pieces(&p, &lg)?;
    let m = pieces.matching;
    let scale = (pieces.out[m] * pieces.inward[m] + pieces.out[m + 1] * pieces.inward[m + 1])
        / (pieces.inward[m].powi(2) + pieces.inward[m + 1].powi(2));

    let n = lg.r.len();
    let mut w = vec![0.0; n];
    w[..=m].copy_from_slice(&pieces.out[..=m]);
    for (wi, inw) in w[m + 1..=pieces.start].iter_mut().zip(&pieces.inward[m + 1..=pieces.start]) {
        *wi = scale * inw;
    }
    let mut u: Vec<f64> = w.iter().zip(&lg.r).map(|(wi, ri)| wi * ri.sqrt()).collect();
    let peak = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::numerical("radial solution vanished or overflowed"));
    }
    u.iter_mut().for_each(|v| *v /= peak);
    w.iter_mut().for_each(|v| *v /= peak);

    let node_count = u
        .iter()
        .filter(|v| **v != 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|pair| pair[0].signum() != pair[1].signum())
        .count();
    let nc = lg.cutoff_index;
    let f = lg
        .r
        .iter()
        .enumerate()
        .map(|(i, &r)| if i < nc { p.f_interior(r) } else { p.f_exterior(r) })
        .collect();
    Ok(RadialSolution {
        r_samples: lg.r,
        u_samples: u,
        energy,
        node_count,
        cutoff_index: nc,
        matching_index: m,
        mismatch: pieces.mismatch,
        log_step: lg.h,
        w,
        f,
        f_cutoff_interior: p.f_interior(cutoff.radius()),
    })
}

/// Controls for [`shoot_bound_state_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Relative tolerance on the energy.
    pub rel_tol: f64,
    /// Number of logarithmic subdivisions of the bracket scanned for sign changes.
    pub subdivisions: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { rel_tol: 1e-10, subdivisions: 64 }
    }
}

/// Shooting solution for the bound state with energy in `bracket = (E_lo, E_hi)`.
pub fn shoot_bound_state(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    cutoff: &Cutoff,
    grid: &GridSpec,
    bracket: (f64, f64),
) -> Result<Option<BoundState>> {
    shoot_bound_state_with(scheme, coupling, ext, cutoff, grid, bracket, &ShootOptions::default())
}

pub fn shoot_bound_state_with(
    scheme: Scheme,
    coupling: &Coupling,
    ext: &Extension,
    cutoff: &Cutoff,
    grid: &GridSpec,
    bracket: (f64, f64),
    opts: &ShootOptions,
) -> Result<Option<BoundState>> {
    let (e_lo, e_hi) = bracket;
    if !(e_lo.is_finite() && e_lo < e_hi && e_hi < 0.0) {
        return Err(Error::usage(format!(
            "energy bracket ({e_lo}, {e_hi}) must be ordered and negative"
        )));
    }
    let lambda = flow_point(scheme, coupling, ext, cutoff)?.lambda;
    let lg = LogGrid::build(grid, cutoff)?;
    let mismatch = |energy: f64| -> Result<f64> {
        let p = problem_for(scheme, coupling, lambda, cutoff, energy)?;
        Ok(integrate_pieces(&p, &lg)?.mismatch)
    };

    let n = opts.subdivisions.max(1);
    let (a, b) = ((-e_lo).ln(), (-e_hi).ln());
    let energies: Vec<f64> = (0..=n)
        .map(|i| match i {
            0 => e_lo,
            _ if i == n => e_hi,
            _ => -(a + (b - a) * i as f64 / n as f64).exp(),
        })
        .collect();
    let values = energies.iter().map(|&e| mismatch(e)).collect::<Result<Vec<_>>>()?;

    let tol = Tolerance { abs: 0.0, rel: opts.rel_tol, max_iter: 200 };
    let mut roots = Vec::new();
    for i in 0..n {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(energies[i]);
        } else if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect(&mismatch, energies[i], energies[i + 1], tol)?);
        }
    }
    if values[n] == 0.0 {
        roots.push(energies[n]);
    }
    let ks: Vec<f64> = roots.iter().map(|e| (-e).sqrt()).collect();
    match ks.as_slice() {
        [] => Ok(None),
        [k] => Ok(Some(BoundState::new(*k, Method::OdeOracle, Some(scheme), Some(*cutoff)))),
        _ => Err(Error::Multiplicity { roots: ks }),
    }
}

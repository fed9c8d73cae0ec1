//! Modified Bessel functions `K_ν`, `I_ν` for orders `0 ≤ ν ≤ 1`, and the
//! Gamma-function pieces the matching equations need.
//!
//! `K_ν` is evaluated on the scaled function `e^z K_ν(z)`: Temme's series for
//! `z ≤ 2` and Steed's continued fraction (CF2) above, each for a reduced
//! order `μ ∈ [-1/2, 1/2]`. Orders above one half take one step of the
//! forward recurrence from `μ = ν - 1`. Working with the scaled function
//! keeps the logarithmic derivative finite at arguments where `K_ν` itself
//! underflows.
//!
//! `I_ν` is summed from its power series. It is only used for diagnostics
//! (Wronskian and connection-formula checks), so no large-argument branch is
//! provided; the series is accurate to a few ulps for `z ≲ 50`.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest order accepted by the closed-form operations. `Γ(1-ν)` has a pole
/// at `ν = 1`.
pub const NU_CLOSED_FORM_MAX: f64 = 1.0 - 1e-9;

/// Crossover between Temme's series and the continued fraction.
const TEMME_CROSSOVER: f64 = 2.0;

const MAX_ITER: usize = 10_000;

/// Order `ν` of a modified Bessel function, restricted to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && (0.0..=1.0).contains(&nu) {
            Ok(Order(nu))
        } else {
            Err(Error::domain(format!("Bessel order {nu} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

// Taylor coefficients of 1/Γ(1+x) about x = 0.
const RGAMMA1P_TAYLOR: [f64; 31] = [
    1.0,
    5.772_156_649_015_328_606_1e-1,
    -6.558_780_715_202_538_810_8e-1,
    -4.200_263_503_409_523_552_9e-2,
    1.665_386_113_822_914_895e-1,
    -4.219_773_455_554_433_674_8e-2,
    -9.621_971_527_876_973_562_1e-3,
    7.218_943_246_663_099_542_4e-3,
    -1.165_167_591_859_065_112_1e-3,
    -2.152_416_741_149_509_728_2e-4,
    1.280_502_823_881_161_861_5e-4,
    -2.013_485_478_078_823_865_6e-5,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
    1.714_406_321_927_337_433_4e-20,
    1.337_351_730_493_693_114_9e-22,
];

fn rgamma1p_series(x: f64) -> f64 {
    RGAMMA1P_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `1/Γ(1+x)` for `-1 ≤ x ≤ 1`. The series is only summed on `|x| ≤ 1/2`;
/// the outer halves are shifted in by one step of `Γ(1+x) = x Γ(x)`.
pub(crate) fn rgamma1p(x: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&x));
    if x < -0.5 {
        (1.0 + x) * rgamma1p_series(1.0 + x)
    } else if x > 0.5 {
        rgamma1p_series(x - 1.0) / x
    } else {
        rgamma1p_series(x)
    }
}

/// Temme's `g1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / 2μ` and `g2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2`,
/// taken as the odd and even parts of the `1/Γ(1+x)` series.
fn temme_g(mu: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let even: f64 = RGAMMA1P_TAYLOR
        .iter()
        .step_by(2)
        .rev()
        .fold(0.0, |acc, &c| acc * mu2 + c);
    let odd: f64 = RGAMMA1P_TAYLOR
        .iter()
        .skip(1)
        .step_by(2)
        .rev()
        .fold(0.0, |acc, &c| acc * mu2 + c);
    (-odd, even)
}

/// Scaled `(e^x K_μ(x), e^x K_{μ+1}(x))` from Temme's series, `|μ| ≤ 1/2`, `0 < x ≤ 2`.
fn k_scaled_temme(mu: f64, x: f64) -> (f64, f64) {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let half_x_mu = (mu * ln_half_x).exp();
    let pi_mu = PI * mu;
    let sigma = -mu * ln_half_x;
    let sinrat = if pi_mu.abs() < f64::EPSILON { 1.0 } else { pi_mu / pi_mu.sin() };
    let sinhrat = if sigma.abs() < f64::EPSILON { 1.0 } else { sigma.sinh() / sigma };

    let (g1, g2) = temme_g(mu);
    let gamma_1pmu = 1.0 / (g2 - mu * g1);
    let gamma_1mmu = 1.0 / (g2 + mu * g1);

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_mu * gamma_1pmu;
    let mut qk = 0.5 * half_x_mu * gamma_1mmu;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fk = (kf * fk + pk + qk) / (kf * kf - mu * mu);
        ck *= half_x * half_x / kf;
        pk /= kf - mu;
        qk /= kf + mu;
        let hk = -kf * fk + pk;
        let del0 = ck * fk;
        sum0 += del0;
        sum1 += ck * hk;
        if del0.abs() < 0.5 * sum0.abs() * f64::EPSILON {
            break;
        }
    }
    let ex = x.exp();
    (sum0 * ex, sum1 * 2.0 / x * ex)
}

/// Scaled `(e^x K_μ(x), e^x K_{μ+1}(x))` from Steed's CF2, `|μ| ≤ 1/2`, `x ≥ 2`.
fn k_scaled_steed_cf2(mu: f64, x: f64) -> (f64, f64) {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    for i in 2..MAX_ITER {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi *= bi * di - 1.0;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    hi *= -a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - hi) / x;
    (k_mu, k_mu1)
}

fn k_pair_scaled(mu: f64, x: f64) -> (f64, f64) {
    if x <= TEMME_CROSSOVER {
        k_scaled_temme(mu, x)
    } else {
        k_scaled_steed_cf2(mu, x)
    }
}

fn check_argument(z: f64) -> Result<()> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Bessel argument z = {z} must be positive and finite")))
    }
}

/// Scaled `(e^z K_ν(z), e^z K_{ν±1}(z))`, where the second member is
/// `K_{ν+1}` when `ν ≤ 1/2` and `K_{ν-1}` otherwise.
fn k_with_neighbour_scaled(nu: f64, z: f64) -> (f64, f64) {
    if nu <= 0.5 {
        k_pair_scaled(nu, z)
    } else {
        let (k_lower, k_nu) = k_pair_scaled(nu - 1.0, z);
        (k_nu, k_lower)
    }
}

/// `e^z K_ν(z)`.
pub fn bessel_k_scaled(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    let (k, _) = k_with_neighbour_scaled(order.value(), z);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::Range(format!("K_{}({z}) overflows", order.value())))
    }
}

/// Modified Bessel function of the second kind, `K_ν(z)`.
///
/// Positive and decreasing in `z`. Fails with a range error when the result
/// over- or underflows a double.
pub fn bessel_k(order: Order, z: f64) -> Result<f64> {
    let k = bessel_k_scaled(order, z)? * (-z).exp();
    if k.is_finite() && k > 0.0 {
        Ok(k)
    } else {
        Err(Error::Range(format!("K_{}({z}) = {k} is not representable", order.value())))
    }
}

/// `z K'_ν(z) / K_ν(z)`.
///
/// Tends to `-ν` as `z → 0` (`ν > 0`), to roughly `1/ln z` for `ν = 0`, and
/// to `-z - 1/2` for large `z`. Finite for every positive `z` because the
/// ratio is formed from scaled functions.
pub fn bessel_k_logderiv(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    let nu = order.value();
    let (k_nu, k_nb) = k_with_neighbour_scaled(nu, z);
    let ld = if nu <= 0.5 {
        // K'_ν = (ν/z) K_ν - K_{ν+1}
        nu - z * k_nb / k_nu
    } else {
        // K'_ν = -(ν/z) K_ν - K_{ν-1}
        -nu - z * k_nb / k_nu
    };
    if ld.is_finite() {
        Ok(ld)
    } else {
        Err(Error::Range(format!("log-derivative of K_{nu} at z = {z} is not finite")))
    }
}

/// `K'_ν(z)`.
pub fn bessel_k_derivative(order: Order, z: f64) -> Result<f64> {
    Ok(bessel_k(order, z)? * bessel_k_logderiv(order, z)? / z)
}

/// Leading small-argument form of `K_ν(z)`.
///
/// For `0 < ν < 1` this is the two-term expression obtained by keeping only
/// the leading power of `I_{±ν}` in `K_ν = (π/2)(I_{-ν} - I_ν)/sin νπ`. At the
/// ν = 1 endpoint (where the two-term form is singular) only the `½Γ(ν)(z/2)^{-ν}`
/// term is kept; for `ν = 0` the form is `-ln z`. Diagnostic use only.
pub fn bessel_k_smallz(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    let nu = order.value();
    if order.is_zero() {
        return Ok(-z.ln());
    }
    let half_z = 0.5 * z;
    if nu > NU_CLOSED_FORM_MAX {
        return Ok(0.5 * half_z.powf(-nu) / (nu * rgamma1p(nu)));
    }
    let prefactor = 0.5 * PI / (PI * nu).sin();
    Ok(prefactor * (half_z.powf(-nu) * rgamma1p(-nu) - half_z.powf(nu) * rgamma1p(nu)))
}

/// `Γ(1+ν) / Γ(1-ν)` for `0 < ν < 1`.
pub fn gamma_ratio(order: Order) -> Result<f64> {
    let nu = order.value();
    if order.is_zero() {
        return Err(Error::domain("gamma_ratio is not used at nu = 0; use the nu = 0 branch"));
    }
    if nu > NU_CLOSED_FORM_MAX {
        return Err(Error::domain(format!(
            "gamma_ratio undefined at nu = {nu}: Gamma(1 - nu) has a pole at nu = 1"
        )));
    }
    if nu == 0.5 {
        return Ok(0.5);
    }
    Ok(rgamma1p(-nu) / rgamma1p(nu))
}

/// Power series for `I_s(z)` and `I'_s(z)`, `|s| ≤ 1`.
fn bessel_i_series(s: f64, z: f64) -> (f64, f64) {
    let half_z = 0.5 * z;
    let q = half_z * half_z;
    let mut term = half_z.powf(s) * rgamma1p(s);
    let mut sum = term;
    let mut dsum = s * term;
    for m in 1..MAX_ITER {
        let mf = m as f64;
        term *= q / (mf * (mf + s));
        sum += term;
        dsum += (2.0 * mf + s) * term;
        if term.abs() < f64::EPSILON * sum.abs() * 0.25 {
            break;
        }
    }
    (sum, dsum / z)
}

/// Modified Bessel function of the first kind, `I_ν(z)`.
pub fn bessel_i(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(bessel_i_series(order.value(), z).0)
}

/// `I'_ν(z)`.
pub fn bessel_i_derivative(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(bessel_i_series(order.value(), z).1)
}

/// `I_{-ν}(z)`, the second solution used in the connection formula for `K_ν`.
pub fn bessel_i_reflected(order: Order, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(bessel_i_series(-order.value(), z).0)
}

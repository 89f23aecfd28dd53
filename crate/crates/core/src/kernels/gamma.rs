//! Gamma-function primitives used by the Abel-kernel normalizations.

use std::f64::consts::PI;

use crate::error::{domain, Result};

// Lanczos approximation, g = 7, nine-term series.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument whose Gamma value is representable as an `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.6;

/// Gamma function for positive real arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("x", x, "gamma requires a finite x > 0"));
    }
    if x > GAMMA_MAX_ARG {
        return Err(domain("x", x, "gamma overflows f64 beyond 171.6"));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 23.0 {
        // exact factorials
        return (1..x as u32).fold(1.0, |acc, n| acc * n as f64);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    let x = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    // split the power so that large arguments do not overflow before exp(-w)
    let half = w.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * ((-w).exp() * half) * series
}

/// Euler Beta function `B(p, q) = Γ(p)Γ(q)/Γ(p+q)`.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    let gp = gamma(p)?;
    let gq = gamma(q)?;
    let gpq = gamma(p + q)?;
    Ok(gp * gq / gpq)
}

pub(crate) fn beta_pos(p: f64, q: f64) -> f64 {
    gamma_pos(p) * gamma_pos(q) / gamma_pos(p + q)
}

/// Normalization `κ(α) = Γ(α)Γ(1-α)` of the Abel associate kernel.
///
/// The argument is folded onto `[1/2, 1)` before evaluation, so `kappa(a)` and
/// `kappa(1.0 - a)` return bit-identical values.
pub fn kappa(alpha0: f64) -> Result<f64> {
    if !alpha0.is_finite() || alpha0 <= 0.0 || alpha0 >= 1.0 {
        return Err(domain("alpha0", alpha0, "kappa requires 0 < alpha0 < 1"));
    }
    Ok(kappa_unchecked(alpha0))
}

pub(crate) fn kappa_unchecked(alpha0: f64) -> f64 {
    let hi = if alpha0 >= 0.5 { alpha0 } else { 1.0 - alpha0 };
    // exact: hi lies in [1/2, 1]
    let lo = 1.0 - hi;
    gamma_pos(lo) * gamma_pos(hi)
}

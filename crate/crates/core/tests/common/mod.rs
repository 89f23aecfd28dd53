//! Reference machinery shared by the integration tests. Nothing here calls
//! into the library's quadrature, so agreement is an independent check.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Gamma at 40 significant digits.
pub const GAMMA_REFERENCES: [(f64, f64); 10] = [
    (0.1, 9.513_507_698_668_731_836_3),
    (0.01, 99.432_585_119_150_603_714),
    (1.0 / 3.0, 2.678_938_534_707_747_633_7),
    (0.999, 1.000_578_205_629_358_648),
    (2.5, 1.329_340_388_179_137_020_5),
    (3.7, 4.170_651_783_796_603_165_4),
    (7.25, 1_155.381_013_919_989_687_2),
    (10.5, 1_133_278.388_948_785_567_3),
    (24.3, 6.678_095_134_448_036_512_6e22),
    (49.9, 4.118_011_034_253_058_041_9e62),
];

/// `g(t)` and `g'(t)` for `α(t) = 0.5 + t/5`, 40-digit quadrature.
pub const G_PROFILE_A: [(f64, f64, f64); 4] = [
    (0.0625, 1.020_010_731_821_535_775_8, 0.221_649_556_187_617_655_9),
    (0.125, 1.031_461_740_677_940_792_1, 0.152_480_096_528_092_632),
    (0.25, 1.045_594_074_839_560_707_1, 0.081_383_224_415_353_380_691),
    (0.5, 1.055_753_018_805_896_531_2, 0.008_059_263_645_824_104_079_7),
];

/// `g(t)` for `α(t) = 0.6 - t/10`.
pub const G_PROFILE_B: [(f64, f64); 2] = [
    (0.25, 0.981_543_461_841_188_015_11),
    (0.5, 0.976_816_335_490_467_212_78),
];

/// `∫_0^{0.5} |g'|` for `α(t) = 0.5 + t/5`; `g' > 0` there, so this is `g(0.5) - 1`.
pub const GPRIME_L1_PROFILE_A: f64 = 0.055_753_018_805_896_531_2;

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Double-exponential quadrature of `∫_a^b f`. The integrand receives
/// `(x, x - a, b - x)` with both distances computed without cancellation,
/// so integrable endpoint singularities are handled.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |tau: f64| -> Option<f64> {
        let u = FRAC_PI_2 * tau.sinh();
        let e = (-2.0 * u.abs()).exp();
        // 1 - tanh|u|, computed directly
        let comp = 2.0 * e / (1.0 + e);
        let d = half * comp;
        // below this distance the neglected mass of any integrable power is < 1e-15
        if d < 1e-300 || d >= 2.0 * half {
            return None;
        }
        let (left, right) = if u >= 0.0 { (2.0 * half - d, d) } else { (d, 2.0 * half - d) };
        let x = if u >= 0.0 { b - d } else { a + d };
        let cosh_u = u.cosh();
        let w = half * FRAC_PI_2 * tau.cosh() / (cosh_u * cosh_u);
        Some(w * f(x, left, right))
    };
    let tau_max = 6.2;
    let mut h = 0.5;
    let mut sum = node(0.0).unwrap_or(0.0);
    let mut k = 1;
    while k as f64 * h <= tau_max {
        let tau = k as f64 * h;
        sum += node(tau).unwrap_or(0.0) + node(-tau).unwrap_or(0.0);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        let mut extra = 0.0;
        while k as f64 * h <= tau_max {
            let tau = k as f64 * h;
            extra += node(tau).unwrap_or(0.0) + node(-tau).unwrap_or(0.0);
            k += 2;
        }
        sum += extra;
        let next = sum * h;
        let done = (next - estimate).abs() <= 1e-15 * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

pub fn kappa_reflection(alpha: f64) -> f64 {
    PI / (PI * alpha).sin()
}

/// `g(t) = ∫_0^t K(t - s)·k(s) ds` with `K = t^{α0-1}/κ` and `k = t^{-α(t)}`,
/// by direct quadrature of the convolution.
pub fn g_direct(alpha: impl Fn(f64) -> f64, t: f64) -> f64 {
    let a0 = alpha(0.0);
    let kap = kappa_reflection(a0);
    tanh_sinh(|s, ds, dts| dts.powf(a0 - 1.0) * ds.powf(-alpha(s)) / kap, 0.0, t)
}

/// `∫_0^t k(t - s)·v(s) ds` for a piecewise-linear `v` through `(nodes, values)`,
/// panel by panel.
pub fn convolve_piecewise_linear(
    k: impl Fn(f64) -> f64,
    nodes: &[f64],
    values: &[f64],
    upto: usize,
) -> f64 {
    let t = nodes[upto];
    (0..upto)
        .map(|j| {
            let (a, b) = (nodes[j], nodes[j + 1]);
            let (va, vb) = (values[j], values[j + 1]);
            tanh_sinh(
                |s, da, db| {
                    let v = va + (vb - va) * da / (b - a);
                    // distance to t, exact on the last panel
                    let x = if j + 1 == upto { db } else { t - s };
                    k(x) * v
                },
                a,
                b,
            )
        })
        .sum()
}


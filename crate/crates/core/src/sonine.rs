//! Generalized Sonine condition: `g = K∗k`, its value at the origin, its
//! derivative, and the power-law bound on `g'` near `t = 0`.
//!
//! For Abel pairs the substitution `s = t·z` turns `g` into
//!
//! ```text
//! g(t) = (1/κ) ∫_0^1 (tz)^{α(0)-α(tz)} (1-z)^{α(0)-1} z^{-α(0)} dz,
//! ```
//!
//! whose integrand can be differentiated in `t` under the integral sign.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kernels::{ExponentFunction, SoninePair};
use crate::mesh_quad::{
    convolve_pair, CompensatedSum, Interp, Mesh, Origin, PairConvolver, QuadraticRule,
    SampledFunction,
};

/// Minimum number of z-panels per half interval.
pub const MIN_Z_PANELS: usize = 16;

/// Below this magnitude on the fit window, `g'` is treated as identically zero.
pub const ZERO_GPRIME_THRESHOLD: f64 = 1e-6;

/// Margin kept below `1 - α(0)` by an accepted exponent fit.
pub const EPS_MARGIN: f64 = 0.01;

/// Minimum coefficient of determination of an accepted exponent fit.
pub const MIN_R_SQUARED: f64 = 0.9;

/// Piecewise-quadratic product rule for the z-substituted form of `g` and `g'`.
#[derive(Debug, Clone)]
pub struct SubstitutedRule {
    af: ExponentFunction,
    alpha0: f64,
    kappa: f64,
    // weight z^{-α(0)} on [0, 1/2], graded toward z = 0
    left: QuadraticRule,
    // weight (1-z)^{α(0)-1} on [1/2, 1], in x = 1 - z
    right: QuadraticRule,
}

impl SubstitutedRule {
    /// `panels` uniform panels on each half of `[0, 1]` (rounded up to even).
    pub fn new(pair: &SoninePair, panels: usize) -> Result<Self> {
        let af = pair
            .exponent_function()
            .ok_or(Error::NotVariableExponent("the substituted form needs an Abel pair"))?
            .clone();
        if panels < MIN_Z_PANELS {
            return Err(domain("M", panels as f64, "at least 16 panels per half"));
        }
        let alpha0 = af.alpha0();
        let kappa = pair.kappa().expect("Abel pairs carry kappa");
        Ok(Self {
            // the factor behaves like 1 + c·z·ln z at the origin
            left: QuadraticRule::graded(panels, 1.0 - alpha0, 0.5, 3.0 / (2.0 - alpha0)),
            right: QuadraticRule::new(panels, alpha0, 0.5),
            af,
            alpha0,
            kappa,
        })
    }

    #[inline]
    fn factor(&self, t: f64, z: f64) -> f64 {
        if z == 0.0 {
            return 1.0;
        }
        let s = t * z;
        ((self.alpha0 - self.af.value(s)) * s.ln()).exp()
    }

    #[inline]
    fn factor_dt(&self, t: f64, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        let s = t * z;
        let a = self.af.value(s);
        let h = ((self.alpha0 - a) * s.ln()).exp();
        h * (-z * self.af.derivative(s) * s.ln() + (self.alpha0 - a) / t)
    }

    fn integrate(&self, inner: impl Fn(f64) -> f64) -> f64 {
        let a = self.alpha0;
        let left = self.left.integrate(|z| inner(z) * (1.0 - z).powf(a - 1.0));
        let right = self.right.integrate(|x| inner(1.0 - x) * (1.0 - x).powf(-a));
        (left + right) / self.kappa
    }

    pub fn g(&self, t: f64) -> f64 {
        self.integrate(|z| self.factor(t, z))
    }

    pub fn gprime(&self, t: f64) -> f64 {
        self.integrate(|z| self.factor_dt(t, z))
    }
}

/// `g(t)` from the z-substituted integral with `panels` panels per half.
pub fn compute_g_substituted(pair: &SoninePair, t: f64, panels: usize) -> Result<f64> {
    if !(t > 0.0 && t <= pair.horizon() * (1.0 + 1e-12)) {
        return Err(domain("t", t, "t must lie in (0, b]"));
    }
    Ok(SubstitutedRule::new(pair, panels)?.g(t))
}

/// `g'(t_i)` for `i = 1..=N`, by differentiating the substituted integrand in
/// `t`. The value at `t_0` is undefined.
pub fn estimate_gprime(pair: &SoninePair, mesh: &Mesh, panels: usize) -> Result<SampledFunction> {
    let rule = SubstitutedRule::new(pair, panels)?;
    sample_on_mesh(mesh, |t| rule.gprime(t))
}

fn sample_on_mesh(mesh: &Mesh, f: impl Fn(f64) -> f64 + Sync) -> Result<SampledFunction> {
    let mut values: Vec<f64> = mesh.nodes()[1..].par_iter().map(|&t| f(t)).collect();
    values.insert(0, f64::NAN);
    SampledFunction::new(mesh, values, Interp::PiecewiseLinear, Origin::PowerLaw { exponent: 0.0 })
}

fn phi(t: f64) -> f64 {
    t * t.ln().abs()
}

/// Extrapolates `g(0)` from samples at geometrically decreasing `t`.
///
/// The deviation is modelled as `c·(t|ln t|)^p`; `p` is read off the three
/// smallest samples (falling back to `p = 1` when the data do not determine
/// it) and the model is then evaluated at `t = 0`.
pub fn estimate_g0(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::Extrapolation(format!("need >= 3 samples, got {}", samples.len())));
    }
    if samples.iter().any(|(t, g)| !(t.is_finite() && *t > 0.0) || !g.is_finite()) {
        return Err(Error::Extrapolation("samples must be finite with t > 0".into()));
    }
    let ratio = samples[1].0 / samples[0].0;
    if ratio >= 1.0 {
        return Err(Error::Extrapolation("t must decrease".into()));
    }
    for w in samples.windows(2) {
        let r = w[1].0 / w[0].0;
        if (r - ratio).abs() > 1e-6 * ratio {
            return Err(Error::Extrapolation(format!(
                "non-geometric spacing: ratio {r} vs {ratio}"
            )));
        }
    }
    let n = samples.len();
    let [(ta, ga), (tb, gb), (tc, gc)] = [samples[n - 3], samples[n - 2], samples[n - 1]];
    if ta >= std::f64::consts::E.recip() {
        return Err(Error::Extrapolation("smallest samples must lie below 1/e".into()));
    }
    let (d1, d2) = (ga - gb, gb - gc);
    if d1 == 0.0 && d2 == 0.0 {
        return Ok(gc);
    }
    let (pa, pb, pc) = (phi(ta), phi(tb), phi(tc));
    let model_ratio = |p: f64| (pa.powf(p) - pb.powf(p)) / (pb.powf(p) - pc.powf(p));
    let target = d1 / d2;
    let (mut lo, mut hi) = (0.2, 5.0);
    let p = if target.is_finite() && target >= model_ratio(lo) && target <= model_ratio(hi) {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if model_ratio(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    } else {
        1.0
    };
    let c = d2 / (pb.powf(p) - pc.powf(p));
    Ok(gc - c * pc.powf(p))
}

/// Least-squares fit `|g'(t)| ≈ C·t^{-ε}` near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsFit {
    pub c: f64,
    pub eps: f64,
    pub r_squared: f64,
    pub points: usize,
    pub pass: bool,
}

/// Outcome of a generalized Sonine condition check.
#[derive(Debug, Clone)]
pub struct GscReport {
    /// `g` on the mesh; `g(t_0)` holds the extrapolated `g0`.
    pub g: SampledFunction,
    pub g0: f64,
    /// `g'` on nodes `1..=N`, with the fitted exponent as its origin model.
    pub gprime: SampledFunction,
    /// `max_i |g(t_i) - 1|` over `i >= 1`.
    pub sc_residual: f64,
    pub g0_defect: f64,
    pub eps_fit: EpsFit,
    /// Estimate of `∫_0^b |g'|`.
    pub gprime_l1: f64,
    /// `max_i |g_conv(t_i) - g_subst(t_i)|` when the substituted form applies.
    pub route_gap: Option<f64>,
    /// `g0_defect <= g0_tolerance`, `eps_fit.pass`, and finite `gprime_l1`.
    pub passes: bool,
}

#[derive(Debug, Clone)]
pub struct GscOptions {
    /// Panels per half for the substituted form.
    pub z_panels: usize,
    /// Samples `t = min(b, 1)·2^{-j}` for `j` in this range feed `estimate_g0`.
    pub g0_levels: std::ops::RangeInclusive<i32>,
    pub g0_tolerance: f64,
}

impl Default for GscOptions {
    fn default() -> Self {
        Self {
            z_panels: 256,
            g0_levels: 4..=12,
            g0_tolerance: 1e-3,
        }
    }
}

fn lagrange_slope(xs: [f64; 3], ys: [f64; 3], x: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..3 {
        let mut dj = 0.0;
        for m in 0..3 {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (xs[j] - xs[m]);
            for l in 0..3 {
                if l != j && l != m {
                    term *= (x - xs[l]) / (xs[j] - xs[l]);
                }
            }
            dj += term;
        }
        acc += dj * ys[j];
    }
    acc
}

/// Second-order finite differences of `g` on nodes `1..=N`, using `g0` at `t_0`.
fn finite_difference_gprime(g: &SampledFunction, g0: f64) -> Result<SampledFunction> {
    let t = g.mesh().nodes();
    let n = t.len() - 1;
    let mut y = g.values().to_vec();
    y[0] = g0;
    let mut d = vec![f64::NAN; n + 1];
    for i in 1..n {
        d[i] = lagrange_slope([t[i - 1], t[i], t[i + 1]], [y[i - 1], y[i], y[i + 1]], t[i]);
    }
    d[n] = lagrange_slope([t[n - 2], t[n - 1], t[n]], [y[n - 2], y[n - 1], y[n]], t[n]);
    SampledFunction::new(g.mesh(), d, Interp::PiecewiseLinear, Origin::PowerLaw { exponent: 0.0 })
}

/// Fits `ln|g'| = ln C - ε ln t` on nodes `t_2 <= t <= b/4`.
pub fn fit_gprime_exponent(gprime: &SampledFunction, alpha0: f64) -> EpsFit {
    let mesh = gprime.mesh();
    let quarter = 0.25 * mesh.horizon();
    let window: Vec<(f64, f64)> = (2..=mesh.panels())
        .map(|i| (mesh.node(i), gprime.value(i)))
        .filter(|&(t, _)| t <= quarter)
        .collect();
    let peak = window.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    let limit = 1.0 - alpha0 - EPS_MARGIN;
    if !window.is_empty() && peak <= ZERO_GPRIME_THRESHOLD {
        return EpsFit {
            c: peak,
            eps: 0.0,
            r_squared: 1.0,
            points: window.len(),
            pass: limit > 0.0,
        };
    }
    let pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|(_, v)| *v != 0.0)
        .map(|&(t, v)| (t.ln(), v.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return EpsFit {
            c: f64::NAN,
            eps: f64::NAN,
            r_squared: f64::NAN,
            points: pts.len(),
            pass: false,
        };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let eps = -slope;
    // a derivative that does not grow toward the origin is integrable
    // whether or not a power law describes it
    let pass = eps <= limit && (r_squared >= MIN_R_SQUARED || eps <= 0.0);
    EpsFit {
        c: intercept.exp(),
        eps,
        r_squared,
        points: pts.len(),
        pass,
    }
}

/// The exponent used for the power-law model of `g'` on the first panel.
pub(crate) fn model_exponent(fit: &EpsFit, alpha0: f64) -> f64 {
    let cap = (1.0 - alpha0 - EPS_MARGIN).max(0.0);
    if fit.eps.is_finite() {
        fit.eps.clamp(0.0, cap)
    } else {
        0.0
    }
}

/// `∫_0^b |g'|`: `C·t^{-ε}` on the first panel, trapezoids elsewhere.
pub fn gprime_l1(gprime: &SampledFunction, eps: f64) -> f64 {
    let t = gprime.mesh().nodes();
    let v = gprime.values();
    let mut acc = CompensatedSum::new();
    acc.add(v[1].abs() * t[1] / (1.0 - eps));
    for i in 1..t.len() - 1 {
        acc.add(0.5 * (t[i + 1] - t[i]) * (v[i].abs() + v[i + 1].abs()));
    }
    acc.value()
}

pub fn check_gsc(pair: &SoninePair, mesh: &Mesh) -> Result<GscReport> {
    check_gsc_with(pair, mesh, &GscOptions::default())
}

pub fn check_gsc_with(pair: &SoninePair, mesh: &Mesh, opts: &GscOptions) -> Result<GscReport> {
    let b = mesh.horizon();
    if b > pair.horizon() * (1.0 + 1e-12) {
        return Err(domain("b", b, "mesh extends beyond the pair horizon"));
    }
    let (assoc, k) = (pair.associate(), pair.k());
    let g = convolve_pair(assoc, k, mesh)?;
    let scale = b.min(1.0);
    let sample_times: Vec<f64> = opts.g0_levels.clone().map(|j| scale * 2f64.powi(-j)).collect();

    let (route_gap, raw_gprime, samples) = if pair.exponent_function().is_some() {
        let rule = SubstitutedRule::new(pair, opts.z_panels)?;
        let gap = (1..=mesh.panels())
            .into_par_iter()
            .map(|i| (g.value(i) - rule.g(mesh.node(i))).abs())
            .reduce(|| 0.0, f64::max);
        let gprime = sample_on_mesh(mesh, |t| rule.gprime(t))?;
        let samples: Vec<(f64, f64)> = sample_times.iter().map(|&t| (t, rule.g(t))).collect();
        (Some(gap), Some(gprime), samples)
    } else {
        let conv = PairConvolver::new(assoc, k, mesh.panels().max(256))?;
        let samples = sample_times.iter().map(|&t| (t, conv.eval(assoc, k, t))).collect();
        (None, None, samples)
    };

    let g0 = estimate_g0(&samples)?;
    let raw_gprime = match raw_gprime {
        Some(gp) => gp,
        None => finite_difference_gprime(&g, g0)?,
    };
    let sc_residual = (1..=mesh.panels()).fold(0.0f64, |m, i| m.max((g.value(i) - 1.0).abs()));
    let g0_defect = (g0 - 1.0).abs();
    let alpha0 = pair.alpha0();
    let eps_fit = fit_gprime_exponent(&raw_gprime, alpha0);
    let eps = model_exponent(&eps_fit, alpha0);
    let l1 = gprime_l1(&raw_gprime, eps);
    let passes = g0_defect <= opts.g0_tolerance && eps_fit.pass && l1.is_finite();
    Ok(GscReport {
        g: g.with_origin(Origin::Regular, g0),
        g0,
        gprime: raw_gprime.with_origin(Origin::PowerLaw { exponent: eps }, f64::NAN),
        sc_residual,
        g0_defect,
        eps_fit,
        gprime_l1: l1,
        route_gap,
        passes,
    })
}

use std::sync::OnceLock;

use rayon::prelude::*;

use super::weights::{linear_panel_weights, CompensatedSum, UniformLinearRule};
use super::{Interp, Mesh, Origin, SampledFunction};
use crate::error::{domain, Error, Result};
use crate::kernels::{beta_pos, KernelSpec};

/// A factor of the form `A(x) = x^{-λ}·s(x)` with `s` bounded near `x = 0`.
pub trait SingularFactor {
    /// The exponent `λ ∈ [0, 1)`.
    fn singular_exponent(&self) -> f64;
    /// `s(x) = x^{λ}·A(x)`, including its limit at `x = 0`.
    fn smooth_part(&self, x: f64) -> f64;
    /// `A(x)` for `x > 0`.
    fn value_at(&self, x: f64) -> f64 {
        self.smooth_part(x) * x.powf(-self.singular_exponent())
    }
}

impl SingularFactor for KernelSpec {
    fn singular_exponent(&self) -> f64 {
        self.leading_exponent()
    }

    fn smooth_part(&self, x: f64) -> f64 {
        self.smooth(x)
    }

    fn value_at(&self, x: f64) -> f64 {
        self.value(x)
    }
}

/// Weights `c_j` (`j = 0..=i`) with `Σ_j c_j φ_j ≈ ∫_0^{t_i} A(t_i - s) φ(s) ds`.
///
/// `A(t_i - s)` is factored as `(t_i - s)^{-λ}·s_A(t_i - s)`; the power is
/// integrated exactly and `s_A(t_i - s)·φ(s)` is interpolated on each panel
/// according to `interp`. A power-law origin `φ ~ s^{-γ}` replaces the first
/// panel by `φ_1·(s/t_1)^{-γ}`, leaves `c_0 = 0`, and (for `γ > 0` with linear
/// interpolation) moves `s^{-γ}` into the exact part on every panel.
pub(crate) fn row_weights<A: SingularFactor + ?Sized>(
    a: &A,
    mesh: &Mesh,
    i: usize,
    interp: Interp,
    origin: Origin,
    out: &mut Vec<f64>,
) {
    let t = mesh.nodes();
    let ti = t[i];
    let lambda = a.singular_exponent();
    let beta = 1.0 - lambda;
    out.clear();
    out.resize(i + 1, 0.0);
    let gamma = origin.exponent();
    if gamma > 0.0 && interp == Interp::PiecewiseLinear {
        power_origin_row(a, t, i, lambda, gamma, out);
        return;
    }
    let first = if origin.is_regular() { 0 } else { 1 };
    for k in first..i {
        let x_near = ti - t[k + 1];
        let x_far = ti - t[k];
        let (near, far) = linear_panel_weights(x_near, t[k + 1] - t[k], beta);
        let s_near = a.smooth_part(x_near);
        let s_far = a.smooth_part(x_far);
        match interp {
            Interp::PiecewiseLinear => {
                out[k + 1] += near * s_near;
                out[k] += far * s_far;
            }
            Interp::PiecewiseConstantLeft => {
                out[k] += near * s_near + far * s_far;
            }
        }
    }
    if !origin.is_regular() {
        first_panel(a, t, i, lambda, gamma, out);
    }
}

fn first_panel<A: SingularFactor + ?Sized>(
    a: &A,
    t: &[f64],
    i: usize,
    lambda: f64,
    gamma: f64,
    out: &mut [f64],
) {
    let (t1, ti) = (t[1], t[i]);
    let beta = 1.0 - lambda;
    if i == 1 {
        // both singular: Beta moments with s_A interpolated linearly
        out[1] += t1.powf(beta)
            * (a.smooth_part(t1) * beta_pos(1.0 - gamma, beta + 1.0)
                + a.smooth_part(0.0) * beta_pos(2.0 - gamma, beta));
    } else {
        let (w0, w1) = origin_moments(t1, ti, lambda, gamma);
        out[1] += t1.powf(gamma) * (w0 * a.smooth_part(ti) + w1 * a.smooth_part(ti - t1));
    }
}

/// Row weights for `φ(s) = s^{-γ}ψ(s)` with `s_A·ψ` piecewise linear.
fn power_origin_row<A: SingularFactor + ?Sized>(
    a: &A,
    t: &[f64],
    i: usize,
    lambda: f64,
    gamma: f64,
    out: &mut [f64],
) {
    let ti = t[i];
    for k in 1..i {
        let (lo, hi) = (t[k], t[k + 1]);
        let (w_lo, w_hi) = if k + 1 == i {
            adjacent_moments(hi - lo, ti, lambda, gamma)
        } else {
            gauss_moments(lo, hi, ti, lambda, gamma)
        };
        out[k] += w_lo * lo.powf(gamma) * a.smooth_part(ti - lo);
        out[k + 1] += w_hi * hi.powf(gamma) * a.smooth_part(ti - hi);
    }
    first_panel(a, t, i, lambda, gamma, out);
}

pub(super) const SERIES_TOL: f64 = 1e-17;
pub(super) const SERIES_MAX_TERMS: usize = 20_000;

/// `∫_0^{t1} (T-s)^{-λ} s^{-γ} ℓ_j(s) ds` for the hats at `0` and `t1`, by
/// expanding `(T-s)^{-λ}` about `s = 0`.
fn origin_moments(t1: f64, big_t: f64, lambda: f64, gamma: f64) -> (f64, f64) {
    let rho = t1 / big_t;
    let (mut w0, mut w1) = (0.0, 0.0);
    let mut coeff = 1.0;
    let mut pow = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        let p = nf + 1.0 - gamma;
        let hi = coeff * pow / (p + 1.0);
        let lo = coeff * pow * (1.0 / p - 1.0 / (p + 1.0));
        w0 += lo;
        w1 += hi;
        if lo.abs() + hi.abs() <= SERIES_TOL * (w0 + w1).abs() {
            break;
        }
        coeff *= (lambda + nf) / (nf + 1.0);
        pow *= rho;
    }
    let scale = big_t.powf(-lambda) * t1.powf(1.0 - gamma);
    (scale * w0, scale * w1)
}

/// `∫_{T-h}^{T} (T-s)^{-λ} s^{-γ} ℓ_j(s) ds` for the hats at `T - h` and `T`,
/// by expanding `s^{-γ}` about `s = T`.
fn adjacent_moments(h: f64, big_t: f64, lambda: f64, gamma: f64) -> (f64, f64) {
    let beta = 1.0 - lambda;
    let rho = h / big_t;
    let (mut w_lo, mut w_hi) = (0.0, 0.0);
    let mut coeff = 1.0;
    let mut pow = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        let p = nf + beta;
        let lo = coeff * pow / (p + 1.0);
        let hi = coeff * pow * (1.0 / p - 1.0 / (p + 1.0));
        w_lo += lo;
        w_hi += hi;
        if lo.abs() + hi.abs() <= SERIES_TOL * (w_lo + w_hi).abs() {
            break;
        }
        coeff *= (gamma + nf) / (nf + 1.0);
        pow *= rho;
    }
    let scale = big_t.powf(-gamma) * h.powf(beta);
    (scale * w_lo, scale * w_hi)
}

/// `∫_a^c (T-s)^{-λ} s^{-γ} ℓ_j(s) ds` for `0 < a < c < T` by Gauss-Legendre
/// on sub-panels at least one width away from both singular points.
fn gauss_moments(a: f64, c: f64, big_t: f64, lambda: f64, gamma: f64) -> (f64, f64) {
    let h = c - a;
    let mut acc = (CompensatedSum::new(), CompensatedSum::new());
    let mut stack = vec![(a, c)];
    while let Some((p, q)) = stack.pop() {
        let width = q - p;
        let clearance = p.min(big_t - q);
        if clearance < width {
            let m = 0.5 * (p + q);
            stack.push((p, m));
            stack.push((m, q));
            continue;
        }
        let (nodes, weights) = if clearance >= 8.0 * width {
            gauss_legendre(6)
        } else {
            gauss_legendre(12)
        };
        let half = 0.5 * width;
        let mid = p + half;
        for (x, w) in nodes.iter().zip(weights) {
            let s = mid + half * x;
            let f = half * w * (big_t - s).powf(-lambda) * s.powf(-gamma);
            acc.0.add(f * (c - s) / h);
            acc.1.add(f * (s - a) / h);
        }
    }
    (acc.0.value(), acc.1.value())
}

pub(super) fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static SIX: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static TWELVE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let cell = if n == 6 { &SIX } else { &TWELVE };
    cell.get_or_init(|| legendre_rule(n))
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for j in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (j as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[j] = -x;
        nodes[n - 1 - j] = x;
        weights[j] = w;
        weights[n - 1 - j] = w;
    }
    (nodes, weights)
}

pub(crate) fn weighted_sum(weights: &[f64], values: &[f64], skip_first: bool) -> f64 {
    let start = usize::from(skip_first);
    let acc: CompensatedSum = weights[start..]
        .iter()
        .zip(&values[start..])
        .map(|(w, v)| w * v)
        .collect();
    acc.value()
}

fn check_same_mesh(phi: &SampledFunction, mesh: &Mesh) -> Result<()> {
    if phi.mesh() != mesh {
        return Err(Error::MeshMismatch("sampled function lives on a different mesh".into()));
    }
    Ok(())
}

/// `(K∗φ)(t_i)` for `i = 1..=N` by product integration against the factored
/// kernel; the value at `t_0` is 0.
pub fn convolve_weakly_singular(
    ksing: &KernelSpec,
    phi: &SampledFunction,
    mesh: &Mesh,
) -> Result<SampledFunction> {
    check_same_mesh(phi, mesh)?;
    if mesh.horizon() > ksing.horizon() * (1.0 + 1e-12) {
        return Err(domain("b", mesh.horizon(), "mesh extends beyond the kernel horizon"));
    }
    let lambda = ksing.leading_exponent();
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain("sing_exponent", lambda, "kernel exponent must lie in (0, 1)"));
    }
    Ok(convolve_sampled(ksing, phi, mesh))
}

pub(crate) fn convolve_sampled<A: SingularFactor + Sync + ?Sized>(
    a: &A,
    phi: &SampledFunction,
    mesh: &Mesh,
) -> SampledFunction {
    let skip_first = !phi.origin().is_regular();
    let mut values: Vec<f64> = (1..=mesh.panels())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            row_weights(a, mesh, i, phi.interp(), phi.origin(), buf);
            weighted_sum(buf, phi.values(), skip_first)
        })
        .collect();
    values.insert(0, 0.0);
    SampledFunction::new(mesh, values, Interp::PiecewiseLinear, Origin::Regular)
        .expect("convolution of finite samples is finite")
}

/// Convolution of two weakly singular kernels at arbitrary points, split at
/// `t/2` so that each half carries a single endpoint singularity.
#[derive(Debug, Clone)]
pub struct PairConvolver {
    rule_k: UniformLinearRule,
    rule_assoc: UniformLinearRule,
}

impl PairConvolver {
    /// `panels` uniform panels on each half.
    pub fn new(associate: &KernelSpec, k: &KernelSpec, panels: usize) -> Result<Self> {
        let (lk, la) = (k.leading_exponent(), associate.leading_exponent());
        for (what, e) in [("k exponent", lk), ("K exponent", la)] {
            if !(e > 0.0 && e < 1.0) {
                return Err(domain(what, e, "singularity exponents must lie in (0, 1)"));
            }
        }
        if lk + la >= 2.0 {
            return Err(domain("exponent sum", lk + la, "exponents must sum to < 2"));
        }
        let panels = panels.max(2);
        Ok(Self {
            rule_k: UniformLinearRule::new(panels, 1.0 - lk),
            rule_assoc: UniformLinearRule::new(panels, 1.0 - la),
        })
    }

    /// `∫_0^t K(t - s) k(s) ds`.
    pub fn eval(&self, associate: &KernelSpec, k: &KernelSpec, t: f64) -> f64 {
        let m = 0.5 * t;
        // k singular at s = 0
        let left = self
            .rule_k
            .integrate(m, |s| k.smooth(s) * associate.value(t - s));
        // K singular at s = t; x = t - s
        let right = self
            .rule_assoc
            .integrate(m, |x| associate.smooth(x) * k.value(t - x));
        left + right
    }
}

/// `g(t) = (K∗k)(t)` at a single point with `panels` panels per half.
pub fn convolve_pair_at(associate: &KernelSpec, k: &KernelSpec, t: f64, panels: usize) -> Result<f64> {
    if !(t > 0.0 && t <= associate.horizon().min(k.horizon()) * (1.0 + 1e-12)) {
        return Err(domain("t", t, "convolution point must lie in (0, b]"));
    }
    Ok(PairConvolver::new(associate, k, panels)?.eval(associate, k, t))
}

/// `g(t_i) = (K∗k)(t_i)` for `i = 1..=N`, each node using `N` uniform panels on
/// both halves of `[0, t_i]`. `g(t_0)` is left undefined.
pub fn convolve_pair(associate: &KernelSpec, k: &KernelSpec, mesh: &Mesh) -> Result<SampledFunction> {
    if mesh.horizon() > associate.horizon().min(k.horizon()) * (1.0 + 1e-12) {
        return Err(domain("b", mesh.horizon(), "mesh extends beyond the kernel horizon"));
    }
    let conv = PairConvolver::new(associate, k, mesh.panels())?;
    let mut values: Vec<f64> = mesh.nodes()[1..]
        .par_iter()
        .map(|&t| conv.eval(associate, k, t))
        .collect();
    values.insert(0, f64::NAN);
    SampledFunction::new(
        mesh,
        values,
        Interp::PiecewiseLinear,
        Origin::PowerLaw { exponent: 0.0 },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_classical_abel_pair, KernelSpec};
    use crate::mesh_quad::graded_mesh;
    use std::f64::consts::PI;

    #[test]
    fn inverse_sqrt_against_one() {
        let m = graded_mesh(16, 2.0, 1.0).unwrap();
        let k = KernelSpec::power(1.0, 0.5, 1.0).unwrap();
        let one = SampledFunction::from_fn(&m, Origin::Regular, |_| 1.0).unwrap();
        let c = convolve_weakly_singular(&k, &one, &m).unwrap();
        assert!((c.value(16) - 2.0).abs() < 1e-13);
        assert_eq!(c.value(0), 0.0);
    }

    #[test]
    fn power_law_origin_is_exact_for_pure_powers() {
        // ∫_0^t (t-s)^{-1/2} s^{-1/2} ds = π
        let m = graded_mesh(8, 2.0, 1.0).unwrap();
        let k = KernelSpec::power(1.0, 0.5, 1.0).unwrap();
        let u = SampledFunction::from_fn(&m, Origin::PowerLaw { exponent: 0.5 }, |t| t.powf(-0.5)).unwrap();
        let c = convolve_weakly_singular(&k, &u, &m).unwrap();
        assert!((c.value(1) - PI).abs() < 1e-13);
    }

    #[test]
    fn classical_pair_identity() {
        let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
        let m = graded_mesh(64, 2.0, 1.0).unwrap();
        let g = convolve_pair(pair.associate(), pair.k(), &m).unwrap();
        for i in 1..=64 {
            assert!((g.value(i) - 1.0).abs() < 1e-4);
        }
        assert!(!g.is_defined(0));
    }

    #[test]
    fn mesh_mismatch_detected() {
        let m1 = graded_mesh(8, 2.0, 1.0).unwrap();
        let m2 = graded_mesh(8, 1.0, 1.0).unwrap();
        let k = KernelSpec::power(1.0, 0.5, 1.0).unwrap();
        let one = SampledFunction::from_fn(&m1, Origin::Regular, |_| 1.0).unwrap();
        assert!(matches!(convolve_weakly_singular(&k, &one, &m2), Err(Error::MeshMismatch(_))));
    }
}

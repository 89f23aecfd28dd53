//! Product-integration weights for `∫ x^{β-1} φ(x) dx`, where `x` is the
//! distance to the singular point and `φ` is interpolated by polynomials.

use super::Mesh;
use crate::error::{domain, Error, Result};

/// Below this ratio `h / x_near` the binomial series replaces the closed form.
const SERIES_RATIO: f64 = 0.25;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `Σ_n binom(β-1, n) ρ^n / (n + shift)` for `|ρ| < 1`.
fn binomial_series(beta: f64, rho: f64, shift: f64) -> f64 {
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut acc = 1.0 / shift;
    for n in 0..200 {
        let nf = n as f64;
        coeff *= (beta - 1.0 - nf) / (nf + 1.0);
        power *= rho;
        let term = coeff * power / (nf + 1.0 + shift);
        acc += term;
        if term.abs() <= 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}

/// Weights of the two hat functions on a panel `[x_near, x_near + h]` for the
/// weight `x^{β-1}`: returns `(w_near, w_far)` with
/// `w_near = ∫ x^{β-1} (x_far - x)/h dx` and `w_far = ∫ x^{β-1} (x - x_near)/h dx`.
pub fn linear_panel_weights(x_near: f64, h: f64, beta: f64) -> (f64, f64) {
    debug_assert!(x_near >= 0.0 && h > 0.0 && beta > 0.0);
    let x_far = x_near + h;
    if x_near == 0.0 {
        let total = h.powf(beta) / beta;
        let far = h.powf(beta) / (beta + 1.0);
        return (total - far, far);
    }
    let rho = h / x_near;
    let (total, far) = if rho < SERIES_RATIO {
        let lp = rho.ln_1p();
        let total = x_near.powf(beta) * (beta * lp).exp_m1() / beta;
        // ∫ x^{β-1}(x - x_near) dx = x_near^{β-1} h² ∫_0^1 (1+ρτ)^{β-1} τ dτ
        let first_moment = x_near.powf(beta - 1.0) * h * h * binomial_series(beta, rho, 2.0);
        (total, first_moment / h)
    } else {
        let total = (x_far.powf(beta) - x_near.powf(beta)) / beta;
        let upper = (x_far.powf(beta + 1.0) - x_near.powf(beta + 1.0)) / (beta + 1.0);
        (total, (upper - x_near * total) / h)
    };
    (total - far, far)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain("beta", beta, "beta must lie in (0, 1)"))
    }
}

fn check_index(mesh: &Mesh, i: usize) -> Result<()> {
    if i == 0 || i > mesh.panels() {
        Err(Error::Index {
            index: i,
            max: mesh.panels(),
        })
    } else {
        Ok(())
    }
}

pub(crate) fn product_weights_unchecked(mesh: &Mesh, i: usize, beta: f64) -> Vec<f64> {
    let t = mesh.nodes();
    let ti = t[i];
    let mut w = vec![0.0; i + 1];
    for k in 0..i {
        let (near, far) = linear_panel_weights(ti - t[k + 1], t[k + 1] - t[k], beta);
        w[k + 1] += near;
        w[k] += far;
    }
    w
}

/// Weights `w_j`, `j = 0..=i`, with `Σ_j w_j φ(t_j) = ∫_0^{t_i} (t_i - s)^{β-1} φ(s) ds`
/// for every `φ` that is piecewise linear on the mesh.
pub fn product_weights(mesh: &Mesh, i: usize, beta: f64) -> Result<Vec<f64>> {
    check_index(mesh, i)?;
    check_beta(beta)?;
    Ok(product_weights_unchecked(mesh, i, beta))
}

/// Piecewise-constant-left variant: `φ(s) = φ(t_j)` on `[t_j, t_{j+1})`.
/// Returns `i + 1` weights; the last one is always zero.
pub fn product_weights_constant_left(mesh: &Mesh, i: usize, beta: f64) -> Result<Vec<f64>> {
    check_index(mesh, i)?;
    check_beta(beta)?;
    let t = mesh.nodes();
    let ti = t[i];
    let mut w = vec![0.0; i + 1];
    for k in 0..i {
        let (near, far) = linear_panel_weights(ti - t[k + 1], t[k + 1] - t[k], beta);
        w[k] = near + far;
    }
    Ok(w)
}

/// Linear product rule on `[0, 1]` with `n` uniform panels for the weight
/// `x^{β-1}`; scaled to `[0, L]` by multiplying with `L^β`.
#[derive(Debug, Clone)]
pub struct UniformLinearRule {
    beta: f64,
    weights: Vec<f64>,
}

impl UniformLinearRule {
    pub fn new(n: usize, beta: f64) -> Self {
        let h = 1.0 / n as f64;
        let mut weights = vec![0.0; n + 1];
        for k in 0..n {
            let (near, far) = linear_panel_weights(k as f64 * h, h, beta);
            weights[k] += near;
            weights[k + 1] += far;
        }
        Self { beta, weights }
    }

    pub fn panels(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `∫_0^L x^{β-1} φ(x) dx` with `φ` sampled at `x_j = L·j/n`.
    pub fn integrate(&self, length: f64, phi: impl Fn(f64) -> f64) -> f64 {
        let n = self.panels() as f64;
        let acc: CompensatedSum = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * phi(length * j as f64 / n))
            .collect();
        length.powf(self.beta) * acc.value()
    }
}

/// Moments `m_k = ∫_0^2 (x0 + hτ)^{β-1} τ^k dτ`, `k = 0, 1, 2`.
fn quadratic_moments(x0: f64, h: f64, beta: f64) -> [f64; 3] {
    if x0 == 0.0 {
        let base = h.powf(beta - 1.0);
        return [0.0, 1.0, 2.0].map(|k| base * 2f64.powf(beta + k) / (beta + k));
    }
    let rho = h / x0;
    if 2.0 * rho <= 0.5 {
        let base = x0.powf(beta - 1.0);
        let mut out = [0.0; 3];
        for (k, m) in out.iter_mut().enumerate() {
            let kf = k as f64;
            // Σ_n binom(β-1,n) ρ^n 2^{n+k+1}/(n+k+1)
            let mut coeff = 1.0;
            let mut scale = 2f64.powf(kf + 1.0);
            let mut acc = scale / (kf + 1.0);
            for n in 0..400 {
                let nf = n as f64;
                coeff *= (beta - 1.0 - nf) / (nf + 1.0);
                scale *= 2.0 * rho;
                let term = coeff * scale / (nf + kf + 2.0);
                acc += term;
                if term.abs() <= 1e-18 * acc.abs() {
                    break;
                }
            }
            *m = base * acc;
        }
        return out;
    }
    let x2 = x0 + 2.0 * h;
    let raw = |j: f64| (x2.powf(beta + j) - x0.powf(beta + j)) / (beta + j);
    let (r0, r1, r2) = (raw(0.0), raw(1.0), raw(2.0));
    [
        r0 / h,
        (r1 - x0 * r0) / (h * h),
        (r2 - 2.0 * x0 * r1 + x0 * x0 * r0) / (h * h * h),
    ]
}

/// Composite piecewise-quadratic product rule for `∫_0^L x^{β-1} φ(x) dx` on
/// `n` panels (`n` even, paired into quadratic elements).
#[derive(Debug, Clone)]
pub struct QuadraticRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadraticRule {
    pub fn new(n: usize, beta: f64, length: f64) -> Self {
        Self::graded(n, beta, length, 1.0)
    }

    /// Quadratic elements with boundaries `L·(k/(n/2))^q`, so widths shrink
    /// toward the singular endpoint when `q > 1`.
    pub fn graded(n: usize, beta: f64, length: f64, q: f64) -> Self {
        let n = n.max(2) + n % 2;
        let elems = n / 2;
        let edge = |k: usize| length * (k as f64 / elems as f64).powf(q);
        let mut weights = vec![0.0; n + 1];
        let mut nodes = vec![0.0; n + 1];
        for e in 0..elems {
            let j = 2 * e;
            let (x0, x2) = (edge(e), if e + 1 == elems { length } else { edge(e + 1) });
            let h = 0.5 * (x2 - x0);
            nodes[j] = x0;
            nodes[j + 1] = x0 + h;
            nodes[j + 2] = x2;
            let [m0, m1, m2] = quadratic_moments(x0, h, beta);
            weights[j] += h * (m2 - 3.0 * m1 + 2.0 * m0) / 2.0;
            weights[j + 1] += h * (2.0 * m1 - m2);
            weights[j + 2] += h * (m2 - m1) / 2.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let acc: CompensatedSum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * phi(x))
            .collect();
        acc.value()
    }
}

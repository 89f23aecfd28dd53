//! Product integration of `∫_0^{t_i} G(t_i - s) u(s) ds` when the kernel `G`
//! is itself sampled on the mesh.
//!
//! Both interpolants are integrated exactly on the merged breakpoints
//! `{t_k} ∪ {t_i - t_m}`. Power-law origin models (`u ~ s^{-γ}`,
//! `G ~ x^{-ε}`) enter as weight functions; the remaining factors are linear
//! on each piece, so their product is integrated against quadratic Lagrange
//! moments of the weight.

use super::convolve::{gauss_legendre, SERIES_MAX_TERMS, SERIES_TOL};
use super::{Origin, SampledFunction};
use crate::kernels::beta_pos;

/// Breakpoints closer than this (relative to `t_i`) are merged.
const SNAP: f64 = 1e-13;

/// Row weights `c_j` with `Σ_j c_j u_j ≈ ∫_0^{t_i} G(t_i - s) u(s) ds`.
///
/// `u` is piecewise linear with the given origin model; for a power-law
/// origin with `γ > 0`, `s^γ·u` is the piecewise-linear part on every panel.
pub(crate) fn sampled_kernel_row(g: &SampledFunction, i: usize, origin: Origin, out: &mut Vec<f64>) {
    let t = g.mesh().nodes();
    let big_t = t[i];
    out.clear();
    out.resize(i + 1, 0.0);
    let gv = g.values();
    let g_power = !g.origin().is_regular();
    let eps = g.origin().exponent();
    let u_power = !origin.is_regular();
    let gamma = origin.exponent();

    let bp = breakpoints(&t[..=i], big_t);
    let (mut k, mut m) = (0usize, i - 1);
    for w in bp.windows(2) {
        let (p, q) = (w[0], w[1]);
        let mid = 0.5 * (p + q);
        while t[k + 1] < mid {
            k += 1;
        }
        let x_mid = big_t - mid;
        while m > 0 && t[m] > x_mid {
            m -= 1;
        }
        let g_singular = g_power && m == 0;
        let weights = lagrange_moments(
            p,
            q,
            big_t,
            if u_power { gamma } else { 0.0 },
            if g_singular { eps } else { 0.0 },
        );
        let g_part = |s: f64| {
            if g_singular {
                gv[1] * t[1].powf(eps)
            } else {
                let x = big_t - s;
                gv[m] + (x - t[m]) / (t[m + 1] - t[m]) * (gv[m + 1] - gv[m])
            }
        };
        let s_pts = [p, mid, q];
        if u_power && k == 0 {
            let acc: f64 = (0..3).map(|j| weights[j] * g_part(s_pts[j])).sum();
            out[1] += t[1].powf(gamma) * acc;
            continue;
        }
        let (lo, hi) = (t[k], t[k + 1]);
        let width = hi - lo;
        let (mut left, mut right) = (0.0, 0.0);
        for j in 0..3 {
            let wg = weights[j] * g_part(s_pts[j]);
            left += wg * (hi - s_pts[j]) / width;
            right += wg * (s_pts[j] - lo) / width;
        }
        if u_power && gamma > 0.0 {
            left *= lo.powf(gamma);
            right *= hi.powf(gamma);
        }
        out[k] += left;
        out[k + 1] += right;
    }
}

/// Sorted union of `nodes` and `big_t - nodes`, with near-coincident points merged.
fn breakpoints(nodes: &[f64], big_t: f64) -> Vec<f64> {
    let n = nodes.len();
    let tol = SNAP * big_t;
    let mut out = Vec::with_capacity(2 * n);
    let (mut a, mut b) = (0usize, 0usize);
    // reflected nodes in ascending order: big_t - nodes[n-1-b]
    let refl = |b: usize| big_t - nodes[n - 1 - b];
    while a < n || b < n {
        let next = if b >= n || (a < n && nodes[a] <= refl(b) + tol) {
            let v = nodes[a];
            if b < n && (refl(b) - v).abs() <= tol {
                b += 1;
            }
            a += 1;
            v
        } else {
            let v = refl(b);
            b += 1;
            v
        };
        if out.last().is_none_or(|&last: &f64| next - last > tol) {
            out.push(next);
        }
    }
    // endpoints are exact by construction
    out[0] = 0.0;
    *out.last_mut().expect("non-empty") = big_t;
    out
}

/// Moments of `w(s) = s^{-γ}(T - s)^{-ε}` on `[p, q]` against the quadratic
/// Lagrange basis at `p`, `(p+q)/2`, `q`.
fn lagrange_moments(p: f64, q: f64, big_t: f64, gamma: f64, eps: f64) -> [f64; 3] {
    let h = q - p;
    if gamma == 0.0 && eps == 0.0 {
        return [h / 6.0, 2.0 * h / 3.0, h / 6.0];
    }
    let left = gamma > 0.0 && p == 0.0;
    let right = eps > 0.0 && q == big_t;
    let mu = match (left, right) {
        (true, true) => {
            let scale = h.powf(1.0 - gamma - eps);
            [0.0, 1.0, 2.0].map(|n| scale * beta_pos(n + 1.0 - gamma, 1.0 - eps))
        }
        (true, false) => {
            let scale = big_t.powf(-eps) * h.powf(1.0 - gamma);
            series(h / big_t, eps, 1.0 - gamma).map(|v| scale * v)
        }
        (false, true) => {
            let scale = big_t.powf(-gamma) * h.powf(1.0 - eps);
            let nu = series(h / big_t, gamma, 1.0 - eps).map(|v| scale * v);
            [nu[0], nu[0] - nu[1], nu[0] - 2.0 * nu[1] + nu[2]]
        }
        (false, false) => return gauss_lagrange(p, q, big_t, gamma, eps),
    };
    [
        2.0 * mu[2] - 3.0 * mu[1] + mu[0],
        4.0 * (mu[1] - mu[2]),
        2.0 * mu[2] - mu[1],
    ]
}

/// `Σ_k (a)_k/k!·ρ^k/(k + n + b)` for `n = 0, 1, 2`.
fn series(rho: f64, a: f64, b: f64) -> [f64; 3] {
    let mut acc = [0.0; 3];
    let mut coeff = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let mut size = 0.0;
        for (n, v) in acc.iter_mut().enumerate() {
            let term = coeff / (kf + n as f64 + b);
            *v += term;
            size += term.abs();
        }
        if size <= SERIES_TOL * acc[0].abs() || a == 0.0 {
            break;
        }
        coeff *= (a + kf) / (kf + 1.0) * rho;
    }
    acc
}

fn gauss_lagrange(p: f64, q: f64, big_t: f64, gamma: f64, eps: f64) -> [f64; 3] {
    let h = q - p;
    let mut acc = [0.0; 3];
    let mut stack = vec![(p, q)];
    while let Some((a, c)) = stack.pop() {
        let width = c - a;
        let mut clearance = f64::INFINITY;
        if gamma > 0.0 {
            clearance = clearance.min(a);
        }
        if eps > 0.0 {
            clearance = clearance.min(big_t - c);
        }
        if clearance < width {
            let m = 0.5 * (a + c);
            stack.push((a, m));
            stack.push((m, c));
            continue;
        }
        let (nodes, weights) = if clearance >= 8.0 * width {
            gauss_legendre(6)
        } else {
            gauss_legendre(12)
        };
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights) {
            let s = a + half * (1.0 + x);
            let mut f = half * w;
            if gamma > 0.0 {
                f *= s.powf(-gamma);
            }
            if eps > 0.0 {
                f *= (big_t - s).powf(-eps);
            }
            let y = (s - p) / h;
            acc[0] += f * (1.0 - y) * (1.0 - 2.0 * y);
            acc[1] += f * 4.0 * y * (1.0 - y);
            acc[2] += f * y * (2.0 * y - 1.0);
        }
    }
    acc
}

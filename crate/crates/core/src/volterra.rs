//! First-kind Volterra equations `k∗u = f` with a kernel pair satisfying the
//! generalized Sonine condition.
//!
//! Convolving with the associate `K` and integrating by parts gives the
//! second-kind equation `u + g'∗u = F` with `F = f(0)·K + K∗f'`, which is
//! solved by forward substitution on product-integration weights.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::kernels::{KernelSpec, ScalarFn, SoninePair};
use crate::mesh_quad::{
    convolve_sampled, sampled_kernel_row, weighted_sum, Interp, Mesh, Origin, SampledFunction,
};
use crate::sonine::{check_gsc_with, GscOptions};

/// Nodes `1..RESIDUAL_SKIP` are excluded from first-kind residual norms.
pub const RESIDUAL_SKIP: usize = 3;

/// Smallest admissible `|1 + c_ii|` in the forward substitution.
pub const MIN_DIAGONAL: f64 = 1e-8;

const SPOT_CHECKS: usize = 16;
const SPOT_TOLERANCE: f64 = 1e-5;

/// Right-hand side `f ∈ C¹[0, b]` together with its derivative.
#[derive(Clone)]
pub struct RhsSpec {
    f: ScalarFn,
    fprime: ScalarFn,
    f0: f64,
}

impl std::fmt::Debug for RhsSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RhsSpec").field("f0", &self.f0).finish_non_exhaustive()
    }
}

impl RhsSpec {
    /// Checks `fprime` against central differences at 16 interior points of `(0, b)`.
    pub fn new(f: ScalarFn, fprime: ScalarFn, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(domain("b", b, "horizon must be positive and finite"));
        }
        let f0 = f(0.0);
        if !f0.is_finite() {
            return Err(Error::Rhs("f(0) is not finite".into()));
        }
        let h = 1e-6 * b;
        // Weyl sequence: deterministic and equidistributed
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        for j in 1..=SPOT_CHECKS {
            let u = (j as f64 * golden).fract();
            let t = h + u * (b - 2.0 * h);
            let fd = (f(t + h) - f(t - h)) / (2.0 * h);
            let d = fprime(t);
            if (fd - d).abs().is_nan() || (fd - d).abs() > SPOT_TOLERANCE {
                return Err(Error::Rhs(format!(
                    "f' disagrees with f at t = {t}: {d} vs difference quotient {fd}"
                )));
            }
        }
        Ok(Self { f, fprime, f0 })
    }

    /// `f(t) = Σ_n c_n t^n`.
    pub fn polynomial(coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Rhs("coefficients must be finite and non-empty".into()));
        }
        let c: Arc<[f64]> = coefficients.into();
        let d: Arc<[f64]> = c.iter().enumerate().skip(1).map(|(n, c)| n as f64 * c).collect();
        let horner = |c: Arc<[f64]>| -> ScalarFn {
            Arc::new(move |t| c.iter().rev().fold(0.0, |acc, &cn| acc * t + cn))
        };
        Ok(Self {
            f0: c[0],
            f: horner(c),
            fprime: horner(d),
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::polynomial(&[c])
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn fprime(&self, t: f64) -> f64 {
        (self.fprime)(t)
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    fn shifted(&self, delta: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |t| f(t) + delta),
            fprime: self.fprime.clone(),
            f0: self.f0 + delta,
        }
    }
}

/// Outcome of a first-kind solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Nodal solution; `u(t_0)` is undefined when `f(0) ≠ 0`.
    pub u: SampledFunction,
    /// Transformed right-hand side `F = f(0)·K + K∗f'`.
    pub f_transformed: SampledFunction,
    /// `max |(k∗u)(t_i) - f(t_i)|` over `i >= 3`.
    pub residual_first_kind: f64,
    /// Largest relative row residual of the discrete second-kind system.
    pub residual_second_kind: f64,
    pub mesh: Mesh,
    pub gprime_l1: f64,
    /// Exponent of the `g'` origin model used by the solver.
    pub gprime_exponent: f64,
    /// `max |(u∗k)(t_i) - 1|` over `i >= 3`, for associate discovery.
    pub sc_residual_of_u: Option<f64>,
}

/// `F(t_i) = f(0)·K(t_i) + (K∗f')(t_i)`.
///
/// With `f(0) ≠ 0` the result inherits the singularity of `K` and its value at
/// `t_0` is undefined.
pub fn assemble_rhs(kernel: &KernelSpec, rhs: &RhsSpec, mesh: &Mesh) -> Result<SampledFunction> {
    if mesh.horizon() > kernel.horizon() * (1.0 + 1e-12) {
        return Err(domain("b", mesh.horizon(), "mesh extends beyond the kernel horizon"));
    }
    let lambda = kernel.leading_exponent();
    if !(0.0..1.0).contains(&lambda) {
        return Err(domain("sing_exponent", lambda, "kernel must be weakly singular"));
    }
    let fprime = SampledFunction::from_fn(mesh, Origin::Regular, |t| rhs.fprime(t))?;
    let conv = convolve_sampled(kernel, &fprime, mesh);
    let f0 = rhs.f0();
    let mut values: Vec<f64> = mesh
        .nodes()
        .iter()
        .zip(conv.values())
        .map(|(&t, &c)| if t > 0.0 { f0 * kernel.value(t) + c } else { c })
        .collect();
    let origin = if f0 != 0.0 && lambda > 0.0 {
        Origin::PowerLaw { exponent: lambda }
    } else {
        values[0] = f0 * kernel.smooth(0.0);
        Origin::Regular
    };
    SampledFunction::new(mesh, values, Interp::PiecewiseLinear, origin)
}

fn check_mesh(phi: &SampledFunction, mesh: &Mesh, what: &str) -> Result<()> {
    if phi.mesh() != mesh {
        return Err(Error::MeshMismatch(format!("{what} lives on a different mesh")));
    }
    Ok(())
}

/// Solves `u + g'∗u = F` on the mesh.
///
/// `u` takes the origin model of `F`; the kernel `g'` is factored with the
/// exponent of its own origin model. Row `i` reads `u_i + Σ_j c_ij u_j = F_i`.
pub fn solve_second_kind(
    gprime: &SampledFunction,
    rhs: &SampledFunction,
    mesh: &Mesh,
) -> Result<SampledFunction> {
    check_mesh(gprime, mesh, "g'")?;
    check_mesh(rhs, mesh, "F")?;
    let origin = rhs.origin();
    if gprime.max_abs_from(1) == 0.0 {
        return Ok(rhs.clone());
    }
    let n = mesh.panels();
    let mut u = vec![f64::NAN; n + 1];
    let first = if origin.is_regular() {
        u[0] = rhs.value(0);
        1
    } else {
        1
    };
    let skip_first = !origin.is_regular();
    let mut c = Vec::with_capacity(n + 1);
    for i in first..=n {
        sampled_kernel_row(gprime, i, origin, &mut c);
        let diagonal = 1.0 + c[i];
        if diagonal.is_nan() || diagonal.abs() < MIN_DIAGONAL {
            return Err(Error::IllConditioned { node: i, diagonal });
        }
        let history = weighted_sum(&c[..i], &u[..i], skip_first);
        u[i] = (rhs.value(i) - history) / diagonal;
    }
    SampledFunction::new(mesh, u, Interp::PiecewiseLinear, origin)
}

/// Largest relative row residual of `u` in the discrete second-kind system.
pub fn second_kind_residual(gprime: &SampledFunction, rhs: &SampledFunction, u: &SampledFunction) -> f64 {
    let mesh = u.mesh();
    let origin = u.origin();
    let skip_first = !origin.is_regular();
    (1..=mesh.panels())
        .into_par_iter()
        .map_init(Vec::new, |c, i| {
            sampled_kernel_row(gprime, i, origin, c);
            let conv = weighted_sum(c, &u.values()[..=i], skip_first);
            let scale = u.value(i).abs().max(conv.abs()).max(rhs.value(i).abs()).max(f64::MIN_POSITIVE);
            (u.value(i) + conv - rhs.value(i)).abs() / scale
        })
        .reduce(|| 0.0, f64::max)
}

/// `(k∗u)(t_i) - f(t_i)` on nodes `1..=N`; node 0 is 0.
pub fn first_kind_defect(k: &KernelSpec, u: &SampledFunction, rhs: &RhsSpec) -> Vec<f64> {
    let mesh = u.mesh();
    let conv = convolve_sampled(k, u, mesh);
    let mut out: Vec<f64> = mesh
        .nodes()
        .iter()
        .zip(conv.values())
        .map(|(&t, &c)| c - rhs.f(t))
        .collect();
    out[0] = 0.0;
    out
}

/// `max |(k∗u)(t_i) - f(t_i)|` over `i >= 3`.
pub fn first_kind_residual(k: &KernelSpec, u: &SampledFunction, rhs: &RhsSpec) -> f64 {
    first_kind_defect(k, u, rhs)[RESIDUAL_SKIP..]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
}

pub fn solve_first_kind(pair: &SoninePair, rhs: &RhsSpec, mesh: &Mesh) -> Result<SolveReport> {
    solve_first_kind_with(pair, rhs, mesh, &GscOptions::default())
}

/// Checks the pair, then solves the transformed second-kind equation.
///
/// Only the value of `g` at the origin and integrability of `g'` are required;
/// the fitted power-law exponent of `g'` (clamped to an admissible range)
/// only shapes the quadrature.
pub fn solve_first_kind_with(
    pair: &SoninePair,
    rhs: &RhsSpec,
    mesh: &Mesh,
    opts: &GscOptions,
) -> Result<SolveReport> {
    if mesh.panels() <= RESIDUAL_SKIP {
        return Err(domain("N", mesh.panels() as f64, "need more than 3 panels"));
    }
    let gsc = check_gsc_with(pair, mesh, opts)?;
    if gsc.g0_defect.is_nan() || gsc.g0_defect > opts.g0_tolerance {
        return Err(Error::GscFailure(format!(
            "g(0) = {} differs from 1 by {:.3e} (tolerance {:.1e})",
            gsc.g0, gsc.g0_defect, opts.g0_tolerance
        )));
    }
    if !gsc.gprime_l1.is_finite() {
        return Err(Error::GscFailure("g' is not integrable on the mesh".into()));
    }
    let f_transformed = assemble_rhs(pair.associate(), rhs, mesh)?;
    let u = solve_second_kind(&gsc.gprime, &f_transformed, mesh)?;
    Ok(SolveReport {
        residual_second_kind: second_kind_residual(&gsc.gprime, &f_transformed, &u),
        residual_first_kind: first_kind_residual(pair.k(), &u, rhs),
        gprime_exponent: gsc.gprime.origin().exponent(),
        u,
        f_transformed,
        mesh: mesh.clone(),
        gprime_l1: gsc.gprime_l1,
        sc_residual_of_u: None,
    })
}

/// Solves `k∗u = 1` for a kernel `k` whose pair with `kg` satisfies the
/// generalized condition; the solution `u` is a classical associate of `k`.
pub fn discover_associate(k: &KernelSpec, kg: &KernelSpec, mesh: &Mesh) -> Result<SolveReport> {
    let pair = SoninePair::new(k.clone(), kg.clone())?;
    let mut report = solve_first_kind(&pair, &RhsSpec::constant(1.0)?, mesh)?;
    report.sc_residual_of_u = Some(report.residual_first_kind);
    Ok(report)
}

/// Sensitivity of the solution to a constant shift `f → f + δ`.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// `|Δu(t_i)|` on nodes `1..=N`; index 0 is unused.
    pub du: Vec<f64>,
    pub du_max: f64,
    pub df_max: f64,
    pub gprime_l1: f64,
    /// `exp(‖g'‖₁)·max|ΔF|`.
    pub bound: f64,
    pub holds: bool,
}

pub fn stability_probe(
    pair: &SoninePair,
    rhs: &RhsSpec,
    delta: f64,
    mesh: &Mesh,
) -> Result<StabilityReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(domain("delta", delta, "perturbation must be positive"));
    }
    let base = solve_first_kind(pair, rhs, mesh)?;
    let shifted = solve_first_kind(pair, &rhs.shifted(delta), mesh)?;
    let n = mesh.panels();
    let du: Vec<f64> = (0..=n)
        .map(|i| if i == 0 { 0.0 } else { (shifted.u.value(i) - base.u.value(i)).abs() })
        .collect();
    let du_max = du.iter().fold(0.0f64, |m, &d| m.max(d));
    let df_max = (1..=n)
        .map(|i| (shifted.f_transformed.value(i) - base.f_transformed.value(i)).abs())
        .fold(0.0f64, f64::max);
    let bound = base.gprime_l1.exp() * df_max;
    Ok(StabilityReport {
        du,
        du_max,
        df_max,
        gprime_l1: base.gprime_l1,
        bound,
        holds: du_max <= bound * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_classical_abel_pair, make_variable_exponent_pair, ExponentFunction};
    use crate::mesh_quad::graded_mesh;
    use std::f64::consts::PI;

    fn variable_pair() -> SoninePair {
        let af = ExponentFunction::affine(0.5, 0.2, 0.5).unwrap();
        make_variable_exponent_pair(af, 0.5).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let mesh = graded_mesh(256, 2.0, 1.0).unwrap();
        let k = KernelSpec::power(1.0 / PI, 0.5, 1.0).unwrap();
        let f = assemble_rhs(&k, &RhsSpec::constant(1.0).unwrap(), &mesh).unwrap();
        assert!((f.eval_at(0.25) - 2.0 / PI).abs() < 1e-12);
        let f = assemble_rhs(&k, &RhsSpec::polynomial(&[0.0, 1.0]).unwrap(), &mesh).unwrap();
        assert!((f.value(256) - 2.0 / PI).abs() < 1e-12);
        assert!(f.origin().is_regular() && f.value(0) == 0.0);
        let k = KernelSpec::power(1.0, 0.5, 1.0).unwrap();
        let f = assemble_rhs(&k, &RhsSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap(), &mesh).unwrap();
        assert!((f.value(256) - 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn rhs_spot_check() {
        let f: ScalarFn = Arc::new(|t: f64| t.sin());
        assert!(RhsSpec::new(f.clone(), Arc::new(|t: f64| t.cos()), 1.0).is_ok());
        assert!(matches!(RhsSpec::new(f, Arc::new(|t: f64| t.sin()), 1.0), Err(Error::Rhs(_))));
        assert!(RhsSpec::polynomial(&[]).is_err());
    }

    #[test]
    fn zero_gprime_returns_rhs() {
        let mesh = graded_mesh(16, 2.0, 1.0).unwrap();
        let zero = SampledFunction::from_fn(&mesh, Origin::Regular, |_| 0.0).unwrap();
        let rhs = SampledFunction::from_fn(&mesh, Origin::Regular, |t| t.cos()).unwrap();
        let u = solve_second_kind(&zero, &rhs, &mesh).unwrap();
        assert_eq!(u.values(), rhs.values());
    }

    #[test]
    fn constant_gprime_gives_exponential() {
        let mesh = graded_mesh(512, 1.0, 1.0).unwrap();
        let ones = SampledFunction::from_fn(&mesh, Origin::Regular, |_| 1.0).unwrap();
        for c in [1.0, 2.0] {
            let g = SampledFunction::from_fn(&mesh, Origin::Regular, |_| c).unwrap();
            let u = solve_second_kind(&g, &ones, &mesh).unwrap();
            for t in [0.5, 1.0] {
                assert!((u.eval_at(t) - (-c * t).exp()).abs() < 1e-4);
            }
            assert!(second_kind_residual(&g, &ones, &u) < 1e-12);
        }
    }

    #[test]
    fn ill_conditioned_diagonal() {
        let mesh = graded_mesh(4, 1.0, 1.0).unwrap();
        let ones = SampledFunction::from_fn(&mesh, Origin::Regular, |_| 1.0).unwrap();
        // c_11 = g·h/2 with h = 1/4
        let g = SampledFunction::from_fn(&mesh, Origin::Regular, |_| -8.0).unwrap();
        assert!(matches!(
            solve_second_kind(&g, &ones, &mesh),
            Err(Error::IllConditioned { node: 1, .. })
        ));
    }

    #[test]
    fn classical_linear_rhs() {
        let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
        let mesh = graded_mesh(1024, 3.0, 1.0).unwrap();
        let r = solve_first_kind(&pair, &RhsSpec::polynomial(&[0.0, 1.0]).unwrap(), &mesh).unwrap();
        assert!((r.u.value(1024) - 2.0 / PI).abs() < 1e-3);
        assert!(r.residual_second_kind <= 1e-10);
        assert!(r.residual_first_kind < 1e-6);
    }

    #[test]
    fn classical_constant_rhs() {
        let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
        let mesh = graded_mesh(256, 2.0, 1.0).unwrap();
        let r = solve_first_kind(&pair, &RhsSpec::constant(1.0).unwrap(), &mesh).unwrap();
        assert!(!r.u.is_defined(0));
        let i = mesh.first_index_at_or_after(0.25);
        let t = mesh.node(i);
        let exact = 1.0 / (PI * t.sqrt());
        assert!(((r.u.value(i) - exact) / exact).abs() < 1e-3);
    }

    #[test]
    fn variable_pair_residual() {
        let mesh = graded_mesh(1024, 2.0, 0.5).unwrap();
        let r = solve_first_kind(&variable_pair(), &RhsSpec::polynomial(&[0.0, 1.0]).unwrap(), &mesh)
            .unwrap();
        assert!(r.residual_first_kind <= 5e-3, "{}", r.residual_first_kind);
        assert!(r.residual_second_kind <= 1e-10);
    }

    #[test]
    fn linear_in_rhs() {
        let mesh = graded_mesh(128, 2.0, 0.5).unwrap();
        let pair = variable_pair();
        let solve = |c: &[f64]| solve_first_kind(&pair, &RhsSpec::polynomial(c).unwrap(), &mesh).unwrap();
        let (u1, u2, u12) = (solve(&[0.0, 1.0]), solve(&[0.0, 0.0, 1.0]), solve(&[0.0, 2.0, -3.0]));
        for i in 1..=128 {
            let expect = 2.0 * u1.u.value(i) - 3.0 * u2.u.value(i);
            assert!((u12.u.value(i) - expect).abs() <= 1e-10 * expect.abs().max(1e-3));
        }
    }

    #[test]
    fn deterministic() {
        let mesh = graded_mesh(128, 2.0, 0.5).unwrap();
        let rhs = RhsSpec::polynomial(&[1.0, 1.0]).unwrap();
        let a = solve_first_kind(&variable_pair(), &rhs, &mesh).unwrap();
        let b = solve_first_kind(&variable_pair(), &rhs, &mesh).unwrap();
        let bits = |r: &SolveReport| r.u.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.residual_first_kind.to_bits(), b.residual_first_kind.to_bits());
    }

    #[test]
    fn classical_discovery_returns_associate() {
        let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
        let mesh = graded_mesh(128, 2.0, 1.0).unwrap();
        let r = discover_associate(pair.k(), pair.associate(), &mesh).unwrap();
        for i in 1..=128 {
            let t = mesh.node(i);
            assert!((r.u.value(i) - pair.associate().eval(t).unwrap()).abs() <= 1e-6 * r.u.value(i));
        }
        assert!(r.sc_residual_of_u.unwrap() < 1e-6, "{:?}", r.sc_residual_of_u);
    }

    #[test]
    fn classical_stability() {
        let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
        let mesh = graded_mesh(256, 2.0, 1.0).unwrap();
        let s = stability_probe(&pair, &RhsSpec::polynomial(&[0.0, 1.0]).unwrap(), 1e-6, &mesh).unwrap();
        assert!((s.du[256] - 1e-6 / PI).abs() < 1e-6 * 1e-6);
        assert!(s.holds);
        assert!(stability_probe(&pair, &RhsSpec::constant(1.0).unwrap(), 0.0, &mesh).is_err());
    }

    #[test]
    fn variable_stability() {
        let mesh = graded_mesh(256, 2.0, 0.5).unwrap();
        let s = stability_probe(&variable_pair(), &RhsSpec::polynomial(&[0.0, 1.0]).unwrap(), 1e-6, &mesh)
            .unwrap();
        assert!(s.holds, "{} > {}", s.du_max, s.bound);
    }
}

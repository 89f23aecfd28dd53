//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit if
//! any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sonine_kit::cli::{classical_error, fitted_order};
use sonine_kit::kernels::{
    gamma, make_classical_abel_pair, make_variable_exponent_pair, ExponentFunction,
    SoninePair,
};
use sonine_kit::mesh_quad::{graded_mesh, product_weights, Origin, SampledFunction};
use sonine_kit::sonine::check_gsc;
use sonine_kit::volterra::{
    discover_associate, solve_first_kind, solve_second_kind, stability_probe, RhsSpec,
};
use sonine_kit::Result;

const SC_RESIDUAL_TOL: f64 = 1e-4;
const SC_RUNTIME_LIMIT: Duration = Duration::from_secs(5);
const G0_DEFECT_TOL: f64 = 1e-3;
const EPS_LIMIT: f64 = 0.5;
const ROUTE_GAP_TOL: f64 = 5e-5;
const SOLVE_REL_TOL: f64 = 1e-3;
const MIN_ORDER: f64 = 0.8;
const MIN_REFINEMENT_FACTOR: f64 = 1.5;
const SECOND_KIND_TOL: f64 = 1e-12;
/// Residuals this small are at the rounding floor and cannot shrink further.
const ROUNDING_FLOOR: f64 = 1e-12;
const DISCOVER_TOL: f64 = 5e-3;
const DISCOVER_CLASSICAL_TOL: f64 = 1e-6;
const STABILITY_DELTA: f64 = 1e-6;
const GAMMA_TOL: f64 = 1e-12;
const LINEAR_WEIGHTS_TOL: f64 = 1e-10;
const EXP_ORACLE_TOL: f64 = 1e-4;

struct Line {
    passed: bool,
    text: String,
}

fn line(passed: bool, text: String) -> Line {
    Line { passed, text }
}

fn variable_pair() -> Result<SoninePair> {
    make_variable_exponent_pair(ExponentFunction::affine(0.5, 0.2, 0.5)?, 0.5)
}

fn criterion_1() -> Result<Line> {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for alpha in [0.25, 0.5, 0.75] {
        let start = Instant::now();
        let pair = make_classical_abel_pair(alpha, 1.0)?;
        let report = check_gsc(&pair, &graded_mesh(512, 2.0, 1.0)?)?;
        slowest = slowest.max(start.elapsed());
        worst = worst.max(report.sc_residual);
    }
    let passed = worst <= SC_RESIDUAL_TOL && slowest <= SC_RUNTIME_LIMIT;
    Ok(line(
        passed,
        format!(
            "classical SC identity: max|g-1| = {worst:.3e} (tol {SC_RESIDUAL_TOL:.0e}), slowest case {:.2} s (limit {} s)",
            slowest.as_secs_f64(),
            SC_RUNTIME_LIMIT.as_secs()
        ),
    ))
}

fn criterion_2() -> Result<Line> {
    let report = check_gsc(&variable_pair()?, &graded_mesh(512, 2.0, 0.5)?)?;
    let gap = report.route_gap.unwrap_or(f64::INFINITY);
    let fit = report.eps_fit;
    let passed = report.g0_defect <= G0_DEFECT_TOL
        && fit.pass
        && fit.eps < EPS_LIMIT
        && report.gprime_l1.is_finite()
        && gap <= ROUTE_GAP_TOL;
    Ok(line(
        passed,
        format!(
            "variable-exponent gSC: g0_defect = {:.3e} (tol {G0_DEFECT_TOL:.0e}), eps = {:.3} with R^2 = {:.3} (fit {}), \
             gprime_l1 = {:.4e}, route gap = {gap:.3e} (tol {ROUTE_GAP_TOL:.0e})",
            report.g0_defect,
            fit.eps,
            fit.r_squared,
            if fit.pass { "pass" } else { "fail" },
            report.gprime_l1
        ),
    ))
}

fn criterion_3() -> Result<Line> {
    let alpha = 0.5;
    let coeffs = [0.0, 1.0];
    let pair = make_classical_abel_pair(alpha, 1.0)?;
    let rhs = RhsSpec::polynomial(&coeffs)?;
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for n in [128, 256, 512, 1024] {
        let report = solve_first_kind(&pair, &rhs, &graded_mesh(n, 3.0, 1.0)?)?;
        hs.push(1.0 / n as f64);
        errs.push(classical_error(alpha, &coeffs, &report.u));
    }
    let err = errs[errs.len() - 1];
    let order = fitted_order(&hs, &errs);
    Ok(line(
        err <= SOLVE_REL_TOL && order >= MIN_ORDER,
        format!(
            "Abel solve accuracy: max rel err at N=1024 = {err:.3e} (tol {SOLVE_REL_TOL:.0e}), order = {order:.3} (min {MIN_ORDER})"
        ),
    ))
}

fn criterion_4() -> Result<Line> {
    let mut cases: Vec<(String, SoninePair, RhsSpec, f64)> = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        for coeffs in [vec![1.0], vec![0.0, 1.0]] {
            cases.push((
                format!("classical a={alpha} f={coeffs:?}"),
                make_classical_abel_pair(alpha, 1.0)?,
                RhsSpec::polynomial(&coeffs)?,
                1.0,
            ));
        }
    }
    for coeffs in [vec![1.0], vec![0.0, 1.0], vec![1.0, 0.0, 1.0]] {
        cases.push((
            format!("variable f={coeffs:?}"),
            variable_pair()?,
            RhsSpec::polynomial(&coeffs)?,
            0.5,
        ));
    }
    let mut worst_factor = f64::INFINITY;
    let mut worst_case = String::new();
    let mut worst_second = 0.0f64;
    let mut all_ok = true;
    for (name, pair, rhs, b) in &cases {
        let residuals: Vec<(f64, f64)> = [128, 256, 512]
            .iter()
            .map(|&n| {
                let r = solve_first_kind(pair, rhs, &graded_mesh(n, 2.0, *b)?)?;
                Ok((r.residual_first_kind, r.residual_second_kind))
            })
            .collect::<Result<_>>()?;
        for w in residuals.windows(2) {
            worst_second = worst_second.max(w[0].1).max(w[1].1);
            if w[0].0 <= ROUNDING_FLOOR && w[1].0 <= ROUNDING_FLOOR {
                continue;
            }
            let factor = w[0].0 / w[1].0;
            if factor < worst_factor {
                worst_factor = factor;
                worst_case = name.clone();
            }
            all_ok &= factor >= MIN_REFINEMENT_FACTOR;
        }
    }
    all_ok &= worst_second <= SECOND_KIND_TOL;
    Ok(line(
        all_ok,
        format!(
            "round trip over {} cases: smallest doubling factor = {worst_factor:.3} ({worst_case}; min {MIN_REFINEMENT_FACTOR}), \
             max second-kind residual = {worst_second:.3e} (tol {SECOND_KIND_TOL:.0e})",
            cases.len()
        ),
    ))
}

fn criterion_5() -> Result<Line> {
    let pair = variable_pair()?;
    let report = discover_associate(pair.k(), pair.associate(), &graded_mesh(1024, 2.0, 0.5)?)?;
    let variable = report.sc_residual_of_u.unwrap_or(f64::INFINITY);

    let mut classical = 0.0f64;
    for alpha in [0.25, 0.5, 0.75] {
        let pair = make_classical_abel_pair(alpha, 1.0)?;
        let mesh = graded_mesh(256, 2.0, 1.0)?;
        let found = discover_associate(pair.k(), pair.associate(), &mesh)?;
        for (i, &t) in mesh.nodes().iter().enumerate().skip(1) {
            classical = classical.max((found.u.value(i) - pair.associate().eval(t)?).abs());
        }
    }
    Ok(line(
        variable <= DISCOVER_TOL && classical <= DISCOVER_CLASSICAL_TOL,
        format!(
            "associate discovery: variable max|u*k-1| = {variable:.3e} (tol {DISCOVER_TOL:.0e}), \
             constant-alpha max|u-K| = {classical:.3e} (tol {DISCOVER_CLASSICAL_TOL:.0e})"
        ),
    ))
}

fn criterion_6() -> Result<Line> {
    let mut configs: Vec<(SoninePair, RhsSpec, f64)> = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        for coeffs in [vec![1.0], vec![0.0, 1.0]] {
            configs.push((make_classical_abel_pair(alpha, 1.0)?, RhsSpec::polynomial(&coeffs)?, 1.0));
        }
    }
    for coeffs in [vec![1.0], vec![0.0, 1.0]] {
        configs.push((variable_pair()?, RhsSpec::polynomial(&coeffs)?, 0.5));
    }
    let mut held = 0;
    let mut tightest = 0.0f64;
    for (pair, rhs, b) in &configs {
        for n in [128, 512] {
            let report = stability_probe(pair, rhs, STABILITY_DELTA, &graded_mesh(n, 2.0, *b)?)?;
            held += usize::from(report.holds);
            tightest = tightest.max(report.du_max / report.bound);
        }
    }
    let total = configs.len() * 2;
    Ok(line(
        held == total,
        format!("Gronwall stability: bound holds in {held}/{total} configurations, largest |du|/bound = {tightest:.3}"),
    ))
}

fn criterion_7() -> Result<Line> {
    let gamma_err = common::GAMMA_REFERENCES
        .iter()
        .map(|&(x, v)| Ok(common::rel(gamma(x)?, v)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut weights_err = 0.0f64;
    for beta in [0.25, 0.5, 0.75] {
        let mesh = graded_mesh(64, 2.0, 1.0)?;
        for i in [1, 7, 64] {
            let w = product_weights(&mesh, i, beta)?;
            let t = mesh.node(i);
            // ∫_0^t (t-s)^{β-1}(a + c s) ds
            let (a, c) = (0.7, -1.3);
            let exact = a * t.powf(beta) / beta + c * t.powf(beta + 1.0) / (beta * (beta + 1.0));
            let approx: f64 = w.iter().zip(mesh.nodes()).map(|(w, s)| w * (a + c * s)).sum();
            weights_err = weights_err.max(common::rel(approx, exact));
        }
    }

    // u + c∫_0^t u = 1 has u = e^{-ct}
    let c = 2.0;
    let mesh = graded_mesh(512, 2.0, 1.0)?;
    let gprime = SampledFunction::from_fn(&mesh, Origin::Regular, |_| c)?;
    let rhs = SampledFunction::from_fn(&mesh, Origin::Regular, |_| 1.0)?;
    let u = solve_second_kind(&gprime, &rhs, &mesh)?;
    let exp_err = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| (u.value(i) - (-c * t).exp()).abs())
        .fold(0.0, f64::max);

    Ok(line(
        gamma_err <= GAMMA_TOL && weights_err <= LINEAR_WEIGHTS_TOL && exp_err <= EXP_ORACLE_TOL,
        format!(
            "oracle spot checks: gamma rel err = {gamma_err:.3e} (tol {GAMMA_TOL:.0e}), linear weights rel err = {weights_err:.3e} \
             (tol {LINEAR_WEIGHTS_TOL:.0e}), e^(-ct) err = {exp_err:.3e} (tol {EXP_ORACLE_TOL:.0e})"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Result<Line>; 7] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ];
    let mut failures = 0;
    for (n, criterion) in criteria.iter().enumerate() {
        let result = criterion().unwrap_or_else(|e| line(false, format!("error: {e}")));
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {}", n + 1, result.text);
        failures += usize::from(!result.passed);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}

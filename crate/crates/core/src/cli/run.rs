use crate::error::Result;
use crate::kernels::{
    beta, kappa, make_classical_abel_pair, make_variable_exponent_pair, ExponentFunction,
    SoninePair,
};
use crate::mesh_quad::{graded_mesh, Mesh};
use crate::sonine::{check_gsc_with, GscOptions};
use crate::volterra::{
    discover_associate, first_kind_defect, solve_first_kind_with, stability_probe, RhsSpec,
};

use super::config::{Command, JobConfig, KernelConfig};

/// A table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Result of one job: a data table, headline scalars, and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub table: Table,
    pub scalars: Vec<(&'static str, f64)>,
    pub passed: bool,
}

impl Outcome {
    /// One-line summary: command, headline scalars, verdict.
    pub fn summary(&self) -> String {
        let mut line = self.command.to_string();
        for (name, v) in &self.scalars {
            line.push_str(&format!(" {name}={v:.3e}"));
        }
        line.push_str(if self.passed { " PASS" } else { " FAIL" });
        line
    }

    /// Process exit status: 0 on pass, 2 on tolerance failure.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

fn build_pair(kernel: &KernelConfig) -> Result<SoninePair> {
    match *kernel {
        KernelConfig::Classical { alpha, b } => make_classical_abel_pair(alpha, b),
        KernelConfig::Variable { a0, a1, b } => {
            make_variable_exponent_pair(ExponentFunction::affine(a0, a1, b)?, b)
        }
    }
}

fn gsc_options(config: &JobConfig) -> GscOptions {
    GscOptions {
        g0_tolerance: config.tolerance("g0_defect"),
        ..GscOptions::default()
    }
}

fn node_table(mesh: &Mesh, columns: Vec<&'static str>, series: &[&[f64]]) -> Table {
    let rows = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            std::iter::once(Cell::Real(t))
                .chain(series.iter().map(|s| Cell::Real(s[i])))
                .collect()
        })
        .collect();
    Table { columns, rows }
}

/// Runs the job named by `config.command`.
pub fn run(config: &JobConfig) -> Result<Outcome> {
    let command = config.command.ok_or_else(|| crate::Error::Config {
        field: "command".into(),
        message: "no command given".into(),
    })?;
    let pair = build_pair(&config.kernel)?;
    let b = config.kernel.horizon();
    let mesh = graded_mesh(config.n, config.r, b)?;
    let rhs = RhsSpec::polynomial(&config.rhs)?;
    let opts = gsc_options(config);

    let (table, scalars, passed) = match command {
        Command::VerifyPair => {
            let r = check_gsc_with(&pair, &mesh, &opts)?;
            let sc_ok = !pair.is_classical() || r.sc_residual <= config.tolerance("sc_residual");
            (
                node_table(&mesh, vec!["t", "g"], &[r.g.values()]),
                vec![
                    ("sc_residual", r.sc_residual),
                    ("g0_defect", r.g0_defect),
                    ("eps", r.eps_fit.eps),
                    ("gprime_l1", r.gprime_l1),
                ],
                r.passes && sc_ok,
            )
        }
        Command::ComputeG => {
            let r = check_gsc_with(&pair, &mesh, &opts)?;
            let gap = r.route_gap.unwrap_or(f64::NAN);
            let gap_ok = r.route_gap.is_none_or(|g| g <= config.tolerance("route_gap"));
            (
                node_table(&mesh, vec!["t", "g", "gprime"], &[r.g.values(), r.gprime.values()]),
                vec![("g0", r.g0), ("g0_defect", r.g0_defect), ("route_gap", gap)],
                r.g0_defect <= opts.g0_tolerance && gap_ok,
            )
        }
        Command::Solve => {
            let r = solve_first_kind_with(&pair, &rhs, &mesh, &opts)?;
            (
                node_table(&mesh, vec!["t", "u", "F"], &[r.u.values(), r.f_transformed.values()]),
                vec![
                    ("residual_first_kind", r.residual_first_kind),
                    ("residual_second_kind", r.residual_second_kind),
                    ("gprime_l1", r.gprime_l1),
                ],
                r.residual_first_kind <= config.tolerance("residual_first_kind")
                    && r.residual_second_kind <= config.tolerance("residual_second_kind"),
            )
        }
        Command::Discover => {
            let r = discover_associate(pair.k(), pair.associate(), &mesh)?;
            let mut defect = first_kind_defect(pair.k(), &r.u, &RhsSpec::constant(1.0)?);
            defect.iter_mut().for_each(|d| *d = d.abs());
            defect[0] = f64::NAN;
            let sc = r.sc_residual_of_u.expect("set by discover_associate");
            (
                node_table(&mesh, vec!["t", "u", "associate_residual"], &[r.u.values(), &defect]),
                vec![("sc_residual_of_u", sc), ("residual_second_kind", r.residual_second_kind)],
                sc <= config.tolerance("sc_residual_of_u"),
            )
        }
        Command::Converge => converge(config, &pair, &rhs, &opts)?,
        Command::Stability => {
            let s = stability_probe(&pair, &rhs, config.delta, &mesh)?;
            let mut du = s.du.clone();
            du[0] = f64::NAN;
            (
                node_table(&mesh, vec!["t", "du"], &[&du]),
                vec![
                    ("du_max", s.du_max),
                    ("bound", s.bound),
                    ("df_max", s.df_max),
                    ("gprime_l1", s.gprime_l1),
                ],
                s.holds,
            )
        }
    };
    Ok(Outcome {
        command,
        table,
        scalars,
        passed,
    })
}

/// Closed-form solution of `k∗u = Σ c_n t^n` for the classical pair.
pub fn classical_solution(alpha: f64, coefficients: &[f64], t: f64) -> f64 {
    let kap = kappa(alpha).expect("alpha validated");
    coefficients
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let nf = n as f64;
            let b = beta(alpha, nf + 1.0).expect("positive arguments");
            c * (nf + alpha) * b / kap * t.powf(nf + alpha - 1.0)
        })
        .sum()
}

/// Largest relative error of the piecewise-linear solution against the
/// closed form, over nodes and panel midpoints in `[b/10, b]`.
pub fn classical_error(alpha: f64, coefficients: &[f64], u: &crate::mesh_quad::SampledFunction) -> f64 {
    let nodes = u.mesh().nodes();
    let cutoff = 0.1 * u.mesh().horizon();
    let mut worst = 0.0f64;
    for w in nodes.windows(2) {
        for t in [0.5 * (w[0] + w[1]), w[1]] {
            if t >= cutoff {
                let exact = classical_solution(alpha, coefficients, t);
                worst = worst.max(((u.eval_at(t) - exact) / exact).abs());
            }
        }
    }
    worst
}

/// Least-squares slope of `ln err` against `ln h`.
pub fn fitted_order(h: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h.iter().zip(err).map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

type Verdict = (Table, Vec<(&'static str, f64)>, bool);

fn converge(config: &JobConfig, pair: &SoninePair, rhs: &RhsSpec, opts: &GscOptions) -> Result<Verdict> {
    let b = config.kernel.horizon();
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for &n in &config.levels {
        let mesh = graded_mesh(n, config.r, b)?;
        let r = solve_first_kind_with(pair, rhs, &mesh, opts)?;
        let err = match config.kernel {
            KernelConfig::Classical { alpha, .. } => classical_error(alpha, &config.rhs, &r.u),
            KernelConfig::Variable { .. } => r.residual_first_kind,
        };
        hs.push(b / n as f64);
        errs.push(err);
    }
    let rows = config
        .levels
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let order = if j == 0 {
                f64::NAN
            } else {
                (errs[j - 1] / errs[j]).ln() / (hs[j - 1] / hs[j]).ln()
            };
            vec![Cell::Int(n), Cell::Real(hs[j]), Cell::Real(errs[j]), Cell::Real(order)]
        })
        .collect();
    let order = fitted_order(&hs, &errs);
    let last = *errs.last().expect("at least two levels");
    let mut passed = order >= config.tolerance("order");
    if matches!(config.kernel, KernelConfig::Classical { .. }) {
        passed &= last <= config.tolerance("max_err");
    }
    Ok((
        Table {
            columns: vec!["N", "h", "max_err", "order"],
            rows,
        },
        vec![("fitted_order", order), ("finest_max_err", last)],
        passed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    #[test]
    fn closed_form_matches_known_solution() {
        let t: f64 = 0.81;
        let u = classical_solution(0.5, &[0.0, 1.0], t);
        assert!((u - 2.0 * t.sqrt() / std::f64::consts::PI).abs() < 1e-14);
        let u = classical_solution(0.5, &[1.0], 0.25);
        assert!((u - 2.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn order_of_exact_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((fitted_order(&h, &e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn verify_pair_classical() {
        let c = parse_config(
            r#"{"command": "verify-pair", "kernel": {"kind": "classical", "alpha": 0.5, "b": 1}, "mesh": {"N": 64}}"#,
        )
        .unwrap();
        let out = run(&c).unwrap();
        assert!(out.passed);
        assert_eq!(out.table.columns, ["t", "g"]);
        assert_eq!(out.table.rows.len(), 65);
        assert!(out.summary().starts_with("verify-pair sc_residual="));
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn tight_tolerance_fails() {
        let c = parse_config(
            r#"{"command": "solve", "kernel": {"kind": "variable", "profile": {"a0": 0.5, "a1": 0.2}, "b": 0.5},
                "mesh": {"N": 32}, "tolerances": {"residual_first_kind": 1e-12}}"#,
        )
        .unwrap();
        let out = run(&c).unwrap();
        assert!(!out.passed);
        assert_eq!(out.exit_code(), 2);
    }
}

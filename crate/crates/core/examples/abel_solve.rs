//! Solves the classical Abel equation `∫_0^t (t-s)^{-1/2} u(s) ds = f(t)` for
//! `f = t` and `f = 1`, against the closed forms `2√t/π` and `1/(π√t)`.
//!
//! cargo run --release --example abel_solve

use std::f64::consts::PI;

use sonine_kit::kernels::make_classical_abel_pair;
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::volterra::{solve_first_kind, RhsSpec};

/// Label, right-hand side, and exact solution.
type Case = (&'static str, RhsSpec, fn(f64) -> f64);

fn main() -> sonine_kit::Result<()> {
    let pair = make_classical_abel_pair(0.5, 1.0)?;
    let mesh = graded_mesh(1024, 3.0, 1.0)?;

    let cases: [Case; 2] = [
        ("f = t", RhsSpec::polynomial(&[0.0, 1.0])?, |t| 2.0 * t.sqrt() / PI),
        ("f = 1", RhsSpec::constant(1.0)?, |t| 1.0 / (PI * t.sqrt())),
    ];
    for (label, rhs, exact) in cases {
        let r = solve_first_kind(&pair, &rhs, &mesh)?;
        println!("{label}: first-kind residual {:.2e}", r.residual_first_kind);
        for t in [0.01, 0.1, 0.5, 0.75] {
            let u = r.u.eval_at(t);
            println!("  u({t:<4}) = {u:.12}   exact {:.12}   rel err {:.1e}", exact(t), ((u - exact(t)) / exact(t)).abs());
        }
    }
    Ok(())
}

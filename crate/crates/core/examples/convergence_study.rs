//! Mesh refinement for two problems: the classical Abel equation with a
//! known solution, and the variable-exponent equation through its residual
//! `max |k∗u - f|`.
//!
//! cargo run --release --example convergence_study

use sonine_kit::cli::{classical_error, fitted_order};
use sonine_kit::kernels::{make_classical_abel_pair, make_variable_exponent_pair, ExponentFunction};
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::volterra::{solve_first_kind, RhsSpec};

fn main() -> sonine_kit::Result<()> {
    let f = RhsSpec::polynomial(&[0.0, 1.0])?;
    let classical = make_classical_abel_pair(0.5, 1.0)?;
    let variable = make_variable_exponent_pair(ExponentFunction::affine(0.5, 0.2, 0.5)?, 0.5)?;

    let levels = [64, 128, 256, 512, 1024];
    let (mut h, mut err, mut res) = (Vec::new(), Vec::new(), Vec::new());
    println!("{:>6} {:>14} {:>16}", "N", "classical err", "variable resid");
    for n in levels {
        let a = solve_first_kind(&classical, &f, &graded_mesh(n, 3.0, 1.0)?)?;
        let b = solve_first_kind(&variable, &f, &graded_mesh(n, 2.0, 0.5)?)?;
        let e = classical_error(0.5, &[0.0, 1.0], &a.u);
        println!("{n:>6} {e:>14.3e} {:>16.3e}", b.residual_first_kind);
        h.push(1.0 / n as f64);
        err.push(e);
        res.push(b.residual_first_kind);
    }
    println!("observed orders: {:.2} and {:.2}", fitted_order(&h, &err), fitted_order(&h, &res));
    Ok(())
}

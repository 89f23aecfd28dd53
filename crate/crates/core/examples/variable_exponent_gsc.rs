//! The variable-exponent kernel `k = t^{-α(t)}` with `α(t) = 0.5 + t/5` does
//! not satisfy `K∗k = 1`, but `g = K∗k` still starts at 1 and has an
//! integrable derivative.
//!
//! cargo run --release --example variable_exponent_gsc

use sonine_kit::kernels::{make_variable_exponent_pair, ExponentFunction};
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::sonine::check_gsc;

fn main() -> sonine_kit::Result<()> {
    let b = 0.5;
    let pair = make_variable_exponent_pair(ExponentFunction::affine(0.5, 0.2, b)?, b)?;
    let mesh = graded_mesh(1024, 2.0, b)?;
    let r = check_gsc(&pair, &mesh)?;

    println!("g(0) extrapolated  {:.10}", r.g0);
    println!("max |g - 1|        {:.6}", r.sc_residual);
    println!("route gap          {:.3e}", r.route_gap.unwrap());
    println!(
        "|g'| ~ C t^-eps    C = {:.4}, eps = {:.4}, R^2 = {:.3} over {} nodes",
        r.eps_fit.c, r.eps_fit.eps, r.eps_fit.r_squared, r.eps_fit.points
    );
    println!("int |g'|           {:.8}", r.gprime_l1);
    println!("condition holds    {}", r.passes);

    println!("\n{:>10} {:>14} {:>14}", "t", "g(t)", "g'(t)");
    for t in [1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5] {
        let i = mesh.first_index_at_or_after(t);
        println!("{:>10.3e} {:>14.10} {:>14.6e}", mesh.node(i), r.g.value(i), r.gprime.value(i));
    }
    Ok(())
}

//! Recovers a kernel `u` with `u∗k = 1` from a pair that only satisfies the
//! generalized condition, by solving `k∗u = 1`.
//!
//! cargo run --release --example discover_associate

use sonine_kit::kernels::{make_variable_exponent_pair, ExponentFunction};
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::volterra::discover_associate;

fn main() -> sonine_kit::Result<()> {
    let b = 0.5;
    for (a0, a1) in [(0.5, 0.2), (0.6, -0.1)] {
        let pair = make_variable_exponent_pair(ExponentFunction::affine(a0, a1, b)?, b)?;
        println!("alpha(t) = {a0} + {a1} t");
        for n in [128, 256, 512, 1024] {
            let r = discover_associate(pair.k(), pair.associate(), &graded_mesh(n, 2.0, b)?)?;
            println!("  N = {n:>4}: max |u*k - 1| = {:.3e}", r.sc_residual_of_u.unwrap());
        }
        let mesh = graded_mesh(256, 2.0, b)?;
        let r = discover_associate(pair.k(), pair.associate(), &mesh)?;
        println!("  {:>8} {:>14} {:>14}", "t", "u(t)", "K(t)");
        for t in [0.01, 0.1, 0.25, 0.5] {
            let i = mesh.first_index_at_or_after(t);
            let ti = mesh.node(i);
            println!("  {ti:>8.4} {:>14.8} {:>14.8}", r.u.value(i), pair.associate().eval(ti)?);
        }
    }
    Ok(())
}

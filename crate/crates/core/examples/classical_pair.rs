//! Checks the classical Abel pair `k = t^{-α}`, `K = t^{α-1}/κ` for a few
//! exponents: `K∗k` should be identically 1.
//!
//! cargo run --release --example classical_pair

use sonine_kit::kernels::make_classical_abel_pair;
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::sonine::check_gsc;

fn main() -> sonine_kit::Result<()> {
    let mesh = graded_mesh(512, 2.0, 1.0)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>6}", "alpha", "kappa", "max|g-1|", "|g0-1|", "pass");
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let pair = make_classical_abel_pair(alpha, 1.0)?;
        let r = check_gsc(&pair, &mesh)?;
        println!(
            "{alpha:>6} {:>12.8} {:>12.3e} {:>12.3e} {:>6}",
            pair.kappa().unwrap(),
            r.sc_residual,
            r.g0_defect,
            r.passes
        );
    }
    Ok(())
}

//! Product-integration weights for `∫_0^{t_i} (t_i - s)^{β-1} φ(s) ds` on a
//! graded mesh: exact for linear `φ`, second order for smooth `φ`.
//!
//! cargo run --release --example product_weights

use sonine_kit::kernels::beta;
use sonine_kit::mesh_quad::{graded_mesh, product_weights};

fn main() -> sonine_kit::Result<()> {
    let mesh = graded_mesh(40, 2.0, 1.0)?;
    let i = 40;
    for b in [0.25, 0.5, 0.75] {
        let w = product_weights(&mesh, i, b)?;
        let sum: f64 = w.iter().sum();
        let first: f64 = w.iter().zip(mesh.nodes()).map(|(w, t)| w * t).sum();
        // ∫_0^1 (1-s)^{β-1} s ds = B(2, β)
        let exact_first = beta(2.0, b)?;
        let quad: f64 = w.iter().zip(mesh.nodes()).map(|(w, t)| w * t * t).sum();
        println!(
            "beta={b}: sum {sum:.15} (1/beta = {:.15}), s err {:.1e}, s^2 err {:.1e}",
            1.0 / b,
            (first - exact_first).abs(),
            (quad - beta(3.0, b)?).abs()
        );
    }
    Ok(())
}

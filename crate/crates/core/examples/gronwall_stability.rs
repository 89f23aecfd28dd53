//! Perturbs `f` by a constant and compares the change in `u` with the
//! bound `exp(‖g'‖₁)·max|ΔF|`.
//!
//! cargo run --release --example gronwall_stability

use sonine_kit::kernels::{make_classical_abel_pair, make_variable_exponent_pair, ExponentFunction};
use sonine_kit::mesh_quad::graded_mesh;
use sonine_kit::volterra::{stability_probe, RhsSpec};

fn main() -> sonine_kit::Result<()> {
    let pairs = [
        ("classical 0.5", make_classical_abel_pair(0.5, 0.5)?),
        ("0.5 + t/5", make_variable_exponent_pair(ExponentFunction::affine(0.5, 0.2, 0.5)?, 0.5)?),
        ("0.6 - t/10", make_variable_exponent_pair(ExponentFunction::affine(0.6, -0.1, 0.5)?, 0.5)?),
    ];
    let mesh = graded_mesh(512, 2.0, 0.5)?;
    let f = RhsSpec::polynomial(&[0.0, 1.0, -0.5])?;
    println!("{:>14} {:>12} {:>12} {:>12} {:>6}", "kernel", "max|du|", "bound", "int|g'|", "holds");
    for (label, pair) in &pairs {
        for delta in [1e-6, 1e-3] {
            let s = stability_probe(pair, &f, delta, &mesh)?;
            println!("{label:>14} {:>12.4e} {:>12.4e} {:>12.4e} {:>6}", s.du_max, s.bound, s.gprime_l1, s.holds);
        }
    }
    Ok(())
}

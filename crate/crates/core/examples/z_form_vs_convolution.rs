//! Two independent routes to `g = K∗k`: direct product integration of the
//! convolution, and the substituted integral over `z ∈ [0, 1]`.
//!
//! cargo run --release --example z_form_vs_convolution

use sonine_kit::kernels::{make_variable_exponent_pair, ExponentFunction};
use sonine_kit::mesh_quad::convolve_pair_at;
use sonine_kit::sonine::compute_g_substituted;

fn main() -> sonine_kit::Result<()> {
    let b = 0.5;
    let pair = make_variable_exponent_pair(ExponentFunction::affine(0.5, 0.2, b)?, b)?;
    println!("{:>8} {:>20} {:>20} {:>10}", "t", "convolution", "substituted", "gap");
    for t in [0.0625, 0.125, 0.25, 0.5] {
        let conv = convolve_pair_at(pair.associate(), pair.k(), t, 1024)?;
        let subst = compute_g_substituted(&pair, t, 256)?;
        println!("{t:>8} {conv:>20.15} {subst:>20.15} {:>10.2e}", (conv - subst).abs());
    }

    println!("\nsubstituted form, t = 0.5, panels per half:");
    let reference = compute_g_substituted(&pair, 0.5, 2048)?;
    for m in [16, 32, 64, 128, 256] {
        let g = compute_g_substituted(&pair, 0.5, m)?;
        println!("{m:>6} {:>12.3e}", (g - reference).abs());
    }
    Ok(())
}

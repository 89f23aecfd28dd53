//! Gamma, Beta, and the constant `κ(α) = Γ(α)Γ(1-α) = π/sin(πα)`.
//!
//! cargo run --release --example special_functions

use std::f64::consts::PI;

use sonine_kit::kernels::{beta, gamma, kappa};

fn main() -> sonine_kit::Result<()> {
    for x in [0.1, 0.5, 1.0, 2.5, 10.0, 170.5] {
        println!("Gamma({x}) = {:.17e}", gamma(x)?);
    }
    println!("B(1/2, 1/2) = {:.17} (pi = {PI:.17})", beta(0.5, 0.5)?);
    for a in [0.1, 0.25, 0.5, 0.75] {
        let k = kappa(a)?;
        println!("kappa({a}) = {k:.15}, pi/sin = {:.15}", PI / (PI * a).sin());
    }
    if let Err(e) = gamma(-1.0) {
        println!("gamma(-1): {e}");
    }
    Ok(())
}

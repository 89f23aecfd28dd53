//! The second-kind solver on its own: with a constant kernel `g' = c` and
//! `F = 1`, the solution of `u + g'∗u = F` is `e^{-ct}`.
//!
//! cargo run --release --example second_kind_solver

use sonine_kit::mesh_quad::{graded_mesh, Origin, SampledFunction};
use sonine_kit::volterra::{second_kind_residual, solve_second_kind};

fn main() -> sonine_kit::Result<()> {
    for n in [64, 128, 256, 512] {
        let mesh = graded_mesh(n, 1.0, 1.0)?;
        let f = SampledFunction::from_fn(&mesh, Origin::Regular, |_| 1.0)?;
        print!("N = {n:>4}:");
        for c in [0.5, 1.0, 2.0, 5.0] {
            let g = SampledFunction::from_fn(&mesh, Origin::Regular, |_| c)?;
            let u = solve_second_kind(&g, &f, &mesh)?;
            let err = mesh
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, &t)| (u.value(i) - (-c * t).exp()).abs())
                .fold(0.0, f64::max);
            assert!(second_kind_residual(&g, &f, &u) < 1e-12);
            print!("  c={c}: {err:.2e}");
        }
        println!();
    }
    Ok(())
}

//! Generalized Sonine condition analysis for weakly singular kernels.
//!
//! The crate computes `g = K∗k` for a kernel and a candidate associate, checks
//! `g(0) = 1` and integrability of `g'`, rewrites the first-kind Volterra
//! equation `k∗u = f` as the second-kind equation `u + g'∗u = d/dt (K∗f)`,
//! solves it on graded meshes, and recovers the classical associate of `k` by
//! solving with `f ≡ 1`.
//!
//! ```
//! use sonine_kit::kernels::make_classical_abel_pair;
//! use sonine_kit::mesh_quad::graded_mesh;
//! use sonine_kit::sonine::check_gsc;
//!
//! let pair = make_classical_abel_pair(0.5, 1.0).unwrap();
//! let mesh = graded_mesh(128, 2.0, 1.0).unwrap();
//! let report = check_gsc(&pair, &mesh).unwrap();
//! assert!(report.sc_residual < 1e-4);
//! ```

pub mod cli;
pub mod error;
pub mod kernels;
pub mod mesh_quad;
pub mod sonine;
pub mod volterra;

pub use error::{Error, Result};

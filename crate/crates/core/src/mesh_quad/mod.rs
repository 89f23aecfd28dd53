//! Graded meshes, sampled functions, and product-integration quadrature for
//! convolutions with weakly singular factors.

mod convolve;
mod mesh;
mod sampled;
mod sampled_kernel;
mod weights;

pub use convolve::{
    convolve_pair, convolve_pair_at, convolve_weakly_singular, PairConvolver, SingularFactor,
};
pub use mesh::{graded_mesh, Mesh};
pub use sampled::{Interp, Origin, SampledFunction};
pub use weights::{
    linear_panel_weights, product_weights, product_weights_constant_left, CompensatedSum,
    QuadraticRule, UniformLinearRule,
};

pub(crate) use convolve::{convolve_sampled, weighted_sum};
pub(crate) use sampled_kernel::sampled_kernel_row;

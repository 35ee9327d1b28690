//! Explicit Grünwald–Letnikov scheme for the Riesz space-fractional
//! diffusion equation `∂u/∂t = D ∂^α u/∂|x|^α` on a periodic lattice.
//!
//! The update is `U_i^{n+1} = ⟨w⃗, P_{i,M} Uⁿ⟩`: a fixed stencil vector `w⃗`
//! dotted with the state rotated so that site `i` sits at the middle index.
//! Sites `0` and `M` are neighbours, so the update matrix is circulant with
//! period `M + 1`.

mod grid;
mod kernel;
mod solver;

pub use grid::{total_mass, DensityField, GridSpec, MassRule};
pub use kernel::{
    amplification_spectrum, build_kernel, grunwald_coefficients, inverse_permutation,
    permutation_indices, scheme_weights, SchemeKernel,
};
pub use solver::{solve, solve_with_kernel, step, MassPoint, Solution, SolveOptions, StepMethod, Stepper};

//! Distorted Fourier analysis for one-dimensional Schrödinger operators
//! `H = -d²/dx² + V` with real `V ∈ L¹ ∩ L²`.

pub mod bound_states;
pub mod error;
pub mod grid;
pub mod io;
pub mod jost;
pub mod kernel;
pub mod ode;
pub mod oracle;
pub mod potential;
pub mod transform;

pub use bound_states::{find_bound_states, BoundState, BoundStates};
pub use error::{Result, SpectralError};
pub use grid::GridSpec;
pub use jost::{
    build_eigenbasis, generalized_eigenfunction, scattering_coefficients, solve_jost, EigenBasis,
    JostSolution, ScatteringData, Side,
};
pub use kernel::{
    apply_spectral, apply_via_transform, assemble_kernel, Kernel, KernelParts, Multiplier,
    MultiplierKind,
};
pub use oracle::{discretize, DiscreteHamiltonian};
pub use potential::Potential;
pub use transform::{adjoint, forward, TransformResult};

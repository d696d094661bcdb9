//! Dense complex linear algebra on weighted finite-dimensional spaces.

pub mod decomp;
pub mod dense;
pub mod error;
pub mod lu;
pub mod matrix;
pub mod space;
pub mod subspace;
pub mod tol;

pub use decomp::{
    count_eigenvalues_below, eigvals_general, extreme_eigenvalues_flat, hermitian_eig, hermitian_eigvals, inertia_flat,
    is_positive_definite_flat, pinv, rank, resolvent_test, singular_values, solve, sqrt_psd, ExtremeEigenvalues, HermitianEig,
    ResolventTest,
};
pub use error::{KResult, KernelError};
pub use lu::LuFactor;
pub use matrix::ComplexMatrix;
pub use space::WeightedSpace;
pub use subspace::Subspace;
pub use tol::{tol, Tolerances};

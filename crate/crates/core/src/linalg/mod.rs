//! Dense complex linear algebra sized for few-qubit density matrices.

mod eig;
mod entropy;
mod matrix;

pub(crate) use eig::min_eigenvalue;
pub use eig::{hermitian_eig, HermitianEigen};
pub(crate) use entropy::clamp_spectrum;
pub use entropy::{binary_entropy, entropy_term, shannon_conditional_entropy, shannon_entropy, von_neumann_entropy};
pub use matrix::{kron, partial_trace, ComplexMatrix};

//! Hermitian eigenproblems and operator norms.

pub mod eig;
pub mod norm;

pub use eig::{hermitian_eig, psd_sqrt, EigResult};
pub use norm::{operator_norm, top_singular_value, truncation_lower_bounds, Attainment, NonAttainment, NormOptions, NormReport};

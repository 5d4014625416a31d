//! Structured bounded operators on `l^2`: norm attainment, numerical ranges,
//! absolutely-norm-attaining classification and positive deflation.

pub mod an;
pub mod attainment;
pub mod deflation;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod numrange;
pub mod polar;
pub mod seq;
pub mod spec_doc;
pub mod spectral;
pub mod subspace;
pub mod suite;
pub mod vector;

pub use an::{classify_an, AnVerdict, Rule, Verdict};
pub use attainment::{check_n, check_n_selfadjoint, AttainmentCertificate, CertificateStatus};
pub use deflation::{deflate, reconstruct, Decomposition};
pub use error::{Error, Result};
pub use expr::{OperatorExpr, RankOne, Tail};
pub use seq::{ComplexSeqSpec, Extremum, SeqSpec};
pub use spec_doc::{parse_spec, SpecDocument, SpecOptions};
pub use spectral::{operator_norm, NormOptions, NormReport};
pub use subspace::{SubspaceKind, SubspaceSpec};
pub use vector::Vector;

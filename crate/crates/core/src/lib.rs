pub mod cli;
pub mod error;
pub mod families;
pub mod graph;
pub mod hermitian;
pub mod json;
pub mod maps;
pub mod random;
pub mod recovery;
pub mod semilinear;
pub mod subspace;
pub mod svd;
pub mod tol;
pub mod verify;
pub mod xset;

pub use error::{Error, Result};
pub use hermitian::{CMatrix, HermitianBasis, HermitianOperator, Spectrum};
pub use maps::{ConditionReport, OperatorMap};
pub use semilinear::{SemilinearMap, Sigma};
pub use subspace::{Frame, PrincipalAngleProfile};

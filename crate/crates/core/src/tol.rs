//! Fixed absolute tolerances. All desk-scale inputs are normalized so that
//! eigenvalues are O(1).

/// Hermitian symmetry: `|A - A*|_F`.
pub const SYM: f64 = 1e-10;
/// Spectral reconstruction and eigenvector unitarity.
pub const SPEC: f64 = 1e-9;
/// Eigenvalue magnitude counted as nonzero by rank tests.
pub const RANK: f64 = 1e-9;
/// Orthonormality of frame columns.
pub const FRAME: f64 = 1e-10;
/// Principal angles at or below this are treated as zero.
pub const ANGLE: f64 = 1e-7;
/// Pairs of projections closer than this are treated as equal by injectivity checks.
pub const SAME_PROJECTION: f64 = 1e-6;
/// Singular value cutoff for Jacobian rank in local dimension estimates.
pub const JACOBIAN_RANK: f64 = 1e-6;
/// Commutator norm below which two subspaces count as compatible.
pub const COMPATIBLE: f64 = 1e-8;
/// Gap below which two subspaces count as equal.
pub const SAME_SUBSPACE: f64 = 1e-8;

//! Linear and conjugate-linear isometries `C^n -> C^n'`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator};
use crate::json;
use crate::subspace::Frame;
use crate::tol;

/// The field automorphism attached to a semilinear map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sigma {
    #[serde(rename = "id")]
    Identity,
    #[serde(rename = "conj")]
    Conjugation,
}

impl Sigma {
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Sigma::Identity => z,
            Sigma::Conjugation => z.conj(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sigma::Identity => "id",
            Sigma::Conjugation => "conj",
        }
    }
}

impl std::str::FromStr for Sigma {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "id" | "identity" => Ok(Sigma::Identity),
            "conj" | "conjugation" => Ok(Sigma::Conjugation),
            other => Err(format!("unknown sigma '{other}' (expected id or conj)")),
        }
    }
}

/// `x -> M x` (identity) or `x -> M conj(x)` (conjugation).
#[derive(Clone, Debug, PartialEq)]
pub struct SemilinearMap {
    matrix: CMatrix,
    sigma: Sigma,
}

impl SemilinearMap {
    /// Requires orthonormal columns.
    pub fn isometry(matrix: CMatrix, sigma: Sigma) -> Result<Self> {
        let map = Self { matrix, sigma };
        let deviation = map.isometry_defect();
        if deviation > tol::FRAME {
            return Err(Error::NotAnIsometry { deviation });
        }
        Ok(map)
    }

    /// No validation; used to evaluate perturbed or partially built maps.
    pub fn unchecked(matrix: CMatrix, sigma: Sigma) -> Self {
        Self { matrix, sigma }
    }

    pub fn identity(n: usize) -> Self {
        Self::unchecked(CMatrix::identity(n, n), Sigma::Identity)
    }

    /// Embedding of `C^n` as the first `n` coordinates of `C^n'`.
    pub fn embedding(n: usize, n_prime: usize) -> Self {
        Self::unchecked(CMatrix::identity(n_prime, n), Sigma::Identity)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `|M*M - I|_F`.
    pub fn isometry_defect(&self) -> f64 {
        let n = self.source_dim();
        (self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)).norm()
    }

    /// Applies the map to every column of `v`.
    pub fn apply(&self, v: &CMatrix) -> CMatrix {
        match self.sigma {
            Sigma::Identity => &self.matrix * v,
            Sigma::Conjugation => &self.matrix * v.map(|z| z.conj()),
        }
    }

    /// The image subspace `U(X)`.
    pub fn image(&self, x: &Frame) -> Result<Frame> {
        Frame::span(&self.apply(x.columns()))
    }

    /// `U A U*` with `A` conjugated first when `sigma` is conjugation.
    pub fn conjugate_operator(&self, a: &HermitianOperator) -> HermitianOperator {
        match self.sigma {
            Sigma::Identity => a.congruence(&self.matrix),
            Sigma::Conjugation => a.conjugate().congruence(&self.matrix),
        }
    }

    /// Range of the matrix as a frame.
    pub fn range(&self) -> Result<Frame> {
        Frame::span(&self.matrix)
    }

    /// Multiplies by a unimodular scalar so the first entry of the first
    /// column with modulus above 1e-12 is real and positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if self.matrix.ncols() == 0 {
            return self;
        }
        if let Some(z) = self.matrix.column(0).iter().find(|z| z.norm() > 1e-12) {
            let phase = z.conj() / z.norm();
            self.matrix *= phase;
        }
        self
    }
}

impl Serialize for SemilinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SemilinearJson {
            matrix: json::matrix_rows(&self.matrix),
            sigma: self.sigma,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SemilinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SemilinearJson::deserialize(d)?;
        let matrix = json::matrix_from_rows(&raw.matrix).map_err(serde::de::Error::custom)?;
        Ok(SemilinearMap::unchecked(matrix, raw.sigma))
    }
}

#[derive(Serialize, Deserialize)]
struct SemilinearJson {
    matrix: json::ComplexRows,
    sigma: Sigma,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn conjugation_acts_on_coordinates() {
        let u = SemilinearMap::isometry(CMatrix::identity(2, 2), Sigma::Conjugation).unwrap();
        let v = CMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let w = u.apply(&v);
        assert_eq!(w[(1, 0)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn rejects_non_isometry() {
        let m = CMatrix::identity(2, 2) * Complex64::new(2.0, 0.0);
        assert!(matches!(
            SemilinearMap::isometry(m, Sigma::Identity),
            Err(Error::NotAnIsometry { .. })
        ));
    }

    #[test]
    fn canonical_phase_is_real_positive() {
        let mut rng = random::rng(1);
        let u = SemilinearMap::isometry(random::unitary(&mut rng, 3), Sigma::Identity)
            .unwrap()
            .with_canonical_phase();
        let z = u.matrix()[(0, 0)];
        assert!(z.im.abs() < 1e-14 && z.re > 0.0);
        assert!(u.isometry_defect() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let u = SemilinearMap::identity(2);
        let v = serde_json::to_value(&u).unwrap();
        assert_eq!(v["sigma"], "id");
        assert_eq!(v["matrix"][0][0][0], 1.0);
        let back: SemilinearMap = serde_json::from_value(v).unwrap();
        assert_eq!(back, u);
    }
}

//! JSON descriptions of matrices and models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearConstant, Neural, Rfm, RfmPeriodic, Schwarz, VectorFieldModel};
use crate::error::{Result, TpdsError};
use crate::linalg::{Matrix, TridiagonalSpec};

/// `{"n": 3, "rows": [[...], ...]}` or `{"tridiagonal": {"a": [...], "b": [...], "c": [...]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Dense { n: usize, rows: Vec<Vec<f64>> },
    Tridiagonal { tridiagonal: TridiagonalSpec },
}

impl MatrixInput {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: MatrixInput = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MatrixInput::Dense { n, rows } => {
                if *n == 0 || rows.len() != *n || rows.iter().any(|r| r.len() != *n) {
                    return Err(TpdsError::Dimension(format!("expected a {n} x {n} matrix")));
                }
                if rows.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(TpdsError::InvalidArgument(
                        "matrix entries must be finite".into(),
                    ));
                }
                Ok(())
            }
            MatrixInput::Tridiagonal { tridiagonal } => {
                tridiagonal.validate()?;
                let all = tridiagonal
                    .a
                    .iter()
                    .chain(&tridiagonal.b)
                    .chain(&tridiagonal.c);
                if all.clone().any(|v| !v.is_finite()) {
                    return Err(TpdsError::InvalidArgument(
                        "band entries must be finite".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        match self {
            MatrixInput::Dense { rows, .. } => Matrix::from_rows(rows),
            MatrixInput::Tridiagonal { tridiagonal } => Ok(tridiagonal.to_dense()),
        }
    }

    pub fn as_tridiagonal(&self) -> Option<&TridiagonalSpec> {
        match self {
            MatrixInput::Tridiagonal { tridiagonal } => Some(tridiagonal),
            MatrixInput::Dense { .. } => None,
        }
    }
}

/// Model selector, e.g. `{"model": "rfm", "rates": [0.5, 1, 1, 0.5]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Rfm {
        rates: Vec<f64>,
    },
    Neural,
    Schwarz,
    Linear {
        matrix: MatrixInput,
    },
    RfmPeriodic {
        rates: Vec<f64>,
        period: f64,
        amplitude: f64,
    },
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Box<dyn VectorFieldModel>> {
        Ok(match self {
            ModelSpec::Rfm { rates } => Box::new(Rfm::new(rates.clone())?),
            ModelSpec::Neural => Box::new(Neural),
            ModelSpec::Schwarz => Box::new(Schwarz),
            ModelSpec::Linear { matrix } => {
                matrix.validate()?;
                Box::new(LinearConstant::new(matrix.to_matrix()?)?)
            }
            ModelSpec::RfmPeriodic {
                rates,
                period,
                amplitude,
            } => Box::new(RfmPeriodic::new(rates.clone(), *period, *amplitude)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_matrix_forms() {
        let d = MatrixInput::from_json(r#"{"n": 2, "rows": [[1, 2], [3, 4]]}"#).unwrap();
        assert_eq!(d.to_matrix().unwrap()[(1, 0)], 3.0);
        assert!(d.as_tridiagonal().is_none());
        let t = MatrixInput::from_json(r#"{"tridiagonal": {"a": [1, 2], "b": [3], "c": [4]}}"#)
            .unwrap();
        let m = t.to_matrix().unwrap();
        assert_eq!((m[(0, 1)], m[(1, 0)]), (3.0, 4.0));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(MatrixInput::from_json(r#"{"n": 3, "rows": [[1, 2], [3, 4]]}"#).is_err());
        assert!(
            MatrixInput::from_json(r#"{"tridiagonal": {"a": [1, 2], "b": [], "c": [4]}}"#).is_err()
        );
        assert!(MatrixInput::from_json(r#"{"rows": [[1]]}"#).is_err());
    }

    #[test]
    fn builds_every_model() {
        let cases = [
            (r#"{"model": "rfm", "rates": [0.5, 1, 1, 0.5]}"#, "rfm", 3),
            (r#"{"model": "neural"}"#, "neural", 2),
            (r#"{"model": "schwarz"}"#, "schwarz", 2),
            (
                r#"{"model": "linear", "matrix": {"n": 1, "rows": [[-1]]}}"#,
                "linear",
                1,
            ),
            (
                r#"{"model": "rfm_periodic", "rates": [1, 1], "period": 2, "amplitude": 0.1}"#,
                "rfm_periodic",
                1,
            ),
        ];
        for (text, id, n) in cases {
            let m = ModelSpec::from_json(text).unwrap().build().unwrap();
            assert_eq!((m.id(), m.dim()), (id, n));
        }
        assert!(ModelSpec::from_json(r#"{"model": "lorenz"}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"model": "rfm", "rates": [1]}"#)
            .unwrap()
            .build()
            .is_err());
    }
}

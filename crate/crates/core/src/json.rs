//! JSON documents: the matrix input format and helpers shared by the graph
//! export and the reports.

use std::fmt;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{ExchangeMatrix, IntMatrix};

/// A big integer written as a bare JSON number of any length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n: serde_json::Number = self.0.to_string().parse().map_err(S::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        n.to_string()
            .parse::<BigInt>()
            .map(JsonInt)
            .map_err(|_| D::Error::custom(format!("expected an integer, found {n}")))
    }
}

impl fmt::Display for JsonInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn rows_to_json(rows: Vec<Vec<BigInt>>) -> Vec<Vec<JsonInt>> {
    rows.into_iter().map(|r| r.into_iter().map(JsonInt).collect()).collect()
}

pub fn rows_from_json(rows: Vec<Vec<JsonInt>>) -> Vec<Vec<BigInt>> {
    rows.into_iter().map(|r| r.into_iter().map(|v| v.0).collect()).collect()
}

/// `{"rank": n, "matrix": [[int, ...], ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rank: usize,
    pub matrix: Vec<Vec<JsonInt>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ExchangeMatrix) -> Self {
        MatrixDocument { rank: m.rank(), matrix: rows_to_json(m.rows()) }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    /// Validates shape, sign-compatibility and skew-symmetrizability.
    pub fn to_matrix(&self) -> Result<ExchangeMatrix> {
        if self.matrix.len() != self.rank {
            return Err(Error::RankMismatchDocument { declared: self.rank, rows: self.matrix.len() });
        }
        ExchangeMatrix::new(IntMatrix::from_rows(rows_from_json(self.matrix.clone()))?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix document serializes")
    }
}

/// Reads and validates a matrix document.
pub fn read_matrix(text: &str) -> Result<ExchangeMatrix> {
    MatrixDocument::parse(text)?.to_matrix()
}

pub fn write_matrix(m: &ExchangeMatrix) -> String {
    MatrixDocument::from_matrix(m).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes_documents() {
        let m = read_matrix(r#"{"rank": 2, "matrix": [[0, 2], [-1, 0]]}"#).unwrap();
        assert_eq!(m, ExchangeMatrix::from_rows(vec![vec![0, 2], vec![-1, 0]]).unwrap());
        assert_eq!(write_matrix(&m), r#"{"rank":2,"matrix":[[0,2],[-1,0]]}"#);
    }

    #[test]
    fn big_entries_survive() {
        let text = r#"{"rank":2,"matrix":[[0,123456789012345678901234567890],[-123456789012345678901234567890,0]]}"#;
        let m = read_matrix(text).unwrap();
        assert_eq!(write_matrix(&m), text);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let err = read_matrix(r#"{"rank": 2, "matrix": [[0, 1], [-1]]}"#).unwrap_err();
        assert!(matches!(err, Error::NotSquare { row: 2, .. }), "{err}");

        let err = read_matrix(r#"{"rank": 2, "matrix": [[0, 1], [1, 0]]}"#).unwrap_err();
        assert_eq!(err.to_string(), "entries (1,2) and (2,1) are not sign-compatible");

        let err = read_matrix(r#"{"rank": 3, "matrix": [[0, 1], [-1, 0]]}"#).unwrap_err();
        assert!(matches!(err, Error::RankMismatchDocument { declared: 3, rows: 2 }));

        let err = read_matrix("{\"rank\": 2,\n \"matrix\": [[0, 1.5], [-1, 0]]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let err = read_matrix(r#"{"rank": 2}"#).unwrap_err();
        assert!(err.to_string().contains("missing field `matrix`"), "{err}");

        let err = read_matrix(r#"{"rank": 1, "matrix": [[0]], "extra": 1}"#).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }
}

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `0..n`, stored as its image list: `self[i] = σ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n {
                return Err(Error::InvalidPermutation { n, detail: format!("image {} out of range", v + 1) });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation { n, detail: format!("image {} repeated", v + 1) });
            }
        }
        Ok(Permutation(images))
    }

    /// Parses one-based images, e.g. `[2, 1]` for the transposition of a pair.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let zero_based = images
            .iter()
            .map(|&v| {
                v.checked_sub(1).ok_or_else(|| Error::InvalidPermutation { n, detail: "indices are one-based".into() })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(zero_based)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&v| self.0[v]).collect())
    }

    /// All `n!` permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(Permutation)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().map(|v| v + 1).join(","))
    }
}

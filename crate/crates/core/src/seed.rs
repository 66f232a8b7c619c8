//! Labeled seeds and the exchange relation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::matrix::{ExchangeMatrix, IntMatrix};
use crate::perm::Permutation;

/// A labeled seed: cluster variables written in the initial cluster's
/// Laurent ring, the exchange matrix, and the mutation path that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    cluster: Vec<LaurentPolynomial>,
    matrix: ExchangeMatrix,
    path: Vec<usize>,
}

/// Label-free identity of a seed: cluster entries in canonical order and the
/// matrix relabeled to match.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedKey {
    pub cluster: Vec<LaurentPolynomial>,
    pub matrix: IntMatrix,
}

impl fmt::Display for SeedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.cluster.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

fn exponent(v: &BigInt) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::ExponentOverflow(v.to_string()))
}

/// `∏ values_i^[c_i]_+ + ∏ values_i^[−c_i]_+` for an exchange column `c`.
pub fn exchange_binomial(column: &[BigInt], values: &[LaurentPolynomial]) -> Result<LaurentPolynomial> {
    if column.len() != values.len() {
        return Err(Error::RankMismatch { left: column.len(), right: values.len() });
    }
    let nvars = values.first().map(LaurentPolynomial::nvars).unwrap_or(0);
    let mut positive = LaurentPolynomial::one(nvars);
    let mut negative = LaurentPolynomial::one(nvars);
    for (c, v) in column.iter().zip(values) {
        if c.is_zero() {
            continue;
        }
        let power = v.pow(exponent(&c.abs())?);
        if c.is_positive() {
            positive = positive.mul(&power)?;
        } else {
            negative = negative.mul(&power)?;
        }
    }
    positive.add(&negative)
}

impl Seed {
    /// The seed `((x1, …, xn), B)` at the root of the pattern.
    pub fn initial(matrix: ExchangeMatrix) -> Seed {
        let n = matrix.rank();
        Seed { cluster: (0..n).map(|i| LaurentPolynomial::var(n, i)).collect(), matrix, path: Vec::new() }
    }

    /// Assembles a seed without replaying its path. Only shapes are checked.
    pub fn from_parts(cluster: Vec<LaurentPolynomial>, matrix: ExchangeMatrix, path: Vec<usize>) -> Result<Seed> {
        let n = matrix.rank();
        if cluster.len() != n {
            return Err(Error::RankMismatch { left: n, right: cluster.len() });
        }
        if let Some(bad) = cluster.iter().find(|v| v.nvars() != n) {
            return Err(Error::NvarsMismatch { left: n, right: bad.nvars() });
        }
        if let Some(&k) = path.iter().find(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange { index: k, rank: n });
        }
        Ok(Seed { cluster, matrix, path })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn cluster(&self) -> &[LaurentPolynomial] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    /// The exchange binomial of direction `k` in this seed's variables.
    pub fn exchange_binomial(&self, k: usize) -> Result<LaurentPolynomial> {
        if k >= self.rank() {
            return Err(Error::IndexOutOfRange { index: k, rank: self.rank() });
        }
        exchange_binomial(&self.matrix.as_int_matrix().column(k), &self.cluster)
    }

    /// Seed mutation at `k`. Inexact exchange division means the seed was
    /// corrupted and is reported as [`Error::InexactExchange`].
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let binomial = self.exchange_binomial(k)?;
        let fresh = binomial.div_exact(&self.cluster[k])?.ok_or(Error::InexactExchange { k })?;
        let mut cluster = self.cluster.clone();
        cluster[k] = fresh;
        let mut path = self.path.clone();
        path.push(k);
        Ok(Seed { cluster, matrix: self.matrix.mutate(k)?, path })
    }

    pub fn mutate_sequence(&self, path: &[usize]) -> Result<Seed> {
        path.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Relabels positions: entry `i` moves to `σ(i)`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<Seed> {
        let matrix = self.matrix.permuted(sigma)?;
        let mut cluster = self.cluster.clone();
        for (i, v) in self.cluster.iter().enumerate() {
            cluster[sigma.apply(i)] = v.clone();
        }
        Ok(Seed { cluster, matrix, path: self.path.clone() })
    }

    /// The relabeling that sorts the cluster into canonical order.
    pub fn canonical_permutation(&self) -> Permutation {
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by(|&a, &b| self.cluster[a].cmp(&self.cluster[b]).then(a.cmp(&b)));
        let mut sigma = vec![0; self.rank()];
        for (rank, &i) in order.iter().enumerate() {
            sigma[i] = rank;
        }
        Permutation::new(sigma).expect("sorting yields a bijection")
    }

    pub fn canonical_key(&self) -> SeedKey {
        let sigma = self.canonical_permutation();
        let canonical = self.permuted(&sigma).expect("same rank");
        SeedKey { cluster: canonical.cluster, matrix: canonical.matrix.as_int_matrix().clone() }
    }

    /// Position of `v` in the cluster.
    pub fn position(&self, v: &LaurentPolynomial) -> Option<usize> {
        self.cluster.iter().position(|c| c == v)
    }

    /// Checks that cluster entries are pairwise distinct.
    pub fn has_distinct_cluster(&self) -> bool {
        let mut sorted: Vec<_> = self.cluster.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

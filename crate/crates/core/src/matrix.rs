//! Integer exchange matrices.
//!
//! Two independent formulations of matrix mutation live here: the entrywise
//! rule and the product form `(J_k + E_k) B (J_k + F_k)`. Everything else
//! (skew-symmetrizers, block partitions, sign patterns) is what the
//! automorphism test needs to compare a permuted initial matrix against the
//! matrix of a target seed.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A square integer matrix with no further structure, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows<T: Into<BigInt>>(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row: row + 1, expected: n, found: r.len() });
            }
            entries.extend(r.into_iter().map(Into::into));
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix { n, entries: vec![BigInt::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, k: usize) -> Vec<BigInt> {
        (0..self.n).map(|i| self.get(i, k).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { n: self.n, entries: self.entries.iter().map(|v| -v).collect() }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::RankMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// First pair `(i, j)` violating sign-compatibility, scanning row-major.
    /// A nonzero diagonal entry is reported as `(i, i)`.
    pub fn sign_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i..self.n {
                let a = self.get(i, j);
                let b = self.get(j, i);
                let ok = if i == j { a.is_zero() } else { a.signum() == -b.signum() };
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Simultaneous row/column relabeling: the result has
    /// `out[σ(i)][σ(j)] = self[i][j]`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<IntMatrix> {
        if sigma.len() != self.n {
            return Err(Error::RankMismatch { left: self.n, right: sigma.len() });
        }
        let mut out = IntMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(sigma.apply(i), sigma.apply(j), self.get(i, j).clone());
            }
        }
        Ok(out)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n {
            Err(Error::IndexOutOfRange { index: k, rank: self.n })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn positive_part(v: &BigInt) -> BigInt {
    if v.is_positive() {
        v.clone()
    } else {
        BigInt::zero()
    }
}

/// Positive diagonal `D` (stored as its diagonal) with `B·D` skew-symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewSymmetrizer {
    d: Vec<BigInt>,
}

impl SkewSymmetrizer {
    pub fn diagonal(&self) -> &[BigInt] {
        &self.d
    }

    /// Checks `d_i · b_ij = −d_j · b_ji` for all `i, j`.
    pub fn symmetrizes(&self, m: &IntMatrix) -> bool {
        if self.d.len() != m.rank() || self.d.iter().any(|v| !v.is_positive()) {
            return false;
        }
        let n = m.rank();
        (0..n).all(|i| (0..n).all(|j| &self.d[i] * m.get(i, j) == -(&self.d[j] * m.get(j, i))))
    }

    fn permuted(&self, sigma: &Permutation) -> SkewSymmetrizer {
        let mut d = self.d.clone();
        for (i, v) in self.d.iter().enumerate() {
            d[sigma.apply(i)] = v.clone();
        }
        SkewSymmetrizer { d }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub indices: Vec<usize>,
}

/// Partition of `0..n` into connected components of the nonzero pattern.
///
/// All indices whose row and column vanish are collected into a single zero
/// block. Blocks are ordered by their smallest index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockPartition {
    blocks: Vec<Block>,
}

impl BlockPartition {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn nonzero_blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Nonzero)
    }

    pub fn zero_block(&self) -> Option<&Block> {
        self.blocks.iter().find(|b| b.kind == BlockKind::Zero)
    }

    pub fn is_indecomposable(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Position of the block containing `i`.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.indices.contains(&i))
    }
}

/// Connected components of the graph on `0..n` with an edge `{i, j}` whenever
/// `b_ij ≠ 0` or `b_ji ≠ 0`.
pub fn decompose_blocks(m: &IntMatrix) -> BlockPartition {
    let n = m.rank();
    let mut component = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        component[start] = id;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for (j, c) in component.iter_mut().enumerate() {
                if *c == usize::MAX && (!m.get(i, j).is_zero() || !m.get(j, i).is_zero()) {
                    *c = id;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    let is_zero_index = |i: usize| (0..n).all(|j| m.get(i, j).is_zero() && m.get(j, i).is_zero());
    let mut blocks = Vec::new();
    let mut zero = Vec::new();
    for members in components {
        if members.len() == 1 && is_zero_index(members[0]) {
            zero.push(members[0]);
        } else {
            blocks.push(Block { kind: BlockKind::Nonzero, indices: members });
        }
    }
    if !zero.is_empty() {
        blocks.push(Block { kind: BlockKind::Zero, indices: zero });
    }
    blocks.sort_by_key(|b| b.indices[0]);
    BlockPartition { blocks }
}

/// Finds the normalized skew-symmetrizer of `m`, if one exists.
///
/// Ratios `d_j / d_i = b_ij / (−b_ji)` are propagated along a BFS tree of each
/// nonzero block in exact rationals, every remaining constraint is checked,
/// and each block is scaled to coprime positive integers. Zero-block indices
/// get `d_i = 1`.
pub fn find_skew_symmetrizer(m: &IntMatrix) -> Option<SkewSymmetrizer> {
    if m.sign_violation().is_some() {
        return None;
    }
    let n = m.rank();
    let partition = decompose_blocks(m);
    let mut d = vec![BigInt::one(); n];

    for block in partition.nonzero_blocks() {
        let mut ratio: Vec<Option<BigRational>> = vec![None; n];
        let root = block.indices[0];
        ratio[root] = Some(BigRational::one());
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = ratio[i].clone().expect("visited");
            for (j, r) in ratio.iter_mut().enumerate() {
                let bij = m.get(i, j);
                if r.is_none() && !bij.is_zero() {
                    *r = Some(di.clone() * BigRational::new(bij.clone(), -m.get(j, i)));
                    queue.push_back(j);
                }
            }
        }
        for &i in &block.indices {
            for &j in &block.indices {
                let lhs = ratio[i].clone().unwrap() * BigRational::from_integer(m.get(i, j).clone());
                let rhs = ratio[j].clone().unwrap() * BigRational::from_integer(-m.get(j, i));
                if lhs != rhs {
                    return None;
                }
            }
        }
        let lcm = block.indices.iter().fold(BigInt::one(), |acc, &i| acc.lcm(ratio[i].as_ref().unwrap().denom()));
        let scaled: Vec<BigInt> = block
            .indices
            .iter()
            .map(|&i| {
                let r = ratio[i].as_ref().unwrap();
                r.numer() * (&lcm / r.denom())
            })
            .collect();
        let g = scaled.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        for (&i, v) in block.indices.iter().zip(scaled) {
            d[i] = v / &g;
        }
    }
    Some(SkewSymmetrizer { d })
}

/// A skew-symmetrizable exchange matrix together with its normalized
/// skew-symmetrizer and block partition.
#[derive(Clone, Debug)]
pub struct ExchangeMatrix {
    matrix: IntMatrix,
    symmetrizer: SkewSymmetrizer,
    blocks: BlockPartition,
}

impl PartialEq for ExchangeMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for ExchangeMatrix {}

impl std::hash::Hash for ExchangeMatrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.matrix.hash(state)
    }
}

impl ExchangeMatrix {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if matrix.rank() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some((i, j)) = matrix.sign_violation() {
            return Err(Error::SignIncompatible { i, j });
        }
        let symmetrizer = find_skew_symmetrizer(&matrix).ok_or(Error::NotSkewSymmetrizable)?;
        let blocks = decompose_blocks(&matrix);
        Ok(ExchangeMatrix { matrix, symmetrizer, blocks })
    }

    pub fn from_rows<T: Into<BigInt>>(rows: Vec<Vec<T>>) -> Result<Self> {
        ExchangeMatrix::new(IntMatrix::from_rows(rows)?)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        self.matrix.get(i, j)
    }

    pub fn as_int_matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.matrix.rows()
    }

    pub fn skew_symmetrizer(&self) -> &SkewSymmetrizer {
        &self.symmetrizer
    }

    pub fn blocks(&self) -> &BlockPartition {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn neg(&self) -> ExchangeMatrix {
        ExchangeMatrix { matrix: self.matrix.neg(), symmetrizer: self.symmetrizer.clone(), blocks: self.blocks.clone() }
    }

    /// Entrywise mutation at direction `k`:
    /// `b'_ij = −b_ij` if `k ∈ {i, j}`, else `b_ij + sgn(b_ik)·[b_ik·b_kj]_+`.
    pub fn mutate(&self, k: usize) -> Result<ExchangeMatrix> {
        self.matrix.check_index(k)?;
        let n = self.rank();
        let mut out = self.matrix.clone();
        for i in 0..n {
            for j in 0..n {
                let b = self.matrix.get(i, j);
                let v = if i == k || j == k {
                    -b
                } else {
                    let bik = self.matrix.get(i, k);
                    let prod = bik * self.matrix.get(k, j);
                    if prod.is_positive() {
                        b + bik.signum() * prod
                    } else {
                        b.clone()
                    }
                };
                out.set(i, j, v);
            }
        }
        Ok(self.with_same_structure(out))
    }

    /// Mutation through the product `(J_k + E_k)·B·(J_k + F_k)`, where `J_k`
    /// negates coordinate `k`, `E_k` has only `e_ik = [−b_ik]_+` and `F_k` has
    /// only `f_kj = [b_kj]_+`.
    pub fn mutate_product(&self, k: usize) -> Result<ExchangeMatrix> {
        self.matrix.check_index(k)?;
        let n = self.rank();
        let mut left = IntMatrix::identity(n);
        let mut right = IntMatrix::identity(n);
        left.set(k, k, -BigInt::one());
        right.set(k, k, -BigInt::one());
        for i in 0..n {
            if i != k {
                left.set(i, k, positive_part(&-self.matrix.get(i, k)));
                right.set(k, i, positive_part(self.matrix.get(k, i)));
            }
        }
        let out = left.mul(&self.matrix)?.mul(&right)?;
        Ok(self.with_same_structure(out))
    }

    // Mutation and negation preserve both the skew-symmetrizer and the
    // block partition.
    fn with_same_structure(&self, matrix: IntMatrix) -> ExchangeMatrix {
        ExchangeMatrix { matrix, symmetrizer: self.symmetrizer.clone(), blocks: self.blocks.clone() }
    }

    /// Applies a mutation sequence left to right.
    pub fn mutate_sequence(&self, path: &[usize]) -> Result<ExchangeMatrix> {
        path.iter().try_fold(self.clone(), |m, &k| m.mutate(k))
    }

    /// Simultaneous row/column permutation, `out[σ(i)][σ(j)] = b_ij`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<ExchangeMatrix> {
        let matrix = self.matrix.permuted(sigma)?;
        let blocks = decompose_blocks(&matrix);
        Ok(ExchangeMatrix { matrix, symmetrizer: self.symmetrizer.permuted(sigma), blocks })
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.matrix.fmt(f)
    }
}

/// Diagonal `±1` pattern relating two matrices column by column.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Option<Self> {
        signs.iter().all(|s| *s == 1 || *s == -1).then_some(SignPattern(signs))
    }

    pub fn all_positive(n: usize) -> Self {
        SignPattern(vec![1; n])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn is_constant_on(&self, partition: &BlockPartition) -> bool {
        partition.nonzero_blocks().all(|b| b.indices.iter().all(|&i| self.0[i] == self.0[b.indices[0]]))
    }

    /// The common sign when every entry agrees.
    pub fn global_sign(&self) -> Option<i8> {
        let first = *self.0.first()?;
        self.0.iter().all(|&s| s == first).then_some(first)
    }
}

/// Finds `a ∈ {±1}^n`, constant on each nonzero block of `partition`, with
/// `B = B2·diag(a)`; zero-block entries are fixed to `+1`.
pub fn sign_match_up_to_blocks(
    b: &IntMatrix,
    b2: &IntMatrix,
    partition: &BlockPartition,
) -> Result<Option<SignPattern>> {
    if b.rank() != b2.rank() {
        return Err(Error::RankMismatch { left: b.rank(), right: b2.rank() });
    }
    let n = b.rank();
    let mut signs = vec![1i8; n];
    for block in partition.blocks() {
        let eps: i8 = match block.kind {
            BlockKind::Zero => 1,
            BlockKind::Nonzero => {
                let pivot = block
                    .indices
                    .iter()
                    .flat_map(|&k| (0..n).map(move |i| (i, k)))
                    .find(|&(i, k)| !b.get(i, k).is_zero());
                let Some((i, k)) = pivot else {
                    return Ok(None);
                };
                if b.get(i, k) == b2.get(i, k) {
                    1
                } else if *b.get(i, k) == -b2.get(i, k) {
                    -1
                } else {
                    return Ok(None);
                }
            }
        };
        for &k in &block.indices {
            let column_ok =
                (0..n).all(|i| if eps == 1 { b.get(i, k) == b2.get(i, k) } else { *b.get(i, k) == -b2.get(i, k) });
            if !column_ok {
                return Ok(None);
            }
            signs[k] = eps;
        }
    }
    Ok(Some(SignPattern(signs)))
}

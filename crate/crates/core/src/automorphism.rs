//! Cluster automorphism candidates and their verification.
//!
//! A candidate is a target seed `t` plus a bijection `σ` of positions; it
//! induces the homomorphism `x_i ↦ t.cluster[σ(i)]`. The fast test compares
//! the relabeled initial matrix with `t`'s matrix column by column up to a
//! blockwise sign. The slow test substitutes into every one-step mutation and
//! compares against the mutated target cluster exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ExchangeGraph;
use crate::json::{rows_to_json, JsonInt};
use crate::laurent::LaurentPolynomial;
use crate::matrix::{sign_match_up_to_blocks, SignPattern};
use crate::par::map_ordered;
use crate::perm::Permutation;
use crate::seed::{Seed, SeedKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    Unchecked,
    Passed,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterHom {
    /// `f(x_i)` for each initial variable.
    pub images: Vec<LaurentPolynomial>,
    pub target_key: SeedKey,
    pub target: Seed,
    pub sigma: Permutation,
    pub sign: Option<SignPattern>,
    pub verified: Verification,
}

fn check_ranks(s0: &Seed, t: &Seed, sigma: &Permutation) -> Result<()> {
    if s0.rank() != t.rank() {
        return Err(Error::RankMismatch { left: s0.rank(), right: t.rank() });
    }
    if sigma.len() != s0.rank() {
        return Err(Error::RankMismatch { left: s0.rank(), right: sigma.len() });
    }
    Ok(())
}

/// Sign pattern `a` with `B^σ = B_t·diag(a)`, where `B^σ` is the initial
/// matrix relabeled by `σ`. `None` rules the candidate out.
pub fn sign_test(s0: &Seed, t: &Seed, sigma: &Permutation) -> Result<Option<SignPattern>> {
    check_ranks(s0, t, sigma)?;
    let relabeled = s0.matrix().permuted(sigma)?;
    sign_match_up_to_blocks(relabeled.as_int_matrix(), t.matrix().as_int_matrix(), relabeled.blocks())
}

/// The homomorphism `x_i ↦ t.cluster[σ(i)]`, with its sign test filled in.
pub fn induce_hom(s0: &Seed, t: &Seed, sigma: &Permutation) -> Result<ClusterHom> {
    let sign = sign_test(s0, t, sigma)?;
    Ok(ClusterHom {
        images: (0..s0.rank()).map(|i| t.cluster()[sigma.apply(i)].clone()).collect(),
        target_key: t.canonical_key(),
        target: t.clone(),
        sigma: sigma.clone(),
        sign,
        verified: Verification::Unchecked,
    })
}

impl ClusterHom {
    pub fn identity(s0: &Seed) -> ClusterHom {
        ClusterHom {
            images: s0.cluster().to_vec(),
            target_key: s0.canonical_key(),
            target: s0.clone(),
            sigma: Permutation::identity(s0.rank()),
            sign: Some(SignPattern::all_positive(s0.rank())),
            verified: Verification::Passed,
        }
    }

    /// `f(p)`, or `None` if the value leaves the Laurent ring.
    pub fn apply(&self, p: &LaurentPolynomial) -> Result<Option<LaurentPolynomial>> {
        p.substitute(&self.images)
    }

    /// Images of `self ∘ other` (apply `other` first).
    pub fn compose_images(&self, other: &ClusterHom) -> Result<Option<Vec<LaurentPolynomial>>> {
        other.images.iter().map(|p| self.apply(p)).collect::<Result<Option<Vec<_>>>>()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, p)| *p == LaurentPolynomial::var(p.nvars(), i))
    }
}

/// Checks `f(μ_k(x)) = μ_{σ(k)}(z)` for every direction `k` and records
/// the outcome in `h.verified`.
pub fn verify_one_step(h: &mut ClusterHom, s0: &Seed) -> Result<bool> {
    check_ranks(s0, &h.target, &h.sigma)?;
    let mut ok = true;
    for k in 0..s0.rank() {
        let fresh = s0.mutate(k)?.cluster()[k].clone();
        let image = h.apply(&fresh)?;
        let tk = h.sigma.apply(k);
        let expected = h.target.mutate(tk)?.cluster()[tk].clone();
        if image.as_ref() != Some(&expected) {
            ok = false;
            break;
        }
    }
    h.verified = if ok { Verification::Passed } else { Verification::Failed };
    Ok(ok)
}

/// Bijections `σ` with `|b_ij| = |t_{σ(i)σ(j)}|` for all `i, j`; a necessary
/// condition for the sign test, checked while the bijection is built.
pub fn compatible_permutations(s0: &Seed, t: &Seed) -> Vec<Permutation> {
    let n = s0.rank();
    let b = s0.matrix().as_int_matrix();
    let bt = t.matrix().as_int_matrix();
    let mut out = Vec::new();
    let mut assigned: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        n: usize,
        b: &crate::matrix::IntMatrix,
        bt: &crate::matrix::IntMatrix,
        assigned: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Permutation>,
    ) {
        if i == n {
            out.push(Permutation::new(assigned.clone()).expect("bijection"));
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            assigned.push(v);
            let fits = (0..=i).all(|j| {
                let (sj, si) = (assigned[j], v);
                b.get(i, j).magnitude() == bt.get(si, sj).magnitude()
                    && b.get(j, i).magnitude() == bt.get(sj, si).magnitude()
            });
            if fits {
                used[v] = true;
                extend(i + 1, n, b, bt, assigned, used, out);
                used[v] = false;
            }
            assigned.pop();
        }
    }

    extend(0, n, b, bt, &mut assigned, &mut used, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Only generate bijections that preserve entry magnitudes.
    pub prune: bool,
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { prune: false, jobs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub homs: Vec<ClusterHom>,
    /// `table[a][b]` is the index of `homs[a] ∘ homs[b]`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

/// Every candidate `(t, σ)` of a complete graph in node order, then `σ` in
/// lexicographic order.
pub fn candidates(g: &ExchangeGraph, prune: bool) -> Vec<(usize, Permutation)> {
    let s0 = g.initial();
    g.nodes()
        .iter()
        .enumerate()
        .flat_map(|(i, node)| {
            let perms: Vec<Permutation> =
                if prune { compatible_permutations(s0, &node.seed) } else { Permutation::all(s0.rank()).collect() };
            perms.into_iter().map(move |p| (i, p))
        })
        .collect()
}

/// All cluster automorphisms of a complete exchange graph's algebra, with
/// their composition table.
pub fn automorphism_group(g: &ExchangeGraph, options: SearchOptions) -> Result<AutomorphismGroup> {
    if !g.is_complete() {
        return Err(Error::PartialGraph);
    }
    let s0 = g.initial();
    let candidates = candidates(g, options.prune);
    let checked = map_ordered(&candidates, options.jobs, |(node, sigma)| -> Result<Option<ClusterHom>> {
        let mut h = induce_hom(s0, &g.nodes()[*node].seed, sigma)?;
        if h.sign.is_none() {
            return Ok(None);
        }
        Ok(verify_one_step(&mut h, s0)?.then_some(h))
    });
    let mut homs = Vec::new();
    for h in checked {
        if let Some(h) = h? {
            homs.push(h);
        }
    }
    homs.sort_by(|a, b| (&a.target_key, &a.sigma).cmp(&(&b.target_key, &b.sigma)));
    homs.dedup_by(|a, b| a.images == b.images);

    let index: HashMap<&[LaurentPolynomial], usize> =
        homs.iter().enumerate().map(|(i, h)| (h.images.as_slice(), i)).collect();
    let identity = *index.get(s0.cluster()).expect("the identity always passes");
    let pairs: Vec<(usize, usize)> = (0..homs.len()).flat_map(|a| (0..homs.len()).map(move |b| (a, b))).collect();
    let products = map_ordered(&pairs, options.jobs, |&(a, b)| homs[a].compose_images(&homs[b]));
    let mut table = vec![vec![0; homs.len()]; homs.len()];
    for (&(a, b), images) in pairs.iter().zip(products) {
        let found = images?.and_then(|imgs| index.get(imgs.as_slice()).copied());
        table[a][b] = found.ok_or(Error::NotClosed { left: a, right: b })?;
    }
    Ok(AutomorphismGroup { homs, table, identity })
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.homs.len()
    }

    pub fn inverse_of(&self, a: usize) -> Option<usize> {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity && self.table[b][a] == self.identity)
    }

    /// Identity, inverses and associativity of the table. Closure holds by
    /// construction.
    pub fn satisfies_group_axioms(&self) -> bool {
        let n = self.order();
        let identity_ok = (0..n).all(|a| self.table[a][self.identity] == a && self.table[self.identity][a] == a);
        let inverses_ok = (0..n).all(|a| self.inverse_of(a).is_some());
        let assoc_ok = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.table[self.table[a][b]][c] == self.table[a][self.table[b][c]]))
        });
        identity_ok && inverses_ok && assoc_ok
    }

    pub fn report(&self) -> AutomorphismReport {
        AutomorphismReport {
            rank: self.homs.first().map(|h| h.images.len()).unwrap_or(0),
            order: self.order(),
            identity: self.identity,
            automorphisms: self.homs.iter().enumerate().map(|(i, h)| HomDocument::new(i, h)).collect(),
            composition: self.table.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetDocument {
    pub path: Vec<usize>,
    pub cluster: Vec<String>,
    pub matrix: Vec<Vec<JsonInt>>,
}

impl TargetDocument {
    pub fn new(target: &Seed) -> Self {
        let key = target.canonical_key();
        TargetDocument {
            path: target.path().iter().map(|k| k + 1).collect(),
            cluster: key.cluster.iter().map(ToString::to_string).collect(),
            matrix: rows_to_json(key.matrix.rows()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDocument {
    pub index: usize,
    pub images: Vec<String>,
    /// One-based.
    pub sigma: Vec<usize>,
    pub sign: Option<SignPattern>,
    pub global_sign: Option<i8>,
    pub verified: Verification,
    pub target: TargetDocument,
}

impl HomDocument {
    pub fn new(index: usize, h: &ClusterHom) -> Self {
        HomDocument {
            index,
            images: h.images.iter().map(ToString::to_string).collect(),
            sigma: h.sigma.images().iter().map(|v| v + 1).collect(),
            sign: h.sign.clone(),
            global_sign: h.sign.as_ref().and_then(SignPattern::global_sign),
            verified: h.verified,
            target: TargetDocument::new(&h.target),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismReport {
    pub rank: usize,
    pub order: usize,
    pub identity: usize,
    pub automorphisms: Vec<HomDocument>,
    pub composition: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{explore, Limits};
    use crate::matrix::ExchangeMatrix;

    fn seed(rows: Vec<Vec<i64>>) -> Seed {
        Seed::initial(ExchangeMatrix::from_rows(rows).unwrap())
    }

    fn a2() -> Seed {
        seed(vec![vec![0, 1], vec![-1, 0]])
    }

    fn lp(s: &str) -> LaurentPolynomial {
        LaurentPolynomial::parse(s, 2).unwrap()
    }

    #[test]
    fn sign_test_examples() {
        let s0 = a2();
        let id = Permutation::identity(2);
        let t = s0.mutate(0).unwrap();
        assert_eq!(sign_test(&s0, &t, &id).unwrap(), SignPattern::new(vec![-1, -1]));
        assert_eq!(sign_test(&s0, &s0, &id).unwrap(), Some(SignPattern::all_positive(2)));
        let doubled = seed(vec![vec![0, 2], vec![-2, 0]]);
        assert_eq!(sign_test(&s0, &doubled, &id).unwrap(), None);
        assert!(sign_test(&s0, &seed(vec![vec![0]]), &Permutation::identity(1)).is_err());
    }

    #[test]
    fn induce_hom_examples() {
        let s0 = a2();
        let id = Permutation::identity(2);
        assert_eq!(induce_hom(&s0, &s0, &id).unwrap().images, vec![lp("x1"), lp("x2")]);
        let t = s0.mutate(0).unwrap();
        let h = induce_hom(&s0, &t, &id).unwrap();
        assert_eq!(h.images, vec![lp("x1^-1 + x1^-1*x2"), lp("x2")]);
        assert_eq!(h.verified, Verification::Unchecked);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(induce_hom(&s0, &s0, &swap).unwrap().images, vec![lp("x2"), lp("x1")]);
    }

    #[test]
    fn verify_one_step_examples() {
        let s0 = a2();
        let id = Permutation::identity(2);
        let mut h = induce_hom(&s0, &s0, &id).unwrap();
        assert!(verify_one_step(&mut h, &s0).unwrap());
        assert_eq!(h.verified, Verification::Passed);

        let mut h = induce_hom(&s0, &s0.mutate(0).unwrap(), &id).unwrap();
        assert!(verify_one_step(&mut h, &s0).unwrap());

        // Relabeling by the swap negates B, which is exactly the matrix of μ1.
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let t = s0.mutate(0).unwrap();
        let mut h = induce_hom(&s0, &t, &swap).unwrap();
        assert_eq!(h.sign, Some(SignPattern::all_positive(2)));
        assert!(verify_one_step(&mut h, &s0).unwrap());
    }

    #[test]
    fn rejected_candidate_fails_verification() {
        // B2 seeds vs. the swap: magnitudes 2 and 1 trade places.
        let s0 = seed(vec![vec![0, 2], vec![-1, 0]]);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let mut h = induce_hom(&s0, &s0, &swap).unwrap();
        assert_eq!(h.sign, None);
        assert!(!verify_one_step(&mut h, &s0).unwrap());
        assert_eq!(h.verified, Verification::Failed);
    }

    #[test]
    fn a1_group_has_order_two() {
        let g = explore(&seed(vec![vec![0]]), Limits::default(), 1).unwrap();
        let group = automorphism_group(&g, SearchOptions::default()).unwrap();
        assert_eq!(group.order(), 2);
        assert!(group.homs[group.identity].is_identity());
        let other = &group.homs[1 - group.identity];
        assert_eq!(other.images, vec![LaurentPolynomial::parse("2*x1^-1", 1).unwrap()]);
        assert_eq!(group.inverse_of(1 - group.identity), Some(1 - group.identity));
        assert!(group.satisfies_group_axioms());
    }

    #[test]
    fn pruned_search_matches_full_search() {
        for rows in [
            vec![vec![0, 1], vec![-1, 0]],
            vec![vec![0, 2], vec![-1, 0]],
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]],
            vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]],
        ] {
            let g = explore(&seed(rows), Limits::default(), 1).unwrap();
            let full = automorphism_group(&g, SearchOptions::default()).unwrap();
            let pruned = automorphism_group(&g, SearchOptions { prune: true, jobs: 2 }).unwrap();
            assert_eq!(full, pruned);
            assert!(full.satisfies_group_axioms());
        }
    }

    #[test]
    fn partial_graphs_are_rejected() {
        let g = explore(&a2(), Limits { max_nodes: 2, max_depth: 64 }, 1).unwrap();
        assert_eq!(automorphism_group(&g, SearchOptions::default()), Err(Error::PartialGraph));
    }
}

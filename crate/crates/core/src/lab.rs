//! Brute-force audits: each one enumerates concrete instances and records
//! every instance where the audited statement fails, with enough context to
//! replay it.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::{candidates, induce_hom, verify_one_step};
use crate::error::{Error, Result};
use crate::graph::{ExchangeGraph, Limits};
use crate::json::{rows_to_json, JsonInt};
use crate::laurent::LaurentPolynomial;
use crate::matrix::{ExchangeMatrix, IntMatrix, SignPattern};
use crate::par::map_ordered;
use crate::seed::{exchange_binomial, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    /// Integer diagonal scalings between mutation-equivalent matrices are signs.
    Scalar,
    /// Every cluster variable has positive coefficients.
    Positivity,
    /// The sign test and the one-step commutation check agree.
    Theorem,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ScalarRigidity { path: Vec<usize>, member: Vec<Vec<JsonInt>>, diagonal: Vec<JsonInt>, reason: String },
    NegativeCoefficient { node: usize, path: Vec<usize>, variable: String },
    Equivalence { target_path: Vec<usize>, sigma: Vec<usize>, sign: Option<SignPattern>, verified: bool },
    BinomialRatio { target_path: Vec<usize>, sigma: Vec<usize>, direction: usize, ratio: Option<String> },
    DeepCommutation { target_path: Vec<usize>, sigma: Vec<usize>, first: usize, second: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub subject: Subject,
    pub instances_checked: usize,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    /// Set when enumeration stopped at a bound.
    pub partial: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counters: BTreeMap<String, usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl AuditReport {
    fn new(subject: Subject, instances_checked: usize, mut violations: Vec<Violation>, partial: bool) -> Self {
        violations.sort();
        AuditReport {
            subject,
            instances_checked,
            violation_count: violations.len(),
            violations,
            partial,
            counters: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn one_based(path: &[usize]) -> Vec<usize> {
    path.iter().map(|k| k + 1).collect()
}

/// Labeled matrices reachable from `b` by mutation, each with a path.
#[derive(Clone, Debug)]
pub struct MutationClass {
    pub members: Vec<(ExchangeMatrix, Vec<usize>)>,
    pub complete: bool,
}

pub fn mutation_class(b: &ExchangeMatrix, limits: Limits) -> Result<MutationClass> {
    let mut members = vec![(b.clone(), Vec::new())];
    let mut seen: HashMap<IntMatrix, usize> = HashMap::from([(b.as_int_matrix().clone(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut complete = limits.max_nodes > 0;
    while let Some(u) = queue.pop_front() {
        let (m, path) = members[u].clone();
        if path.len() >= limits.max_depth {
            complete = false;
            continue;
        }
        for k in 0..m.rank() {
            let next = m.mutate(k)?;
            if seen.contains_key(next.as_int_matrix()) {
                continue;
            }
            if members.len() >= limits.max_nodes {
                complete = false;
                continue;
            }
            seen.insert(next.as_int_matrix().clone(), members.len());
            let mut p = path.clone();
            p.push(k);
            queue.push_back(members.len());
            members.push((next, p));
        }
    }
    Ok(MutationClass { members, complete })
}

/// Integer diagonal `a` with `B = B2·diag(a)`, solved column by column.
///
/// A column that is zero in both matrices takes `a_k = 1`; a column that is
/// zero in exactly one of them admits no solution.
pub fn solve_column_scaling(b: &IntMatrix, b2: &IntMatrix) -> Option<Vec<BigInt>> {
    let n = b.rank();
    (0..n)
        .map(|k| {
            let col = b.column(k);
            let col2 = b2.column(k);
            let zero = col.iter().all(Zero::is_zero);
            let zero2 = col2.iter().all(Zero::is_zero);
            match (zero, zero2) {
                (true, true) => return Some(BigInt::one()),
                (true, false) | (false, true) => return None,
                _ => {}
            }
            let pivot = col2.iter().position(|v| !v.is_zero())?;
            let (a, r) = col[pivot].div_rem(&col2[pivot]);
            if !r.is_zero() {
                return None;
            }
            col.iter().zip(&col2).all(|(x, y)| *x == &a * y).then_some(a)
        })
        .collect()
}

/// Over the labeled mutation class of `b`, every integer diagonal solving
/// `B = B'·A` must be `±1` on nonzero blocks and constant on each of them.
pub fn scalar_rigidity_audit(b: &ExchangeMatrix, limits: Limits, jobs: usize) -> Result<AuditReport> {
    if b.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let start = Instant::now();
    let class = mutation_class(b, limits)?;
    let blocks = b.blocks();
    let found = map_ordered(&class.members, jobs, |(member, path)| {
        let a = solve_column_scaling(b.as_int_matrix(), member.as_int_matrix())?;
        let mut reasons = Vec::new();
        for block in blocks.nonzero_blocks() {
            if block.indices.iter().any(|&j| a[j].abs() != BigInt::one()) {
                reasons.push(format!("non-unit scaling on block {:?}", one_based(&block.indices)));
            } else if block.indices.iter().any(|&j| a[j] != a[block.indices[0]]) {
                reasons.push(format!("mixed signs inside block {:?}", one_based(&block.indices)));
            }
        }
        (!reasons.is_empty()).then(|| Violation::ScalarRigidity {
            path: one_based(path),
            member: rows_to_json(member.rows()),
            diagonal: a.into_iter().map(JsonInt).collect(),
            reason: reasons.join("; "),
        })
    });
    let solved = class
        .members
        .iter()
        .filter(|(m, _)| solve_column_scaling(b.as_int_matrix(), m.as_int_matrix()).is_some())
        .count();
    let mut report =
        AuditReport::new(Subject::Scalar, class.members.len(), found.into_iter().flatten().collect(), !class.complete);
    report.counters.insert("members_with_diagonal_solution".into(), solved);
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Scans every enumerated cluster variable for a non-positive coefficient.
/// Works on partial graphs.
pub fn positivity_audit(g: &ExchangeGraph) -> AuditReport {
    let start = Instant::now();
    let mut seen: BTreeSet<&LaurentPolynomial> = BTreeSet::new();
    let mut violations = Vec::new();
    for (i, node) in g.nodes().iter().enumerate() {
        for v in node.seed.cluster() {
            if seen.insert(v) && !v.is_nonnegative() {
                violations.push(Violation::NegativeCoefficient {
                    node: i,
                    path: one_based(node.seed.path()),
                    variable: v.to_string(),
                });
            }
        }
    }
    let mut report = AuditReport::new(Subject::Positivity, seen.len(), violations, !g.is_complete());
    report.elapsed = start.elapsed();
    report
}

struct CandidateOutcome {
    violations: Vec<Violation>,
    sign_passed: bool,
    verified: bool,
    mixed_signs: bool,
    deep_checks: usize,
}

fn audit_candidate(s0: &Seed, t: &Seed, sigma: &crate::perm::Permutation) -> Result<CandidateOutcome> {
    let mut h = induce_hom(s0, t, sigma)?;
    let verified = verify_one_step(&mut h, s0)?;
    let target_path = one_based(t.path());
    let sigma_doc = one_based(sigma.images());
    let mut violations = Vec::new();
    if h.sign.is_some() != verified {
        violations.push(Violation::Equivalence {
            target_path: target_path.clone(),
            sigma: sigma_doc.clone(),
            sign: h.sign.clone(),
            verified,
        });
    }

    let mut deep_checks = 0;
    if h.sign.is_some() {
        let n = s0.rank();
        for k in 0..n {
            let column = s0.matrix().as_int_matrix().column(k);
            let substituted = exchange_binomial(&column, &h.images)?;
            let target_binomial = t.exchange_binomial(sigma.apply(k))?;
            let ratio = substituted.div_exact(&target_binomial)?;
            if !ratio.as_ref().is_some_and(LaurentPolynomial::is_one) {
                violations.push(Violation::BinomialRatio {
                    target_path: target_path.clone(),
                    sigma: sigma_doc.clone(),
                    direction: k + 1,
                    ratio: ratio.map(|r| r.to_string()),
                });
            }
        }
        if verified {
            for k in 0..n {
                let once = s0.mutate(k)?;
                let t_once = t.mutate(sigma.apply(k))?;
                for j in (0..n).filter(|&j| j != k) {
                    let image = h.apply(&once.mutate(j)?.cluster()[j])?;
                    let sj = sigma.apply(j);
                    let expected = t_once.mutate(sj)?.cluster()[sj].clone();
                    deep_checks += 1;
                    if image.as_ref() != Some(&expected) {
                        violations.push(Violation::DeepCommutation {
                            target_path: target_path.clone(),
                            sigma: sigma_doc.clone(),
                            first: k + 1,
                            second: j + 1,
                        });
                    }
                }
            }
        }
    }
    let mixed_signs = match &h.sign {
        Some(sign) => {
            let relabeled = s0.matrix().permuted(sigma)?;
            let block_signs: BTreeSet<i8> =
                relabeled.blocks().nonzero_blocks().map(|b| sign.signs()[b.indices[0]]).collect();
            block_signs.len() > 1
        }
        None => false,
    };
    Ok(CandidateOutcome { violations, sign_passed: h.sign.is_some(), verified, mixed_signs, deep_checks })
}

/// Over every `(node, σ)` candidate: the sign test passes exactly when the
/// one-step commutation check does, and for passing candidates each
/// substituted exchange binomial equals the target's exactly. Passing
/// candidates are additionally spot-checked two mutation steps deep.
pub fn theorem_audit(g: &ExchangeGraph, jobs: usize) -> Result<AuditReport> {
    if !g.is_complete() {
        return Err(Error::PartialGraph);
    }
    let start = Instant::now();
    let s0 = g.initial();
    let all = candidates(g, false);
    let outcomes = map_ordered(&all, jobs, |(node, sigma)| audit_candidate(s0, &g.nodes()[*node].seed, sigma));

    let mut violations = Vec::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    for outcome in outcomes {
        let o = outcome?;
        violations.extend(o.violations);
        *counters.entry("sign_test_passed".into()).or_default() += o.sign_passed as usize;
        *counters.entry("one_step_verified".into()).or_default() += o.verified as usize;
        *counters.entry("mixed_block_signs".into()).or_default() += o.mixed_signs as usize;
        *counters.entry("depth_two_checks".into()).or_default() += o.deep_checks;
    }
    let mut report = AuditReport::new(Subject::Theorem, all.len(), violations, false);
    report.counters = counters;
    report.elapsed = start.elapsed();
    Ok(report)
}

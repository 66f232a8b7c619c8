//! Exact arithmetic for skew-symmetrizable cluster algebras with trivial
//! coefficients: matrix and seed mutation, exchange-graph enumeration,
//! cluster automorphism search, and brute-force audits of the rigidity and
//! positivity statements the automorphism test relies on.

pub mod automorphism;
pub mod cli;
pub mod error;
pub mod graph;
pub mod json;
pub mod lab;
pub mod laurent;
pub mod matrix;
mod par;
pub mod perm;
pub mod seed;

pub use automorphism::{automorphism_group, induce_hom, sign_test, verify_one_step, AutomorphismGroup, ClusterHom};
pub use error::{Error, Result};
pub use graph::{explore, ExchangeGraph, Limits};
pub use json::{read_matrix, write_matrix, MatrixDocument};
pub use lab::{positivity_audit, scalar_rigidity_audit, theorem_audit, AuditReport, Subject};
pub use laurent::LaurentPolynomial;
pub use matrix::{
    decompose_blocks, find_skew_symmetrizer, sign_match_up_to_blocks, Block, BlockKind, BlockPartition, ExchangeMatrix,
    IntMatrix, SignPattern, SkewSymmetrizer,
};
pub use perm::Permutation;
pub use seed::{Seed, SeedKey};

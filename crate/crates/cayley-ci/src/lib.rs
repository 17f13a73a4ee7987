//! Permutation groups and colored k-ary relational structures.
//!
//! The crate has two halves. The bottom half is general machinery:
//! permutation arithmetic ([`perm`]), stabilizer chains and block systems
//! ([`group`]), colored relational structures ([`relstruct`]), and an
//! automorphism-group solver ([`autgrp`]). The top half uses that machinery
//! to build and verify concrete certificates that certain abelian groups
//! admit pairs of isomorphic Cayley ternary structures not related by any
//! group automorphism ([`witness`]), and to check an explicit order-2048
//! group on 32 points with two nonconjugate regular elementary abelian
//! subgroups ([`z2five`]).
//!
//! Everything is deterministic: no randomness, no hash-order dependence in
//! any output.

pub mod abelian;
pub mod autgrp;
pub mod group;
pub mod perm;
pub mod relstruct;
pub mod report;
pub mod witness;
pub mod z2five;

pub use abelian::GroupSpec;
pub use group::{BlockSystem, PermGroup};
pub use perm::Permutation;
pub use relstruct::{CayleyStructure, ColorRelStruct, ConnectionSet};

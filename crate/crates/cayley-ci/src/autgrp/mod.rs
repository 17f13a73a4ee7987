//! Automorphism groups of colored relational structures, and isomorphism
//! testing restricted to group automorphisms of `Z_p x Z_2^d`.
//!
//! [`aut_group`] runs a refinement-plus-backtracking search and works up
//! to a node budget; [`brute_force_aut`] filters all `n!` permutations and
//! exists to cross-check it on small inputs. [`k_closure`] combines the
//! solver with orbit colorings of k-tuples.

mod refine;
mod search;

use num_bigint::BigUint;
use thiserror::Error;

use crate::abelian::{gf2_apply, GroupSpec};
use crate::group::{GroupError, PermGroup};
use crate::perm::Permutation;
use crate::relstruct::{orbit_coloring_budgeted, CayleyStructure, ColorRelStruct, StructError};

/// Node limit for the backtracking search.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;
/// Candidate limit for group-automorphism enumeration.
pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;
/// Largest degree [`brute_force_aut`] accepts.
pub const BRUTE_FORCE_MAX: usize = 8;

#[derive(Debug, Error)]
pub enum AutError {
    #[error("brute force is limited to {1} points, got {0}")]
    TooLarge(usize, usize),
    #[error("search visited {nodes} nodes, budget is {budget}")]
    BudgetExceeded { nodes: u64, budget: u64 },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("structures carry different group specs")]
    SpecMismatch,
    #[error("{count} automorphism candidates exceed the cap {cap}")]
    CandidateCapExceeded { count: u64, cap: u64 },
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The full automorphism group of a colored relational structure.
pub fn aut_group(x: &ColorRelStruct) -> Result<PermGroup, AutError> {
    aut_group_budgeted(x, DEFAULT_NODE_BUDGET)
}

pub fn aut_group_budgeted(x: &ColorRelStruct, budget: u64) -> Result<PermGroup, AutError> {
    let gens = search::automorphism_generators(x, budget)?;
    if gens.is_empty() {
        Ok(PermGroup::trivial(x.vertex_count()))
    } else {
        Ok(PermGroup::from_generators(gens)?)
    }
}

/// Oracle: filter all `n!` permutations through `is_automorphism`.
pub fn brute_force_aut(x: &ColorRelStruct) -> Result<PermGroup, AutError> {
    let n = x.vertex_count();
    if n > BRUTE_FORCE_MAX {
        return Err(AutError::TooLarge(n, BRUTE_FORCE_MAX));
    }
    let mut auts = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        let g = Permutation::from_images(images.clone()).expect("images form a bijection");
        if x.is_automorphism(&g) {
            auts.push(g);
        }
        if !next_permutation(&mut images) {
            break;
        }
    }
    // the identity always qualifies, so auts is nonempty
    Ok(PermGroup::from_generators(auts)?)
}

/// Steps `items` to its lexicographic successor; false after the last one.
fn next_permutation(items: &mut [usize]) -> bool {
    let n = items.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// The k-closure of a permutation group: the automorphism group of the
/// coloring of all k-tuples by their orbits. Contains the group it closes
/// and shrinks (weakly) as k grows.
pub fn k_closure(group: &PermGroup, k: usize) -> Result<PermGroup, AutError> {
    let coloring = orbit_coloring_budgeted(group, k, crate::relstruct::DEFAULT_TUPLE_BUDGET)?;
    aut_group(&coloring)
}

/// The number of automorphisms of `Z_p x Z_2^d`: one unit multiplier mod p
/// and one invertible matrix over GF(2).
pub fn group_automorphism_count(spec: &GroupSpec) -> BigUint {
    let d = spec.d();
    let mut count = BigUint::from(if spec.p() > 1 { spec.p() - 1 } else { 1 });
    let full = BigUint::from(1u64) << d;
    for i in 0..d {
        count *= &full - (BigUint::from(1u64) << i);
    }
    count
}

/// Streams every automorphism of `Z_p x Z_2^d` as a permutation of the
/// canonical encoding: pairs of a unit multiplier `u` (ascending) and an
/// invertible matrix over GF(2) (ascending row-major encoding, first row
/// most significant), mapping `(i, v)` to `(u*i mod p, Mv)`.
pub fn enumerate_group_automorphisms(spec: &GroupSpec) -> Result<GroupAutomorphisms, AutError> {
    enumerate_group_automorphisms_capped(spec, DEFAULT_CANDIDATE_CAP)
}

pub fn enumerate_group_automorphisms_capped(
    spec: &GroupSpec,
    cap: u64,
) -> Result<GroupAutomorphisms, AutError> {
    let count = group_automorphism_count(spec);
    if count > BigUint::from(cap) {
        let count = u64::try_from(&count).unwrap_or(u64::MAX);
        return Err(AutError::CandidateCapExceeded { count, cap });
    }
    let units: Vec<u64> = if spec.p() > 1 {
        (1..spec.p()).collect()
    } else {
        vec![1]
    };
    let matrices = invertible_matrices(spec.d());
    Ok(GroupAutomorphisms {
        spec: *spec,
        units,
        matrices,
        next: 0,
    })
}

/// All invertible d x d matrices over GF(2), rows as bitmasks, ordered
/// ascending by (row 0, row 1, ..). Built row by row, skipping rows in the
/// span of the ones already chosen.
fn invertible_matrices(d: u32) -> Vec<Vec<u32>> {
    fn reduce(mut r: u32, basis: &[u32]) -> u32 {
        // basis rows have distinct leading bits, kept in descending order
        for &b in basis {
            let lead = 1u32 << (31 - b.leading_zeros());
            if r & lead != 0 {
                r ^= b;
            }
        }
        r
    }
    fn grow(
        d: u32,
        rows: &mut Vec<u32>,
        basis: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if rows.len() == d as usize {
            out.push(rows.clone());
            return;
        }
        for r in 1..(1u32 << d) {
            if reduce(r, basis) == 0 {
                continue;
            }
            rows.push(r);
            let reduced = reduce(r, basis);
            let pos = basis
                .iter()
                .position(|&b| b.leading_zeros() > reduced.leading_zeros())
                .unwrap_or(basis.len());
            basis.insert(pos, reduced);
            grow(d, rows, basis, out);
            basis.remove(pos);
            rows.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        out.push(Vec::new());
        return out;
    }
    grow(d, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

pub struct GroupAutomorphisms {
    spec: GroupSpec,
    units: Vec<u64>,
    matrices: Vec<Vec<u32>>,
    next: usize,
}

impl GroupAutomorphisms {
    fn total(&self) -> usize {
        self.units.len() * self.matrices.len()
    }
}

impl Iterator for GroupAutomorphisms {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.next >= self.total() {
            return None;
        }
        let unit = self.units[self.next / self.matrices.len()];
        let rows = &self.matrices[self.next % self.matrices.len()];
        self.next += 1;
        let spec = &self.spec;
        let mut images = vec![0usize; spec.degree()];
        for i in 0..spec.p().max(1) {
            let fiber = if spec.p() > 1 { (i * unit) % spec.p() } else { 0 };
            for v in 0..spec.vector_count() {
                images[spec.encode(i, v)] =
                    spec.encode(fiber, gf2_apply(rows, v as u32) as usize);
            }
        }
        Some(Permutation::from_images(images).expect("automorphisms are bijections"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total() - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GroupAutomorphisms {}

/// Outcome of scanning group automorphisms for an isomorphism.
#[derive(Clone, Debug)]
pub struct IsoScan {
    pub found: Option<Permutation>,
    /// Candidates tested; the full count when nothing was found.
    pub tested: u64,
}

/// Searches for a group automorphism carrying `x` onto `y` edge-for-edge,
/// colors included, by scanning the full enumeration.
pub fn iso_by_group_automorphism(
    x: &ColorRelStruct,
    y: &ColorRelStruct,
    spec: &GroupSpec,
    cap: u64,
) -> Result<IsoScan, AutError> {
    if x.vertex_count() != spec.degree() {
        return Err(AutError::DegreeMismatch(x.vertex_count(), spec.degree()));
    }
    if y.vertex_count() != spec.degree() {
        return Err(AutError::DegreeMismatch(y.vertex_count(), spec.degree()));
    }
    let mut tested = 0u64;
    for beta in enumerate_group_automorphisms_capped(spec, cap)? {
        tested += 1;
        if maps_onto(x, y, &beta) {
            return Ok(IsoScan {
                found: Some(beta),
                tested,
            });
        }
    }
    Ok(IsoScan {
        found: None,
        tested,
    })
}

/// Same scan through connection sets: a group automorphism fixes the
/// identity and normalizes translations, so it carries one translation
/// -closed structure onto another exactly when it carries the connection
/// set onto the connection set. Much cheaper than comparing full edge
/// sets.
pub fn iso_by_connection_sets(
    x: &CayleyStructure,
    y: &CayleyStructure,
    cap: u64,
) -> Result<IsoScan, AutError> {
    if x.conn().spec() != y.conn().spec() {
        return Err(AutError::SpecMismatch);
    }
    let spec = x.conn().spec();
    let mut tested = 0u64;
    for beta in enumerate_group_automorphisms_capped(spec, cap)? {
        tested += 1;
        if &x.conn().map_points(&beta) == y.conn() {
            return Ok(IsoScan {
                found: Some(beta),
                tested,
            });
        }
    }
    Ok(IsoScan {
        found: None,
        tested,
    })
}

/// Whether `beta` maps the edges of `x` exactly onto the edges of `y`.
/// Counts agree and `beta` is injective on tuples, so coverage of `y`
/// follows from containment.
fn maps_onto(x: &ColorRelStruct, y: &ColorRelStruct, beta: &Permutation) -> bool {
    x.edge_count() == y.edge_count()
        && x.edges_iter()
            .all(|(t, c)| y.color(&beta.apply_tuple(&t)) == Some(c))
}

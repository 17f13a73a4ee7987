//! Permutation groups backed by stabilizer chains.
//!
//! [`PermGroup`] is constructed from generators and immediately builds a
//! deterministic Schreier-Sims chain, so order, membership, and stabilizers
//! are exact from the start. Block systems of transitive groups live in
//! [`blocks`].

mod blocks;
pub(crate) mod bsgs;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::abelian;
use crate::perm::{PermError, Permutation};

pub use blocks::BlockSystem;

/// Cap for full element enumeration; operations that would walk more
/// elements than this refuse instead of running away.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("no generators given (use PermGroup::trivial for the trivial group)")]
    NoGenerators,
    #[error("generator degrees disagree: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group is not transitive")]
    NotTransitive,
    #[error("enumeration of {order} elements exceeds the cap of {cap}")]
    EnumerationCapExceeded { order: BigUint, cap: u64 },
    #[error("generator {0} lies outside the ambient group")]
    NotASubgroup(String),
    #[error("{0}")]
    NotABlockSystem(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("group file, line {line}: {message}")]
    FileFormat { line: usize, message: String },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A permutation group on `{0, .., degree-1}` given by generators.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: bsgs::Chain,
    order: BigUint,
}

impl PermGroup {
    pub fn from_generators(gens: Vec<Permutation>) -> Result<PermGroup, GroupError> {
        Self::with_base_hint(gens, &[])
    }

    /// Like [`from_generators`], but prefers the hinted points as base
    /// points. The first hint point moved by the group is guaranteed to be
    /// the first base point, which `point_stabilizer` relies on.
    ///
    /// [`from_generators`]: PermGroup::from_generators
    pub fn with_base_hint(gens: Vec<Permutation>, hint: &[usize]) -> Result<PermGroup, GroupError> {
        if gens.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        let degree = gens[0].degree();
        for g in &gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch(degree, g.degree()));
            }
        }
        let chain = bsgs::Chain::build(degree, &gens, hint);
        let order = chain.order();
        Ok(PermGroup {
            degree,
            generators: gens,
            chain,
            order,
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::from_generators(vec![Permutation::identity(degree)])
            .expect("identity generator is valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.chain.base()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        self.chain.strong_generators()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.chain.contains(g)
    }

    /// Whether every generator of `other` lies in this group.
    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.degree == self.degree && other.generators.iter().all(|g| self.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order == other.order && self.contains_group(other)
    }

    /// All elements, deepest-stabilizer-fastest odometer order over the
    /// transversals; the identity comes first. Refuses over the cap.
    pub fn elements(&self) -> Result<GroupElements<'_>, GroupError> {
        self.elements_capped(DEFAULT_ENUM_CAP)
    }

    pub fn elements_capped(&self, cap: u64) -> Result<GroupElements<'_>, GroupError> {
        if self.order > BigUint::from(cap) {
            return Err(GroupError::EnumerationCapExceeded {
                order: self.order.clone(),
                cap,
            });
        }
        Ok(GroupElements {
            inner: bsgs::Elements::new(&self.chain),
        })
    }

    /// Orbit of a point, ascending.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        assert!(point < self.degree, "point out of range");
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut stack = vec![point];
        while let Some(x) = stack.pop() {
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.degree).filter(|&p| seen[p]).collect()
    }

    /// All orbits, each ascending, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if !assigned[p] {
                let orb = self.orbit(p);
                for &q in &orb {
                    assigned[q] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree
    }

    /// Every point stabilizer is trivial.
    pub fn is_semiregular(&self) -> bool {
        let order = &self.order;
        if *order > BigUint::from(self.degree as u64) {
            return false;
        }
        (0..self.degree).all(|p| BigUint::from(self.orbit(p).len() as u64) == *order)
    }

    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order == BigUint::from(self.degree as u64)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if a.compose(b) != b.compose(a) {
                    return false;
                }
            }
        }
        true
    }

    /// Abelian with every non-identity element of the same prime order.
    /// For an abelian group it is enough that the generators share a prime
    /// order, since the exponent divides their lcm.
    pub fn is_elementary_abelian(&self) -> bool {
        if !self.is_abelian() {
            return false;
        }
        let mut p: Option<u128> = None;
        for g in &self.generators {
            if g.is_identity() {
                continue;
            }
            let o = g.order();
            match p {
                None => {
                    if !abelian::is_prime(o as u64) {
                        return false;
                    }
                    p = Some(o);
                }
                Some(q) => {
                    if o != q {
                        return false;
                    }
                }
            }
        }
        p.is_some() || self.order == BigUint::from(1u8)
    }

    /// The stabilizer of a point, as a group in its own right.
    pub fn point_stabilizer(&self, point: usize) -> PermGroup {
        assert!(point < self.degree, "point out of range");
        if self.generators.iter().all(|g| g.apply(point) == point) {
            return self.clone();
        }
        let chain = bsgs::Chain::build(self.degree, &self.generators, &[point]);
        debug_assert_eq!(chain.base()[0], point);
        let gens = chain.level_generators(1);
        if gens.is_empty() {
            PermGroup::trivial(self.degree)
        } else {
            PermGroup::from_generators(gens).expect("stabilizer generators are valid")
        }
    }

    /// Pointwise stabilizer of a set of points.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> PermGroup {
        let mut g = self.clone();
        for &p in points {
            g = g.point_stabilizer(p);
        }
        g
    }

    /// Searches this group for an element conjugating subgroup `a` onto
    /// subgroup `b`, by exhaustive scan in enumeration order. Both must be
    /// subgroups of `self`; the scan refuses to start past the cap.
    pub fn find_conjugator(
        &self,
        a: &PermGroup,
        b: &PermGroup,
        cap: u64,
    ) -> Result<Option<Permutation>, GroupError> {
        for (sub, name) in [(a, "first"), (b, "second")] {
            if !self.contains_group(sub) {
                return Err(GroupError::NotASubgroup(format!(
                    "{} subgroup is not contained in the ambient group",
                    name
                )));
            }
        }
        if a.order != b.order {
            return Ok(None);
        }
        for g in self.elements_capped(cap)? {
            if a.generators.iter().all(|s| b.contains(&s.conjugate_by(&g))) {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {}, {} generators)",
            self.degree,
            self.order,
            self.generators.len()
        )
    }
}

pub struct GroupElements<'a> {
    inner: bsgs::Elements<'a>,
}

impl<'a> Iterator for GroupElements<'a> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        self.inner.next()
    }
}

/// The wreath product of `top` (on X) acting on copies of `bottom` (on Y),
/// as a permutation group on X x Y with point encoding `x * |Y| + y`. Its
/// order is `|top| * |bottom|^|X|`.
pub fn wreath_product(top: &PermGroup, bottom: &PermGroup) -> PermGroup {
    let nx = top.degree();
    let ny = bottom.degree();
    let degree = nx * ny;
    let mut gens = Vec::new();
    for g in top.generators() {
        let mut images = vec![0; degree];
        for x in 0..nx {
            for y in 0..ny {
                images[x * ny + y] = g.apply(x) * ny + y;
            }
        }
        gens.push(Permutation::from_images(images).expect("wreath top generator"));
    }
    for x in 0..nx {
        for h in bottom.generators() {
            let mut images: Vec<usize> = (0..degree).collect();
            for y in 0..ny {
                images[x * ny + y] = x * ny + h.apply(y);
            }
            gens.push(Permutation::from_images(images).expect("wreath bottom generator"));
        }
    }
    PermGroup::from_generators(gens).expect("wreath generators are valid")
}

/// Restriction of `g` to an invariant set of points, renumbered by ascending
/// position in `points`. Errors if `g` does not stabilize the set.
pub fn restrict_to_points(g: &Permutation, points: &[usize]) -> Result<Permutation, GroupError> {
    let sorted: Vec<usize> = {
        let set: BTreeSet<usize> = points.iter().copied().collect();
        set.into_iter().collect()
    };
    let index_of = |p: usize| sorted.binary_search(&p).ok();
    let mut images = Vec::with_capacity(sorted.len());
    for &p in &sorted {
        let q = g.apply(p);
        match index_of(q) {
            Some(i) => images.push(i),
            None => {
                return Err(GroupError::BadArgument(format!(
                    "{} maps {} outside the given point set",
                    g,
                    p + 1
                )))
            }
        }
    }
    Ok(Permutation::from_images(images)?)
}

/// Parses the group file format: a `degree <n>` header, then one generator
/// per line in cycle notation. Blank lines are ignored.
pub fn parse_group_file(text: &str) -> Result<PermGroup, GroupError> {
    let mut degree: Option<usize> = None;
    let mut gens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match degree {
            None => {
                let rest = line.strip_prefix("degree").ok_or(GroupError::FileFormat {
                    line: i + 1,
                    message: "expected 'degree <n>' header".into(),
                })?;
                let n: usize = rest.trim().parse().map_err(|_| GroupError::FileFormat {
                    line: i + 1,
                    message: format!("bad degree \"{}\"", rest.trim()),
                })?;
                if n == 0 {
                    return Err(GroupError::FileFormat {
                        line: i + 1,
                        message: "degree must be at least 1".into(),
                    });
                }
                degree = Some(n);
            }
            Some(n) => {
                let g =
                    Permutation::parse_cycles(line, n).map_err(|e| GroupError::FileFormat {
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                gens.push(g);
            }
        }
    }
    if degree.is_none() {
        return Err(GroupError::FileFormat {
            line: 1,
            message: "missing 'degree <n>' header".into(),
        });
    }
    if gens.is_empty() {
        return Err(GroupError::FileFormat {
            line: 2,
            message: "no generators listed".into(),
        });
    }
    PermGroup::from_generators(gens)
}

/// Inverse of [`parse_group_file`].
pub fn write_group_file(group: &PermGroup) -> String {
    let mut out = format!("degree {}\n", group.degree());
    for g in group.generators() {
        out.push_str(&g.cycle_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cyc(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    /// Brute-force closure of a generating set; the oracle for chain orders.
    pub(crate) fn closure(gens: &[Permutation]) -> HashSet<Vec<usize>> {
        let n = gens[0].degree();
        let mut set: HashSet<Vec<usize>> = HashSet::new();
        set.insert(Permutation::identity(n).images().to_vec());
        let mut frontier: Vec<Permutation> = vec![Permutation::identity(n)];
        while let Some(g) = frontier.pop() {
            for s in gens {
                let h = s.compose(&g);
                if set.insert(h.images().to_vec()) {
                    frontier.push(h);
                }
            }
        }
        set
    }

    #[test]
    fn order_matches_brute_closure_on_assorted_groups() {
        let cases: Vec<Vec<Permutation>> = vec![
            vec![cyc("(1,2,3,4)", 4)],
            vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)],
            vec![cyc("(1,2,3)", 5), cyc("(4,5)", 5)],
            vec![cyc("(1,2)(3,4)", 4), cyc("(1,3)(2,4)", 4)],
            vec![cyc("(1,2,3,4,5,6,7)", 7), cyc("(2,3,5)(4,7,6)", 7)],
            vec![cyc("(1,2)", 6), cyc("(2,3)", 6), cyc("(3,4)", 6), cyc("(4,5)", 6), cyc("(5,6)", 6)],
            vec![cyc("(1,2,3)", 9), cyc("(4,5,6)", 9), cyc("(7,8,9)", 9)],
        ];
        for gens in cases {
            let expect = closure(&gens).len() as u64;
            let g = PermGroup::from_generators(gens).unwrap();
            assert_eq!(g.order(), &BigUint::from(expect));
        }
    }

    #[test]
    fn membership_agrees_with_closure() {
        let gens = vec![cyc("(1,2,3,4)", 4)];
        let g = PermGroup::from_generators(gens.clone()).unwrap();
        let all = closure(&gens);
        let mut found = 0usize;
        // scan all of Sym(4)
        let sym = PermGroup::from_generators(vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)]).unwrap();
        for e in sym.elements().unwrap() {
            let inside = all.contains(e.images());
            assert_eq!(g.contains(&e), inside);
            if inside {
                found += 1;
            }
        }
        assert_eq!(found, 4);
    }

    #[test]
    fn elements_enumerates_each_element_once() {
        let g = PermGroup::from_generators(vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)]).unwrap();
        let elems: Vec<Permutation> = g.elements().unwrap().collect();
        assert_eq!(elems.len(), 24);
        assert!(elems[0].is_identity());
        let distinct: HashSet<Vec<usize>> = elems.iter().map(|e| e.images().to_vec()).collect();
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn elements_of_trivial_group_is_just_identity() {
        let g = PermGroup::trivial(5);
        let elems: Vec<Permutation> = g.elements().unwrap().collect();
        assert_eq!(elems.len(), 1);
        assert!(elems[0].is_identity());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = PermGroup::from_generators(vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)]).unwrap();
        match g.elements_capped(10) {
            Err(GroupError::EnumerationCapExceeded { cap: 10, .. }) => {}
            other => panic!("expected cap error, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn point_stabilizer_in_symmetric_group() {
        let g = PermGroup::from_generators(vec![cyc("(1,2)", 5), cyc("(1,2,3,4,5)", 5)]).unwrap();
        let stab = g.point_stabilizer(0);
        assert_eq!(stab.order(), &BigUint::from(24u8));
        assert!(stab.generators().iter().all(|s| s.apply(0) == 0));
        // orbit-stabilizer: |G| = |orbit| * |stab|
        assert_eq!(
            g.order(),
            &(BigUint::from(g.orbit(0).len() as u64) * stab.order())
        );
    }

    #[test]
    fn orbits_partition_the_points() {
        let g = PermGroup::from_generators(vec![cyc("(1,2,3)", 9), cyc("(4,5)", 9)]).unwrap();
        let orbits = g.orbits();
        assert_eq!(orbits, vec![vec![0, 1, 2], vec![3, 4], vec![5], vec![6], vec![7], vec![8]]);
    }

    #[test]
    fn regularity_predicates() {
        let cyclic = PermGroup::from_generators(vec![cyc("(1,2,3,4)", 4)]).unwrap();
        assert!(cyclic.is_transitive() && cyclic.is_regular() && cyclic.is_semiregular());
        let sym = PermGroup::from_generators(vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)]).unwrap();
        assert!(sym.is_transitive() && !sym.is_regular() && !sym.is_semiregular());
        let semi = PermGroup::from_generators(vec![cyc("(1,2)(3,4)(5,6)", 6)]).unwrap();
        assert!(!semi.is_transitive() && semi.is_semiregular() && !semi.is_regular());
        let klein =
            PermGroup::from_generators(vec![cyc("(1,2)(3,4)", 4), cyc("(1,3)(2,4)", 4)]).unwrap();
        assert!(klein.is_regular() && klein.is_elementary_abelian());
        assert!(!sym.is_elementary_abelian());
        let cyclic9 = PermGroup::from_generators(vec![cyc("(1,2,3,4,5,6,7,8,9)", 9)]).unwrap();
        assert!(cyclic9.is_abelian() && !cyclic9.is_elementary_abelian());
    }

    #[test]
    fn conjugator_search_finds_witness_inside_sym4() {
        let sym = PermGroup::from_generators(vec![cyc("(1,2)", 4), cyc("(1,2,3,4)", 4)]).unwrap();
        let a = PermGroup::from_generators(vec![cyc("(1,2)", 4)]).unwrap();
        let b = PermGroup::from_generators(vec![cyc("(3,4)", 4)]).unwrap();
        let g = sym.find_conjugator(&a, &b, 1_000).unwrap().unwrap();
        assert!(b.contains(&cyc("(1,2)", 4).conjugate_by(&g)));
        // different orders: no conjugator, reported as none rather than error
        let c = PermGroup::from_generators(vec![cyc("(1,2,3)", 4)]).unwrap();
        assert!(sym.find_conjugator(&a, &c, 1_000).unwrap().is_none());
    }

    #[test]
    fn conjugator_search_rejects_non_subgroups() {
        let alt = PermGroup::from_generators(vec![cyc("(1,2,3)", 4), cyc("(2,3,4)", 4)]).unwrap();
        let a = PermGroup::from_generators(vec![cyc("(1,2)", 4)]).unwrap();
        assert!(matches!(
            alt.find_conjugator(&a, &a, 1_000),
            Err(GroupError::NotASubgroup(_))
        ));
    }

    #[test]
    fn wreath_product_order_and_degree() {
        let z2 = PermGroup::from_generators(vec![cyc("(1,2)", 2)]).unwrap();
        let z3 = PermGroup::from_generators(vec![cyc("(1,2,3)", 3)]).unwrap();
        let w = wreath_product(&z2, &z3);
        assert_eq!(w.degree(), 6);
        // |Z2| * |Z3|^2 = 2 * 9
        assert_eq!(w.order(), &BigUint::from(18u8));
    }

    #[test]
    fn group_file_round_trip() {
        let g = PermGroup::from_generators(vec![cyc("(1,2)(3,4)", 5), cyc("(1,3,5)", 5)]).unwrap();
        let text = write_group_file(&g);
        let back = parse_group_file(&text).unwrap();
        assert_eq!(back.degree(), 5);
        assert!(back.same_group(&g));
        assert!(parse_group_file("degree x\n(1,2)").is_err());
        assert!(parse_group_file("(1,2)").is_err());
        assert!(parse_group_file("degree 3\n").is_err());
        assert!(parse_group_file("degree 3\n(1,4)").is_err());
    }

    #[test]
    fn restriction_to_invariant_set() {
        let g = cyc("(1,2)(4,5,6)", 6);
        let r = restrict_to_points(&g, &[3, 4, 5]).unwrap();
        assert_eq!(r.images(), &[1, 2, 0]);
        assert!(restrict_to_points(&g, &[1, 2]).is_err());
    }
}

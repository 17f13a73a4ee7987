//! Permutations of `{0, .., n-1}` in image-table form.
//!
//! Conventions used across the whole crate:
//!
//! * points are 0-indexed internally; cycle notation is 1-indexed on the
//!   way in and out, so `"(1,2)(3,4)"` swaps points 0,1 and 2,3;
//! * composition is rightmost-first: `p.compose(&q)` applies `q` and then
//!   `p`, i.e. `(p ∘ q)(x) = p(q(x))`;
//! * the identity prints as `"()"` and fixed points are omitted.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image table is not a bijection: value {0} repeated or out of range")]
    NotABijection(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("cycle notation: {0}")]
    BadCycleNotation(String),
}

/// A permutation of `{0, .., degree-1}`, stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in &images {
            if im >= n || seen[im] {
                return Err(PermError::NotABijection(im));
            }
            seen[im] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn apply_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&p| self.images[p]).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    /// `self ∘ other`: applies `other` first. Panics on degree mismatch.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "compose: degree mismatch ({} vs {})",
            self.degree(),
            other.degree()
        );
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &im) in self.images.iter().enumerate() {
            images[im] = i;
        }
        Permutation { images }
    }

    /// `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().compose(self).compose(g)
    }

    /// `self⁻¹ ∘ other⁻¹ ∘ self ∘ other`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse()
            .compose(&other.inverse())
            .compose(self)
            .compose(other)
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = base.compose(&acc);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Cycle decomposition, nontrivial cycles only, each rotated to start at
    /// its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Multiplicative order; lcm of cycle lengths.
    pub fn order(&self) -> u128 {
        self.cycles()
            .iter()
            .fold(1u128, |acc, c| lcm(acc, c.len() as u128))
    }

    /// True for even permutations. A cycle of length l contributes l-1
    /// transpositions.
    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    /// Points moved by the permutation, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.images[i] != i).collect()
    }

    /// Parses 1-indexed disjoint-cycle notation, e.g. `"(1,2)(3,4)"`.
    /// `"()"` (or an empty string) is the identity. The cycles need not be
    /// disjoint; they are applied rightmost-first like any composition.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(PermError::BadCycleNotation(format!(
                    "expected '(' at \"{rest}\""
                )));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| PermError::BadCycleNotation("unclosed '('".into()))?;
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            if body.is_empty() {
                continue;
            }
            let mut cycle = Vec::new();
            for part in body.split(',') {
                let v: usize = part.parse().map_err(|_| {
                    PermError::BadCycleNotation(format!("bad point \"{part}\""))
                })?;
                if v == 0 || v > degree {
                    return Err(PermError::BadCycleNotation(format!(
                        "point {v} out of range 1..={degree}"
                    )));
                }
                cycle.push(v - 1);
            }
            for (i, &p) in cycle.iter().enumerate() {
                if cycle[i + 1..].contains(&p) {
                    return Err(PermError::BadCycleNotation(format!(
                        "point {} repeated within a cycle",
                        p + 1
                    )));
                }
            }
            cycles.push(cycle);
        }
        let mut perm = Permutation::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<usize> = (0..degree).collect();
            for w in 0..cycle.len() {
                images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
            let one = Permutation { images };
            perm = perm.compose(&one);
        }
        // composing possibly-overlapping cycles stays a bijection, so no
        // re-validation is needed
        Ok(perm)
    }

    /// 1-indexed disjoint-cycle form; identity is `"()"`.
    pub fn cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".into();
        }
        cycles
            .iter()
            .map(|c| {
                let inner: Vec<String> = c.iter().map(|&p| (p + 1).to_string()).collect();
                format!("({})", inner.join(","))
            })
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.cycle_string())
    }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn compose_applies_rightmost_first() {
        // p = (0 1), q = (1 2) as 0-indexed transpositions on 3 points
        let a = p(&[1, 0, 2]);
        let b = p(&[0, 2, 1]);
        assert_eq!(a.compose(&b).images(), &[1, 2, 0]);
    }

    #[test]
    fn inverse_round_trips() {
        let g = p(&[2, 0, 3, 1]);
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn commutator_of_adjacent_transpositions_has_order_three() {
        let g = p(&[1, 0, 2]);
        let h = p(&[0, 2, 1]);
        let c = g.commutator(&h);
        assert_eq!(c.order(), 3);
    }

    #[test]
    fn parse_and_print_cycles() {
        let g = Permutation::parse_cycles("(1,2)(3,4)", 5).unwrap();
        assert_eq!(g.images(), &[1, 0, 3, 2, 4]);
        assert_eq!(g.cycle_string(), "(1,2)(3,4)");
        let id = Permutation::parse_cycles("()", 4).unwrap();
        assert!(id.is_identity());
        assert_eq!(id.cycle_string(), "()");
        let long = Permutation::parse_cycles("(2,3,4)", 4).unwrap();
        assert_eq!(long.apply(1), 2);
        assert_eq!(long.apply(3), 1);
    }

    #[test]
    fn parse_rejects_junk() {
        assert!(Permutation::parse_cycles("(0,1)", 3).is_err());
        assert!(Permutation::parse_cycles("(1,4)", 3).is_err());
        assert!(Permutation::parse_cycles("(1,1)", 3).is_err());
        assert!(Permutation::parse_cycles("1,2", 3).is_err());
        assert!(Permutation::parse_cycles("(1,2", 3).is_err());
    }

    #[test]
    fn parity_matches_transposition_count() {
        assert!(Permutation::identity(4).is_even());
        assert!(!p(&[1, 0, 2, 3]).is_even());
        assert!(p(&[1, 2, 0, 3]).is_even());
        assert!(p(&[1, 0, 3, 2]).is_even());
    }

    #[test]
    fn pow_and_order_agree() {
        let g = Permutation::parse_cycles("(1,2,3,4,5)(6,7)", 7).unwrap();
        assert_eq!(g.order(), 10);
        assert!(g.pow(10).is_identity());
        assert!(!g.pow(5).is_identity());
        assert!(g.pow(-1).compose(&g).is_identity());
    }

    #[test]
    #[should_panic(expected = "degree mismatch")]
    fn compose_checks_degree() {
        let _ = p(&[0, 1]).compose(&p(&[0, 1, 2]));
    }
}

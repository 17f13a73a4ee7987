//! The abelian groups `Z_p x Z_2^d` that the witness constructions live on,
//! with a fixed point encoding `(i, v) -> i * 2^d + v` where `v` is read as
//! a d-bit vector over GF(2).

use thiserror::Error;

use crate::group::PermGroup;
use crate::perm::Permutation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("p must be 1 or a prime, got {0}")]
    BadP(u64),
    #[error("degree {0} is too large for this toolkit")]
    TooLarge(u64),
}

/// `Z_p x Z_2^d` with `p` prime (or 1, degenerating to `Z_2^d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    p: u64,
    d: u32,
}

impl GroupSpec {
    pub fn new(p: u64, d: u32) -> Result<GroupSpec, SpecError> {
        if p != 1 && !is_prime(p) {
            return Err(SpecError::BadP(p));
        }
        let degree = (p as u128) << d;
        if degree > 1 << 20 {
            return Err(SpecError::TooLarge(degree as u64));
        }
        Ok(GroupSpec { p, d })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of group elements, which is also the permutation degree of
    /// the regular representation.
    pub fn degree(&self) -> usize {
        (self.p as usize) << self.d
    }

    pub fn vector_count(&self) -> usize {
        1 << self.d
    }

    pub fn encode(&self, i: u64, v: usize) -> usize {
        debug_assert!(i < self.p && v < self.vector_count());
        (i as usize) * self.vector_count() + v
    }

    pub fn decode(&self, point: usize) -> (u64, usize) {
        let m = self.vector_count();
        ((point / m) as u64, point % m)
    }

    /// Group addition on encoded points: addition mod p on the first part,
    /// xor on the vector part.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (i, v) = self.decode(a);
        let (j, w) = self.decode(b);
        self.encode((i + j) % self.p, v ^ w)
    }

    pub fn neg(&self, a: usize) -> usize {
        let (i, v) = self.decode(a);
        self.encode((self.p - i) % self.p, v)
    }

    /// Left translation by `a` as a permutation of the encoded points.
    pub fn translation(&self, a: usize) -> Permutation {
        let images = (0..self.degree()).map(|x| self.add(a, x)).collect();
        Permutation::from_images(images).expect("translation is a bijection")
    }

    /// The left regular representation, generated by the translation by
    /// `(1, 0)` and the `d` bit-flip translations.
    pub fn left_regular(&self) -> PermGroup {
        let mut gens: Vec<Permutation> = Vec::new();
        if self.p > 1 {
            gens.push(self.translation(self.encode(1, 0)));
        }
        for bit in 0..self.d {
            gens.push(self.translation(self.encode(0, 1 << bit)));
        }
        if gens.is_empty() {
            return PermGroup::trivial(self.degree());
        }
        PermGroup::from_generators(gens).expect("translations are valid")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Applies a GF(2) matrix, given as row bitmasks, to a vector bitmask.
pub fn gf2_apply(rows: &[u32], v: u32) -> u32 {
    let mut out = 0u32;
    for (j, &row) in rows.iter().enumerate() {
        out |= ((row & v).count_ones() & 1) << j;
    }
    out
}

/// Rank-based invertibility test for a GF(2) matrix in row-bitmask form.
pub fn gf2_invertible(rows: &[u32]) -> bool {
    let mut rows = rows.to_vec();
    let d = rows.len();
    for col in 0..d {
        let pivot = (col..d).find(|&r| rows[r] & (1 << col) != 0);
        let Some(pivot) = pivot else { return false };
        rows.swap(col, pivot);
        for r in 0..d {
            if r != col && rows[r] & (1 << col) != 0 {
                rows[r] ^= rows[col];
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn spec_validation() {
        assert!(GroupSpec::new(3, 2).is_ok());
        assert!(GroupSpec::new(1, 3).is_ok());
        assert_eq!(GroupSpec::new(6, 2), Err(SpecError::BadP(6)));
        assert_eq!(GroupSpec::new(0, 2), Err(SpecError::BadP(0)));
    }

    #[test]
    fn arithmetic_round_trips() {
        let spec = GroupSpec::new(3, 2).unwrap();
        assert_eq!(spec.degree(), 12);
        for x in 0..spec.degree() {
            let (i, v) = spec.decode(x);
            assert_eq!(spec.encode(i, v), x);
            assert_eq!(spec.add(x, spec.neg(x)), 0);
            assert_eq!(spec.add(x, 0), x);
        }
        // (1, 01) + (2, 11) = (0, 10)
        assert_eq!(spec.add(spec.encode(1, 1), spec.encode(2, 3)), spec.encode(0, 2));
    }

    #[test]
    fn left_regular_is_regular_of_right_order() {
        for (p, d) in [(3u64, 2u32), (7, 3), (5, 4), (1, 3), (5, 0), (1, 0)] {
            let spec = GroupSpec::new(p, d).unwrap();
            let g = spec.left_regular();
            assert_eq!(g.degree(), spec.degree());
            assert_eq!(g.order(), &BigUint::from(spec.degree() as u64));
            assert!(g.is_regular() || spec.degree() == 1);
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn translations_compose_like_the_group() {
        let spec = GroupSpec::new(5, 2).unwrap();
        for a in 0..spec.degree() {
            for b in 0..spec.degree() {
                let lhs = spec.translation(spec.add(a, b));
                let rhs = spec.translation(a).compose(&spec.translation(b));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn gf2_helpers() {
        // [[0,1],[1,1]] as row masks: row 0 reads bit 1, row 1 reads bits 0 and 1
        let m = vec![0b10u32, 0b11];
        assert!(gf2_invertible(&m));
        assert_eq!(gf2_apply(&m, 0b01), 0b10);
        assert!(!gf2_invertible(&[0b01, 0b01]));
        assert!(gf2_invertible(&[]));
    }
}

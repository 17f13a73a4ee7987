//! Block systems (invariant partitions) of transitive groups.
//!
//! `minimal_block_system` computes the finest invariant partition gluing two
//! given points, by closing a union-find under the generator action. Every
//! invariant partition is a join of such minimal ones, which is how
//! `all_block_systems` enumerates them.

use super::{GroupError, PermGroup};
use crate::perm::Permutation;

/// An invariant partition of the points of a transitive group. Blocks are
/// stored sorted, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    degree: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl BlockSystem {
    fn from_class_ids(class_of: &[usize]) -> BlockSystem {
        let degree = class_of.len();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index: Vec<Option<usize>> = vec![None; degree];
        let mut block_of = vec![0usize; degree];
        for p in 0..degree {
            let class = class_of[p];
            let b = match index[class] {
                Some(b) => b,
                None => {
                    blocks.push(Vec::new());
                    index[class] = Some(blocks.len() - 1);
                    blocks.len() - 1
                }
            };
            blocks[b].push(p);
            block_of[p] = b;
        }
        BlockSystem {
            degree,
            blocks,
            block_of,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Common size of the blocks.
    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn block_of(&self, point: usize) -> usize {
        self.block_of[point]
    }

    /// Singletons, or one block covering everything.
    pub fn is_trivial(&self) -> bool {
        self.num_blocks() == 1 || self.block_size() == 1
    }

    /// Finest common coarsening with another partition of the same points.
    pub fn join(&self, other: &BlockSystem) -> BlockSystem {
        let mut uf = UnionFind::new(self.degree);
        for block in self.blocks.iter().chain(other.blocks.iter()) {
            for &p in &block[1..] {
                uf.union(block[0], p);
            }
        }
        BlockSystem::from_class_ids(&uf.class_ids())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller point as representative for determinism
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn class_ids(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|p| self.find(p)).collect()
    }
}

impl PermGroup {
    /// The finest block system in which `a` and `b` share a block.
    pub fn minimal_block_system(&self, a: usize, b: usize) -> Result<BlockSystem, GroupError> {
        if !self.is_transitive() {
            return Err(GroupError::NotTransitive);
        }
        if a == b || a >= self.degree() || b >= self.degree() {
            return Err(GroupError::BadArgument(format!(
                "need two distinct points, got {} and {}",
                a, b
            )));
        }
        let mut uf = UnionFind::new(self.degree());
        uf.union(a, b);
        // closure: x ~ rep(x) forces g(x) ~ g(rep(x)) for every generator
        loop {
            let mut changed = false;
            for p in 0..self.degree() {
                let r = uf.find(p);
                if r == p {
                    continue;
                }
                for g in self.generators() {
                    changed |= uf.union(g.apply(p), g.apply(r));
                }
            }
            if !changed {
                break;
            }
        }
        let system = BlockSystem::from_class_ids(&uf.class_ids());
        debug_assert!(system.blocks().iter().all(|b| b.len() == system.block_size()));
        Ok(system)
    }

    /// Every nontrivial block system, obtained by closing the minimal
    /// systems through 0 under joins. Deduplicated by the block containing
    /// 0 (which determines a system of a transitive group), ordered by
    /// block size and then lexicographically.
    pub fn all_block_systems(&self) -> Result<Vec<BlockSystem>, GroupError> {
        if !self.is_transitive() {
            return Err(GroupError::NotTransitive);
        }
        let mut found: Vec<BlockSystem> = Vec::new();
        let mut fingerprints: Vec<Vec<usize>> = Vec::new();
        let push = |sys: BlockSystem, found: &mut Vec<BlockSystem>, fps: &mut Vec<Vec<usize>>| {
            let fp = sys.blocks()[sys.block_of(0)].clone();
            if !fps.contains(&fp) {
                fps.push(fp);
                found.push(sys);
            }
        };
        for b in 1..self.degree() {
            let sys = self.minimal_block_system(0, b)?;
            push(sys, &mut found, &mut fingerprints);
        }
        let mut i = 0;
        while i < found.len() {
            for j in 0..i {
                let joined = found[i].join(&found[j]);
                push(joined, &mut found, &mut fingerprints);
            }
            i += 1;
        }
        let mut out: Vec<BlockSystem> = found.into_iter().filter(|s| !s.is_trivial()).collect();
        out.sort_by(|a, b| {
            (a.block_size(), a.blocks()).cmp(&(b.block_size(), b.blocks()))
        });
        Ok(out)
    }

    /// The action on the blocks of a system, as a group of degree
    /// `num_blocks`. Errors if some generator fails to permute the blocks.
    pub fn quotient_action(&self, system: &BlockSystem) -> Result<PermGroup, GroupError> {
        let quotient_gens = self.block_images(system)?;
        let gens = quotient_gens
            .into_iter()
            .map(|images| Permutation::from_images(images).expect("block image table"))
            .collect();
        PermGroup::from_generators(gens)
    }

    /// The kernel of the action on the blocks: everything fixing each block
    /// setwise. Computed from a chain over the extended action on points
    /// plus blocks, so no element enumeration is involved.
    pub fn block_kernel(&self, system: &BlockSystem) -> Result<PermGroup, GroupError> {
        let quotient_gens = self.block_images(system)?;
        let n = self.degree();
        let m = system.num_blocks();
        let mut ext_gens = Vec::with_capacity(self.generators().len());
        for (g, q) in self.generators().iter().zip(&quotient_gens) {
            let mut images: Vec<usize> = g.images().to_vec();
            images.extend(q.iter().map(|&b| n + b));
            ext_gens.push(Permutation::from_images(images).expect("extended image table"));
        }
        let ext = PermGroup::from_generators(ext_gens)?;
        let block_points: Vec<usize> = (n..n + m).collect();
        let stab = ext.pointwise_stabilizer(&block_points);
        let restricted: Vec<Permutation> = stab
            .generators()
            .iter()
            .map(|g| {
                Permutation::from_images(g.images()[..n].to_vec())
                    .expect("kernel generators act on the original points")
            })
            .filter(|g| !g.is_identity())
            .collect();
        if restricted.is_empty() {
            Ok(PermGroup::trivial(n))
        } else {
            PermGroup::from_generators(restricted)
        }
    }

    fn block_images(&self, system: &BlockSystem) -> Result<Vec<Vec<usize>>, GroupError> {
        if system.degree() != self.degree() {
            return Err(GroupError::BadArgument(
                "block system is over a different point set".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.generators().len());
        for g in self.generators() {
            let mut images = Vec::with_capacity(system.num_blocks());
            for block in system.blocks() {
                let target = system.block_of(g.apply(block[0]));
                for &p in block {
                    if system.block_of(g.apply(p)) != target {
                        return Err(GroupError::NotABlockSystem(format!(
                            "generator {} splits block {:?}",
                            g, block
                        )));
                    }
                }
                images.push(target);
            }
            out.push(images);
        }
        Ok(out)
    }
}

//! Individualization-refinement backtracking for automorphism groups.
//!
//! The tree: each node is an equitable partition; children individualize
//! the vertices of the first smallest non-singleton cell, in ascending
//! order, then refine. Leaves are discrete partitions, read as labelings;
//! composing a leaf labeling with the inverse of the first leaf's gives an
//! automorphism candidate.
//!
//! Two prunings keep the tree small and lose nothing:
//!
//! * a branch whose refined summary differs from the first path's at the
//!   same depth cannot lead to a leaf mapping onto the first leaf, because
//!   summaries are relabeling-invariant;
//! * within a node's target cell, a vertex in the orbit of an
//!   already-explored one under the discovered automorphisms that fix the
//!   node's individualized prefix pointwise would only rediscover known
//!   elements (compose with the orbit witness to land in the explored
//!   subtree).

use crate::group::bsgs::Chain;
use crate::perm::Permutation;
use crate::relstruct::ColorRelStruct;

use super::refine::{CellSummary, Partition};
use super::AutError;

struct Search<'a> {
    x: &'a ColorRelStruct,
    n: usize,
    budget: u64,
    nodes: u64,
    first_path: Vec<CellSummary>,
    first_leaf: Option<Vec<usize>>,
    gens: Vec<Permutation>,
    chain: Chain,
}

/// Generators of the automorphism group, in discovery order. Empty for a
/// rigid structure.
pub(crate) fn automorphism_generators(
    x: &ColorRelStruct,
    budget: u64,
) -> Result<Vec<Permutation>, AutError> {
    let n = x.vertex_count();
    let mut search = Search {
        x,
        n,
        budget,
        nodes: 1,
        first_path: Vec::new(),
        first_leaf: None,
        gens: Vec::new(),
        chain: Chain::build(n, &[], &[]),
    };
    let mut root = Partition::unit(n);
    let summary = root.refine(x);
    search.first_path.push(summary);
    let mut prefix = Vec::new();
    search.descend(&root, 0, &mut prefix)?;
    Ok(search.gens)
}

impl<'a> Search<'a> {
    fn descend(
        &mut self,
        partition: &Partition,
        depth: usize,
        prefix: &mut Vec<usize>,
    ) -> Result<(), AutError> {
        if partition.is_discrete() {
            self.leaf(partition);
            return Ok(());
        }
        let target = partition.target_cell().expect("non-discrete partition");
        let candidates = partition.cells()[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for v in candidates {
            if self.orbit_pruned(v, &explored, prefix) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(AutError::BudgetExceeded {
                    nodes: self.nodes,
                    budget: self.budget,
                });
            }
            let mut child = partition.individualize(v);
            let summary = child.refine(self.x);
            let child_depth = depth + 1;
            if self.first_path.len() == child_depth {
                // still on the leftmost descent
                self.first_path.push(summary);
            } else if self.first_path[child_depth] != summary {
                continue;
            }
            explored.push(v);
            prefix.push(v);
            self.descend(&child, child_depth, prefix)?;
            prefix.pop();
        }
        Ok(())
    }

    fn leaf(&mut self, partition: &Partition) {
        let labeling = partition.labeling();
        let first = match &self.first_leaf {
            None => {
                self.first_leaf = Some(labeling);
                return;
            }
            Some(first) => first,
        };
        let mut images = vec![0usize; self.n];
        for (i, &v) in labeling.iter().enumerate() {
            images[first[i]] = v;
        }
        let g = Permutation::from_images(images).expect("two labelings give a bijection");
        if self.x.is_automorphism(&g) && !self.chain.contains(&g) {
            self.chain.extend(g.clone());
            self.gens.push(g);
        }
    }

    /// Whether `v` lies in the orbit of an explored sibling under the
    /// discovered automorphisms fixing `prefix` pointwise.
    fn orbit_pruned(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        if explored.is_empty() {
            return false;
        }
        let mut applicable: Vec<Permutation> = Vec::new();
        for g in &self.gens {
            if prefix.iter().all(|&u| g.apply(u) == u) {
                applicable.push(g.inverse());
                applicable.push(g.clone());
            }
        }
        if applicable.is_empty() {
            return false;
        }
        let mut in_orbit = vec![false; self.n];
        in_orbit[v] = true;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for g in &applicable {
                let w = g.apply(u);
                if !in_orbit[w] {
                    in_orbit[w] = true;
                    stack.push(w);
                }
            }
        }
        explored.iter().any(|&w| in_orbit[w])
    }
}

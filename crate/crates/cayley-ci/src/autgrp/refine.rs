//! Equitable partition refinement for colored k-ary structures.
//!
//! A vertex's signature collects, over all edges through it, the tuple
//! position it occupies, the edge color, and the current cell of every
//! entry of the edge. Refinement splits cells by signature and repeats
//! until no cell splits. Signatures only mention colors and cell indices,
//! never vertex labels, so relabeling a structure relabels the refined
//! partition the same way; the search relies on that to compare nodes
//! across branches.

use crate::relstruct::ColorRelStruct;

/// One incidence record: position, color, then the cell of each entry.
type Mark = Vec<u32>;

/// Per-cell fixpoint summary: (cell size, the signature every member
/// shares). At the equitable fixpoint members of a cell agree on their
/// signature, so this is well defined.
pub(crate) type CellSummary = Vec<(usize, Vec<Mark>)>;

/// An ordered partition of `{0, .., n-1}`. Cells hold sorted vertex lists;
/// refinement replaces each cell by its children in place, children
/// ordered by signature.
#[derive(Clone)]
pub(crate) struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn unit(n: usize) -> Partition {
        Partition {
            cells: vec![(0..n).collect()],
            cell_of: vec![0; n],
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.len() == self.cell_of.len()
    }

    /// The vertex order of a discrete partition.
    pub fn labeling(&self) -> Vec<usize> {
        debug_assert!(self.is_discrete());
        self.cells.iter().map(|c| c[0]).collect()
    }

    /// The first cell of minimal size among non-singletons.
    pub fn target_cell(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, c) in self.cells.iter().enumerate() {
            if c.len() > 1 && best.map_or(true, |b| c.len() < self.cells[b].len()) {
                best = Some(i);
            }
        }
        best
    }

    /// Splits `v` into its own cell, placed before the remainder of its
    /// old cell.
    pub fn individualize(&self, v: usize) -> Partition {
        let mut out = Partition {
            cells: Vec::with_capacity(self.cells.len() + 1),
            cell_of: vec![0; self.cell_of.len()],
        };
        for cell in &self.cells {
            if cell.contains(&v) {
                out.cells.push(vec![v]);
                let rest: Vec<usize> = cell.iter().copied().filter(|&u| u != v).collect();
                if !rest.is_empty() {
                    out.cells.push(rest);
                }
            } else {
                out.cells.push(cell.clone());
            }
        }
        for (i, cell) in out.cells.iter().enumerate() {
            for &u in cell {
                out.cell_of[u] = i;
            }
        }
        out
    }

    fn signatures(&self, x: &ColorRelStruct) -> Vec<Vec<Mark>> {
        let n = self.cell_of.len();
        let mut sigs: Vec<Vec<Mark>> = vec![Vec::new(); n];
        for (tuple, color) in x.edges_iter() {
            let cells: Vec<u32> = tuple.iter().map(|&e| self.cell_of[e] as u32).collect();
            for (pos, &v) in tuple.iter().enumerate() {
                let mut mark = Vec::with_capacity(2 + cells.len());
                mark.push(pos as u32);
                mark.push(color);
                mark.extend_from_slice(&cells);
                sigs[v].push(mark);
            }
        }
        for s in &mut sigs {
            s.sort();
        }
        sigs
    }

    /// Refines to the equitable fixpoint and returns the per-cell summary
    /// there. The summary is a label-invariant description of the node.
    pub fn refine(&mut self, x: &ColorRelStruct) -> CellSummary {
        loop {
            let sigs = self.signatures(x);
            let mut new_cells: Vec<Vec<usize>> = Vec::with_capacity(self.cells.len());
            let mut changed = false;
            for cell in &self.cells {
                if cell.len() == 1 {
                    new_cells.push(cell.clone());
                    continue;
                }
                let mut members = cell.clone();
                members.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]).then(a.cmp(&b)));
                let mut group = vec![members[0]];
                for &v in &members[1..] {
                    if sigs[v] == sigs[group[0]] {
                        group.push(v);
                    } else {
                        changed = true;
                        group.sort();
                        new_cells.push(std::mem::replace(&mut group, vec![v]));
                    }
                }
                group.sort();
                new_cells.push(group);
            }
            if !changed {
                return self
                    .cells
                    .iter()
                    .map(|c| (c.len(), sigs[c[0]].clone()))
                    .collect();
            }
            self.cells = new_cells;
            for (i, cell) in self.cells.iter().enumerate() {
                for &u in cell {
                    self.cell_of[u] = i;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn path_graph() -> ColorRelStruct {
        // undirected path 0 - 1 - 2 - 3 as symmetric arcs
        let mut x = ColorRelStruct::new(4, 2).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            x.set(&[a, b], 0).unwrap();
            x.set(&[b, a], 0).unwrap();
        }
        x
    }

    #[test]
    fn refine_splits_path_by_degree() {
        let x = path_graph();
        let mut p = Partition::unit(4);
        p.refine(&x);
        // ends {0,3} and middles {1,2} are distinguished, nothing more
        assert_eq!(p.cells().len(), 2);
        assert!(p.cells().contains(&vec![0, 3]));
        assert!(p.cells().contains(&vec![1, 2]));
    }

    #[test]
    fn individualize_then_refine_goes_discrete() {
        let x = path_graph();
        let mut p = Partition::unit(4);
        p.refine(&x);
        let target = p.target_cell().unwrap();
        let v = p.cells()[target][0];
        let mut child = p.individualize(v);
        child.refine(&x);
        assert!(child.is_discrete());
    }

    #[test]
    fn summary_is_relabeling_invariant() {
        let x = path_graph();
        let sigma = Permutation::parse_cycles("(1,3)(2,4)", 4).unwrap();
        let y = x.apply_perm(&sigma).unwrap();
        let mut px = Partition::unit(4);
        let mut py = Partition::unit(4);
        assert_eq!(px.refine(&x), py.refine(&y));
    }

    #[test]
    fn edgeless_structure_never_splits() {
        let x = ColorRelStruct::new(5, 3).unwrap();
        let mut p = Partition::unit(5);
        let summary = p.refine(&x);
        assert_eq!(p.cells().len(), 1);
        assert_eq!(summary, vec![(5, Vec::new())]);
    }
}

//! Deterministic Schreier-Sims stabilizer chains.
//!
//! A chain is a sequence of levels, each holding a base point, the orbit of
//! that point under the strong generators effective at the level, and a
//! transversal of coset representatives. A strong generator stored with home
//! level `j` fixes the base points of all levels `< j`, so the generators
//! effective at level `l` are exactly those with home `>= l`. The chain is
//! kept closed: every Schreier generator of every level sifts to the
//! identity, which is what makes `order` and `contains` exact.
//!
//! Base points are picked deterministically: the first unused hint point
//! moved by the triggering generator, else the smallest moved point. With a
//! hint `[x]` the first base point is `x` whenever anything moves `x`, so
//! level 1 of the chain generates the stabilizer of `x` exactly.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use crate::perm::Permutation;

#[derive(Clone)]
struct Level {
    beta: usize,
    orbit: Vec<usize>,                     // discovery order
    transversal: Vec<Option<Permutation>>, // rep u with u(beta) = point
    queue: VecDeque<(usize, usize)>,       // pending (orbit point, strong gen id)
}

impl Level {
    fn new(beta: usize, degree: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[beta] = Some(Permutation::identity(degree));
        Level {
            beta,
            orbit: vec![beta],
            transversal,
            queue: VecDeque::new(),
        }
    }
}

#[derive(Clone)]
pub(crate) struct Chain {
    degree: usize,
    hint: Vec<usize>,
    levels: Vec<Level>,
    strong: Vec<Permutation>,
    home: Vec<usize>,               // strong[i] fixes the base of all levels < home[i]
    seen: HashSet<Vec<usize>>,      // image tables already stored, to skip duplicates
}

impl Chain {
    pub fn build(degree: usize, gens: &[Permutation], hint: &[usize]) -> Chain {
        let mut chain = Chain {
            degree,
            hint: hint.to_vec(),
            levels: Vec::new(),
            strong: Vec::new(),
            home: Vec::new(),
            seen: HashSet::new(),
        };
        // Seed the first base point from the whole generating set so that a
        // hinted point (or the overall smallest moved point) comes first.
        let moved = |p: usize| gens.iter().any(|g| g.apply(p) != p);
        let first = chain
            .hint
            .clone()
            .into_iter()
            .find(|&p| moved(p))
            .or_else(|| (0..degree).find(|&p| moved(p)));
        if let Some(beta) = first {
            chain.levels.push(Level::new(beta, degree));
        }
        for g in gens {
            chain.extend(g.clone());
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.beta).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u8), |acc, l| acc * l.orbit.len())
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Strong generators effective at `level`; they generate the pointwise
    /// stabilizer of the base points of all earlier levels.
    pub fn level_generators(&self, level: usize) -> Vec<Permutation> {
        self.strong
            .iter()
            .zip(&self.home)
            .filter(|&(_, &h)| h >= level)
            .map(|(g, _)| g.clone())
            .collect()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        let (residue, _) = self.sift_from(g.clone(), 0);
        residue.is_identity()
    }

    fn sift_from(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = g.apply(level.beta);
            match &level.transversal[x] {
                None => return (g, i),
                Some(u) => g = u.inverse().compose(&g),
            }
        }
        (g, self.levels.len())
    }

    pub fn extend(&mut self, g: Permutation) {
        let (h, j) = self.sift_from(g, 0);
        if !h.is_identity() {
            self.add_strong_generator(h, j);
        }
    }

    fn add_strong_generator(&mut self, h: Permutation, j: usize) {
        if self.seen.contains(h.images()) {
            return;
        }
        if j == self.levels.len() {
            let beta = self
                .hint
                .iter()
                .copied()
                .find(|&p| h.apply(p) != p)
                .unwrap_or_else(|| h.support()[0]);
            self.levels.push(Level::new(beta, self.degree));
        }
        self.seen.insert(h.images().to_vec());
        let id = self.strong.len();
        self.strong.push(h);
        self.home.push(j);
        for level in self.levels[..=j].iter_mut() {
            for &x in &level.orbit {
                level.queue.push_back((x, id));
            }
        }
        for l in (0..=j).rev() {
            self.close_level(l);
        }
    }

    /// Drains the pending Schreier pairs of one level, growing its orbit and
    /// pushing failed residues deeper. Recursion only ever touches levels
    /// deeper than `l` or re-enters `l` on a queue that pops each pair once,
    /// so every pair is handled exactly once.
    fn close_level(&mut self, l: usize) {
        while let Some((x, gi)) = self.levels[l].queue.pop_front() {
            let s = self.strong[gi].clone();
            let y = s.apply(x);
            let ux = self.levels[l].transversal[x]
                .clone()
                .expect("queued point must be in the orbit");
            if self.levels[l].transversal[y].is_none() {
                let rep = s.compose(&ux);
                self.levels[l].transversal[y] = Some(rep);
                self.levels[l].orbit.push(y);
                let effective: Vec<usize> = (0..self.strong.len())
                    .filter(|&i| self.home[i] >= l)
                    .collect();
                for i in effective {
                    self.levels[l].queue.push_back((y, i));
                }
                continue;
            }
            let uy = self.levels[l].transversal[y].as_ref().unwrap();
            let schreier = uy.inverse().compose(&s).compose(&ux);
            if schreier.is_identity() {
                continue;
            }
            let (residue, m) = self.sift_from(schreier, l + 1);
            if !residue.is_identity() {
                self.add_strong_generator(residue, m);
            }
        }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn orbit_len(&self, level: usize) -> usize {
        self.levels[level].orbit.len()
    }

    /// Transversal representative taking the level's base point to the
    /// `idx`-th point of its orbit (discovery order).
    pub fn transversal_rep(&self, level: usize, idx: usize) -> &Permutation {
        let point = self.levels[level].orbit[idx];
        self.levels[level].transversal[point]
            .as_ref()
            .expect("orbit point has a representative")
    }
}

/// Enumerates all group elements as products of transversal representatives,
/// one per level, in a fixed odometer order (deepest level fastest). The
/// first element yielded is the identity.
pub(crate) struct Elements<'a> {
    chain: &'a Chain,
    counters: Vec<usize>,
    done: bool,
}

impl<'a> Elements<'a> {
    pub fn new(chain: &'a Chain) -> Elements<'a> {
        Elements {
            counters: vec![0; chain.num_levels()],
            chain,
            done: false,
        }
    }
}

impl<'a> Iterator for Elements<'a> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let mut g = Permutation::identity(self.chain.degree());
        for (level, &idx) in self.counters.iter().enumerate() {
            g = g.compose(self.chain.transversal_rep(level, idx));
        }
        for level in (0..self.counters.len()).rev() {
            self.counters[level] += 1;
            if self.counters[level] < self.chain.orbit_len(level) {
                return Some(g);
            }
            self.counters[level] = 0;
        }
        self.done = true;
        Some(g)
    }
}

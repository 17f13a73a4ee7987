//! Colored k-ary relational structures on `{0, .., n-1}`.
//!
//! A structure is a finite set of k-tuples, each carrying a color; equality
//! is exact equality of the colored edge maps. Uncolored ("plain")
//! structures are the single-color case. Tuples are packed into `u64` keys,
//! which bounds `k * ceil(log2 n)` by 64; fine for the degrees this crate
//! works at.

use std::collections::btree_map;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::abelian::GroupSpec;
use crate::group::PermGroup;
use crate::perm::Permutation;

/// Stop orbit-coloring (and anything else that walks all k-tuples) past
/// this many tuples.
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructError {
    #[error("arity must be at least 1, got {0}")]
    BadArity(usize),
    #[error("{0} tuples of arity {1} on {2} points do not fit packed keys")]
    TooLarge(u64, usize, usize),
    #[error("tuple entry {0} out of range for {1} points")]
    PointOutOfRange(usize, usize),
    #[error("tuple has arity {0}, structure has arity {1}")]
    ArityMismatch(usize, usize),
    #[error("tuple already present with color {existing}, refusing color {new}")]
    ColorConflict { existing: u32, new: u32 },
    #[error("degree mismatch: permutation on {0} points, structure on {1}")]
    DegreeMismatch(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("walking {0} tuples exceeds the budget of {1}")]
    BudgetExceeded(u64, u64),
    #[error("wreath factors must be binary structures")]
    WreathArity,
}

/// A colored relational structure of fixed arity.
#[derive(Clone, PartialEq, Eq)]
pub struct ColorRelStruct {
    n: usize,
    k: usize,
    bits: u32,
    edges: HashMap<u64, u32>,
}

impl ColorRelStruct {
    pub fn new(n: usize, k: usize) -> Result<ColorRelStruct, StructError> {
        if k == 0 {
            return Err(StructError::BadArity(k));
        }
        if n == 0 {
            return Err(StructError::PointOutOfRange(0, 0));
        }
        let bits = if n <= 2 {
            1
        } else {
            usize::BITS - (n - 1).leading_zeros()
        };
        if bits as usize * k > 64 {
            return Err(StructError::TooLarge(0, k, n));
        }
        Ok(ColorRelStruct {
            n,
            k,
            bits,
            edges: HashMap::new(),
        })
    }

    pub fn from_edges<I>(n: usize, k: usize, edges: I) -> Result<ColorRelStruct, StructError>
    where
        I: IntoIterator<Item = (Vec<usize>, u32)>,
    {
        let mut s = ColorRelStruct::new(n, k)?;
        for (t, c) in edges {
            s.set(&t, c)?;
        }
        Ok(s)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn pack(&self, tuple: &[usize]) -> Result<u64, StructError> {
        if tuple.len() != self.k {
            return Err(StructError::ArityMismatch(tuple.len(), self.k));
        }
        let mut key = 0u64;
        for &e in tuple {
            if e >= self.n {
                return Err(StructError::PointOutOfRange(e, self.n));
            }
            key = (key << self.bits) | e as u64;
        }
        Ok(key)
    }

    fn unpack(&self, mut key: u64) -> Vec<usize> {
        let mask = (1u64 << self.bits) - 1;
        let mut tuple = vec![0usize; self.k];
        for slot in tuple.iter_mut().rev() {
            *slot = (key & mask) as usize;
            key >>= self.bits;
        }
        tuple
    }

    /// Inserts or recolors an edge.
    pub fn set(&mut self, tuple: &[usize], color: u32) -> Result<(), StructError> {
        let key = self.pack(tuple)?;
        self.edges.insert(key, color);
        Ok(())
    }

    /// Inserts an edge, refusing to silently recolor an existing one.
    pub fn try_insert(&mut self, tuple: &[usize], color: u32) -> Result<(), StructError> {
        let key = self.pack(tuple)?;
        match self.edges.get(&key) {
            Some(&c) if c != color => Err(StructError::ColorConflict {
                existing: c,
                new: color,
            }),
            _ => {
                self.edges.insert(key, color);
                Ok(())
            }
        }
    }

    pub fn color(&self, tuple: &[usize]) -> Option<u32> {
        self.pack(tuple).ok().and_then(|k| self.edges.get(&k)).copied()
    }

    /// Edges in arbitrary order; callers that care about order must sort.
    pub(crate) fn edges_iter(&self) -> impl Iterator<Item = (Vec<usize>, u32)> + '_ {
        self.edges.iter().map(|(&k, &c)| (self.unpack(k), c))
    }

    /// Edges sorted lexicographically by tuple; the packed keys order
    /// exactly like the tuples they encode.
    pub fn edges_sorted(&self) -> Vec<(Vec<usize>, u32)> {
        let mut keys: Vec<(&u64, &u32)> = self.edges.iter().collect();
        keys.sort();
        keys.into_iter()
            .map(|(&k, &c)| (self.unpack(k), c))
            .collect()
    }

    pub fn max_color(&self) -> Option<u32> {
        self.edges.values().copied().max()
    }

    /// The image structure under a permutation of the points.
    pub fn apply_perm(&self, g: &Permutation) -> Result<ColorRelStruct, StructError> {
        if g.degree() != self.n {
            return Err(StructError::DegreeMismatch(g.degree(), self.n));
        }
        let mut out = ColorRelStruct::new(self.n, self.k)?;
        for (&key, &color) in &self.edges {
            let image = g.apply_tuple(&self.unpack(key));
            let new_key = out.pack(&image)?;
            out.edges.insert(new_key, color);
        }
        Ok(out)
    }

    /// Whether `g` maps every edge onto an edge of the same color. Since
    /// `g` is a bijection and the edge set finite, this makes `g` an
    /// automorphism.
    pub fn is_automorphism(&self, g: &Permutation) -> bool {
        if g.degree() != self.n {
            return false;
        }
        self.edges.iter().all(|(&key, &color)| {
            let image = g.apply_tuple(&self.unpack(key));
            self.color(&image) == Some(color)
        })
    }

    /// Text form: a `relstruct n=<n> k=<k>` header, then one line
    /// `<color>: p1 p2 .. pk` per edge, sorted lexicographically by tuple.
    pub fn to_text(&self) -> String {
        let mut out = format!("relstruct n={} k={}\n", self.n, self.k);
        for (tuple, color) in self.edges_sorted() {
            let parts: Vec<String> = tuple.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "{}: {}", color, parts.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<ColorRelStruct, StructError> {
        let mut lines = text.lines().enumerate();
        let (header_line, header) = loop {
            match lines.next() {
                Some((i, raw)) if raw.trim().is_empty() => {
                    let _ = i;
                    continue;
                }
                Some((i, raw)) => break (i + 1, raw.trim().to_string()),
                None => {
                    return Err(StructError::Parse {
                        line: 1,
                        message: "empty input".into(),
                    })
                }
            }
        };
        let parse_header = || -> Option<(usize, usize)> {
            let rest = header.strip_prefix("relstruct")?.trim();
            let mut n = None;
            let mut k = None;
            for part in rest.split_whitespace() {
                if let Some(v) = part.strip_prefix("n=") {
                    n = v.parse().ok();
                } else if let Some(v) = part.strip_prefix("k=") {
                    k = v.parse().ok();
                } else {
                    return None;
                }
            }
            Some((n?, k?))
        };
        let (n, k) = parse_header().ok_or_else(|| StructError::Parse {
            line: header_line,
            message: format!("expected 'relstruct n=<n> k=<k>', got \"{}\"", header),
        })?;
        let mut s = ColorRelStruct::new(n, k).map_err(|e| StructError::Parse {
            line: header_line,
            message: e.to_string(),
        })?;
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| StructError::Parse {
                line: i + 1,
                message,
            };
            let (color_part, tuple_part) = line
                .split_once(':')
                .ok_or_else(|| bad("expected '<color>: p1 p2 ..'".into()))?;
            let color: u32 = color_part
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad color \"{}\"", color_part.trim())))?;
            let tuple: Vec<usize> = tuple_part
                .split_whitespace()
                .map(|p| p.parse().map_err(|_| bad(format!("bad point \"{}\"", p))))
                .collect::<Result<_, _>>()?;
            s.try_insert(&tuple, color)
                .map_err(|e| bad(e.to_string()))?;
        }
        Ok(s)
    }
}

impl std::fmt::Debug for ColorRelStruct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ColorRelStruct(n={}, k={}, {} edges)",
            self.n,
            self.k,
            self.edges.len()
        )
    }
}

/// A colored set of (k-1)-tuples over a [`GroupSpec`]; expanding every
/// entry `(s1, .., s_{k-1})` to the translates `(a, a+s1, .., a+s_{k-1})`
/// gives a translation-closed k-ary structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSet {
    spec: GroupSpec,
    arity: usize, // arity k of the expanded structure
    tuples: BTreeMap<Vec<usize>, u32>,
}

impl ConnectionSet {
    pub fn new(spec: GroupSpec, arity: usize) -> ConnectionSet {
        assert!(arity >= 2, "expanded arity must be at least 2");
        ConnectionSet {
            spec,
            arity,
            tuples: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn insert(&mut self, tuple: Vec<usize>, color: u32) -> Result<(), StructError> {
        if tuple.len() + 1 != self.arity {
            return Err(StructError::ArityMismatch(tuple.len() + 1, self.arity));
        }
        for &e in &tuple {
            if e >= self.spec.degree() {
                return Err(StructError::PointOutOfRange(e, self.spec.degree()));
            }
        }
        match self.tuples.get(&tuple) {
            Some(&c) if c != color => Err(StructError::ColorConflict {
                existing: c,
                new: color,
            }),
            _ => {
                self.tuples.insert(tuple, color);
                Ok(())
            }
        }
    }

    pub fn color(&self, tuple: &[usize]) -> Option<u32> {
        self.tuples.get(tuple).copied()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Vec<usize>, u32> {
        self.tuples.iter()
    }

    pub fn max_color(&self) -> Option<u32> {
        self.tuples.values().copied().max()
    }

    /// Entrywise image under a permutation of the underlying points (meant
    /// for group automorphisms, which fix the identity and so keep a
    /// connection set a connection set).
    pub fn map_points(&self, g: &Permutation) -> ConnectionSet {
        let mut out = ConnectionSet::new(self.spec, self.arity);
        for (t, &c) in &self.tuples {
            out.tuples.insert(g.apply_tuple(t), c);
        }
        out
    }

    /// Merge, refusing color conflicts.
    pub fn union(&self, other: &ConnectionSet) -> Result<ConnectionSet, StructError> {
        let mut out = self.clone();
        for (t, &c) in other.iter() {
            out.insert(t.clone(), c)?;
        }
        Ok(out)
    }

    /// Expansion into the full translation-closed structure.
    pub fn expand(&self) -> Result<CayleyStructure, StructError> {
        let n = self.spec.degree();
        let mut s = ColorRelStruct::new(n, self.arity)?;
        let mut tuple = vec![0usize; self.arity];
        for (suffix, &color) in &self.tuples {
            for a in 0..n {
                tuple[0] = a;
                for (slot, &e) in tuple[1..].iter_mut().zip(suffix) {
                    *slot = self.spec.add(a, e);
                }
                s.set(&tuple, color)?;
            }
        }
        Ok(CayleyStructure {
            conn: self.clone(),
            structure: s,
        })
    }
}

/// A structure remembered together with the connection set it expands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyStructure {
    conn: ConnectionSet,
    structure: ColorRelStruct,
}

impl CayleyStructure {
    pub fn conn(&self) -> &ConnectionSet {
        &self.conn
    }

    pub fn structure(&self) -> &ColorRelStruct {
        &self.structure
    }

    pub fn into_structure(self) -> ColorRelStruct {
        self.structure
    }

    /// Color lookup that goes through the connection set: translate the
    /// first entry to the identity and look up the remainder.
    pub fn lookup(&self, tuple: &[usize]) -> Option<u32> {
        if tuple.len() != self.conn.arity {
            return None;
        }
        let back = self.conn.spec.neg(tuple[0]);
        let suffix: Vec<usize> = tuple[1..]
            .iter()
            .map(|&e| self.conn.spec.add(back, e))
            .collect();
        self.conn.color(&suffix)
    }
}

/// The colored tuples `(s2, .., sk)` such that `(0, s2, .., sk)` is an edge.
/// For a translation-closed structure this recovers its connection set.
pub fn slice_connection_set(
    s: &ColorRelStruct,
    spec: &GroupSpec,
) -> Result<ConnectionSet, StructError> {
    if s.vertex_count() != spec.degree() {
        return Err(StructError::DegreeMismatch(spec.degree(), s.vertex_count()));
    }
    let mut conn = ConnectionSet::new(*spec, s.arity());
    for (tuple, color) in s.edges_sorted() {
        if tuple[0] == 0 {
            conn.insert(tuple[1..].to_vec(), color)?;
        }
    }
    Ok(conn)
}

/// Wreath product of two binary color structures: fibers over the vertices
/// of `outer`, each carrying a copy of `inner`, plus complete bundles of
/// edges between fibers joined by `outer`. Vertex `(u, v)` is encoded as
/// `u * |V(inner)| + v`.
///
/// A loop in `outer` lays its bundle over that fiber's own copy of
/// `inner`: matching colors merge into one edge, mismatched colors are a
/// conflict.
pub fn digraph_wreath(
    outer: &ColorRelStruct,
    inner: &ColorRelStruct,
) -> Result<ColorRelStruct, StructError> {
    if outer.arity() != 2 || inner.arity() != 2 {
        return Err(StructError::WreathArity);
    }
    let n1 = outer.vertex_count();
    let n2 = inner.vertex_count();
    let mut out = ColorRelStruct::new(n1 * n2, 2)?;
    for (t, c) in inner.edges_sorted() {
        for u in 0..n1 {
            out.try_insert(&[u * n2 + t[0], u * n2 + t[1]], c)?;
        }
    }
    for (t, c) in outer.edges_sorted() {
        for v1 in 0..n2 {
            for v2 in 0..n2 {
                out.try_insert(&[t[0] * n2 + v1, t[1] * n2 + v2], c)?;
            }
        }
    }
    Ok(out)
}

/// Colors every k-tuple of points by its orbit under the group, colors
/// numbered in order of each orbit's lexicographically least tuple. The
/// result has exactly `n^k` edges.
pub fn orbit_coloring(group: &PermGroup, k: usize) -> Result<ColorRelStruct, StructError> {
    orbit_coloring_budgeted(group, k, DEFAULT_TUPLE_BUDGET)
}

pub fn orbit_coloring_budgeted(
    group: &PermGroup,
    k: usize,
    budget: u64,
) -> Result<ColorRelStruct, StructError> {
    let n = group.degree();
    if k == 0 {
        return Err(StructError::BadArity(k));
    }
    let total = (n as u64).checked_pow(k as u32);
    match total {
        Some(t) if t <= budget => {}
        _ => {
            return Err(StructError::BudgetExceeded(
                total.unwrap_or(u64::MAX),
                budget,
            ))
        }
    }
    let mut s = ColorRelStruct::new(n, k)?;
    let mut color = 0u32;
    let mut tuple = vec![0usize; k];
    loop {
        if s.color(&tuple).is_none() {
            // new orbit: breadth-first closure under the generators
            let mut stack = vec![tuple.clone()];
            s.set(&tuple, color)?;
            while let Some(t) = stack.pop() {
                for g in group.generators() {
                    let image = g.apply_tuple(&t);
                    if s.color(&image).is_none() {
                        s.set(&image, color)?;
                        stack.push(image);
                    }
                }
            }
            color += 1;
        }
        // next tuple in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(s);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 0;
        }
    }
}

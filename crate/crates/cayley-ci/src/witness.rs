//! Construction and verification of Cayley ternary structure pairs on
//! `Z_p x Z_2^d` that are isomorphic but not isomorphic by any group
//! automorphism, certifying that the group is not CI with respect to
//! (color) ternary relational structures.
//!
//! The ingredients, all on the canonical point encoding `(i, v) -> i*2^d + v`:
//!
//! * `alpha`: an automorphism of `Z_2^d` of odd prime order p fixing only 0
//!   (built from a primitive polynomial, or supplied);
//! * an anchor structure on the 2^d vectors whose automorphism group is
//!   exactly the translations extended by alpha, order `p * 2^d`;
//! * the pair set S: the anchor's edges rooted at 0, plus one marker pair
//!   per vector from the commutators of translations with the fiberwise
//!   twist `(i, v) -> (i, alpha^i(v))`;
//! * X, the translation closure of S, and Y, the twist image of X.
//!
//! [`verify_witness`] then checks five independent facts: translations
//! preserve X, the fiberwise alpha extension preserves X, the
//! twist-conjugated translations preserve X, X and Y differ, and no group
//! automorphism maps X onto Y.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::abelian::{is_prime, GroupSpec, SpecError};
use crate::autgrp::{
    aut_group, iso_by_connection_sets, iso_by_group_automorphism, AutError, IsoScan,
    DEFAULT_CANDIDATE_CAP,
};
use crate::group::{parse_group_file, restrict_to_points, GroupError, PermGroup};
use crate::perm::{PermError, Permutation};
use crate::relstruct::{
    orbit_coloring, slice_connection_set, CayleyStructure, ColorRelStruct, ConnectionSet,
    StructError,
};
use crate::report::{Report, Verdict};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("p must be an odd prime, got {0}")]
    BadPrime(u64),
    #[error("{p} does not divide 2^{d} - 1")]
    Unsupported { p: u64, d: u32 },
    #[error("no primitive polynomial on file for dimension {0}")]
    NoPolynomial(u32),
    #[error("alpha is not usable: {0}")]
    BadAlpha(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("stabilizer lift precondition failed: {0}")]
    LiftPrecondition(String),
    #[error("partitions are incompatible: {0}")]
    PartitionMismatch(String),
    #[error("conjugacy check precondition failed: {0}")]
    CayleyPrecondition(String),
    #[error("construction self-check failed: {0}")]
    SelfCheck(String),
    #[error("bundle file {path}: {message}")]
    Bundle { path: String, message: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Primitive polynomials over GF(2), one per dimension; bit i is the
/// coefficient of x^i.
const PRIMITIVE_POLYS: [(u32, u32); 7] = [
    (2, 0b111),       // x^2 + x + 1
    (3, 0b1011),      // x^3 + x + 1
    (4, 0b10011),     // x^4 + x + 1
    (5, 0b100101),    // x^5 + x^2 + 1
    (6, 0b1000011),   // x^6 + x + 1
    (7, 0b10000011),  // x^7 + x + 1
    (8, 0b100011101), // x^8 + x^4 + x^3 + x^2 + 1
];

/// An automorphism of `Z_2^d` of order exactly `p` whose only fixed point
/// is 0, as a permutation of the `2^d` vectors: multiplication by a
/// primitive element of GF(2^d) raised to the `(2^d - 1)/p` power. Exists
/// exactly when `p` divides `2^d - 1`.
pub fn fixed_point_free_automorphism(d: u32, p: u64) -> Result<Permutation, WitnessError> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(WitnessError::BadPrime(p));
    }
    let poly = PRIMITIVE_POLYS
        .iter()
        .find(|&&(dim, _)| dim == d)
        .map(|&(_, poly)| poly)
        .ok_or(WitnessError::NoPolynomial(d))?;
    let count = (1u64 << d) - 1;
    if count % p != 0 {
        return Err(WitnessError::Unsupported { p, d });
    }
    let exponent = count / p;
    let mulx = |v: u32| -> u32 {
        let shifted = v << 1;
        if shifted & (1 << d) != 0 {
            shifted ^ poly
        } else {
            shifted
        }
    };
    let n = 1usize << d;
    let images: Vec<usize> = (0..n)
        .map(|v| {
            let mut w = v as u32;
            for _ in 0..exponent {
                w = mulx(w);
            }
            w as usize
        })
        .collect();
    let alpha = Permutation::from_images(images)?;
    validate_alpha(&alpha, d, p)?;
    Ok(alpha)
}

/// Order exactly p, fixed points exactly {0}, additive on GF(2)^d.
fn validate_alpha(alpha: &Permutation, d: u32, p: u64) -> Result<(), WitnessError> {
    let n = 1usize << d;
    if alpha.degree() != n {
        return Err(WitnessError::BadAlpha(format!(
            "degree {} does not match 2^{}",
            alpha.degree(),
            d
        )));
    }
    if alpha.order() != p as u128 {
        return Err(WitnessError::BadAlpha(format!(
            "order {} is not {}",
            alpha.order(),
            p
        )));
    }
    for v in 1..n {
        if alpha.apply(v) == v {
            return Err(WitnessError::BadAlpha(format!("fixes nonzero vector {}", v)));
        }
    }
    for b in 0..d {
        let u = 1usize << b;
        for v in 0..n {
            if alpha.apply(u ^ v) != alpha.apply(u) ^ alpha.apply(v) {
                return Err(WitnessError::BadAlpha(format!(
                    "not additive on {} and {}",
                    u, v
                )));
            }
        }
    }
    Ok(())
}

/// Whether the final pair carries colors or everything shares one color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Color,
    Plain,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Color => "color",
            Mode::Plain => "plain",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "color" => Ok(Mode::Color),
            "plain" => Ok(Mode::Plain),
            other => Err(format!("expected 'color' or 'plain', got \"{}\"", other)),
        }
    }
}

/// The data the whole construction is parameterized by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSpec {
    p: u64,
    d: u32,
    alpha: Permutation,
    mode: Mode,
}

impl WitnessSpec {
    pub fn new(p: u64, d: u32, alpha: Permutation, mode: Mode) -> Result<WitnessSpec, WitnessError> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(WitnessError::BadPrime(p));
        }
        GroupSpec::new(p, d)?;
        validate_alpha(&alpha, d, p)?;
        Ok(WitnessSpec { p, d, alpha, mode })
    }

    /// A witness spec using the crate's fixed choice of alpha.
    pub fn standard(p: u64, d: u32, mode: Mode) -> Result<WitnessSpec, WitnessError> {
        let alpha = fixed_point_free_automorphism(d, p)?;
        WitnessSpec::new(p, d, alpha, mode)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn alpha(&self) -> &Permutation {
        &self.alpha
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn group_spec(&self) -> GroupSpec {
        GroupSpec::new(self.p, self.d).expect("validated at construction")
    }

    /// `Z_2^d` alone, the fiber the anchor structure lives on.
    pub fn vector_spec(&self) -> GroupSpec {
        GroupSpec::new(1, self.d).expect("validated at construction")
    }
}

/// A digraph on `m*s` vertices whose automorphism group is exactly the
/// simultaneous rotation of the s blocks `{im, .., im+m-1}` by one step.
/// Every block carries a directed m-cycle; block j additionally sends a
/// matching to each earlier block, grown inductively: `jm` points to
/// `(j-1)m` and to the out-neighbors of `(j-1)m` outside block `j-1`, and
/// the new edges are closed under the rotation.
pub fn semiregular_digraph(m: usize, s: usize) -> Result<ColorRelStruct, WitnessError> {
    if m < 2 || s < 1 {
        return Err(WitnessError::BadArgument(format!(
            "need cycle length >= 2 and at least one block, got ({}, {})",
            m, s
        )));
    }
    let n = m * s;
    let mut x = ColorRelStruct::new(n, 2)?;
    for i in 0..s {
        for t in 0..m {
            x.set(&[i * m + t, i * m + (t + 1) % m], 0)?;
        }
    }
    for j in 1..s {
        let head = (j - 1) * m;
        let mut targets = vec![head];
        for u in 0..n {
            if u / m != j - 1 && x.color(&[head, u]).is_some() {
                targets.push(u);
            }
        }
        for t in 0..m {
            for &u in &targets {
                x.set(&[j * m + t, (u / m) * m + (u % m + t) % m], 0)?;
            }
        }
    }
    // The blocks must stay recognizable from indegrees alone: constant on
    // each block and pairwise distinct across blocks.
    let mut indegree = vec![0usize; n];
    for (t, _) in x.edges_iter() {
        indegree[t[1]] += 1;
    }
    let mut block_degrees = Vec::with_capacity(s);
    for i in 0..s {
        let deg = indegree[i * m];
        if (1..m).any(|t| indegree[i * m + t] != deg) {
            return Err(WitnessError::SelfCheck(format!(
                "indegree is not constant on block {}",
                i
            )));
        }
        block_degrees.push(deg);
    }
    block_degrees.sort_unstable();
    block_degrees.dedup();
    if block_degrees.len() != s {
        return Err(WitnessError::SelfCheck(
            "block indegrees are not pairwise distinct".into(),
        ));
    }
    Ok(x)
}

/// Given a transitive group G on n points, a point x, and a structure on
/// the remaining points whose automorphism group equals the stabilizer of
/// x (checked), produces the structure of one higher arity, prefixing x to
/// every edge and closing under G, whose automorphism group is G.
///
/// The remaining points are identified with `0..n-1` in ascending order of
/// their original labels.
pub fn lift_stab_structure(
    group: &PermGroup,
    x: usize,
    y: &ColorRelStruct,
) -> Result<ColorRelStruct, WitnessError> {
    let n = group.degree();
    if x >= n {
        return Err(WitnessError::BadArgument(format!(
            "point {} out of range for degree {}",
            x, n
        )));
    }
    if y.vertex_count() + 1 != n {
        return Err(WitnessError::BadArgument(format!(
            "structure on {} points cannot extend to degree {}",
            y.vertex_count(),
            n
        )));
    }
    if !group.is_transitive() {
        return Err(WitnessError::BadArgument("group must be transitive".into()));
    }
    let points: Vec<usize> = (0..n).filter(|&v| v != x).collect();
    let stab = group.point_stabilizer(x);
    let restricted: Vec<Permutation> = stab
        .generators()
        .iter()
        .map(|g| restrict_to_points(g, &points))
        .collect::<Result<_, _>>()?;
    let stab_restricted = if restricted.is_empty() {
        PermGroup::trivial(n - 1)
    } else {
        PermGroup::from_generators(restricted)?
    };
    let aut_y = aut_group(y)?;
    if !aut_y.same_group(&stab_restricted) {
        return Err(WitnessError::LiftPrecondition(format!(
            "structure has automorphism group of order {}, the point stabilizer has order {}",
            aut_y.order(),
            stab_restricted.order()
        )));
    }
    let mut out = ColorRelStruct::new(n, y.arity() + 1)?;
    let mut queue: Vec<(Vec<usize>, u32)> = Vec::new();
    for (t, c) in y.edges_sorted() {
        let mut tuple = Vec::with_capacity(t.len() + 1);
        tuple.push(x);
        tuple.extend(t.iter().map(|&v| points[v]));
        out.try_insert(&tuple, c)?;
        queue.push((tuple, c));
    }
    while let Some((t, c)) = queue.pop() {
        for g in group.generators() {
            let image = g.apply_tuple(&t);
            match out.color(&image) {
                Some(existing) if existing == c => {}
                Some(existing) => {
                    return Err(WitnessError::SelfCheck(format!(
                        "orbit expansion assigns colors {} and {} to one edge",
                        existing, c
                    )))
                }
                None => {
                    out.set(&image, c)?;
                    queue.push((image, c));
                }
            }
        }
    }
    Ok(out)
}

/// An even permutation mapping each block of the first partition onto a
/// block of the second. Both partitions must cover the same point set
/// with blocks of one common size, at least 2; parity is repaired, if
/// needed, by a swap inside the last target block, which keeps the
/// blockwise image unchanged.
pub fn even_partition_mapper(
    from: &[Vec<usize>],
    to: &[Vec<usize>],
) -> Result<Permutation, WitnessError> {
    let degree = check_partition(from)?;
    if check_partition(to)? != degree {
        return Err(WitnessError::PartitionMismatch(
            "partitions cover point sets of different sizes".into(),
        ));
    }
    if from.len() != to.len() {
        return Err(WitnessError::PartitionMismatch(format!(
            "{} blocks vs {}",
            from.len(),
            to.len()
        )));
    }
    let size = from[0].len();
    if size < 2 {
        return Err(WitnessError::PartitionMismatch(
            "blocks must have at least 2 points".into(),
        ));
    }
    if from.iter().chain(to).any(|b| b.len() != size) {
        return Err(WitnessError::PartitionMismatch(
            "block sizes are not uniform".into(),
        ));
    }
    let mut images = vec![0usize; degree];
    for (src, dst) in from.iter().zip(to) {
        for (&u, &v) in src.iter().zip(dst) {
            images[u] = v;
        }
    }
    let phi = Permutation::from_images(images.clone())?;
    if phi.is_even() {
        return Ok(phi);
    }
    let last = from.last().expect("partitions are nonempty");
    images.swap(last[0], last[1]);
    let phi = Permutation::from_images(images)?;
    debug_assert!(phi.is_even());
    Ok(phi)
}

/// Degree of the point set a partition covers, requiring each of 0..n-1
/// exactly once.
fn check_partition(blocks: &[Vec<usize>]) -> Result<usize, WitnessError> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut seen = vec![false; n];
    for b in blocks {
        for &u in b {
            if u >= n || seen[u] {
                return Err(WitnessError::PartitionMismatch(format!(
                    "point {} repeated or out of range",
                    u
                )));
            }
            seen[u] = true;
        }
    }
    if n == 0 {
        return Err(WitnessError::PartitionMismatch("empty partition".into()));
    }
    Ok(n)
}

/// The structure on the `2^d` vectors whose automorphism group is pinned
/// to the translations extended by alpha, together with how it was built.
pub struct Anchor {
    pub structure: ColorRelStruct,
    /// Plain mode: which vector each digraph vertex was relabeled to.
    pub relabeling: Option<Vec<usize>>,
    /// The intended automorphism group, order `p * 2^d` on `2^d` points.
    pub group: PermGroup,
}

/// Builds the anchor and verifies its automorphism group is exactly the
/// intended one.
///
/// Color mode colors all triples of vectors by their orbits. Plain mode
/// takes the [`semiregular_digraph`] with p-cycles, one per orbit of alpha
/// on the nonzero vectors, relabels its blocks onto those orbits (ordered
/// by minimal vector, positions by alpha iteration), and lifts it by one
/// arity through the full group.
pub fn build_anchor(spec: &WitnessSpec) -> Result<Anchor, WitnessError> {
    let vspec = spec.vector_spec();
    let mut gens = vspec.left_regular().generators().to_vec();
    gens.push(spec.alpha().clone());
    let group = PermGroup::from_generators(gens)?;
    let (structure, relabeling) = match spec.mode() {
        Mode::Color => (orbit_coloring(&group, 3)?, None),
        Mode::Plain => {
            let m = spec.p() as usize;
            let count = vspec.vector_count();
            let s = (count - 1) / m;
            let digraph = semiregular_digraph(m, s)?;
            let mut relabel = vec![0usize; m * s];
            let mut seen = vec![false; count];
            seen[0] = true;
            let mut block = 0;
            for v in 1..count {
                if seen[v] {
                    continue;
                }
                let mut u = v;
                for t in 0..m {
                    relabel[block * m + t] = u;
                    seen[u] = true;
                    u = spec.alpha().apply(u);
                }
                if u != v {
                    return Err(WitnessError::SelfCheck(format!(
                        "alpha orbit of {} does not close after {} steps",
                        v, m
                    )));
                }
                block += 1;
            }
            // drop the fixed vector 0: label v becomes v - 1
            let to_y = Permutation::from_images(relabel.iter().map(|&v| v - 1).collect())?;
            let y = digraph.apply_perm(&to_y)?;
            let z = lift_stab_structure(&group, 0, &y)?;
            (z, Some(relabel))
        }
    };
    let aut = aut_group(&structure)?;
    if !aut.same_group(&group) {
        return Err(WitnessError::SelfCheck(format!(
            "anchor automorphism group has order {}, expected {}",
            aut.order(),
            group.order()
        )));
    }
    Ok(Anchor {
        structure,
        relabeling,
        group,
    })
}

/// Everything the construction produces; [`verify_witness`] consumes it.
pub struct WitnessBundle {
    pub spec: WitnessSpec,
    pub group: GroupSpec,
    pub anchor: ColorRelStruct,
    pub anchor_relabeling: Option<Vec<usize>>,
    /// `(i, v) -> (i, alpha^i(v))`, the conjugating map between X and Y.
    pub twist: Permutation,
    /// `(i, v) -> (i+1, v)`.
    pub shift: Permutation,
    /// `(i, v) -> (i, alpha(v))`.
    pub alpha_ext: Permutation,
    /// Anchor edges rooted at 0, as pairs in the zero fiber.
    pub zero_fiber_pairs: ConnectionSet,
    /// One pair per vector g: `((1, a^-1(g)+g), (2, a^-2(g)+g))`.
    pub marker_pairs: ConnectionSet,
    /// Their union, the connection set of X.
    pub conn: ConnectionSet,
    /// Color of the marker pairs; distinct from the anchor's colors in
    /// color mode, 0 in plain mode.
    pub fresh_color: u32,
    pub x: CayleyStructure,
    pub y: ColorRelStruct,
}

pub fn build_witness(spec: WitnessSpec) -> Result<WitnessBundle, WitnessError> {
    let anchor = build_anchor(&spec)?;
    let gspec = spec.group_spec();
    let p = spec.p() as usize;
    let vectors = spec.vector_spec().vector_count();

    let mut powers: Vec<Permutation> = vec![Permutation::identity(vectors)];
    for i in 1..p {
        powers.push(spec.alpha().compose(&powers[i - 1]));
    }
    let twist = {
        let mut images = vec![0usize; gspec.degree()];
        for i in 0..p {
            for v in 0..vectors {
                images[gspec.encode(i as u64, v)] = gspec.encode(i as u64, powers[i].apply(v));
            }
        }
        Permutation::from_images(images)?
    };
    let shift = gspec.translation(gspec.encode(1, 0));
    let alpha_ext = {
        let mut images = vec![0usize; gspec.degree()];
        for i in 0..p {
            for v in 0..vectors {
                images[gspec.encode(i as u64, v)] = gspec.encode(i as u64, spec.alpha().apply(v));
            }
        }
        Permutation::from_images(images)?
    };

    let mut zero_fiber_pairs = ConnectionSet::new(gspec, 3);
    for (t, c) in anchor.structure.edges_sorted() {
        if t[0] == 0 {
            zero_fiber_pairs.insert(vec![gspec.encode(0, t[1]), gspec.encode(0, t[2])], c)?;
        }
    }
    let fresh_color = match spec.mode() {
        Mode::Color => anchor.structure.max_color().map_or(0, |c| c + 1),
        Mode::Plain => 0,
    };

    // Marker pairs in closed form, cross-checked against the commutators
    // of the vector translations with the twist.
    let alpha_inv = &powers[p - 1];
    let alpha_inv_sq = &powers[p - 2];
    let mut marker_pairs = ConnectionSet::new(gspec, 3);
    for g in 0..vectors {
        let s1 = gspec.encode(1, alpha_inv.apply(g) ^ g);
        let s2 = gspec.encode(2, alpha_inv_sq.apply(g) ^ g);
        let ghat = gspec.translation(gspec.encode(0, g));
        let comm = ghat.commutator(&twist);
        if comm.apply(gspec.encode(1, 0)) != s1 || comm.apply(gspec.encode(2, 0)) != s2 {
            return Err(WitnessError::SelfCheck(format!(
                "closed-form marker pair disagrees with the commutator at vector {}",
                g
            )));
        }
        marker_pairs.insert(vec![s1, s2], fresh_color)?;
    }
    if marker_pairs.len() != vectors {
        return Err(WitnessError::SelfCheck(format!(
            "only {} of {} marker pairs are distinct",
            marker_pairs.len(),
            vectors
        )));
    }

    let conn = zero_fiber_pairs.union(&marker_pairs)?;
    let x = conn.expand()?;
    let y = x.structure().apply_perm(&twist)?;

    Ok(WitnessBundle {
        spec,
        group: gspec,
        anchor: anchor.structure,
        anchor_relabeling: anchor.relabeling,
        twist,
        shift,
        alpha_ext,
        zero_fiber_pairs,
        marker_pairs,
        conn,
        fresh_color,
        x,
        y,
    })
}

/// The overall conclusion string when all five verdicts hold.
pub const WITNESS_VALID: &str = "NOT-CI-WITNESS-VALID";

/// Runs the five verdicts on a bundle and annotates the report with the
/// measured pair counts and the twist's action on the marker pairs.
pub fn verify_witness(bundle: &WitnessBundle) -> Report {
    verify_witness_threads(bundle, 1)
}

/// [`verify_witness`] with the verdicts spread over up to `threads`
/// workers; the report is identical apart from timings.
pub fn verify_witness_threads(bundle: &WitnessBundle, threads: usize) -> Report {
    let mut report = verify_pair_threads(&bundle.spec, bundle.x.structure(), &bundle.y, threads);
    let twisted = bundle.marker_pairs.map_points(&bundle.twist);
    let common = bundle
        .marker_pairs
        .iter()
        .filter(|(t, _)| twisted.color(t).is_some())
        .count();
    report.note(format!(
        "twist moves the marker pairs: {} of {} kept",
        common,
        bundle.marker_pairs.len()
    ));
    report.note(format!(
        "pair counts: {} from the anchor, {} markers, {} edges in X",
        bundle.zero_fiber_pairs.len(),
        bundle.marker_pairs.len(),
        bundle.x.structure().edge_count()
    ));
    report
}

/// The five verdicts on a structure pair, each computed independently
/// from (p, d, alpha, mode) and the two edge sets alone, so the same
/// checks run on freshly built, reloaded, or deliberately damaged data.
pub fn verify_pair(spec: &WitnessSpec, x: &ColorRelStruct, y: &ColorRelStruct) -> Report {
    verify_pair_threads(spec, x, y, 1)
}

/// [`verify_pair`] with the verdicts spread round-robin over up to
/// `threads` workers. The verdicts are independent and reassembled in
/// their fixed order, so the report is identical apart from timings.
pub fn verify_pair_threads(
    spec: &WitnessSpec,
    x: &ColorRelStruct,
    y: &ColorRelStruct,
    threads: usize,
) -> Report {
    let checks = PairChecks::new(spec, x, y);
    let mut report = Report::new(format!(
        "witness verification: p={} d={} mode={}",
        spec.p(),
        spec.d(),
        spec.mode()
    ));
    let workers = threads.clamp(1, PAIR_VERDICTS.len());
    if workers == 1 {
        for (which, name) in PAIR_VERDICTS.iter().enumerate() {
            report.record(name, || checks.run(which));
        }
    } else {
        let mut verdicts: Vec<(usize, Verdict)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let checks = &checks;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut which = w;
                        while which < PAIR_VERDICTS.len() {
                            let start = std::time::Instant::now();
                            let (pass, detail) = checks.run(which);
                            out.push((
                                which,
                                Verdict {
                                    name: PAIR_VERDICTS[which].to_string(),
                                    pass,
                                    detail,
                                    millis: start.elapsed().as_millis() as u64,
                                },
                            ));
                            which += workers;
                        }
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("verdict worker panicked"))
                .collect()
        });
        verdicts.sort_by_key(|(which, _)| *which);
        report.verdicts = verdicts.into_iter().map(|(_, v)| v).collect();
    }
    report.conclusion = if report.all_pass() {
        format!(
            "{}: Z_{} x Z_2^{} is not a CI-group with respect to {} ternary relational structures",
            WITNESS_VALID,
            spec.p(),
            spec.d(),
            match spec.mode() {
                Mode::Color => "color",
                Mode::Plain => "(plain)",
            }
        )
    } else {
        "WITNESS-INVALID: at least one verdict failed".to_string()
    };
    report
}

const PAIR_VERDICTS: [&str; 5] = [
    "translations-preserve-x",
    "alpha-extension-preserves-x",
    "twisted-translations-preserve-x",
    "x-and-y-differ",
    "no-group-automorphism-maps-x-to-y",
];

/// Shared read-only state for the five verdicts, so they can run on any
/// thread in any order.
struct PairChecks<'a> {
    gspec: GroupSpec,
    x: &'a ColorRelStruct,
    y: &'a ColorRelStruct,
    translations: PermGroup,
    twist: Permutation,
    alpha_ext: Permutation,
}

impl<'a> PairChecks<'a> {
    fn new(spec: &WitnessSpec, x: &'a ColorRelStruct, y: &'a ColorRelStruct) -> PairChecks<'a> {
        let gspec = spec.group_spec();
        let p = spec.p() as usize;
        let vectors = spec.vector_spec().vector_count();
        let alpha_ext = {
            let mut images = vec![0usize; gspec.degree()];
            for i in 0..p {
                for v in 0..vectors {
                    images[gspec.encode(i as u64, v)] =
                        gspec.encode(i as u64, spec.alpha().apply(v));
                }
            }
            Permutation::from_images(images).expect("fiberwise bijection")
        };
        let twist = {
            let mut power = Permutation::identity(vectors);
            let mut images = vec![0usize; gspec.degree()];
            for i in 0..p {
                if i > 0 {
                    power = spec.alpha().compose(&power);
                }
                for v in 0..vectors {
                    images[gspec.encode(i as u64, v)] = gspec.encode(i as u64, power.apply(v));
                }
            }
            Permutation::from_images(images).expect("fiberwise bijection")
        };
        PairChecks {
            gspec,
            x,
            y,
            translations: gspec.left_regular(),
            twist,
            alpha_ext,
        }
    }

    fn run(&self, which: usize) -> (bool, String) {
        match which {
            0 => {
                let bad: Vec<usize> = self
                    .translations
                    .generators()
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| !self.x.is_automorphism(g))
                    .map(|(i, _)| i)
                    .collect();
                if bad.is_empty() {
                    (
                        true,
                        format!(
                            "all {} translation generators preserve X",
                            self.translations.generators().len()
                        ),
                    )
                } else {
                    (false, format!("generators {:?} break X", bad))
                }
            }
            1 => {
                if self.x.is_automorphism(&self.alpha_ext) {
                    (true, "the fiberwise alpha extension preserves X".into())
                } else {
                    (false, "the fiberwise alpha extension breaks X".into())
                }
            }
            2 => {
                let bad: Vec<usize> = self
                    .translations
                    .generators()
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| !self.x.is_automorphism(&g.conjugate_by(&self.twist)))
                    .map(|(i, _)| i)
                    .collect();
                if bad.is_empty() {
                    (
                        true,
                        "the twist conjugate of the regular representation preserves X".into(),
                    )
                } else {
                    (false, format!("twisted generators {:?} break X", bad))
                }
            }
            3 => {
                if self.x == self.y {
                    (false, "X and Y are the same edge map".into())
                } else {
                    (true, "X and Y differ as edge maps".into())
                }
            }
            _ => match scan_for_group_isomorphism(&self.gspec, self.x, self.y) {
                Ok((scan, via)) => match scan.found {
                    Some(_) => (
                        false,
                        format!(
                            "a group automorphism maps X onto Y (candidate {} of the enumeration, {})",
                            scan.tested, via
                        ),
                    ),
                    None => (
                        true,
                        format!("exhausted all {} group automorphisms ({})", scan.tested, via),
                    ),
                },
                Err(e) => (false, format!("scan failed: {}", e)),
            },
        }
    }
}

/// Scans all group automorphisms for one carrying `x` onto `y`. When both
/// structures are translation-closed the scan compares connection sets;
/// otherwise it falls back to full edge-map comparison.
fn scan_for_group_isomorphism(
    gspec: &GroupSpec,
    x: &ColorRelStruct,
    y: &ColorRelStruct,
) -> Result<(IsoScan, &'static str), AutError> {
    if x.vertex_count() == gspec.degree() && y.vertex_count() == gspec.degree() {
        if let (Ok(cx), Ok(cy)) = (slice_connection_set(x, gspec), slice_connection_set(y, gspec)) {
            if let (Ok(ex), Ok(ey)) = (cx.expand(), cy.expand()) {
                if ex.structure() == x && ey.structure() == y {
                    let scan = iso_by_connection_sets(&ex, &ey, DEFAULT_CANDIDATE_CAP)?;
                    return Ok((scan, "via connection sets"));
                }
            }
        }
    }
    let scan = iso_by_group_automorphism(x, y, gspec, DEFAULT_CANDIDATE_CAP)?;
    Ok((scan, "via full edge maps"))
}

/// Whether a regular copy of the group conjugated into a structure's
/// automorphism group by `phi` is conjugate to the left regular
/// representation inside that automorphism group. `None` certifies, via
/// the standard criterion, that the structure witnesses a CI failure for
/// this `phi`.
pub fn ci_check(
    x: &ColorRelStruct,
    hspec: &GroupSpec,
    phi: &Permutation,
    cap: u64,
) -> Result<Option<Permutation>, WitnessError> {
    if x.vertex_count() != hspec.degree() || phi.degree() != hspec.degree() {
        return Err(WitnessError::BadArgument(format!(
            "structure on {} points, group of degree {}, phi of degree {}",
            x.vertex_count(),
            hspec.degree(),
            phi.degree()
        )));
    }
    let h = hspec.left_regular();
    let conj_gens: Vec<Permutation> = h
        .generators()
        .iter()
        .map(|t| t.conjugate_by(phi))
        .collect();
    if let Some(i) = conj_gens.iter().position(|g| !x.is_automorphism(g)) {
        return Err(WitnessError::CayleyPrecondition(format!(
            "conjugated generator {} does not preserve the structure",
            i
        )));
    }
    let aut = aut_group(x)?;
    let conj = PermGroup::from_generators(conj_gens)?;
    Ok(aut.find_conjugator(&h, &conj, cap)?)
}

const SPEC_FILE: &str = "spec.txt";
const ANCHOR_FILE: &str = "Z.rs";
const X_FILE: &str = "X.rs";
const Y_FILE: &str = "Y.rs";
const TWIST_FILE: &str = "gamma.perm";
const REPORT_FILE: &str = "report.json";

impl WitnessBundle {
    /// Writes the bundle as a directory of plain-text artifacts plus the
    /// verification report.
    pub fn save(&self, dir: &Path, report: &Report) -> Result<(), WitnessError> {
        std::fs::create_dir_all(dir)?;
        let spec_text = format!(
            "p = {}\nd = {}\nmode = {}\nalpha = {}\n",
            self.spec.p(),
            self.spec.d(),
            self.spec.mode(),
            self.spec.alpha().cycle_string()
        );
        std::fs::write(dir.join(SPEC_FILE), spec_text)?;
        std::fs::write(dir.join(ANCHOR_FILE), self.anchor.to_text())?;
        std::fs::write(dir.join(X_FILE), self.x.structure().to_text())?;
        std::fs::write(dir.join(Y_FILE), self.y.to_text())?;
        std::fs::write(
            dir.join(TWIST_FILE),
            format!("degree {}\n{}\n", self.twist.degree(), self.twist.cycle_string()),
        )?;
        let json = serde_json::to_string_pretty(report)
            .expect("reports are plain data") + "\n";
        std::fs::write(dir.join(REPORT_FILE), json)?;
        Ok(())
    }
}

/// A bundle read back from disk; enough to rerun the verification.
pub struct LoadedBundle {
    pub spec: WitnessSpec,
    pub anchor: ColorRelStruct,
    pub x: ColorRelStruct,
    pub y: ColorRelStruct,
    pub twist: Permutation,
}

pub fn load_bundle(dir: &Path) -> Result<LoadedBundle, WitnessError> {
    let read = |name: &str| -> Result<String, WitnessError> {
        std::fs::read_to_string(dir.join(name)).map_err(|e| WitnessError::Bundle {
            path: dir.join(name).display().to_string(),
            message: e.to_string(),
        })
    };
    let bad = |name: &str, message: String| WitnessError::Bundle {
        path: dir.join(name).display().to_string(),
        message,
    };

    let spec_text = read(SPEC_FILE)?;
    let mut p = None;
    let mut d = None;
    let mut mode = None;
    let mut alpha_text = None;
    for line in spec_text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(SPEC_FILE, format!("expected 'key = value', got \"{}\"", line)))?;
        match key.trim() {
            "p" => p = Some(value.trim().parse::<u64>()),
            "d" => d = Some(value.trim().parse::<u32>()),
            "mode" => mode = Some(Mode::from_str(value.trim())),
            "alpha" => alpha_text = Some(value.trim().to_string()),
            other => return Err(bad(SPEC_FILE, format!("unknown key \"{}\"", other))),
        }
    }
    let p = p
        .ok_or_else(|| bad(SPEC_FILE, "missing p".into()))?
        .map_err(|e| bad(SPEC_FILE, format!("bad p: {}", e)))?;
    let d = d
        .ok_or_else(|| bad(SPEC_FILE, "missing d".into()))?
        .map_err(|e| bad(SPEC_FILE, format!("bad d: {}", e)))?;
    let mode = mode
        .ok_or_else(|| bad(SPEC_FILE, "missing mode".into()))?
        .map_err(|e| bad(SPEC_FILE, e))?;
    let alpha_text = alpha_text.ok_or_else(|| bad(SPEC_FILE, "missing alpha".into()))?;
    let alpha = Permutation::parse_cycles(&alpha_text, 1usize << d)
        .map_err(|e| bad(SPEC_FILE, format!("bad alpha: {}", e)))?;
    let spec = WitnessSpec::new(p, d, alpha, mode)?;

    let anchor = ColorRelStruct::parse(&read(ANCHOR_FILE)?)
        .map_err(|e| bad(ANCHOR_FILE, e.to_string()))?;
    let x = ColorRelStruct::parse(&read(X_FILE)?).map_err(|e| bad(X_FILE, e.to_string()))?;
    let y = ColorRelStruct::parse(&read(Y_FILE)?).map_err(|e| bad(Y_FILE, e.to_string()))?;

    let twist_group =
        parse_group_file(&read(TWIST_FILE)?).map_err(|e| bad(TWIST_FILE, e.to_string()))?;
    if twist_group.generators().len() != 1 {
        return Err(bad(
            TWIST_FILE,
            format!(
                "expected exactly one permutation, got {}",
                twist_group.generators().len()
            ),
        ));
    }
    let twist = twist_group.generators()[0].clone();
    Ok(LoadedBundle {
        spec,
        anchor,
        x,
        y,
        twist,
    })
}

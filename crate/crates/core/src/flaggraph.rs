//! Compatible flag pairs, orbitals on them, and the flag graphs they define.
//!
//! Vertices are always the full flag set of AG(n, q) in canonical order, so a
//! graph is fully described by its adjacency lists over flag indices.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geometry::{AffineSpace, Flag, LineRelation, Point, SpaceRef};
use crate::gl1::{GammaL1, StandardParameters};
use crate::group::{a_map, membership_sl_h, named_group, GroupSpec, NamedGroup, DEFAULT_ORBIT_CAP};
use crate::par::Exec;

/// Construction descriptor exported next to every edge list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMeta {
    pub family: String,
    pub n: usize,
    pub q: u32,
    pub params: Value,
    pub order: usize,
    pub valency: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct FlagGraph {
    space: SpaceRef,
    adj: Vec<Vec<u32>>,
    meta: GraphMeta,
}

impl FlagGraph {
    /// Wraps adjacency lists after checking symmetry and the absence of loops.
    pub fn new(space: SpaceRef, mut adj: Vec<Vec<u32>>, family: &str, params: Value) -> Result<FlagGraph> {
        if adj.len() != space.num_flags() {
            return Err(Error::DimensionMismatch { expected: space.num_flags(), got: adj.len() });
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for (v, list) in adj.iter().enumerate() {
            for &w in list {
                if w as usize == v {
                    return Err(Error::InternalMismatch(format!("loop at {}", space.flag_label(w))));
                }
                if adj[w as usize].binary_search(&(v as u32)).is_err() {
                    return Err(Error::InternalMismatch(format!(
                        "arc {} -> {} has no reverse",
                        space.flag_label(v as u32),
                        space.flag_label(w)
                    )));
                }
            }
        }
        let order = adj.len();
        let valency = regular_degree(&adj);
        let meta = GraphMeta { family: family.to_string(), n: space.dim(), q: space.q(), params, order, valency };
        Ok(FlagGraph { space, adj, meta })
    }

    /// Graph whose arcs are the given ordered pairs.
    pub fn from_arcs<I>(space: SpaceRef, arcs: I, family: &str, params: Value) -> Result<FlagGraph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adj = vec![Vec::new(); space.num_flags()];
        for (a, b) in arcs {
            adj[a as usize].push(b);
        }
        FlagGraph::new(space, adj, family, params)
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// The common degree, if the graph is regular.
    pub fn valency(&self) -> Option<usize> {
        self.meta.valency
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in index order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a as u32).map(|&b| (a as u32, b)));
        }
        out
    }

    pub fn same_edges(&self, other: &FlagGraph) -> bool {
        self.adj == other.adj
    }

    /// One edge per line, `label<TAB>label`, smaller label first, lines sorted.
    pub fn edge_list(&self) -> String {
        let labels: Vec<String> = (0..self.order() as u32).map(|v| self.space.flag_label(v)).collect();
        let mut lines: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (&labels[a as usize], &labels[b as usize]);
                if x <= y {
                    format!("{x}\t{y}\n")
                } else {
                    format!("{y}\t{x}\n")
                }
            })
            .collect();
        lines.sort_unstable();
        lines.concat()
    }

    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("meta serializes")
    }

    /// Parses an edge list over the flags of `space`.
    pub fn from_edge_list(space: SpaceRef, text: &str, family: &str, params: Value) -> Result<FlagGraph> {
        let mut arcs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected two tab-separated labels", lineno + 1)));
            };
            let (a, b) = (space.parse_flag_label(a)?, space.parse_flag_label(b)?);
            arcs.push((a, b));
            arcs.push((b, a));
        }
        FlagGraph::from_arcs(space, arcs, family, params)
    }
}

fn regular_degree(adj: &[Vec<u32>]) -> Option<usize> {
    let d = adj.first().map_or(0, Vec::len);
    adj.iter().all(|l| l.len() == d).then_some(d)
}

/// `a.point` is off `b.line` and `b.point` is off `a.line`.
#[inline]
pub fn is_compatible(space: &AffineSpace, a: u32, b: u32) -> bool {
    let (pa, pb) = (space.flag_point(a), space.flag_point(b));
    let (la, lb) = (space.flag_line(a), space.flag_line(b));
    !space.on_line(pa, lb) && !space.on_line(pb, la)
}

/// Distinct points, and neither line is the line joining them.
pub fn is_compatible_via_joining_line(space: &AffineSpace, a: u32, b: u32) -> bool {
    let (pa, pb) = (space.flag_point(a), space.flag_point(b));
    match space.line_through_indices(pa, pb) {
        Ok(join) => space.flag_line(a) != join && space.flag_line(b) != join,
        Err(_) => false,
    }
}

pub fn is_compatible_flags(space: &AffineSpace, a: &Flag, b: &Flag) -> Result<bool> {
    Ok(is_compatible(space, space.flag_index(a)?, space.flag_index(b)?))
}

/// Γ₊, Γ₌ or Γ≃: compatible flags whose lines are intersecting, parallel or skew.
pub fn relation_graph(space: &SpaceRef, rel: LineRelation, exec: Exec) -> Result<FlagGraph> {
    let family = match rel {
        LineRelation::Intersecting => "plus",
        LineRelation::Parallel => "par",
        LineRelation::Skew => "skew",
        LineRelation::Equal => return Err(Error::InvalidParameters("equal lines never form a compatible pair".into())),
    };
    let nl = space.num_lines();
    let related: Vec<Vec<u32>> = exec.map_range(nl, |l| {
        let l = l as u32;
        (0..nl as u32).filter(|&m| m != l && space.classify_indices(l, m) == rel).collect()
    });
    let flags_on: Vec<Vec<u32>> = (0..nl as u32)
        .map(|l| {
            let d = space.line_direction(l);
            space.line_point_indices(l).into_iter().map(|pt| space.flag_at(pt, d)).collect()
        })
        .collect();
    let adj = exec.map_range(space.num_flags(), |a| {
        let a = a as u32;
        related[space.flag_line(a) as usize]
            .iter()
            .flat_map(|&lb| flags_on[lb as usize].iter().copied())
            .filter(|&b| is_compatible(space, a, b))
            .collect::<Vec<u32>>()
    });
    FlagGraph::new(space.clone(), adj, family, json!({}))
}

/// A G-orbit on ordered flag pairs.
#[derive(Debug, Clone)]
pub struct Orbital {
    seed: (u32, u32),
    pairs: Vec<(u32, u32)>,
    group: String,
}

impl Orbital {
    pub fn seed(&self) -> (u32, u32) {
        self.seed
    }

    /// The least pair in flag order.
    pub fn canonical_seed(&self) -> (u32, u32) {
        self.pairs[0]
    }

    /// Pairs in sorted order.
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn group_label(&self) -> &str {
        &self.group
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    /// The reversed seed lies in the orbital.
    pub fn is_self_paired(&self) -> bool {
        self.contains(self.seed.1, self.seed.0)
    }

    /// Line relation shared by every pair (orbitals preserve it).
    pub fn relation(&self, space: &AffineSpace) -> LineRelation {
        space.classify_indices(space.flag_line(self.seed.0), space.flag_line(self.seed.1))
    }
}

struct PairBits {
    words: Vec<u64>,
    nf: usize,
}

impl PairBits {
    fn new(nf: usize) -> PairBits {
        PairBits { words: vec![0; (nf * nf).div_ceil(64)], nf }
    }

    #[inline]
    fn get(&self, a: u32, b: u32) -> bool {
        let x = a as usize * self.nf + b as usize;
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    /// Sets the bit and reports whether it was clear.
    #[inline]
    fn insert(&mut self, a: u32, b: u32) -> bool {
        let x = a as usize * self.nf + b as usize;
        let bit = 1u64 << (x % 64);
        let fresh = self.words[x / 64] & bit == 0;
        self.words[x / 64] |= bit;
        fresh
    }
}

fn close_pair(g: &GroupSpec, seed: (u32, u32), seen: &mut PairBits, cap: usize) -> Result<Vec<(u32, u32)>> {
    seen.insert(seed.0, seed.1);
    let mut out = vec![seed];
    let mut head = 0;
    while head < out.len() {
        let (a, b) = out[head];
        head += 1;
        for k in 0..g.num_generators() {
            let perm = g.flag_perm(k);
            let (x, y) = (perm[a as usize], perm[b as usize]);
            if seen.insert(x, y) {
                if out.len() >= cap {
                    return Err(Error::OrbitCapExceeded(cap));
                }
                out.push((x, y));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Diagonal-action closure of a compatible seed pair.
pub fn orbital_of(g: &GroupSpec, seed: (u32, u32)) -> Result<Orbital> {
    let space = g.space();
    if !is_compatible(space, seed.0, seed.1) {
        return Err(Error::IncompatibleSeed(format!("{} / {}", space.flag_label(seed.0), space.flag_label(seed.1))));
    }
    let mut seen = PairBits::new(space.num_flags());
    let pairs = close_pair(g, seed, &mut seen, DEFAULT_ORBIT_CAP)?;
    Ok(Orbital { seed, pairs, group: g.label() })
}

pub fn orbital_of_flags(g: &GroupSpec, a: &Flag, b: &Flag) -> Result<Orbital> {
    let s = g.space();
    orbital_of(g, (s.flag_index(a)?, s.flag_index(b)?))
}

/// The seed `((e1, <e1>), (c e2, <e2>))`.
pub fn standard_seed(space: &AffineSpace, c: Fe) -> Result<(u32, u32)> {
    let n = space.dim();
    if n < 2 {
        return Err(Error::InvalidParameters("seed needs n >= 2".into()));
    }
    if c.is_zero() {
        return Err(Error::InvalidParameters("c must be nonzero".into()));
    }
    let origin = Point::zero(n);
    let (e1, e2) = (Point::unit(n, 1), Point::unit(n, 2));
    let mut ce2 = Point::zero(n);
    ce2.0[1] = c;
    let l1 = space.line_through(&origin, &e1)?;
    let l2 = space.line_through(&origin, &e2)?;
    let a = space.flag_index(&space.make_flag(&e1, &l1)?)?;
    let b = space.flag_index(&space.make_flag(&ce2, &l2)?)?;
    Ok((a, b))
}

/// The graph on all flags whose arcs are the orbital's pairs.
pub fn graph_from_orbital(space: &SpaceRef, o: &Orbital, family: &str, params: Value) -> Result<FlagGraph> {
    if o.is_empty() || !is_compatible(space, o.seed.0, o.seed.1) {
        return Err(Error::IncompatibleSeed("orbital is empty or incompatible".into()));
    }
    if !o.is_self_paired() {
        return Err(Error::NotSelfPaired);
    }
    FlagGraph::from_arcs(space.clone(), o.pairs.iter().copied(), family, params)
}

/// Every orbital on compatible ordered flag pairs, ordered by least seed.
pub fn orbital_census(g: &GroupSpec) -> Result<Vec<Orbital>> {
    let space = g.space();
    let nf = space.num_flags() as u32;
    let mut seen = PairBits::new(nf as usize);
    let mut out = Vec::new();
    for a in 0..nf {
        for b in 0..nf {
            if seen.get(a, b) || !is_compatible(space, a, b) {
                continue;
            }
            let pairs = close_pair(g, (a, b), &mut seen, DEFAULT_ORBIT_CAP)?;
            out.push(Orbital { seed: (a, b), pairs, group: g.label() });
        }
    }
    Ok(out)
}

/// The self-paired members of [`orbital_census`].
pub fn selfpaired_orbital_census(g: &GroupSpec) -> Result<Vec<Orbital>> {
    Ok(orbital_census(g)?.into_iter().filter(Orbital::is_self_paired).collect())
}

/// Some `t(A_{c,δ}, 0, δ)` lies in `SL(2,q) ⋊ H`.
pub fn self_paired_algebraic(f: &Field, lambda_h: &GammaL1, c: Fe) -> Result<bool> {
    for d in 0..f.ell() as i64 {
        if membership_sl_h(f, &a_map(f, c, d)?, lambda_h)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Γ_{G,c}(2,q) together with its group and orbital.
#[derive(Debug, Clone)]
pub struct GammaGc {
    pub graph: FlagGraph,
    pub group: GroupSpec,
    pub orbital: Orbital,
}

/// Builds Γ_{G,c}(2,q) for `G_0 = SL(2,q) ⋊ H` and `c = ω^r`.
pub fn gamma_gc(q: u32, params: StandardParameters, r: u32) -> Result<GammaGc> {
    let group = named_group(NamedGroup::SL2SemidirectH { q, t: params.t, e: params.e, s: params.s })?;
    let f = group.field().clone();
    if r == 0 || r >= q {
        return Err(Error::InvalidParameters(format!("r = {r} must satisfy 0 < r < q = {q}")));
    }
    let c = f.omega_pow(r as i64);
    let lambda = GammaL1::from_standard(&f, params)?;
    let algebraic = self_paired_algebraic(&f, &lambda, c)?;
    let space = group.space().clone();
    let seed = standard_seed(&space, c)?;
    let orbital = orbital_of(&group, seed)?;
    if orbital.is_self_paired() != algebraic {
        return Err(Error::InternalMismatch(format!(
            "self-paired test disagrees for q={q}, (t,e,s)=({},{},{}), r={r}: orbit says {}, membership says {algebraic}",
            params.t,
            params.e,
            params.s,
            orbital.is_self_paired()
        )));
    }
    if !algebraic {
        return Err(Error::NotSelfPairedForC { r, reason: "no t(A_{c,d}, 0, d) lies in SL(2,q) x| H".into() });
    }
    let graph = graph_from_orbital(&space, &orbital, "gc", json!({"t": params.t, "e": params.e, "s": params.s, "r": r}))?;
    Ok(GammaGc { graph, group, orbital })
}

/// Self-paired orbitals of `SL(2,p) ⋊ <diag(1, l)>` and their graphs.
pub fn sl2p_census(p: u32, l: u32) -> Result<(GroupSpec, Vec<(Orbital, FlagGraph)>)> {
    let group = named_group(NamedGroup::SL2pC { p, l })?;
    let space = group.space().clone();
    let mut out = Vec::new();
    for (index, o) in selfpaired_orbital_census(&group)?.into_iter().enumerate() {
        let g = graph_from_orbital(&space, &o, "census-member", json!({"p": p, "l": l, "index": index}))?;
        out.push((o, g));
    }
    Ok((group, out))
}

//! Exact checks on flag graphs: invariants, multipartite structure,
//! arc-transitivity, quotients and recovered designs, feasibility of the flag
//! set, the valency formula for Γ_{G,c}(2,q), and isomorphism testing.

use std::collections::{BTreeMap, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::flaggraph::FlagGraph;
use crate::geometry::AffineSpace;
use crate::gl1::{GammaL1, StandardParameters};
use crate::group::{Domain, GroupSpec, DEFAULT_ORBIT_CAP};
use crate::par::Exec;

/// Largest graph accepted by [`are_isomorphic`].
pub const ISOMORPHISM_VERTEX_CAP: usize = 2000;

/// A distance or cycle length that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extent {
    Finite(usize),
    Infinite,
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(x) => s.serialize_u64(*x as u64),
            Extent::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub order: usize,
    pub degree_multiset: BTreeMap<usize, usize>,
    pub girth: Extent,
    pub diameter: Extent,
    pub component_diameters: Vec<usize>,
    pub component_sizes: Vec<usize>,
    #[serde(skip)]
    pub components: Vec<Vec<u32>>,
}

impl InvariantReport {
    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn regular_degree(&self) -> Option<usize> {
        match self.degree_multiset.len() {
            0 => Some(0),
            1 => self.degree_multiset.keys().next().copied(),
            _ => None,
        }
    }
}

fn bitsets(adj: &[Vec<u32>]) -> Vec<FixedBitSet> {
    adj.iter()
        .map(|list| {
            let mut b = FixedBitSet::with_capacity(adj.len());
            for &w in list {
                b.insert(w as usize);
            }
            b
        })
        .collect()
}

/// Breadth-first level sizes from `root`, using neighbourhood bitsets.
fn bfs_levels(nbr: &[FixedBitSet], root: usize) -> Vec<usize> {
    let n = nbr.len();
    let mut seen = FixedBitSet::with_capacity(n);
    seen.insert(root);
    let mut frontier = vec![root];
    let mut levels = vec![1];
    loop {
        let mut next = FixedBitSet::with_capacity(n);
        for &u in &frontier {
            next.union_with(&nbr[u]);
        }
        next.difference_with(&seen);
        if next.is_clear() {
            return levels;
        }
        seen.union_with(&next);
        frontier = next.ones().collect();
        levels.push(frontier.len());
    }
}

fn components(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s as u32];
        let mut head = 0;
        while head < members.len() {
            let u = members[head] as usize;
            head += 1;
            for &w in &adj[u] {
                if comp[w as usize] == usize::MAX {
                    comp[w as usize] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Length of the shortest cycle through `root` or closer (exact when minimized over all roots).
fn shortest_cycle_from(adj: &[Vec<u32>], root: usize) -> Option<usize> {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut best: Option<usize> = None;
    while let Some(u) = queue.pop_front() {
        if let Some(b) = best {
            if 2 * dist[u] + 1 >= b {
                break;
            }
        }
        for &w in &adj[u] {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if parent[u] != w {
                let len = dist[u] + dist[w] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

fn girth(adj: &[Vec<u32>], nbr: &[FixedBitSet], exec: Exec) -> Extent {
    let has_triangle = adj.iter().enumerate().any(|(u, list)| list.iter().any(|&w| !nbr[u].is_disjoint(&nbr[w as usize])));
    if has_triangle {
        return Extent::Finite(3);
    }
    exec.map_range(adj.len(), |r| shortest_cycle_from(adj, r))
        .into_iter()
        .flatten()
        .min()
        .map_or(Extent::Infinite, Extent::Finite)
}

/// Order, degrees, girth, diameter and components of a graph.
pub fn invariants_of(adj: &[Vec<u32>], exec: Exec) -> InvariantReport {
    let n = adj.len();
    let mut degree_multiset = BTreeMap::new();
    for list in adj {
        *degree_multiset.entry(list.len()).or_insert(0) += 1;
    }
    let nbr = bitsets(adj);
    let comps = components(adj);
    let ecc = exec.map_range(n, |r| bfs_levels(&nbr, r).len() - 1);
    let component_diameters: Vec<usize> = comps.iter().map(|c| c.iter().map(|&v| ecc[v as usize]).max().unwrap_or(0)).collect();
    let diameter = match comps.len() {
        0 => Extent::Finite(0),
        1 => Extent::Finite(component_diameters[0]),
        _ => Extent::Infinite,
    };
    InvariantReport {
        order: n,
        degree_multiset,
        girth: girth(adj, &nbr, exec),
        diameter,
        component_diameters,
        component_sizes: comps.iter().map(Vec::len).collect(),
        components: comps,
    }
}

pub fn invariants(g: &FlagGraph, exec: Exec) -> InvariantReport {
    invariants_of(g.adjacency(), exec)
}

/// Checks that non-adjacency within `component` is an equivalence relation
/// with equal classes and all cross-class pairs adjacent; returns (parts, part size).
pub fn check_complete_multipartite(adj: &[Vec<u32>], component: &[u32]) -> Result<(usize, usize)> {
    let nbr = bitsets(adj);
    let mut class_of: HashMap<u32, usize> = HashMap::new();
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for &v in component {
        if class_of.contains_key(&v) {
            continue;
        }
        let class: Vec<u32> = component.iter().copied().filter(|&w| w == v || !nbr[v as usize].contains(w as usize)).collect();
        for &w in &class {
            if let Some(&other) = class_of.get(&w) {
                let rep = classes[other][0];
                return Err(Error::NotCompleteMultipartite([v as usize, w as usize, rep as usize]));
            }
        }
        for &w in &class {
            class_of.insert(w, classes.len());
        }
        classes.push(class);
    }
    for class in &classes {
        for (i, &a) in class.iter().enumerate() {
            for &b in &class[i + 1..] {
                if nbr[a as usize].contains(b as usize) {
                    return Err(Error::NotCompleteMultipartite([a as usize, class[0] as usize, b as usize]));
                }
            }
        }
    }
    let size = classes[0].len();
    if let Some(c) = classes.iter().find(|c| c.len() != size) {
        return Err(Error::NotCompleteMultipartite([classes[0][0] as usize, c[0] as usize, c[c.len() - 1] as usize]));
    }
    Ok((classes.len(), size))
}

/// Checks every generator preserves the edge set, then whether one arc orbit covers all arcs.
pub fn is_arc_transitive(g: &FlagGraph, group: &GroupSpec) -> Result<bool> {
    check_automorphisms(g, group)?;
    let edges = g.edges();
    let Some(&(a, b)) = edges.first() else {
        return Ok(true);
    };
    let orbit = group.orbit_flag_pairs(a, b, DEFAULT_ORBIT_CAP)?;
    Ok(orbit.len() == 2 * edges.len())
}

/// Errors with a witness if some generator maps an edge to a non-edge.
pub fn check_automorphisms(g: &FlagGraph, group: &GroupSpec) -> Result<()> {
    let space = g.space();
    for k in 0..group.num_generators() {
        let perm = group.flag_perm(k);
        for (a, b) in g.edges() {
            if !g.has_edge(perm[a as usize], perm[b as usize]) {
                return Err(Error::NotAnAutomorphismGroup { generator: k, edge: (space.flag_label(a), space.flag_label(b)) });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub blocks: usize,
    pub block_size: usize,
    pub quotient_complete: bool,
    pub quotient_valency: Option<usize>,
    pub almost_multicover: bool,
    pub multiplicity: Option<usize>,
    #[serde(skip)]
    masks: Vec<u128>,
}

impl QuotientReport {
    /// Bit `i` set when the `i`-th flag of block `b` has a neighbour in block `c`.
    pub fn mask(&self, b: usize, c: usize) -> u128 {
        self.masks[b * self.blocks + c]
    }
}

/// Position of each flag within its point fibre.
fn fibre_positions(space: &AffineSpace) -> Vec<usize> {
    let mut next = vec![0usize; space.num_points()];
    (0..space.num_flags() as u32)
        .map(|f| {
            let p = space.flag_point(f) as usize;
            next[p] += 1;
            next[p] - 1
        })
        .collect()
}

/// Quotient of the graph on point fibres, almost-multicover test and multiplicity.
pub fn quotient_analysis(g: &FlagGraph) -> Result<QuotientReport> {
    let space = g.space();
    let nb = space.num_points();
    let bs = space.num_directions();
    if bs > 128 {
        return Err(Error::SizeCapExceeded { what: "block size", size: bs as u64, cap: 128 });
    }
    let pos = fibre_positions(space);
    let mut masks = vec![0u128; nb * nb];
    for (a, b) in g.edges() {
        let (pa, pb) = (space.flag_point(a) as usize, space.flag_point(b) as usize);
        masks[pa * nb + pb] |= 1 << pos[a as usize];
        masks[pb * nb + pa] |= 1 << pos[b as usize];
    }
    let full: u128 = if bs == 128 { u128::MAX } else { (1u128 << bs) - 1 };
    let degrees: Vec<usize> = (0..nb).map(|b| (0..nb).filter(|&c| masks[b * nb + c] != 0).count()).collect();
    let quotient_complete = degrees.iter().all(|&d| d == nb - 1);
    let quotient_valency = degrees.iter().all(|&d| d == degrees[0]).then_some(degrees[0]);
    let mut multiplicity = None;
    for b in 0..nb {
        for c in 0..nb {
            let m = masks[b * nb + c];
            if m == 0 {
                continue;
            }
            let shared = m.count_ones() as usize;
            if shared != bs - 1 || m & !full != 0 {
                return Err(Error::NotAlmostMulticover {
                    block: space.point(b as u32).to_string(),
                    other: space.point(c as u32).to_string(),
                    shared,
                    size: bs,
                });
            }
            let count = (0..nb).filter(|&d| masks[b * nb + d] == m).count();
            match multiplicity {
                None => multiplicity = Some(count),
                Some(x) if x != count => {
                    return Err(Error::InternalMismatch(format!("multiplicity varies: {x} and {count}")));
                }
                _ => {}
            }
        }
    }
    Ok(QuotientReport {
        blocks: nb,
        block_size: bs,
        quotient_complete,
        quotient_valency,
        almost_multicover: true,
        multiplicity,
        masks,
    })
}

/// The incidence structure D(Γ, ℬ) on point fibres.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceStructure {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub blocks: Vec<Vec<u32>>,
}

impl IncidenceStructure {
    /// True when the blocks are exactly the lines of the space.
    pub fn blocks_are_lines(&self, space: &AffineSpace) -> bool {
        let mut lines: Vec<Vec<u32>> = (0..space.num_lines() as u32).map(|l| space.line_point_indices(l)).collect();
        lines.sort();
        lines == self.blocks
    }
}

/// Builds D(Γ, ℬ) as the G-orbit of `{B} ∪ ℬ(α)` and checks it is a 2-design.
pub fn design_recover(g: &FlagGraph, group: &GroupSpec, quotient: &QuotientReport) -> Result<IncidenceStructure> {
    let space = g.space();
    let nb = quotient.blocks;
    let alpha = 0u32;
    let b = space.flag_point(alpha) as usize;
    let pos = fibre_positions(space);
    let full: u128 = (1u128 << quotient.block_size) - 1;
    let missing = full & !(1u128 << pos[alpha as usize]);
    let mut base: Vec<u32> = (0..nb).filter(|&c| c == b || quotient.mask(b, c) == missing).map(|c| c as u32).collect();
    base.sort_unstable();

    let mut seen: HashSet<Vec<u32>> = HashSet::from([base.clone()]);
    let mut blocks = vec![base];
    let mut head = 0;
    while head < blocks.len() {
        let cur = blocks[head].clone();
        head += 1;
        for k in 0..group.num_generators() {
            let mut img: Vec<u32> = cur.iter().map(|&x| group.image(Domain::Points, k, x)).collect();
            img.sort_unstable();
            if seen.insert(img.clone()) {
                blocks.push(img);
            }
        }
    }
    blocks.sort();
    let k = blocks[0].len();
    if blocks.iter().any(|blk| blk.len() != k) {
        return Err(Error::InternalMismatch("blocks of unequal size".into()));
    }
    let mut cover = vec![0usize; nb * nb];
    for blk in &blocks {
        for (i, &x) in blk.iter().enumerate() {
            for &y in &blk[i + 1..] {
                cover[x as usize * nb + y as usize] += 1;
            }
        }
    }
    let counts = (0..nb).flat_map(|x| (x + 1..nb).map(move |y| (x, y))).map(|(x, y)| cover[x * nb + y]);
    let (min, max) = counts.fold((usize::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)));
    if min != max {
        return Err(Error::NotA2Design { min, max });
    }
    Ok(IncidenceStructure { v: nb, k, lambda: min, blocks })
}

/// Conditions (A1)-(A4) for the full flag set, with the equivalent criteria evaluated alongside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub flag_transitive: bool,
    pub a1: bool,
    pub a2: bool,
    pub a3: bool,
    pub a4: bool,
    pub feasible: bool,
    pub point_two_transitive: bool,
    /// |Ω(σ)| ≥ 3 and G_{σ,τ} transitive on the lines through σ missing τ.
    pub line_criterion: bool,
    /// G_{σ,L} transitive on the points off L.
    pub transitive_off_line: bool,
    /// G_0 is 2-transitive on directions.
    pub directions_two_transitive: bool,
}

pub fn feasibility_check(group: &GroupSpec) -> Result<FeasibilityReport> {
    let space = group.space().clone();
    if space.dim() < 2 {
        return Err(Error::InvalidParameters("flags need n >= 2".into()));
    }
    let nf = space.num_flags();
    let flag_transitive = group.orbit_indices(Domain::Flags, 0).len() == nf;
    let sigma = space.flag_point(0);
    let line = space.flag_line(0);
    let through: Vec<u32> = (0..nf as u32).filter(|&f| space.flag_point(f) == sigma).collect();
    let a1 = through.len() >= 3;
    let a2 = through.iter().enumerate().all(|(i, &x)| {
        through[i + 1..].iter().all(|&y| space.intersection(space.flag_line(x), space.flag_line(y)) == Some(sigma))
    });

    let stab_flag = group.stabilizer_of_flag_index(0)?;
    let on_line: Vec<u32> = space.line_point_indices(line).into_iter().filter(|&x| x != sigma).collect();
    let a3 = stab_flag.is_transitive_on(Domain::Points, &on_line);
    let off_line: Vec<u32> = (0..space.num_points() as u32).filter(|&x| !space.on_line(x, line)).collect();
    let transitive_off_line = stab_flag.is_transitive_on(Domain::Points, &off_line);

    let others: Vec<u32> = through.iter().copied().filter(|&f| f != 0).collect();
    let mut a4 = true;
    let mut line_criterion = a1;
    for &tau in &on_line {
        let stab = point_pair_stabilizer(group, sigma, tau)?;
        a4 &= stab.is_transitive_on(Domain::Flags, &others);
        let missing_tau: Vec<u32> = through.iter().copied().filter(|&f| !space.on_line(tau, space.flag_line(f))).collect();
        line_criterion &= stab.is_transitive_on(Domain::Flags, &missing_tau);
    }

    let np = space.num_points() as u32;
    let point_two_transitive = group.orbit_indices(Domain::Points, 0).len() == np as usize
        && group.stabilizer_of_point_index(0)?.is_transitive_on(Domain::Points, &(1..np).collect::<Vec<_>>());
    let origin = group.stabilizer_of_point_index(0)?;
    let directions_two_transitive = direction_pairs_transitive(&origin, space.num_directions());

    Ok(FeasibilityReport {
        flag_transitive,
        a1,
        a2,
        a3,
        a4,
        feasible: flag_transitive && a1 && a2 && a3 && a4,
        point_two_transitive,
        line_criterion,
        transitive_off_line,
        directions_two_transitive,
    })
}

fn point_pair_stabilizer(group: &GroupSpec, a: u32, b: u32) -> Result<GroupSpec> {
    group.stabilizer_by((a, b), |g, &(x, y)| (group.map_point_index(g, x), group.map_point_index(g, y)), DEFAULT_ORBIT_CAP)
}

fn direction_pairs_transitive(g: &GroupSpec, nd: usize) -> bool {
    if nd < 2 {
        return true;
    }
    let mut seen = vec![false; nd * nd];
    seen[1] = true;
    let mut queue = vec![(0u32, 1u32)];
    let mut head = 0;
    while head < queue.len() {
        let (x, y) = queue[head];
        head += 1;
        for k in 0..g.num_generators() {
            let (u, v) = (g.image(Domain::Directions, k, x), g.image(Domain::Directions, k, y));
            if !seen[u as usize * nd + v as usize] {
                seen[u as usize * nd + v as usize] = true;
                queue.push((u, v));
            }
        }
    }
    queue.len() == nd * (nd - 1)
}

/// Predicted valency of Γ_{G,c}(2,q) for `c = ω^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValencyPrediction {
    pub t: u32,
    pub e: u32,
    pub s: u32,
    pub r: u32,
    pub i: u32,
    pub ell_c: usize,
    pub valency: usize,
}

pub fn predict_valency(q: u32, params: StandardParameters, r: u32) -> Result<ValencyPrediction> {
    let f = Field::of_order(q)?;
    params.validate(&f)?;
    if r == 0 || r >= q {
        return Err(Error::InvalidParameters(format!("r = {r} must satisfy 0 < r < q = {q}")));
    }
    let StandardParameters { t, e, s } = params;
    let p = f.p() as u128;
    let ps1 = p.pow(s) - 1;
    let i = (1..=f.ell())
        .find(|&i| ((e as u128 + r as u128 * ps1) * ((p.pow(s * i) - 1) / ps1)) % t as u128 == 0)
        .ok_or_else(|| Error::InternalMismatch("no index i up to ell satisfies the divisibility rule".into()))?;
    let qm1 = (q - 1) as usize;
    let ell_c = i as usize * qm1 / (t * s) as usize;
    let direct = GammaL1::from_standard(&f, params)?.orbit_of(&f, f.omega_pow(r as i64)).len();
    if direct != ell_c || i as usize * qm1 % (t * s) as usize != 0 {
        return Err(Error::InternalMismatch(format!("orbit length {direct} but the divisibility rule gives i = {i}, ell_c = {ell_c}")));
    }
    let valency = i as usize * q as usize * qm1 * qm1 / (t * s) as usize;
    debug_assert_eq!(valency, (q as usize * q as usize - q as usize) * ell_c);
    Ok(ValencyPrediction { t, e, s, r, i, ell_c, valency })
}

/// Colour refinement on a disjoint union; colours are renumbered canonically
/// (by sorted signature) so both sides share one palette.
fn refine(adj: &[Vec<u32>], colours: &mut Vec<u32>) {
    let mut classes = colours.iter().collect::<HashSet<_>>().len();
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..adj.len())
            .map(|v| {
                let mut ns: Vec<u32> = adj[v].iter().map(|&w| colours[w as usize]).collect();
                ns.sort_unstable();
                (colours[v], ns)
            })
            .collect();
        let mut palette: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        palette.sort();
        palette.dedup();
        let index: HashMap<&(u32, Vec<u32>), u32> = palette.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        *colours = sigs.iter().map(|s| index[s]).collect();
        if palette.len() == classes {
            return;
        }
        classes = palette.len();
    }
}

fn balanced(colours: &[u32], n1: usize) -> bool {
    let mut count: HashMap<u32, i64> = HashMap::new();
    for (v, &c) in colours.iter().enumerate() {
        *count.entry(c).or_insert(0) += if v < n1 { 1 } else { -1 };
    }
    count.values().all(|&x| x == 0)
}

fn search(adj: &[Vec<u32>], n1: usize, colours: Vec<u32>, fresh: u32) -> Option<Vec<u32>> {
    if !balanced(&colours, n1) {
        return None;
    }
    let mut size: HashMap<u32, usize> = HashMap::new();
    for &c in &colours[..n1] {
        *size.entry(c).or_insert(0) += 1;
    }
    let target = size.iter().filter(|(_, &s)| s > 1).min_by_key(|(&c, &s)| (s, c)).map(|(&c, _)| c);
    let Some(target) = target else {
        let mut map = vec![0u32; n1];
        let mut by_colour: HashMap<u32, u32> = HashMap::new();
        for v in n1..colours.len() {
            by_colour.insert(colours[v], (v - n1) as u32);
        }
        for v in 0..n1 {
            map[v] = by_colour[&colours[v]];
        }
        let ok = (0..n1).all(|v| {
            let mut img: Vec<u32> = adj[v].iter().map(|&w| map[w as usize]).collect();
            img.sort_unstable();
            let mut actual: Vec<u32> = adj[n1 + map[v] as usize].iter().map(|&w| w - n1 as u32).collect();
            actual.sort_unstable();
            img == actual
        });
        return ok.then_some(map);
    };
    let v = (0..n1).find(|&v| colours[v] == target).expect("class is nonempty");
    for w in n1..colours.len() {
        if colours[w] != target {
            continue;
        }
        let mut next = colours.clone();
        next[v] = fresh;
        next[w] = fresh;
        refine(adj, &mut next);
        let top = next.iter().max().copied().unwrap_or(0) + 1;
        if let Some(m) = search(adj, n1, next, top) {
            return Some(m);
        }
    }
    None
}

/// Per-vertex fingerprint: degree, triangles through the vertex, BFS level sizes.
fn fingerprints(adj: &[Vec<u32>], exec: Exec) -> Vec<(usize, usize, Vec<usize>)> {
    let nbr = bitsets(adj);
    exec.map_range(adj.len(), |v| {
        let tri = adj[v].iter().map(|&w| nbr[v].intersection(&nbr[w as usize]).count()).sum::<usize>() / 2;
        (adj[v].len(), tri, bfs_levels(&nbr, v))
    })
}

/// An isomorphism `g1 -> g2` as a vertex map, if one exists.
pub fn find_isomorphism(adj1: &[Vec<u32>], adj2: &[Vec<u32>], exec: Exec) -> Result<Option<Vec<u32>>> {
    let n = adj1.len();
    for m in [n, adj2.len()] {
        if m > ISOMORPHISM_VERTEX_CAP {
            return Err(Error::SizeCapExceeded { what: "vertices", size: m as u64, cap: ISOMORPHISM_VERTEX_CAP as u64 });
        }
    }
    if n != adj2.len() {
        return Ok(None);
    }
    let (f1, f2) = (fingerprints(adj1, exec), fingerprints(adj2, exec));
    let (mut s1, mut s2) = (f1.clone(), f2.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Ok(None);
    }
    let mut palette: Vec<&(usize, usize, Vec<usize>)> = s1.iter().collect();
    palette.dedup();
    let index: HashMap<&(usize, usize, Vec<usize>), u32> = palette.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
    let mut union: Vec<Vec<u32>> = adj1.to_vec();
    union.extend(adj2.iter().map(|l| l.iter().map(|&w| w + n as u32).collect()));
    let mut colours: Vec<u32> = f1.iter().chain(f2.iter()).map(|p| index[p]).collect();
    refine(&union, &mut colours);
    let top = colours.iter().max().copied().unwrap_or(0) + 1;
    Ok(search(&union, n, colours, top))
}

pub fn are_isomorphic(g1: &FlagGraph, g2: &FlagGraph, exec: Exec) -> Result<bool> {
    Ok(find_isomorphism(g1.adjacency(), g2.adjacency(), exec)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flaggraph::relation_graph;
    use crate::geometry::LineRelation;
    use crate::group::{named_group, NamedGroup};

    fn cycle(n: usize) -> Vec<Vec<u32>> {
        (0..n).map(|i| vec![((i + n - 1) % n) as u32, ((i + 1) % n) as u32]).collect()
    }

    fn space(n: usize, q: u32) -> crate::geometry::SpaceRef {
        AffineSpace::new(n, Field::of_order(q).unwrap()).unwrap()
    }

    #[test]
    fn plus_2_3_invariants() {
        let g = relation_graph(&space(2, 3), LineRelation::Intersecting, Exec::Parallel).unwrap();
        let r = invariants(&g, Exec::Parallel);
        assert_eq!(r.order, 36);
        assert_eq!(r.regular_degree(), Some(12));
        assert_eq!((r.girth, r.diameter), (Extent::Finite(3), Extent::Finite(2)));
        assert!(r.is_connected());
    }

    #[test]
    fn par_3_2_components() {
        let g = relation_graph(&space(3, 2), LineRelation::Parallel, Exec::Parallel).unwrap();
        let r = invariants(&g, Exec::Sequential);
        assert_eq!(r.regular_degree(), Some(6));
        assert_eq!(r.components.len(), 7);
        assert_eq!(r.diameter, Extent::Infinite);
        for c in &r.components {
            assert_eq!(check_complete_multipartite(g.adjacency(), c).unwrap(), (4, 2));
        }
        let g = relation_graph(&space(2, 3), LineRelation::Parallel, Exec::Parallel).unwrap();
        let r = invariants(&g, Exec::Parallel);
        assert_eq!(check_complete_multipartite(g.adjacency(), &r.components[0]).unwrap(), (3, 3));
    }

    #[test]
    fn small_graph_invariants() {
        let empty = vec![Vec::new(); 4];
        let r = invariants_of(&empty, Exec::Sequential);
        assert_eq!((r.girth, r.diameter), (Extent::Infinite, Extent::Infinite));
        let r = invariants_of(&cycle(7), Exec::Parallel);
        assert_eq!((r.girth, r.diameter), (Extent::Finite(7), Extent::Finite(3)));
        let c5 = cycle(5);
        assert!(matches!(check_complete_multipartite(&c5, &[0, 1, 2, 3, 4]), Err(Error::NotCompleteMultipartite(_))));
        assert_eq!(check_complete_multipartite(&cycle(4), &[0, 1, 2, 3]).unwrap(), (2, 2));
    }

    #[test]
    fn arc_transitivity_examples() {
        let g = named_group(NamedGroup::AGammaL { n: 2, q: 3 }).unwrap();
        let plus = relation_graph(g.space(), LineRelation::Intersecting, Exec::Parallel).unwrap();
        assert!(is_arc_transitive(&plus, &g).unwrap());
        let skew = relation_graph(g.space(), LineRelation::Skew, Exec::Parallel).unwrap();
        assert!(is_arc_transitive(&skew, &g).unwrap());
        let t = named_group(NamedGroup::Translations { n: 2, q: 4 }).unwrap();
        let plus4 = relation_graph(t.space(), LineRelation::Intersecting, Exec::Parallel).unwrap();
        assert!(!is_arc_transitive(&plus4, &t).unwrap());
    }

    #[test]
    fn quotient_and_design_examples() {
        let g = named_group(NamedGroup::AGammaL { n: 2, q: 3 }).unwrap();
        let plus = relation_graph(g.space(), LineRelation::Intersecting, Exec::Parallel).unwrap();
        let qr = quotient_analysis(&plus).unwrap();
        assert!(qr.quotient_complete && qr.almost_multicover);
        assert_eq!((qr.block_size, qr.multiplicity), (4, Some(2)));
        let d = design_recover(&plus, &g, &qr).unwrap();
        assert_eq!((d.v, d.k, d.lambda, d.blocks.len()), (9, 3, 1, 12));
        assert!(d.blocks_are_lines(g.space()));

        let g = named_group(NamedGroup::AGL { n: 3, q: 2 }).unwrap();
        let plus = relation_graph(g.space(), LineRelation::Intersecting, Exec::Parallel).unwrap();
        let qr = quotient_analysis(&plus).unwrap();
        assert_eq!((qr.block_size, qr.multiplicity), (7, Some(1)));
        let d = design_recover(&plus, &g, &qr).unwrap();
        assert_eq!((d.v, d.k, d.lambda), (8, 2, 1));
    }

    #[test]
    fn feasibility_examples() {
        let r = feasibility_check(&named_group(NamedGroup::AffineLine { n: 2, q: 4, frobenius: true }).unwrap()).unwrap();
        assert!(r.feasible && r.line_criterion && r.transitive_off_line && r.directions_two_transitive);
        let r = feasibility_check(&named_group(NamedGroup::Translations { n: 2, q: 3 }).unwrap()).unwrap();
        assert!(!r.a3 && !r.feasible);
        let r = feasibility_check(&named_group(NamedGroup::ASL { n: 2, q: 3 }).unwrap()).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn valency_examples() {
        let full = StandardParameters { t: 1, e: 0, s: 1 };
        for r in 1..9 {
            let v = predict_valency(9, full, r).unwrap();
            assert_eq!((v.i, v.ell_c, v.valency), (1, 8, 576));
        }
        let v = predict_valency(4, StandardParameters { t: 3, e: 0, s: 1 }, 1).unwrap();
        assert_eq!((v.i, v.ell_c, v.valency), (2, 2, 24));
        let v = predict_valency(5, full, 1).unwrap();
        assert_eq!((v.i, v.ell_c, v.valency), (1, 4, 80));
    }

    #[test]
    fn isomorphism_examples() {
        let s = space(2, 3);
        let plus = relation_graph(&s, LineRelation::Intersecting, Exec::Parallel).unwrap();
        let par = relation_graph(&s, LineRelation::Parallel, Exec::Parallel).unwrap();
        assert!(are_isomorphic(&plus, &plus, Exec::Parallel).unwrap());
        assert!(!are_isomorphic(&plus, &par, Exec::Parallel).unwrap());
        // relabelled cycles
        let c = cycle(9);
        let perm = [3u32, 7, 1, 0, 8, 2, 6, 5, 4];
        let mut d = vec![Vec::new(); 9];
        for (v, list) in c.iter().enumerate() {
            d[perm[v] as usize] = list.iter().map(|&w| perm[w as usize]).collect();
        }
        let m = find_isomorphism(&c, &d, Exec::Sequential).unwrap().unwrap();
        for (v, list) in c.iter().enumerate() {
            for &w in list {
                assert!(d[m[v] as usize].contains(&m[w as usize]));
            }
        }
        // two triangles vs a hexagon: same degrees, not isomorphic
        let tt = vec![vec![1, 2], vec![0, 2], vec![0, 1], vec![4, 5], vec![3, 5], vec![3, 4]];
        assert!(find_isomorphism(&tt, &cycle(6), Exec::Parallel).unwrap().is_none());
    }
}

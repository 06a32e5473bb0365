//! Semi-affine maps `t(A, v, k): u -> A u^(p^k) + v` and groups generated by them.
//!
//! Composition follows "right acts first": `g.compose(h)` is `u -> g(h(u))`.
//! Each [`GroupSpec`] precomputes the permutation induced by every generator on
//! points, directions, lines and flags, so orbit work never touches field
//! arithmetic.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geometry::{AffineSpace, Flag, Line, Point, SpaceRef};
use crate::gl1::{GammaL1, StandardParameters};
use crate::matrix::Matrix;

/// Default cap on orbit sizes.
pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;
/// Default cap on materialized group orders.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemiAffineMap {
    a: Matrix,
    v: Vec<Fe>,
    k: u32,
}

impl SemiAffineMap {
    pub fn new(f: &Field, a: Matrix, v: Vec<Fe>, k: i64) -> Result<SemiAffineMap> {
        if v.len() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: v.len() });
        }
        if a.det(f).is_zero() {
            return Err(Error::Singular);
        }
        let k = k.rem_euclid(f.ell() as i64) as u32;
        Ok(SemiAffineMap { a, v, k })
    }

    pub fn identity(n: usize) -> SemiAffineMap {
        SemiAffineMap { a: Matrix::identity(n), v: vec![Fe::ZERO; n], k: 0 }
    }

    pub fn translation(v: Vec<Fe>) -> SemiAffineMap {
        SemiAffineMap { a: Matrix::identity(v.len()), v, k: 0 }
    }

    pub fn linear(f: &Field, a: Matrix) -> Result<SemiAffineMap> {
        let n = a.dim();
        SemiAffineMap::new(f, a, vec![Fe::ZERO; n], 0)
    }

    pub fn semilinear(f: &Field, a: Matrix, k: i64) -> Result<SemiAffineMap> {
        let n = a.dim();
        SemiAffineMap::new(f, a, vec![Fe::ZERO; n], k)
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn translation_part(&self) -> &[Fe] {
        &self.v
    }

    pub fn frobenius_exponent(&self) -> u32 {
        self.k
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.a.is_identity() && self.v.iter().all(|x| x.is_zero())
    }

    /// Image of a coordinate vector given as raw codes.
    #[inline]
    pub fn apply_codes(&self, f: &Field, u: &[u32], out: &mut [u32]) {
        let tw: Vec<u32> = u.iter().map(|&c| f.frobenius(Fe(c), self.k as i64).0).collect();
        self.a.mul_vec_codes(f, &tw, out);
        for (o, t) in out.iter_mut().zip(&self.v) {
            *o = f.add(Fe(*o), *t).0;
        }
    }

    pub fn apply_point(&self, f: &Field, u: &Point) -> Result<Point> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        let codes: Vec<u32> = u.0.iter().map(|c| c.0).collect();
        let mut out = vec![0; self.dim()];
        self.apply_codes(f, &codes, &mut out);
        Ok(Point(out.into_iter().map(Fe).collect()))
    }

    /// The linear part applied to a direction vector (no translation).
    fn apply_linear_codes(&self, f: &Field, u: &[u32], out: &mut [u32]) {
        let tw: Vec<u32> = u.iter().map(|&c| f.frobenius(Fe(c), self.k as i64).0).collect();
        self.a.mul_vec_codes(f, &tw, out);
    }

    /// `u -> self(h(u))`: `t(A_g A_h^{phi_g}, A_g v_h^{phi_g} + v_g, phi_h phi_g)`.
    pub fn compose(&self, f: &Field, h: &SemiAffineMap) -> Result<SemiAffineMap> {
        if self.dim() != h.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: h.dim() });
        }
        let kg = self.k as i64;
        let a = self.a.mul(f, &h.a.frobenius(f, kg));
        let vh: Vec<Fe> = h.v.iter().map(|&x| f.frobenius(x, kg)).collect();
        let v: Vec<Fe> = self.a.mul_vec(f, &vh).into_iter().zip(&self.v).map(|(x, &y)| f.add(x, y)).collect();
        let k = (self.k + h.k) % f.ell();
        Ok(SemiAffineMap { a, v, k })
    }

    /// `t((A^-1)^{phi^-1}, -(A^-1 v)^{phi^-1}, -k)`.
    pub fn inverse(&self, f: &Field) -> SemiAffineMap {
        let back = -(self.k as i64);
        let ainv = self.a.inverse(f).expect("maps are invertible");
        let w = ainv.mul_vec(f, &self.v);
        SemiAffineMap {
            a: ainv.frobenius(f, back),
            v: w.into_iter().map(|x| f.neg(f.frobenius(x, back))).collect(),
            k: (f.ell() - self.k) % f.ell(),
        }
    }
}

impl Serialize for SemiAffineMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SemiAffineMap", 3)?;
        st.serialize_field("A", &self.a.rows())?;
        st.serialize_field("v", &self.v.iter().map(|x| x.0).collect::<Vec<_>>())?;
        st.serialize_field("k", &self.k)?;
        st.end()
    }
}

/// Named constructors from the group catalogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum NamedGroup {
    Trivial { n: usize, q: u32 },
    Translations { n: usize, q: u32 },
    ASL { n: usize, q: u32 },
    AGL { n: usize, q: u32 },
    AGammaL { n: usize, q: u32 },
    /// AGL(1, q^n) or AGammaL(1, q^n) acting on AG(n, q) via F_{q^n} = F_q^n.
    AffineLine { n: usize, q: u32, frobenius: bool },
    /// Translations with `G_0 = SL(2, q) x| H`, `Lambda(H)` in standard form.
    SL2SemidirectH { q: u32, t: u32, e: u32, s: u32 },
    /// Translations with `G_0 = SL(2, p) x| <diag(1, l)>`.
    SL2pC { p: u32, l: u32 },
}

impl NamedGroup {
    pub fn label(&self) -> String {
        match self {
            NamedGroup::Trivial { n, q } => format!("1 on AG({n},{q})"),
            NamedGroup::Translations { n, q } => format!("T({n},{q})"),
            NamedGroup::ASL { n, q } => format!("ASL({n},{q})"),
            NamedGroup::AGL { n, q } => format!("AGL({n},{q})"),
            NamedGroup::AGammaL { n, q } => format!("AGammaL({n},{q})"),
            NamedGroup::AffineLine { n, q, frobenius } => {
                let v = q.pow(*n as u32);
                if *frobenius {
                    format!("AGammaL(1,{v}) on AG({n},{q})")
                } else {
                    format!("AGL(1,{v}) on AG({n},{q})")
                }
            }
            NamedGroup::SL2SemidirectH { q, t, e, s } => format!("SL(2,{q})xH({t},{e},{s})"),
            NamedGroup::SL2pC { p, l } => format!("SL(2,{p})x<C_{l}>"),
        }
    }
}

/// Permutations induced by one generator.
#[derive(Debug, Clone)]
struct GeneratorPerms {
    points: Vec<u32>,
    dirs: Vec<u32>,
    lines: Vec<u32>,
    flags: Vec<u32>,
}

/// A subgroup of AGammaL(n, q) given by generators.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    space: SpaceRef,
    generators: Vec<SemiAffineMap>,
    name: Option<NamedGroup>,
    perms: Vec<GeneratorPerms>,
}

/// Which index domain an orbit computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Points,
    Directions,
    Lines,
    Flags,
}

/// Something a group acts on by generator index.
pub trait Action<T> {
    fn num_generators(&self) -> usize;
    fn act(&self, generator: usize, x: &T) -> T;
}

impl GroupSpec {
    pub fn new(space: SpaceRef, generators: Vec<SemiAffineMap>) -> Result<GroupSpec> {
        let f = space.field();
        let n = space.dim();
        for g in &generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
            }
            if g.a.det(f).is_zero() {
                return Err(Error::Singular);
            }
        }
        let perms = generators.iter().map(|g| compute_perms(&space, g)).collect();
        Ok(GroupSpec { space, generators, name: None, perms })
    }

    pub fn with_name(mut self, name: NamedGroup) -> GroupSpec {
        self.name = Some(name);
        self
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn generators(&self) -> &[SemiAffineMap] {
        &self.generators
    }

    pub fn name(&self) -> Option<&NamedGroup> {
        self.name.as_ref()
    }

    pub fn label(&self) -> String {
        self.name.as_ref().map(NamedGroup::label).unwrap_or_else(|| format!("<{} generators>", self.generators.len()))
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// The image of index `x` in `domain` under generator `g`.
    #[inline]
    pub fn image(&self, domain: Domain, g: usize, x: u32) -> u32 {
        let p = &self.perms[g];
        match domain {
            Domain::Points => p.points[x as usize],
            Domain::Directions => p.dirs[x as usize],
            Domain::Lines => p.lines[x as usize],
            Domain::Flags => p.flags[x as usize],
        }
    }

    pub fn flag_perm(&self, g: usize) -> &[u32] {
        &self.perms[g].flags
    }

    pub fn point_perm(&self, g: usize) -> &[u32] {
        &self.perms[g].points
    }

    fn domain_size(&self, domain: Domain) -> usize {
        match domain {
            Domain::Points => self.space.num_points(),
            Domain::Directions => self.space.num_directions(),
            Domain::Lines => self.space.num_lines(),
            Domain::Flags => self.space.num_flags(),
        }
    }

    /// Orbit of an index in breadth-first order.
    pub fn orbit_indices(&self, domain: Domain, seed: u32) -> Vec<u32> {
        let size = self.domain_size(domain);
        let mut seen = vec![false; size];
        seen[seed as usize] = true;
        let mut out = vec![seed];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for g in 0..self.generators.len() {
                let y = self.image(domain, g, x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
        }
        out
    }

    /// Orbit of an ordered flag pair, as pair indices `a * F + b`, in BFS order.
    pub fn orbit_flag_pairs(&self, a: u32, b: u32, cap: usize) -> Result<Vec<(u32, u32)>> {
        let nf = self.space.num_flags();
        let mut seen = vec![0u64; (nf * nf).div_ceil(64)];
        let mark = |seen: &mut Vec<u64>, x: usize| -> bool {
            let (w, bit) = (x / 64, 1u64 << (x % 64));
            let fresh = seen[w] & bit == 0;
            seen[w] |= bit;
            fresh
        };
        mark(&mut seen, a as usize * nf + b as usize);
        let mut out = vec![(a, b)];
        let mut head = 0;
        while head < out.len() {
            let (x, y) = out[head];
            head += 1;
            for p in &self.perms {
                let (gx, gy) = (p.flags[x as usize], p.flags[y as usize]);
                if mark(&mut seen, gx as usize * nf + gy as usize) {
                    if out.len() >= cap {
                        return Err(Error::OrbitCapExceeded(cap));
                    }
                    out.push((gx, gy));
                }
            }
        }
        Ok(out)
    }

    pub fn is_transitive_on(&self, domain: Domain, subset: &[u32]) -> bool {
        match subset.first() {
            None => true,
            Some(&s) => {
                let orbit: HashSet<u32> = self.orbit_indices(domain, s).into_iter().collect();
                subset.iter().all(|x| orbit.contains(x))
            }
        }
    }

    /// Stabilizer of an object as a new group generated by Schreier generators.
    ///
    /// `act` gives the image of an object under a map; the transversal is built
    /// breadth-first from `seed`.
    pub fn stabilizer_by<T, F>(&self, seed: T, act: F, cap: usize) -> Result<GroupSpec>
    where
        T: Clone + Eq + Hash,
        F: Fn(&SemiAffineMap, &T) -> T,
    {
        let f = self.field();
        let mut transversal: HashMap<T, SemiAffineMap> = HashMap::new();
        let mut queue = VecDeque::new();
        transversal.insert(seed.clone(), SemiAffineMap::identity(self.space.dim()));
        queue.push_back(seed);
        let mut order = Vec::new();
        while let Some(x) = queue.pop_front() {
            order.push(x.clone());
            let ux = transversal[&x].clone();
            for g in &self.generators {
                let y = act(g, &x);
                if !transversal.contains_key(&y) {
                    if transversal.len() >= cap {
                        return Err(Error::OrbitCapExceeded(cap));
                    }
                    transversal.insert(y.clone(), g.compose(f, &ux)?);
                    queue.push_back(y);
                }
            }
        }
        let mut seen = HashSet::new();
        let mut gens = Vec::new();
        for x in &order {
            let ux = &transversal[x];
            for g in &self.generators {
                let y = act(g, x);
                let uy_inv = transversal[&y].inverse(f);
                let s = uy_inv.compose(f, &g.compose(f, ux)?)?;
                if !s.is_identity() && seen.insert(s.clone()) {
                    gens.push(s);
                }
            }
        }
        GroupSpec::new(self.space.clone(), gens)
    }

    pub fn stabilizer_of_point(&self, p: &Point) -> Result<GroupSpec> {
        let f = self.space.field().clone();
        self.stabilizer_by(p.clone(), |g, x| g.apply_point(&f, x).expect("dimension checked"), DEFAULT_ORBIT_CAP)
    }

    /// Pointwise stabilizer of two points.
    pub fn stabilizer_of_points(&self, a: &Point, b: &Point) -> Result<GroupSpec> {
        let s = &self.space;
        let pair = (s.point_index(a)?, s.point_index(b)?);
        self.stabilizer_by(pair, |g, &(x, y)| (self.map_point_index(g, x), self.map_point_index(g, y)), DEFAULT_ORBIT_CAP)
    }

    pub fn stabilizer_of_line(&self, l: &Line) -> Result<GroupSpec> {
        let li = self.space.line_index(l)?;
        self.stabilizer_by(li, |g, &x| self.map_line_index(g, x), DEFAULT_ORBIT_CAP)
    }

    pub fn stabilizer_of_flag(&self, fl: &Flag) -> Result<GroupSpec> {
        let fi = self.space.flag_index(fl)?;
        self.stabilizer_by(fi, |g, &x| self.map_flag_index(g, x), DEFAULT_ORBIT_CAP)
    }

    pub fn stabilizer_of_flag_index(&self, fi: u32) -> Result<GroupSpec> {
        self.stabilizer_by(fi, |g, &x| self.map_flag_index(g, x), DEFAULT_ORBIT_CAP)
    }

    pub fn stabilizer_of_point_index(&self, pi: u32) -> Result<GroupSpec> {
        self.stabilizer_by(pi, |g, &x| self.map_point_index(g, x), DEFAULT_ORBIT_CAP)
    }

    pub fn map_point_index(&self, g: &SemiAffineMap, x: u32) -> u32 {
        let s = &self.space;
        let mut out = vec![0; s.dim()];
        g.apply_codes(s.field(), s.coord_slice(x), &mut out);
        s.index_of_coords(&out)
    }

    fn map_direction_index(&self, g: &SemiAffineMap, d: u32) -> u32 {
        let s = &self.space;
        let mut out = vec![0; s.dim()];
        g.apply_linear_codes(s.field(), s.coord_slice(s.direction_point_index(d)), &mut out);
        s.direction_of_vector(s.index_of_coords(&out)).expect("linear part is invertible")
    }

    pub fn map_line_index(&self, g: &SemiAffineMap, l: u32) -> u32 {
        let (b, d) = self.space.line_parts(l);
        self.space.line_at(self.map_point_index(g, b), self.map_direction_index(g, d))
    }

    pub fn map_flag_index(&self, g: &SemiAffineMap, fl: u32) -> u32 {
        let (pt, d) = self.space.flag_parts(fl);
        self.space.flag_at(self.map_point_index(g, pt), self.map_direction_index(g, d))
    }

    pub fn apply_line(&self, g: &SemiAffineMap, l: &Line) -> Result<Line> {
        Ok(self.space.line(self.map_line_index(g, self.space.line_index(l)?)))
    }

    pub fn apply_flag(&self, g: &SemiAffineMap, fl: &Flag) -> Result<Flag> {
        Ok(self.space.flag(self.map_flag_index(g, self.space.flag_index(fl)?)))
    }

    /// All elements as point permutations, breadth-first from the identity.
    pub fn elements(&self, cap: usize) -> Result<Vec<Vec<u32>>> {
        let np = self.space.num_points();
        let id: Vec<u32> = (0..np as u32).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![id];
        let mut head = 0;
        while head < out.len() {
            let cur = out[head].clone();
            head += 1;
            for p in &self.perms {
                let next: Vec<u32> = cur.iter().map(|&x| p.points[x as usize]).collect();
                if !seen.contains(&next) {
                    if out.len() >= cap {
                        return Err(Error::OrbitCapExceeded(cap));
                    }
                    seen.insert(next.clone());
                    out.push(next);
                }
            }
        }
        Ok(out)
    }

    /// Group order by materialization (the action on points is faithful).
    pub fn order(&self, cap: usize) -> Result<usize> {
        Ok(self.elements(cap)?.len())
    }

    /// True when every generator lies in the subgroup generated by `other`.
    pub fn is_subgroup_of(&self, other: &GroupSpec, cap: usize) -> Result<bool> {
        let elems: HashSet<Vec<u32>> = other.elements(cap)?.into_iter().collect();
        Ok(self.perms.iter().all(|p| elems.contains(&p.points)))
    }

    /// Membership test by point permutation against a materialized group.
    pub fn contains(&self, g: &SemiAffineMap, cap: usize) -> Result<bool> {
        let perm: Vec<u32> = (0..self.space.num_points() as u32).map(|x| self.map_point_index(g, x)).collect();
        Ok(self.elements(cap)?.contains(&perm))
    }
}

impl Action<Point> for GroupSpec {
    fn num_generators(&self) -> usize {
        self.generators.len()
    }
    fn act(&self, g: usize, x: &Point) -> Point {
        let i = self.space.point_index(x).expect("point in space");
        self.space.point(self.perms[g].points[i as usize])
    }
}

impl Action<Line> for GroupSpec {
    fn num_generators(&self) -> usize {
        self.generators.len()
    }
    fn act(&self, g: usize, x: &Line) -> Line {
        let i = self.space.line_index(x).expect("line in space");
        self.space.line(self.perms[g].lines[i as usize])
    }
}

impl Action<Flag> for GroupSpec {
    fn num_generators(&self) -> usize {
        self.generators.len()
    }
    fn act(&self, g: usize, x: &Flag) -> Flag {
        let i = self.space.flag_index(x).expect("flag in space");
        self.space.flag(self.perms[g].flags[i as usize])
    }
}

impl Action<(Flag, Flag)> for GroupSpec {
    fn num_generators(&self) -> usize {
        self.generators.len()
    }
    fn act(&self, g: usize, x: &(Flag, Flag)) -> (Flag, Flag) {
        (self.act(g, &x.0), self.act(g, &x.1))
    }
}

/// Breadth-first closure of `seed` under the generators of `action`.
pub fn orbit<T, A>(action: &A, seed: T, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    A: Action<T> + ?Sized,
{
    let mut seen = HashSet::new();
    seen.insert(seed.clone());
    let mut out = vec![seed];
    let mut head = 0;
    while head < out.len() {
        let x = out[head].clone();
        head += 1;
        for g in 0..action.num_generators() {
            let y = action.act(g, &x);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return Err(Error::OrbitCapExceeded(cap));
                }
                out.push(y);
            }
        }
    }
    Ok(out)
}

/// True iff the orbit of `domain[0]` contains all of `domain`.
pub fn is_transitive<T, A>(action: &A, domain: &[T]) -> Result<bool>
where
    T: Clone + Eq + Hash,
    A: Action<T> + ?Sized,
{
    let Some(first) = domain.first() else {
        return Err(Error::InvalidParameters("empty domain".into()));
    };
    let orb: HashSet<T> = orbit(action, first.clone(), DEFAULT_ORBIT_CAP)?.into_iter().collect();
    Ok(domain.iter().all(|x| orb.contains(x)))
}

fn compute_perms(space: &AffineSpace, g: &SemiAffineMap) -> GeneratorPerms {
    let f = space.field();
    let n = space.dim();
    let mut buf = vec![0; n];
    let points: Vec<u32> = (0..space.num_points() as u32)
        .map(|x| {
            g.apply_codes(f, space.coord_slice(x), &mut buf);
            space.index_of_coords(&buf)
        })
        .collect();
    let dirs: Vec<u32> = (0..space.num_directions() as u32)
        .map(|d| {
            g.apply_linear_codes(f, space.coord_slice(space.direction_point_index(d)), &mut buf);
            space.direction_of_vector(space.index_of_coords(&buf)).expect("invertible")
        })
        .collect();
    let lines = (0..space.num_lines() as u32)
        .map(|l| {
            let (b, d) = space.line_parts(l);
            space.line_at(points[b as usize], dirs[d as usize])
        })
        .collect();
    let flags = (0..space.num_flags() as u32)
        .map(|fl| {
            let (pt, d) = space.flag_parts(fl);
            space.flag_at(points[pt as usize], dirs[d as usize])
        })
        .collect();
    GeneratorPerms { points, dirs, lines, flags }
}

/// An additive basis `1, w, ..., w^(ell-1)` of F_q over F_p.
fn additive_basis(f: &Field) -> Vec<Fe> {
    (0..f.ell() as i64).map(|j| f.omega_pow(j)).collect()
}

fn translation_generators(space: &AffineSpace) -> Vec<SemiAffineMap> {
    let n = space.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for b in additive_basis(space.field()) {
            let mut v = vec![Fe::ZERO; n];
            v[i] = b;
            out.push(SemiAffineMap::translation(v));
        }
    }
    out
}

fn sl_generators(space: &AffineSpace) -> Vec<SemiAffineMap> {
    let n = space.dim();
    let f = space.field();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for b in additive_basis(f) {
                out.push(SemiAffineMap::linear(f, Matrix::transvection(n, i, j, b)).expect("unipotent"));
            }
        }
    }
    out
}

/// `Q_u = diag(1, u)` as a semilinear map with Frobenius exponent `k`.
pub fn q_map(f: &Field, u: Fe, k: i64) -> Result<SemiAffineMap> {
    SemiAffineMap::semilinear(f, Matrix::diagonal(&[Fe::ONE, u]), k)
}

/// `A_{c,phi} = [[0, 1/c^phi], [c, 0]]` with Frobenius exponent `k`.
pub fn a_map(f: &Field, c: Fe, k: i64) -> Result<SemiAffineMap> {
    let cphi = f.frobenius(c, k);
    let m = Matrix::from_rows(vec![vec![Fe::ZERO, f.inv(cphi)?], vec![c, Fe::ZERO]])?;
    SemiAffineMap::semilinear(f, m, k)
}

/// `B_{c,phi} = [[-1, 1/c^phi], [0, c/c^phi]]`.
pub fn b_matrix(f: &Field, c: Fe, k: i64) -> Result<Matrix> {
    let cphi = f.frobenius(c, k);
    Matrix::from_rows(vec![vec![f.neg(Fe::ONE), f.inv(cphi)?], vec![Fe::ZERO, f.div(c, cphi)?]])
}

/// Builds a group from the catalogue.
pub fn named_group(kind: NamedGroup) -> Result<GroupSpec> {
    let bad = |m: String| Error::InvalidParameters(m);
    let (space, gens) = match &kind {
        NamedGroup::Trivial { n, q } => (AffineSpace::new(*n, Field::of_order(*q)?)?, Vec::new()),
        NamedGroup::Translations { n, q } => {
            let s = AffineSpace::new(*n, Field::of_order(*q)?)?;
            let g = translation_generators(&s);
            (s, g)
        }
        NamedGroup::ASL { n, q } | NamedGroup::AGL { n, q } | NamedGroup::AGammaL { n, q } => {
            let s = AffineSpace::new(*n, Field::of_order(*q)?)?;
            let f = s.field().clone();
            let mut g = translation_generators(&s);
            g.extend(sl_generators(&s));
            if !matches!(kind, NamedGroup::ASL { .. }) && f.order() > 2 {
                let mut d = vec![Fe::ONE; *n];
                d[0] = f.omega();
                g.push(SemiAffineMap::linear(&f, Matrix::diagonal(&d))?);
            }
            if matches!(kind, NamedGroup::AGammaL { .. }) && f.ell() > 1 {
                g.push(SemiAffineMap::semilinear(&f, Matrix::identity(*n), 1)?);
            }
            (s, g)
        }
        NamedGroup::AffineLine { n, q, frobenius } => affine_line_group(*n, *q, *frobenius)?,
        NamedGroup::SL2SemidirectH { q, t, e, s } => {
            let sp = AffineSpace::new(2, Field::of_order(*q)?)?;
            let f = sp.field().clone();
            let params = StandardParameters { t: *t, e: *e, s: *s };
            params.validate(&f)?;
            let mut g = translation_generators(&sp);
            g.extend(sl_generators(&sp));
            for el in params.generators(&f) {
                g.push(q_map(&f, el.a, el.k as i64)?);
            }
            (sp, g)
        }
        NamedGroup::SL2pC { p, l } => {
            let f = Field::of_order(*p)?;
            if f.ell() != 1 {
                return Err(bad(format!("{p} is not prime")));
            }
            if *l == 0 || *l >= *p {
                return Err(bad(format!("{l} is not a nonzero element of F_{p}")));
            }
            let sp = AffineSpace::new(2, f.clone())?;
            let mut g = translation_generators(&sp);
            g.extend(sl_generators(&sp));
            g.push(q_map(&f, Fe(*l), 0)?);
            (sp, g)
        }
    };
    Ok(GroupSpec::new(space, gens)?.with_name(kind))
}

/// An identification of F_{q^n} with F_q^n: coordinates in the basis `1, b, ..., b^(n-1)`.
pub struct FieldAsVectors {
    pub big: Field,
    pub small: Field,
    /// Embedding of small-field codes into the big field.
    pub embed: Vec<Fe>,
    /// Coordinates (small codes) of each big element.
    pub coords: Vec<Vec<u32>>,
}

impl FieldAsVectors {
    pub fn new(n: usize, q: u32) -> Result<FieldAsVectors> {
        let small = Field::of_order(q)?;
        let qq = (q as u64).pow(n as u32);
        let big = Field::new(small.p(), small.ell() * n as u32)?;
        if big.order() as u64 != qq {
            return Err(Error::InvalidParameters("size mismatch".into()));
        }
        let big_n = (big.order() - 1) as i64;
        let step = big_n / (q as i64 - 1).max(1);
        // find an additive (hence field) embedding w_small -> gamma
        let embed = if q == small.p() {
            (0..q).map(|c| big.from_int(c as i64)).collect::<Vec<_>>()
        } else {
            let mut found = None;
            for j in 1..(q as i64 - 1) {
                if crate::field::gcd(j as u32, q - 1) != 1 {
                    continue;
                }
                let gamma = big.omega_pow(step * j);
                let map: Vec<Fe> = (0..q)
                    .map(|c| if c == 0 { Fe::ZERO } else { big.pow(gamma, small.dlog(Fe(c)).unwrap() as u64) })
                    .collect();
                let additive = (0..q).all(|a| (0..q).all(|b| map[small.add(Fe(a), Fe(b)).0 as usize] == big.add(map[a as usize], map[b as usize])));
                if additive {
                    found = Some(map);
                    break;
                }
            }
            found.ok_or_else(|| Error::InternalMismatch("no subfield embedding".into()))?
        };
        let beta = big.omega();
        let powers: Vec<Fe> = (0..n as u64).map(|i| big.pow(beta, i)).collect();
        let mut coords = vec![Vec::new(); big.order() as usize];
        let total = qq as u32;
        for idx in 0..total {
            let mut c = vec![0u32; n];
            let mut r = idx;
            for slot in c.iter_mut().rev() {
                *slot = r % q;
                r /= q;
            }
            let z = c.iter().zip(&powers).fold(Fe::ZERO, |acc, (&ci, &bp)| big.add(acc, big.mul(embed[ci as usize], bp)));
            if !coords[z.0 as usize].is_empty() {
                return Err(Error::InternalMismatch("basis is not independent".into()));
            }
            coords[z.0 as usize] = c;
        }
        Ok(FieldAsVectors { big, small, embed, coords })
    }

    /// Matrix over F_q of the F_q-linear map with the given images of the basis.
    fn matrix_of(&self, images: &[Fe]) -> Matrix {
        let n = images.len();
        let mut entries = vec![Fe::ZERO; n * n];
        for (j, z) in images.iter().enumerate() {
            for (i, &c) in self.coords[z.0 as usize].iter().enumerate() {
                entries[i * n + j] = Fe(c);
            }
        }
        Matrix::from_entries(n, entries).expect("square")
    }

    /// Multiplication by `z` as a matrix.
    pub fn mult_matrix(&self, z: Fe) -> Matrix {
        let n = self.coords[0].len();
        let beta = self.big.omega();
        let images: Vec<Fe> = (0..n as u64).map(|i| self.big.mul(z, self.big.pow(beta, i))).collect();
        self.matrix_of(&images)
    }

    /// The map `z -> z^p` as `(M, 1)`: images of basis vectors `b^(i p)`.
    pub fn frobenius_matrix(&self) -> Matrix {
        let n = self.coords[0].len();
        let beta = self.big.omega();
        let p = self.big.p() as u64;
        let images: Vec<Fe> = (0..n as u64).map(|i| self.big.pow(beta, i * p)).collect();
        self.matrix_of(&images)
    }
}

fn affine_line_group(n: usize, q: u32, frobenius: bool) -> Result<(SpaceRef, Vec<SemiAffineMap>)> {
    let fv = FieldAsVectors::new(n, q)?;
    let space = AffineSpace::new(n, fv.small.clone())?;
    let f = space.field().clone();
    let mut gens = translation_generators(&space);
    if fv.big.order() > 2 {
        gens.push(SemiAffineMap::linear(&f, fv.mult_matrix(fv.big.omega()))?);
    }
    if frobenius && fv.big.ell() > 1 {
        gens.push(SemiAffineMap::semilinear(&f, fv.frobenius_matrix(), 1)?);
    }
    Ok((space, gens))
}

/// `g` factors as `t(S,0,id) t(Q_u,0,delta)` with `det S = 1` and `(u, delta)` in `Lambda(H)`.
pub fn membership_sl_h(f: &Field, g: &SemiAffineMap, lambda_h: &GammaL1) -> Result<bool> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.dim() });
    }
    if g.v.iter().any(|x| !x.is_zero()) {
        return Err(Error::InvalidShape);
    }
    let u = g.a.det(f);
    if !lambda_h.contains(u, g.k) {
        return Ok(false);
    }
    let qinv = Matrix::diagonal(&[Fe::ONE, f.inv(u)?]);
    Ok(g.a.mul(f, &qinv).det(f) == Fe::ONE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn compose_matches_pointwise_application() {
        for (n, q) in [(1usize, 4u32), (2, 4), (2, 9), (2, 3)] {
            let g = named_group(NamedGroup::AGammaL { n, q }).unwrap();
            let f = g.field().clone();
            let s = g.space().clone();
            let gens = g.generators();
            for a in gens {
                for b in gens {
                    let ab = a.compose(&f, b).unwrap();
                    for x in 0..s.num_points() as u32 {
                        let p = s.point(x);
                        let two_step = a.apply_point(&f, &b.apply_point(&f, &p).unwrap()).unwrap();
                        assert_eq!(ab.apply_point(&f, &p).unwrap(), two_step);
                    }
                    let inv = ab.inverse(&f);
                    assert!(inv.compose(&f, &ab).unwrap().is_identity());
                    assert!(ab.compose(&f, &inv).unwrap().is_identity());
                }
            }
        }
    }

    #[test]
    fn frobenius_square_in_gf4_line() {
        // t(w,0,theta) o t(w,0,theta): x -> w (w x^2)^2 = w^3 x^4 = x on GF(4)
        let f = gf(4);
        let w = f.omega();
        let g = SemiAffineMap::semilinear(&f, Matrix::diagonal(&[w]), 1).unwrap();
        let gg = g.compose(&f, &g).unwrap();
        for x in f.elements() {
            let p = Point(vec![x]);
            let two = g.apply_point(&f, &g.apply_point(&f, &p).unwrap()).unwrap();
            assert_eq!(gg.apply_point(&f, &p).unwrap(), two);
            assert_eq!(two, p);
        }
        assert!(gg.is_identity());
    }

    #[test]
    fn composition_basics() {
        let f = gf(5);
        let id = SemiAffineMap::identity(2);
        let h = SemiAffineMap::new(&f, Matrix::transvection(2, 0, 1, Fe(3)), vec![Fe(1), Fe(4)], 0).unwrap();
        assert_eq!(id.compose(&f, &h).unwrap(), h);
        let t1 = SemiAffineMap::translation(vec![Fe(1), Fe(2)]);
        let t2 = SemiAffineMap::translation(vec![Fe(4), Fe(4)]);
        assert_eq!(t1.compose(&f, &t2).unwrap(), SemiAffineMap::translation(vec![Fe(0), Fe(1)]));
        assert!(matches!(t1.compose(&f, &SemiAffineMap::identity(3)), Err(Error::DimensionMismatch { .. })));
        assert_eq!(SemiAffineMap::linear(&f, Matrix::diagonal(&[Fe(0), Fe(1)])), Err(Error::Singular));
    }

    #[test]
    fn translation_maps_axis_to_parallel() {
        let s = AffineSpace::new(2, gf(3)).unwrap();
        let g = GroupSpec::new(s.clone(), vec![SemiAffineMap::translation(vec![Fe(0), Fe(1)])]).unwrap();
        let axis = s.line_through(&Point::zero(2), &Point::unit(2, 1)).unwrap();
        let img = g.apply_line(&g.generators()[0], &axis).unwrap();
        assert_eq!(img.base, Point::unit(2, 2));
        assert_eq!(img.direction, Point::unit(2, 1));
    }

    #[test]
    fn line_images_match_point_images() {
        // 100 deterministic (g, L) pairs in AG(2,4): products of generators
        let g = named_group(NamedGroup::AGammaL { n: 2, q: 4 }).unwrap();
        let f = g.field().clone();
        let s = g.space().clone();
        let gens = g.generators();
        let mut m = SemiAffineMap::identity(2);
        for i in 0..100 {
            m = gens[(i * 7 + 3) % gens.len()].compose(&f, &m).unwrap();
            let l = (i * 13 % s.num_lines()) as u32;
            let img = g.map_line_index(&m, l);
            let mut pts: Vec<u32> = s.line_point_indices(l).into_iter().map(|x| g.map_point_index(&m, x)).collect();
            pts.sort_unstable();
            assert_eq!(pts, s.line_point_indices(img));
        }
    }

    #[test]
    fn identity_fixes_flags() {
        let g = named_group(NamedGroup::Trivial { n: 2, q: 3 }).unwrap();
        let s = g.space().clone();
        let id = SemiAffineMap::identity(2);
        for fl in s.all_flags().unwrap() {
            assert_eq!(g.apply_flag(&id, &fl).unwrap(), fl);
        }
    }

    #[test]
    fn orbit_examples() {
        let t = named_group(NamedGroup::Translations { n: 2, q: 3 }).unwrap();
        assert_eq!(orbit(&t, Point::zero(2), 100).unwrap().len(), 9);
        let asl = named_group(NamedGroup::ASL { n: 2, q: 3 }).unwrap();
        let s = asl.space().clone();
        let fl = s.all_flags().unwrap()[0].clone();
        assert_eq!(orbit(&asl, fl, 1000).unwrap().len(), 36);
        let triv = named_group(NamedGroup::Trivial { n: 2, q: 3 }).unwrap();
        let axis = s.line_through(&Point::zero(2), &Point::unit(2, 1)).unwrap();
        assert_eq!(orbit(&triv, axis, 10).unwrap().len(), 1);
        assert_eq!(orbit(&asl, Point::zero(2), 3), Err(Error::OrbitCapExceeded(3)));
    }

    #[test]
    fn named_group_orders() {
        assert_eq!(named_group(NamedGroup::ASL { n: 2, q: 3 }).unwrap().order(10_000).unwrap(), 216);
        assert_eq!(named_group(NamedGroup::AffineLine { n: 1, q: 4, frobenius: true }).unwrap().order(100).unwrap(), 24);
        assert_eq!(named_group(NamedGroup::AffineLine { n: 2, q: 2, frobenius: true }).unwrap().order(100).unwrap(), 24);
        assert_eq!(named_group(NamedGroup::AffineLine { n: 2, q: 2, frobenius: false }).unwrap().order(100).unwrap(), 12);
        assert_eq!(named_group(NamedGroup::AffineLine { n: 2, q: 4, frobenius: true }).unwrap().order(10_000).unwrap(), 960);
        assert_eq!(named_group(NamedGroup::AGL { n: 2, q: 2 }).unwrap().order(100).unwrap(), 24);
        assert_eq!(named_group(NamedGroup::AGammaL { n: 2, q: 4 }).unwrap().order(1_000_000).unwrap(), 16 * 180 * 2);
        let h = named_group(NamedGroup::SL2SemidirectH { q: 4, t: 1, e: 0, s: 1 }).unwrap();
        let g0 = h.stabilizer_of_point(&Point::zero(2)).unwrap();
        assert_eq!(g0.order(100_000).unwrap(), 60 * 6);
        assert!(matches!(
            named_group(NamedGroup::SL2SemidirectH { q: 4, t: 2, e: 0, s: 1 }),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn stabilizer_examples() {
        let asl = named_group(NamedGroup::ASL { n: 2, q: 3 }).unwrap();
        let g0 = asl.stabilizer_of_point(&Point::zero(2)).unwrap();
        assert_eq!(g0.order(1000).unwrap(), 24);
        for g in g0.generators() {
            assert_eq!(g.translation_part(), &[Fe::ZERO, Fe::ZERO]);
            assert_eq!(g.matrix().det(asl.field()), Fe::ONE);
        }
        let t = named_group(NamedGroup::Translations { n: 2, q: 3 }).unwrap();
        assert_eq!(t.stabilizer_of_point(&Point::zero(2)).unwrap().order(10).unwrap(), 1);
        let s = asl.space().clone();
        let fl = s.all_flags().unwrap()[0].clone();
        let stab = asl.stabilizer_of_flag(&fl).unwrap();
        assert_eq!(stab.order(1000).unwrap() * 36, 216);
    }

    #[test]
    fn orbit_stabilizer_recount() {
        let groups = [
            named_group(NamedGroup::ASL { n: 2, q: 3 }).unwrap(),
            named_group(NamedGroup::AffineLine { n: 1, q: 16, frobenius: true }).unwrap(),
            named_group(NamedGroup::AGL { n: 2, q: 2 }).unwrap(),
        ];
        for g in &groups {
            let order = g.order(100_000).unwrap();
            let s = g.space().clone();
            for x in [0u32, 1, (s.num_points() - 1) as u32] {
                let orb = g.orbit_indices(Domain::Points, x).len();
                let stab = g.stabilizer_of_point_index(x).unwrap().order(100_000).unwrap();
                assert_eq!(orb * stab, order, "{}", g.label());
            }
            for l in [0u32, (s.num_lines() - 1) as u32] {
                let orb = g.orbit_indices(Domain::Lines, l).len();
                let stab = g.stabilizer_by(l, |m, &x| g.map_line_index(m, x), 1_000_000).unwrap().order(100_000).unwrap();
                assert_eq!(orb * stab, order);
            }
        }
    }

    #[test]
    fn transitivity_examples() {
        let t = named_group(NamedGroup::Translations { n: 2, q: 3 }).unwrap();
        let s = t.space().clone();
        let pts: Vec<Point> = (0..9).map(|i| s.point(i)).collect();
        assert!(is_transitive(&t, &pts).unwrap());
        let triv = named_group(NamedGroup::Trivial { n: 2, q: 3 }).unwrap();
        assert!(!is_transitive(&triv, &pts).unwrap());

        let g = named_group(NamedGroup::AGammaL { n: 2, q: 4 }).unwrap();
        let s = g.space().clone();
        let y = s.line_through(&Point::zero(2), &Point::unit(2, 2)).unwrap();
        let fl = s.make_flag(&Point::zero(2), &y).unwrap();
        let stab = g.stabilizer_of_flag(&fl).unwrap();
        let yi = s.line_index(&y).unwrap();
        let off: Vec<Point> = (0..16).filter(|&x| !s.on_line(x, yi)).map(|x| s.point(x)).collect();
        assert_eq!(off.len(), 12);
        assert!(is_transitive(&stab, &off).unwrap());
    }

    #[test]
    fn membership_examples() {
        let f = gf(4);
        let full = GammaL1::from_standard(&f, StandardParameters { t: 1, e: 0, s: 1 }).unwrap();
        assert!(membership_sl_h(&f, &SemiAffineMap::identity(2), &full).unwrap());
        let sub = GammaL1::from_standard(&f, StandardParameters { t: 3, e: 0, s: 2 }).unwrap();
        let s = SemiAffineMap::linear(&f, Matrix::transvection(2, 0, 1, Fe(3))).unwrap();
        assert!(membership_sl_h(&f, &s, &sub).unwrap());
        for c in f.elements().skip(1) {
            let a = a_map(&f, c, 0).unwrap();
            assert_eq!(a.matrix().det(&f), Fe::ONE);
            assert!(membership_sl_h(&f, &a, &sub).unwrap());
        }
        let tr = SemiAffineMap::translation(vec![Fe(1), Fe(0)]);
        assert_eq!(membership_sl_h(&f, &tr, &full), Err(Error::InvalidShape));
        // diag(w, 1) has det w, not in the trivial Lambda(H)
        let d = SemiAffineMap::linear(&f, Matrix::diagonal(&[f.omega(), Fe::ONE])).unwrap();
        assert!(!membership_sl_h(&f, &d, &sub).unwrap());
    }

    #[test]
    fn membership_agrees_with_materialized_group() {
        let f = gf(9);
        for (t, e, s) in [(1, 0, 1), (2, 0, 1), (4, 0, 2), (8, 0, 1), (2, 1, 1)] {
            let params = StandardParameters { t, e, s };
            if params.validate(&f).is_err() {
                continue;
            }
            let g = named_group(NamedGroup::SL2SemidirectH { q: 9, t, e, s }).unwrap();
            let g0 = g.stabilizer_of_point(&Point::zero(2)).unwrap();
            let elems: HashSet<Vec<u32>> = g0.elements(1_000_000).unwrap().into_iter().collect();
            let lam = GammaL1::from_standard(&f, params).unwrap();
            for c in f.elements().skip(1) {
                for k in 0..2 {
                    let a = a_map(&f, c, k).unwrap();
                    let perm: Vec<u32> = (0..81).map(|x| g.map_point_index(&a, x)).collect();
                    assert_eq!(membership_sl_h(&f, &a, &lam).unwrap(), elems.contains(&perm));
                }
            }
        }
    }
}

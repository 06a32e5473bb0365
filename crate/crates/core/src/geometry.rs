//! Points, lines and flags of AG(n, q).
//!
//! Every object has a value form ([`Point`], [`Line`], [`Flag`]) and a dense
//! index inside an [`AffineSpace`]. Indices follow the canonical orders:
//! points by their coordinate code sequence, lines by `(base, direction)`,
//! flags point-major then by line. Hot loops work on indices only.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

/// Default cap on the number of points `q^n`.
pub const DEFAULT_POINT_CAP: u64 = 1 << 16;
/// Default cap on the number of flags.
pub const DEFAULT_FLAG_CAP: u64 = 1 << 21;

/// A column vector of F_q^n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<Fe>);

impl Point {
    pub fn zero(n: usize) -> Point {
        Point(vec![Fe::ZERO; n])
    }

    /// The standard basis vector `e_i` (1-based).
    pub fn unit(n: usize, i: usize) -> Point {
        let mut v = vec![Fe::ZERO; n];
        v[i - 1] = Fe::ONE;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A line `<direction> + base` in canonical form: the direction has leading
/// coordinate 1 and the base is the least point on the line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    pub base: Point,
    pub direction: Point,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.base, self.direction)
    }
}

/// An incident point-line pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flag {
    pub point: Point,
    pub line: Line,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.point, self.line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LineRelation {
    Equal,
    Intersecting,
    Parallel,
    Skew,
}

/// AG(n, q) with all incidence tables precomputed.
#[derive(Debug)]
pub struct AffineSpace {
    field: Arc<Field>,
    n: usize,
    q: u32,
    npoints: u32,
    /// Row-major coordinates, `n` per point.
    coords: Vec<u32>,
    /// Point index of each normalized direction, ascending.
    dirs: Vec<u32>,
    /// Direction index of each nonzero vector (`u32::MAX` for zero).
    dir_of_vector: Vec<u32>,
    /// `(base, direction)` per line, in canonical order.
    lines: Vec<(u32, u32)>,
    /// Line through `point` with direction `d`, at `point * ndirs + d`.
    line_of: Vec<u32>,
    /// `(point, direction)` per flag, in canonical order.
    flags: Vec<(u32, u32)>,
    /// Flag index at `point * ndirs + d`.
    flag_of: Vec<u32>,
}

pub type SpaceRef = Arc<AffineSpace>;

impl AffineSpace {
    pub fn new(n: usize, field: Field) -> Result<SpaceRef> {
        AffineSpace::with_caps(n, Arc::new(field), DEFAULT_POINT_CAP, DEFAULT_FLAG_CAP)
    }

    pub fn shared(n: usize, field: Arc<Field>) -> Result<SpaceRef> {
        AffineSpace::with_caps(n, field, DEFAULT_POINT_CAP, DEFAULT_FLAG_CAP)
    }

    /// Builds AG(n, q) for `n >= 1`, enforcing the point and flag caps.
    pub fn with_caps(n: usize, field: Arc<Field>, point_cap: u64, flag_cap: u64) -> Result<SpaceRef> {
        if n == 0 {
            return Err(Error::InvalidParameters("dimension must be positive".into()));
        }
        let q = field.order();
        let npoints64 = (q as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if npoints64 > point_cap {
            return Err(Error::SizeCapExceeded { what: "points", size: npoints64, cap: point_cap });
        }
        let ndirs64 = (npoints64 - 1) / (q as u64 - 1);
        if npoints64 * ndirs64 > flag_cap {
            return Err(Error::SizeCapExceeded { what: "flags", size: npoints64 * ndirs64, cap: flag_cap });
        }
        let npoints = npoints64 as u32;

        let mut coords = Vec::with_capacity(npoints as usize * n);
        for idx in 0..npoints {
            let mut c = vec![0u32; n];
            let mut r = idx;
            for slot in c.iter_mut().rev() {
                *slot = r % q;
                r /= q;
            }
            coords.extend(c);
        }

        let mut space = AffineSpace {
            field,
            n,
            q,
            npoints,
            coords,
            dirs: Vec::new(),
            dir_of_vector: vec![u32::MAX; npoints as usize],
            lines: Vec::new(),
            line_of: Vec::new(),
            flags: Vec::new(),
            flag_of: Vec::new(),
        };

        // normalized directions: leading nonzero coordinate is 1
        for idx in 1..npoints {
            let c = space.coord_slice(idx);
            if c.iter().find(|&&x| x != 0) == Some(&1) {
                space.dirs.push(idx);
            }
        }
        let ndirs = space.dirs.len();
        debug_assert_eq!(ndirs as u64, ndirs64);
        for (d, &di) in space.dirs.clone().iter().enumerate() {
            let dv = space.point(di);
            for a in space.field.elements().skip(1) {
                let w = space.scale(a, &dv);
                let wi = space.index_unchecked(&w) as usize;
                space.dir_of_vector[wi] = d as u32;
            }
        }

        // lines: for each direction, the parallel class; the base is the least point
        let mut base_of = vec![u32::MAX; npoints as usize * ndirs];
        for (d, &di) in space.dirs.iter().enumerate() {
            let dv = space.point(di);
            for idx in 0..npoints {
                let slot = idx as usize * ndirs + d;
                if base_of[slot] != u32::MAX {
                    continue;
                }
                let u = space.point(idx);
                let members: Vec<u32> = space
                    .field
                    .elements()
                    .map(|a| space.index_unchecked(&space.axpy(a, &dv, &u)))
                    .collect();
                let base = *members.iter().min().unwrap();
                for &m in &members {
                    base_of[m as usize * ndirs + d] = base;
                }
            }
        }
        let mut lines: Vec<(u32, u32)> = (0..npoints as usize * ndirs)
            .filter(|&slot| base_of[slot] == (slot / ndirs) as u32)
            .map(|slot| ((slot / ndirs) as u32, (slot % ndirs) as u32))
            .collect();
        lines.sort_unstable();
        let mut line_index = std::collections::HashMap::with_capacity(lines.len());
        for (i, l) in lines.iter().enumerate() {
            line_index.insert(*l, i as u32);
        }
        space.line_of = (0..npoints as usize * ndirs)
            .map(|slot| line_index[&(base_of[slot], (slot % ndirs) as u32)])
            .collect();
        space.lines = lines;

        let mut flags: Vec<(u32, u32, u32)> = (0..npoints)
            .flat_map(|pt| (0..ndirs as u32).map(move |d| (pt, d)))
            .map(|(pt, d)| (pt, space.line_of[pt as usize * ndirs + d as usize], d))
            .collect();
        flags.sort_unstable();
        space.flag_of = vec![0; npoints as usize * ndirs];
        for (i, &(pt, _, d)) in flags.iter().enumerate() {
            space.flag_of[pt as usize * ndirs + d as usize] = i as u32;
        }
        space.flags = flags.into_iter().map(|(pt, _, d)| (pt, d)).collect();

        Ok(Arc::new(space))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_ref(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn num_points(&self) -> usize {
        self.npoints as usize
    }

    /// Number of parallel classes, `(q^n - 1)/(q - 1)`; also the number of lines per point.
    #[inline]
    pub fn num_directions(&self) -> usize {
        self.dirs.len()
    }

    #[inline]
    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    #[inline]
    pub fn num_flags(&self) -> usize {
        self.flags.len()
    }

    #[inline]
    pub fn coord_slice(&self, idx: u32) -> &[u32] {
        let s = idx as usize * self.n;
        &self.coords[s..s + self.n]
    }

    pub fn point(&self, idx: u32) -> Point {
        Point(self.coord_slice(idx).iter().map(|&c| Fe(c)).collect())
    }

    #[inline]
    fn index_unchecked(&self, p: &Point) -> u32 {
        p.0.iter().fold(0u32, |acc, c| acc * self.q + c.0)
    }

    pub fn point_index(&self, p: &Point) -> Result<u32> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.dim() });
        }
        if p.0.iter().any(|c| c.0 >= self.q) {
            return Err(Error::InvalidParameters(format!("{p} has coordinates outside GF({})", self.q)));
        }
        Ok(self.index_unchecked(p))
    }

    /// Index of a point from raw coordinate codes.
    #[inline]
    pub fn index_of_coords(&self, c: &[u32]) -> u32 {
        c.iter().fold(0u32, |acc, &x| acc * self.q + x)
    }

    fn scale(&self, a: Fe, v: &Point) -> Point {
        Point(v.0.iter().map(|&x| self.field.mul(a, x)).collect())
    }

    /// `a*x + u`.
    fn axpy(&self, a: Fe, x: &Point, u: &Point) -> Point {
        Point(x.0.iter().zip(&u.0).map(|(&xi, &ui)| self.field.add(self.field.mul(a, xi), ui)).collect())
    }

    pub fn sub_points(&self, a: &Point, b: &Point) -> Point {
        Point(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.sub(x, y)).collect())
    }

    pub fn add_points(&self, a: &Point, b: &Point) -> Point {
        Point(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.add(x, y)).collect())
    }

    /// Direction index of a nonzero vector given by its point index.
    #[inline]
    pub fn direction_of_vector(&self, idx: u32) -> Option<u32> {
        let d = self.dir_of_vector[idx as usize];
        (d != u32::MAX).then_some(d)
    }

    /// The normalized direction vector with index `d`.
    pub fn direction(&self, d: u32) -> Point {
        self.point(self.dirs[d as usize])
    }

    pub fn direction_point_index(&self, d: u32) -> u32 {
        self.dirs[d as usize]
    }

    /// `(base, direction)` of a line.
    #[inline]
    pub fn line_parts(&self, l: u32) -> (u32, u32) {
        self.lines[l as usize]
    }

    #[inline]
    pub fn line_direction(&self, l: u32) -> u32 {
        self.lines[l as usize].1
    }

    /// The line through a point with a given direction.
    #[inline]
    pub fn line_at(&self, point: u32, dir: u32) -> u32 {
        self.line_of[point as usize * self.dirs.len() + dir as usize]
    }

    #[inline]
    pub fn on_line(&self, point: u32, line: u32) -> bool {
        self.line_at(point, self.line_direction(line)) == line
    }

    pub fn line(&self, l: u32) -> Line {
        let (b, d) = self.lines[l as usize];
        Line { base: self.point(b), direction: self.direction(d) }
    }

    pub fn line_index(&self, l: &Line) -> Result<u32> {
        let b = self.point_index(&l.base)?;
        let dv = self.point_index(&l.direction)?;
        let d = self.direction_of_vector(dv).ok_or(Error::InvalidParameters("zero direction".into()))?;
        let li = self.line_at(b, d);
        if self.line(li) != *l {
            return Err(Error::InvalidParameters(format!("{l} is not in canonical form")));
        }
        Ok(li)
    }

    /// The q point indices of a line, ascending.
    pub fn line_point_indices(&self, l: u32) -> Vec<u32> {
        let (b, d) = self.lines[l as usize];
        let base = self.point(b);
        let dv = self.direction(d);
        let mut pts: Vec<u32> = self
            .field
            .elements()
            .map(|a| self.index_unchecked(&self.axpy(a, &dv, &base)))
            .collect();
        pts.sort_unstable();
        pts
    }

    pub fn line_points(&self, l: &Line) -> Result<Vec<Point>> {
        let li = self.line_index(l)?;
        Ok(self.line_point_indices(li).into_iter().map(|i| self.point(i)).collect())
    }

    /// Index of the line through two distinct points.
    pub fn line_through_indices(&self, u: u32, v: u32) -> Result<u32> {
        if u == v {
            return Err(Error::CoincidentPoints);
        }
        let diff = self.sub_points(&self.point(v), &self.point(u));
        let d = self.dir_of_vector[self.index_unchecked(&diff) as usize];
        Ok(self.line_at(u, d))
    }

    pub fn line_through(&self, u: &Point, v: &Point) -> Result<Line> {
        let ui = self.point_index(u)?;
        let vi = self.point_index(v)?;
        Ok(self.line(self.line_through_indices(ui, vi)?))
    }

    pub fn all_lines(&self) -> Result<Vec<Line>> {
        self.require_plane()?;
        Ok((0..self.num_lines() as u32).map(|l| self.line(l)).collect())
    }

    pub fn all_flags(&self) -> Result<Vec<Flag>> {
        self.require_plane()?;
        Ok((0..self.num_flags() as u32).map(|f| self.flag(f)).collect())
    }

    fn require_plane(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameters(format!("AG({}, q) has a single line; need n >= 2", self.n)));
        }
        Ok(())
    }

    /// `(point, direction)` of a flag.
    #[inline]
    pub fn flag_parts(&self, f: u32) -> (u32, u32) {
        self.flags[f as usize]
    }

    #[inline]
    pub fn flag_point(&self, f: u32) -> u32 {
        self.flags[f as usize].0
    }

    #[inline]
    pub fn flag_line(&self, f: u32) -> u32 {
        let (pt, d) = self.flags[f as usize];
        self.line_at(pt, d)
    }

    #[inline]
    pub fn flag_at(&self, point: u32, dir: u32) -> u32 {
        self.flag_of[point as usize * self.dirs.len() + dir as usize]
    }

    pub fn flag(&self, f: u32) -> Flag {
        let (pt, _) = self.flags[f as usize];
        Flag { point: self.point(pt), line: self.line(self.flag_line(f)) }
    }

    pub fn make_flag(&self, point: &Point, line: &Line) -> Result<Flag> {
        let pi = self.point_index(point)?;
        let li = self.line_index(line)?;
        if !self.on_line(pi, li) {
            return Err(Error::NotIncident);
        }
        Ok(Flag { point: point.clone(), line: line.clone() })
    }

    pub fn flag_index(&self, f: &Flag) -> Result<u32> {
        let pi = self.point_index(&f.point)?;
        let li = self.line_index(&f.line)?;
        if !self.on_line(pi, li) {
            return Err(Error::NotIncident);
        }
        Ok(self.flag_at(pi, self.line_direction(li)))
    }

    pub fn flag_label(&self, f: u32) -> String {
        self.flag(f).to_string()
    }

    /// Parses `point|base;direction` back to a flag index.
    pub fn parse_flag_label(&self, s: &str) -> Result<u32> {
        let bad = || Error::Parse(format!("not a flag label: {s:?}"));
        let (pt, line) = s.split_once('|').ok_or_else(bad)?;
        let (base, dir) = line.split_once(';').ok_or_else(bad)?;
        let parse_point = |t: &str| -> Result<Point> {
            t.split(',')
                .map(|c| c.trim().parse::<u32>().map(Fe).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Point)
        };
        let flag = Flag {
            point: parse_point(pt)?,
            line: Line { base: parse_point(base)?, direction: parse_point(dir)? },
        };
        self.flag_index(&flag).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }

    /// Common point of two lines with different directions, if any.
    pub fn intersection(&self, l: u32, m: u32) -> Option<u32> {
        let dm = self.line_direction(m);
        if self.line_direction(l) == dm {
            return None;
        }
        self.line_point_indices(l).into_iter().find(|&pt| self.line_at(pt, dm) == m)
    }

    pub fn classify_indices(&self, l: u32, m: u32) -> LineRelation {
        if l == m {
            LineRelation::Equal
        } else if self.line_direction(l) == self.line_direction(m) {
            LineRelation::Parallel
        } else if self.intersection(l, m).is_some() {
            LineRelation::Intersecting
        } else {
            LineRelation::Skew
        }
    }

    pub fn classify(&self, l: &Line, m: &Line) -> Result<LineRelation> {
        Ok(self.classify_indices(self.line_index(l)?, self.line_index(m)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn space(n: usize, q: u32) -> SpaceRef {
        AffineSpace::new(n, Field::of_order(q).unwrap()).unwrap()
    }

    /// Oracle: all lines as point sets, by enumerating point pairs.
    fn brute_lines(s: &AffineSpace) -> BTreeSet<Vec<u32>> {
        let f = s.field();
        let mut out = BTreeSet::new();
        for u in 0..s.num_points() as u32 {
            for v in u + 1..s.num_points() as u32 {
                let pu = s.point(u);
                let diff = s.sub_points(&s.point(v), &pu);
                let mut pts: Vec<u32> = f
                    .elements()
                    .map(|a| s.index_of_coords(&s.add_points(&pu, &s.scale(a, &diff)).0.iter().map(|c| c.0).collect::<Vec<_>>()))
                    .collect();
                pts.sort_unstable();
                out.insert(pts);
            }
        }
        out
    }

    #[test]
    fn line_counts_match_enumeration() {
        for (n, q, expected) in [(2, 2, 6), (2, 3, 12), (3, 2, 28), (2, 4, 20), (3, 3, 117)] {
            let s = space(n, q);
            let brute = brute_lines(&s);
            assert_eq!(brute.len(), expected);
            assert_eq!(s.num_lines(), expected);
            let ours: BTreeSet<Vec<u32>> = (0..s.num_lines() as u32).map(|l| s.line_point_indices(l)).collect();
            assert_eq!(ours, brute);
        }
    }

    #[test]
    fn flag_counts() {
        assert_eq!(space(2, 2).all_flags().unwrap().len(), 12);
        assert_eq!(space(2, 3).all_flags().unwrap().len(), 36);
        assert_eq!(space(3, 2).all_flags().unwrap().len(), 56);
    }

    #[test]
    fn flags_are_sorted_point_major() {
        let s = space(2, 3);
        let flags = s.all_flags().unwrap();
        for w in flags.windows(2) {
            assert!((&w[0].point, &w[0].line) < (&w[1].point, &w[1].line));
        }
        for (i, f) in flags.iter().enumerate() {
            assert_eq!(s.flag_index(f).unwrap(), i as u32);
        }
    }

    #[test]
    fn axis_line_through_origin() {
        let s = space(2, 3);
        let l = s.line_through(&Point::zero(2), &Point::unit(2, 1)).unwrap();
        let pts = s.line_points(&l).unwrap();
        assert_eq!(pts.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["0,0", "1,0", "2,0"]);
        assert_eq!(pts[0], l.base);
    }

    #[test]
    fn translate_of_axis() {
        let s = space(2, 2);
        let e2 = Point::unit(2, 2);
        let e12 = Point(vec![Fe(1), Fe(1)]);
        let l = s.line_through(&e2, &e12).unwrap();
        assert_eq!(l.direction, Point::unit(2, 1));
        assert_eq!(l.base, e2);
        assert_eq!(s.line_through(&e12, &e2).unwrap(), l);
        assert_eq!(s.line_through(&e2, &e2), Err(Error::CoincidentPoints));
    }

    #[test]
    fn line_points_gf4() {
        let s = space(2, 4);
        for l in s.all_lines().unwrap() {
            let pts = s.line_points(&l).unwrap();
            let set: BTreeSet<_> = pts.iter().cloned().collect();
            assert_eq!(set.len(), 4);
            assert_eq!(pts[0], l.base);
            for p in &pts {
                let li = s.line_index(&l).unwrap();
                assert!(s.on_line(s.point_index(p).unwrap(), li));
            }
        }
    }

    #[test]
    fn classify_examples() {
        let s = space(2, 3);
        let o = Point::zero(2);
        let e1 = Point::unit(2, 1);
        let e2 = Point::unit(2, 2);
        let x = s.line_through(&o, &e1).unwrap();
        let y = s.line_through(&o, &e2).unwrap();
        let x2 = s.line_through(&e2, &s.add_points(&e1, &e2)).unwrap();
        assert_eq!(s.classify(&x, &y).unwrap(), LineRelation::Intersecting);
        assert_eq!(s.classify(&x, &x2).unwrap(), LineRelation::Parallel);
        assert_eq!(s.classify(&x, &x).unwrap(), LineRelation::Equal);

        let s3 = space(3, 2);
        let o = Point::zero(3);
        let a = s3.line_through(&o, &Point::unit(3, 1)).unwrap();
        let e3 = Point::unit(3, 3);
        let b = s3.line_through(&e3, &s3.add_points(&e3, &Point::unit(3, 2))).unwrap();
        // brute force: no common point, different directions
        let pa: BTreeSet<_> = s3.line_points(&a).unwrap().into_iter().collect();
        let pb: BTreeSet<_> = s3.line_points(&b).unwrap().into_iter().collect();
        assert!(pa.is_disjoint(&pb));
        assert_ne!(a.direction, b.direction);
        assert_eq!(s3.classify(&a, &b).unwrap(), LineRelation::Skew);
    }

    #[test]
    fn dimension_mismatch() {
        let s = space(2, 3);
        let l3 = space(3, 3).all_lines().unwrap()[0].clone();
        let l2 = s.all_lines().unwrap()[0].clone();
        assert!(matches!(s.classify(&l2, &l3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn linear_space_axioms_exhaustive() {
        // q^n <= 512
        for (n, q) in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 7), (2, 8), (3, 2), (3, 3), (4, 2), (2, 9)] {
            let s = space(n, q);
            let lines: Vec<Vec<u32>> = (0..s.num_lines() as u32).map(|l| s.line_point_indices(l)).collect();
            let np = s.num_points();
            let mut cover = vec![0u32; np * np];
            let mut through = vec![0usize; np];
            for pts in &lines {
                for &a in pts {
                    through[a as usize] += 1;
                    for &b in pts {
                        if a != b {
                            cover[a as usize * np + b as usize] += 1;
                        }
                    }
                }
            }
            for a in 0..np {
                assert_eq!(through[a], s.num_directions());
                for b in 0..np {
                    if a != b {
                        assert_eq!(cover[a * np + b], 1, "AG({n},{q}) pair {a},{b}");
                    }
                }
            }
            let qn = (q as usize).pow(n as u32);
            assert_eq!(s.num_directions(), (qn - 1) / (q as usize - 1));
        }
    }

    #[test]
    fn classification_matches_coplanarity_oracle() {
        for (n, q) in [(2, 3), (3, 2), (3, 3), (2, 4), (4, 2)] {
            let s = space(n, q);
            let pts: Vec<BTreeSet<u32>> = (0..s.num_lines() as u32).map(|l| s.line_point_indices(l).into_iter().collect()).collect();
            for l in 0..s.num_lines() as u32 {
                for m in 0..s.num_lines() as u32 {
                    let rel = s.classify_indices(l, m);
                    assert_eq!(rel, s.classify_indices(m, l));
                    let common = pts[l as usize].intersection(&pts[m as usize]).count();
                    // coplanar iff the four spanning vectors have rank <= 2 (affine span dim <= 2)
                    let coplanar = affine_span_dim(&s, &pts[l as usize], &pts[m as usize]) <= 2;
                    let expected = if l == m {
                        LineRelation::Equal
                    } else if common == 1 {
                        LineRelation::Intersecting
                    } else if common == 0 && coplanar {
                        LineRelation::Parallel
                    } else {
                        LineRelation::Skew
                    };
                    assert_eq!(rel, expected);
                    if n == 2 {
                        assert_ne!(rel, LineRelation::Skew);
                    }
                }
            }
        }
    }

    /// Dimension of the affine span of the union of two point sets, by brute Gaussian elimination.
    fn affine_span_dim(s: &AffineSpace, a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> usize {
        let f = s.field();
        let all: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
        let origin = s.point(all[0]);
        let mut rows: Vec<Vec<Fe>> = all[1..].iter().map(|&p| s.sub_points(&s.point(p), &origin).0).collect();
        let mut rank = 0;
        for col in 0..s.dim() {
            if let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) {
                rows.swap(rank, piv);
                let inv = f.inv(rows[rank][col]).unwrap();
                let pivot_row: Vec<Fe> = rows[rank].iter().map(|&x| f.mul(x, inv)).collect();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && !row[col].is_zero() {
                        let k = row[col];
                        for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                            *x = f.sub(*x, f.mul(k, pv));
                        }
                    }
                }
                rows[rank] = pivot_row;
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn labels_round_trip() {
        let s = space(3, 2);
        for f in 0..s.num_flags() as u32 {
            let label = s.flag_label(f);
            assert_eq!(s.parse_flag_label(&label).unwrap(), f);
        }
        assert_eq!(s.point(1).to_string(), "0,0,1");
        assert!(s.parse_flag_label("a|b").is_err());
    }
}

//! The semilinear group ΓL(1,q) acting on F_q, its subgroups and their standard form.
//!
//! An element `(a, k)` acts as `y -> a * y^(p^k)`. The generator written
//! `θ^s ω̂^e` is the element `(ω^e, s)`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GammaL1Element {
    pub a: Fe,
    pub k: u32,
}

impl GammaL1Element {
    pub fn new(f: &Field, a: Fe, k: i64) -> Result<GammaL1Element> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(GammaL1Element { a, k: k.rem_euclid(f.ell() as i64) as u32 })
    }

    pub fn identity() -> GammaL1Element {
        GammaL1Element { a: Fe::ONE, k: 0 }
    }

    /// `ω̂^e`.
    pub fn omega_hat(f: &Field, e: i64) -> GammaL1Element {
        GammaL1Element { a: f.omega_pow(e), k: 0 }
    }

    /// `θ^s`.
    pub fn theta(f: &Field, s: i64) -> GammaL1Element {
        GammaL1Element { a: Fe::ONE, k: s.rem_euclid(f.ell() as i64) as u32 }
    }

    pub fn apply(&self, f: &Field, y: Fe) -> Fe {
        f.mul(self.a, f.frobenius(y, self.k as i64))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, f: &Field, other: &GammaL1Element) -> GammaL1Element {
        GammaL1Element {
            a: f.mul(self.a, f.frobenius(other.a, self.k as i64)),
            k: (self.k + other.k) % f.ell(),
        }
    }

    pub fn inverse(&self, f: &Field) -> GammaL1Element {
        let back = -(self.k as i64);
        GammaL1Element {
            a: f.frobenius(f.inv(self.a).expect("nonzero"), back),
            k: (f.ell() - self.k) % f.ell(),
        }
    }
}

/// Standard parameters `(t, e, s)` of `⟨ω̂^t, θ^s ω̂^e⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StandardParameters {
    pub t: u32,
    pub e: u32,
    pub s: u32,
}

impl StandardParameters {
    /// Checks (F1)-(F3).
    pub fn validate(&self, f: &Field) -> Result<()> {
        let (p, ell) = (f.p() as u64, f.ell());
        let qm1 = f.order() as u64 - 1;
        let bad = |why: &str| Err(Error::InvalidParameters(format!("(t,e,s) = ({},{},{}): {why}", self.t, self.e, self.s)));
        if self.t == 0 || qm1 % self.t as u64 != 0 {
            return bad("t must be positive and divide q-1");
        }
        if self.s == 0 || ell % self.s != 0 {
            return bad("s must be positive and divide ell");
        }
        if self.e >= self.t {
            return bad("e must be below t");
        }
        let ratio = qm1 / (p.pow(self.s) - 1);
        if (self.e as u64 * ratio) % self.t as u64 != 0 {
            return bad("t must divide e(q-1)/(p^s-1)");
        }
        Ok(())
    }

    pub fn generators(&self, f: &Field) -> Vec<GammaL1Element> {
        vec![
            GammaL1Element::omega_hat(f, self.t as i64),
            GammaL1Element { a: f.omega_pow(self.e as i64), k: self.s % f.ell() },
        ]
    }

    /// `|⟨ω̂^t, θ^s ω̂^e⟩| = (q-1)/t * ell/s`.
    pub fn order(&self, f: &Field) -> usize {
        ((f.order() - 1) / self.t * (f.ell() / self.s)) as usize
    }

    /// Enumerates every valid parameter triple for the field.
    pub fn all(f: &Field) -> Vec<StandardParameters> {
        let mut out = Vec::new();
        for t in 1..f.order() {
            for s in 1..=f.ell() {
                for e in 0..t {
                    let sp = StandardParameters { t, e, s };
                    if sp.validate(f).is_ok() {
                        out.push(sp);
                    }
                }
            }
        }
        out
    }
}

/// A materialized subgroup of ΓL(1,q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaL1 {
    elements: BTreeSet<GammaL1Element>,
}

impl GammaL1 {
    /// Closure of the generators under composition.
    pub fn closure(f: &Field, gens: &[GammaL1Element]) -> GammaL1 {
        let mut elements = BTreeSet::new();
        elements.insert(GammaL1Element::identity());
        let mut frontier = vec![GammaL1Element::identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = g.compose(f, &x);
                if elements.insert(y) {
                    frontier.push(y);
                }
            }
        }
        GammaL1 { elements }
    }

    pub fn full(f: &Field) -> GammaL1 {
        GammaL1::closure(f, &[GammaL1Element::omega_hat(f, 1), GammaL1Element::theta(f, 1)])
    }

    pub fn from_standard(f: &Field, params: StandardParameters) -> Result<GammaL1> {
        params.validate(f)?;
        Ok(GammaL1::closure(f, &params.generators(f)))
    }

    /// Wraps a finite set after checking that it is closed under composition.
    pub fn from_set(f: &Field, set: &[GammaL1Element]) -> Result<GammaL1> {
        let elements: BTreeSet<GammaL1Element> = set.iter().copied().collect();
        if elements.is_empty() {
            return Err(Error::NotASubgroup("empty set".into()));
        }
        for x in &elements {
            for y in &elements {
                let z = x.compose(f, y);
                if !elements.contains(&z) {
                    return Err(Error::NotASubgroup(format!("({},{}) o ({},{}) is missing", x.a, x.k, y.a, y.k)));
                }
            }
        }
        Ok(GammaL1 { elements })
    }

    pub fn contains(&self, a: Fe, k: u32) -> bool {
        self.elements.contains(&GammaL1Element { a, k })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = &GammaL1Element> {
        self.elements.iter()
    }

    /// Orbit of `c` under the natural action on F_q.
    pub fn orbit_of(&self, f: &Field, c: Fe) -> Vec<Fe> {
        let set: HashSet<Fe> = self.elements.iter().map(|g| g.apply(f, c)).collect();
        let mut out: Vec<Fe> = set.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// The unique standard form: `t` least with `ω̂^t` in M, `s` least with some `(x, s)` in M.
    pub fn standard_form(&self, f: &Field) -> Result<StandardParameters> {
        let qm1 = f.order() - 1;
        let t = (1..=qm1)
            .find(|&t| self.contains(f.omega_pow(t as i64), 0))
            .expect("ω̂^(q-1) is the identity");
        let (s, e) = match (1..f.ell()).find_map(|s| self.elements.iter().find(|g| g.k == s).map(|g| (s, g.a))) {
            Some((s, x)) => (s, f.dlog(x)? % t),
            None => (f.ell(), 0),
        };
        let params = StandardParameters { t, e, s };
        params.validate(f).map_err(|e| Error::InternalMismatch(format!("standard form fails validation: {e}")))?;
        if GammaL1::from_standard(f, params)? != *self {
            return Err(Error::InternalMismatch(format!("({t},{e},{s}) does not regenerate the subgroup")));
        }
        Ok(params)
    }
}

/// Standard form of the subgroup given as an explicit element set.
pub fn standard_form(f: &Field, set: &[GammaL1Element]) -> Result<StandardParameters> {
    GammaL1::from_set(f, set)?.standard_form(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_examples() {
        let f9 = Field::of_order(9).unwrap();
        assert_eq!(GammaL1::full(&f9).standard_form(&f9).unwrap(), StandardParameters { t: 1, e: 0, s: 1 });
        assert_eq!(GammaL1::full(&f9).order(), 16);
        let f4 = Field::of_order(4).unwrap();
        let th = GammaL1::closure(&f4, &[GammaL1Element::theta(&f4, 1)]);
        assert_eq!(th.standard_form(&f4).unwrap(), StandardParameters { t: 3, e: 0, s: 1 });
        for q in [4u32, 8, 9, 16, 25] {
            let f = Field::of_order(q).unwrap();
            let gl = GammaL1::closure(&f, &[GammaL1Element::omega_hat(&f, 1)]);
            assert_eq!(gl.standard_form(&f).unwrap(), StandardParameters { t: 1, e: 0, s: f.ell() });
        }
    }

    #[test]
    fn composition_is_pointwise() {
        let f = Field::of_order(16).unwrap();
        let full: Vec<GammaL1Element> = GammaL1::full(&f).elements().copied().collect();
        for g in full.iter().step_by(7) {
            for h in full.iter().step_by(5) {
                let gh = g.compose(&f, h);
                for y in f.elements() {
                    assert_eq!(gh.apply(&f, y), g.apply(&f, h.apply(&f, y)));
                }
                assert_eq!(g.inverse(&f).compose(&f, g), GammaL1Element::identity());
            }
        }
    }

    #[test]
    fn non_subgroup_rejected() {
        let f = Field::of_order(4).unwrap();
        let set = [GammaL1Element::identity(), GammaL1Element::theta(&f, 1), GammaL1Element::omega_hat(&f, 1)];
        assert!(matches!(standard_form(&f, &set), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn parameter_orders_match_closure() {
        for q in [4u32, 8, 9, 16, 27, 64] {
            let f = Field::of_order(q).unwrap();
            for sp in StandardParameters::all(&f) {
                let m = GammaL1::from_standard(&f, sp).unwrap();
                assert_eq!(m.order(), sp.order(&f), "{sp:?} over GF({q})");
                assert_eq!(m.standard_form(&f).unwrap(), sp);
            }
        }
    }
}

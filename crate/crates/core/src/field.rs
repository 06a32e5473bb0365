//! Exact arithmetic in GF(p^ell).
//!
//! An element is stored as its integer code: the base-p digits of the code are
//! the coefficients of the representing polynomial, constant term least
//! significant. The modulus is the lexicographically smallest irreducible monic
//! polynomial of degree `ell`, and the primitive element is the smallest code of
//! full multiplicative order. Log, antilog and inverse tables are built once.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the field order `p^ell`.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

/// A field element, identified by its code in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field operations accepted by [`Field::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An immutable finite field GF(p^ell) with precomputed tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    ell: u32,
    q: u32,
    /// Coefficients of the monic modulus, constant term first (length `ell + 1`).
    modulus: Vec<u32>,
    omega: Fe,
    /// `exp[i] = omega^i` for `i < 2(q - 1)`.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// `p^k mod (q - 1)` for `k < ell`.
    frob_mult: Vec<u64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("ell", &self.ell)
            .field("modulus", &self.modulus)
            .field("omega", &self.omega)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.ell == other.ell && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power into `(p, ell)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut ell = 0;
    while rest % p == 0 {
        rest /= p;
        ell += 1;
    }
    (rest == 1).then_some((p as u32, ell))
}

// Dense polynomial helpers over F_p, coefficient vectors constant term first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let f = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = (f as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    poly_trim(&mut v);
    v
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2)
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn digits(code: u32, p: u32, len: usize) -> Vec<u32> {
    let mut c = code;
    (0..len)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the digits of `code`.
fn monic_from_code(code: u32, p: u32, deg: usize) -> Vec<u32> {
    let mut v = digits(code, p, deg);
    v.push(1);
    v
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let divisor = monic_from_code(code as u32, p, d);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    deg >= 1
}

impl Field {
    /// Builds GF(p^ell) under the default size cap.
    pub fn new(p: u32, ell: u32) -> Result<Field> {
        Field::with_cap(p, ell, DEFAULT_FIELD_CAP)
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn of_order(q: u32) -> Result<Field> {
        let (p, ell) = prime_power(q as u64)
            .ok_or_else(|| Error::InvalidParameters(format!("{q} is not a prime power")))?;
        Field::new(p, ell)
    }

    pub fn with_cap(p: u32, ell: u32, cap: u64) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if ell == 0 {
            return Err(Error::InvalidParameters("field degree must be positive".into()));
        }
        let q64 = (p as u64).checked_pow(ell).unwrap_or(u64::MAX);
        if q64 > cap {
            return Err(Error::SizeCapExceeded { what: "field order", size: q64, cap });
        }
        let q = q64 as u32;
        let deg = ell as usize;

        let modulus = if ell == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|code| monic_from_code(code, p, deg))
                .find(|m| is_irreducible(m, p))
                .expect("an irreducible polynomial exists in every degree")
        };

        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&digits(a, p, deg), &digits(b, p, deg), p);
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(deg, 0);
            undigits(&r, p)
        };
        let slow_pow = |a: u32, mut e: u64| -> u32 {
            let mut result = 1u32;
            let mut base = a;
            while e > 0 {
                if e & 1 == 1 {
                    result = slow_mul(result, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            result
        };

        let order = q as u64 - 1;
        let factors = prime_factors(order);
        let omega = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .ok_or(Error::NoPrimitiveFound(q as u64))?;

        let n = order as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, omega);
        }
        if x != 1 {
            return Err(Error::NoPrimitiveFound(q as u64));
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        if n == 0 {
            exp[0] = 1;
        }

        let frob_mult = (0..ell)
            .map(|k| (p as u64).pow(k) % order.max(1))
            .collect();

        Ok(Field { p, ell, q, modulus, omega: Fe(omega), exp, log, frob_mult })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn omega(&self) -> Fe {
        self.omega
    }

    pub fn name(&self) -> String {
        format!("GF({}^{})", self.p, self.ell)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    pub fn element(&self, code: u32) -> Result<Fe> {
        if code < self.q {
            Ok(Fe(code))
        } else {
            Err(Error::InvalidParameters(format!("{code} is not an element of {}", self.name())))
        }
    }

    /// The field element `n * 1` (reduction of an integer into the prime field).
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            Fe(a.0 ^ b.0)
        } else if self.ell == 1 {
            Fe((a.0 + b.0) % self.p)
        } else {
            let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
            while x > 0 || y > 0 {
                out += ((x % self.p + y % self.p) % self.p) * place;
                x /= self.p;
                y /= self.p;
                place *= self.p;
            }
            Fe(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            a
        } else if self.ell == 1 {
            Fe((self.p - a.0) % self.p)
        } else {
            let (mut x, mut out, mut place) = (a.0, 0, 1);
            while x > 0 {
                out += ((self.p - x % self.p) % self.p) * place;
                x /= self.p;
                place *= self.p;
            }
            Fe(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        Ok(Fe(self.exp[((n - self.log[a.0 as usize]) % n.max(1)) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn arith(&self, a: Fe, b: Fe, op: ArithOp) -> Result<Fe> {
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    /// `omega^e` for any integer exponent.
    #[inline]
    pub fn omega_pow(&self, e: i64) -> Fe {
        let n = (self.q - 1) as i64;
        Fe(self.exp[e.rem_euclid(n.max(1)) as usize])
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let n = (self.q - 1) as u64;
        Fe(self.exp[((self.log[a.0 as usize] as u64 * (e % n.max(1))) % n.max(1)) as usize])
    }

    /// `a^(p^k)`, with `k` reduced mod `ell`.
    #[inline]
    pub fn frobenius(&self, a: Fe, k: i64) -> Fe {
        if a.is_zero() {
            return a;
        }
        let k = k.rem_euclid(self.ell as i64) as usize;
        if k == 0 {
            return a;
        }
        let n = (self.q - 1) as u64;
        Fe(self.exp[(self.log[a.0 as usize] as u64 * self.frob_mult[k] % n) as usize])
    }

    /// Discrete logarithm to base omega, in `[0, q - 1)`.
    pub fn dlog(&self, a: Fe) -> Result<u32> {
        if a.is_zero() {
            Err(Error::LogOfZero)
        } else {
            Ok(self.log[a.0 as usize])
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Fe) -> Result<u32> {
        let l = self.dlog(a)?;
        let n = self.q - 1;
        Ok(n / gcd(n, l))
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// JSON form: `{"field": "GF(p^ell)", "modulus": [...]}`, constant term first.
impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Field", 3)?;
        st.serialize_field("field", &self.name())?;
        st.serialize_field("modulus", &self.modulus)?;
        st.serialize_field("omega", &self.omega)?;
        st.end()
    }
}

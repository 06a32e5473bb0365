//! Square matrices over a finite field, row-major.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    entries: Vec<Fe>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameters("matrix is not square".into()));
        }
        Ok(Matrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_entries(n: usize, entries: Vec<Fe>) -> Result<Matrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Ok(Matrix { n, entries })
    }

    pub fn identity(n: usize) -> Matrix {
        let mut entries = vec![Fe::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = Fe::ONE;
        }
        Matrix { n, entries }
    }

    pub fn diagonal(diag: &[Fe]) -> Matrix {
        let n = diag.len();
        let mut m = Matrix { n, entries: vec![Fe::ZERO; n * n] };
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    /// `I + a * E_{ij}` (0-based, `i != j`).
    pub fn transvection(n: usize, i: usize, j: usize, a: Fe) -> Matrix {
        let mut m = Matrix::identity(n);
        m.entries[i * n + j] = a;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n).map(|r| r.iter().map(|x| x.0).collect()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut entries = vec![Fe::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let cell = &mut entries[i * n + j];
                    *cell = f.add(*cell, f.mul(a, other.get(k, j)));
                }
            }
        }
        Matrix { n, entries }
    }

    /// Matrix-vector product on raw codes.
    #[inline]
    pub fn mul_vec_codes(&self, f: &Field, v: &[u32], out: &mut [u32]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Fe::ZERO;
            for j in 0..n {
                acc = f.add(acc, f.mul(self.entries[i * n + j], Fe(v[j])));
            }
            *o = acc.0;
        }
    }

    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        let codes: Vec<u32> = v.iter().map(|x| x.0).collect();
        let mut out = vec![0; self.n];
        self.mul_vec_codes(f, &codes, &mut out);
        out.into_iter().map(Fe).collect()
    }

    /// Entrywise Frobenius `a -> a^(p^k)`.
    pub fn frobenius(&self, f: &Field, k: i64) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().map(|&a| f.frobenius(a, k)).collect() }
    }

    pub fn scale(&self, f: &Field, a: Fe) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().map(|&x| f.mul(a, x)).collect() }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, f: &Field) -> Fe {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = Fe::ONE;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return Fe::ZERO;
            };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[col * n + col];
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(m[r * n + col], inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[col * n + j]));
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self, f: &Field) -> Result<Matrix> {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut inv = Matrix::identity(n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = f.inv(m[col * n + col])?;
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], pinv);
                inv[col * n + j] = f.mul(inv[col * n + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[r * n + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[col * n + j]));
                    inv[r * n + j] = f.sub(inv[r * n + j], f.mul(factor, inv[col * n + j]));
                }
            }
        }
        Ok(Matrix { n, entries: inv })
    }
}

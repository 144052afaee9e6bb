//! Known answers: the action of `SAut(F_n)` on the `2^n - 1` nonzero vectors of
//! `F_2^n`, and the order-12 character of `SL_2(Z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_aut::FreeAutomorphism;
use crate::perm::Permutation;
use crate::search::TransvectionImages;

/// An `n x n` matrix over `F_2`; bit `k` of `rows[i]` is entry `(i, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    n: usize,
    rows: Vec<u32>,
}

impl GF2Matrix {
    pub fn identity(n: usize) -> Self {
        GF2Matrix { n, rows: (0..n).map(|i| 1 << i).collect() }
    }

    /// Abelianization of `f` reduced mod 2: column `k` counts the letters of `f(a_{k+1})`.
    pub fn from_automorphism(f: &FreeAutomorphism) -> Result<Self> {
        let n = f.rank();
        if n > 31 {
            return Err(Error::capacity("rank above 31"));
        }
        let a = f.abelianize();
        let rows = (0..n)
            .map(|i| (0..n).filter(|&k| a.get(i, k).rem_euclid(2) == 1).fold(0u32, |r, k| r | 1 << k))
            .collect();
        Ok(GF2Matrix { n, rows })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> bool {
        self.rows[i] >> k & 1 == 1
    }

    pub fn mul(&self, other: &GF2Matrix) -> Result<GF2Matrix> {
        if self.n != other.n {
            return Err(Error::input("matrix sizes differ"));
        }
        Ok(GF2Matrix { n: self.n, rows: self.rows.iter().map(|&r| other.row_times(r)).collect() })
    }

    /// The row vector `v` (bit `i` is coordinate `i+1`) times this matrix.
    pub fn row_times(&self, v: u32) -> u32 {
        (0..self.n).filter(|&i| v >> i & 1 == 1).fold(0, |acc, i| acc ^ self.rows[i])
    }

    pub fn is_invertible(&self) -> bool {
        let mut rows = self.rows.clone();
        for col in 0..self.n {
            let Some(p) = (col..self.n).find(|&r| rows[r] >> col & 1 == 1) else {
                return false;
            };
            rows.swap(col, p);
            for r in 0..self.n {
                if r != col && rows[r] >> col & 1 == 1 {
                    rows[r] ^= rows[col];
                }
            }
        }
        true
    }

    /// The action on nonzero row vectors; vector `v` is point `v - 1`.
    pub fn point_action(&self) -> Result<Permutation> {
        if !self.is_invertible() {
            return Err(Error::input("singular matrix"));
        }
        let count = (1u32 << self.n) - 1;
        Permutation::from_images((1..=count).map(|v| self.row_times(v) - 1).collect())
    }
}

/// Transvection images of the action on the `2^n - 1` nonzero vectors of `F_2^n`.
/// `rho_ij` and `lambda_ij` both act through the same elementary matrix.
pub fn psl_action(n: usize) -> Result<TransvectionImages> {
    if n < 3 {
        return Err(Error::input("the control action needs n >= 3"));
    }
    if n > 16 {
        return Err(Error::capacity("more than 2^16 points"));
    }
    let mut t = TransvectionImages::empty(n);
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let rho = GF2Matrix::from_automorphism(&FreeAutomorphism::rho(i, j, n)?)?;
            let lambda = GF2Matrix::from_automorphism(&FreeAutomorphism::lambda(i, j, n)?)?;
            t.set_rho(i, j, rho.point_action()?);
            t.set_lambda(i, j, lambda.point_action()?);
        }
    }
    Ok(t)
}

/// A 2x2 integer matrix of determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SL2Mat {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Entries beyond this magnitude are refused so every intermediate stays exact.
pub const SL2_ENTRY_BOUND: i64 = 1 << 40;

impl SL2Mat {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = SL2Mat { a, b, c, d };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        if [self.a, self.b, self.c, self.d].iter().any(|x| x.abs() > SL2_ENTRY_BOUND) {
            return Err(Error::capacity(format!("entry beyond {SL2_ENTRY_BOUND}")));
        }
        let det = self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128;
        if det != 1 {
            return Err(Error::input(format!("determinant {det}, expected 1")));
        }
        Ok(())
    }

    pub fn identity() -> Self {
        SL2Mat { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `[[0, -1], [1, 0]]`
    pub fn s() -> Self {
        SL2Mat { a: 0, b: -1, c: 1, d: 0 }
    }

    /// `[[1, 1], [0, 1]]`
    pub fn t() -> Self {
        SL2Mat { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &SL2Mat) -> Result<SL2Mat> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).map_err(|_| Error::capacity("matrix entry overflow"))
        };
        let m = SL2Mat {
            a: e(self.a, o.a, self.b, o.c)?,
            b: e(self.a, o.b, self.b, o.d)?,
            c: e(self.c, o.a, self.d, o.c)?,
            d: e(self.c, o.b, self.d, o.d)?,
        };
        m.check()?;
        Ok(m)
    }
}

/// `k` with the character value `exp(2 pi i k / 12)`, from
/// `(1 - c^2)(bd + 3(c - 1)d + c + 3) + c(a + d - 3)`.
pub fn chi(m: &SL2Mat) -> Result<u8> {
    m.check()?;
    let (a, b, c, d) = (m.a as i128, m.b as i128, m.c as i128, m.d as i128);
    let v = (1 - c * c) * (b * d + 3 * (c - 1) * d + c + 3) + c * (a + d - 3);
    Ok(v.rem_euclid(12) as u8)
}

/// `chi` followed by `z -> z^6`, as an element of `Z/2`.
pub fn psi_chi(m: &SL2Mat) -> Result<u8> {
    Ok((6 * chi(m)? as u32 % 12 / 6) as u8)
}

/// Rank 1 needs no search: `SAut(F_1)` is trivial.
pub const RANK_ONE_NOTE: &str = "rank 1: SAut(F_1) is trivial, so every action is trivial";

//! Permutations of `{0..m-1}` acting on the right.
//!
//! `images[x]` is `x^p`. Products compose left to right: `x^(p*q) = (x^p)^q`.
//! Every other module conjugates through [`Permutation::conjugate`] so the
//! convention lives in exactly one place.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Multiset of cycle lengths, fixed points included, sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn parity(&self) -> Parity {
        if (self.degree() - self.0.len()).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Order of any permutation with this cycle type.
    pub fn order(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, &len| lcm(acc, len as u64))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            let y = y as usize;
            if y >= images.len() || seen[y] {
                return Err(Error::input(format!(
                    "image array {images:?} is not a bijection of 0..{}",
                    images.len()
                )));
            }
            seen[y] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from disjoint cycles, `[a, b, c]` meaning `a -> b -> c -> a`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let xi = x as usize;
                if xi >= degree || touched[xi] {
                    return Err(Error::input(format!("bad cycle {cycle:?} on {degree} points")));
                }
                touched[xi] = true;
                images[xi] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(degree: usize, a: u32, b: u32) -> Result<Self> {
        if a == b {
            return Err(Error::input("transposition needs two distinct points"));
        }
        Self::from_cycles(degree, &[&[a, b]])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation { images: inv }
    }

    fn check_degree(&self, other: &Permutation) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::input(format!(
                "degree mismatch: {} vs {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(())
    }

    /// `self` first, then `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        self.check_degree(other)?;
        Ok(self.then(other))
    }

    #[inline]
    pub(crate) fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in product");
        Permutation { images: self.images.iter().map(|&y| other.images[y as usize]).collect() }
    }

    /// `g^-1 * self * g`, so that `(x^g)^(self^g) = (x^self)^g`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Self> {
        self.check_degree(g)?;
        Ok(self.conjugate_by(g))
    }

    #[inline]
    pub(crate) fn conjugate_by(&self, g: &Permutation) -> Self {
        assert_eq!(self.degree(), g.degree(), "degree mismatch in conjugation");
        let mut out = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            out[g.images[x] as usize] = g.images[y as usize];
        }
        Permutation { images: out }
    }

    /// `[a, b] = a * b * a^-1 * b^-1`.
    pub fn commutator(&self, other: &Permutation) -> Result<Self> {
        self.check_degree(other)?;
        Ok(self.commutator_with(other))
    }

    #[inline]
    pub(crate) fn commutator_with(&self, other: &Permutation) -> Self {
        self.then(other).then(&self.inverse()).then(&other.inverse())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.images[x as usize];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(lengths)
    }

    pub fn parity(&self) -> Parity {
        let cycles = self.cycles().len();
        if (self.degree() - cycles).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().order()
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images.iter().enumerate().find(|(x, &y)| *x as u32 != y).map(|(x, _)| x as u32)
    }

    /// Direct sum: `self` on the first points, `other` on the following ones.
    pub fn direct_sum(&self, other: &Permutation) -> Self {
        let shift = self.degree() as u32;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&y| y + shift));
        Permutation { images }
    }

    /// Extends with fixed points up to `degree`.
    pub fn padded(&self, degree: usize) -> Self {
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Permutation { images }
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.images
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.degree())
    }
}

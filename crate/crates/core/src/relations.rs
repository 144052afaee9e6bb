//! Gersten's four relation families over transvection images in any group.
//!
//! The same enumeration audits symbolic automorphisms (where every relation must
//! hold) and candidate permutation images (where a full pass proves the images
//! extend to a homomorphism of `SAut(F_n)`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_aut::FreeAutomorphism;
use crate::perm::Permutation;

/// The group operations the audit needs.
pub trait GroupElement: Clone + PartialEq {
    fn product(&self, other: &Self) -> Result<Self>;
    fn inverted(&self) -> Result<Self>;
    fn is_one(&self) -> bool;

    fn commutator_of(&self, other: &Self) -> Result<Self> {
        self.product(other)?.product(&self.inverted()?)?.product(&other.inverted()?)
    }

    fn power(&self, e: u32) -> Result<Self> {
        let mut acc = self.product(&self.inverted()?)?;
        for _ in 0..e {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }
}

impl GroupElement for Permutation {
    fn product(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }

    fn inverted(&self) -> Result<Self> {
        Ok(self.inverse())
    }

    fn is_one(&self) -> bool {
        self.is_identity()
    }

    fn commutator_of(&self, other: &Self) -> Result<Self> {
        self.commutator(other)
    }
}

impl GroupElement for FreeAutomorphism {
    fn product(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }

    fn inverted(&self) -> Result<Self> {
        self.inverse()
    }

    fn is_one(&self) -> bool {
        self.is_identity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationFamily {
    R1,
    R2,
    R3,
    R4,
}

impl RelationFamily {
    pub const ALL: [RelationFamily; 4] =
        [RelationFamily::R1, RelationFamily::R2, RelationFamily::R3, RelationFamily::R4];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationFamily::R1 => "r1",
            RelationFamily::R2 => "r2",
            RelationFamily::R3 => "r3",
            RelationFamily::R4 => "r4",
        };
        write!(f, "{s}")
    }
}

/// A relation instance that did not hold, with its index tuple spelled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFailure {
    pub family: RelationFamily,
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAudit {
    /// Instances evaluated per family, in `r1..r4` order.
    pub checked: [u64; 4],
    pub failures: Vec<RelationFailure>,
}

impl RelationAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn total_checked(&self) -> u64 {
        self.checked.iter().sum()
    }
}

/// Images of `rho_ij` and `lambda_ij` for all ordered pairs of distinct `i, j` in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransvectionTable<E> {
    n: usize,
    rho: Vec<Option<E>>,
    lambda: Vec<Option<E>>,
}

impl<E: GroupElement> TransvectionTable<E> {
    pub fn empty(n: usize) -> Self {
        TransvectionTable { n, rho: vec![None; n * n], lambda: vec![None; n * n] }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(i >= 1 && j >= 1 && i <= self.n && j <= self.n && i != j, "bad pair ({i},{j})");
        (i - 1) * self.n + (j - 1)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn set_rho(&mut self, i: usize, j: usize, e: E) {
        let s = self.slot(i, j);
        self.rho[s] = Some(e);
    }

    pub fn set_lambda(&mut self, i: usize, j: usize, e: E) {
        let s = self.slot(i, j);
        self.lambda[s] = Some(e);
    }

    pub fn rho(&self, i: usize, j: usize) -> &E {
        self.rho[self.slot(i, j)].as_ref().expect("rho image not set")
    }

    pub fn lambda(&self, i: usize, j: usize) -> &E {
        self.lambda[self.slot(i, j)].as_ref().expect("lambda image not set")
    }

    pub fn try_rho(&self, i: usize, j: usize) -> Option<&E> {
        self.rho[self.slot(i, j)].as_ref()
    }

    pub fn is_complete(&self) -> bool {
        self.pairs().all(|(i, j)| {
            let s = self.slot(i, j);
            self.rho[s].is_some() && self.lambda[s].is_some()
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    pub fn map<F, T>(&self, mut f: F) -> Result<TransvectionTable<T>>
    where
        F: FnMut(&E) -> Result<T>,
        T: GroupElement,
    {
        let mut out = TransvectionTable::empty(self.n);
        for (i, j) in self.pairs() {
            out.set_rho(i, j, f(self.rho(i, j))?);
            out.set_lambda(i, j, f(self.lambda(i, j))?);
        }
        Ok(out)
    }
}

/// Symbolic transvections of `F_n`.
pub fn symbolic_transvections(n: usize) -> Result<TransvectionTable<FreeAutomorphism>> {
    let mut t = TransvectionTable::empty(n);
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            t.set_rho(i, j, FreeAutomorphism::rho(i, j, n)?);
            t.set_lambda(i, j, FreeAutomorphism::lambda(i, j, n)?);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy)]
enum Kind {
    Rho,
    Lambda,
}

struct Signed<'a, E> {
    base: &'a [Option<E>],
    inv: Vec<Option<E>>,
}

struct Auditor<'a, E> {
    n: usize,
    rho: Signed<'a, E>,
    lambda: Signed<'a, E>,
    stop_at_first: bool,
    audit: RelationAudit,
}

fn label(kind: Kind, i: usize, j: usize, sign: i8) -> String {
    let name = match kind {
        Kind::Rho => "rho",
        Kind::Lambda => "lambda",
    };
    if sign < 0 {
        format!("{name}({i},{j})^-1")
    } else {
        format!("{name}({i},{j})")
    }
}

impl<'a, E: GroupElement> Auditor<'a, E> {
    fn get(&self, kind: Kind, i: usize, j: usize, sign: i8) -> &E {
        let slot = (i - 1) * self.n + (j - 1);
        let s = match kind {
            Kind::Rho => &self.rho,
            Kind::Lambda => &self.lambda,
        };
        if sign < 0 {
            s.inv[slot].as_ref().expect("complete table")
        } else {
            s.base[slot].as_ref().expect("complete table")
        }
    }

    /// Records the outcome; returns false when the audit should stop.
    fn record(&mut self, family: RelationFamily, holds: bool, witness: impl FnOnce() -> String) -> bool {
        self.audit.checked[family.index()] += 1;
        if !holds {
            self.audit.failures.push(RelationFailure { family, witness: witness() });
            return !self.stop_at_first;
        }
        true
    }

    fn commuting(&mut self, family: RelationFamily, a: (Kind, usize, usize, i8), b: (Kind, usize, usize, i8)) -> Result<bool> {
        let x = self.get(a.0, a.1, a.2, a.3);
        let y = self.get(b.0, b.1, b.2, b.3);
        let holds = x.commutator_of(y)?.is_one();
        Ok(self.record(family, holds, || {
            format!("[{}, {}] != 1", label(a.0, a.1, a.2, a.3), label(b.0, b.1, b.2, b.3))
        }))
    }

    fn run(&mut self) -> Result<()> {
        let n = self.n;
        let signs = [1i8, -1i8];
        // (r1) and (r3): i, j, k distinct; l distinct from i and k.
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                for k in (1..=n).filter(|&k| k != i && k != j) {
                    for l in (1..=n).filter(|&l| l != i && l != k) {
                        for &s in &signs {
                            for &t in &signs {
                                let pairs = [
                                    ((Kind::Rho, i, j, s), (Kind::Rho, k, l, t)),
                                    ((Kind::Lambda, i, j, s), (Kind::Lambda, k, l, t)),
                                    ((Kind::Rho, i, j, s), (Kind::Lambda, k, l, t)),
                                ];
                                for (a, b) in pairs {
                                    if !self.commuting(RelationFamily::R1, a, b)? {
                                        return Ok(());
                                    }
                                }
                                if !self.commuting(RelationFamily::R3, (Kind::Rho, i, j, s), (Kind::Lambda, i, l, t))? {
                                    return Ok(());
                                }
                            }
                        }
                    }
                }
            }
        }
        // (r2)
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                for k in (1..=n).filter(|&k| k != i && k != j) {
                    for kind in [Kind::Rho, Kind::Lambda] {
                        let lhs = self.get(kind, i, j, -1).commutator_of(self.get(kind, j, k, -1))?;
                        let holds = &lhs == self.get(kind, i, k, -1);
                        let go = self.record(RelationFamily::R2, holds, || {
                            format!(
                                "[{}, {}] != {}",
                                label(kind, i, j, -1),
                                label(kind, j, k, -1),
                                label(kind, i, k, -1)
                            )
                        });
                        if !go {
                            return Ok(());
                        }
                    }
                }
            }
        }
        // (r4)
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                let first = self
                    .get(Kind::Lambda, i, j, 1)
                    .product(self.get(Kind::Lambda, j, i, -1))?
                    .product(self.get(Kind::Rho, i, j, 1))?;
                let holds = first.power(4)?.is_one();
                if !self.record(RelationFamily::R4, holds, || {
                    format!("(lambda({i},{j}) lambda({j},{i})^-1 rho({i},{j}))^4 != 1")
                }) {
                    return Ok(());
                }
                let second = self
                    .get(Kind::Rho, i, j, 1)
                    .product(self.get(Kind::Rho, j, i, -1))?
                    .product(self.get(Kind::Lambda, i, j, 1))?;
                let holds = second.power(4)?.is_one();
                if !self.record(RelationFamily::R4, holds, || {
                    format!("(rho({i},{j}) rho({j},{i})^-1 lambda({i},{j}))^4 != 1")
                }) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Evaluates every instance of (r1)-(r4) over all index tuples and independent
/// sign choices. With `stop_at_first` the audit ends at the first failure.
pub fn audit_relations<E: GroupElement>(table: &TransvectionTable<E>, stop_at_first: bool) -> Result<RelationAudit> {
    let n = table.rank();
    if n < 3 {
        return Err(Error::input("Gersten's presentation needs n >= 3"));
    }
    if !table.is_complete() {
        return Err(Error::input("transvection table is incomplete"));
    }
    let invert = |v: &[Option<E>]| -> Result<Vec<Option<E>>> {
        v.iter().map(|e| e.as_ref().map(GroupElement::inverted).transpose()).collect()
    };
    let mut auditor = Auditor {
        n,
        rho: Signed { base: &table.rho, inv: invert(&table.rho)? },
        lambda: Signed { base: &table.lambda, inv: invert(&table.lambda)? },
        stop_at_first,
        audit: RelationAudit::default(),
    };
    auditor.run()?;
    Ok(auditor.audit)
}

/// Runs the full relation audit on the symbolic transvections of `F_n`.
pub fn check_gersten(n: usize) -> Result<RelationAudit> {
    audit_relations(&symbolic_transvections(n)?, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_instances_hold_symbolically() {
        let r = |i, j, n| FreeAutomorphism::rho(i, j, n).unwrap();
        let l = |i, j, n| FreeAutomorphism::lambda(i, j, n).unwrap();

        let lhs = r(1, 2, 3).inverse().unwrap().commutator(&r(2, 3, 3).inverse().unwrap()).unwrap();
        assert_eq!(lhs, r(1, 3, 3).inverse().unwrap());

        assert!(r(1, 2, 4).commutator(&r(3, 4, 4)).unwrap().is_identity());

        let x = l(1, 2, 3).compose(&l(2, 1, 3).inverse().unwrap()).unwrap().compose(&r(1, 2, 3)).unwrap();
        assert!(x.power(4).unwrap().is_identity());
        assert!(!x.power(2).unwrap().is_identity());
    }

    #[test]
    fn gersten_rank_three_and_four() {
        for n in [3, 4] {
            let audit = check_gersten(n).unwrap();
            assert!(audit.passed(), "n={n}: {:?}", audit.failures);
            assert!(audit.checked.iter().all(|&c| c > 0));
        }
    }

    #[test]
    fn instance_counts() {
        // r1: 3 pairings x 4 signs per (i,j,k,l); r3: 4 signs; r2: 2 per (i,j,k); r4: 2 per (i,j).
        let n = 4u64;
        let tuples = n * (n - 1) * (n - 2) * (n - 2);
        let audit = check_gersten(4).unwrap();
        assert_eq!(audit.checked, [tuples * 12, 2 * n * (n - 1) * (n - 2), tuples * 4, 2 * n * (n - 1)]);
    }

    #[test]
    fn identity_images_pass_and_broken_images_fail() {
        let n = 3;
        let mut t = TransvectionTable::empty(n);
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                t.set_rho(i, j, Permutation::identity(4));
                t.set_lambda(i, j, Permutation::identity(4));
            }
        }
        assert!(audit_relations(&t, false).unwrap().passed());
        t.set_rho(1, 3, Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap());
        let audit = audit_relations(&t, false).unwrap();
        assert!(!audit.passed());
        assert!(audit.failures.iter().any(|f| f.family == RelationFamily::R2));
        let first = audit_relations(&t, true).unwrap();
        assert_eq!(first.failures.len(), 1);
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let t: TransvectionTable<Permutation> = TransvectionTable::empty(3);
        assert!(audit_relations(&t, false).is_err());
    }
}

//! The free group `F_n`, automorphisms given by basis images, and the
//! finite subgroups of `SAut(F_n)` generated by signed index permutations.
//!
//! Automorphisms multiply as functions: `f * g` is `x -> f(g(x))`. Gersten's
//! relations hold verbatim in this order, and the signed-letter representation
//! `f -> (x -> f^-1(x))` turns it into the left-to-right product of
//! [`Permutation`].

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Default bound on intermediate word length in [`FreeAutomorphism::apply`].
pub const DEFAULT_WORD_LIMIT: usize = 1 << 20;

/// A freely reduced word. Letter `k > 0` is `a_k`, `-k` is `a_k^-1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(k: i32) -> Self {
        FreeWord { letters: vec![k] }
    }

    /// Freely reduces `letters`, checking every index lies in `±1..=±rank`.
    pub fn reduce(letters: &[i32], rank: usize) -> Result<Self> {
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::input(format!("letter {l} outside rank {rank}")));
            }
        }
        Ok(Self::reduce_unchecked(letters.iter().copied()))
    }

    fn reduce_unchecked(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord { letters: self.letters.iter().rev().map(|&l| -l).collect() }
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &FreeWord) -> Self {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    /// Parses `"a1 a2^-1"`; `"1"` or the empty string is the identity.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (base, inverted) = match token.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (token, false),
            };
            let k: i32 = base
                .strip_prefix('a')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad letter {token:?}")))?;
            letters.push(if inverted { -k } else { k });
        }
        Self::reduce(&letters, rank)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| if l > 0 { format!("a{l}") } else { format!("a{}^-1", -l) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `sigma_ij`: swaps `a_i` and `a_j`.
    Sigma,
    /// `epsilon_i`: inverts `a_i`.
    Epsilon,
    /// `sigma_i(n+1)`: `a_i -> a_i^-1`, `a_k -> a_k a_i^-1`.
    SigmaLast,
    /// Right transvection `rho_ij`: `a_i -> a_i a_j`.
    Rho,
    /// Left transvection `lambda_ij`: `a_i -> a_j a_i`.
    Lambda,
}

/// An endomorphism of `F_n` given by the images of `a_1..a_n`.
///
/// Automorphisms built from generators also carry the images of their inverse,
/// which makes inversion exact without Whitehead-style machinery. Equality and
/// hashing only look at the forward images.
#[derive(Clone)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<FreeWord>,
    inverse_images: Option<Vec<FreeWord>>,
}

impl PartialEq for FreeAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for FreeAutomorphism {}

impl Hash for FreeAutomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.images.hash(state);
    }
}

impl PartialOrd for FreeAutomorphism {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FreeAutomorphism {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, &self.images).cmp(&(other.rank, &other.images))
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::input(format!("index {i} outside 1..={n}")));
    }
    Ok(())
}

impl FreeAutomorphism {
    pub fn identity(rank: usize) -> Self {
        let images: Vec<FreeWord> = (1..=rank as i32).map(FreeWord::generator).collect();
        FreeAutomorphism { rank, inverse_images: Some(images.clone()), images }
    }

    /// An endomorphism with unknown inverse, e.g. from a text fixture.
    pub fn from_images(rank: usize, images: Vec<FreeWord>) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::input(format!("expected {rank} basis images, got {}", images.len())));
        }
        for w in &images {
            FreeWord::reduce(w.letters(), rank)?;
        }
        Ok(FreeAutomorphism { rank, images, inverse_images: None })
    }

    /// Parses one `"a1 -> a1 a2"` line per moved generator; unlisted generators are fixed.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let mut images: Vec<FreeWord> = (1..=rank as i32).map(FreeWord::generator).collect();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (lhs, rhs) =
                line.split_once("->").ok_or_else(|| Error::Parse(format!("missing '->' in {line:?}")))?;
            let source = FreeWord::parse(lhs, rank)?;
            match source.letters() {
                [k] if *k > 0 => images[*k as usize - 1] = FreeWord::parse(rhs, rank)?,
                _ => return Err(Error::Parse(format!("left side of {line:?} must be a generator"))),
            }
        }
        Self::from_images(rank, images)
    }

    /// One of the named generators, indices 1-based. `SigmaLast` ignores `j`.
    pub fn generator(kind: GeneratorKind, i: usize, j: usize, n: usize) -> Result<Self> {
        check_index(i, n)?;
        if kind != GeneratorKind::SigmaLast && kind != GeneratorKind::Epsilon {
            check_index(j, n)?;
            if i == j {
                return Err(Error::input(format!("{kind:?} needs distinct indices, got {i},{j}")));
            }
        }
        let a = |k: usize| k as i32;
        let mut images: Vec<FreeWord> = (1..=n as i32).map(FreeWord::generator).collect();
        let mut inverse = images.clone();
        match kind {
            GeneratorKind::Sigma => {
                images.swap(i - 1, j - 1);
                inverse = images.clone();
            }
            GeneratorKind::Epsilon => {
                images[i - 1] = FreeWord::generator(-a(i));
                inverse = images.clone();
            }
            GeneratorKind::SigmaLast => {
                for k in 1..=n {
                    images[k - 1] = if k == i {
                        FreeWord::generator(-a(i))
                    } else {
                        FreeWord::reduce_unchecked([a(k), -a(i)])
                    };
                }
                inverse = images.clone();
            }
            GeneratorKind::Rho => {
                images[i - 1] = FreeWord::reduce_unchecked([a(i), a(j)]);
                inverse[i - 1] = FreeWord::reduce_unchecked([a(i), -a(j)]);
            }
            GeneratorKind::Lambda => {
                images[i - 1] = FreeWord::reduce_unchecked([a(j), a(i)]);
                inverse[i - 1] = FreeWord::reduce_unchecked([-a(j), a(i)]);
            }
        }
        Ok(FreeAutomorphism { rank: n, images, inverse_images: Some(inverse) })
    }

    pub fn rho(i: usize, j: usize, n: usize) -> Result<Self> {
        Self::generator(GeneratorKind::Rho, i, j, n)
    }

    pub fn lambda(i: usize, j: usize, n: usize) -> Result<Self> {
        Self::generator(GeneratorKind::Lambda, i, j, n)
    }

    pub fn sigma(i: usize, j: usize, n: usize) -> Result<Self> {
        Self::generator(GeneratorKind::Sigma, i, j, n)
    }

    pub fn epsilon(i: usize, n: usize) -> Result<Self> {
        Self::generator(GeneratorKind::Epsilon, i, i, n)
    }

    pub fn sigma_last(i: usize, n: usize) -> Result<Self> {
        Self::generator(GeneratorKind::SigmaLast, i, i, n)
    }

    /// The automorphism realising a permutation `pi` of `1..=n+1` through the
    /// standard representation of `S_{n+1}`; `pi[k-1]` is the image of `k`.
    /// On `1..=n` alone this is `a_k -> a_pi(k)`.
    pub fn index_permutation(pi: &[usize], n: usize) -> Result<Self> {
        let degree = pi.len();
        if degree != n && degree != n + 1 {
            return Err(Error::input(format!("index permutation of length {degree} for rank {n}")));
        }
        if pi.contains(&0) {
            return Err(Error::input("index permutation is 1-based"));
        }
        Permutation::from_images(pi.iter().map(|&x| x as u32 - 1).collect())?;
        // Sorting pi by swaps gives pi o t_1 o ... o t_r = id, so pi = t_r o ... o t_1.
        let mut current: Vec<usize> = pi.to_vec();
        let mut factors = Vec::new();
        for k in 0..degree {
            if current[k] != k + 1 {
                let pos = current.iter().position(|&v| v == k + 1).expect("bijection");
                current.swap(k, pos);
                factors.push((k + 1, pos + 1));
            }
        }
        let mut acc = FreeAutomorphism::identity(n);
        for &(a, b) in factors.iter().rev() {
            let t = if b == n + 1 {
                Self::sigma_last(a, n)?
            } else if a == n + 1 {
                Self::sigma_last(b, n)?
            } else {
                Self::sigma(a, b, n)?
            };
            acc = acc.compose(&t)?;
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, w)| w.letters() == [k as i32 + 1])
    }

    fn check_rank(&self, other_rank: usize) -> Result<()> {
        if self.rank != other_rank {
            return Err(Error::input(format!("rank mismatch: {} vs {other_rank}", self.rank)));
        }
        Ok(())
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        self.apply_with_limit(w, DEFAULT_WORD_LIMIT)
    }

    pub fn apply_with_limit(&self, w: &FreeWord, limit: usize) -> Result<FreeWord> {
        substitute(&self.images, w, self.rank, limit)
    }

    /// `self o other`: apply `other`, then `self`.
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<Self> {
        self.check_rank(other.rank)?;
        let images = other
            .images
            .iter()
            .map(|w| substitute(&self.images, w, self.rank, DEFAULT_WORD_LIMIT))
            .collect::<Result<Vec<_>>>()?;
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(fi), Some(gi)) => Some(
                fi.iter()
                    .map(|w| substitute(gi, w, self.rank, DEFAULT_WORD_LIMIT))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Ok(FreeAutomorphism { rank: self.rank, images, inverse_images })
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .inverse_images
            .clone()
            .ok_or_else(|| Error::input("automorphism was built without a known inverse"))?;
        Ok(FreeAutomorphism { rank: self.rank, images: inv, inverse_images: Some(self.images.clone()) })
    }

    /// `g^-1 o self o g`.
    pub fn conjugate(&self, g: &FreeAutomorphism) -> Result<Self> {
        g.inverse()?.compose(self)?.compose(g)
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(&self, other: &FreeAutomorphism) -> Result<Self> {
        self.compose(other)?.compose(&self.inverse()?)?.compose(&other.inverse()?)
    }

    /// Matrix of the induced map on `Z^n`: column `k` counts the letters of the image of `a_k`.
    pub fn abelianize(&self) -> IntMatrix {
        let n = self.rank;
        let mut m = IntMatrix::zero(n);
        for (k, w) in self.images.iter().enumerate() {
            for &l in w.letters() {
                let row = l.unsigned_abs() as usize - 1;
                m.entries[row * n + k] += if l > 0 { 1 } else { -1 };
            }
        }
        m
    }

    pub fn in_saut(&self) -> Result<bool> {
        Ok(self.abelianize().determinant()? == 1)
    }

    /// True when every basis image is a single signed letter (an element of `B_n`).
    pub fn is_signed_letter(&self) -> bool {
        self.images.iter().all(|w| w.len() == 1)
    }

    /// Action on the `2n` signed letters: point `2k` is `a_{k+1}`, `2k+1` is its inverse.
    /// `x -> f^-1(x)`, a homomorphism into the left-to-right product of permutations.
    pub fn signed_perm_rep(&self) -> Result<Permutation> {
        if !self.is_signed_letter() {
            return Err(Error::input("automorphism does not permute signed letters"));
        }
        let n = self.rank;
        let point = |l: i32| -> usize {
            let base = 2 * (l.unsigned_abs() as usize - 1);
            if l > 0 {
                base
            } else {
                base + 1
            }
        };
        let mut images = vec![u32::MAX; 2 * n];
        for (k, w) in self.images.iter().enumerate() {
            let l = w.letters()[0];
            images[point(l)] = 2 * k as u32;
            images[point(-l)] = 2 * k as u32 + 1;
        }
        Permutation::from_images(images)
    }
}

/// Substitutes `images[k-1]` for every `a_k` in `w`, reducing as it goes.
fn substitute(images: &[FreeWord], w: &FreeWord, rank: usize, limit: usize) -> Result<FreeWord> {
    let mut out: Vec<i32> = Vec::new();
    for &l in w.letters() {
        let idx = l.unsigned_abs() as usize;
        if idx == 0 || idx > rank {
            return Err(Error::input(format!("letter {l} outside rank {rank}")));
        }
        let img = &images[idx - 1];
        let mut push = |x: i32| {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        };
        if l > 0 {
            img.letters().iter().for_each(|&x| push(x));
        } else {
            img.letters().iter().rev().for_each(|&x| push(-x));
        }
        if out.len() > limit {
            return Err(Error::capacity(format!("word length exceeded {limit} letters")));
        }
    }
    Ok(FreeWord { letters: out })
}

impl fmt::Display for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> =
            self.images.iter().enumerate().map(|(k, w)| format!("a{} -> {}", k + 1, w)).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

impl fmt::Debug for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|w| w.to_string()).collect();
        write!(f, "Aut[{}]", parts.join(", "))
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix { n, entries: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix rows must form a square"));
        }
        Ok(IntMatrix { n, entries: rows.concat() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.n + col]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::input("matrix size mismatch"));
        }
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    let term = self.get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or_else(|| Error::capacity("matrix entry overflow"))?;
                    acc = acc.checked_add(term).ok_or_else(|| Error::capacity("matrix entry overflow"))?;
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<i64> {
        let n = self.n;
        if n == 0 {
            return Ok(1);
        }
        let overflow = || Error::capacity("determinant overflow");
        let mut a: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or_else(overflow)?;
                    a[i * n + j] = num / prev;
                }
            }
            prev = a[k * n + k];
        }
        let det = sign * a[n * n - 1];
        i64::try_from(det).map_err(|_| overflow())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<i64>> = self.entries.chunks(self.n.max(1)).map(<[i64]>::to_vec).collect();
        write!(f, "{rows:?}")
    }
}

/// All products of `generators`, sorted. Fails once more than `bound` elements appear.
pub fn closure(generators: &[FreeAutomorphism], rank: usize, bound: usize) -> Result<Vec<FreeAutomorphism>> {
    let id = FreeAutomorphism::identity(rank);
    let mut seen: HashSet<FreeAutomorphism> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.compose(g)?;
            if !seen.contains(&y) {
                if seen.len() >= bound {
                    return Err(Error::capacity(format!("closure exceeded {bound} elements")));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Sign changes and transpositions generating `B_n`.
pub fn signed_permutation_generators(n: usize) -> Result<Vec<FreeAutomorphism>> {
    let mut gens = Vec::new();
    for i in 1..=n {
        gens.push(FreeAutomorphism::epsilon(i, n)?);
    }
    for i in 1..n {
        gens.push(FreeAutomorphism::sigma(i, i + 1, n)?);
    }
    Ok(gens)
}

/// The 3-cycles `a_k -> a_{k+1} -> a_{k+2} -> a_k` for `k = 1..=n-2`, generating `A_n`.
pub fn alternating_generators(n: usize) -> Result<Vec<FreeAutomorphism>> {
    (1..=n.saturating_sub(2))
        .map(|k| {
            let mut pi: Vec<usize> = (1..=n).collect();
            pi[k - 1] = k + 1;
            pi[k] = k + 2;
            pi[k + 1] = k;
            FreeAutomorphism::index_permutation(&pi, n)
        })
        .collect()
}

/// Fixed generators of `D_n'`: `eps_1 eps_2`, `eps_2 eps_3`, then the `A_n` 3-cycles.
pub fn d_prime_generators(n: usize) -> Result<Vec<FreeAutomorphism>> {
    if n < 3 {
        return Err(Error::input("D_n' generators need n >= 3"));
    }
    let e = |i| FreeAutomorphism::epsilon(i, n);
    let mut gens = vec![e(1)?.compose(&e(2)?)?, e(2)?.compose(&e(3)?)?];
    gens.extend(alternating_generators(n)?);
    Ok(gens)
}

/// Fixed generators of `A_{n+1}`: the `A_n` 3-cycles followed by the cycle on
/// `n-1, n, n+1` realised through `sigma_i(n+1)`.
pub fn alternating_plus_one_generators(n: usize) -> Result<Vec<FreeAutomorphism>> {
    if n < 2 {
        return Err(Error::input("A_{n+1} generators need n >= 2"));
    }
    let mut gens = alternating_generators(n)?;
    let mut pi: Vec<usize> = (1..=n + 1).collect();
    pi[n - 2] = n;
    pi[n - 1] = n + 1;
    pi[n] = n - 1;
    gens.push(FreeAutomorphism::index_permutation(&pi, n)?);
    Ok(gens)
}

/// Elements of `x`'s group list that commute with `x`, compared on basis images.
pub fn brute_force_centralizer(
    elements: &[FreeAutomorphism],
    x: &FreeAutomorphism,
) -> Result<Vec<FreeAutomorphism>> {
    let mut out = Vec::new();
    for g in elements {
        if g.compose(x)? == x.compose(g)? {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Elements fixing `a_1` and `a_2`.
pub fn fixing_first_two(elements: &[FreeAutomorphism]) -> Vec<FreeAutomorphism> {
    elements
        .iter()
        .filter(|g| g.images()[0].letters() == [1] && g.images()[1].letters() == [2])
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(letters: &[i32]) -> FreeWord {
        FreeWord::reduce(letters, 6).unwrap()
    }

    /// Repeatedly deletes the first cancelling pair until none is left.
    fn naive_reduce(letters: &[i32]) -> Vec<i32> {
        let mut v = letters.to_vec();
        loop {
            match (1..v.len()).find(|&i| v[i] == -v[i - 1]) {
                Some(i) => {
                    v.drain(i - 1..=i);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w(&[1, -1, 2]).letters(), &[2]);
        assert!(w(&[]).is_empty());
        assert_eq!(w(&[1, 2, -2, -1, 3]).letters(), &[3]);
        assert_eq!(naive_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert!(FreeWord::reduce(&[4], 3).is_err());
        assert!(FreeWord::reduce(&[0], 3).is_err());
    }

    #[test]
    fn generator_images() {
        let rho = FreeAutomorphism::rho(1, 2, 3).unwrap();
        assert_eq!(rho.apply(&w(&[1])).unwrap(), w(&[1, 2]));
        let eps = FreeAutomorphism::epsilon(1, 3).unwrap();
        assert_eq!(eps.apply(&w(&[1])).unwrap(), w(&[-1]));
        let sigma = FreeAutomorphism::sigma(1, 2, 3).unwrap();
        assert_eq!(sigma.apply(&w(&[3])).unwrap(), w(&[3]));
        let last = FreeAutomorphism::sigma_last(2, 3).unwrap();
        assert_eq!(last.images(), &[w(&[1, -2]), w(&[-2]), w(&[3, -2])]);
        assert!(FreeAutomorphism::rho(1, 1, 3).is_err());
        assert!(FreeAutomorphism::rho(1, 4, 3).is_err());
    }

    #[test]
    fn parse_fixture_text() {
        let rho = FreeAutomorphism::parse("a1 -> a1 a2", 3).unwrap();
        assert_eq!(rho, FreeAutomorphism::rho(1, 2, 3).unwrap());
        let lam = FreeAutomorphism::parse("a2 -> a3 a2\n", 3).unwrap();
        assert_eq!(lam, FreeAutomorphism::lambda(2, 3, 3).unwrap());
        assert!(FreeAutomorphism::parse("a1 a2 -> a1", 3).is_err());
        assert_eq!(format!("{}", FreeAutomorphism::epsilon(2, 2).unwrap()), "a1 -> a1\na2 -> a2^-1");
    }

    #[test]
    fn apply_examples() {
        let id = FreeAutomorphism::identity(3);
        assert_eq!(id.apply(&w(&[1, -3, 2])).unwrap(), w(&[1, -3, 2]));
        let rho = FreeAutomorphism::rho(1, 2, 3).unwrap();
        assert_eq!(rho.apply(&w(&[-1])).unwrap(), w(&[-2, -1]));
        let e = FreeAutomorphism::epsilon(1, 3).unwrap().compose(&FreeAutomorphism::epsilon(2, 3).unwrap()).unwrap();
        assert_eq!(e.apply(&w(&[1, 2])).unwrap(), w(&[-1, -2]));
        assert!(id.apply(&w(&[4])).is_err());
    }

    #[test]
    fn word_limit_guard() {
        let rho = FreeAutomorphism::rho(1, 2, 2).unwrap();
        let long = FreeWord::reduce(&[1; 10], 2).unwrap();
        assert!(matches!(rho.apply_with_limit(&long, 5), Err(Error::Capacity(_))));
    }

    #[test]
    fn compose_examples() {
        let n = 3;
        let lam12 = FreeAutomorphism::lambda(1, 2, n).unwrap();
        let lam21_inv = FreeAutomorphism::lambda(2, 1, n).unwrap().inverse().unwrap();
        let rho12 = FreeAutomorphism::rho(1, 2, n).unwrap();
        let lhs = lam12.compose(&lam21_inv).unwrap().compose(&rho12).unwrap();
        let rhs = FreeAutomorphism::epsilon(1, n)
            .unwrap()
            .compose(&FreeAutomorphism::sigma(1, 2, n).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);

        let s = FreeAutomorphism::sigma(1, 2, n).unwrap();
        assert!(s.compose(&s).unwrap().is_identity());

        let ee = FreeAutomorphism::epsilon(1, n)
            .unwrap()
            .compose(&FreeAutomorphism::epsilon(2, n).unwrap())
            .unwrap();
        assert_eq!(rho12.conjugate(&ee).unwrap(), lam12);
    }

    #[test]
    fn inverse_round_trip() {
        for kind in [GeneratorKind::Rho, GeneratorKind::Lambda, GeneratorKind::Sigma, GeneratorKind::SigmaLast] {
            let f = FreeAutomorphism::generator(kind, 2, 3, 4).unwrap();
            assert!(f.compose(&f.inverse().unwrap()).unwrap().is_identity());
            assert!(f.inverse().unwrap().compose(&f).unwrap().is_identity());
        }
        let fixture = FreeAutomorphism::parse("a1 -> a1 a2", 2).unwrap();
        assert!(fixture.inverse().is_err());
    }

    #[test]
    fn abelianize_examples() {
        let n = 4;
        let s = FreeAutomorphism::sigma(2, 4, n).unwrap().abelianize();
        let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        rows.swap(1, 3);
        assert_eq!(s, IntMatrix::from_rows(&rows).unwrap());

        let e = FreeAutomorphism::epsilon(3, n).unwrap().abelianize();
        let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        rows[2][2] = -1;
        assert_eq!(e, IntMatrix::from_rows(&rows).unwrap());

        let last = FreeAutomorphism::sigma_last(2, n).unwrap().abelianize();
        let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        rows[1] = vec![-1; n];
        assert_eq!(last, IntMatrix::from_rows(&rows).unwrap());
    }

    #[test]
    fn saut_membership() {
        let n = 3;
        assert!(FreeAutomorphism::rho(1, 2, n).unwrap().in_saut().unwrap());
        assert!(!FreeAutomorphism::epsilon(1, n).unwrap().in_saut().unwrap());
        let ee = FreeAutomorphism::epsilon(1, n)
            .unwrap()
            .compose(&FreeAutomorphism::epsilon(2, n).unwrap())
            .unwrap();
        assert!(ee.in_saut().unwrap());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn cofactor(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|c| {
                    let minor: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect())
                        .collect();
                    let s = if c % 2 == 0 { 1 } else { -1 };
                    s * m[0][c] * cofactor(&minor)
                })
                .sum()
        }
        let rows = vec![vec![0, 2, -1, 3], vec![1, 0, 4, -2], vec![5, -3, 0, 1], vec![2, 2, 2, 0]];
        let m = IntMatrix::from_rows(&rows).unwrap();
        assert_eq!(m.determinant().unwrap(), cofactor(&rows));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(singular.determinant().unwrap(), 0);
    }

    #[test]
    fn signed_perm_rep_examples() {
        assert!(FreeAutomorphism::identity(3).signed_perm_rep().unwrap().is_identity());
        let e1 = FreeAutomorphism::epsilon(1, 2).unwrap().signed_perm_rep().unwrap();
        assert_eq!(e1, Permutation::from_cycles(4, &[&[0, 1]]).unwrap());
        assert!(!e1.is_even());
        let ee = FreeAutomorphism::epsilon(1, 5)
            .unwrap()
            .compose(&FreeAutomorphism::epsilon(2, 5).unwrap())
            .unwrap()
            .signed_perm_rep()
            .unwrap();
        assert_eq!(ee.cycle_type().lengths(), &[2, 2, 1, 1, 1, 1, 1, 1]);
        assert!(ee.is_even());
        assert!(FreeAutomorphism::rho(1, 2, 3).unwrap().signed_perm_rep().is_err());
    }

    #[test]
    fn signed_perm_rep_is_a_homomorphism_on_b3() {
        let b3 = closure(&signed_permutation_generators(3).unwrap(), 3, 100).unwrap();
        assert_eq!(b3.len(), 48);
        let reps: Vec<Permutation> = b3.iter().map(|f| f.signed_perm_rep().unwrap()).collect();
        let distinct: HashSet<_> = reps.iter().cloned().collect();
        assert_eq!(distinct.len(), 48);
        for (f, rf) in b3.iter().zip(&reps) {
            for (g, rg) in b3.iter().zip(&reps) {
                assert_eq!(f.compose(g).unwrap().signed_perm_rep().unwrap(), rf * rg);
            }
        }
    }

    #[test]
    fn d_prime_membership_matches_determinant() {
        // Inside B_n, det = +1 exactly when the index permutation and the sign
        // vector have the same parity; D_n' is the part where both are even.
        for n in 2..=5 {
            let bn = closure(&signed_permutation_generators(n).unwrap(), n, 4000).unwrap();
            let mut saut_count = 0;
            for f in &bn {
                let negations = f.images().iter().filter(|w| w.letters()[0] < 0).count();
                let perm: Vec<u32> = f.images().iter().map(|w| w.letters()[0].unsigned_abs() - 1).collect();
                let perm_even = Permutation::from_images(perm).unwrap().is_even();
                let rep_even = f.signed_perm_rep().unwrap().is_even();
                assert_eq!(rep_even, negations % 2 == 0);
                assert_eq!(f.in_saut().unwrap(), perm_even == (negations % 2 == 0));
                if f.in_saut().unwrap() {
                    saut_count += 1;
                }
            }
            assert_eq!(saut_count * 2, bn.len());
        }
        let d5 = closure(&d_prime_generators(5).unwrap(), 5, 2000).unwrap();
        assert_eq!(d5.len(), 960);
        assert!(d5.iter().all(|f| f.in_saut().unwrap() && f.signed_perm_rep().unwrap().is_even()));
    }

    #[test]
    fn standard_representation_of_symmetric_group() {
        for n in 2..=4 {
            let s: Vec<FreeAutomorphism> = (1..=n)
                .map(|i| {
                    let mut pi: Vec<usize> = (1..=n + 1).collect();
                    pi.swap(i - 1, i);
                    FreeAutomorphism::index_permutation(&pi, n).unwrap()
                })
                .collect();
            // Coxeter relations of type A_n.
            for i in 0..n {
                assert!(s[i].compose(&s[i]).unwrap().is_identity());
                for j in i + 1..n {
                    let p = s[i].compose(&s[j]).unwrap();
                    let k = if j == i + 1 { 3 } else { 2 };
                    let mut acc = FreeAutomorphism::identity(n);
                    for _ in 0..k {
                        acc = acc.compose(&p).unwrap();
                    }
                    assert!(acc.is_identity(), "n={n} i={i} j={j}");
                }
            }
            let group = closure(&s, n, 1000).unwrap();
            let factorial: usize = (1..=n + 1).product();
            assert_eq!(group.len(), factorial);
        }
    }

    #[test]
    fn alternating_plus_one_has_the_right_order() {
        for n in 3..=5 {
            let g = closure(&alternating_plus_one_generators(n).unwrap(), n, 1000).unwrap();
            let half: usize = (1..=n + 1).product::<usize>() / 2;
            assert_eq!(g.len(), half);
            assert!(g.iter().all(|f| f.in_saut().unwrap()));
        }
    }

    #[test]
    fn centralizer_of_rho12_in_d5_prime() {
        let d5 = closure(&d_prime_generators(5).unwrap(), 5, 2000).unwrap();
        let rho = FreeAutomorphism::rho(1, 2, 5).unwrap();
        let cent = brute_force_centralizer(&d5, &rho).unwrap();
        let stab = fixing_first_two(&d5);
        assert_eq!(cent.len(), 12);
        assert_eq!(cent, stab);
        let everything = brute_force_centralizer(&d5, &FreeAutomorphism::identity(5)).unwrap();
        assert_eq!(everything.len(), 960);
    }

    fn word_strategy(rank: i32) -> impl Strategy<Value = FreeWord> {
        proptest::collection::vec((1..=rank, any::<bool>()), 0..12).prop_map(move |v| {
            let letters: Vec<i32> = v.into_iter().map(|(k, s)| if s { k } else { -k }).collect();
            FreeWord::reduce(&letters, rank as usize).unwrap()
        })
    }

    fn aut_strategy(n: usize) -> impl Strategy<Value = FreeAutomorphism> {
        proptest::collection::vec((0usize..5, 1..=n, 1..=n), 1..6).prop_map(move |steps| {
            let mut acc = FreeAutomorphism::identity(n);
            for (kind, i, j) in steps {
                let j = if i == j { i % n + 1 } else { j };
                let kind = [
                    GeneratorKind::Rho,
                    GeneratorKind::Lambda,
                    GeneratorKind::Sigma,
                    GeneratorKind::Epsilon,
                    GeneratorKind::SigmaLast,
                ][kind];
                acc = acc.compose(&FreeAutomorphism::generator(kind, i, j, n).unwrap()).unwrap();
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn reduce_matches_naive(v in proptest::collection::vec((1..=3i32, any::<bool>()), 0..20)) {
            let letters: Vec<i32> = v.into_iter().map(|(k, s)| if s { k } else { -k }).collect();
            let r = FreeWord::reduce(&letters, 3).unwrap();
            let expected = naive_reduce(&letters);
            prop_assert_eq!(r.letters(), expected.as_slice());
            prop_assert_eq!(FreeWord::reduce(r.letters(), 3).unwrap(), r);
        }

        #[test]
        fn apply_is_a_homomorphism(f in aut_strategy(3), u in word_strategy(3), v in word_strategy(3)) {
            let lhs = f.apply(&u.concat(&v)).unwrap();
            let rhs = f.apply(&u).unwrap().concat(&f.apply(&v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn abelianize_is_functorial(f in aut_strategy(3), g in aut_strategy(3)) {
            let lhs = f.compose(&g).unwrap().abelianize();
            let rhs = f.abelianize().mul(&g.abelianize()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(f.abelianize().determinant().unwrap().abs(), 1);
        }

        #[test]
        fn stored_inverse_is_exact(f in aut_strategy(4), u in word_strategy(4)) {
            let back = f.inverse().unwrap().apply(&f.apply(&u).unwrap()).unwrap();
            prop_assert_eq!(back, u);
        }
    }
}

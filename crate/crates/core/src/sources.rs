//! The finite source groups `D_n'` and `A_{n+1}` with their fixed generators,
//! the stabilizer `S`, and the conjugators used to spread `rho_12` to every pair.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::atlas::SmallGroup;
use crate::error::{Error, Result};
use crate::free_aut::{d_prime_generators, FreeAutomorphism};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    DPrime,
    AlternatingNext,
}

impl SourceKind {
    /// Positions of the `A_n` generators inside the fixed generator list.
    pub fn common_generators(self, n: usize) -> Range<usize> {
        match self {
            SourceKind::DPrime => 2..n,
            SourceKind::AlternatingNext => 0..n - 2,
        }
    }
}

/// `pi` (1-based images on `1..=k`) for the cycle `a -> a+1 -> a+2 -> a`.
fn three_cycle(k: usize, a: usize) -> Vec<usize> {
    let mut pi: Vec<usize> = (1..=k).collect();
    pi[a - 1] = a + 1;
    pi[a] = a + 2;
    pi[a + 1] = a;
    pi
}

/// Natural permutation of the index permutation `sigma_pi`: point `k-1` goes to `pi^-1(k) - 1`.
pub fn index_perm_rep(pi: &[usize]) -> Permutation {
    let mut images = vec![0u32; pi.len()];
    for (x, &px) in pi.iter().enumerate() {
        images[px - 1] = x as u32;
    }
    Permutation::from_images_unchecked(images)
}

/// Generators of `A_{n+1}` in its natural action on `n+1` points, matching
/// `free_aut::alternating_plus_one_generators`.
pub fn alternating_next_generators(n: usize) -> Vec<Permutation> {
    let mut gens: Vec<Permutation> = (1..=n - 2).map(|a| index_perm_rep(&three_cycle(n + 1, a))).collect();
    gens.push(index_perm_rep(&three_cycle(n + 1, n - 1)));
    gens
}

#[derive(Debug, Clone)]
pub struct SourceGroups {
    pub n: usize,
    pub d_prime: SmallGroup,
    pub alternating_next: SmallGroup,
    /// Elements of `D_n'` fixing `a_1` and `a_2`, ascending.
    pub stabilizer: Vec<u32>,
    pub stabilizer_generators: Vec<u32>,
    /// `(i, j, p)`: the smallest sign-free `p` with `rho_12^p = rho_ij`; pairs not
    /// reachable inside `A_n` are absent.
    pub pair_conjugators: Vec<(usize, usize, u32)>,
    /// `(i, j, e)` with `e = eps_i eps_j`.
    pub epsilon_pairs: Vec<(usize, usize, u32)>,
}

impl SourceGroups {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::input(format!("rank {n} below 3")));
        }
        let d_gens = d_prime_generators(n)?
            .iter()
            .map(FreeAutomorphism::signed_perm_rep)
            .collect::<Result<Vec<_>>>()?;
        let d_prime = SmallGroup::from_generators(format!("D{n}'"), 2 * n, d_gens)?;
        let alternating_next = SmallGroup::from_generators(format!("A{}", n + 1), n + 1, alternating_next_generators(n))?;

        let order = d_prime.order() as u32;
        let stabilizer: Vec<u32> = (0..order)
            .filter(|&e| {
                let p = d_prime.element(e);
                p.image(0) == 0 && p.image(2) == 2
            })
            .collect();
        let stabilizer_generators = d_prime.generating_set(&stabilizer);

        let sign_free = |p: &Permutation| (0..n as u32).all(|k| p.image(2 * k).is_multiple_of(2));
        let mut pair_conjugators = Vec::new();
        let mut epsilon_pairs = Vec::new();
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                let (pi, pj) = (2 * (i as u32 - 1), 2 * (j as u32 - 1));
                if let Some(e) = (0..order).find(|&e| {
                    let p = d_prime.element(e);
                    sign_free(p) && p.image(0) == pi && p.image(2) == pj
                }) {
                    pair_conjugators.push((i, j, e));
                }
                let flip = Permutation::from_cycles(2 * n, &[&[pi, pi + 1], &[pj, pj + 1]])?;
                let e = d_prime.index_of(&flip).ok_or_else(|| Error::input("eps_i eps_j outside D_n'"))?;
                epsilon_pairs.push((i, j, e));
            }
        }
        Ok(SourceGroups { n, d_prime, alternating_next, stabilizer, stabilizer_generators, pair_conjugators, epsilon_pairs })
    }

    pub fn group(&self, kind: SourceKind) -> &SmallGroup {
        match kind {
            SourceKind::DPrime => &self.d_prime,
            SourceKind::AlternatingNext => &self.alternating_next,
        }
    }

    pub fn pair_conjugator(&self, i: usize, j: usize) -> Option<u32> {
        self.pair_conjugators.iter().find(|c| c.0 == i && c.1 == j).map(|c| c.2)
    }

    pub fn epsilon_pair(&self, i: usize, j: usize) -> u32 {
        self.epsilon_pairs.iter().find(|c| c.0 == i && c.1 == j).map(|c| c.2).expect("every ordered pair")
    }
}

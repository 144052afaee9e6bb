//! Finite permutation groups: stabilizer chains, centralizers in `A_m`,
//! and conjugacy of subgroups and of generator tuples.

mod centralizer;
mod chain;
mod conjugacy;

use std::sync::OnceLock;

pub use centralizer::{centralizer_in_alternating, centralizer_in_symmetric, equivariant_map};
pub use chain::ChainElements;
pub use conjugacy::{are_conjugate_subgroups, tuple_conjugator, ConjugacyOptions, DEFAULT_NODE_BUDGET};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use chain::StabChain;

/// A permutation group given by generators, with a lazily built stabilizer chain.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::input(format!("generator of degree {} in group of degree {degree}", g.degree())));
        }
        Ok(PermGroup { degree, generators, chain: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), chain: OnceLock::new() }
    }

    pub fn symmetric(degree: usize) -> Self {
        let gens = (1..degree as u32)
            .map(|k| Permutation::transposition(degree, k - 1, k).expect("valid points"))
            .collect();
        PermGroup { degree, generators: gens, chain: OnceLock::new() }
    }

    /// `A_m` generated by the 3-cycles `(0 1 k)`.
    pub fn alternating(degree: usize) -> Self {
        let gens = (2..degree as u32)
            .map(|k| Permutation::from_cycles(degree, &[&[0, 1, k]]).expect("valid points"))
            .collect();
        PermGroup { degree, generators: gens, chain: OnceLock::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Builds the chain now; later queries reuse it.
    pub fn build_chain(self) -> Self {
        self.chain();
        self
    }

    fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::build(self.degree, &self.generators))
    }

    pub fn has_chain(&self) -> bool {
        self.chain.get().is_some()
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.chain().contains(p)
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain().base()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.chain().strong_generators()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    /// Element number `index` in chain order; stable across runs and machines.
    pub fn element_at(&self, index: u128) -> Result<Permutation> {
        if index >= self.order() {
            return Err(Error::input(format!("element index {index} out of range")));
        }
        Ok(self.chain().element_at(index))
    }

    /// Elements with chain indices in `start..end`.
    pub fn elements_range(&self, start: u128, end: u128) -> ChainElements<'_> {
        ChainElements::new(self.chain(), start, end)
    }

    /// All elements, sorted lexicographically on image arrays.
    pub fn elements(&self, bound: u128) -> Result<Vec<Permutation>> {
        let order = self.order();
        if order > bound {
            return Err(Error::capacity(format!("group of order {order} exceeds element bound {bound}")));
        }
        let mut out: Vec<Permutation> = self.elements_range(0, order).collect();
        out.sort();
        Ok(out)
    }

    /// Orbits of the group, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        orbits(self.degree, &self.generators)
    }

    pub fn all_even(&self) -> bool {
        self.generators.iter().all(Permutation::is_even)
    }
}

/// Orbits of `<gens>` on `0..degree`, each sorted, ordered by smallest point.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree as u32 {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        let mut orbit = vec![start];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for g in gens {
                let y = g.image(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// All products of `gens` by breadth-first closure; the independent oracle for chain results.
pub fn closure_elements(degree: usize, gens: &[Permutation], bound: usize) -> Result<Vec<Permutation>> {
    let mut seen = std::collections::HashSet::new();
    let id = Permutation::identity(degree);
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        head += 1;
        for g in gens {
            let y = &x * g;
            if seen.insert(y.clone()) {
                if seen.len() > bound {
                    return Err(Error::capacity(format!("closure exceeded {bound} elements")));
                }
                queue.push(y);
            }
        }
    }
    queue.sort();
    Ok(queue)
}

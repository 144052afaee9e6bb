//! Conjugacy of generator tuples and of subgroups inside `S_m` or `A_m`.

use std::collections::BTreeMap;

use super::centralizer::{centralizer_in_symmetric, equivariant_map};
use super::{orbits, PermGroup};
use crate::error::{Error, Result};
use crate::perm::{CycleType, Permutation};

/// Default bound on backtrack nodes for subgroup conjugacy.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Largest subgroup that will be materialized for conjugacy testing.
const ELEMENT_BOUND: u128 = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ConjugacyOptions {
    pub node_budget: u64,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        ConjugacyOptions { node_budget: DEFAULT_NODE_BUDGET }
    }
}

/// A permutation `g` with `a[i]^g == b[i]` for every `i`, if one exists in `S_m`.
///
/// Matches the orbits of `<a>` with isomorphic orbits of `<b>` greedily;
/// isomorphism of transitive constituents is an equivalence, so greedy is exact.
pub fn tuple_conjugator(degree: usize, a: &[Permutation], b: &[Permutation]) -> Result<Option<Permutation>> {
    if a.len() != b.len() {
        return Err(Error::input("tuples of different lengths"));
    }
    if a.iter().chain(b).any(|p| p.degree() != degree) {
        return Err(Error::input("tuple entries of different degrees"));
    }
    Ok(match_orbits(degree, a, b))
}

fn match_orbits(degree: usize, a: &[Permutation], b: &[Permutation]) -> Option<Permutation> {
    let orbs_a = orbits(degree, a);
    let orbs_b = orbits(degree, b);
    let mut used = vec![false; orbs_b.len()];
    let mut images = vec![u32::MAX; degree];
    for oa in &orbs_a {
        let x = oa[0];
        let mut matched = false;
        for (k, ob) in orbs_b.iter().enumerate() {
            if used[k] || ob.len() != oa.len() {
                continue;
            }
            if let Some(map) = ob.iter().find_map(|&y| equivariant_map(a, x, b, y)) {
                for (s, t) in map {
                    images[s as usize] = t;
                }
                used[k] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return None;
        }
    }
    Some(Permutation::from_images_unchecked(images))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AmbientKind {
    Symmetric,
    Alternating,
}

fn ambient_kind(ambient: &PermGroup) -> Result<AmbientKind> {
    let m = ambient.degree() as u128;
    let factorial: u128 = (1..=m).product();
    let order = ambient.order();
    if order == factorial {
        Ok(AmbientKind::Symmetric)
    } else if m >= 2 && order * 2 == factorial && ambient.all_even() {
        Ok(AmbientKind::Alternating)
    } else if m < 2 && order == 1 {
        Ok(AmbientKind::Symmetric)
    } else {
        Err(Error::input("subgroup conjugacy supports only S_m or A_m as the ambient group"))
    }
}

fn census(elements: &[Permutation]) -> BTreeMap<CycleType, usize> {
    let mut out = BTreeMap::new();
    for e in elements {
        *out.entry(e.cycle_type()).or_insert(0) += 1;
    }
    out
}

fn orbit_lengths(g: &PermGroup) -> Vec<usize> {
    let mut v: Vec<usize> = g.orbits().iter().map(Vec::len).collect();
    v.sort_unstable();
    v
}

/// Finds `g` in `ambient` (which must be `S_m` or `A_m`) with `h1^g == h2`.
///
/// Cheap invariants are compared first: order, orbit lengths, and the census of
/// element cycle types. The search then assigns images in `h2` to the
/// generators of `h1`, pruning prefixes that are not simultaneously conjugate.
pub fn are_conjugate_subgroups(
    ambient: &PermGroup,
    h1: &PermGroup,
    h2: &PermGroup,
    options: ConjugacyOptions,
) -> Result<Option<Permutation>> {
    let m = ambient.degree();
    if h1.degree() != m || h2.degree() != m {
        return Err(Error::input("subgroups and ambient group differ in degree"));
    }
    let kind = ambient_kind(ambient)?;
    if h1.order() != h2.order() || orbit_lengths(h1) != orbit_lengths(h2) {
        return Ok(None);
    }
    if h1.generators().iter().all(|g| h2.contains(g)) {
        return Ok(Some(Permutation::identity(m)));
    }
    let els1 = h1.elements(ELEMENT_BOUND)?;
    let els2 = h2.elements(ELEMENT_BOUND)?;
    if census(&els1) != census(&els2) {
        return Ok(None);
    }

    let gens1: Vec<Permutation> = h1.generators().iter().filter(|g| !g.is_identity()).cloned().collect();
    // Images of the first generator only need to range over H2-class representatives.
    let mut first_candidates = Vec::new();
    let mut covered = std::collections::HashSet::new();
    let ct0 = gens1[0].cycle_type();
    for e in els2.iter().filter(|e| e.cycle_type() == ct0) {
        if covered.contains(e) {
            continue;
        }
        for k in &els2 {
            covered.insert(e.conjugate_by(k));
        }
        first_candidates.push(e.clone());
    }
    let candidates: Vec<Vec<&Permutation>> = gens1
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if i == 0 {
                first_candidates.iter().collect()
            } else {
                let ct = g.cycle_type();
                els2.iter().filter(|e| e.cycle_type() == ct).collect()
            }
        })
        .collect();
    let odd_in_h2 = h2.generators().iter().find(|g| !g.is_even()).cloned();

    let mut search = Search {
        gens1: &gens1,
        candidates: &candidates,
        chosen: Vec::new(),
        nodes: 0,
        budget: options.node_budget,
    };
    search.run(&mut |tuple, conj| {
        if kind == AmbientKind::Symmetric || conj.is_even() {
            return Ok(Some(conj.clone()));
        }
        if let Some(k) = &odd_in_h2 {
            return Ok(Some(conj * k));
        }
        let cent = centralizer_in_symmetric(m, tuple)?;
        Ok(cent.generators().iter().find(|c| !c.is_even()).map(|c| conj * c))
    })
}

struct Search<'a> {
    gens1: &'a [Permutation],
    candidates: &'a [Vec<&'a Permutation>],
    chosen: Vec<Permutation>,
    nodes: u64,
    budget: u64,
}

type Accept<'f> = dyn FnMut(&[Permutation], &Permutation) -> Result<Option<Permutation>> + 'f;

impl Search<'_> {
    fn run(&mut self, accept: &mut Accept<'_>) -> Result<Option<Permutation>> {
        let depth = self.chosen.len();
        for &cand in &self.candidates[depth] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::capacity(format!("subgroup conjugacy exceeded {} nodes", self.budget)));
            }
            self.chosen.push(cand.clone());
            let prefix = &self.gens1[..=depth];
            if let Some(conj) = match_orbits(cand.degree(), prefix, &self.chosen) {
                if depth + 1 == self.gens1.len() {
                    let tuple = self.chosen.clone();
                    if let Some(g) = accept(&tuple, &conj)? {
                        return Ok(Some(g));
                    }
                } else if let Some(g) = self.run(accept)? {
                    return Ok(Some(g));
                }
            }
            self.chosen.pop();
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn cyc(m: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(m, cycles).unwrap()
    }

    fn group(m: usize, gens: Vec<Permutation>) -> PermGroup {
        PermGroup::new(m, gens).unwrap()
    }

    fn verify(h1: &PermGroup, h2: &PermGroup, g: &Permutation) -> bool {
        let conj: Vec<Permutation> = h1.generators().iter().map(|x| x.conjugate_by(g)).collect();
        group(h1.degree(), conj).elements(u128::MAX).unwrap() == h2.elements(u128::MAX).unwrap()
    }

    #[test]
    fn tuple_conjugator_examples() {
        let a = [cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[3, 4]])];
        let g = cyc(5, &[&[0, 4, 2, 1, 3]]);
        let b: Vec<Permutation> = a.iter().map(|x| x.conjugate_by(&g)).collect();
        let found = tuple_conjugator(5, &a, &b).unwrap().unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(&x.conjugate_by(&found), y);
        }
        let c = [cyc(5, &[&[0, 1, 2]]), cyc(5, &[&[0, 1]])];
        assert!(tuple_conjugator(5, &a, &c).unwrap().is_none());
    }

    #[test]
    fn identical_subgroups() {
        let h = group(5, vec![cyc(5, &[&[0, 1, 2]])]);
        let g = are_conjugate_subgroups(&PermGroup::symmetric(5), &h, &h, Default::default()).unwrap();
        assert_eq!(g, Some(Permutation::identity(5)));
    }

    #[test]
    fn point_stabilizers_of_a5_are_conjugate() {
        let a5 = PermGroup::alternating(5);
        let stab = |p: u32| {
            let others: Vec<u32> = (0..5).filter(|&x| x != p).collect();
            group(5, vec![
                cyc(5, &[&[others[0], others[1], others[2]]]),
                cyc(5, &[&[others[1], others[2], others[3]]]),
            ])
        };
        let (h1, h2) = (stab(0), stab(3));
        let g = are_conjugate_subgroups(&a5, &h1, &h2, Default::default()).unwrap().unwrap();
        assert!(g.is_even());
        assert!(verify(&h1, &h2, &g));
    }

    #[test]
    fn different_orders_are_not_conjugate() {
        let h1 = group(4, vec![cyc(4, &[&[0, 1], &[2, 3]])]);
        let h2 = group(4, vec![cyc(4, &[&[0, 1, 2]])]);
        assert!(are_conjugate_subgroups(&PermGroup::symmetric(4), &h1, &h2, Default::default()).unwrap().is_none());
    }

    #[test]
    fn same_invariants_but_not_conjugate() {
        // Two Klein four-groups in S_4: the normal one and a non-normal one.
        let v_normal = group(4, vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])]);
        let v_other = group(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]);
        let s4 = PermGroup::symmetric(4);
        assert!(are_conjugate_subgroups(&s4, &v_normal, &v_other, Default::default()).unwrap().is_none());
        // <(0 1)(2 3)> and <(0 1)(2 3)(4 5)> agree on order but not on census.
        let a = group(6, vec![cyc(6, &[&[0, 1], &[2, 3]])]);
        let b = group(6, vec![cyc(6, &[&[0, 1], &[2, 3], &[4, 5]])]);
        assert!(are_conjugate_subgroups(&PermGroup::symmetric(6), &a, &b, Default::default()).unwrap().is_none());
    }

    #[test]
    fn alternating_ambient_splits_classes() {
        // <(0 1 2 3 4)> and <(0 2 1 3 4)>... in A_5 all cyclic subgroups of order 5 are conjugate,
        // but (0 1)(2 3) generated subgroups in A_4 vs a conjugate by an odd element remain conjugate too.
        let a4 = PermGroup::alternating(4);
        let h1 = group(4, vec![cyc(4, &[&[0, 1, 2]])]);
        let h2 = group(4, vec![cyc(4, &[&[0, 2, 1]])]);
        let g = are_conjugate_subgroups(&a4, &h1, &h2, Default::default()).unwrap().unwrap();
        assert!(g.is_even() && verify(&h1, &h2, &g));

        // In A_3 the subgroups <(0 1)> do not exist; use A_5 with a subgroup whose
        // S_5-normalizer is even only: the regular C_5 case still has odd normalizer
        // elements, so parity adjustment through the centralizer must succeed.
        let a5 = PermGroup::alternating(5);
        let c5a = group(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]);
        let c5b = group(5, vec![cyc(5, &[&[0, 2, 4, 1, 3]]).conjugate_by(&cyc(5, &[&[0, 1]]))]);
        let g = are_conjugate_subgroups(&a5, &c5a, &c5b, Default::default()).unwrap().unwrap();
        assert!(g.is_even() && verify(&c5a, &c5b, &g));
    }

    #[test]
    fn symmetric_and_random_agreement() {
        let mut rng = StdRng::seed_from_u64(3);
        let s6 = PermGroup::symmetric(6);
        for _ in 0..30 {
            let mut v: Vec<u32> = (0..6).collect();
            v.shuffle(&mut rng);
            let g = Permutation::from_images(v).unwrap();
            let h1 = group(6, vec![cyc(6, &[&[0, 1, 2]]), cyc(6, &[&[3, 4]])]);
            let h2 = group(6, h1.generators().iter().map(|x| x.conjugate_by(&g)).collect());
            let f = are_conjugate_subgroups(&s6, &h1, &h2, Default::default()).unwrap().unwrap();
            assert!(verify(&h1, &h2, &f));
            let b = are_conjugate_subgroups(&s6, &h2, &h1, Default::default()).unwrap().unwrap();
            assert!(verify(&h2, &h1, &b));
        }
    }

    #[test]
    fn budget_overflow_is_a_capacity_error() {
        let h1 = group(6, vec![cyc(6, &[&[0, 1, 2]]), cyc(6, &[&[3, 4, 5]])]);
        let h2 = group(6, vec![cyc(6, &[&[0, 1, 3]]), cyc(6, &[&[2, 4, 5]])]);
        let r = are_conjugate_subgroups(&PermGroup::symmetric(6), &h1, &h2, ConjugacyOptions { node_budget: 1 });
        assert!(matches!(r, Err(Error::Capacity(_))));
    }
}

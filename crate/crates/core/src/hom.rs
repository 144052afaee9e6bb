//! Homomorphisms from a small group into `S_m`, up to conjugacy in `S_m`.
//!
//! A class is a multiset of transitive constituents, each the action on the
//! cosets of a subgroup class, padded with fixed points up to degree `m`.

use serde::{Deserialize, Serialize};

use crate::atlas::{coset_action, SmallGroup, SubgroupClass};
use crate::error::{Error, Result};
use crate::group::{are_conjugate_subgroups, tuple_conjugator, ConjugacyOptions, PermGroup};
use crate::perm::Permutation;
use crate::sources::SourceKind;

/// Default bound on the number of constituent multisets per degree.
pub const DEFAULT_MULTISET_BOUND: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomClass {
    pub source: String,
    pub degree: usize,
    pub generator_images: Vec<Permutation>,
    /// `(subgroup class id, multiplicity)`, ascending by id. Empty for the trivial class.
    pub constituents: Vec<(usize, usize)>,
    pub lands_in_alternating: bool,
    pub injective: bool,
}

impl HomClass {
    pub fn is_trivial(&self) -> bool {
        self.generator_images.iter().all(Permutation::is_identity)
    }

    /// Degree covered by constituents; the rest are fixed points.
    pub fn moved_degree(&self, classes: &[SubgroupClass]) -> usize {
        self.constituents.iter().map(|&(c, k)| classes[c].index * k).sum()
    }
}

/// Transitive constituents of a group: the coset action for every proper
/// subgroup class of index at most `max_degree`.
#[derive(Debug, Clone)]
pub struct Constituents {
    source: String,
    group_order: usize,
    generator_count: usize,
    /// `(class id, index, generator images)`, ascending by class id.
    actions: Vec<(usize, usize, Vec<Permutation>)>,
}

impl Constituents {
    pub fn new(g: &SmallGroup, classes: &[SubgroupClass], max_degree: usize) -> Result<Self> {
        let mut actions = Vec::new();
        for (id, c) in classes.iter().enumerate() {
            if c.index >= 2 && c.index <= max_degree {
                actions.push((id, c.index, coset_action(g, &c.representative)?));
            }
        }
        Ok(Constituents {
            source: g.name().to_string(),
            group_order: g.order(),
            generator_count: g.generators().len(),
            actions,
        })
    }

    fn build(&self, picks: &[usize], m: usize) -> Result<HomClass> {
        let mut images: Vec<Permutation> = vec![Permutation::identity(0); self.generator_count];
        let mut constituents: Vec<(usize, usize)> = Vec::new();
        for &p in picks {
            let (id, _, action) = &self.actions[p];
            for (img, a) in images.iter_mut().zip(action) {
                *img = img.direct_sum(a);
            }
            match constituents.last_mut() {
                Some((last, k)) if last == id => *k += 1,
                _ => constituents.push((*id, 1)),
            }
        }
        let images: Vec<Permutation> = images.iter().map(|p| p.padded(m)).collect();
        let lands_in_alternating = images.iter().all(Permutation::is_even);
        let injective = PermGroup::new(m, images.clone())?.order() == self.group_order as u128;
        Ok(HomClass {
            source: self.source.clone(),
            degree: m,
            generator_images: images,
            constituents,
            lands_in_alternating,
            injective,
        })
    }

    /// Every class of homomorphisms into `S_m`, trivial class first, then
    /// constituent multisets in lexicographic order of their class ids.
    pub fn enumerate_all(&self, m: usize, bound: usize) -> Result<Vec<HomClass>> {
        if m == 0 {
            return Err(Error::input("degree must be positive"));
        }
        let mut picks_list: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.multisets(0, m, &mut stack, &mut picks_list, bound)?;
        picks_list.iter().map(|picks| self.build(picks, m)).collect()
    }

    fn multisets(
        &self,
        from: usize,
        remaining: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        bound: usize,
    ) -> Result<()> {
        if out.len() >= bound {
            return Err(Error::capacity(format!("more than {bound} constituent multisets")));
        }
        out.push(stack.clone());
        for p in from..self.actions.len() {
            let index = self.actions[p].1;
            if index <= remaining {
                stack.push(p);
                self.multisets(p, remaining - index, stack, out, bound)?;
                stack.pop();
            }
        }
        Ok(())
    }

    /// Classes whose image lies in `A_m`.
    pub fn enumerate(&self, m: usize, bound: usize) -> Result<Vec<HomClass>> {
        Ok(self.enumerate_all(m, bound)?.into_iter().filter(|h| h.lands_in_alternating).collect())
    }
}

/// Classes of homomorphisms `g -> S_m` with image in `A_m`.
pub fn enumerate_hom_classes(g: &SmallGroup, classes: &[SubgroupClass], m: usize) -> Result<Vec<HomClass>> {
    Constituents::new(g, classes, m)?.enumerate(m, DEFAULT_MULTISET_BOUND)
}

/// Classes of homomorphisms `g -> S_m`, with no parity restriction.
pub fn enumerate_hom_classes_all(g: &SmallGroup, classes: &[SubgroupClass], m: usize) -> Result<Vec<HomClass>> {
    Constituents::new(g, classes, m)?.enumerate_all(m, DEFAULT_MULTISET_BOUND)
}

pub fn is_injective(h: &HomClass, g: &SmallGroup) -> Result<bool> {
    Ok(PermGroup::new(h.degree, h.generator_images.clone())?.order() == g.order() as u128)
}

/// Images of the common `A_n` generators.
pub fn restriction_images(h: &HomClass, kind: SourceKind, n: usize) -> Vec<Permutation> {
    h.generator_images[kind.common_generators(n)].to_vec()
}

/// Keeps each `alpha` whose restriction to `A_n` generates a subgroup
/// `S_m`-conjugate to the restriction of some `beta`.
pub fn compatibility_filter(
    alphas: &[HomClass],
    betas: &[HomClass],
    n: usize,
    m: usize,
    options: ConjugacyOptions,
) -> Result<Vec<HomClass>> {
    let ambient = PermGroup::symmetric(m);
    let beta_groups: Vec<PermGroup> = betas
        .iter()
        .map(|b| PermGroup::new(m, restriction_images(b, SourceKind::AlternatingNext, n)))
        .collect::<Result<_>>()?;
    let mut kept = Vec::new();
    for a in alphas {
        let h1 = PermGroup::new(m, restriction_images(a, SourceKind::DPrime, n))?;
        let mut found = false;
        for h2 in &beta_groups {
            if are_conjugate_subgroups(&ambient, &h1, h2, options)?.is_some() {
                found = true;
                break;
            }
        }
        if found {
            kept.push(a.clone());
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InjectivityMode {
    #[default]
    Auto,
    On,
    Off,
}

impl std::str::FromStr for InjectivityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InjectivityMode::Auto),
            "on" => Ok(InjectivityMode::On),
            "off" => Ok(InjectivityMode::Off),
            other => Err(Error::input(format!("injectivity mode {other:?} (expected auto, on or off)"))),
        }
    }
}

/// Whether non-injective restriction classes may be dropped at `(n, m)`, and
/// the reason recorded in certificates.
pub fn injectivity_justification(mode: InjectivityMode, n: usize, m: usize) -> Option<String> {
    match mode {
        InjectivityMode::Off => None,
        InjectivityMode::On => Some(format!("forced on by configuration at rank {n}, degree {m}")),
        InjectivityMode::Auto if n == 5 && m < 31 => Some(format!(
            "rank 5, degree {m} < 31: the image of SL_5(Z) in A_{m} cannot contain an element of order 31, \
             so a non-injective restriction forces a trivial action"
        )),
        InjectivityMode::Auto => None,
    }
}

/// Largest degree for which `brute_force_homs` will run.
pub const BRUTE_FORCE_MAX_DEGREE: usize = 7;

/// All homomorphisms `g -> S_m` by direct search over generator images,
/// reduced to `S_m`-classes by pairwise conjugacy tests. Constituents are not computed.
pub fn brute_force_homs(g: &SmallGroup, m: usize) -> Result<Vec<HomClass>> {
    if m == 0 {
        return Err(Error::input("degree must be positive"));
    }
    if m > BRUTE_FORCE_MAX_DEGREE {
        return Err(Error::capacity(format!("brute force limited to degree {BRUTE_FORCE_MAX_DEGREE}")));
    }
    let sym = PermGroup::symmetric(m).elements(u128::MAX)?;
    let gens = g.generators();
    let candidates: Vec<Vec<&Permutation>> = gens
        .iter()
        .map(|&s| {
            let ord = g.element(s).order();
            sym.iter().filter(|p| ord.is_multiple_of(p.order())).collect()
        })
        .collect();

    let mut reps: Vec<Vec<Permutation>> = Vec::new();
    let mut chosen: Vec<Permutation> = Vec::new();
    search(g, m, &candidates, &mut chosen, &mut reps)?;
    reps.iter()
        .map(|images| {
            Ok(HomClass {
                source: g.name().to_string(),
                degree: m,
                generator_images: images.clone(),
                constituents: vec![],
                lands_in_alternating: images.iter().all(Permutation::is_even),
                injective: PermGroup::new(m, images.clone())?.order() == g.order() as u128,
            })
        })
        .collect()
}

fn search(
    g: &SmallGroup,
    m: usize,
    candidates: &[Vec<&Permutation>],
    chosen: &mut Vec<Permutation>,
    reps: &mut Vec<Vec<Permutation>>,
) -> Result<()> {
    let j = chosen.len();
    if j == candidates.len() {
        for r in reps.iter() {
            if tuple_conjugator(m, chosen, r)?.is_some() {
                return Ok(());
            }
        }
        reps.push(chosen.clone());
        return Ok(());
    }
    for &p in &candidates[j] {
        chosen.push(p.clone());
        if consistent_on_prefix(g, chosen) {
            search(g, m, candidates, chosen, reps)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// Whether the images of the first `images.len()` generators extend to a
/// homomorphism on the subgroup they generate.
fn consistent_on_prefix(g: &SmallGroup, images: &[Permutation]) -> bool {
    let gens = &g.generators()[..images.len()];
    let degree = images[0].degree();
    let mut img: Vec<Option<Permutation>> = vec![None; g.order()];
    img[g.identity() as usize] = Some(Permutation::identity(degree));
    let mut queue = vec![g.identity()];
    let mut head = 0;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        let ie = img[e as usize].clone().expect("queued");
        for (&s, p) in gens.iter().zip(images) {
            let f = g.mul(e, s);
            let candidate = &ie * p;
            match &img[f as usize] {
                Some(existing) if *existing != candidate => return false,
                Some(_) => {}
                None => {
                    img[f as usize] = Some(candidate);
                    queue.push(f);
                }
            }
        }
    }
    true
}

/// Whether two class lists describe the same set of `S_m`-classes.
pub fn same_class_sets(a: &[HomClass], b: &[HomClass]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut hit = false;
        for (k, y) in b.iter().enumerate() {
            if used[k] || x.degree != y.degree {
                continue;
            }
            if tuple_conjugator(x.degree, &x.generator_images, &y.generator_images)?.is_some() {
                used[k] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{named, subgroup_classes};
    use crate::sources::SourceGroups;

    fn all(g: &SmallGroup, m: usize) -> Vec<HomClass> {
        enumerate_hom_classes_all(g, &subgroup_classes(g).unwrap(), m).unwrap()
    }

    #[test]
    fn cyclic_two_examples() {
        let c2 = named::cyclic(2);
        let classes = subgroup_classes(&c2).unwrap();
        let everything = all(&c2, 3);
        assert_eq!(everything.len(), 2);
        let even = enumerate_hom_classes(&c2, &classes, 3).unwrap();
        assert_eq!(even.len(), 1);
        assert!(even[0].is_trivial());
        assert_eq!(all(&c2, 4).len(), 3);
        assert_eq!(brute_force_homs(&c2, 4).unwrap().len(), 3);
    }

    #[test]
    fn degree_one_and_trivial_group() {
        for g in [named::cyclic(3), named::symmetric(3), named::alternating(5)] {
            let h = all(&g, 1);
            assert_eq!(h.len(), 1);
            assert!(h[0].is_trivial());
        }
        let t = named::trivial();
        assert_eq!(brute_force_homs(&t, 4).unwrap().len(), 1);
        assert_eq!(all(&t, 4).len(), 1);
    }

    #[test]
    fn a6_has_no_nontrivial_action_below_six() {
        let a6 = named::alternating(6);
        let classes = subgroup_classes(&a6).unwrap();
        assert_eq!(enumerate_hom_classes(&a6, &classes, 5).unwrap().len(), 1);
        assert_eq!(brute_force_homs(&a6, 5).unwrap().len(), 1);
        let six = enumerate_hom_classes(&a6, &classes, 6).unwrap();
        // Trivial plus the two natural actions swapped by the outer automorphism.
        assert_eq!(six.len(), 3);
        assert!(six.iter().filter(|h| !h.is_trivial()).all(|h| h.injective));
    }

    #[test]
    fn classes_are_homomorphisms_with_correct_flags() {
        let s = SourceGroups::new(4).unwrap();
        let g = &s.d_prime;
        let classes = subgroup_classes(g).unwrap();
        for h in all(g, 8) {
            assert!(g.extend_hom(8, &h.generator_images).unwrap().is_some());
            assert_eq!(h.lands_in_alternating, h.generator_images.iter().all(Permutation::is_even));
            assert_eq!(h.injective, is_injective(&h, g).unwrap());
            assert!(h.moved_degree(&classes) <= 8);
        }
    }

    #[test]
    fn injectivity_examples() {
        let s = SourceGroups::new(5).unwrap();
        let g = &s.d_prime;
        let classes = subgroup_classes(g).unwrap();
        let homs = enumerate_hom_classes(g, &classes, 10).unwrap();
        assert!(!homs[0].injective);
        assert!(homs.iter().any(|h| h.injective));
        for h in &homs {
            // The kernel is the intersection of the constituents' cores.
            let mut kernel: Vec<u32> = (0..g.order() as u32).collect();
            for &(c, _) in &h.constituents {
                let core = g.core(&classes[c].representative);
                kernel.retain(|x| core.binary_search(x).is_ok());
            }
            assert_eq!(h.injective, kernel.len() == 1);
        }
    }

    #[test]
    fn restriction_of_natural_classes() {
        let s = SourceGroups::new(5).unwrap();
        let g = &s.d_prime;
        let classes = subgroup_classes(g).unwrap();
        // The signed action is the coset action on the stabilizer of point 0.
        let natural: Vec<Permutation> = g.generators().iter().map(|&e| g.element(e).clone()).collect();
        let found = enumerate_hom_classes(g, &classes, 10)
            .unwrap()
            .into_iter()
            .find(|h| tuple_conjugator(10, &h.generator_images, &natural).unwrap().is_some())
            .expect("signed action present");
        for p in restriction_images(&found, SourceKind::DPrime, 5) {
            assert_eq!(p.cycle_type().lengths(), &[3, 3, 1, 1, 1, 1]);
        }
        let b = &s.alternating_next;
        let bclasses = subgroup_classes(b).unwrap();
        let six = enumerate_hom_classes(b, &bclasses, 6).unwrap();
        let natural_b: Vec<Permutation> = b.generators().iter().map(|&e| b.element(e).clone()).collect();
        let nat = six.iter().find(|h| tuple_conjugator(6, &h.generator_images, &natural_b).unwrap().is_some()).unwrap();
        let restricted = restriction_images(nat, SourceKind::AlternatingNext, 5);
        let fixed: Vec<usize> =
            (0..6u32).filter(|&x| restricted.iter().all(|p| p.image(x) == x)).map(|x| x as usize).collect();
        assert_eq!(fixed.len(), 1);
        assert!(restriction_images(&six[0], SourceKind::AlternatingNext, 5).iter().all(Permutation::is_identity));
    }

    #[test]
    fn compatibility_filter_only_shrinks() {
        let s = SourceGroups::new(3).unwrap();
        let ca = subgroup_classes(&s.d_prime).unwrap();
        let cb = subgroup_classes(&s.alternating_next).unwrap();
        for m in 1..=7 {
            let alphas = enumerate_hom_classes(&s.d_prime, &ca, m).unwrap();
            let betas = enumerate_hom_classes(&s.alternating_next, &cb, m).unwrap();
            let kept = compatibility_filter(&alphas, &betas, 3, m, ConjugacyOptions::default()).unwrap();
            assert!(kept.iter().all(|k| alphas.contains(k)));
            assert!(kept.iter().any(HomClass::is_trivial));
        }
    }

    #[test]
    fn injectivity_table() {
        assert!(injectivity_justification(InjectivityMode::Auto, 5, 17).is_some());
        assert!(injectivity_justification(InjectivityMode::Auto, 5, 31).is_none());
        assert!(injectivity_justification(InjectivityMode::Auto, 3, 7).is_none());
        assert!(injectivity_justification(InjectivityMode::Auto, 4, 8).is_none());
        assert!(injectivity_justification(InjectivityMode::Off, 5, 10).is_none());
        assert!(injectivity_justification(InjectivityMode::On, 3, 7).is_some());
        assert!("sometimes".parse::<InjectivityMode>().is_err());
    }

    #[test]
    fn oracle_equivalence_small() {
        let cases: Vec<(SmallGroup, usize)> = vec![
            (named::cyclic(2), 4),
            (named::cyclic(2), 5),
            (named::symmetric(3), 5),
        ];
        for (g, m) in cases {
            let fast = all(&g, m);
            let slow = brute_force_homs(&g, m).unwrap();
            assert!(same_class_sets(&fast, &slow).unwrap(), "{} into S_{m}", g.name());
        }
    }
}

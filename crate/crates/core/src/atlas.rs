//! Small finite groups held as full multiplication tables, their conjugacy
//! classes of subgroups, and right-coset actions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::closure_elements;
use crate::perm::Permutation;

/// Largest group this module will tabulate.
pub const MAX_ORDER: usize = 10_000;

/// A finite group with a faithful permutation representation, its sorted
/// element list, a multiplication table, and a fixed ordered generating set.
#[derive(Debug, Clone)]
pub struct SmallGroup {
    name: String,
    degree: usize,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, u32>,
    generators: Vec<u32>,
    mult: Vec<u32>,
    inv: Vec<u32>,
}

impl SmallGroup {
    pub fn from_generators(name: impl Into<String>, degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::input("generator degree mismatch"));
        }
        let elements = closure_elements(degree, &generators, MAX_ORDER)?;
        let lookup: HashMap<Permutation, u32> =
            elements.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let order = elements.len();
        let mut mult = vec![0u32; order * order];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                mult[i * order + j] = lookup[&(a * b)];
            }
        }
        let inv = elements.iter().map(|a| lookup[&a.inverse()]).collect();
        let generators = generators.iter().map(|g| lookup[g]).collect();
        Ok(SmallGroup { name: name.into(), degree, elements, lookup, generators, mult, inv })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Permutation {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<u32> {
        self.lookup.get(p).copied()
    }

    /// Element indices of the fixed generators, in order.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn identity(&self) -> u32 {
        // The identity sorts first among image arrays.
        0
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mult[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// `g^-1 x g`.
    #[inline]
    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), x), g)
    }

    /// Extends an assignment of generator images to every element, or returns
    /// `None` when the assignment violates a relation of the group.
    pub fn extend_hom(&self, degree: usize, images: &[Permutation]) -> Result<Option<Vec<Permutation>>> {
        if images.len() != self.generators.len() {
            return Err(Error::input(format!(
                "{} generator images for {} generators",
                images.len(),
                self.generators.len()
            )));
        }
        if images.iter().any(|p| p.degree() != degree) {
            return Err(Error::input("generator images of different degrees"));
        }
        let mut out: Vec<Option<Permutation>> = vec![None; self.order()];
        out[self.identity() as usize] = Some(Permutation::identity(degree));
        let mut queue = vec![self.identity()];
        let mut head = 0;
        while head < queue.len() {
            let e = queue[head];
            head += 1;
            let img_e = out[e as usize].clone().expect("queued");
            for (g, img_g) in self.generators.iter().zip(images) {
                let f = self.mul(e, *g);
                let candidate = &img_e * img_g;
                match &out[f as usize] {
                    Some(existing) if *existing != candidate => return Ok(None),
                    Some(_) => {}
                    None => {
                        out[f as usize] = Some(candidate);
                        queue.push(f);
                    }
                }
            }
        }
        Ok(Some(out.into_iter().map(|p| p.expect("generators generate")).collect()))
    }

    /// Closure of `gens` (element indices) as a sorted index list.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let id = self.identity();
        seen[id as usize] = true;
        let mut queue = vec![id];
        let mut head = 0;
        while head < queue.len() {
            let e = queue[head];
            head += 1;
            for &g in gens {
                let f = self.mul(e, g);
                if !seen[f as usize] {
                    seen[f as usize] = true;
                    queue.push(f);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    pub fn is_subgroup(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.order()];
        for &x in set {
            member[x as usize] = true;
        }
        member[self.identity() as usize]
            && set.iter().all(|&a| set.iter().all(|&b| member[self.mul(a, b) as usize]))
    }

    /// Greedy generating set of a subgroup, in element order.
    pub fn generating_set(&self, set: &[u32]) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity()];
        for &x in set {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.subgroup_closure(&gens);
                if span.len() == set.len() {
                    break;
                }
            }
        }
        gens
    }

    fn conjugate_set(&self, set: &[u32], g: u32) -> Vec<u32> {
        let mut v: Vec<u32> = set.iter().map(|&x| self.conj(x, g)).collect();
        v.sort_unstable();
        v
    }

    /// Intersection of all conjugates of `set`.
    pub fn core(&self, set: &[u32]) -> Vec<u32> {
        let mut count = vec![0usize; self.order()];
        for g in 0..self.order() as u32 {
            for x in self.conjugate_set(set, g) {
                count[x as usize] += 1;
            }
        }
        (0..self.order() as u32).filter(|&x| count[x as usize] == self.order()).collect()
    }
}

/// One conjugacy class of subgroups, represented by its lexicographically least member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupClass {
    /// Sorted element indices of the representative.
    pub representative: Vec<u32>,
    pub order: usize,
    pub index: usize,
    /// Number of conjugates.
    pub class_size: usize,
    /// Generating set of the representative (element indices).
    pub generators: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_set(order: usize, set: &[u32]) -> Self {
        let mut b = vec![0u64; order.div_ceil(64)];
        for &x in set {
            b[x as usize / 64] |= 1 << (x % 64);
        }
        Bits(b)
    }

    fn contains(&self, x: u32) -> bool {
        self.0[x as usize / 64] >> (x % 64) & 1 == 1
    }
}

/// Every conjugacy class of subgroups of `g`, ordered by `(order, representative)`.
///
/// Subgroups are built by joining a class representative with one more element;
/// every subgroup is the join of one of its maximal subgroups and an element
/// outside it, so the search reaches every class.
pub fn subgroup_classes(g: &SmallGroup) -> Result<Vec<SubgroupClass>> {
    let order = g.order();
    if order > MAX_ORDER {
        return Err(Error::capacity(format!("group of order {order} exceeds {MAX_ORDER}")));
    }
    let mut seen: HashMap<Bits, usize> = HashMap::new();
    let mut classes: Vec<SubgroupClass> = Vec::new();

    let register = |set: Vec<u32>, seen: &mut HashMap<Bits, usize>, classes: &mut Vec<SubgroupClass>| -> usize {
        let key = Bits::from_set(order, &set);
        if let Some(&id) = seen.get(&key) {
            return id;
        }
        let id = classes.len();
        let mut conjugates: Vec<Vec<u32>> = Vec::new();
        for x in 0..order as u32 {
            let c = g.conjugate_set(&set, x);
            let bits = Bits::from_set(order, &c);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(bits) {
                e.insert(id);
                conjugates.push(c);
            }
        }
        let class_size = conjugates.len();
        let representative = conjugates.into_iter().min().expect("at least the set itself");
        let generators = g.generating_set(&representative);
        classes.push(SubgroupClass {
            order: representative.len(),
            index: order / representative.len(),
            class_size,
            generators,
            representative,
        });
        id
    };

    register(vec![g.identity()], &mut seen, &mut classes);
    let mut next = 0;
    while next < classes.len() {
        let rep = classes[next].representative.clone();
        let rep_gens = classes[next].generators.clone();
        next += 1;
        let member = Bits::from_set(order, &rep);
        // Elements of the normalizer permute the joins among conjugates, and
        // every element of a coset H x gives the same join.
        let normalizer: Vec<u32> = (0..order as u32)
            .filter(|&n| rep_gens.iter().all(|&h| member.contains(g.conj(h, n))))
            .collect();
        let mut done = vec![false; order];
        for x in 0..order as u32 {
            if done[x as usize] || member.contains(x) {
                continue;
            }
            for &n in &normalizer {
                let xn = g.conj(x, n);
                for &h in &rep {
                    done[g.mul(h, xn) as usize] = true;
                }
            }
            let mut gens = rep_gens.clone();
            gens.push(x);
            let joined = g.subgroup_closure(&gens);
            register(joined, &mut seen, &mut classes);
        }
    }
    classes.sort_by(|a, b| (a.order, &a.representative).cmp(&(b.order, &b.representative)));
    Ok(classes)
}

/// The action of `g`'s fixed generators on the right cosets of `h`.
///
/// Point 0 is the coset `h` itself; further cosets are numbered in
/// breadth-first order along the generators.
pub fn coset_action(g: &SmallGroup, h: &[u32]) -> Result<Vec<Permutation>> {
    if !g.is_subgroup(h) {
        return Err(Error::input("coset action needs a subgroup"));
    }
    let order = g.order();
    let index = order / h.len();
    let mut coset_of = vec![u32::MAX; order];
    let mut reps: Vec<u32> = Vec::with_capacity(index);
    let assign = |rep: u32, coset_of: &mut Vec<u32>, reps: &mut Vec<u32>| -> u32 {
        let id = reps.len() as u32;
        for &x in h {
            coset_of[g.mul(x, rep) as usize] = id;
        }
        reps.push(rep);
        id
    };
    assign(g.identity(), &mut coset_of, &mut reps);
    let mut head = 0;
    while head < reps.len() {
        let r = reps[head];
        head += 1;
        for &s in g.generators() {
            let y = g.mul(r, s);
            if coset_of[y as usize] == u32::MAX {
                assign(y, &mut coset_of, &mut reps);
            }
        }
    }
    debug_assert_eq!(reps.len(), index);
    Ok(g.generators()
        .iter()
        .map(|&s| {
            let images = reps.iter().map(|&r| coset_of[g.mul(r, s) as usize]).collect();
            Permutation::from_images_unchecked(images)
        })
        .collect())
}

/// Named small groups used as sources and as test subjects.
pub mod named {
    use super::*;

    pub fn trivial() -> SmallGroup {
        SmallGroup::from_generators("1", 1, vec![]).expect("trivial group")
    }

    pub fn cyclic(k: usize) -> SmallGroup {
        let cycle: Vec<u32> = (0..k as u32).collect();
        let g = Permutation::from_cycles(k, &[&cycle]).expect("cycle");
        SmallGroup::from_generators(format!("C{k}"), k, vec![g]).expect("cyclic group")
    }

    pub fn symmetric(k: usize) -> SmallGroup {
        let gens = (1..k as u32).map(|i| Permutation::transposition(k, i - 1, i).expect("points")).collect();
        SmallGroup::from_generators(format!("S{k}"), k, gens).expect("symmetric group")
    }

    /// `A_k` generated by `(i, i+1, i+2)`.
    pub fn alternating(k: usize) -> SmallGroup {
        let gens = (0..k.saturating_sub(2) as u32)
            .map(|i| Permutation::from_cycles(k, &[&[i, i + 1, i + 2]]).expect("points"))
            .collect();
        SmallGroup::from_generators(format!("A{k}"), k, gens).expect("alternating group")
    }
}

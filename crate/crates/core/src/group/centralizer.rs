//! Centralizers of permutation groups inside `S_m` and `A_m`.
//!
//! The centralizer of `<H>` permutes the `H`-orbits, sending each orbit to an
//! isomorphic one, and inside an orbit it is determined by the image of one
//! point. So it is the product over isomorphism types of `C_T wr S_k`, and a
//! generating set falls out of the equivariant maps between orbits.

use super::{orbits, PermGroup};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// The map `x^w -> y^w` (words `w` in the generators), if it is well defined and injective.
///
/// `gens_a[i]` acts on the source side and `gens_b[i]` on the target side.
/// Returns the `(source, target)` pairs in breadth-first order from `x`.
pub fn equivariant_map(gens_a: &[Permutation], x: u32, gens_b: &[Permutation], y: u32) -> Option<Vec<(u32, u32)>> {
    debug_assert_eq!(gens_a.len(), gens_b.len());
    let degree = gens_a.first().map(Permutation::degree).or_else(|| gens_b.first().map(Permutation::degree));
    let degree = match degree {
        Some(d) => d,
        None => return Some(vec![(x, y)]),
    };
    let mut forward = vec![u32::MAX; degree];
    let mut used = vec![false; degree];
    forward[x as usize] = y;
    used[y as usize] = true;
    let mut order = vec![x];
    let mut head = 0;
    while head < order.len() {
        let z = order[head];
        head += 1;
        let fz = forward[z as usize];
        for (a, b) in gens_a.iter().zip(gens_b) {
            let za = a.image(z);
            let target = b.image(fz);
            let current = forward[za as usize];
            if current == u32::MAX {
                if used[target as usize] {
                    return None;
                }
                forward[za as usize] = target;
                used[target as usize] = true;
                order.push(za);
            } else if current != target {
                return None;
            }
        }
    }
    Some(order.into_iter().map(|z| (z, forward[z as usize])).collect())
}

fn check_degrees(m: usize, h: &[Permutation]) -> Result<()> {
    if let Some(p) = h.iter().find(|p| p.degree() != m) {
        return Err(Error::input(format!("element of degree {} in centralizer query of degree {m}", p.degree())));
    }
    Ok(())
}

/// An orbit together with the equivariant map from its class representative.
type Member = (usize, Vec<(u32, u32)>);

fn symmetric_generators(m: usize, h: &[Permutation]) -> Vec<Permutation> {
    let orbs = orbits(m, h);
    // classes[c] = (representative orbit, members with the map from the representative's base)
    let mut classes: Vec<(usize, Vec<Member>)> = Vec::new();
    for (o, orbit) in orbs.iter().enumerate() {
        let x = orbit[0];
        let mut placed = false;
        for (rep, members) in classes.iter_mut() {
            let rep_orbit = &orbs[*rep];
            if rep_orbit.len() != orbit.len() {
                continue;
            }
            if let Some(map) = orbit.iter().find_map(|&y| equivariant_map(h, rep_orbit[0], h, y)) {
                members.push((o, map));
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((o, vec![(o, equivariant_map(h, x, h, x).expect("identity map"))]));
        }
    }

    let mut gens = Vec::new();
    for (rep, members) in &classes {
        let rep_orbit = &orbs[*rep];
        let x = rep_orbit[0];
        // Within the representative orbit: every well-defined self map.
        for &y in &rep_orbit[1..] {
            if let Some(map) = equivariant_map(h, x, h, y) {
                let mut images: Vec<u32> = (0..m as u32).collect();
                for (a, b) in map {
                    images[a as usize] = b;
                }
                gens.push(Permutation::from_images_unchecked(images));
            }
        }
        // Swaps of consecutive isomorphic orbits through the representative.
        for pair in members.windows(2) {
            let (from, to) = (&pair[0].1, &pair[1].1);
            let mut images: Vec<u32> = (0..m as u32).collect();
            // from: rep -> orbit k, to: rep -> orbit k+1, aligned by the same BFS order.
            let mut rep_to_from = vec![u32::MAX; m];
            for &(r, a) in from {
                rep_to_from[r as usize] = a;
            }
            for &(r, b) in to {
                let a = rep_to_from[r as usize];
                images[a as usize] = b;
                images[b as usize] = a;
            }
            gens.push(Permutation::from_images_unchecked(images));
        }
    }
    gens
}

/// Generators of the centralizer of `<h>` in `S_m`.
pub fn centralizer_in_symmetric(m: usize, h: &[Permutation]) -> Result<PermGroup> {
    check_degrees(m, h)?;
    PermGroup::new(m, symmetric_generators(m, h))
}

/// Generators of the exact centralizer of `<h>` in `A_m`.
pub fn centralizer_in_alternating(m: usize, h: &[Permutation]) -> Result<PermGroup> {
    check_degrees(m, h)?;
    PermGroup::new(m, even_part(symmetric_generators(m, h)))
}

/// Schreier generators of the even subgroup of `<gens>` for the transversal `{1, o}`.
pub(crate) fn even_part(gens: Vec<Permutation>) -> Vec<Permutation> {
    let odd = match gens.iter().find(|g| !g.is_even()) {
        Some(o) => o.clone(),
        None => return gens,
    };
    let odd_inv = odd.inverse();
    let mut out = Vec::new();
    let mut push = |p: Permutation| {
        if !p.is_identity() && !out.contains(&p) {
            out.push(p);
        }
    };
    for g in &gens {
        if g.is_even() {
            push(g.clone());
            push(g.conjugate_by(&odd_inv));
        } else {
            push(g * &odd_inv);
            push(&odd * g);
        }
    }
    out
}

//! Deterministic Schreier-Sims.

use crate::perm::Permutation;

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub base: u32,
    pub gens: Vec<Permutation>,
    /// Orbit of `base` under `gens`, ascending.
    pub orbit: Vec<u32>,
    /// `transversal[x]` maps `base` to `x`.
    pub transversal: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut level = Level { base, gens: Vec::new(), orbit: Vec::new(), transversal: vec![None; degree] };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        let mut transversal: Vec<Option<Permutation>> = vec![None; degree];
        transversal[self.base as usize] = Some(Permutation::identity(degree));
        let mut queue = vec![self.base];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let ux = transversal[x as usize].clone().expect("queued points have representatives");
            for g in &self.gens {
                let y = g.image(x);
                if transversal[y as usize].is_none() {
                    transversal[y as usize] = Some(&ux * g);
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        self.orbit = queue;
        self.transversal = transversal;
    }
}

#[derive(Debug, Clone)]
pub(crate) struct StabChain {
    pub degree: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    pub fn build(degree: usize, generators: &[Permutation]) -> Self {
        let mut chain = StabChain { degree, levels: Vec::new() };
        for g in generators {
            if g.is_identity() {
                continue;
            }
            let (residue, drop) = chain.sift(g, 0);
            if !residue.is_identity() {
                chain.add_strong_generator(residue, 0, drop);
            }
        }
        chain.complete();
        chain
    }

    /// Sifts `g` from level `start`; returns the residue and the level it stopped at.
    pub fn sift(&self, g: &Permutation, start: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let y = h.image(level.base);
            match &level.transversal[y as usize] {
                Some(u) => h = &h * &u.inverse(),
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    /// Adds `h` (fixing the base points of levels below `from`) as a strong
    /// generator of levels `from..=to`, opening a new level if needed.
    fn add_strong_generator(&mut self, h: Permutation, from: usize, to: usize) {
        if to == self.levels.len() {
            let base = h.first_moved().expect("residue is not the identity");
            self.levels.push(Level::new(base, self.degree));
        }
        for l in from..=to {
            self.levels[l].gens.push(h.clone());
            self.levels[l].rebuild(self.degree);
        }
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let l = i - 1;
            let level = &self.levels[l];
            let mut found = None;
            'search: for &x in &level.orbit {
                let ux = level.transversal[x as usize].as_ref().unwrap();
                for g in &level.gens {
                    let y = g.image(x);
                    let uy = level.transversal[y as usize].as_ref().unwrap();
                    let schreier = &(ux * g) * &uy.inverse();
                    if schreier.is_identity() {
                        continue;
                    }
                    let (residue, drop) = self.sift(&schreier, l + 1);
                    if !residue.is_identity() {
                        found = Some((residue, drop));
                        break 'search;
                    }
                }
            }
            match found {
                Some((residue, drop)) => {
                    self.add_strong_generator(residue, l + 1, drop);
                    i = drop + 1;
                    continue 'outer;
                }
                None => i -= 1,
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.degree() == self.degree && self.sift(p, 0).0.is_identity()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }

    fn coords(&self, mut index: u128) -> Vec<usize> {
        let mut coords = vec![0usize; self.levels.len()];
        for (l, level) in self.levels.iter().enumerate().rev() {
            let r = level.orbit.len() as u128;
            coords[l] = (index % r) as usize;
            index /= r;
        }
        coords
    }

    fn rep(&self, level: usize, coord: usize) -> &Permutation {
        let lv = &self.levels[level];
        lv.transversal[lv.orbit[coord] as usize].as_ref().unwrap()
    }

    /// The element with the given index in chain order:
    /// `u_{L-1} * ... * u_1 * u_0`, level 0 most significant.
    pub fn element_at(&self, index: u128) -> Permutation {
        let coords = self.coords(index);
        let mut g = Permutation::identity(self.degree);
        for (l, &c) in coords.iter().enumerate() {
            g = self.rep(l, c) * &g;
        }
        g
    }
}

/// Iterates chain elements with indices in `start..end`, in index order.
pub struct ChainElements<'a> {
    chain: &'a StabChain,
    coords: Vec<usize>,
    /// `suffix[l] = u_l * ... * u_0` for the current coordinates.
    suffix: Vec<Permutation>,
    next: u128,
    end: u128,
}

impl<'a> ChainElements<'a> {
    pub(crate) fn new(chain: &'a StabChain, start: u128, end: u128) -> Self {
        let end = end.min(chain.order());
        let coords = chain.coords(start.min(end));
        let mut it = ChainElements { chain, coords, suffix: Vec::new(), next: start, end };
        it.recompute_from(0);
        it
    }

    fn recompute_from(&mut self, from: usize) {
        self.suffix.truncate(from);
        for l in from..self.coords.len() {
            let u = self.chain.rep(l, self.coords[l]);
            let s = match l {
                0 => u.clone(),
                _ => u * &self.suffix[l - 1],
            };
            self.suffix.push(s);
        }
    }

    fn advance(&mut self) {
        let mut l = self.coords.len();
        while l > 0 {
            l -= 1;
            self.coords[l] += 1;
            if self.coords[l] < self.chain.levels[l].orbit.len() {
                self.recompute_from(l);
                return;
            }
            self.coords[l] = 0;
        }
        self.recompute_from(0);
    }
}

impl Iterator for ChainElements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.next >= self.end {
            return None;
        }
        let g = match self.suffix.last() {
            Some(g) => g.clone(),
            None => Permutation::identity(self.chain.degree),
        };
        self.next += 1;
        if self.next < self.end {
            self.advance();
        }
        Some(g)
    }
}

//! Permutations of `{0, .., N-1}` and groups given by generators, with a
//! deterministic Schreier-Sims stabilizer chain for order and membership.
//!
//! Permutations act on the right: `p.compose(&q)` applies `p` first.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            match seen.get_mut(i as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::NotAPermutation),
            }
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                *images.get_mut(p as usize).ok_or(Error::NotAPermutation)? = next;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn first_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &j)| i as u32 != j)
            .map(|(i, _)| i as u32)
    }

    /// Sign as +1/-1 (used by tests as a parity oracle).
    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.images.len()];
        let mut sign = 1;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.images.len()];
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            write!(f, "(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.images[p] as usize;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: u32,
    orbit: Vec<u32>,
    reps: Vec<Option<Permutation>>,
    inv_reps: Vec<Option<Permutation>>,
}

#[derive(Debug, Clone)]
struct Chain {
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceCell<Chain>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceCell::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: OnceCell::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// The orbit of `point` under the generators, in BFS order.
    pub fn orbit(&self, point: u32) -> Result<Vec<u32>> {
        if point as usize >= self.degree {
            return Err(Error::PointOutOfRange {
                point: point as usize,
                degree: self.degree,
            });
        }
        let mut seen = vec![false; self.degree];
        seen[point as usize] = true;
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in &self.generators {
                let x = g.apply(p);
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    orbit.push(x);
                }
            }
        }
        Ok(orbit)
    }

    /// Orbits on ordered pairs under the componentwise action. Entry
    /// `a * N + b` holds the orbit index of `(a, b)`; orbits are numbered by
    /// first occurrence in row-major order.
    pub fn orbits_on_pairs(&self) -> Vec<u32> {
        let n = self.degree;
        let mut uf = UnionFind::new(n * n);
        for g in &self.generators {
            for a in 0..n {
                let ga = g.apply(a as u32) as usize;
                for b in 0..n {
                    let gb = g.apply(b as u32) as usize;
                    uf.union(a * n + b, ga * n + gb);
                }
            }
        }
        let mut label = vec![u32::MAX; n * n];
        let mut out = Vec::with_capacity(n * n);
        let mut next = 0;
        for i in 0..n * n {
            let root = uf.find(i);
            if label[root] == u32::MAX {
                label[root] = next;
                next += 1;
            }
            out.push(label[root]);
        }
        out
    }

    fn chain(&self) -> &Chain {
        self.chain
            .get_or_init(|| Chain::build(self.degree, &self.generators))
    }

    /// Exact order from the stabilizer chain.
    pub fn order(&self) -> u128 {
        self.chain()
            .levels
            .iter()
            .map(|l| l.orbit.len() as u128)
            .product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain().levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.chain().strong
    }

    pub fn contains(&self, f: &Permutation) -> Result<bool> {
        if f.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: f.degree(),
            });
        }
        let (residue, _) = self.chain().sift(f.clone(), 0);
        Ok(residue.is_identity())
    }

    /// Visits every element exactly once, as products of coset
    /// representatives from the deepest level up.
    pub fn for_each_element(&self, mut visit: impl FnMut(&Permutation)) {
        let chain = self.chain();
        let levels = &chain.levels;
        if levels.is_empty() {
            visit(&Permutation::identity(self.degree));
            return;
        }
        fn walk(
            levels: &[Level],
            depth: usize,
            prefix: &Permutation,
            visit: &mut dyn FnMut(&Permutation),
        ) {
            let level = &levels[depth];
            for &p in &level.orbit {
                let rep = level.reps[p as usize].as_ref().expect("orbit point has a rep");
                let next = prefix.compose(rep);
                if depth == 0 {
                    visit(&next);
                } else {
                    walk(levels, depth - 1, &next, visit);
                }
            }
        }
        let top = levels.len() - 1;
        walk(levels, top, &Permutation::identity(self.degree), &mut visit);
    }
}

impl Chain {
    fn build(degree: usize, generators: &[Permutation]) -> Chain {
        let mut strong: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        let mut base: Vec<u32> = Vec::new();
        for g in &strong {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved_point().expect("non-identity"));
            }
        }
        let mut chain = Chain {
            strong,
            levels: Vec::new(),
        };
        for (i, &b) in base.iter().enumerate() {
            let level = chain.make_level(degree, &base[..i], b);
            chain.levels.push(level);
        }

        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match chain.failing_schreier_generator(lvl, &base) {
                None => i -= 1,
                Some((residue, j)) => {
                    if j == base.len() {
                        base.push(residue.first_moved_point().expect("non-identity residue"));
                    }
                    chain.strong.push(residue);
                    for l in lvl + 1..=j {
                        let level = chain.make_level(degree, &base[..l], base[l]);
                        if l < chain.levels.len() {
                            chain.levels[l] = level;
                        } else {
                            chain.levels.push(level);
                        }
                    }
                    i = j as isize;
                }
            }
        }
        chain
    }

    fn failing_schreier_generator(&self, lvl: usize, base: &[u32]) -> Option<(Permutation, usize)> {
        let level = &self.levels[lvl];
        let gens: Vec<&Permutation> = self
            .strong
            .iter()
            .filter(|s| base[..lvl].iter().all(|&b| s.apply(b) == b))
            .collect();
        for &p in &level.orbit {
            let rep = level.reps[p as usize].as_ref().unwrap();
            for s in &gens {
                let img = s.apply(p);
                let inv = level.inv_reps[img as usize].as_ref().unwrap();
                let h = rep.compose(s).compose(inv);
                if h.is_identity() {
                    continue;
                }
                let (residue, j) = self.sift(h, lvl + 1);
                if !residue.is_identity() {
                    return Some((residue, j));
                }
            }
        }
        None
    }

    fn make_level(&self, degree: usize, fixed: &[u32], base: u32) -> Level {
        let gens: Vec<&Permutation> = self
            .strong
            .iter()
            .filter(|s| fixed.iter().all(|&b| s.apply(b) == b))
            .collect();
        let mut reps: Vec<Option<Permutation>> = vec![None; degree];
        let mut inv_reps: Vec<Option<Permutation>> = vec![None; degree];
        reps[base as usize] = Some(Permutation::identity(degree));
        inv_reps[base as usize] = Some(Permutation::identity(degree));
        let mut orbit = vec![base];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for s in &gens {
                let x = s.apply(p);
                if reps[x as usize].is_none() {
                    let rep = reps[p as usize].as_ref().unwrap().compose(s);
                    inv_reps[x as usize] = Some(rep.inverse());
                    reps[x as usize] = Some(rep);
                    orbit.push(x);
                }
            }
        }
        Level {
            base,
            orbit,
            reps,
            inv_reps,
        }
    }

    /// Strips `g` through the levels from `start`; returns the residue and
    /// the level at which stripping stopped (`levels.len()` if it went
    /// through).
    fn sift(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let x = g.apply(level.base);
            match &level.inv_reps[x as usize] {
                None => return (g, l),
                Some(inv) => g = g.compose(inv),
            }
        }
        (g, self.levels.len())
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn cyc(n: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    fn symmetric_gens(n: usize) -> Vec<Permutation> {
        let long: Vec<u32> = (0..n as u32).collect();
        vec![cyc(n, &[&[0, 1]]), cyc(n, &[&long])]
    }

    fn alternating_gens(n: usize) -> Vec<Permutation> {
        (2..n as u32).map(|k| cyc(n, &[&[0, 1, k]])).collect()
    }

    /// Closure by BFS over products with generators.
    fn brute_closure(degree: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
        let mut seen = BTreeSet::new();
        let id = Permutation::identity(degree);
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(p) = queue.pop() {
            for g in gens {
                let x = p.compose(g);
                if seen.insert(x.clone()) {
                    queue.push(x);
                }
            }
        }
        seen
    }

    #[test]
    fn orbit_examples() {
        let g = PermGroup::trivial(4);
        assert_eq!(g.orbit(2).unwrap(), vec![2]);
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        let mut o = g.orbit(0).unwrap();
        o.sort();
        assert_eq!(o, vec![0, 1, 2, 3, 4]);
        let g = PermGroup::new(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]).unwrap();
        let mut o = g.orbit(0).unwrap();
        o.sort();
        assert_eq!(o, vec![0, 1]);
        assert!(matches!(g.orbit(4), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn pair_orbit_examples() {
        let count = |v: &[u32]| v.iter().collect::<BTreeSet<_>>().len();
        let g = PermGroup::trivial(2);
        assert_eq!(g.orbits_on_pairs(), vec![0, 1, 2, 3]);
        let g = PermGroup::new(3, symmetric_gens(3)).unwrap();
        let o = g.orbits_on_pairs();
        assert_eq!(count(&o), 2);
        assert_eq!(o, vec![0, 1, 1, 1, 0, 1, 1, 1, 0]);
        let g = PermGroup::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let o = g.orbits_on_pairs();
        assert_eq!(count(&o), 3);
        for k in 0..3 {
            assert_eq!(o.iter().filter(|&&x| x == k).count(), 3);
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(PermGroup::new(4, symmetric_gens(4)).unwrap().order(), 24);
        let g = PermGroup::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(PermGroup::trivial(7).order(), 1);
        assert_eq!(PermGroup::new(7, symmetric_gens(7)).unwrap().order(), 5040);
        assert_eq!(PermGroup::new(9, alternating_gens(9)).unwrap().order(), 181440);
    }

    #[test]
    fn membership_examples() {
        let g = PermGroup::new(3, vec![cyc(3, &[&[0, 1]])]).unwrap();
        assert!(g.contains(&Permutation::identity(3)).unwrap());
        assert!(!g.contains(&cyc(3, &[&[0, 1, 2]])).unwrap());
        let a5 = PermGroup::new(5, alternating_gens(5)).unwrap();
        let t = cyc(5, &[&[1, 3]]);
        assert_eq!(t.sign(), -1);
        assert!(!a5.contains(&t).unwrap());
        assert!(a5.contains(&cyc(5, &[&[0, 1], &[2, 3]])).unwrap());
        assert!(matches!(
            a5.contains(&Permutation::identity(4)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn orders_match_brute_closure() {
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            (4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]),
            (6, vec![cyc(6, &[&[0, 1, 2]]), cyc(6, &[&[3, 4, 5]]), cyc(6, &[&[0, 3], &[1, 4], &[2, 5]])]),
            (8, vec![cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]), cyc(8, &[&[1, 7], &[2, 6], &[3, 5]])]),
            (8, vec![cyc(8, &[&[0, 1, 3, 7, 6, 4], &[2, 5]]), cyc(8, &[&[0, 2], &[1, 3], &[4, 6], &[5, 7]])]),
            (6, alternating_gens(6)),
            (7, vec![cyc(7, &[&[0, 1, 2, 3, 4, 5, 6]]), cyc(7, &[&[1, 2, 4], &[3, 6, 5]])]),
        ];
        for (n, gens) in cases {
            let g = PermGroup::new(n, gens.clone()).unwrap();
            let closure = brute_closure(n, &gens);
            assert_eq!(g.order(), closure.len() as u128);
            for x in &closure {
                assert!(g.contains(x).unwrap());
            }
            let mut visited = BTreeSet::new();
            g.for_each_element(|p| {
                visited.insert(p.clone());
            });
            assert_eq!(visited, closure);
        }
    }

    #[test]
    fn base_starts_at_smallest_moved_point() {
        let g = PermGroup::new(6, vec![cyc(6, &[&[2, 3, 4]])]).unwrap();
        assert_eq!(g.base(), vec![2]);
    }
}

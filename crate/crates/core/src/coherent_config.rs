//! Dense coherent configurations on `{0, .., N-1}`.
//!
//! A configuration is stored as an `N x N` row-major matrix of color
//! indices `0..rank`. The coherent closure of an arbitrary coloring is its
//! 2-dimensional Weisfeiler-Leman stable refinement; colors are always
//! renumbered by first occurrence in a row-major scan, so two colorings
//! describe the same partition iff their canonical matrices are equal.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Default bound on the number of points of a 2-extension.
pub const DEFAULT_EXTENSION_POINTS: usize = 900;

/// Largest rank for which a dense intersection tensor is materialised.
pub const MAX_TENSOR_RANK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelationMeta {
    pub valency: u32,
    pub inverse: u32,
    pub source_fiber: u32,
    pub target_fiber: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentConfiguration {
    size: usize,
    rank: usize,
    cells: Vec<u32>,
    meta: Vec<RelationMeta>,
    fibers: Vec<Vec<u32>>,
    fiber_of: Vec<u32>,
}

/// First violated axiom, with the pair or triple that witnesses it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `color` occurs both on and off the diagonal.
    MixedDiagonal { color: u32, diagonal: u32, off: (u32, u32) },
    /// `(a, b)` and `(c, d)` share a color but their transposes do not.
    Transpose { first: (u32, u32), second: (u32, u32) },
    /// `c_{r s}^t` differs between the reference pair and `pair`.
    Intersection {
        r: u32,
        s: u32,
        t: u32,
        reference: (u32, u32),
        pair: (u32, u32),
        expected: u32,
        found: u32,
    },
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomFailure::MixedDiagonal { color, diagonal, off } => write!(
                f,
                "color {color} on diagonal cell ({diagonal},{diagonal}) and off-diagonal cell ({},{})",
                off.0, off.1
            ),
            AxiomFailure::Transpose { first, second } => write!(
                f,
                "pairs ({},{}) and ({},{}) share a color but their transposes do not",
                first.0, first.1, second.0, second.1
            ),
            AxiomFailure::Intersection { r, s, t, reference, pair, expected, found } => write!(
                f,
                "c[{r}][{s}][{t}] is {expected} at ({},{}) but {found} at ({},{})",
                reference.0, reference.1, pair.0, pair.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub size: usize,
    pub rank: usize,
    pub failure: Option<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the three coherent-configuration axioms on a row-major color
/// matrix by direct counting.
pub fn verify_axioms(size: usize, cells: &[u32]) -> Result<AxiomReport> {
    if cells.len() != size * size {
        return Err(Error::NonSquare {
            rows: size,
            row: cells.len() / size.max(1),
            len: cells.len(),
        });
    }
    let rank = check_color_range(cells)?;
    let failure = first_axiom_failure(size, rank, cells);
    Ok(AxiomReport { size, rank, failure })
}

fn check_color_range(cells: &[u32]) -> Result<usize> {
    let rank = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut seen = vec![false; rank];
    for &c in cells {
        seen[c as usize] = true;
    }
    match seen.iter().position(|s| !s) {
        Some(missing) => Err(Error::ColorGap { missing: missing as u32 }),
        None => Ok(rank),
    }
}

fn first_axiom_failure(n: usize, rank: usize, cells: &[u32]) -> Option<AxiomFailure> {
    // diagonal is a union of colors
    let mut on_diag = vec![None; rank];
    let mut off_diag = vec![None; rank];
    for a in 0..n {
        for b in 0..n {
            let c = cells[a * n + b] as usize;
            let slot = if a == b { &mut on_diag[c] } else { &mut off_diag[c] };
            if slot.is_none() {
                *slot = Some((a as u32, b as u32));
            }
        }
    }
    for c in 0..rank {
        if let (Some((d, _)), Some(off)) = (on_diag[c], off_diag[c]) {
            return Some(AxiomFailure::MixedDiagonal { color: c as u32, diagonal: d, off });
        }
    }

    // closure under transpose
    let mut inverse: Vec<Option<(u32, (u32, u32))>> = vec![None; rank];
    for a in 0..n {
        for b in 0..n {
            let c = cells[a * n + b] as usize;
            let t = cells[b * n + a];
            match inverse[c] {
                None => inverse[c] = Some((t, (a as u32, b as u32))),
                Some((expected, first)) if expected != t => {
                    return Some(AxiomFailure::Transpose { first, second: (a as u32, b as u32) })
                }
                _ => {}
            }
        }
    }

    // constancy of intersection numbers: compare the sorted multiset of
    // (color(a, g), color(g, b)) codes against the first pair of each color
    let k = rank as u64;
    let mut reference: Vec<Option<((u32, u32), Vec<u64>)>> = vec![None; rank];
    let mut buf = Vec::with_capacity(n);
    for a in 0..n {
        for b in 0..n {
            buf.clear();
            buf.extend((0..n).map(|g| cells[a * n + g] as u64 * k + cells[g * n + b] as u64));
            buf.sort_unstable();
            let t = cells[a * n + b] as usize;
            match &reference[t] {
                None => reference[t] = Some(((a as u32, b as u32), buf.clone())),
                Some((ref_pair, ref_codes)) if *ref_codes != buf => {
                    let code = first_count_difference(ref_codes, &buf);
                    return Some(AxiomFailure::Intersection {
                        r: (code / k) as u32,
                        s: (code % k) as u32,
                        t: t as u32,
                        reference: *ref_pair,
                        pair: (a as u32, b as u32),
                        expected: count_of(ref_codes, code),
                        found: count_of(&buf, code),
                    });
                }
                _ => {}
            }
        }
    }
    None
}

fn count_of(sorted: &[u64], code: u64) -> u32 {
    let lo = sorted.partition_point(|&c| c < code);
    let hi = sorted.partition_point(|&c| c <= code);
    (hi - lo) as u32
}

fn first_count_difference(a: &[u64], b: &[u64]) -> u64 {
    let mut codes: Vec<u64> = a.iter().chain(b).copied().collect();
    codes.sort_unstable();
    codes.dedup();
    codes
        .into_iter()
        .find(|&c| count_of(a, c) != count_of(b, c))
        .expect("multisets differ")
}

/// Renumbers colors by first occurrence in row-major order.
pub fn canonical_coloring(cells: &[u32]) -> Vec<u32> {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    cells
        .iter()
        .map(|&c| {
            let next = map.len() as u32;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Coarsest coherent refinement of an arbitrary coloring of `size x size`
/// pairs (2-dimensional Weisfeiler-Leman stabilisation).
///
/// The first step separates the diagonal and makes the coloring compatible
/// with transposition; every later round colors `(a, b)` by its current
/// color and the sorted multiset `{(c(a, g), c(g, b)) : g}`. Signatures
/// are compared exactly.
pub fn coherent_closure(size: usize, initial: &[u32]) -> Result<CoherentConfiguration> {
    if initial.len() != size * size {
        return Err(Error::NonSquare {
            rows: size,
            row: initial.len() / size.max(1),
            len: initial.len(),
        });
    }
    let n = size;
    let mut start: BTreeMap<(u32, u32, bool), u32> = BTreeMap::new();
    let mut colors: Vec<u32> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let key = (initial[a * n + b], initial[b * n + a], a == b);
            let next = start.len() as u32;
            colors.push(*start.entry(key).or_insert(next));
        }
    }
    let mut rank = start.len();
    drop(start);

    let mut transposed = vec![0u32; n * n];
    let mut buf: Vec<u64> = Vec::with_capacity(n + 1);
    loop {
        for a in 0..n {
            for b in 0..n {
                transposed[b * n + a] = colors[a * n + b];
            }
        }
        let k = rank as u64;
        let mut signatures: BTreeMap<Vec<u64>, u32> = BTreeMap::new();
        let mut next_colors = Vec::with_capacity(n * n);
        for a in 0..n {
            let row = &colors[a * n..(a + 1) * n];
            for b in 0..n {
                let col = &transposed[b * n..(b + 1) * n];
                buf.clear();
                buf.push(colors[a * n + b] as u64);
                buf.extend(row.iter().zip(col).map(|(&x, &y)| x as u64 * k + y as u64));
                buf[1..].sort_unstable();
                let id = match signatures.get(buf.as_slice()) {
                    Some(&id) => id,
                    None => {
                        let id = signatures.len() as u32;
                        signatures.insert(buf.clone(), id);
                        id
                    }
                };
                next_colors.push(id);
            }
        }
        let new_rank = signatures.len();
        colors = next_colors;
        if new_rank == rank {
            break;
        }
        rank = new_rank;
    }
    Ok(CoherentConfiguration::from_stable(n, colors))
}

impl CoherentConfiguration {
    /// Wraps a color matrix after checking the axioms.
    pub fn from_cells(size: usize, cells: Vec<u32>) -> Result<Self> {
        let report = verify_axioms(size, &cells)?;
        if let Some(failure) = report.failure {
            return Err(Error::Verification {
                check: "coherent configuration axioms",
                detail: format!("{failure}"),
            });
        }
        Ok(Self::from_stable(size, cells))
    }

    /// Builds the metadata of a coloring already known to be coherent.
    pub(crate) fn from_stable(size: usize, cells: Vec<u32>) -> Self {
        let n = size;
        let rank = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut fibers: Vec<Vec<u32>> = Vec::new();
        let mut fiber_index = vec![u32::MAX; rank];
        let mut fiber_of = vec![0u32; n];
        for a in 0..n {
            let c = cells[a * n + a] as usize;
            if fiber_index[c] == u32::MAX {
                fiber_index[c] = fibers.len() as u32;
                fibers.push(Vec::new());
            }
            fibers[fiber_index[c] as usize].push(a as u32);
            fiber_of[a] = fiber_index[c];
        }
        let mut meta = vec![
            RelationMeta {
                valency: 0,
                inverse: 0,
                source_fiber: 0,
                target_fiber: 0,
            };
            rank
        ];
        let mut seen = vec![false; rank];
        for a in 0..n {
            for b in 0..n {
                let c = cells[a * n + b] as usize;
                if !seen[c] {
                    seen[c] = true;
                    let valency = cells[a * n..(a + 1) * n]
                        .iter()
                        .filter(|&&x| x as usize == c)
                        .count() as u32;
                    meta[c] = RelationMeta {
                        valency,
                        inverse: cells[b * n + a],
                        source_fiber: fiber_of[a],
                        target_fiber: fiber_of[b],
                    };
                }
            }
        }
        CoherentConfiguration {
            size,
            rank,
            cells,
            meta,
            fibers,
            fiber_of,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    #[inline]
    pub fn color(&self, a: u32, b: u32) -> u32 {
        self.cells[a as usize * self.size + b as usize]
    }

    pub fn row(&self, a: u32) -> &[u32] {
        let a = a as usize;
        &self.cells[a * self.size..(a + 1) * self.size]
    }

    pub fn relation(&self, s: u32) -> &RelationMeta {
        &self.meta[s as usize]
    }

    pub fn valency(&self, s: u32) -> u32 {
        self.meta[s as usize].valency
    }

    pub fn inverse(&self, s: u32) -> u32 {
        self.meta[s as usize].inverse
    }

    /// Fibers in order of their smallest point.
    pub fn fibers(&self) -> &[Vec<u32>] {
        &self.fibers
    }

    pub fn fiber_of(&self, point: u32) -> u32 {
        self.fiber_of[point as usize]
    }

    pub fn is_scheme(&self) -> bool {
        self.fibers.len() == 1
    }

    /// The neighbourhood `a s = { b : (a, b) in s }`.
    pub fn neighbourhood(&self, a: u32, s: u32) -> Vec<u32> {
        self.row(a)
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == s)
            .map(|(b, _)| b as u32)
            .collect()
    }

    pub fn verify_axioms(&self) -> AxiomReport {
        AxiomReport {
            size: self.size,
            rank: self.rank,
            failure: first_axiom_failure(self.size, self.rank, &self.cells),
        }
    }

    pub fn canonical_cells(&self) -> Vec<u32> {
        canonical_coloring(&self.cells)
    }

    /// Equality of the underlying partitions of pairs.
    pub fn same_partition(&self, other: &CoherentConfiguration) -> bool {
        self.size == other.size && self.canonical_cells() == other.canonical_cells()
    }

    /// Whether every color of `coarser` is a union of colors of `self`.
    pub fn refines(&self, coarser: &CoherentConfiguration) -> bool {
        if self.size != coarser.size {
            return false;
        }
        let mut image = vec![u32::MAX; self.rank];
        for (&fine, &coarse) in self.cells.iter().zip(&coarser.cells) {
            let slot = &mut image[fine as usize];
            if *slot == u32::MAX {
                *slot = coarse;
            } else if *slot != coarse {
                return false;
            }
        }
        true
    }

    pub fn intersection_tensor(&self) -> Result<IntersectionTensor> {
        IntersectionTensor::count(self)
    }

    /// Equivalence closure of the union of `colors`. Fails if the closure
    /// is not a union of colors, which cannot happen for a coherent input.
    pub fn parabolic_closure(&self, colors: &[u32]) -> Result<Parabolic> {
        let n = self.size;
        let mut in_set = vec![false; self.rank];
        for &c in colors {
            if let Some(slot) = in_set.get_mut(c as usize) {
                *slot = true;
            }
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in 0..n {
            for b in 0..n {
                if in_set[self.cells[a * n + b] as usize] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
        // every color lies entirely inside or entirely outside the closure
        let mut inside: Vec<Option<bool>> = vec![None; self.rank];
        for a in 0..n {
            for b in 0..n {
                let c = self.cells[a * n + b] as usize;
                let same = roots[a] == roots[b];
                match inside[c] {
                    None => inside[c] = Some(same),
                    Some(prev) if prev != same => {
                        return Err(Error::Verification {
                            check: "parabolic closure",
                            detail: format!("color {c} is split by the closure at ({a},{b})"),
                        })
                    }
                    _ => {}
                }
            }
        }
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for (a, &root) in roots.iter().enumerate() {
            let next = index.len();
            let i = *index.entry(root).or_insert(next);
            if i == classes.len() {
                classes.push(Vec::new());
            }
            classes[i].push(a as u32);
        }
        Ok(Parabolic { classes })
    }

    /// Smallest coherent configuration refining `self` in which `{alpha}`
    /// is a fiber.
    pub fn one_point_extension(&self, alpha: u32) -> Result<CoherentConfiguration> {
        if alpha as usize >= self.size {
            return Err(Error::PointOutOfRange {
                point: alpha as usize,
                degree: self.size,
            });
        }
        let fresh = self.rank as u32;
        let mut initial = self.cells.clone();
        initial[alpha as usize * self.size + alpha as usize] = fresh;
        coherent_closure(self.size, &initial)
    }

    /// The scheme induced on a fiber, colors renumbered by first occurrence.
    pub fn restriction(&self, fiber: &[u32]) -> Result<CoherentConfiguration> {
        let mut sorted = fiber.to_vec();
        sorted.sort_unstable();
        if !self.fibers.contains(&sorted) {
            return Err(Error::NotAFiber);
        }
        let mut cells = Vec::with_capacity(sorted.len() * sorted.len());
        for &a in &sorted {
            for &b in &sorted {
                cells.push(self.color(a, b));
            }
        }
        Ok(Self::from_stable(sorted.len(), canonical_coloring(&cells)))
    }

    /// Whether every valency is 1. Only defined for schemes.
    pub fn is_regular(&self) -> Result<bool> {
        if !self.is_scheme() {
            return Err(Error::NotAScheme {
                fibers: self.fibers.len(),
            });
        }
        Ok(self.meta.iter().all(|m| m.valency == 1))
    }

    /// The 2-extension on `Omega^2`: the closure of the Cartesian square in
    /// which the diagonal `{(a, a)}` is a union of fibers. Point `(a, b)` is
    /// numbered `a * N + b`.
    pub fn m_extension(&self, m: usize, max_points: usize) -> Result<CoherentConfiguration> {
        if m != 2 {
            return Err(Error::UnsupportedDimension(m));
        }
        let n = self.size;
        let points = n * n;
        if points > max_points {
            return Err(Error::TooLarge {
                what: "2-extension point set",
                size: points,
                bound: max_points,
            });
        }
        let k = self.rank as u32;
        let mut initial = Vec::with_capacity(points * points);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let product = self.cells[a * n + c] * k + self.cells[b * n + d];
                        let flags = (a == b) as u32 * 2 + (c == d) as u32;
                        initial.push(product * 4 + flags);
                    }
                }
            }
        }
        coherent_closure(points, &initial)
    }
}

/// Dense `rank^3` array of intersection numbers `c[r][s][t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTensor {
    rank: usize,
    entries: Vec<u32>,
}

impl IntersectionTensor {
    /// Counts `c[r][s][t]` at the first pair of each color `t` by a direct
    /// loop over intermediate points.
    pub fn count(x: &CoherentConfiguration) -> Result<Self> {
        let k = x.rank;
        if k > MAX_TENSOR_RANK {
            return Err(Error::TooLarge {
                what: "intersection tensor rank",
                size: k,
                bound: MAX_TENSOR_RANK,
            });
        }
        let n = x.size;
        let mut entries = vec![0u32; k * k * k];
        let mut done = vec![false; k];
        for a in 0..n {
            for b in 0..n {
                let t = x.cells[a * n + b] as usize;
                if done[t] {
                    continue;
                }
                done[t] = true;
                for g in 0..n {
                    let r = x.cells[a * n + g] as usize;
                    let s = x.cells[g * n + b] as usize;
                    entries[(r * k + s) * k + t] += 1;
                }
            }
        }
        Ok(IntersectionTensor { rank: k, entries })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn get(&self, r: u32, s: u32, t: u32) -> u32 {
        let k = self.rank;
        self.entries[(r as usize * k + s as usize) * k + t as usize]
    }

    /// `entries[r][s]` is the row of `c[r][s][t]` over `t`.
    pub fn nested(&self) -> Vec<Vec<Vec<u32>>> {
        let k = self.rank;
        (0..k)
            .map(|r| {
                (0..k)
                    .map(|s| self.entries[(r * k + s) * k..(r * k + s + 1) * k].to_vec())
                    .collect()
            })
            .collect()
    }

    /// Whether the color bijection `map` preserves every intersection number.
    pub fn preserved_by(&self, map: &[u32]) -> bool {
        let k = self.rank as u32;
        map.len() == self.rank
            && (0..k).all(|r| {
                (0..k).all(|s| (0..k).all(|t| self.get(r, s, t) == self.get(map[r as usize], map[s as usize], map[t as usize])))
            })
    }
}

/// An equivalence relation given by its classes, ordered by smallest point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parabolic {
    pub classes: Vec<Vec<u32>>,
}

//! The semilinear group acting on a Tatra scheme, its automorphism and
//! isomorphism groups, and the algebraic automorphisms `phi_{u, g}`.
//!
//! An algebraic automorphism is written `(u, g)` with `u` a unit mod `n`
//! and `g` a coset: it sends `r_h` to `r_{uh}` and `s_h` to `s_{uh + g}`
//! (cosets written additively). A semilinear map `v -> T v^(r^i)` induces
//! `(r^i, coset(det T))`, so `(u, g)` is induced exactly when `u` is a power
//! of the characteristic modulo `n`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::coherent_config::{CoherentConfiguration, IntersectionTensor};
use crate::error::{Error, Result};
use crate::finite_field::{euler_phi, gcd, is_primitive_root, Elem, FiniteField};
use crate::perm_group::{PermGroup, Permutation};
use crate::tatra::{OmegaPoint, TatraScheme};

/// Rank up to which algebraic automorphisms are cross-checked by an
/// exhaustive search over valency-preserving color bijections.
pub const EXHAUSTIVE_RANK_LIMIT: usize = 12;

/// Largest isomorphism group that is enumerated element by element.
pub const BRUTE_FORCE_ISO_LIMIT: u128 = 100_000;

/// `v -> T v^sigma` with `sigma = Frob^frob`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SemilinearMap {
    pub matrix: [[Elem; 2]; 2],
    pub frob: u32,
}

/// `phi_{u, g}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgebraicAut {
    pub u: u32,
    pub g: u32,
}

impl SemilinearMap {
    pub fn identity() -> Self {
        SemilinearMap {
            matrix: [[1, 0], [0, 1]],
            frob: 0,
        }
    }

    pub fn linear(matrix: [[Elem; 2]; 2]) -> Self {
        SemilinearMap { matrix, frob: 0 }
    }

    pub fn frobenius(i: u32) -> Self {
        SemilinearMap {
            matrix: [[1, 0], [0, 1]],
            frob: i,
        }
    }

    pub fn diagonal(x: Elem) -> Self {
        Self::linear([[x, 0], [0, 1]])
    }

    pub fn det(&self, f: &FiniteField) -> Elem {
        let [[a, b], [c, d]] = self.matrix;
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    /// Image of a point: the class of `T v^sigma`.
    pub fn act(&self, x: &TatraScheme, p: &OmegaPoint) -> OmegaPoint {
        let f = x.field();
        let (v1, v2) = (f.frobenius(p.v1, self.frob), f.frobenius(p.v2, self.frob));
        let [[a, b], [c, d]] = self.matrix;
        let w1 = f.add(f.mul(a, v1), f.mul(b, v2));
        let w2 = f.add(f.mul(c, v1), f.mul(d, v2));
        x.canonical(w1, w2)
    }

    pub fn perm_of(&self, x: &TatraScheme) -> Result<Permutation> {
        if self.det(x.field()) == 0 {
            return Err(Error::Verification {
                check: "semilinear map",
                detail: format!("singular matrix {:?}", self.matrix),
            });
        }
        let images = x
            .points()
            .iter()
            .map(|p| x.index_of(&self.act(x, p)).expect("image is a point"))
            .collect();
        Permutation::from_images(images)
    }

    /// Color map predicted by the semilinear-action formula.
    pub fn formula_image(&self, x: &TatraScheme) -> Vec<u32> {
        let n = x.n();
        let power = x.frobenius().action_on_c[(self.frob % x.field().degree()) as usize];
        let shift = x.cosets().coset_of(self.det(x.field())).expect("invertible");
        let mut map = vec![0; 2 * n as usize];
        for h in 0..n {
            let image = (power * h) % n;
            map[x.r(h) as usize] = x.r(image);
            map[x.s(h) as usize] = x.s(image + shift);
        }
        map
    }

    /// The color map induced on `x`, computed both from the formula and from
    /// the permutation of points; the two must agree, and the permutation
    /// must carry every color class onto a color class.
    pub fn relation_image(&self, x: &TatraScheme) -> Result<Vec<u32>> {
        let perm = self.perm_of(x)?;
        let observed = induced_color_map(x.config(), &perm)?;
        let predicted = self.formula_image(x);
        if observed != predicted {
            return Err(Error::Verification {
                check: "relation image",
                detail: format!("{self:?}: action gives {observed:?}, formula gives {predicted:?}"),
            });
        }
        Ok(observed)
    }
}

/// Color map induced by a point permutation; fails if the permutation is
/// not an isomorphism of the configuration onto itself.
pub fn induced_color_map(x: &CoherentConfiguration, perm: &Permutation) -> Result<Vec<u32>> {
    let n = x.size();
    let mut map = vec![u32::MAX; x.rank()];
    for a in 0..n as u32 {
        let pa = perm.apply(a);
        for b in 0..n as u32 {
            let c = x.color(a, b) as usize;
            let image = x.color(pa, perm.apply(b));
            if map[c] == u32::MAX {
                map[c] = image;
            } else if map[c] != image {
                return Err(Error::Verification {
                    check: "isomorphism",
                    detail: format!("pair ({a},{b}) of color {c} maps to color {image}, expected {}", map[c]),
                });
            }
        }
    }
    Ok(map)
}

/// Color map from the images of one representative pair per color, for
/// permutations already known to be isomorphisms.
fn induced_map_on_representatives(x: &CoherentConfiguration, reps: &[(u32, u32)], perm: &Permutation) -> Vec<u32> {
    reps.iter()
        .map(|&(a, b)| x.color(perm.apply(a), perm.apply(b)))
        .collect()
}

fn representative_pairs(x: &CoherentConfiguration) -> Vec<(u32, u32)> {
    let mut reps = vec![None; x.rank()];
    for a in 0..x.size() as u32 {
        for b in 0..x.size() as u32 {
            let c = x.color(a, b) as usize;
            if reps[c].is_none() {
                reps[c] = Some((a, b));
            }
        }
    }
    reps.into_iter().map(|p| p.expect("every color occurs")).collect()
}

impl AlgebraicAut {
    pub fn identity() -> Self {
        AlgebraicAut { u: 1, g: 0 }
    }

    pub fn color_map(&self, x: &TatraScheme) -> Vec<u32> {
        let n = x.n();
        let mut map = vec![0; 2 * n as usize];
        for h in 0..n {
            let image = (self.u * h) % n;
            map[x.r(h) as usize] = x.r(image);
            map[x.s(h) as usize] = x.s(image + self.g);
        }
        map
    }
}

/// Transvections with entries `rho^j`, `j < d`, which span `GF(q)` over the
/// prime field, generate `SL(2, q)`.
fn special_linear_generators(x: &TatraScheme) -> Vec<SemilinearMap> {
    let f = x.field();
    let mut gens = Vec::new();
    for j in 0..f.degree() as u64 {
        let a = f.exp(j);
        gens.push(SemilinearMap::linear([[1, a], [0, 1]]));
        gens.push(SemilinearMap::linear([[1, 0], [a, 1]]));
    }
    gens
}

/// Semilinear generators of `GL(2, q)_K` extended by `Sigma_0`.
pub fn automorphism_generators(x: &TatraScheme) -> Vec<SemilinearMap> {
    let f = x.field();
    let mut gens = special_linear_generators(x);
    gens.push(SemilinearMap::diagonal(f.exp(x.n() as u64)));
    let step = x.frobenius().order_mod_n;
    if step < f.degree() {
        gens.push(SemilinearMap::frobenius(step));
    }
    gens
}

/// Semilinear generators of the full `GammaL(2, q)`.
pub fn isomorphism_generators(x: &TatraScheme) -> Vec<SemilinearMap> {
    let f = x.field();
    let mut gens = automorphism_generators(x);
    gens.push(SemilinearMap::diagonal(f.primitive_element()));
    if f.degree() > 1 {
        gens.push(SemilinearMap::frobenius(1));
    }
    gens
}

fn group_from(x: &TatraScheme, maps: &[SemilinearMap]) -> Result<PermGroup> {
    let perms = maps.iter().map(|m| m.perm_of(x)).collect::<Result<Vec<_>>>()?;
    PermGroup::new(x.degree(), perms)
}

pub fn automorphism_group(x: &TatraScheme) -> Result<PermGroup> {
    group_from(x, &automorphism_generators(x))
}

pub fn isomorphism_group(x: &TatraScheme) -> Result<PermGroup> {
    group_from(x, &isomorphism_generators(x))
}

/// Whether the colors are exactly the orbits of the automorphism group on
/// ordered pairs.
pub fn schurity_check(x: &TatraScheme) -> Result<bool> {
    let group = automorphism_group(x)?;
    for g in group.generators() {
        if induced_color_map(x.config(), g)?.iter().enumerate().any(|(c, &d)| c as u32 != d) {
            return Ok(false);
        }
    }
    Ok(is_schurian_under(x.config(), &group))
}

/// Compares the pair-orbit partition of `group` with the colors of `x`.
pub fn is_schurian_under(x: &CoherentConfiguration, group: &PermGroup) -> bool {
    group.orbits_on_pairs() == x.canonical_cells()
}

/// All `phi_{u, g}`, each checked to preserve the intersection tensor. For
/// rank up to [`EXHAUSTIVE_RANK_LIMIT`] an exhaustive search confirms that
/// no other algebraic automorphism exists.
pub fn enumerate_algebraic_auts(x: &TatraScheme) -> Result<Vec<AlgebraicAut>> {
    let n = x.n();
    let tensor = x.config().intersection_tensor()?;
    let mut auts = Vec::new();
    let units = (1..=n).filter(|&u| gcd(u as u64, n as u64) == 1 && (u < n || n == 1));
    for u in units {
        for g in 0..n {
            let phi = AlgebraicAut { u, g };
            if !tensor.preserved_by(&phi.color_map(x)) {
                return Err(Error::Verification {
                    check: "algebraic automorphism",
                    detail: format!("{phi:?} does not preserve the intersection numbers"),
                });
            }
            auts.push(phi);
        }
    }
    if x.rank() <= EXHAUSTIVE_RANK_LIMIT {
        let found: BTreeSet<Vec<u32>> = exhaustive_algebraic_auts(x.config(), &tensor).into_iter().collect();
        let expected: BTreeSet<Vec<u32>> = auts.iter().map(|phi| phi.color_map(x)).collect();
        if found != expected {
            return Err(Error::Verification {
                check: "algebraic automorphism census",
                detail: format!("exhaustive search found {} maps, expected {}", found.len(), expected.len()),
            });
        }
    }
    Ok(auts)
}

/// Every bijection of colors that preserves valencies and all intersection
/// numbers, by backtracking over colors in index order.
pub fn exhaustive_algebraic_auts(x: &CoherentConfiguration, tensor: &IntersectionTensor) -> Vec<Vec<u32>> {
    let k = x.rank();
    let mut map = vec![u32::MAX; k];
    let mut used = vec![false; k];
    let mut out = Vec::new();

    // triples whose largest index is the color just assigned
    fn consistent(tensor: &IntersectionTensor, map: &[u32], i: usize) -> bool {
        let i32 = i as u32;
        for a in 0..=i32 {
            for b in 0..=i32 {
                for c in 0..=i32 {
                    if a != i32 && b != i32 && c != i32 {
                        continue;
                    }
                    let image = tensor.get(map[a as usize], map[b as usize], map[c as usize]);
                    if tensor.get(a, b, c) != image {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(
        x: &CoherentConfiguration,
        tensor: &IntersectionTensor,
        i: usize,
        map: &mut [u32],
        used: &mut [bool],
        out: &mut Vec<Vec<u32>>,
    ) {
        let k = map.len();
        if i == k {
            out.push(map.to_vec());
            return;
        }
        for target in 0..k {
            if used[target] || x.valency(target as u32) != x.valency(i as u32) {
                continue;
            }
            map[i] = target as u32;
            used[target] = true;
            if consistent(tensor, map, i) {
                search(x, tensor, i + 1, map, used, out);
            }
            used[target] = false;
        }
        map[i] = u32::MAX;
    }

    search(x, tensor, 0, &mut map, &mut used, &mut out);
    out
}

/// Returns a semilinear map inducing `phi`, or `None` when `u` is not a
/// power of the characteristic modulo `n`. A returned witness has been
/// checked against the actual action.
pub fn is_induced(phi: &AlgebraicAut, x: &TatraScheme) -> Result<Option<SemilinearMap>> {
    let n = x.n();
    if gcd(phi.u as u64, n as u64) != 1 || phi.g >= n {
        return Err(Error::Verification {
            check: "algebraic automorphism",
            detail: format!("{phi:?} is not of the form (unit, coset) mod {n}"),
        });
    }
    let Some(i) = x.frobenius().exponent_for(phi.u % n) else {
        return Ok(None);
    };
    let witness = SemilinearMap {
        matrix: [[x.field().exp(phi.g as u64), 0], [0, 1]],
        frob: i,
    };
    let image = witness.relation_image(x)?;
    if image != phi.color_map(x) {
        return Err(Error::Verification {
            check: "induced witness",
            detail: format!("{witness:?} induces {image:?}, not {phi:?}"),
        });
    }
    Ok(Some(witness))
}

/// The set of color maps induced by all elements of the isomorphism group,
/// enumerated element by element. `None` when the group is larger than
/// `limit`.
pub fn induced_maps_bruteforce(x: &TatraScheme, limit: u128) -> Result<Option<BTreeSet<Vec<u32>>>> {
    let iso = isomorphism_group(x)?;
    if iso.order() > limit {
        return Ok(None);
    }
    let config = x.config();
    // generators must be isomorphisms for the representative shortcut
    for g in iso.generators() {
        induced_color_map(config, g)?;
    }
    let reps = representative_pairs(config);
    let mut maps = BTreeSet::new();
    iso.for_each_element(|p| {
        maps.insert(induced_map_on_representatives(config, &reps, p));
    });
    Ok(Some(maps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InducedRatio {
    pub alg_aut_count: u64,
    pub induced_count: u64,
    pub ratio: u64,
    pub aut_order: u64,
    pub iso_order: u64,
}

/// `|Aut_alg|`, `|Aut_alg^ind|` and their quotient. The induced count is
/// obtained by counting witnesses and, independently, as
/// `|Iso| / |Aut|`; both must equal `n d / d0`, and the quotient must
/// equal `phi(n) d0 / d`.
pub fn induced_ratio(x: &TatraScheme) -> Result<InducedRatio> {
    let auts = enumerate_algebraic_auts(x)?;
    let mut induced = 0u64;
    for phi in &auts {
        if is_induced(phi, x)?.is_some() {
            induced += 1;
        }
    }
    let aut_order = automorphism_group(x)?.order();
    let iso_order = isomorphism_group(x)?.order();
    let fr = x.frobenius();
    let n = x.n() as u64;
    let expected_induced = n * fr.d as u64 / fr.d0 as u64;
    let mismatch = |what: &str| Error::Verification {
        check: "induced ratio",
        detail: format!(
            "{what}: |alg| = {}, counted induced = {induced}, |Iso|/|Aut| = {iso_order}/{aut_order}, n d/d0 = {expected_induced}",
            auts.len()
        ),
    };
    if iso_order % aut_order != 0 || (iso_order / aut_order) as u64 != induced {
        return Err(mismatch("order quotient differs from counted induced automorphisms"));
    }
    if induced != expected_induced {
        return Err(mismatch("induced count differs from n d / d0"));
    }
    let alg = auts.len() as u64;
    if alg % induced != 0 || (alg / induced) * fr.d as u64 != euler_phi(n) * fr.d0 as u64 {
        return Err(mismatch("ratio differs from phi(n) d0 / d"));
    }
    Ok(InducedRatio {
        alg_aut_count: alg,
        induced_count: induced,
        ratio: alg / induced,
        aut_order: aut_order as u64,
        iso_order: iso_order as u64,
    })
}

/// Per-instance summary of the group computations.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupsReport {
    pub q: u32,
    pub n: u32,
    pub rank: usize,
    pub degree: usize,
    pub aut_order: u64,
    pub iso_order: u64,
    pub alg_aut_count: u64,
    pub induced_count: u64,
    pub ratio: u64,
    pub primitive_root: bool,
    /// `|SL(2,q)| m d0 / |Aut|`: order of the kernel of `GL(2,q)_K x Sigma_0`
    /// on the points, as observed.
    pub aut_kernel: u64,
}

pub fn groups_report(x: &TatraScheme) -> Result<GroupsReport> {
    let ratio = induced_ratio(x)?;
    let q = x.q() as u64;
    let sl = q * (q * q - 1);
    let fr = x.frobenius();
    Ok(GroupsReport {
        q: x.q(),
        n: x.n(),
        rank: x.rank(),
        degree: x.degree(),
        aut_order: ratio.aut_order,
        iso_order: ratio.iso_order,
        alg_aut_count: ratio.alg_aut_count,
        induced_count: ratio.induced_count,
        ratio: ratio.ratio,
        primitive_root: is_primitive_root(x.field().characteristic() as u64, x.n() as u64)?,
        aut_kernel: sl * x.m() as u64 * fr.d0 as u64 / ratio.aut_order,
    })
}

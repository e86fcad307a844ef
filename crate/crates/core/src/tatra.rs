//! The Tatra scheme `X(q, n)`.
//!
//! Points are the classes `Kv` of nonzero vectors `v` in `GF(q)^2`, where `K`
//! is the index-`n` subgroup of `GF(q)*`. The form `<Ku, Kv> = K det(u, v)`
//! takes values in `C u {0}`; pairs on a common line get the thin colors
//! `r_g` (with `Kv = g Ku`) and all others the colors `s_g` with
//! `g = <Ku, Kv>`.
//!
//! Color numbering: `r_g` is color `g` and `s_g` is color `n + g`, with the
//! coset `g` written as an exponent class mod `n`. In particular `r_e` is
//! color 0, the diagonal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::coherent_config::{verify_axioms, CoherentConfiguration, IntersectionTensor};
use crate::error::{Error, Result};
use crate::finite_field::{prime_power, CosetStructure, Elem, FiniteField, FrobeniusData, DEFAULT_ORDER_BOUND};

/// Canonical representative of a class `Kv`: the minimum of `{xv : x in K}`
/// when coordinates are compared by discrete logarithm, zero first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OmegaPoint {
    pub v1: Elem,
    pub v2: Elem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RelationKind {
    R,
    S,
}

/// Name of a basis relation: `r_g` or `s_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Label {
    pub kind: RelationKind,
    pub g: u32,
}

#[derive(Debug, Clone)]
pub struct TatraScheme {
    q: u32,
    n: u32,
    field: FiniteField,
    cosets: CosetStructure,
    frobenius: FrobeniusData,
    points: Vec<OmegaPoint>,
    index: Vec<u32>,
    config: CoherentConfiguration,
}

/// Outcome of the structural checks; every field records a check that
/// passed (a failing check aborts with a witness instead).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StructureReport {
    pub q: u32,
    pub n: u32,
    pub m: u32,
    pub degree: usize,
    pub rank: usize,
    pub checks: Vec<&'static str>,
}

impl TatraScheme {
    pub fn build(q: u64, n: u32) -> Result<Self> {
        Self::build_with_bound(q, n, DEFAULT_ORDER_BOUND)
    }

    pub fn build_with_bound(q: u64, n: u32, bound: u64) -> Result<Self> {
        let (r, d) = prime_power(q)?;
        let field = FiniteField::with_bound(r, d, bound)?;
        let cosets = CosetStructure::new(&field, n)?;
        let frobenius = FrobeniusData::new(&field, &cosets);

        let mut points = Vec::with_capacity((n * (field.order() + 1)) as usize);
        for j in 0..n as u64 {
            points.push(OmegaPoint { v1: 0, v2: field.exp(j) });
        }
        for i in 0..n as u64 {
            for v2 in field.elements() {
                points.push(OmegaPoint { v1: field.exp(i), v2 });
            }
        }
        let key = |x: Elem| field.log(x).map_or(0, |l| l as u64 + 1);
        points.sort_by_key(|p| (key(p.v1), key(p.v2)));

        let q32 = field.order();
        let mut index = vec![u32::MAX; ((n + 1) * (q32 + 1)) as usize];
        for (i, p) in points.iter().enumerate() {
            index[(key(p.v1) * (q32 as u64 + 1) + key(p.v2)) as usize] = i as u32;
        }

        let mut scheme = TatraScheme {
            q: q32,
            n,
            field,
            cosets,
            frobenius,
            points,
            index,
            config: CoherentConfiguration::from_stable(1, vec![0]),
        };
        let size = scheme.points.len();
        let mut cells = Vec::with_capacity(size * size);
        for a in &scheme.points {
            for b in &scheme.points {
                cells.push(scheme.pair_color(a, b));
            }
        }
        scheme.config = CoherentConfiguration::from_stable(size, cells);
        Ok(scheme)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.cosets.m()
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn rank(&self) -> usize {
        self.config.rank()
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn cosets(&self) -> &CosetStructure {
        &self.cosets
    }

    pub fn frobenius(&self) -> &FrobeniusData {
        &self.frobenius
    }

    pub fn points(&self) -> &[OmegaPoint] {
        &self.points
    }

    pub fn config(&self) -> &CoherentConfiguration {
        &self.config
    }

    pub fn r(&self, g: u32) -> u32 {
        g % self.n
    }

    pub fn s(&self, g: u32) -> u32 {
        self.n + g % self.n
    }

    pub fn color_of(&self, label: Label) -> u32 {
        match label.kind {
            RelationKind::R => self.r(label.g),
            RelationKind::S => self.s(label.g),
        }
    }

    pub fn label(&self, color: u32) -> Label {
        if color < self.n {
            Label { kind: RelationKind::R, g: color }
        } else {
            Label { kind: RelationKind::S, g: color - self.n }
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..2 * self.n).map(|c| self.label(c)).collect()
    }

    /// Canonical representative of `Kv` for a nonzero vector.
    pub fn canonical(&self, v1: Elem, v2: Elem) -> OmegaPoint {
        let f = &self.field;
        let n = self.n as u64;
        let units = f.order() as u64 - 1;
        match f.log(v1) {
            Some(l) => {
                let l = l as u64;
                let target = l % n;
                // x = rho^(target - l) lies in K
                let x = f.exp((target + units - l % units) % units);
                OmegaPoint { v1: f.exp(target), v2: f.mul(x, v2) }
            }
            None => {
                let l = f.log(v2).expect("nonzero vector") as u64;
                OmegaPoint { v1: 0, v2: f.exp(l % n) }
            }
        }
    }

    /// Position of a canonical point in the point list.
    pub fn index_of(&self, p: &OmegaPoint) -> Option<u32> {
        let f = &self.field;
        let key = |x: Elem| f.log(x).map_or(0, |l| l as usize + 1);
        let (k1, k2) = (key(p.v1), key(p.v2));
        if k1 > self.n as usize {
            return None;
        }
        match self.index.get(k1 * (self.q as usize + 1) + k2) {
            Some(&i) if i != u32::MAX => Some(i),
            _ => None,
        }
    }

    /// Total order on canonical points used for enumeration.
    pub fn compare_points(&self, a: &OmegaPoint, b: &OmegaPoint) -> Ordering {
        let key = |x: Elem| self.field.log(x).map_or(0, |l| l as u64 + 1);
        (key(a.v1), key(a.v2)).cmp(&(key(b.v1), key(b.v2)))
    }

    pub fn det(&self, a: &OmegaPoint, b: &OmegaPoint) -> Elem {
        let f = &self.field;
        f.sub(f.mul(a.v1, b.v2), f.mul(a.v2, b.v1))
    }

    /// `<a, b>` as a coset index, or `None` for zero.
    pub fn form_value(&self, a: &OmegaPoint, b: &OmegaPoint) -> Option<u32> {
        self.cosets.coset_of(self.det(a, b))
    }

    fn pair_color(&self, a: &OmegaPoint, b: &OmegaPoint) -> u32 {
        match self.form_value(a, b) {
            Some(g) => self.s(g),
            None => {
                // b = lambda a; read lambda off the first nonzero coordinate
                let (x, y) = if a.v1 != 0 { (a.v1, b.v1) } else { (a.v2, b.v2) };
                let units = self.field.order() - 1;
                let lx = self.field.log(x).unwrap();
                let ly = self.field.log(y).unwrap();
                self.r(((ly + units - lx) % units) % self.n)
            }
        }
    }

    /// Test hook: replaces the color matrix without any checks.
    pub fn replace_cells(&mut self, cells: Vec<u32>) -> Result<()> {
        let size = self.degree();
        if cells.len() != size * size {
            return Err(Error::NonSquare {
                rows: size,
                row: cells.len() / size.max(1),
                len: cells.len(),
            });
        }
        self.config = CoherentConfiguration::from_stable(size, cells);
        Ok(())
    }

    /// Checks the axioms, degree and rank, and every structural constant:
    /// valencies, inverses, the composition rules for thin colors, the
    /// intersection numbers `c_{s_h s_g}^t`, the one-neighbour-per-line
    /// property of `s_g`, and the line parabolic `r_C`.
    pub fn verify_structure(&self) -> Result<StructureReport> {
        let mut checks = Vec::new();
        let n = self.n;
        let q = self.q;
        let m = self.m();
        let x = &self.config;

        let axioms = verify_axioms(x.size(), x.cells())?;
        if let Some(failure) = axioms.failure {
            return fail("axioms", format!("{failure}"));
        }
        checks.push("axioms");

        let expected_degree = (n * (q + 1)) as usize;
        if self.degree() != expected_degree || x.rank() != 2 * n as usize {
            return fail(
                "degree and rank",
                format!(
                    "degree {} (expected {expected_degree}), rank {} (expected {})",
                    self.degree(),
                    x.rank(),
                    2 * n
                ),
            );
        }
        if (0..self.degree() as u32).any(|a| x.color(a, a) != self.r(0)) {
            return fail("diagonal", "diagonal is not r_e".into());
        }
        checks.push("degree and rank");

        for g in 0..n {
            if x.valency(self.r(g)) != 1 || x.valency(self.s(g)) != q {
                return fail(
                    "valencies",
                    format!("n(r_{g}) = {}, n(s_{g}) = {}", x.valency(self.r(g)), x.valency(self.s(g))),
                );
            }
        }
        checks.push("valencies");

        for g in 0..n {
            let ginv = self.cosets.neg(g);
            if x.inverse(self.r(g)) != self.r(ginv) || x.inverse(self.s(g)) != self.s(g) {
                return fail("inverses", format!("g = {g}"));
            }
        }
        checks.push("inverses");

        let t = IntersectionTensor::count(x)?;
        let rank = 2 * n;
        let only = |r: u32, s: u32, target: u32| -> Result<()> {
            for c in 0..rank {
                let v = t.get(r, s, c);
                if (c == target) != (v != 0) {
                    return fail(
                        "compositions",
                        format!("c[{:?}][{:?}][{:?}] = {v}", self.label(r), self.label(s), self.label(c)),
                    );
                }
            }
            Ok(())
        };
        for h in 0..n {
            for g in 0..n {
                only(self.r(h), self.r(g), self.r(h + g))?;
                only(self.r(h), self.s(g), self.s(g + self.cosets.neg(h)))?;
                only(self.s(g), self.r(h), self.s(g + h))?;
            }
        }
        checks.push("compositions");

        for h in 0..n {
            for g in 0..n {
                let thin = self.cosets.add(g, self.cosets.neg(h));
                for y in 0..n {
                    let expected_r = if y == thin { q } else { 0 };
                    let found_r = t.get(self.s(h), self.s(g), self.r(y));
                    let found_s = t.get(self.s(h), self.s(g), self.s(y));
                    if found_r != expected_r || found_s != m {
                        return fail(
                            "intersection numbers",
                            format!(
                                "h = {h}, g = {g}, y = {y}: c^r = {found_r} (expected {expected_r}), c^s = {found_s} (expected {m})"
                            ),
                        );
                    }
                }
            }
        }
        checks.push("intersection numbers");

        let lines = self.line_parabolic()?;
        if lines.len() != (q + 1) as usize || lines.iter().any(|c| c.len() != n as usize) {
            return fail("line parabolic", format!("{} classes", lines.len()));
        }
        checks.push("line parabolic");

        let mut class_of = vec![0usize; self.degree()];
        for (i, class) in lines.iter().enumerate() {
            for &p in class {
                class_of[p as usize] = i;
            }
        }
        let classes = lines.len();
        let mut counts = vec![0u32; n as usize * classes];
        for a in 0..self.degree() as u32 {
            counts.iter_mut().for_each(|c| *c = 0);
            for (b, &c) in x.row(a).iter().enumerate() {
                if c >= n {
                    counts[(c - n) as usize * classes + class_of[b]] += 1;
                }
            }
            for g in 0..n as usize {
                for gamma in 0..classes {
                    let expected = (gamma != class_of[a as usize]) as u32;
                    let found = counts[g * classes + gamma];
                    if found != expected {
                        return fail(
                            "one neighbour per line",
                            format!("|{a} s_{g} ∩ Γ_{gamma}| = {found}, expected {expected}"),
                        );
                    }
                }
            }
        }
        checks.push("one neighbour per line");

        Ok(StructureReport {
            q,
            n,
            m,
            degree: self.degree(),
            rank: x.rank(),
            checks,
        })
    }

    /// Classes of `r_C`, the union of the thin colors.
    pub fn line_parabolic(&self) -> Result<Vec<Vec<u32>>> {
        let thin: Vec<u32> = (0..self.n).collect();
        Ok(self.config.parabolic_closure(&thin)?.classes)
    }
}

fn fail<T>(check: &'static str, detail: alloc::string::String) -> Result<T> {
    Err(Error::Verification { check, detail })
}

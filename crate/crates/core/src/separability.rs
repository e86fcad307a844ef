//! Bounds on the separability number of a Tatra scheme.
//!
//! Upper bound: for a base point `alpha`, the one-point extension `Y` must
//! have the fibers `{alpha s : s in S}`, every fiber must be joined to
//! `Delta = alpha s_e` by some basis relation of valency 1, and `Y` restricted
//! to `Delta` must be regular. Regular schemes are separable, the valency-1
//! links transfer separability from `Delta` to `Y`, and one point extension
//! costs at most one dimension, so these three facts give `s(X) <= 2`.
//! Each fact is checked rather than assumed. Regularity on `Delta` fails
//! whenever `K` is nontrivial: `diag(x, 1)` with `x` in `K` fixes `alpha = K e1`
//! and `K e2` but moves `K(1, 1)` inside `Delta`. The upper bound is reported
//! only when all three checks pass.
//!
//! Lower bound: when the characteristic is not a primitive root modulo `n`,
//! some `phi_{u, e}` is not induced by any isomorphism, so `X` is not
//! separable and `s(X) = 2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::autiso::{induced_maps_bruteforce, is_induced, AlgebraicAut, BRUTE_FORCE_ISO_LIMIT};
use crate::coherent_config::CoherentConfiguration;
use crate::error::{Error, Result};
use crate::finite_field::{gcd, is_primitive_root};
use crate::tatra::TatraScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparabilityOptions {
    /// Check every base point regardless of the degree.
    pub all_alpha: bool,
    /// Degrees up to this bound check every base point.
    pub alpha_limit: usize,
    /// Number of evenly spaced base points checked above `alpha_limit`.
    pub sample_size: usize,
    /// Largest isomorphism group enumerated to confirm the witness.
    pub iso_bruteforce_limit: u128,
}

impl Default for SeparabilityOptions {
    fn default() -> Self {
        SeparabilityOptions {
            all_alpha: false,
            alpha_limit: 100,
            sample_size: 8,
            iso_bruteforce_limit: BRUTE_FORCE_ISO_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparabilityReport {
    pub q: u32,
    pub n: u32,
    pub degree: usize,
    pub rank: usize,
    pub alphas_checked: usize,
    pub extension_fiber_sizes: Vec<usize>,
    pub extension_fibers_ok: bool,
    pub valency_one_links_ok: bool,
    pub delta_regular_ok: bool,
    /// First non-thin relation found on `Delta`, when the regularity check fails.
    pub delta_counterexample: Option<DeltaCounterexample>,
    /// `Some(2)` only when all three flags above hold for every checked base point.
    pub s_upper_bound: Option<u8>,
    pub primitive_root: bool,
    pub noninduced_witness: Option<AlgebraicAut>,
    /// Whether the witness was also checked against every element of the
    /// isomorphism group.
    pub witness_bruteforce_checked: bool,
    pub s_lower_bound: u8,
}

/// Distinct `beta, gamma, delta` in `Delta` with `(beta, gamma)` and
/// `(beta, delta)` in the same relation of the extension at `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaCounterexample {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
    pub color: u32,
}

/// Looks for a row of `y` on `delta` in which some color repeats.
pub fn delta_counterexample(y: &CoherentConfiguration, alpha: u32, delta: &[u32]) -> Option<DeltaCounterexample> {
    for &beta in delta {
        for (i, &gamma) in delta.iter().enumerate() {
            let color = y.color(beta, gamma);
            if let Some(&other) = delta[i + 1..].iter().find(|&&d| y.color(beta, d) == color) {
                return Some(DeltaCounterexample { alpha, beta, gamma, delta: other, color });
            }
        }
    }
    None
}

/// `{alpha s : s in S}` as point sets, one per color of `x`.
fn neighbourhoods(x: &TatraScheme, alpha: u32) -> Vec<Vec<u32>> {
    (0..x.rank() as u32)
        .map(|s| x.config().neighbourhood(alpha, s))
        .collect()
}

/// Whether the fibers of `y` are exactly the neighbourhoods `alpha s`.
pub fn extension_fibers_match(x: &TatraScheme, y: &CoherentConfiguration, alpha: u32) -> bool {
    let mut expected = neighbourhoods(x, alpha);
    expected.retain(|set| !set.is_empty());
    expected.sort();
    let mut found = y.fibers().to_vec();
    found.sort();
    expected == found
}

pub fn verify_extension_fibers(x: &TatraScheme, alpha: u32) -> Result<bool> {
    let y = x.config().one_point_extension(alpha)?;
    Ok(extension_fibers_match(x, &y, alpha))
}

fn fiber_index(y: &CoherentConfiguration, delta: &[u32]) -> Result<u32> {
    let mut sorted = delta.to_vec();
    sorted.sort_unstable();
    y.fibers()
        .iter()
        .position(|f| *f == sorted)
        .map(|i| i as u32)
        .ok_or(Error::NotAFiber)
}

/// Whether every fiber other than `delta` is reached from `delta` by a
/// basis relation of valency 1.
pub fn verify_valency_one_links(y: &CoherentConfiguration, delta: &[u32]) -> Result<bool> {
    let source = fiber_index(y, delta)?;
    let mut linked = vec![false; y.fibers().len()];
    linked[source as usize] = true;
    for t in 0..y.rank() as u32 {
        let meta = y.relation(t);
        if meta.source_fiber == source && meta.valency == 1 {
            linked[meta.target_fiber as usize] = true;
        }
    }
    Ok(linked.into_iter().all(|l| l))
}

/// Whether the scheme induced on `delta` is regular.
pub fn verify_delta_regular(y: &CoherentConfiguration, delta: &[u32]) -> Result<bool> {
    y.restriction(delta)?.is_regular()
}

/// Base points checked under `opts`.
pub fn base_points(degree: usize, opts: &SeparabilityOptions) -> Vec<u32> {
    if opts.all_alpha || degree <= opts.alpha_limit {
        return (0..degree as u32).collect();
    }
    let k = opts.sample_size.clamp(1, degree);
    let mut points: Vec<u32> = (0..k).map(|i| (i * degree / k) as u32).collect();
    points.dedup();
    points
}

/// Smallest unit mod `n` that is not a power of `r` mod `n`.
pub fn witness_unit(r: u64, n: u64) -> Option<u32> {
    let mut powers = vec![false; n as usize];
    let mut p = 1 % n;
    loop {
        if powers[p as usize] {
            break;
        }
        powers[p as usize] = true;
        p = p * r % n;
    }
    (1..n)
        .find(|&u| gcd(u, n) == 1 && !powers[u as usize])
        .map(|u| u as u32)
}

pub fn separability_verdict(q: u64, n: u32, opts: &SeparabilityOptions) -> Result<SeparabilityReport> {
    let x = TatraScheme::build(q, n)?;
    separability_verdict_for(&x, opts)
}

pub fn separability_verdict_for(x: &TatraScheme, opts: &SeparabilityOptions) -> Result<SeparabilityReport> {
    let alphas = base_points(x.degree(), opts);
    let mut fiber_sizes = Vec::new();
    let (mut fibers_ok, mut links_ok, mut regular_ok) = (true, true, true);
    let mut counterexample = None;
    for &alpha in &alphas {
        let y = x.config().one_point_extension(alpha)?;
        if fiber_sizes.is_empty() {
            fiber_sizes = y.fibers().iter().map(Vec::len).collect();
            fiber_sizes.sort_unstable();
        }
        if !extension_fibers_match(x, &y, alpha) {
            fibers_ok = false;
            continue;
        }
        let delta = x.config().neighbourhood(alpha, x.s(0));
        links_ok &= verify_valency_one_links(&y, &delta)?;
        if !verify_delta_regular(&y, &delta)? {
            regular_ok = false;
            if counterexample.is_none() {
                counterexample = delta_counterexample(&y, alpha, &delta);
            }
        }
    }

    let r = x.field().characteristic() as u64;
    let primitive_root = is_primitive_root(r, x.n() as u64)?;
    let mut witness = None;
    let mut bruteforce_checked = false;
    if !primitive_root {
        let u = witness_unit(r, x.n() as u64).ok_or_else(|| Error::Verification {
            check: "non-induced witness",
            detail: format!("no unit outside <{r}> mod {}", x.n()),
        })?;
        let phi = AlgebraicAut { u, g: 0 };
        if let Some(map) = is_induced(&phi, x)? {
            return Err(Error::Verification {
                check: "non-induced witness",
                detail: format!("{phi:?} is induced by {map:?}"),
            });
        }
        if let Some(maps) = induced_maps_bruteforce(x, opts.iso_bruteforce_limit)? {
            if maps.contains(&phi.color_map(x)) {
                return Err(Error::Verification {
                    check: "non-induced witness",
                    detail: format!("{phi:?} is induced by an element of Iso"),
                });
            }
            bruteforce_checked = true;
        }
        witness = Some(phi);
    }

    Ok(SeparabilityReport {
        q: x.q(),
        n: x.n(),
        degree: x.degree(),
        rank: x.rank(),
        alphas_checked: alphas.len(),
        extension_fiber_sizes: fiber_sizes,
        extension_fibers_ok: fibers_ok,
        valency_one_links_ok: links_ok,
        delta_regular_ok: regular_ok,
        delta_counterexample: counterexample,
        s_upper_bound: (fibers_ok && links_ok && regular_ok).then_some(2),
        primitive_root,
        noninduced_witness: witness,
        witness_bruteforce_checked: bruteforce_checked,
        s_lower_bound: if witness.is_some() { 2 } else { 1 },
    })
}

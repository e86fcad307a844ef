//! Acceptance suite: one line per criterion, exit status 1 if any criterion
//! deviates from its expected outcome.

use std::collections::{BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tatra_core::autiso::{
    automorphism_generators, automorphism_group, exhaustive_algebraic_auts, induced_maps_bruteforce,
    induced_ratio, is_induced, is_schurian_under, isomorphism_generators, isomorphism_group, schurity_check,
};
use tatra_core::coherent_config::{canonical_coloring, coherent_closure, verify_axioms};
use tatra_core::separability::{
    delta_counterexample, extension_fibers_match, verify_delta_regular, verify_valency_one_links, witness_unit,
};
use tatra_core::{euler_phi, is_primitive_root, AlgebraicAut, CoherentConfiguration, Permutation, TatraScheme};

const BATTERY: [(u64, u32); 12] = [
    (4, 1),
    (4, 3),
    (5, 2),
    (7, 3),
    (8, 7),
    (9, 4),
    (11, 5),
    (13, 3),
    (13, 6),
    (16, 3),
    (16, 5),
    (16, 15),
];

const BUILD_TIME_LIMIT: Duration = Duration::from_secs(10);
const EXTENSION_TIME_LIMIT: Duration = Duration::from_secs(300);
const ORBIT_DEGREE_LIMIT: usize = 100;
const PIPELINE_DEGREE_LIMIT: usize = 100;
const EXHAUSTIVE_RANK_LIMIT: usize = 12;
const ISO_BRUTEFORCE_LIMIT: u128 = 100_000;
const RANDOM_COLORINGS: usize = 50;
const RANDOM_MAX_POINTS: usize = 40;
const RNG_SEED: u64 = 0x7a7a_2024;

/// Outcome of one criterion: `Ok(detail)` or `Err(first failure)`.
type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn battery() -> Vec<TatraScheme> {
    BATTERY.iter().map(|&(q, n)| TatraScheme::build(q, n).unwrap()).collect()
}

fn name(x: &TatraScheme) -> String {
    format!("X({},{})", x.q(), x.n())
}

fn construction_constants() -> Outcome {
    let mut slowest = Duration::ZERO;
    for &(q, n) in &BATTERY {
        let start = Instant::now();
        let x = TatraScheme::build(q, n).map_err(|e| format!("X({q},{n}): {e}"))?;
        let report = verify_axioms(x.degree(), x.config().cells()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        check(x.degree() == (n as u64 * (q + 1)) as usize, || format!("X({q},{n}): degree {}", x.degree()))?;
        check(x.rank() == 2 * n as usize, || format!("X({q},{n}): rank {}", x.rank()))?;
        check(report.passed(), || format!("X({q},{n}): {:?}", report.failure))?;
        check(elapsed < BUILD_TIME_LIMIT, || format!("X({q},{n}): {elapsed:?}"))?;
    }
    Ok(format!("12 instances, slowest build+axioms {:.2?}", slowest))
}

/// Counts `c_{s_h s_g}^t` pair by pair with a loop over the middle point.
fn tensor_identities(xs: &[TatraScheme]) -> Outcome {
    let mut pairs_checked = 0usize;
    for x in xs {
        let c = x.config();
        let (deg, n, q, m) = (x.degree(), x.n(), x.q(), x.m());
        for a in 0..deg as u32 {
            for g in 0..n {
                let rv = (0..deg as u32).filter(|&b| c.color(a, b) == x.r(g)).count();
                let sv = (0..deg as u32).filter(|&b| c.color(a, b) == x.s(g)).count();
                check(rv == 1 && sv == q as usize, || {
                    format!("{}: point {a} has {rv} r_{g}- and {sv} s_{g}-neighbours", name(x))
                })?;
            }
        }
        let mut counts = vec![0u32; (n * n) as usize];
        for a in 0..deg as u32 {
            for b in 0..deg as u32 {
                counts.iter_mut().for_each(|v| *v = 0);
                for mid in 0..deg as u32 {
                    let (u, v) = (c.color(a, mid), c.color(mid, b));
                    if u >= n && v >= n {
                        counts[((u - n) * n + (v - n)) as usize] += 1;
                    }
                }
                let t = c.color(a, b);
                for h in 0..n {
                    for g in 0..n {
                        let expected = if t >= n {
                            m
                        } else if t == (g + n - h) % n {
                            q
                        } else {
                            0
                        };
                        let found = counts[(h * n + g) as usize];
                        check(found == expected, || {
                            format!("{}: c[s_{h}][s_{g}] at ({a},{b}) is {found}, expected {expected}", name(x))
                        })?;
                    }
                }
                pairs_checked += 1;
            }
        }
    }
    Ok(format!("{pairs_checked} pairs, every (h, g, x, y)"))
}

/// `|alpha s_g  cap  Gamma| = 1` with lines found from the determinant.
fn one_neighbour_per_line(xs: &[TatraScheme]) -> Outcome {
    let mut cases = 0usize;
    for x in xs {
        let pts = x.points();
        let deg = pts.len();
        let mut line_of = vec![usize::MAX; deg];
        let mut lines = 0;
        for a in 0..deg {
            if line_of[a] == usize::MAX {
                for b in 0..deg {
                    if x.det(&pts[a], &pts[b]) == 0 {
                        line_of[b] = lines;
                    }
                }
                lines += 1;
            }
        }
        check(lines == x.q() as usize + 1, || format!("{}: {lines} lines", name(x)))?;
        for a in 0..deg {
            for g in 0..x.n() {
                let mut hits = vec![0usize; lines];
                for b in 0..deg {
                    if x.config().color(a as u32, b as u32) == x.s(g) {
                        hits[line_of[b]] += 1;
                    }
                }
                for (gamma, &h) in hits.iter().enumerate() {
                    if gamma != line_of[a] {
                        check(h == 1, || format!("{}: alpha {a}, s_{g}, line {gamma}: {h}", name(x)))?;
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} (alpha, g, Gamma) cases"))
}

fn schurity(xs: &[TatraScheme]) -> Outcome {
    let mut done = Vec::new();
    for x in xs.iter().filter(|x| x.degree() <= ORBIT_DEGREE_LIMIT) {
        let group = automorphism_group(x).map_err(|e| e.to_string())?;
        check(is_schurian_under(x.config(), &group), || format!("{}: 2-orbits differ from colors", name(x)))?;
        check(schurity_check(x).map_err(|e| e.to_string())?, || format!("{}: schurity_check", name(x)))?;
        done.push(name(x));
    }
    Ok(format!("{} instances with degree <= {ORBIT_DEGREE_LIMIT}", done.len()))
}

/// Group order by closing the generator set under multiplication.
fn closure_order(gens: &[Permutation]) -> usize {
    let id = Permutation::identity(gens[0].degree());
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    seen.insert(id.images().to_vec());
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let next = p.compose(g);
            if seen.insert(next.images().to_vec()) {
                queue.push_back(next);
            }
        }
    }
    seen.len()
}

fn group_orders(xs: &[TatraScheme]) -> Outcome {
    for x in xs {
        let aut = automorphism_group(x).map_err(|e| e.to_string())?.order();
        let iso = isomorphism_group(x).map_err(|e| e.to_string())?.order();
        let fr = x.frobenius();
        let expected = x.n() as u128 * fr.d as u128 / fr.d0 as u128;
        check(iso % aut == 0 && iso / aut == expected, || {
            format!("{}: |Iso|/|Aut| = {iso}/{aut}, expected {expected}", name(x))
        })?;
    }
    let x = &xs[1];
    let perms = |maps: Vec<tatra_core::SemilinearMap>| -> Vec<Permutation> {
        maps.iter().map(|m| m.perm_of(x).unwrap()).collect()
    };
    let aut = closure_order(&perms(automorphism_generators(x)));
    let iso = closure_order(&perms(isomorphism_generators(x)));
    check((aut, iso) == (60, 360), || format!("X(4,3): closure orders {aut}, {iso}"))?;
    Ok("all 12 ratios n d / d0; X(4,3) 360/60 = 6 by element closure".into())
}

fn algebraic_automorphisms(xs: &[TatraScheme]) -> Outcome {
    let mut summary = Vec::new();
    for x in xs.iter().filter(|x| x.rank() <= EXHAUSTIVE_RANK_LIMIT || (x.q(), x.n()) == (8, 7)) {
        let tensor = x.config().intersection_tensor().map_err(|e| e.to_string())?;
        let found: BTreeSet<Vec<u32>> = exhaustive_algebraic_auts(x.config(), &tensor).into_iter().collect();
        let n = x.n();
        let family: BTreeSet<Vec<u32>> = (1..=n)
            .filter(|&u| coprime(u, n) && (u < n || n == 1))
            .flat_map(|u| (0..n).map(move |g| AlgebraicAut { u, g }))
            .map(|phi| phi.color_map(x))
            .collect();
        let expected = n as u64 * euler_phi(n as u64);
        check(found.len() as u64 == expected, || {
            format!("{}: {} algebraic automorphisms, expected {expected}", name(x), found.len())
        })?;
        check(found == family, || format!("{}: exhaustive set differs from phi_(u,g)", name(x)))?;
        if matches!((x.q(), x.n()), (4, 3) | (7, 3) | (8, 7)) {
            summary.push(format!("{} -> {}", name(x), found.len()));
        }
    }
    Ok(summary.join(", "))
}

fn coprime(u: u32, n: u32) -> bool {
    let (mut a, mut b) = (u, n);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

fn induced_ratios(xs: &[TatraScheme]) -> Outcome {
    let mut summary = Vec::new();
    for x in xs {
        let r = induced_ratio(x).map_err(|e| format!("{}: {e}", name(x)))?;
        let fr = x.frobenius();
        let n = x.n() as u64;
        check(r.iso_order / r.aut_order == r.induced_count, || format!("{}: routes disagree", name(x)))?;
        check(r.ratio * fr.d as u64 == euler_phi(n) * fr.d0 as u64, || {
            format!("{}: ratio {} vs phi(n) d0 / d", name(x), r.ratio)
        })?;
        if matches!((x.q(), x.n()), (4, 3) | (7, 3) | (16, 5)) {
            summary.push(format!("{} -> {}", name(x), r.ratio));
        }
    }
    let want = ["X(4,3) -> 1", "X(7,3) -> 2", "X(16,5) -> 1"];
    check(summary == want, || format!("ratios {summary:?}"))?;
    Ok(summary.join(", "))
}

struct PipelineOutcome {
    line: Outcome,
    pattern_ok: bool,
}

/// Fibers and valency-1 links must hold everywhere. Regularity on `Delta`
/// holds exactly when `K` is trivial, since `diag(x, 1)`, `x` in `K`, fixes
/// `alpha = K e1` and moves points of `Delta`.
fn pipeline(xs: &[TatraScheme]) -> PipelineOutcome {
    let mut alphas = 0usize;
    let mut irregular: Vec<String> = Vec::new();
    let mut pattern_ok = true;
    for x in xs.iter().filter(|x| x.degree() <= PIPELINE_DEGREE_LIMIT) {
        let mut all_regular = true;
        let mut witness = None;
        for alpha in 0..x.degree() as u32 {
            let y = x.config().one_point_extension(alpha).unwrap();
            let delta = x.config().neighbourhood(alpha, x.s(0));
            let fibers = extension_fibers_match(x, &y, alpha);
            let links = fibers && verify_valency_one_links(&y, &delta).unwrap();
            if !fibers || !links {
                return PipelineOutcome {
                    line: Err(format!("{} alpha {alpha}: fibers {fibers}, links {links}", name(x))),
                    pattern_ok: false,
                };
            }
            if !verify_delta_regular(&y, &delta).unwrap() {
                all_regular = false;
                witness = witness.or_else(|| delta_counterexample(&y, alpha, &delta));
            }
            alphas += 1;
        }
        pattern_ok &= all_regular == (x.m() == 1);
        if !all_regular {
            let w = witness.unwrap();
            irregular.push(format!("{} (m={}, alpha {}: {}~{} and {}~{})", name(x), x.m(), w.alpha, w.beta, w.gamma, w.beta, w.delta));
        }
    }
    let detail = format!(
        "{alphas} base points; fibers and valency-1 links hold everywhere; Y_Delta not regular for {}",
        irregular.join(", ")
    );
    PipelineOutcome {
        line: if irregular.is_empty() { Ok(detail) } else { Err(detail) },
        pattern_ok,
    }
}

fn nonseparability(xs: &[TatraScheme]) -> Outcome {
    let mut summary = Vec::new();
    for x in xs {
        let r = x.field().characteristic() as u64;
        if is_primitive_root(r, x.n() as u64).unwrap() {
            continue;
        }
        let u = witness_unit(r, x.n() as u64).ok_or_else(|| format!("{}: no witness unit", name(x)))?;
        let phi = AlgebraicAut { u, g: 0 };
        let by_criterion = is_induced(&phi, x).map_err(|e| e.to_string())?;
        check(by_criterion.is_none(), || format!("{}: {phi:?} induced by {by_criterion:?}", name(x)))?;
        let brute = induced_maps_bruteforce(x, ISO_BRUTEFORCE_LIMIT).map_err(|e| e.to_string())?;
        let tag = match brute {
            Some(maps) => {
                check(!maps.contains(&phi.color_map(x)), || format!("{}: {phi:?} induced by Iso", name(x)))?;
                "criterion+brute force"
            }
            None => "criterion",
        };
        summary.push(format!("{} u={u} ({tag})", name(x)));
    }
    let names: Vec<_> = summary.iter().map(|s| s.split(' ').next().unwrap()).collect();
    check(["X(7,3)", "X(8,7)", "X(13,3)"].iter().all(|n| names.contains(n)), || format!("{names:?}"))?;
    Ok(summary.join(", "))
}

fn random_permutation(rng: &mut ChaCha8Rng, size: usize) -> Vec<u32> {
    let mut p: Vec<u32> = (0..size as u32).collect();
    for i in (1..size).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

fn wl_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    for trial in 0..RANDOM_COLORINGS {
        let size = rng.gen_range(1..=RANDOM_MAX_POINTS);
        let colors = rng.gen_range(1..=4);
        let cells: Vec<u32> = (0..size * size).map(|_| rng.gen_range(0..colors)).collect();
        let y = coherent_closure(size, &cells).unwrap();
        let again = coherent_closure(size, y.cells()).unwrap();
        check(again.same_partition(&y), || format!("trial {trial}: closure not idempotent"))?;
        check(verify_axioms(size, y.cells()).unwrap().passed(), || format!("trial {trial}: not coherent"))?;

        let p = random_permutation(&mut rng, size);
        let mut moved = vec![0u32; size * size];
        let mut expected = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                let (pa, pb) = (p[a] as usize, p[b] as usize);
                moved[pa * size + pb] = cells[a * size + b];
                expected[pa * size + pb] = y.color(a as u32, b as u32);
            }
        }
        let z = coherent_closure(size, &moved).unwrap();
        check(z.canonical_cells() == canonical_coloring(&expected), || {
            format!("trial {trial}: closure not equivariant")
        })?;
    }
    let mut pentagon = vec![2u32; 25];
    for a in 0..5 {
        pentagon[a * 5 + a] = 0;
        pentagon[a * 5 + (a + 1) % 5] = 1;
        pentagon[((a + 1) % 5) * 5 + a] = 1;
    }
    let p = coherent_closure(5, &pentagon).unwrap();
    check(p.rank() == 3, || format!("pentagon closes to rank {}", p.rank()))?;
    Ok(format!("{RANDOM_COLORINGS} random colorings up to {RANDOM_MAX_POINTS} points; pentagon rank 3"))
}

fn two_extension(x: &TatraScheme) -> Outcome {
    let start = Instant::now();
    let e: CoherentConfiguration = x.config().m_extension(2, 900).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let n = x.degree();
    check(e.size() == n * n, || format!("size {}", e.size()))?;
    let axioms = verify_axioms(e.size(), e.cells()).map_err(|e| e.to_string())?;
    check(axioms.passed(), || format!("{:?}", axioms.failure))?;
    for fiber in e.fibers() {
        let on_diag = fiber.iter().filter(|&&p| p as usize / n == p as usize % n).count();
        check(on_diag == 0 || on_diag == fiber.len(), || "a fiber meets the diagonal partly".into())?;
    }
    check(elapsed < EXTENSION_TIME_LIMIT, || format!("{elapsed:?}"))?;
    Ok(format!("{} points, rank {}, {} fibers, {:.2?}", e.size(), e.rank(), e.fibers().len(), elapsed))
}

/// Prints the line for one criterion; returns 1 if the outcome is not the
/// expected one.
fn report(id: u32, outcome: &Outcome, expected_pass: bool) -> u32 {
    let (tag, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2}: {tag}  {detail}");
    u32::from(outcome.is_ok() != expected_pass)
}

fn main() -> ExitCode {
    let xs = battery();
    let mut failures = 0;
    failures += report(1, &construction_constants(), true);
    failures += report(2, &tensor_identities(&xs), true);
    failures += report(3, &one_neighbour_per_line(&xs), true);
    failures += report(4, &schurity(&xs), true);
    failures += report(5, &group_orders(&xs), true);
    failures += report(6, &algebraic_automorphisms(&xs), true);
    failures += report(7, &induced_ratios(&xs), true);
    let p = pipeline(&xs);
    // known failure for nontrivial K; the pattern check guards the rest
    failures += report(8, &p.line, false);
    if !p.pattern_ok {
        println!("criterion  8: unexpected pattern, regularity on Delta should hold exactly when m = 1");
        failures += 1;
    }
    failures += report(9, &nonseparability(&xs), true);
    failures += report(10, &wl_sanity(), true);
    failures += report(11, &two_extension(&xs[1]), true);
    if failures == 0 {
        println!("acceptance: 10 of 11 criteria pass; criterion 8 fails as analysed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} unexpected outcome(s)");
        ExitCode::FAILURE
    }
}

//! The operations behind each CLI verb, returning serializable outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tatra_core::autiso::{groups_report, isomorphism_generators, schurity_check, GroupsReport};
use tatra_core::separability::separability_verdict_for;
use tatra_core::{Error, IntersectionTensor, SeparabilityOptions, SeparabilityReport, TatraScheme};

use crate::formats::{self, ColorMatrix, FormatError, TensorFile};

pub const DEFAULT_MAX_DEGREE: usize = 300;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    BadParameters(String),
    #[error("{0}")]
    Assertion(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Assertion(_) => 1,
            CommandError::BadParameters(_) => 2,
            CommandError::Format(_) => 3,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CommandError::Assertion(_) => "assertion",
            CommandError::BadParameters(_) => "bad-parameters",
            CommandError::Format(_) => "io",
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification { .. } => CommandError::Assertion(e.to_string()),
            _ => CommandError::BadParameters(e.to_string()),
        }
    }
}

/// Parameters `(q, n)` of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceSpec {
    pub q: u64,
    pub n: u32,
}

impl InstanceSpec {
    /// Builds the scheme after checking admissibility and the degree guard.
    pub fn build(&self, max_degree: usize) -> Result<TatraScheme, CommandError> {
        let InstanceSpec { q, n } = *self;
        if n == 0 || q < 2 {
            return Err(CommandError::BadParameters(format!("q = {q}, n = {n}: need q >= 2 and n >= 1")));
        }
        let degree = n as u64 * (q + 1);
        if degree > max_degree as u64 {
            return Err(CommandError::BadParameters(format!(
                "degree n(q+1) = {degree} exceeds --max-degree {max_degree}"
            )));
        }
        Ok(TatraScheme::build(q, n)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildSummary {
    pub q: u32,
    pub n: u32,
    pub degree: usize,
    pub rank: usize,
    pub matrix: PathBuf,
    pub labels: PathBuf,
}

pub fn build(x: &TatraScheme, dir: &Path) -> Result<BuildSummary, CommandError> {
    let stem = format!("tatra-{}-{}", x.q(), x.n());
    let matrix = dir.join(format!("{stem}.txt"));
    let labels = dir.join(format!("{stem}.labels.json"));
    formats::write_matrix(&matrix, &ColorMatrix::of(x.config()))?;
    formats::write_text(&labels, &formats::labels_json(x)?)?;
    Ok(BuildSummary {
        q: x.q(),
        n: x.n(),
        degree: x.degree(),
        rank: x.rank(),
        matrix,
        labels,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub q: u32,
    pub n: u32,
    pub degree: usize,
    pub rank: usize,
    pub checks: Vec<&'static str>,
}

/// Structural checks, schurity under the semilinear group, and agreement of
/// the action of each isomorphism generator with its formula on colors.
pub fn verify(x: &TatraScheme) -> Result<VerifyReport, CommandError> {
    let structure = x.verify_structure()?;
    let mut checks = structure.checks;
    if !schurity_check(x)? {
        return Err(CommandError::Assertion(
            "schurity failed: the 2-orbits of Aut differ from the color classes".into(),
        ));
    }
    checks.push("schurity");
    for g in isomorphism_generators(x) {
        g.relation_image(x)?;
    }
    checks.push("generator images");
    Ok(VerifyReport {
        q: x.q(),
        n: x.n(),
        degree: x.degree(),
        rank: x.rank(),
        checks,
    })
}

/// Loads a color matrix into `x` in place of its own, for negative tests.
pub fn inject_matrix(x: &mut TatraScheme, path: &Path) -> Result<(), CommandError> {
    let m = formats::read_matrix(path)?;
    if m.size != x.degree() {
        return Err(CommandError::BadParameters(format!(
            "matrix has {} points, X({}, {}) has {}",
            m.size,
            x.q(),
            x.n(),
            x.degree()
        )));
    }
    x.replace_cells(m.cells)?;
    Ok(())
}

pub fn tensor(x: &TatraScheme) -> Result<TensorFile, CommandError> {
    let t = IntersectionTensor::count(x.config())?;
    Ok(TensorFile::of(&t))
}

pub fn groups(x: &TatraScheme) -> Result<GroupsReport, CommandError> {
    Ok(groups_report(x)?)
}

pub fn report(x: &TatraScheme, opts: &SeparabilityOptions) -> Result<SeparabilityReport, CommandError> {
    Ok(separability_verdict_for(x, opts)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn build_text(s: &BuildSummary) -> String {
    format!(
        "X({}, {}): degree {}, rank {}\nmatrix: {}\nlabels: {}\n",
        s.q,
        s.n,
        s.degree,
        s.rank,
        s.matrix.display(),
        s.labels.display()
    )
}

pub fn verify_text(r: &VerifyReport) -> String {
    let mut out = format!("X({}, {}): degree {}, rank {}\n", r.q, r.n, r.degree, r.rank);
    for c in &r.checks {
        let _ = writeln!(out, "  ok  {c}");
    }
    out
}

pub fn tensor_text(t: &TensorFile) -> String {
    let mut out = format!("rank {}\n", t.rank);
    for (r, plane) in t.entries.iter().enumerate() {
        for (s, row) in plane.iter().enumerate() {
            for (u, &c) in row.iter().enumerate() {
                if c != 0 {
                    let _ = writeln!(out, "c[{r}][{s}][{u}] = {c}");
                }
            }
        }
    }
    out
}

pub fn groups_text(g: &GroupsReport) -> String {
    format!(
        "X({}, {}): degree {}, rank {}\n|Aut| = {}, |Iso| = {}, kernel {}\n\
         algebraic automorphisms {}, induced {}, ratio {}\nprimitive root: {}\n",
        g.q,
        g.n,
        g.degree,
        g.rank,
        g.aut_order,
        g.iso_order,
        g.aut_kernel,
        g.alg_aut_count,
        g.induced_count,
        g.ratio,
        yes_no(g.primitive_root)
    )
}

pub fn report_text(r: &SeparabilityReport) -> String {
    let mut out = format!(
        "X({}, {}): degree {}, rank {}, base points checked {}\n",
        r.q, r.n, r.degree, r.rank, r.alphas_checked
    );
    let _ = writeln!(out, "  extension fibers match   {}", yes_no(r.extension_fibers_ok));
    let _ = writeln!(out, "  valency-1 links          {}", yes_no(r.valency_one_links_ok));
    let _ = writeln!(out, "  Delta regular            {}", yes_no(r.delta_regular_ok));
    if let Some(c) = &r.delta_counterexample {
        let _ = writeln!(
            out,
            "    alpha {}: ({}, {}) and ({}, {}) share color {}",
            c.alpha, c.beta, c.gamma, c.beta, c.delta, c.color
        );
    }
    let _ = writeln!(out, "  primitive root           {}", yes_no(r.primitive_root));
    if let Some(w) = &r.noninduced_witness {
        let _ = writeln!(
            out,
            "  non-induced witness      phi(u = {}, g = {}){}",
            w.u,
            w.g,
            if r.witness_bruteforce_checked { ", checked against all of Iso" } else { "" }
        );
    }
    match r.s_upper_bound {
        Some(s) if s == r.s_lower_bound => writeln!(out, "  s(X) = {s}"),
        Some(s) => writeln!(out, "  {} <= s(X) <= {s}", r.s_lower_bound),
        None => writeln!(out, "  s(X) >= {}, no upper bound certified", r.s_lower_bound),
    }
    .ok();
    out
}

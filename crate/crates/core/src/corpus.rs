//! Executable regression fixtures: the small counterexample graphs with
//! machine-checkable expected verdicts, each generated on demand so the
//! parameters sweep cheaply.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersion::{find_immersion, Mode, Outcome, SearchLimits};
use crate::multigraph::{Multigraph, VertexId, VertexSet};
use crate::thinness::{
    double_star, is_almost_alpha_thin, min_thinness, star, star_with_multiplicity, DEFAULT_CAP,
};
use crate::treecut::{
    certify_width, search_certificate, CertificateSearch, CertifyOutcome, NodeId, ReductionMode,
    TreeCutDecomposition,
};
use crate::walls::build_wall;

/// A generated fixture: the graph plus the list of verdicts to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// The star with `3 alpha + 3` leaves: never almost-thin at `alpha`,
    /// yet it melts away under leaf deletion.
    StarThreshold { alpha: usize },
    /// Two stars with `3 alpha + 3` leaves each, leaves identified: never
    /// almost-thin at `alpha`, yet suppression flattens it completely.
    DoubleStarThreshold { alpha: usize },
    /// The star with `alpha (3 alpha + 3)` leaves: no low-adhesion
    /// decomposition certifies when torsos are taken as they are, and the
    /// hexagon wall is absent; with reduced torsos a certificate exists.
    StarLowAdhesion { alpha: usize },
    /// The same star with every edge doubled: deleting degree-1 peripheral
    /// vertices instead of the full reduction does not rescue it.
    StarLowAdhesionDoubled { alpha: usize },
}

impl Fixture {
    pub fn name(&self) -> String {
        match self {
            Fixture::StarThreshold { alpha } => format!("star-threshold-a{alpha}"),
            Fixture::DoubleStarThreshold { alpha } => format!("double-star-threshold-a{alpha}"),
            Fixture::StarLowAdhesion { alpha } => format!("star-low-adhesion-a{alpha}"),
            Fixture::StarLowAdhesionDoubled { alpha } => {
                format!("star-low-adhesion-doubled-a{alpha}")
            }
        }
    }

    pub fn graph(&self) -> Multigraph {
        match self {
            Fixture::StarThreshold { alpha } => star(3 * alpha + 3),
            Fixture::DoubleStarThreshold { alpha } => double_star(3 * alpha + 3),
            Fixture::StarLowAdhesion { alpha } => star(alpha * (3 * alpha + 3)),
            Fixture::StarLowAdhesionDoubled { alpha } => {
                star_with_multiplicity(alpha * (3 * alpha + 3), 2)
            }
        }
    }
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![
        Fixture::StarThreshold { alpha: 1 },
        Fixture::StarThreshold { alpha: 2 },
        Fixture::DoubleStarThreshold { alpha: 1 },
        Fixture::StarLowAdhesion { alpha: 1 },
        Fixture::StarLowAdhesionDoubled { alpha: 1 },
    ]
}

pub fn fixture(name: &str) -> Result<Fixture> {
    all_fixtures()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown fixture {name}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub fixture: String,
    pub verdict: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub reports: Vec<VerdictReport>,
    pub all_green: bool,
}

/// Runs every verdict of one fixture.
pub fn run_fixture(f: &Fixture) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let mut push = |verdict: &str, pass: bool, detail: String| {
        out.push(VerdictReport {
            fixture: f.name(),
            verdict: verdict.into(),
            pass,
            detail,
        });
    };
    match f {
        Fixture::StarThreshold { alpha } => {
            let g = f.graph();
            let absent = is_almost_alpha_thin(&g, *alpha, DEFAULT_CAP)?.is_none();
            push(
                "not-almost-thin",
                absent,
                format!("witness search at level {alpha} exhausted"),
            );
            let (reduced, _) = crate::synthesis::reduce_min_degree3(&g);
            push(
                "reduces-to-single-vertex",
                reduced.vertex_count() == 1,
                format!("{} vertices left", reduced.vertex_count()),
            );
        }
        Fixture::DoubleStarThreshold { alpha } => {
            let g = f.graph();
            let absent = is_almost_alpha_thin(&g, *alpha, DEFAULT_CAP)?.is_none();
            push(
                "not-almost-thin",
                absent,
                format!("witness search at level {alpha} exhausted"),
            );
            let mut h = g.clone();
            loop {
                let v = h
                    .vertices()
                    .find(|v| h.degree(v).unwrap() == 2)
                    .cloned();
                match v {
                    Some(v) => h = h.suppress(&v).unwrap(),
                    None => break,
                }
            }
            let thin = min_thinness(&h, DEFAULT_CAP)?.alpha;
            push(
                "suppresses-to-zero-thin",
                h.vertex_count() == 2 && thin == 0,
                format!("{} vertices, level {thin}", h.vertex_count()),
            );
        }
        Fixture::StarLowAdhesion { alpha } => {
            let g = f.graph();
            let max_nodes = g.vertex_count();
            match search_certificate(&g, *alpha, max_nodes, ReductionMode::TorsoAsIs, DEFAULT_CAP)?
            {
                CertificateSearch::Absent { candidates_checked } => push(
                    "no-cover-with-raw-torsos",
                    true,
                    format!("{candidates_checked} candidates exhausted"),
                ),
                CertificateSearch::Found { .. } => {
                    push("no-cover-with-raw-torsos", false, "certificate found".into())
                }
            }
            let wall = build_wall(2)?;
            let outcome =
                find_immersion(&wall.graph, &g, Mode::Strong, &SearchLimits::default())?;
            push(
                "wall-absent",
                matches!(outcome, Outcome::Absent),
                format!("{outcome:?}"),
            );
            // contrast: with fully reduced torsos the leaf split certifies
            let d = leaf_split(&g);
            let certified = matches!(
                certify_width(&g, &d, *alpha, ReductionMode::ThreeCentre, DEFAULT_CAP)?,
                CertifyOutcome::Certified(_)
            );
            push(
                "cover-exists-with-reduced-torsos",
                certified,
                "leaf split decomposition".into(),
            );
        }
        Fixture::StarLowAdhesionDoubled { alpha } => {
            let g = f.graph();
            let max_nodes = g.vertex_count();
            match search_certificate(
                &g,
                *alpha,
                max_nodes,
                ReductionMode::DeleteLeavesOnly,
                DEFAULT_CAP,
            )? {
                CertificateSearch::Absent { candidates_checked } => push(
                    "no-cover-with-leaf-deletion-only",
                    true,
                    format!("{candidates_checked} candidates exhausted"),
                ),
                CertificateSearch::Found { .. } => push(
                    "no-cover-with-leaf-deletion-only",
                    false,
                    "certificate found".into(),
                ),
            }
        }
    }
    Ok(out)
}

/// Centre at one node, each leaf its own node.
fn leaf_split(g: &Multigraph) -> TreeCutDecomposition {
    let centre = VertexId::from("c");
    let mut parts = std::collections::BTreeMap::from([(
        NodeId::from("s"),
        VertexSet::from([centre.clone()]),
    )]);
    let mut tree = Vec::new();
    for (i, leaf) in g.vertices().filter(|v| **v != centre).enumerate() {
        let t = NodeId::new(format!("t{i:02}"));
        parts.insert(t.clone(), VertexSet::from([leaf.clone()]));
        tree.push((NodeId::from("s"), t));
    }
    TreeCutDecomposition::new(tree, parts).unwrap()
}

/// Runs all fixtures, optionally filtered by name.
pub fn run_all(only: Option<&str>) -> Result<CorpusReport> {
    let fixtures: Vec<Fixture> = match only {
        Some(name) => vec![fixture(name)?],
        None => all_fixtures(),
    };
    let mut reports = Vec::new();
    for f in &fixtures {
        reports.extend(run_fixture(f)?);
    }
    let all_green = reports.iter().all(|r| r.pass);
    Ok(CorpusReport { reports, all_green })
}

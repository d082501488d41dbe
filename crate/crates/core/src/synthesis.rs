//! The constructive decomposition pipeline and its escape hatches.
//!
//! Given a graph and a target wall size, the pipeline reduces to minimum
//! degree 3, splits along edge cuts of size at most 2, and for each
//! 3-edge-connected piece builds the auxiliary parallel-edge graph,
//! contracts its components, computes an exact tree decomposition, and
//! converts it into a tree-cut decomposition that is lifted back through
//! every reduction. Whenever one of the instance checks fails along the
//! way, the failure is converted into a verified strong immersion of the
//! wall instead: through a fat hub, through a star minor in the auxiliary
//! graph, or through an apexed path.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::immersion::{
    apex_path, apex_to_spider_subdivision, compose_embeddings, embed_in_spider, spider,
    validate_embedding, ImmersionEmbedding, Mode,
};
use crate::multigraph::{ordered_pair, Multigraph, Path, VertexId, VertexSet};
use crate::thinness::{jump_profile, min_almost_thinness};
use crate::treecut::{
    adhesion, certify_width, glue, three_centre, torso, validate, CertifyOutcome, NodeId,
    ReductionMode, TreeCutDecomposition, WidthCertificate,
};
use crate::walls::build_wall;

// ---------------------------------------------------------------------------
// parameters

/// Configurable external-theorem constants. They have no closed form here;
/// reports fall back to symbolic expressions when a value is missing.
#[derive(Clone, Debug, Default)]
pub struct ExternalConstants {
    /// neighbour threshold forcing a wall, per wall size
    pub neighbour_threshold: BTreeMap<u64, u128>,
    /// tree-width bound under an excluded wall subdivision, per wall size
    pub treewidth_bound: BTreeMap<u64, u128>,
    /// star-comb threshold per (leaves, teeth)
    pub star_comb_threshold: BTreeMap<(u64, u64), u128>,
}

/// All derived quantities of the pipeline for one wall size.
#[derive(Clone, Debug)]
pub struct Parameters {
    pub ell: u64,
    pub externals: ExternalConstants,
}

fn mul(a: u128, b: u128, what: &'static str) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::ParameterOverflow(what.into()))
}

fn add(a: u128, b: u128, what: &'static str) -> Result<u128> {
    a.checked_add(b).ok_or(Error::ParameterOverflow(what.into()))
}

impl Parameters {
    pub fn new(ell: u64) -> Self {
        Parameters {
            ell,
            externals: ExternalConstants::default(),
        }
    }

    /// Pairs joined by more than this many parallel edges enter the
    /// auxiliary graph: `6 * ell^2`.
    pub fn parallel_threshold(&self) -> u128 {
        6 * (self.ell as u128) * (self.ell as u128)
    }

    /// Auxiliary-degree threshold that forces a wall: `2 * ell^2`.
    pub fn hub_threshold(&self) -> u128 {
        2 * (self.ell as u128) * (self.ell as u128)
    }

    pub fn neighbour_threshold(&self) -> Result<u128> {
        self.externals
            .neighbour_threshold
            .get(&self.ell)
            .copied()
            .ok_or_else(|| Error::MissingExternal(format!("g({})", self.ell)))
    }

    pub fn treewidth_bound(&self) -> Result<u128> {
        self.externals
            .treewidth_bound
            .get(&self.ell)
            .copied()
            .ok_or_else(|| Error::MissingExternal(format!("w({})", self.ell)))
    }

    pub fn star_comb_threshold(&self, s: u64, t: u64) -> Result<u128> {
        self.externals
            .star_comb_threshold
            .get(&(s, t))
            .copied()
            .ok_or_else(|| Error::MissingExternal(format!("h({s},{t})")))
    }

    /// `d = g(ell) * p(ell) * h(2 ell^2, 6 ell^2)^2`.
    pub fn degree_bound(&self) -> Result<u128> {
        let h = self.star_comb_threshold(
            2 * self.ell * self.ell,
            6 * self.ell * self.ell,
        )?;
        let gp = mul(self.neighbour_threshold()?, self.parallel_threshold(), "d")?;
        mul(gp, mul(h, h, "d")?, "d")
    }

    pub fn degree_bound_symbolic(&self) -> String {
        format!(
            "g({l}) * {p} * h({s},{t})^2",
            l = self.ell,
            p = self.parallel_threshold(),
            s = 2 * self.ell * self.ell,
            t = 6 * self.ell * self.ell
        )
    }

    /// `a = (2w + 2) d`.
    pub fn adhesion_bound(&self) -> Result<u128> {
        let w = self.treewidth_bound()?;
        mul(add(mul(2, w, "a")?, 2, "a")?, self.degree_bound()?, "a")
    }

    /// `k = (d + 1)(w + 1)`.
    pub fn torso_bound(&self) -> Result<u128> {
        let d = self.degree_bound()?;
        let w = self.treewidth_bound()?;
        mul(add(d, 1, "k")?, add(w, 1, "k")?, "k")
    }

    /// The closed-form certificate level: the maximum of the deletion-side
    /// bound `k (8 ell^2 + 1 + 6 ell^2 * 16 ell^4)` and the enumeration-side
    /// bound `p (6 ell^2)^2 + C(16 ell^4, 2) p (6 ell^2)^2 + k d / 2 + a k`.
    pub fn alpha_closed_form(&self) -> Result<u128> {
        let l2 = (self.ell as u128) * (self.ell as u128);
        let l4 = mul(l2, l2, "alpha")?;
        let p = self.parallel_threshold();
        let k = self.torso_bound()?;
        let d = self.degree_bound()?;
        let a = self.adhesion_bound()?;
        let first = mul(
            k,
            add(add(8 * l2, 1, "alpha")?, mul(6 * l2, 16 * l4, "alpha")?, "alpha")?,
            "alpha",
        )?;
        let six_l2_sq = mul(6 * l2, 6 * l2, "alpha")?;
        let pairs = {
            let n = mul(16, l4, "alpha")?;
            mul(n, n - 1, "alpha")? / 2
        };
        let second = add(
            add(
                mul(p, six_l2_sq, "alpha")?,
                mul(pairs, mul(p, six_l2_sq, "alpha")?, "alpha")?,
                "alpha",
            )?,
            add(mul(k, d, "alpha")? / 2, mul(a, k, "alpha")?, "alpha")?,
            "alpha",
        )?;
        Ok(first.max(second))
    }

    pub fn alpha_symbolic(&self) -> String {
        let l2 = (self.ell as u128) * (self.ell as u128);
        let l4 = l2 * l2;
        format!(
            "max(k({l}) * {t1}, {t2} + {pairs} * {t2} + k({l}) * d({l})/2 + a({l}) * k({l})) \
             with p({l}) = {p}, d({l}) = {d}, a({l}) = (2 w({l}) + 2) d({l}), \
             k({l}) = (d({l}) + 1)(w({l}) + 1)",
            l = self.ell,
            t1 = 8 * l2 + 1 + 6 * l2 * 16 * l4,
            t2 = self.parallel_threshold() * (6 * l2) * (6 * l2),
            pairs = (16 * l4) * (16 * l4 - 1) / 2,
            p = self.parallel_threshold(),
            d = self.degree_bound_symbolic(),
        )
    }
}

/// The wall size that a certificate at level `alpha` excludes:
/// `(a^2+1)(2(a+1)+4) + a^2 + a + a((a^2+1)(2(a+1)+a+2) + a^2 + a) + 2`.
pub fn wall_size_excluded_by(alpha: u128) -> Result<u128> {
    let a2 = mul(alpha, alpha, "ell")?;
    let first = add(
        mul(add(a2, 1, "ell")?, 2 * (alpha + 1) + 4, "ell")?,
        add(a2, alpha, "ell")?,
        "ell",
    )?;
    let inner = add(
        mul(add(a2, 1, "ell")?, add(2 * (alpha + 1), alpha + 2, "ell")?, "ell")?,
        add(a2, alpha, "ell")?,
        "ell",
    )?;
    add(add(first, mul(alpha, inner, "ell")?, "ell")?, 2, "ell")
}

// ---------------------------------------------------------------------------
// reduction to minimum degree 3

/// One recorded removal: enough to rebuild the decomposition node and to
/// re-route an embedding.
#[derive(Clone, Debug)]
pub enum ReduceStep {
    /// Degree at most 1: `anchor` is a neighbour when one exists, else the
    /// smallest other vertex.
    Delete { v: VertexId, anchor: VertexId },
    /// Degree exactly 2: ends of the two incident edges (equal for a
    /// doubled edge, whose suppression just drops the loop).
    Suppress {
        v: VertexId,
        left: VertexId,
        right: VertexId,
    },
}

impl ReduceStep {
    pub fn vertex(&self) -> &VertexId {
        match self {
            ReduceStep::Delete { v, .. } => v,
            ReduceStep::Suppress { v, .. } => v,
        }
    }

    fn anchor(&self) -> &VertexId {
        match self {
            ReduceStep::Delete { anchor, .. } => anchor,
            ReduceStep::Suppress { left, .. } => left,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReduceLog {
    pub steps: Vec<ReduceStep>,
}

/// Repeatedly deletes vertices of degree at most 1 and suppresses vertices
/// of degree 2 (smallest candidate first) until the minimum degree is 3 or
/// a single vertex remains. The log supports lifting decompositions and
/// embeddings of the reduced graph back to the original.
pub fn reduce_min_degree3(g: &Multigraph) -> (Multigraph, ReduceLog) {
    let mut g = g.clone();
    let mut steps = Vec::new();
    while g.vertex_count() > 1 {
        let candidate = g
            .vertices()
            .find(|v| g.degree(v).unwrap() <= 2)
            .cloned();
        let Some(v) = candidate else { break };
        if g.degree(&v).unwrap() <= 1 {
            let anchor = g
                .neighbours(&v)
                .map(|(u, _)| u.clone())
                .next()
                .unwrap_or_else(|| {
                    g.vertices().find(|u| **u != v).unwrap().clone()
                });
            steps.push(ReduceStep::Delete {
                v: v.clone(),
                anchor,
            });
            g = g.without_vertex(&v).unwrap();
        } else {
            let ends: Vec<VertexId> = g.neighbours(&v).map(|(u, _)| u.clone()).collect();
            let (left, right) = match ends.as_slice() {
                [u] => (u.clone(), u.clone()),
                [u, w] => (u.clone(), w.clone()),
                _ => unreachable!(),
            };
            steps.push(ReduceStep::Suppress {
                v: v.clone(),
                left,
                right,
            });
            g = g.suppress(&v).unwrap();
        }
    }
    (g, ReduceLog { steps })
}

impl ReduceLog {
    /// Lifts a decomposition of the reduced graph to the original: each
    /// removed vertex becomes its own node, attached next to the node
    /// holding its anchor. New node ids carry `prefix`.
    pub fn lift_decomposition(
        &self,
        d: &TreeCutDecomposition,
        prefix: &str,
    ) -> Result<TreeCutDecomposition> {
        let mut d = d.clone();
        for (i, step) in self.steps.iter().enumerate().rev() {
            let v = step.vertex().clone();
            let node = NodeId::new(format!("{prefix}red{i}"));
            if d.parts.contains_key(&node) {
                return Err(Error::InvalidInput(format!(
                    "node id {node} already taken"
                )));
            }
            let at = d
                .node_of(step.anchor())
                .ok_or_else(|| {
                    Error::ConstructionDefect(format!(
                        "anchor {} missing during lift",
                        step.anchor()
                    ))
                })?
                .clone();
            d.parts.insert(node.clone(), VertexSet::from([v]));
            d.tree.push(if at <= node {
                (at, node)
            } else {
                (node, at)
            });
            d.tree.sort();
        }
        Ok(d)
    }

    /// Lifts an embedding of the reduced graph to the original by undoing
    /// the steps in reverse: deletions change nothing; a suppression whose
    /// merged edge is used beyond the original budget re-routes one path
    /// copy through the suppressed vertex.
    pub fn lift_embedding(
        &self,
        pattern: &Multigraph,
        original: &Multigraph,
        emb: &ImmersionEmbedding,
    ) -> Result<ImmersionEmbedding> {
        let mut emb = emb.clone();
        // replay the graph states forward, then walk backwards
        let mut states = vec![original.clone()];
        for step in &self.steps {
            let prev = states.last().unwrap();
            let next = match step {
                ReduceStep::Delete { v, .. } => prev.without_vertex(v)?,
                ReduceStep::Suppress { v, .. } => prev.suppress(v)?,
            };
            states.push(next);
        }
        for (i, step) in self.steps.iter().enumerate().rev() {
            let before = &states[i]; // graph in which the step's vertex exists
            if let ReduceStep::Suppress { v, left, right } = step {
                if left != right {
                    // usage of the merged pair in the current embedding
                    let pair = ordered_pair(left.clone(), right.clone());
                    let mut usage = 0usize;
                    for paths in emb.paths.values() {
                        for p in paths {
                            usage += p
                                .edge_pairs()
                                .filter(|q| *q == pair)
                                .count();
                        }
                    }
                    if usage > before.multiplicity(left, right) {
                        // splice the suppressed vertex into the first path
                        // using the pair
                        'outer: for paths in emb.paths.values_mut() {
                            for p in paths.iter_mut() {
                                let vs = p.vertices();
                                let hit = vs.windows(2).position(|w| {
                                    ordered_pair(w[0].clone(), w[1].clone()) == pair
                                });
                                if let Some(at) = hit {
                                    let mut new_vs = vs.to_vec();
                                    new_vs.insert(at + 1, v.clone());
                                    *p = Path::new(new_vs, before)?;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        validate_embedding(pattern, original, &emb)?;
        Ok(emb)
    }
}

// ---------------------------------------------------------------------------
// splitting along small cuts

/// Recursive decomposition along edge cuts of size at most 2. Each split
/// fuses the far side into a marker vertex smaller pieces are reduced to
/// minimum degree 3 before they are split further, mirroring how the
/// decompositions are later glued back together.
#[derive(Clone, Debug)]
pub enum SplitTree {
    Piece {
        graph: Multigraph,
    },
    Split {
        graph: Multigraph,
        cut_size: usize,
        /// marker inside the left graph standing for the fused right side
        marker_for_right: VertexId,
        /// marker inside the right graph standing for the fused left side
        marker_for_left: VertexId,
        left_reduce: ReduceLog,
        left: Box<SplitTree>,
        right_reduce: ReduceLog,
        right: Box<SplitTree>,
    },
}

/// Splits a graph of minimum degree 3 into 3-edge-connected pieces.
pub fn split_3ec(g: &Multigraph) -> Result<SplitTree> {
    if g.vertex_count() > 1 {
        if let Some(v) = g.vertices().find(|v| g.degree(v).unwrap() < 3) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has degree below 3; reduce first"
            )));
        }
    }
    split_rec(g.clone())
}

fn split_rec(g: Multigraph) -> Result<SplitTree> {
    if g.vertex_count() <= 1 {
        return Ok(SplitTree::Piece { graph: g });
    }
    let cut = g.min_edge_cut()?;
    if cut.size >= 3 {
        return Ok(SplitTree::Piece { graph: g });
    }
    let side_a = cut.source_side.clone();
    let side_b: VertexSet = g.vertex_set().difference(&side_a).cloned().collect();
    debug_assert!(side_a.len() >= 2 && side_b.len() >= 2);
    let (left_raw, marker_for_right) = g.contract_set(&side_b)?;
    let (right_raw, marker_for_left) = g.contract_set(&side_a)?;
    // absorb the low-degree markers before splitting further
    let (left_reduced, left_reduce) = reduce_min_degree3(&left_raw);
    let (right_reduced, right_reduce) = reduce_min_degree3(&right_raw);
    Ok(SplitTree::Split {
        graph: g,
        cut_size: cut.size,
        marker_for_right,
        marker_for_left,
        left_reduce,
        left: Box::new(split_rec(left_reduced)?),
        right_reduce,
        right: Box::new(split_rec(right_reduced)?),
    })
}

impl SplitTree {
    pub fn pieces(&self) -> Vec<&Multigraph> {
        match self {
            SplitTree::Piece { graph } => vec![graph],
            SplitTree::Split { left, right, .. } => {
                let mut out = left.pieces();
                out.extend(right.pieces());
                out
            }
        }
    }

    /// Rebuilds a decomposition of the root graph from per-piece
    /// decompositions: lift each side through its reduction, then glue at
    /// the markers. `solver` is called once per piece with a unique node
    /// prefix.
    pub fn solve(
        &self,
        prefix: &str,
        solver: &mut impl FnMut(&Multigraph, &str) -> Result<TreeCutDecomposition>,
    ) -> Result<TreeCutDecomposition> {
        match self {
            SplitTree::Piece { graph } => solver(graph, prefix),
            SplitTree::Split {
                marker_for_right,
                marker_for_left,
                left_reduce,
                left,
                right_reduce,
                right,
                ..
            } => {
                let dl = left.solve(&format!("{prefix}L"), solver)?;
                let dl = left_reduce.lift_decomposition(&dl, &format!("{prefix}L"))?;
                let dr = right.solve(&format!("{prefix}R"), solver)?;
                let dr = right_reduce.lift_decomposition(&dr, &format!("{prefix}R"))?;
                glue(&dl, &dr, marker_for_right, marker_for_left)
            }
        }
    }
}

/// Lifts a strong embedding out of one side of a split: the side graph has
/// the far side fused into `marker`; the original graph `full` carries the
/// far side `fused` instead.
pub fn lift_embedding_through_fuse(
    pattern: &Multigraph,
    full: &Multigraph,
    marker: &VertexId,
    fused: &VertexSet,
    emb: &ImmersionEmbedding,
) -> Result<ImmersionEmbedding> {
    if emb.mode != Mode::Strong {
        return Err(Error::InvalidInput(
            "only strong embeddings are lifted through a fuse".into(),
        ));
    }
    let fused_graph = full.induced(fused)?;
    // a side edge (x, marker) aggregates the full edges from x into the
    // fused set; concrete far endpoints are picked smallest-first against
    // a running usage budget
    let mut crossing_used: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    let mut far_endpoint = |x: &VertexId| -> Result<VertexId> {
        for b in fused.iter() {
            let have = full.multiplicity(x, b);
            let used = crossing_used
                .get(&ordered_pair(x.clone(), b.clone()))
                .copied()
                .unwrap_or(0);
            if have > used {
                *crossing_used
                    .entry(ordered_pair(x.clone(), b.clone()))
                    .or_insert(0) += 1;
                return Ok(b.clone());
            }
        }
        Err(Error::ConstructionDefect(format!(
            "no fused endpoint behind {x}"
        )))
    };
    let inner_route = |from: &VertexId, to: &VertexId| -> Result<Vec<VertexId>> {
        // BFS inside the fused side
        if from == to {
            return Ok(vec![from.clone()]);
        }
        let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([from.clone()]);
        prev.insert(from.clone(), from.clone());
        while let Some(x) = queue.pop_front() {
            for (u, _) in fused_graph.neighbours(&x) {
                if !prev.contains_key(u) {
                    prev.insert(u.clone(), x.clone());
                    queue.push_back(u.clone());
                }
            }
        }
        if !prev.contains_key(to) {
            return Err(Error::ConstructionDefect(
                "fused side is not connected".into(),
            ));
        }
        let mut path = vec![to.clone()];
        while path.last().unwrap() != from {
            let p = prev[path.last().unwrap()].clone();
            path.push(p);
        }
        path.reverse();
        Ok(path)
    };
    let mut branch = emb.branch.clone();
    let mut paths = emb.paths.clone();
    let marker_branch: Option<VertexId> = branch
        .iter()
        .find(|(_, img)| *img == marker)
        .map(|(h, _)| h.clone());
    if let Some(hb) = marker_branch {
        // relocate the branch vertex into the fused side and extend the
        // ending paths to the new location
        let mut ends: Vec<(VertexId, VertexId, usize)> = Vec::new(); // (pair key u, v, index)
        for ((u, v), list) in &paths {
            for (i, p) in list.iter().enumerate() {
                if p.first() == marker || p.last() == marker {
                    ends.push((u.clone(), v.clone(), i));
                }
            }
        }
        debug_assert!(ends.len() <= 2);
        let mut new_image: Option<VertexId> = None;
        for (u, v, i) in ends {
            let list = paths.get_mut(&(u, v)).unwrap();
            let mut vs = list[i].vertices().to_vec();
            if vs.first().map(|x| x == marker).unwrap_or(false) {
                vs.reverse();
            }
            vs.pop(); // drop the marker
            let x = vs.last().unwrap().clone();
            let beta = far_endpoint(&x)?;
            vs.push(beta.clone());
            match &new_image {
                None => new_image = Some(beta),
                Some(target) => {
                    if beta != *target {
                        let route = inner_route(&beta, target)?;
                        vs.extend(route.into_iter().skip(1));
                    }
                }
            }
            list[i] = Path::new(vs, full)?;
        }
        let image = match new_image {
            Some(img) => img,
            None => fused.iter().next().unwrap().clone(),
        };
        branch.insert(hb, image);
    } else {
        // the marker may be interior to at most one path (two edge units)
        'outer: for list in paths.values_mut() {
            for p in list.iter_mut() {
                if let Some(at) = p.vertices().iter().position(|x| x == marker) {
                    let vs = p.vertices().to_vec();
                    let (x, y) = (vs[at - 1].clone(), vs[at + 1].clone());
                    let beta1 = far_endpoint(&x)?;
                    let beta2 = far_endpoint(&y)?;
                    let mut new_vs = vs[..at].to_vec();
                    new_vs.push(beta1.clone());
                    if beta2 != beta1 {
                        let route = inner_route(&beta1, &beta2)?;
                        new_vs.extend(route.into_iter().skip(1));
                    }
                    new_vs.extend(vs[at + 1..].iter().cloned());
                    *p = Path::new(new_vs, full)?;
                    break 'outer;
                }
            }
        }
    }
    let lifted = ImmersionEmbedding {
        mode: emb.mode,
        branch,
        paths,
    };
    validate_embedding(pattern, full, &lifted)?;
    Ok(lifted)
}

// ---------------------------------------------------------------------------
// auxiliary graph

/// Simple graph joining pairs with more than the parallel threshold of
/// edges, together with its components.
#[derive(Clone, Debug)]
pub struct AuxiliaryGraph {
    pub graph: Multigraph,
    pub components: Vec<VertexSet>,
}

#[derive(Clone, Debug)]
pub enum AuxOutcome {
    Aux(AuxiliaryGraph),
    /// A vertex with too many fat neighbours forces the wall directly.
    WallFound(Box<ImmersionEmbedding>),
}

/// Builds the auxiliary graph and checks its maximum degree against the
/// hub threshold; a violation is converted into a verified wall immersion.
pub fn build_auxiliary(g: &Multigraph, params: &Parameters) -> Result<AuxOutcome> {
    let p = params.parallel_threshold();
    let aux = Multigraph::build(
        g.vertices().cloned(),
        g.edges()
            .filter(|(_, _, m)| (*m as u128) > p)
            .map(|(u, v, _)| (u.clone(), v.clone(), 1)),
    )?;
    let hub_threshold = params.hub_threshold() as usize;
    if let Some(hub) = g
        .vertices()
        .find(|v| aux.neighbour_count(v) >= hub_threshold)
    {
        let nbrs: Vec<VertexId> = aux
            .neighbours(hub)
            .map(|(u, _)| u.clone())
            .take(hub_threshold)
            .collect();
        let emb = wall_via_hub(g, params, hub, &nbrs)?;
        return Ok(AuxOutcome::WallFound(Box::new(emb)));
    }
    let components = aux.components();
    Ok(AuxOutcome::Aux(AuxiliaryGraph {
        graph: aux,
        components,
    }))
}

/// A hub with `2 ell^2` fat neighbours hosts the `(3, 2 ell^2)` spider on
/// direct parallel edges, and the spider carries the wall.
fn wall_via_hub(
    g: &Multigraph,
    params: &Parameters,
    hub: &VertexId,
    nbrs: &[VertexId],
) -> Result<ImmersionEmbedding> {
    let n = params.hub_threshold() as usize;
    debug_assert_eq!(nbrs.len(), n);
    let s = spider(3, n)?;
    let mut branch = BTreeMap::from([(s.hub.clone(), hub.clone())]);
    let mut paths = BTreeMap::new();
    for (i, leg) in s.legs.iter().enumerate() {
        branch.insert(leg.clone(), nbrs[i].clone());
        let route = Path::new(vec![hub.clone(), nbrs[i].clone()], g)?;
        paths.insert(
            ordered_pair(s.hub.clone(), leg.clone()),
            vec![route.clone(), route.clone(), route],
        );
    }
    let outer = ImmersionEmbedding {
        mode: Mode::Strong,
        branch,
        paths,
    };
    validate_embedding(&s.graph, g, &outer)?;
    let wall = build_wall(params.ell as u32)?;
    let (sp, inner) = embed_in_spider(&wall.graph, 3, n)?;
    debug_assert_eq!(sp.graph, s.graph);
    compose_embeddings(&wall.graph, &s.graph, &inner, g, &outer)
}

// ---------------------------------------------------------------------------
// exact tree-width

/// A tree decomposition: bags indexed by node ids, on a tree.
#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub bags: BTreeMap<NodeId, VertexSet>,
    pub tree: Vec<(NodeId, NodeId)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags
            .values()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    fn neighbours(&self, t: &NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .tree
            .iter()
            .filter_map(|(a, b)| {
                if a == t {
                    Some(b.clone())
                } else if b == t {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out
    }
}

/// Checks vertex coverage, edge coverage and coherence (the bags holding
/// each vertex form a subtree).
pub fn validate_tree_decomposition(g: &Multigraph, td: &TreeDecomposition) -> Result<()> {
    if td.bags.is_empty() {
        return if g.vertex_count() == 0 {
            Ok(())
        } else {
            Err(Error::InvalidDecomposition("no bags".into()))
        };
    }
    if td.tree.len() + 1 != td.bags.len() {
        return Err(Error::InvalidDecomposition(
            "bag tree is not a tree".into(),
        ));
    }
    for (a, b) in &td.tree {
        if !td.bags.contains_key(a) || !td.bags.contains_key(b) {
            return Err(Error::InvalidDecomposition(format!(
                "edge {a}-{b} references a missing bag"
            )));
        }
    }
    // connectivity of the bag tree
    let start = td.bags.keys().next().unwrap().clone();
    let mut seen = std::collections::BTreeSet::from([start.clone()]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for u in td.neighbours(&t) {
            if seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
    }
    if seen.len() != td.bags.len() {
        return Err(Error::InvalidDecomposition(
            "bag tree is disconnected".into(),
        ));
    }
    for v in g.vertices() {
        let holders: Vec<&NodeId> = td
            .bags
            .iter()
            .filter(|(_, bag)| bag.contains(v))
            .map(|(t, _)| t)
            .collect();
        if holders.is_empty() {
            return Err(Error::InvalidDecomposition(format!(
                "vertex {v} is in no bag"
            )));
        }
        // coherence: holders form a connected sub-tree
        let holder_set: std::collections::BTreeSet<&NodeId> = holders.iter().copied().collect();
        let mut seen = std::collections::BTreeSet::from([holders[0].clone()]);
        let mut queue = std::collections::VecDeque::from([holders[0].clone()]);
        while let Some(t) = queue.pop_front() {
            for u in td.neighbours(&t) {
                if holder_set.contains(&u) && seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
        if seen.len() != holders.len() {
            return Err(Error::InvalidDecomposition(format!(
                "bags holding {v} are not connected"
            )));
        }
    }
    for (u, v, _) in g.edges() {
        if !td
            .bags
            .values()
            .any(|bag| bag.contains(u) && bag.contains(v))
        {
            return Err(Error::InvalidDecomposition(format!(
                "edge {u}-{v} is in no bag"
            )));
        }
    }
    Ok(())
}

pub const DEFAULT_TREEWIDTH_CAP: usize = 30;

/// Exact tree-width by memoized dynamic programming over elimination
/// prefixes, with a greedy fill-in upper bound for pruning. Multiplicities
/// are flattened first since they cannot affect the width. Returns the
/// width together with a validated witness decomposition.
pub fn exact_treewidth(g: &Multigraph, cap: usize) -> Result<(usize, TreeDecomposition)> {
    let cap = cap.min(62);
    if g.vertex_count() > cap {
        return Err(Error::SizeCap {
            what: "tree-width search",
            size: g.vertex_count(),
            cap,
        });
    }
    let simple = g.flattened();
    let ids: Vec<VertexId> = simple.vertices().cloned().collect();
    let n = ids.len();
    if n == 0 {
        return Ok((
            0,
            TreeDecomposition {
                bags: BTreeMap::from([(NodeId::new("b00"), VertexSet::new())]),
                tree: Vec::new(),
            },
        ));
    }
    let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut adj = vec![0u64; n];
    for (u, v, _) in simple.edges() {
        adj[index[u]] |= 1 << index[v];
        adj[index[v]] |= 1 << index[u];
    }
    let solver = TreewidthSolver {
        n,
        adj,
        memo: std::cell::RefCell::new(std::collections::HashMap::new()),
    };
    let ub = solver.greedy_fill_in_width();
    let width = solver.best(0, ub);
    // reconstruct a witness elimination order greedily
    let mut order = Vec::with_capacity(n);
    let mut s: u64 = 0;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    while s != full {
        let mut picked = None;
        for v in 0..n {
            if s & (1 << v) != 0 {
                continue;
            }
            let q = solver.q_size(s, v);
            let rest = solver.best(s | (1 << v), width);
            if q.max(rest) <= width {
                picked = Some(v);
                break;
            }
        }
        let v = picked.expect("dp table promised an elimination order");
        order.push(v);
        s |= 1 << v;
    }
    // clique-tree construction from the elimination order
    let mut bags: BTreeMap<NodeId, VertexSet> = BTreeMap::new();
    let mut tree = Vec::new();
    let node_name = |i: usize| NodeId::new(format!("b{i:02}"));
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut s: u64 = 0;
    for (i, &v) in order.iter().enumerate() {
        let q = solver.q_set(s, v);
        let mut bag: VertexSet = VertexSet::from([ids[v].clone()]);
        let mut earliest: Option<usize> = None;
        for u in 0..n {
            if q & (1 << u) != 0 {
                bag.insert(ids[u].clone());
                let pos = position[&u];
                earliest = Some(earliest.map_or(pos, |e: usize| e.min(pos)));
            }
        }
        bags.insert(node_name(i), bag);
        if let Some(e) = earliest {
            tree.push((node_name(i), node_name(e)));
        } else if i + 1 < n {
            // isolated remainder: chain to the next bag to keep a tree
            tree.push((node_name(i), node_name(i + 1)));
        }
        s |= 1 << v;
    }
    let td = TreeDecomposition { bags, tree };
    validate_tree_decomposition(&simple, &td)?;
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}

struct TreewidthSolver {
    n: usize,
    adj: Vec<u64>,
    memo: std::cell::RefCell<std::collections::HashMap<u64, usize>>,
}

impl TreewidthSolver {
    /// Vertices outside `s + v` reachable from `v` through `s`.
    fn q_set(&self, s: u64, v: usize) -> u64 {
        let mut internal = 1u64 << v;
        let mut frontier = self.adj[v];
        let mut outside = 0u64;
        loop {
            let inside_new = frontier & s & !internal;
            outside |= frontier & !s & !(1 << v);
            if inside_new == 0 {
                return outside;
            }
            internal |= inside_new;
            let mut grow = 0u64;
            let mut bits = inside_new;
            while bits != 0 {
                let u = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grow |= self.adj[u];
            }
            frontier = grow;
        }
    }

    fn q_size(&self, s: u64, v: usize) -> usize {
        self.q_set(s, v).count_ones() as usize
    }

    /// Exact min over elimination completions of the max future bag size.
    fn best(&self, s: u64, ub: usize) -> usize {
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        if s == full {
            return 0;
        }
        if let Some(&cached) = self.memo.borrow().get(&s) {
            return cached;
        }
        // candidates ordered by their immediate cost
        let mut cands: Vec<(usize, usize)> = (0..self.n)
            .filter(|v| s & (1 << v) == 0)
            .map(|v| (self.q_size(s, v), v))
            .collect();
        cands.sort_unstable();
        let mut best = usize::MAX;
        for (q, v) in cands {
            if q >= best || q > ub {
                // candidates are sorted, so nothing better follows
                break;
            }
            let rest = self.best(s | (1 << v), best.min(ub).saturating_sub(0));
            best = best.min(q.max(rest));
        }
        self.memo.borrow_mut().insert(s, best);
        best
    }

    fn greedy_fill_in_width(&self) -> usize {
        let mut s = 0u64;
        let mut width = 0usize;
        for _ in 0..self.n {
            // pick the vertex with the smallest current cost
            let (q, v) = (0..self.n)
                .filter(|v| s & (1 << v) == 0)
                .map(|v| (self.q_size(s, v), v))
                .min()
                .unwrap();
            width = width.max(q);
            s |= 1 << v;
        }
        width
    }
}

// ---------------------------------------------------------------------------
// tree decomposition to tree-cut decomposition

/// Conversion result with the asserted bounds and what was achieved.
#[derive(Clone, Debug)]
pub struct TcdConversion {
    pub decomposition: TreeCutDecomposition,
    pub input_width: usize,
    pub max_degree: usize,
    pub adhesion_limit: usize,
    pub torso_order_limit: usize,
    pub achieved_adhesion: usize,
    pub achieved_max_torso_order: usize,
}

/// Converts a tree decomposition into a tree-cut decomposition by sending
/// each vertex to its root-most bag, after collapsing bags contained in a
/// neighbour. The adhesion and torso-order bounds `(2w+2)d` and
/// `(d+1)(w+1)` are checked at runtime; a violation is reported as a
/// construction defect, never passed silently.
pub fn td_to_tcd(g: &Multigraph, td: &TreeDecomposition) -> Result<TcdConversion> {
    validate_tree_decomposition(&g.flattened(), td)?;
    let input_width = td.width();
    let max_degree = g.max_degree();
    let mut td = td.clone();
    // collapse bags contained in an adjacent bag
    loop {
        let mut merged = false;
        for (a, b) in td.tree.clone() {
            let (ba, bb) = (&td.bags[&a], &td.bags[&b]);
            let (drop, keep) = if ba.is_subset(bb) {
                (a, b)
            } else if bb.is_subset(ba) {
                (b, a)
            } else {
                continue;
            };
            td.bags.remove(&drop);
            let mut new_tree = Vec::new();
            for (x, y) in &td.tree {
                let x = if *x == drop { keep.clone() } else { x.clone() };
                let y = if *y == drop { keep.clone() } else { y.clone() };
                if x != y {
                    new_tree.push(if x <= y { (x, y) } else { (y, x) });
                }
            }
            new_tree.sort();
            new_tree.dedup();
            td.tree = new_tree;
            merged = true;
            break;
        }
        if !merged {
            break;
        }
    }
    // root-most assignment
    let root = td.bags.keys().next().unwrap().clone();
    let mut depth: BTreeMap<NodeId, usize> = BTreeMap::from([(root.clone(), 0)]);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(t) = queue.pop_front() {
        let d = depth[&t];
        for u in td.neighbours(&t) {
            if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(u.clone()) {
                e.insert(d + 1);
                queue.push_back(u);
            }
        }
    }
    let mut parts: BTreeMap<NodeId, VertexSet> =
        td.bags.keys().map(|t| (t.clone(), VertexSet::new())).collect();
    for v in g.vertices() {
        let home = td
            .bags
            .iter()
            .filter(|(_, bag)| bag.contains(v))
            .min_by_key(|(t, _)| (depth[*t], (*t).clone()))
            .map(|(t, _)| t.clone())
            .unwrap();
        parts.get_mut(&home).unwrap().insert(v.clone());
    }
    let decomposition = TreeCutDecomposition::new(td.tree.iter().cloned(), parts)?;
    debug_assert!(validate(g, &decomposition).is_empty());
    let adhesion_limit = (2 * input_width + 2) * max_degree;
    let torso_order_limit = (max_degree + 1) * (input_width + 1);
    let report = adhesion(g, &decomposition)?;
    if report.max > adhesion_limit {
        return Err(Error::ConstructionDefect(format!(
            "adhesion {} exceeds the limit {adhesion_limit}",
            report.max
        )));
    }
    let mut achieved_max_torso_order = 0;
    for t in decomposition.parts.keys() {
        let order = decomposition.parts[&t.clone()].len() + decomposition.tree_neighbours(t).len();
        if order > torso_order_limit {
            return Err(Error::ConstructionDefect(format!(
                "torso at {t} has order {order}, limit {torso_order_limit}"
            )));
        }
        achieved_max_torso_order = achieved_max_torso_order.max(order);
    }
    Ok(TcdConversion {
        decomposition,
        input_width,
        max_degree,
        adhesion_limit,
        torso_order_limit,
        achieved_adhesion: report.max,
        achieved_max_torso_order,
    })
}

// ---------------------------------------------------------------------------
// star-or-comb finder

/// A subdivided star: internally disjoint rays from one centre to distinct
/// target vertices.
#[derive(Clone, Debug)]
pub struct StarWitness {
    pub centre: VertexId,
    pub rays: Vec<Path>,
}

/// A comb: a spine path plus pairwise disjoint legs, each with exactly its
/// first vertex on the spine; a trivial leg is a single spine vertex. The
/// last vertices of the legs are the teeth.
#[derive(Clone, Debug)]
pub struct CombWitness {
    pub spine: Path,
    pub legs: Vec<Path>,
}

#[derive(Clone, Debug)]
pub enum StarCombOutcome {
    Star(StarWitness),
    Comb(CombWitness),
    Neither,
}

pub const DEFAULT_STAR_COMB_CAP: usize = 16;

/// Exact finder: a subdivided star with `s` targets in `targets`, else a
/// comb with `t` teeth in `targets`, else neither. Stars are searched
/// first (every centre via vertex-capacitated flow), then combs (every
/// simple spine path via a leg-packing flow).
pub fn find_star_or_comb(
    g: &Multigraph,
    targets: &VertexSet,
    s: usize,
    t: usize,
    cap: usize,
) -> Result<StarCombOutcome> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.vertex_count() > cap {
        return Err(Error::SizeCap {
            what: "star-comb search",
            size: g.vertex_count(),
            cap,
        });
    }
    if s == 0 || t == 0 {
        return Err(Error::InvalidInput("need s, t >= 1".into()));
    }
    for v in targets {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    for centre in g.vertices() {
        let mut sinks = targets.clone();
        sinks.remove(centre);
        let rays = crate::flow::star_paths(g, centre, &sinks, s)?;
        if rays.len() == s {
            return Ok(StarCombOutcome::Star(StarWitness {
                centre: centre.clone(),
                rays,
            }));
        }
    }
    // spines: all simple paths, deduplicated by orientation
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let mut best: Option<CombWitness> = None;
    for start in &ids {
        let mut stack = vec![vec![start.clone()]];
        while let Some(spine) = stack.pop() {
            let last = spine.last().unwrap().clone();
            if spine.first().unwrap() <= &last {
                if let Some(comb) = comb_on_spine(g, targets, &spine, t)? {
                    best = Some(comb);
                    break;
                }
            }
            for (u, _) in g.neighbours(&last) {
                if !spine.contains(u) {
                    let mut next = spine.clone();
                    next.push(u.clone());
                    stack.push(next);
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    Ok(match best {
        Some(comb) => StarCombOutcome::Comb(comb),
        None => StarCombOutcome::Neither,
    })
}

/// Maximum leg packing on a fixed spine via flow; returns a comb when at
/// least `t` teeth are achievable.
fn comb_on_spine(
    g: &Multigraph,
    targets: &VertexSet,
    spine: &[VertexId],
    t: usize,
) -> Result<Option<CombWitness>> {
    use crate::flow::Network;
    let on_spine: VertexSet = spine.iter().cloned().collect();
    let off: Vec<VertexId> = g
        .vertices()
        .filter(|v| !on_spine.contains(*v))
        .cloned()
        .collect();
    let off_index: BTreeMap<&VertexId, usize> =
        off.iter().enumerate().map(|(i, v)| (v, i)).collect();
    // nodes: spine vertices, then off-spine in/out pairs, then source/sink
    let spine_node = |i: usize| i;
    let off_in = |i: usize| spine.len() + 2 * i;
    let off_out = |i: usize| spine.len() + 2 * i + 1;
    let s_node = spine.len() + 2 * off.len();
    let t_node = s_node + 1;
    let mut net = Network::new(t_node + 1);
    for (i, p) in spine.iter().enumerate() {
        net.add_arc(s_node, spine_node(i), 1);
        if targets.contains(p) {
            net.add_arc(spine_node(i), t_node, 1);
        }
        for (u, _) in g.neighbours(p) {
            if let Some(&j) = off_index.get(u) {
                net.add_arc(spine_node(i), off_in(j), 1);
            }
        }
    }
    for (j, x) in off.iter().enumerate() {
        net.add_arc(off_in(j), off_out(j), 1);
        if targets.contains(x) {
            net.add_arc(off_out(j), t_node, 1);
        }
        for (u, _) in g.neighbours(x) {
            if let Some(&jj) = off_index.get(u) {
                net.add_arc(off_out(j), off_in(jj), 1);
            }
        }
    }
    let flow = net.max_flow(s_node, t_node, t as u64);
    if (flow as usize) < t {
        return Ok(None);
    }
    let legs: Vec<Path> = net
        .unit_walks(s_node, t_node, flow)
        .into_iter()
        .map(|walk| {
            let mut vs: Vec<VertexId> = Vec::new();
            for &node in &walk[1..walk.len() - 1] {
                let v = if node < spine.len() {
                    spine[node].clone()
                } else {
                    off[(node - spine.len()) / 2].clone()
                };
                if vs.last() != Some(&v) {
                    vs.push(v);
                }
            }
            Path::new(vs, g).expect("leg decomposition produced an invalid path")
        })
        .collect();
    let witness = CombWitness {
        spine: Path::new(spine.to_vec(), g)?,
        legs,
    };
    validate_comb(g, targets, &witness)?;
    Ok(Some(witness))
}

/// Structural checker for combs: legs pairwise disjoint, first vertex on
/// the spine, everything else off it, teeth in the target set.
pub fn validate_comb(g: &Multigraph, targets: &VertexSet, comb: &CombWitness) -> Result<()> {
    Path::new(comb.spine.vertices().to_vec(), g)?;
    let on_spine: VertexSet = comb.spine.vertices().iter().cloned().collect();
    let mut used = VertexSet::new();
    for leg in &comb.legs {
        Path::new(leg.vertices().to_vec(), g)?;
        if !on_spine.contains(leg.first()) {
            return Err(Error::InvalidInput(
                "leg does not start on the spine".into(),
            ));
        }
        for v in &leg.vertices()[1..] {
            if on_spine.contains(v) {
                return Err(Error::InvalidInput(
                    "leg returns to the spine".into(),
                ));
            }
        }
        for v in leg.vertices() {
            if !used.insert(v.clone()) {
                return Err(Error::InvalidInput("legs overlap".into()));
            }
        }
        if !targets.contains(leg.last()) {
            return Err(Error::InvalidInput("tooth outside the target set".into()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// vertex deletion to a linear forest

/// Deletion set plus the path components of what remains.
#[derive(Clone, Debug)]
pub struct LinearForestCover {
    pub deleted: VertexSet,
    pub paths: Vec<Path>,
}

#[derive(Clone, Debug)]
pub enum CoverOutcome {
    Cover(LinearForestCover),
    /// A connected set with at least `k` distinct outside neighbours: the
    /// star-minor criterion.
    MinorWitness {
        centre_set: VertexSet,
        neighbours: VertexSet,
    },
}

pub const DEFAULT_COVER_CAP: usize = 20;

/// Either a `k`-star minor witness or a minimum vertex set whose deletion
/// leaves a disjoint union of paths. When no minor witness exists, the
/// cover is asserted to have at most `4k` vertices.
pub fn linear_forest_cover(g: &Multigraph, k: usize, cap: usize) -> Result<CoverOutcome> {
    if !g.is_simple() {
        return Err(Error::InvalidInput("host must be simple".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.vertex_count() > cap.min(62) {
        return Err(Error::SizeCap {
            what: "linear-forest search",
            size: g.vertex_count(),
            cap,
        });
    }
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let n = ids.len();
    let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut adj = vec![0u64; n];
    for (u, v, _) in g.edges() {
        adj[index[u]] |= 1 << index[v];
        adj[index[v]] |= 1 << index[u];
    }
    let connected_mask = |mask: u64| -> bool {
        if mask == 0 {
            return false;
        }
        let start = mask.trailing_zeros() as usize;
        let mut seen = 1u64 << start;
        loop {
            let mut grow = seen;
            let mut bits = seen;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grow |= adj[v] & mask;
            }
            if grow == seen {
                return seen == mask;
            }
            seen = grow;
        }
    };
    for mask in 1u64..(1 << n) {
        if !connected_mask(mask) {
            continue;
        }
        let mut nbrs = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            nbrs |= adj[v] & !mask;
        }
        if nbrs.count_ones() as usize >= k {
            let centre_set: VertexSet = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| ids[i].clone())
                .collect();
            let neighbours: VertexSet = (0..n)
                .filter(|i| nbrs & (1 << i) != 0)
                .map(|i| ids[i].clone())
                .collect();
            return Ok(CoverOutcome::MinorWitness {
                centre_set,
                neighbours,
            });
        }
    }
    // exact minimum deletion: sizes ascending, lexicographic within a size
    let is_linear_forest = |kept: u64| -> bool {
        let mut bits = kept;
        let mut edges = 0usize;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let deg = (adj[v] & kept).count_ones() as usize;
            if deg > 2 {
                return false;
            }
            edges += deg;
        }
        edges /= 2;
        // with max degree 2, acyclic means pathlike; count components
        let mut comp = 0usize;
        let mut seen = 0u64;
        let mut rest = kept;
        while rest != 0 {
            let start = rest.trailing_zeros() as usize;
            let mut grow = 1u64 << start;
            loop {
                let mut next = grow;
                let mut b = grow;
                while b != 0 {
                    let v = b.trailing_zeros() as usize;
                    b &= b - 1;
                    next |= adj[v] & kept;
                }
                if next == grow {
                    break;
                }
                grow = next;
            }
            seen |= grow;
            rest &= !grow;
            comp += 1;
        }
        let vertices = kept.count_ones() as usize;
        let _ = seen;
        edges == vertices - comp
    };
    for size in 0..=n {
        let mut found: Option<u64> = None;
        let mut indices: Vec<usize> = (0..size).collect();
        'combos: loop {
            if size <= n {
                let mask: u64 = indices.iter().fold(0, |m, &i| m | (1 << i));
                if is_linear_forest(!mask & ((1u64 << n) - 1)) {
                    found = Some(mask);
                    break 'combos;
                }
            }
            if size == 0 {
                break;
            }
            let mut i = size;
            loop {
                if i == 0 {
                    break 'combos;
                }
                i -= 1;
                if indices[i] != i + n - size {
                    indices[i] += 1;
                    for j in i + 1..size {
                        indices[j] = indices[j - 1] + 1;
                    }
                    break;
                }
            }
        }
        if let Some(mask) = found {
            let deleted: VertexSet = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| ids[i].clone())
                .collect();
            if deleted.len() > 4 * k {
                return Err(Error::ConstructionDefect(format!(
                    "minimum cover has {} vertices, above the 4k bound {}",
                    deleted.len(),
                    4 * k
                )));
            }
            let rest = g.without_vertices(&deleted)?;
            let paths = path_components(&rest)?;
            return Ok(CoverOutcome::Cover(LinearForestCover { deleted, paths }));
        }
    }
    unreachable!("deleting every vertex always leaves a linear forest")
}

/// Orders each component of a linear forest as a path, endpoints first by
/// vertex id.
fn path_components(g: &Multigraph) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    for comp in g.components() {
        let sub = g.induced(&comp)?;
        let start = sub
            .vertices()
            .filter(|v| sub.degree(v).unwrap() <= 1)
            .min()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("component is not a path".into()))?;
        let mut order = vec![start.clone()];
        let mut prev: Option<VertexId> = None;
        let mut cur = start;
        loop {
            let next = sub
                .neighbours(&cur)
                .map(|(u, _)| u.clone())
                .find(|u| Some(u) != prev.as_ref());
            match next {
                Some(u) => {
                    order.push(u.clone());
                    prev = Some(cur);
                    cur = u;
                }
                None => break,
            }
        }
        if order.len() != comp.len() {
            return Err(Error::InvalidInput("component is not a path".into()));
        }
        out.push(Path::new(order, g)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// wall harvests

/// A star minor inside one auxiliary component yields the spider on fat
/// parallel edges: hub paths run through the connected centre set, three
/// copies each, which the per-pair budget (more than `6 ell^2` parallel
/// edges per auxiliary pair against `6 ell^2` total edge units) covers.
fn wall_via_minor(
    g: &Multigraph,
    params: &Parameters,
    aux: &Multigraph,
    centre_set: &VertexSet,
    neighbours: &VertexSet,
) -> Result<ImmersionEmbedding> {
    let n = params.hub_threshold() as usize;
    let legs: Vec<VertexId> = neighbours.iter().take(n).cloned().collect();
    debug_assert_eq!(legs.len(), n);
    let hub_rep = centre_set.iter().next().unwrap().clone();
    let aux_centre = aux.induced(centre_set)?;
    let route_to = |target: &VertexId| -> Result<Vec<VertexId>> {
        // BFS through the centre set, then one fat edge to the leg
        let attach = centre_set
            .iter()
            .find(|c| aux.multiplicity(c, target) > 0)
            .ok_or_else(|| {
                Error::ConstructionDefect(format!("leg {target} not attached to the centre set"))
            })?;
        let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        prev.insert(hub_rep.clone(), hub_rep.clone());
        let mut queue = std::collections::VecDeque::from([hub_rep.clone()]);
        while let Some(x) = queue.pop_front() {
            for (u, _) in aux_centre.neighbours(&x) {
                if !prev.contains_key(u) {
                    prev.insert(u.clone(), x.clone());
                    queue.push_back(u.clone());
                }
            }
        }
        let mut path = vec![attach.clone()];
        while path.last().unwrap() != &hub_rep {
            let p = prev
                .get(path.last().unwrap())
                .ok_or_else(|| Error::ConstructionDefect("centre set is not connected".into()))?
                .clone();
            path.push(p);
        }
        path.reverse();
        path.push(target.clone());
        Ok(path)
    };
    let s = spider(3, n)?;
    let mut branch = BTreeMap::from([(s.hub.clone(), hub_rep.clone())]);
    let mut paths = BTreeMap::new();
    for (i, leg) in s.legs.iter().enumerate() {
        branch.insert(leg.clone(), legs[i].clone());
        let route = route_to(&legs[i])?;
        let copies: Vec<Path> = (0..3)
            .map(|_| Path::new(route.clone(), g))
            .collect::<Result<_>>()?;
        paths.insert(ordered_pair(s.hub.clone(), leg.clone()), copies);
    }
    let outer = ImmersionEmbedding {
        mode: Mode::Strong,
        branch,
        paths,
    };
    validate_embedding(&s.graph, g, &outer)?;
    let wall = build_wall(params.ell as u32)?;
    let (_, inner) = embed_in_spider(&wall.graph, 3, n)?;
    compose_embeddings(&wall.graph, &s.graph, &inner, g, &outer)
}

/// Assembles an apexed-path immersion in the host from explicit routes: an
/// apex route per target plus a connector per consecutive target pair, and
/// carries the wall through it. `targets.len()` must be `6 ell^2`.
fn wall_via_apex_path(
    g: &Multigraph,
    params: &Parameters,
    apex: &VertexId,
    targets: &[VertexId],
    apex_routes: &[Vec<VertexId>],
    connectors: &[Vec<VertexId>],
) -> Result<ImmersionEmbedding> {
    let m = targets.len();
    debug_assert_eq!(m as u128, 6 * (params.ell as u128) * (params.ell as u128));
    let host_pattern = apex_path(m - 1)?;
    let mut branch = BTreeMap::from([(host_pattern.apex.clone(), apex.clone())]);
    let mut paths = BTreeMap::new();
    for (i, t) in targets.iter().enumerate() {
        branch.insert(host_pattern.path[i].clone(), t.clone());
        paths.insert(
            ordered_pair(host_pattern.apex.clone(), host_pattern.path[i].clone()),
            vec![Path::new(apex_routes[i].clone(), g)?],
        );
    }
    for (i, conn) in connectors.iter().enumerate() {
        paths.insert(
            ordered_pair(
                host_pattern.path[i].clone(),
                host_pattern.path[i + 1].clone(),
            ),
            vec![Path::new(conn.clone(), g)?],
        );
    }
    let outer = ImmersionEmbedding {
        mode: Mode::Strong,
        branch,
        paths,
    };
    validate_embedding(&host_pattern.graph, g, &outer)?;
    // wall -> spider -> subdivision inside the apexed path -> host
    let ell = params.ell as u32;
    let wall = build_wall(ell)?;
    let k = params.hub_threshold() as usize;
    let (sp, wall_in_spider) = embed_in_spider(&wall.graph, 3, k)?;
    let subdivision = apex_to_spider_subdivision(k)?;
    let (sp2, spider_in_apexpath) = subdivision.to_embedding()?;
    debug_assert_eq!(sp.graph, sp2.graph);
    debug_assert_eq!(subdivision.host.graph, host_pattern.graph);
    let wall_in_apexpath = compose_embeddings(
        &wall.graph,
        &sp.graph,
        &wall_in_spider,
        &subdivision.host.graph,
        &spider_in_apexpath,
    )?;
    compose_embeddings(
        &wall.graph,
        &host_pattern.graph,
        &wall_in_apexpath,
        g,
        &outer,
    )
}

/// Looks for a harvestable apex among the cover: a deleted vertex with at
/// least `6 ell^2` host neighbours on one cover path.
fn apex_from_deleted_vertex(
    g: &Multigraph,
    params: &Parameters,
    deleted: &VertexSet,
    cover_paths: &[Path],
) -> Result<Option<ImmersionEmbedding>> {
    let need = params.hub_threshold() as usize * 3; // 6 ell^2
    for x in deleted {
        for path in cover_paths {
            let targets: Vec<VertexId> = path
                .vertices()
                .iter()
                .filter(|v| g.multiplicity(x, v) > 0)
                .take(need)
                .cloned()
                .collect();
            if targets.len() < need {
                continue;
            }
            let apex_routes: Vec<Vec<VertexId>> = targets
                .iter()
                .map(|t| vec![x.clone(), t.clone()])
                .collect();
            let connectors = subpath_connectors(path, &targets);
            return wall_via_apex_path(g, params, x, &targets, &apex_routes, &connectors)
                .map(Some);
        }
    }
    Ok(None)
}

/// Consecutive-target connectors along a backbone path.
fn subpath_connectors(backbone: &Path, targets: &[VertexId]) -> Vec<Vec<VertexId>> {
    let position: BTreeMap<&VertexId, usize> = backbone
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    targets
        .windows(2)
        .map(|w| {
            let (a, b) = (position[&w[0]], position[&w[1]]);
            let (lo, hi) = (a.min(b), a.max(b));
            let mut seg: Vec<VertexId> = backbone.vertices()[lo..=hi].to_vec();
            if a > b {
                seg.reverse();
            }
            seg
        })
        .collect()
}

/// Looks for a pair of path segments joined by too many edges: the rich
/// side hosts the apexed path. `side_a` and `side_b` must be vertex
/// sequences of backbone paths.
fn apex_from_segment_pair(
    g: &Multigraph,
    params: &Parameters,
    side_a: &[VertexId],
    side_b: &[VertexId],
) -> Result<Option<ImmersionEmbedding>> {
    let need = params.hub_threshold() as usize * 3; // 6 ell^2
    for (source, other) in [(side_a, side_b), (side_b, side_a)] {
        // targets: vertices of `other` adjacent to `source`, in order
        let source_set: VertexSet = source.iter().cloned().collect();
        let targets: Vec<VertexId> = other
            .iter()
            .filter(|t| source_set.iter().any(|u| g.multiplicity(u, t) > 0))
            .take(need)
            .cloned()
            .collect();
        if targets.len() < need {
            continue;
        }
        let apex = source[0].clone();
        let position: BTreeMap<&VertexId, usize> =
            source.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let apex_routes: Vec<Vec<VertexId>> = targets
            .iter()
            .map(|t| {
                // walk along the source backbone to the crossing point
                let u = source
                    .iter()
                    .find(|u| g.multiplicity(u, t) > 0)
                    .unwrap();
                let mut route: Vec<VertexId> = source[..=position[u]].to_vec();
                route.push(t.clone());
                route
            })
            .collect();
        // connectors run along the `other` backbone
        let other_path = other.to_vec();
        let fake = Path::new(other_path, g);
        let backbone = match fake {
            Ok(p) => p,
            Err(_) => continue,
        };
        let connectors = subpath_connectors(&backbone, &targets);
        return wall_via_apex_path(g, params, &apex, &targets, &apex_routes, &connectors)
            .map(Some);
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// the pipeline

#[derive(Clone, Debug)]
pub struct SynthesisCaps {
    pub treewidth: usize,
    pub thinness: usize,
    pub cover: usize,
}

impl Default for SynthesisCaps {
    fn default() -> Self {
        SynthesisCaps {
            treewidth: DEFAULT_TREEWIDTH_CAP,
            thinness: crate::thinness::DEFAULT_CAP,
            cover: DEFAULT_COVER_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub decomposition: TreeCutDecomposition,
    pub certificate: WidthCertificate,
    pub instance_alpha: usize,
    pub closed_form_alpha: Option<u128>,
    pub alpha_symbolic: String,
    /// Walls of this size are excluded by the certificate.
    pub excluded_wall_size: Option<u128>,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum SynthesisOutcome {
    Decomposed(Box<DecompositionReport>),
    WallFound {
        embedding: Box<ImmersionEmbedding>,
        trace: Vec<String>,
    },
    /// A cap was exceeded; the partial trace tells how far the run got.
    Aborted {
        reason: String,
        trace: Vec<String>,
    },
}

enum Pipe {
    Tcd(TreeCutDecomposition),
    Wall(ImmersionEmbedding),
}

/// End-to-end: either a decomposition of `g` certified at the smallest
/// level that passes, or a verified strong immersion of the wall harvested
/// from whichever instance check failed.
pub fn synthesize(
    g: &Multigraph,
    params: &Parameters,
    caps: &SynthesisCaps,
) -> Result<SynthesisOutcome> {
    let mut trace = Vec::new();
    let wall = build_wall(params.ell as u32)?;
    // opportunistic direct search first: a small host that simply contains
    // the wall (the wall itself, say) should come back as a witness, not a
    // certificate
    let limits = crate::immersion::SearchLimits {
        max_pattern: 10,
        max_host: 40,
        node_budget: 2_000_000,
        deadline: None,
    };
    if let crate::immersion::Outcome::Present(embedding) =
        crate::immersion::find_immersion(&wall.graph, g, Mode::Strong, &limits)?
    {
        trace.push("direct search found the wall".into());
        return Ok(SynthesisOutcome::WallFound {
            embedding: Box::new(embedding),
            trace,
        });
    }
    let result = synth_rec(g, &wall.graph, params, caps, "s", &mut trace);
    let pipe = match result {
        Ok(pipe) => pipe,
        Err(Error::SizeCap { what, size, cap }) => {
            return Ok(SynthesisOutcome::Aborted {
                reason: format!("{what} needed {size}, cap {cap}"),
                trace,
            })
        }
        Err(e) => return Err(e),
    };
    match pipe {
        Pipe::Wall(embedding) => {
            validate_embedding(&wall.graph, g, &embedding)?;
            trace.push("wall immersion verified".into());
            Ok(SynthesisOutcome::WallFound {
                embedding: Box::new(embedding),
                trace,
            })
        }
        Pipe::Tcd(decomposition) => {
            let violations = validate(g, &decomposition);
            if !violations.is_empty() {
                return Err(Error::ConstructionDefect(format!(
                    "pipeline produced an invalid decomposition: {violations:?}"
                )));
            }
            let report = adhesion(g, &decomposition)?;
            let mut alpha = report.max;
            let three_ec = g.vertex_count() <= 1
                || (g.is_connected() && g.min_edge_cut()?.size >= 3);
            for t in decomposition.parts.keys() {
                let torso = torso(g, &decomposition, t)?;
                let centre = three_centre(&torso.graph, &torso.core)?;
                if three_ec && centre.graph != torso.graph {
                    return Err(Error::ConstructionDefect(format!(
                        "3-edge-connected input but the torso at {t} shrank"
                    )));
                }
                let (level, _) = match min_almost_thinness(&centre.graph, caps.thinness) {
                    Ok(out) => out,
                    Err(Error::SizeCap { what, size, cap }) => {
                        return Ok(SynthesisOutcome::Aborted {
                            reason: format!(
                                "{what} needed {size} at node {t}, cap {cap}"
                            ),
                            trace,
                        })
                    }
                    Err(e) => return Err(e),
                };
                alpha = alpha.max(level);
            }
            trace.push(format!(
                "instance level {alpha} (adhesion {})",
                report.max
            ));
            let certificate = match certify_width(
                g,
                &decomposition,
                alpha,
                ReductionMode::ThreeCentre,
                caps.thinness,
            )? {
                CertifyOutcome::Certified(cert) => cert,
                CertifyOutcome::Violated(v) => {
                    return Err(Error::ConstructionDefect(format!(
                        "instance level {alpha} failed to certify: {v:?}"
                    )))
                }
            };
            let closed_form_alpha = match params.alpha_closed_form() {
                Ok(v) => Some(v),
                Err(Error::MissingExternal(which)) => {
                    trace.push(format!("closed form needs {which}; reported symbolically"));
                    None
                }
                Err(e) => return Err(e),
            };
            let excluded = wall_size_excluded_by(alpha as u128).ok();
            if let Some(size) = excluded {
                trace.push(format!(
                    "certificate at level {alpha} excludes walls of size {size}"
                ));
            }
            Ok(SynthesisOutcome::Decomposed(Box::new(DecompositionReport {
                decomposition,
                certificate,
                instance_alpha: alpha,
                closed_form_alpha,
                alpha_symbolic: params.alpha_symbolic(),
                excluded_wall_size: excluded,
                trace,
            })))
        }
    }
}

fn single_node_tcd(g: &Multigraph, prefix: &str) -> TreeCutDecomposition {
    TreeCutDecomposition::single_node(
        NodeId::new(format!("{prefix}one")),
        g.vertex_set().clone(),
    )
}

fn synth_rec(
    g: &Multigraph,
    wall: &Multigraph,
    params: &Parameters,
    caps: &SynthesisCaps,
    prefix: &str,
    trace: &mut Vec<String>,
) -> Result<Pipe> {
    if g.vertex_count() <= 1 {
        return Ok(Pipe::Tcd(single_node_tcd(g, prefix)));
    }
    let (g1, log) = reduce_min_degree3(g);
    if !log.steps.is_empty() {
        trace.push(format!(
            "{prefix}: reduced {} vertices to minimum degree 3",
            log.steps.len()
        ));
    }
    let inner = if g1.vertex_count() <= 1 {
        Pipe::Tcd(single_node_tcd(&g1, prefix))
    } else {
        let cut = g1.min_edge_cut()?;
        if cut.size <= 2 {
            trace.push(format!("{prefix}: split along a cut of size {}", cut.size));
            let side_a = cut.source_side.clone();
            let side_b: VertexSet = g1.vertex_set().difference(&side_a).cloned().collect();
            let (ga, marker_b) = g1.contract_set(&side_b)?;
            let (gb, marker_a) = g1.contract_set(&side_a)?;
            let left = synth_rec(&ga, wall, params, caps, &format!("{prefix}L"), trace)?;
            let left_d = match left {
                Pipe::Wall(emb) => {
                    let lifted =
                        lift_embedding_through_fuse(wall, &g1, &marker_b, &side_b, &emb)?;
                    return Ok(Pipe::Wall(log.lift_embedding(wall, g, &lifted)?));
                }
                Pipe::Tcd(d) => d,
            };
            let right = synth_rec(&gb, wall, params, caps, &format!("{prefix}R"), trace)?;
            let right_d = match right {
                Pipe::Wall(emb) => {
                    let lifted =
                        lift_embedding_through_fuse(wall, &g1, &marker_a, &side_a, &emb)?;
                    return Ok(Pipe::Wall(log.lift_embedding(wall, g, &lifted)?));
                }
                Pipe::Tcd(d) => d,
            };
            Pipe::Tcd(glue(&left_d, &right_d, &marker_b, &marker_a)?)
        } else {
            core_pipeline(&g1, wall, params, caps, prefix, trace)?
        }
    };
    Ok(match inner {
        Pipe::Tcd(d) => Pipe::Tcd(log.lift_decomposition(&d, prefix)?),
        Pipe::Wall(emb) => Pipe::Wall(log.lift_embedding(wall, g, &emb)?),
    })
}

/// The 3-edge-connected core: auxiliary graph, contraction, exact
/// tree-width, conversion, expansion, and the per-torso instance checks.
fn core_pipeline(
    g1: &Multigraph,
    wall: &Multigraph,
    params: &Parameters,
    caps: &SynthesisCaps,
    prefix: &str,
    trace: &mut Vec<String>,
) -> Result<Pipe> {
    let aux = match build_auxiliary(g1, params)? {
        AuxOutcome::WallFound(emb) => {
            trace.push(format!("{prefix}: fat hub forced the wall"));
            return Ok(Pipe::Wall(*emb));
        }
        AuxOutcome::Aux(aux) => aux,
    };
    let (contracted, rep_of) = g1.contract(&aux.components)?;
    let mut branch_sets: BTreeMap<VertexId, VertexSet> = BTreeMap::new();
    for (v, rep) in &rep_of {
        branch_sets
            .entry(rep.clone())
            .or_default()
            .insert(v.clone());
    }
    let (tw, td) = exact_treewidth(&contracted, caps.treewidth)?;
    trace.push(format!(
        "{prefix}: contracted graph has {} vertices, tree-width {tw}",
        contracted.vertex_count()
    ));
    let conv = td_to_tcd(&contracted, &td)?;
    trace.push(format!(
        "{prefix}: conversion bounds held (adhesion {} <= {}, torso order {} <= {})",
        conv.achieved_adhesion,
        conv.adhesion_limit,
        conv.achieved_max_torso_order,
        conv.torso_order_limit
    ));
    // expand the contracted parts back to branch sets, with fresh node ids
    let mut parts = BTreeMap::new();
    for (t, part) in &conv.decomposition.parts {
        let expanded: VertexSet = part
            .iter()
            .flat_map(|rep| branch_sets[rep].iter().cloned())
            .collect();
        parts.insert(NodeId::new(format!("{prefix}{t}")), expanded);
    }
    let tree = conv.decomposition.tree.iter().map(|(a, b)| {
        (
            NodeId::new(format!("{prefix}{a}")),
            NodeId::new(format!("{prefix}{b}")),
        )
    });
    let expanded = TreeCutDecomposition::new(tree, parts)?;
    // per-node instance checks over the auxiliary structure
    for (t, part) in &expanded.parts {
        let components: Vec<&VertexSet> = aux
            .components
            .iter()
            .filter(|c| c.iter().next().map(|v| part.contains(v)).unwrap_or(false))
            .collect();
        for comp in components {
            let aux_comp = aux.graph.induced(comp)?;
            let cover = match linear_forest_cover(&aux_comp, params.hub_threshold() as usize, caps.cover)? {
                CoverOutcome::MinorWitness {
                    centre_set,
                    neighbours,
                } => {
                    trace.push(format!(
                        "{prefix}: star minor in an auxiliary component at {t} forced the wall"
                    ));
                    return Ok(Pipe::Wall(wall_via_minor(
                        g1,
                        params,
                        &aux.graph,
                        &centre_set,
                        &neighbours,
                    )?));
                }
                CoverOutcome::Cover(c) => c,
            };
            if let Some(emb) =
                apex_from_deleted_vertex(g1, params, &cover.deleted, &cover.paths)?
            {
                trace.push(format!(
                    "{prefix}: fat attachment to a cover path at {t} forced the wall"
                ));
                return Ok(Pipe::Wall(emb));
            }
            let threshold = params.parallel_threshold()
                * (params.hub_threshold() * 3)
                * (params.hub_threshold() * 3);
            // within-path splits and between-path pairs
            let mut segment_pairs: Vec<(Vec<VertexId>, Vec<VertexId>)> = Vec::new();
            for path in &cover.paths {
                let vs = path.vertices();
                for i in 0..vs.len() {
                    if i > 0 && i + 1 < vs.len() {
                        segment_pairs.push((vs[..i].to_vec(), vs[i + 1..].to_vec()));
                    }
                }
            }
            for (i, p) in cover.paths.iter().enumerate() {
                for q in &cover.paths[i + 1..] {
                    segment_pairs.push((p.vertices().to_vec(), q.vertices().to_vec()));
                }
            }
            for (sa, sb) in segment_pairs {
                let edges: u128 = sa
                    .iter()
                    .flat_map(|u| sb.iter().map(move |v| g1.multiplicity(u, v) as u128))
                    .sum();
                if edges > threshold {
                    if let Some(emb) = apex_from_segment_pair(g1, params, &sa, &sb)? {
                        trace.push(format!(
                            "{prefix}: overloaded segment pair at {t} forced the wall"
                        ));
                        return Ok(Pipe::Wall(emb));
                    }
                }
            }
            let _ = wall;
        }
        // record the structural enumeration level of this torso
        let torso = torso(g1, &expanded, t)?;
        if let Some(line) = structural_witness_line(g1, params, &aux, &expanded, t, &torso, caps)? {
            trace.push(format!("{prefix}: {line}"));
        }
    }
    Ok(Pipe::Tcd(expanded))
}

/// Builds the structural enumeration of a torso (cover paths in component
/// order, then peripheral vertices) and reports the level it achieves.
fn structural_witness_line(
    g1: &Multigraph,
    params: &Parameters,
    aux: &AuxiliaryGraph,
    d: &TreeCutDecomposition,
    t: &NodeId,
    torso: &crate::treecut::Torso,
    caps: &SynthesisCaps,
) -> Result<Option<String>> {
    let part = &d.parts[t];
    let mut deleted = VertexSet::new();
    let mut order: Vec<VertexId> = Vec::new();
    let components: Vec<&VertexSet> = aux
        .components
        .iter()
        .filter(|c| c.iter().next().map(|v| part.contains(v)).unwrap_or(false))
        .collect();
    for comp in components {
        let aux_comp = aux.graph.induced(comp)?;
        match linear_forest_cover(&aux_comp, params.hub_threshold() as usize, caps.cover)? {
            CoverOutcome::Cover(c) => {
                deleted.extend(c.deleted.iter().cloned());
                for p in &c.paths {
                    let vs = p.vertices();
                    if vs.last() < vs.first() {
                        order.extend(vs.iter().rev().cloned());
                    } else {
                        order.extend(vs.iter().cloned());
                    }
                }
            }
            CoverOutcome::MinorWitness { .. } => return Ok(None),
        }
    }
    for v in torso.peripheral.keys() {
        order.push(v.clone());
    }
    let rest = torso.graph.without_vertices(&deleted)?;
    if order.len() != rest.vertex_count() {
        return Ok(None);
    }
    let profile = jump_profile(&rest, &order)?;
    let max_jump = profile.iter().copied().max().unwrap_or(0);
    let max_nbrs = deleted
        .iter()
        .map(|x| torso.graph.neighbour_count(x))
        .max()
        .unwrap_or(0);
    let level = max_jump.max(deleted.len()).max(max_nbrs);
    let _ = g1;
    Ok(Some(format!(
        "structural enumeration at {t}: level {level} (deletions {}, jump {max_jump})",
        deleted.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecut::validate as validate_tcd;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn path_graph(n: usize) -> Multigraph {
        let ids: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("p{i:02}"))).collect();
        Multigraph::build(
            ids.iter().cloned(),
            ids.windows(2).map(|w| (w[0].clone(), w[1].clone(), 1)),
        )
        .unwrap()
    }

    fn cycle_graph(n: usize) -> Multigraph {
        let ids: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("p{i:02}"))).collect();
        Multigraph::build(
            ids.iter().cloned(),
            (0..n).map(|i| (ids[i].clone(), ids[(i + 1) % n].clone(), 1)),
        )
        .unwrap()
    }

    fn k4_with(names: [&str; 4]) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((vid(names[i]), vid(names[j]), 1));
            }
        }
        Multigraph::build(names.map(VertexId::from), edges).unwrap()
    }

    #[test]
    fn parallel_threshold_formula() {
        assert_eq!(Parameters::new(2).parallel_threshold(), 24);
        assert_eq!(Parameters::new(6).parallel_threshold(), 216);
    }

    #[test]
    fn excluded_wall_size_closed_form() {
        // frozen: level 1 excludes walls of size 36
        assert_eq!(wall_size_excluded_by(1).unwrap(), 36);
        assert_eq!(wall_size_excluded_by(0).unwrap(), 8);
    }

    #[test]
    fn derived_parameters_with_configured_externals() {
        let mut params = Parameters::new(2);
        assert!(matches!(
            params.degree_bound(),
            Err(Error::MissingExternal(_))
        ));
        assert!(params.degree_bound_symbolic().contains("h(8,24)"));
        params.externals.neighbour_threshold.insert(2, 10);
        params.externals.star_comb_threshold.insert((8, 24), 5);
        params.externals.treewidth_bound.insert(2, 7);
        // d = 10 * 24 * 25, a = 16 d, k = (d+1) * 8
        assert_eq!(params.degree_bound().unwrap(), 6000);
        assert_eq!(params.adhesion_bound().unwrap(), 16 * 6000);
        assert_eq!(params.torso_bound().unwrap(), 6001 * 8);
        assert!(params.alpha_closed_form().unwrap() > 0);
    }

    #[test]
    fn closed_form_level_numeric_pin() {
        // hand-computed against the configured toy constants:
        // d = 6000, a = 96000, k = 48008; the enumeration-side term
        // 13824 + 32640*13824 + 48008*3000 + 96000*48008 dominates
        let mut params = Parameters::new(2);
        params.externals.neighbour_threshold.insert(2, 10);
        params.externals.star_comb_threshold.insert((8, 24), 5);
        params.externals.treewidth_bound.insert(2, 7);
        let first: u128 = 48008 * 6177;
        let second: u128 = 13824 + 32640 * 13824 + 48008 * 3000 + 96000 * 48008;
        assert_eq!(params.alpha_closed_form().unwrap(), first.max(second));
        assert_eq!(second, 5_204_021_184);
    }

    #[test]
    fn reduction_collapses_paths_and_stars() {
        let (g, log) = reduce_min_degree3(&path_graph(6));
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(log.steps.len(), 5);
        let (g, _) = reduce_min_degree3(&crate::thinness::star(5));
        assert_eq!(g.vertex_count(), 1);
    }

    #[test]
    fn reduction_is_idempotent_on_walls() {
        let w = crate::walls::build_wall(3).unwrap().graph;
        let (g1, _) = reduce_min_degree3(&w);
        let (g2, log2) = reduce_min_degree3(&g1);
        assert!(log2.steps.is_empty());
        assert_eq!(g1, g2);
        assert!(g1.vertices().all(|v| g1.degree(v).unwrap() >= 3));
    }

    #[test]
    fn reduction_lift_preserves_validity_and_bounds() {
        let mut rng = crate::generate::rng(606);
        for _ in 0..25 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 10, 2);
            let (reduced, log) = reduce_min_degree3(&g);
            let base = TreeCutDecomposition::single_node(
                NodeId::new("base"),
                reduced.vertex_set().clone(),
            );
            let lifted = log.lift_decomposition(&base, "x").unwrap();
            assert!(validate_tcd(&g, &lifted).is_empty());
            let report = adhesion(&g, &lifted).unwrap();
            // the base decomposition has no edges, so everything lifted
            // came from reductions and stays within 2
            assert!(report.max <= 2, "adhesion {} after lift", report.max);
        }
    }

    #[test]
    fn reduction_lift_keeps_old_adhesion_sizes() {
        let mut rng = crate::generate::rng(607);
        for _ in 0..25 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 10, 2);
            let (reduced, log) = reduce_min_degree3(&g);
            if reduced.vertex_count() < 4 {
                continue;
            }
            // a two-node decomposition of the reduced graph
            let ids: Vec<VertexId> = reduced.vertices().cloned().collect();
            let first: VertexSet = ids[..ids.len() / 2].iter().cloned().collect();
            let rest: VertexSet = ids[ids.len() / 2..].iter().cloned().collect();
            let d = TreeCutDecomposition::new(
                [(NodeId::new("u0"), NodeId::new("u1"))],
                std::collections::BTreeMap::from([
                    (NodeId::new("u0"), first),
                    (NodeId::new("u1"), rest),
                ]),
            )
            .unwrap();
            let before = adhesion(&reduced, &d).unwrap();
            let lifted = log.lift_decomposition(&d, "x").unwrap();
            assert!(validate_tcd(&g, &lifted).is_empty());
            let after = adhesion(&g, &lifted).unwrap();
            for (edge, size) in &before.per_edge {
                assert_eq!(
                    after.per_edge[edge], *size,
                    "old edge adhesion changed in lift"
                );
            }
        }
    }

    #[test]
    fn split_leaves_three_edge_connected_input_alone() {
        let g = k4_with(["a", "b", "c", "d"]);
        let tree = split_3ec(&g).unwrap();
        assert_eq!(tree.pieces().len(), 1);
    }

    #[test]
    fn split_two_k4s_joined_by_two_edges() {
        let mut edges = Vec::new();
        for names in [["a", "b", "c", "d"], ["w", "x", "y", "z"]] {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    edges.push((vid(names[i]), vid(names[j]), 1));
                }
            }
        }
        edges.push((vid("a"), vid("w"), 1));
        edges.push((vid("b"), vid("x"), 1));
        let g = Multigraph::build(
            ["a", "b", "c", "d", "w", "x", "y", "z"].map(VertexId::from),
            edges,
        )
        .unwrap();
        let tree = split_3ec(&g).unwrap();
        let pieces = tree.pieces();
        // markers absorbed: each piece is a fattened K4
        assert_eq!(pieces.len(), 2);
        for p in pieces {
            assert_eq!(p.vertex_count(), 4);
            assert!(p.min_edge_cut().unwrap().size >= 3);
        }
        // and glueing single-node leaf decompositions back validates
        let mut i = 0;
        let d = tree
            .solve("g", &mut |piece, _prefix| {
                i += 1;
                Ok(TreeCutDecomposition::single_node(
                    NodeId::new(format!("leaf{i}")),
                    piece.vertex_set().clone(),
                ))
            })
            .unwrap();
        assert!(validate_tcd(&g, &d).is_empty());
        assert!(adhesion(&g, &d).unwrap().max <= 2);
    }

    #[test]
    fn split_cycle_of_three_k4s() {
        let blocks = [["a0", "a1", "a2", "a3"], ["b0", "b1", "b2", "b3"], [
            "c0", "c1", "c2", "c3",
        ]];
        let mut edges = Vec::new();
        for names in blocks {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    edges.push((vid(names[i]), vid(names[j]), 1));
                }
            }
        }
        edges.push((vid("a0"), vid("b0"), 1));
        edges.push((vid("b1"), vid("c0"), 1));
        edges.push((vid("c1"), vid("a1"), 1));
        let g = Multigraph::build(
            blocks.iter().flatten().map(|s| VertexId::from(*s)),
            edges,
        )
        .unwrap();
        let tree = split_3ec(&g).unwrap();
        assert_eq!(tree.pieces().len(), 3);
    }

    #[test]
    fn split_rejects_low_degree() {
        let g = path_graph(4);
        assert!(split_3ec(&g).is_err());
    }

    #[test]
    fn auxiliary_of_simple_graph_is_edgeless() {
        let g = k4_with(["a", "b", "c", "d"]);
        match build_auxiliary(&g, &Parameters::new(2)).unwrap() {
            AuxOutcome::Aux(aux) => {
                assert_eq!(aux.graph.size(), 0);
                assert_eq!(aux.components.len(), 4);
            }
            AuxOutcome::WallFound(_) => panic!("no fat pairs here"),
        }
    }

    #[test]
    fn auxiliary_sees_fat_pairs() {
        let g = Multigraph::build(
            [vid("a"), vid("b"), vid("c")],
            [(vid("a"), vid("b"), 25), (vid("b"), vid("c"), 24)],
        )
        .unwrap();
        match build_auxiliary(&g, &Parameters::new(2)).unwrap() {
            AuxOutcome::Aux(aux) => {
                // only the 25-fold pair crosses the threshold of 24
                assert_eq!(aux.graph.size(), 1);
                assert_eq!(aux.components.len(), 2);
            }
            AuxOutcome::WallFound(_) => panic!("degree is too small for a wall"),
        }
    }

    /// One hub joined to eight vertices by 25 parallel edges each.
    fn fat_hub_graph() -> Multigraph {
        let hub = vid("hub");
        let legs: Vec<VertexId> = (0..8).map(|i| VertexId::new(format!("n{i}"))).collect();
        Multigraph::build(
            std::iter::once(hub.clone()).chain(legs.iter().cloned()),
            legs.iter().map(|l| (hub.clone(), l.clone(), 25)),
        )
        .unwrap()
    }

    #[test]
    fn fat_hub_forces_the_wall() {
        let g = fat_hub_graph();
        match build_auxiliary(&g, &Parameters::new(2)).unwrap() {
            AuxOutcome::WallFound(emb) => {
                let wall = crate::walls::build_wall(2).unwrap();
                crate::immersion::validate_embedding(&wall.graph, &g, &emb).unwrap();
            }
            AuxOutcome::Aux(_) => panic!("eight fat neighbours must force the wall"),
        }
    }

    #[test]
    fn contraction_conserves_multiplicity_totals() {
        let mut rng = crate::generate::rng(71);
        for _ in 0..20 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 9, 30);
            let params = Parameters::new(2);
            if let AuxOutcome::Aux(aux) = build_auxiliary(&g, &params).unwrap() {
                let (contracted, rep) = g.contract(&aux.components).unwrap();
                let internal: usize = g
                    .edges()
                    .filter(|(u, v, _)| rep[u] == rep[v])
                    .map(|(_, _, m)| m)
                    .sum();
                assert_eq!(contracted.size() + internal, g.size());
            }
        }
    }

    #[test]
    fn treewidth_of_standard_graphs() {
        assert_eq!(exact_treewidth(&path_graph(6), 30).unwrap().0, 1);
        assert_eq!(exact_treewidth(&cycle_graph(6), 30).unwrap().0, 2);
        assert_eq!(
            exact_treewidth(&k4_with(["a", "b", "c", "d"]), 30).unwrap().0,
            3
        );
        let single = Multigraph::build([vid("x")], []).unwrap();
        assert_eq!(exact_treewidth(&single, 30).unwrap().0, 0);
    }

    #[test]
    fn treewidth_of_wall3_is_three() {
        // sandwich: the wall sits inside the 3x6 grid (width at most 3)
        // and the exact search confirms the lower bound
        let w = crate::walls::build_wall(3).unwrap();
        let (tw, td) = exact_treewidth(&w.graph, 30).unwrap();
        assert_eq!(tw, 3);
        validate_tree_decomposition(&w.graph, &td).unwrap();
    }

    /// Independent oracle: plain depth-first search over all elimination
    /// orders with running-max pruning, no memoization.
    fn treewidth_bruteforce(g: &Multigraph) -> usize {
        fn explore(
            adj: &Vec<Vec<bool>>,
            remaining: &mut Vec<usize>,
            current: usize,
            best: &mut usize,
        ) {
            if current >= *best {
                return;
            }
            if remaining.is_empty() {
                *best = current;
                return;
            }
            for i in 0..remaining.len() {
                let v = remaining.remove(i);
                // neighbours of v among remaining become a clique
                let nbrs: Vec<usize> = remaining
                    .iter()
                    .copied()
                    .filter(|&u| adj[v][u])
                    .collect();
                let mut new_adj = adj.clone();
                for (a, &x) in nbrs.iter().enumerate() {
                    for &y in &nbrs[a + 1..] {
                        new_adj[x][y] = true;
                        new_adj[y][x] = true;
                    }
                }
                explore(&new_adj, remaining, current.max(nbrs.len()), best);
                remaining.insert(i, v);
            }
        }
        let ids: Vec<VertexId> = g.vertices().cloned().collect();
        let n = ids.len();
        let mut adj = vec![vec![false; n]; n];
        for (u, v, _) in g.edges() {
            let i = ids.iter().position(|x| x == u).unwrap();
            let j = ids.iter().position(|x| x == v).unwrap();
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let mut best = n; // eliminating everything costs at most n-1
        explore(&adj, &mut (0..n).collect(), 0, &mut best);
        best
    }

    #[test]
    fn treewidth_matches_bruteforce_on_random_graphs() {
        let mut rng = crate::generate::rng(83);
        for _ in 0..25 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 7, 2);
            let (tw, td) = exact_treewidth(&g, 30).unwrap();
            assert_eq!(tw, treewidth_bruteforce(&g));
            validate_tree_decomposition(&g.flattened(), &td).unwrap();
        }
    }

    #[test]
    fn conversion_bounds_hold_on_paths_and_walls() {
        for g in [path_graph(7), crate::walls::build_wall(3).unwrap().graph] {
            let (_, td) = exact_treewidth(&g, 30).unwrap();
            let conv = td_to_tcd(&g, &td).unwrap();
            assert!(validate_tcd(&g, &conv.decomposition).is_empty());
            assert!(conv.achieved_adhesion <= conv.adhesion_limit);
            assert!(conv.achieved_max_torso_order <= conv.torso_order_limit);
        }
    }

    #[test]
    fn conversion_of_single_bag() {
        let g = k4_with(["a", "b", "c", "d"]);
        let td = TreeDecomposition {
            bags: std::collections::BTreeMap::from([(
                NodeId::new("b00"),
                g.vertex_set().clone(),
            )]),
            tree: vec![],
        };
        let conv = td_to_tcd(&g, &td).unwrap();
        assert_eq!(conv.decomposition.node_count(), 1);
        assert_eq!(conv.achieved_adhesion, 0);
    }

    #[test]
    fn comb_in_a_long_path() {
        let g = path_graph(8);
        let targets: VertexSet = g.vertex_set().clone();
        match find_star_or_comb(&g, &targets, 4, 5, DEFAULT_STAR_COMB_CAP).unwrap() {
            StarCombOutcome::Comb(comb) => {
                assert!(comb.legs.len() >= 5);
                validate_comb(&g, &targets, &comb).unwrap();
            }
            other => panic!("a path is its own comb: {other:?}"),
        }
    }

    #[test]
    fn star_in_a_spider_shape() {
        // centre with four long legs; targets are the tips
        let mut edges = Vec::new();
        let mut vertices = vec![vid("c")];
        let mut tips = VertexSet::new();
        for leg in 0..4 {
            let a = VertexId::new(format!("l{leg}a"));
            let b = VertexId::new(format!("l{leg}b"));
            edges.push((vid("c"), a.clone(), 1));
            edges.push((a.clone(), b.clone(), 1));
            vertices.push(a);
            tips.insert(b.clone());
            vertices.push(b);
        }
        let g = Multigraph::build(vertices, edges).unwrap();
        match find_star_or_comb(&g, &tips, 4, 4, DEFAULT_STAR_COMB_CAP).unwrap() {
            StarCombOutcome::Star(star) => {
                assert_eq!(star.centre, vid("c"));
                assert_eq!(star.rays.len(), 4);
            }
            other => panic!("four disjoint rays exist: {other:?}"),
        }
    }

    /// Exact tree oracle: in a tree, legs hanging off a spine never
    /// conflict, so the best comb on a fixed spine counts, per spine
    /// vertex, whether it reaches a target outside the spine or is one.
    fn tree_comb_oracle(g: &Multigraph, targets: &VertexSet, spine: &[VertexId]) -> usize {
        let on_spine: VertexSet = spine.iter().cloned().collect();
        let mut teeth = 0;
        for p in spine {
            if targets.contains(p) {
                teeth += 1;
                continue;
            }
            // branches at p away from the spine
            let mut found = false;
            for (u, _) in g.neighbours(p) {
                if on_spine.contains(u) {
                    continue;
                }
                // search the branch hanging at u
                let mut stack = vec![u.clone()];
                let mut seen = VertexSet::from([p.clone(), u.clone()]);
                while let Some(x) = stack.pop() {
                    if targets.contains(&x) {
                        found = true;
                        break;
                    }
                    for (y, _) in g.neighbours(&x) {
                        if seen.insert(y.clone()) {
                            stack.push(y.clone());
                        }
                    }
                }
                if found {
                    break;
                }
            }
            if found {
                teeth += 1;
            }
        }
        teeth
    }

    #[test]
    fn comb_finder_matches_tree_oracle() {
        let mut rng = crate::generate::rng(59);
        for _ in 0..15 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 9, 1);
            // keep only a spanning tree to stay in oracle territory
            let tree_edges: Vec<(VertexId, VertexId, usize)> = {
                let mut seen = VertexSet::new();
                let mut edges = Vec::new();
                let mut queue =
                    std::collections::VecDeque::from([g.vertices().next().unwrap().clone()]);
                seen.insert(queue[0].clone());
                while let Some(v) = queue.pop_front() {
                    for (u, _) in g.neighbours(&v) {
                        if seen.insert(u.clone()) {
                            edges.push((v.clone(), u.clone(), 1));
                            queue.push_back(u.clone());
                        }
                    }
                }
                edges
            };
            let tree = Multigraph::build(g.vertices().cloned(), tree_edges).unwrap();
            let targets = crate::generate::random_vertex_subset(&mut rng, &tree);
            if targets.is_empty() {
                continue;
            }
            // oracle best over all spines
            let ids: Vec<VertexId> = tree.vertices().cloned().collect();
            let mut best = 0;
            for start in &ids {
                let mut stack = vec![vec![start.clone()]];
                while let Some(spine) = stack.pop() {
                    best = best.max(tree_comb_oracle(&tree, &targets, &spine));
                    let last = spine.last().unwrap().clone();
                    for (u, _) in tree.neighbours(&last) {
                        if !spine.contains(u) {
                            let mut next = spine.clone();
                            next.push(u.clone());
                            stack.push(next);
                        }
                    }
                }
            }
            // the finder agrees on both sides of the best count
            if best > 0 {
                assert!(matches!(
                    find_star_or_comb(&tree, &targets, 99, best, DEFAULT_STAR_COMB_CAP).unwrap(),
                    StarCombOutcome::Comb(_)
                ));
            }
            assert!(matches!(
                find_star_or_comb(&tree, &targets, 99, best + 1, DEFAULT_STAR_COMB_CAP).unwrap(),
                StarCombOutcome::Neither
            ));
        }
    }

    #[test]
    fn linear_forest_cover_of_a_path_is_empty() {
        let g = path_graph(6);
        match linear_forest_cover(&g, 4, DEFAULT_COVER_CAP).unwrap() {
            CoverOutcome::Cover(c) => {
                assert!(c.deleted.is_empty());
                assert_eq!(c.paths.len(), 1);
            }
            CoverOutcome::MinorWitness { .. } => panic!("paths have no big star minor"),
        }
    }

    #[test]
    fn star_centre_is_a_minor_witness() {
        let g = crate::thinness::star(5);
        match linear_forest_cover(&g, 5, DEFAULT_COVER_CAP).unwrap() {
            CoverOutcome::MinorWitness {
                centre_set,
                neighbours,
            } => {
                assert_eq!(centre_set, VertexSet::from([vid("c")]));
                assert_eq!(neighbours.len(), 5);
            }
            CoverOutcome::Cover(_) => panic!("the centre has five neighbours"),
        }
    }

    #[test]
    fn star_minor_free_graphs_have_small_covers() {
        use rand::Rng;
        let mut rng = crate::generate::rng(29);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 10 && attempts < 400 {
            attempts += 1;
            let n = rng.gen_range(6..=14);
            let g = crate::generate::random_connected_multigraph(&mut rng, n, 1).flattened();
            match linear_forest_cover(&g, 4, DEFAULT_COVER_CAP).unwrap() {
                CoverOutcome::MinorWitness { .. } => continue,
                CoverOutcome::Cover(c) => {
                    assert!(c.deleted.len() <= 16, "cover beyond the 4k bound");
                    // re-check the cover really leaves paths
                    let rest = g.without_vertices(&c.deleted).unwrap();
                    assert!(rest
                        .vertices()
                        .all(|v| rest.degree(v).unwrap() <= 2));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0, "no star-minor-free instances generated");
    }

    #[test]
    fn synthesize_star_produces_certificate() {
        let g = crate::thinness::star(6);
        let params = Parameters::new(2);
        match synthesize(&g, &params, &SynthesisCaps::default()).unwrap() {
            SynthesisOutcome::Decomposed(report) => {
                assert!(validate_tcd(&g, &report.decomposition).is_empty());
                assert!(report.instance_alpha <= 2);
                assert!(report.closed_form_alpha.is_none());
                assert!(report.alpha_symbolic.contains("g(2)"));
            }
            other => panic!("the star is wall-free: {other:?}"),
        }
    }

    #[test]
    fn synthesize_wall_input_returns_witness() {
        let w = crate::walls::build_wall(2).unwrap();
        let params = Parameters::new(2);
        match synthesize(&w.graph, &params, &SynthesisCaps::default()).unwrap() {
            SynthesisOutcome::WallFound { embedding, .. } => {
                crate::immersion::validate_embedding(&w.graph, &w.graph, &embedding).unwrap();
            }
            other => panic!("the wall contains itself: {other:?}"),
        }
    }

    #[test]
    fn synthesize_fat_hub_returns_witness() {
        let g = fat_hub_graph();
        let params = Parameters::new(2);
        match synthesize(&g, &params, &SynthesisCaps::default()).unwrap() {
            SynthesisOutcome::WallFound { embedding, .. } => {
                let wall = crate::walls::build_wall(2).unwrap();
                crate::immersion::validate_embedding(&wall.graph, &g, &embedding).unwrap();
            }
            other => panic!("a fat hub hosts the wall: {other:?}"),
        }
    }

    #[test]
    fn synthesize_three_edge_connected_fixtures() {
        // fat spider legs and a doubled 4-cycle: both 3-edge-connected and
        // too small to host the hexagon
        let spider = crate::immersion::spider(3, 5).unwrap().graph;
        let doubled_c4 = Multigraph::build(
            ["a", "b", "c", "d"].map(VertexId::from),
            [
                (vid("a"), vid("b"), 2),
                (vid("b"), vid("c"), 2),
                (vid("c"), vid("d"), 2),
                (vid("a"), vid("d"), 2),
            ],
        )
        .unwrap();
        for g in [spider, doubled_c4] {
            assert!(g.min_edge_cut().unwrap().size >= 3);
            let params = Parameters::new(2);
            match synthesize(&g, &params, &SynthesisCaps::default()).unwrap() {
                SynthesisOutcome::Decomposed(report) => {
                    assert!(validate_tcd(&g, &report.decomposition).is_empty());
                }
                other => panic!("wall-free fixture: {other:?}"),
            }
        }
    }

    #[test]
    fn apex_harvest_helper_small() {
        // ell = 1 keeps the apexed path tiny: 6 targets needed
        let params = Parameters::new(1);
        let backbone: Vec<VertexId> = (0..6).map(|i| VertexId::new(format!("t{i}"))).collect();
        let apex = vid("apex");
        let mut edges: Vec<(VertexId, VertexId, usize)> = backbone
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone(), 1))
            .collect();
        for b in &backbone {
            edges.push((apex.clone(), b.clone(), 1));
        }
        let g = Multigraph::build(
            std::iter::once(apex.clone()).chain(backbone.iter().cloned()),
            edges,
        )
        .unwrap();
        let apex_routes: Vec<Vec<VertexId>> = backbone
            .iter()
            .map(|b| vec![apex.clone(), b.clone()])
            .collect();
        let backbone_path = Path::new(backbone.clone(), &g).unwrap();
        let connectors = subpath_connectors(&backbone_path, &backbone);
        let emb =
            wall_via_apex_path(&g, &params, &apex, &backbone, &apex_routes, &connectors).unwrap();
        let wall = crate::walls::build_wall(1).unwrap();
        crate::immersion::validate_embedding(&wall.graph, &g, &emb).unwrap();
    }
}

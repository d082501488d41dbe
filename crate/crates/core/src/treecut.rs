//! Tree-cut decompositions: validation, adhesion, torsos, 3-centres, width
//! certificates, glueing, and a bounded exhaustive certificate search.
//!
//! A decomposition is a tree on node ids plus a near-partition of the host
//! graph's vertices: parts are disjoint, cover everything, and may be
//! empty. Every tree edge induces an adhesion set (the edge cut between the
//! two side unions); each node induces a torso (neighbouring subtrees
//! contracted to peripheral vertices, parallel edges kept, loops dropped).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, VertexId, VertexSet};
use crate::thinness::{is_almost_alpha_thin, AlmostThinWitness};

/// Identifier of a decomposition tree node.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{:?}", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

fn ordered_nodes(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A tree plus a near-partition of the host vertices. The node set is the
/// key set of `parts`; tree edges must join those keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCutDecomposition {
    pub tree: Vec<(NodeId, NodeId)>,
    pub parts: BTreeMap<NodeId, VertexSet>,
}

impl TreeCutDecomposition {
    pub fn new(
        tree: impl IntoIterator<Item = (NodeId, NodeId)>,
        parts: BTreeMap<NodeId, VertexSet>,
    ) -> Result<Self> {
        let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
        for (a, b) in tree {
            if a == b {
                return Err(Error::InvalidDecomposition(format!(
                    "tree loop at node {a}"
                )));
            }
            if !parts.contains_key(&a) {
                return Err(Error::InvalidDecomposition(format!("unknown node {a}")));
            }
            if !parts.contains_key(&b) {
                return Err(Error::InvalidDecomposition(format!("unknown node {b}")));
            }
            edges.insert(ordered_nodes(a, b));
        }
        Ok(TreeCutDecomposition {
            tree: edges.into_iter().collect(),
            parts,
        })
    }

    pub fn single_node(name: NodeId, vertices: VertexSet) -> Self {
        TreeCutDecomposition {
            tree: Vec::new(),
            parts: BTreeMap::from([(name, vertices)]),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.parts.keys()
    }

    pub fn node_count(&self) -> usize {
        self.parts.len()
    }

    /// The node whose part contains `v`, if any.
    pub fn node_of(&self, v: &VertexId) -> Option<&NodeId> {
        self.parts
            .iter()
            .find(|(_, part)| part.contains(v))
            .map(|(t, _)| t)
    }

    pub fn tree_neighbours(&self, t: &NodeId) -> Vec<NodeId> {
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

    /// Nodes of the component of `T - banned` containing `start`.
    fn component_nodes(&self, start: &NodeId, banned: &NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(t) = queue.pop_front() {
            for n in self.tree_neighbours(&t) {
                if n != *banned && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// The two node sides of a tree edge: the component containing `a`
    /// first.
    pub fn edge_sides(&self, a: &NodeId, b: &NodeId) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
        (self.component_nodes(a, b), self.component_nodes(b, a))
    }

    pub fn vertex_union(&self, nodes: &BTreeSet<NodeId>) -> VertexSet {
        nodes
            .iter()
            .flat_map(|t| self.parts[t].iter().cloned())
            .collect()
    }
}

/// A named reason why a candidate decomposition is not a tree-cut
/// decomposition of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionViolation {
    VertexInTwoParts(VertexId, NodeId, NodeId),
    VertexUncovered(VertexId),
    UnknownVertexInPart(VertexId, NodeId),
    TreeDisconnected,
    TreeHasCycle,
}

/// Full validation: near-partition of `V(g)` plus tree-ness. Empty result
/// means valid.
pub fn validate(g: &Multigraph, d: &TreeCutDecomposition) -> Vec<DecompositionViolation> {
    let mut out = Vec::new();
    let mut owner: BTreeMap<&VertexId, &NodeId> = BTreeMap::new();
    for (t, part) in &d.parts {
        for v in part {
            if !g.has_vertex(v) {
                out.push(DecompositionViolation::UnknownVertexInPart(
                    v.clone(),
                    t.clone(),
                ));
            }
            if let Some(prev) = owner.insert(v, t) {
                out.push(DecompositionViolation::VertexInTwoParts(
                    v.clone(),
                    prev.clone(),
                    t.clone(),
                ));
            }
        }
    }
    for v in g.vertices() {
        if !owner.contains_key(v) {
            out.push(DecompositionViolation::VertexUncovered(v.clone()));
        }
    }
    // tree-ness: connected with exactly n-1 edges
    let n = d.parts.len();
    if d.tree.len() + 1 != n && n > 0 {
        if d.tree.len() + 1 > n {
            out.push(DecompositionViolation::TreeHasCycle);
        } else {
            out.push(DecompositionViolation::TreeDisconnected);
        }
    } else if n > 0 {
        let start = d.parts.keys().next().unwrap();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(t) = queue.pop_front() {
            for u in d.tree_neighbours(&t) {
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
        if seen.len() != n {
            out.push(DecompositionViolation::TreeDisconnected);
        }
    }
    out
}

fn require_valid(g: &Multigraph, d: &TreeCutDecomposition) -> Result<()> {
    let violations = validate(g, d);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidDecomposition(format!("{violations:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct AdhesionReport {
    pub max: usize,
    pub per_edge: BTreeMap<(NodeId, NodeId), usize>,
}

/// Adhesion set sizes: for each tree edge, the multiplicity-weighted cut
/// between the two side unions. An edgeless tree has adhesion 0.
pub fn adhesion(g: &Multigraph, d: &TreeCutDecomposition) -> Result<AdhesionReport> {
    require_valid(g, d)?;
    let mut per_edge = BTreeMap::new();
    for (a, b) in &d.tree {
        let (side_a, side_b) = d.edge_sides(a, b);
        let union_a = d.vertex_union(&side_a);
        let union_b = d.vertex_union(&side_b);
        debug_assert_eq!(union_a.len() + union_b.len(), g.vertex_count());
        let cut = g.edge_cut(&union_a)?;
        per_edge.insert((a.clone(), b.clone()), cut.size);
    }
    let max = per_edge.values().copied().max().unwrap_or(0);
    Ok(AdhesionReport { max, per_edge })
}

/// What a peripheral torso vertex stands for: the neighbouring subtree (its
/// anchor node is the neighbour of the torso node) and the vertices fused
/// into it.
#[derive(Clone, Debug)]
pub struct PeripheralInfo {
    pub anchor: NodeId,
    pub nodes: BTreeSet<NodeId>,
    pub vertices: VertexSet,
}

/// Torso at a node: core vertices are the node's own part; each component
/// of `T - t` is fused into one peripheral vertex. Parallel edges are kept
/// as they arise, loops dropped.
#[derive(Clone, Debug)]
pub struct Torso {
    pub node: NodeId,
    pub graph: Multigraph,
    pub core: VertexSet,
    pub peripheral: BTreeMap<VertexId, PeripheralInfo>,
}

fn peripheral_id(anchor: &NodeId) -> VertexId {
    VertexId::new(format!("@{anchor}"))
}

pub fn torso(g: &Multigraph, d: &TreeCutDecomposition, t: &NodeId) -> Result<Torso> {
    require_valid(g, d)?;
    if !d.parts.contains_key(t) {
        return Err(Error::InvalidDecomposition(format!("unknown node {t}")));
    }
    let core = d.parts[t].clone();
    let mut peripheral = BTreeMap::new();
    let mut fused: BTreeMap<VertexId, VertexId> = BTreeMap::new(); // vertex -> peripheral id
    for anchor in d.tree_neighbours(t) {
        let nodes = d.component_nodes(&anchor, t);
        let vertices = d.vertex_union(&nodes);
        let pid = peripheral_id(&anchor);
        if g.has_vertex(&pid) || core.contains(&pid) {
            return Err(Error::ConstructionDefect(format!(
                "peripheral id {pid} collides with a graph vertex"
            )));
        }
        for v in &vertices {
            fused.insert(v.clone(), pid.clone());
        }
        peripheral.insert(
            pid,
            PeripheralInfo {
                anchor,
                nodes,
                vertices,
            },
        );
    }
    let map = |v: &VertexId| -> VertexId { fused.get(v).cloned().unwrap_or_else(|| v.clone()) };
    let graph = Multigraph::build(
        core.iter().cloned().chain(peripheral.keys().cloned()),
        g.edges().filter_map(|(u, v, m)| {
            let (mu, mv) = (map(u), map(v));
            (mu != mv).then_some((mu, mv, m))
        }),
    )?;
    Ok(Torso {
        node: t.clone(),
        graph,
        core,
        peripheral,
    })
}

/// How a torso is reduced before its thinness is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    /// Maximal sequence of deleting unprotected vertices of degree at most
    /// 1 and suppressing unprotected vertices of degree 2, dropping loops.
    ThreeCentre,
    /// Only the deletions, never suppression.
    DeleteLeavesOnly,
    /// No reduction at all.
    TorsoAsIs,
}

/// Result of the maximal reduction of `(graph, protected)`.
#[derive(Clone, Debug)]
pub struct ThreeCentre {
    pub graph: Multigraph,
    pub protected: VertexSet,
}

fn reduction_candidates(
    g: &Multigraph,
    protected: &VertexSet,
    mode: ReductionMode,
) -> Vec<VertexId> {
    let limit = match mode {
        ReductionMode::ThreeCentre => 2,
        ReductionMode::DeleteLeavesOnly => 1,
        ReductionMode::TorsoAsIs => return Vec::new(),
    };
    g.vertices()
        .filter(|v| !protected.contains(*v) && g.degree(v).unwrap() <= limit)
        .cloned()
        .collect()
}

/// Reduction with an explicit candidate picker; used to exercise order
/// independence. The picker returns an index into the candidate list.
pub fn reduce_with_picker(
    g: &Multigraph,
    protected: &VertexSet,
    mode: ReductionMode,
    mut pick: impl FnMut(&[VertexId]) -> usize,
) -> Result<Multigraph> {
    for v in protected {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    let mut g = g.clone();
    loop {
        let candidates = reduction_candidates(&g, protected, mode);
        if candidates.is_empty() {
            return Ok(g);
        }
        let v = &candidates[pick(&candidates).min(candidates.len() - 1)];
        g = if g.degree(v).unwrap() <= 1 {
            g.without_vertex(v)?
        } else {
            g.suppress(v)?
        };
    }
}

/// The 3-centre of `(g, protected)`: maximal reduction outside the
/// protected set. The result is order independent; the canonical run picks
/// the smallest candidate first.
pub fn three_centre(g: &Multigraph, protected: &VertexSet) -> Result<ThreeCentre> {
    let graph = reduce_with_picker(g, protected, ReductionMode::ThreeCentre, |_| 0)?;
    Ok(ThreeCentre {
        graph,
        protected: protected.clone(),
    })
}

/// Certificate that a decomposition has adhesion at most `alpha` and that
/// every reduced torso is almost-`alpha`-thin.
#[derive(Clone, Debug)]
pub struct WidthCertificate {
    pub alpha: usize,
    pub per_edge_adhesion: BTreeMap<(NodeId, NodeId), usize>,
    pub per_node: BTreeMap<NodeId, AlmostThinWitness>,
}

#[derive(Clone, Debug)]
pub enum WidthViolation {
    AdhesionExceeded { edge: (NodeId, NodeId), size: usize },
    NodeNotAlmostThin { node: NodeId },
}

#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Certified(WidthCertificate),
    Violated(WidthViolation),
}

/// Checks adhesion and per-node reduced-torso thinness, reporting the first
/// violation (edges in sorted order, then nodes in sorted order).
pub fn certify_width(
    g: &Multigraph,
    d: &TreeCutDecomposition,
    alpha: usize,
    mode: ReductionMode,
    thin_cap: usize,
) -> Result<CertifyOutcome> {
    let report = adhesion(g, d)?;
    for (edge, size) in &report.per_edge {
        if *size > alpha {
            return Ok(CertifyOutcome::Violated(WidthViolation::AdhesionExceeded {
                edge: edge.clone(),
                size: *size,
            }));
        }
    }
    let mut per_node = BTreeMap::new();
    for t in d.parts.keys() {
        let torso = torso(g, d, t)?;
        let reduced = reduce_with_picker(&torso.graph, &torso.core, mode, |_| 0)?;
        match is_almost_alpha_thin(&reduced, alpha, thin_cap)? {
            Some(witness) => {
                per_node.insert(t.clone(), witness);
            }
            None => {
                return Ok(CertifyOutcome::Violated(WidthViolation::NodeNotAlmostThin {
                    node: t.clone(),
                }))
            }
        }
    }
    Ok(CertifyOutcome::Certified(WidthCertificate {
        alpha,
        per_edge_adhesion: report.per_edge,
        per_node,
    }))
}

/// Joins a decomposition of the `A`-side graph (containing the marker
/// vertex `b`, the fused other side) with one of the `B`-side graph
/// (containing marker `a`): disjoint union of the trees plus an edge
/// between the nodes holding the markers, with both markers removed from
/// their parts. Node id collisions are rejected.
pub fn glue(
    da: &TreeCutDecomposition,
    db: &TreeCutDecomposition,
    b_marker: &VertexId,
    a_marker: &VertexId,
) -> Result<TreeCutDecomposition> {
    let ta = da
        .node_of(b_marker)
        .ok_or_else(|| Error::InvalidInput(format!("marker {b_marker} not in any part")))?
        .clone();
    let tb = db
        .node_of(a_marker)
        .ok_or_else(|| Error::InvalidInput(format!("marker {a_marker} not in any part")))?
        .clone();
    if let Some(shared) = da.parts.keys().find(|t| db.parts.contains_key(*t)) {
        return Err(Error::InvalidInput(format!(
            "decompositions share node id {shared}"
        )));
    }
    let mut parts = da.parts.clone();
    parts.extend(db.parts.clone());
    parts.get_mut(&ta).unwrap().remove(b_marker);
    parts.get_mut(&tb).unwrap().remove(a_marker);
    let tree = da
        .tree
        .iter()
        .chain(db.tree.iter())
        .cloned()
        .chain(std::iter::once(ordered_nodes(ta, tb)));
    TreeCutDecomposition::new(tree, parts)
}

/// Outcome of the bounded exhaustive certificate search.
#[derive(Clone, Debug)]
pub enum CertificateSearch {
    Found {
        decomposition: TreeCutDecomposition,
        certificate: WidthCertificate,
    },
    Absent {
        candidates_checked: usize,
    },
}

/// Exhaustively searches the normalized space of decompositions with at
/// most `max_nodes` nodes for one that certifies at `alpha` under the
/// given reduction mode. The normalization: leaves hold nonempty parts and
/// no two empty parts are adjacent. Completeness relative to arbitrary
/// decompositions is argued per fixture, not in general.
pub fn search_certificate(
    g: &Multigraph,
    alpha: usize,
    max_nodes: usize,
    mode: ReductionMode,
    thin_cap: usize,
) -> Result<CertificateSearch> {
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let n = ids.len();
    if n == 0 {
        return Err(Error::TooFewVertices(0, 1));
    }
    let mut candidates_checked = 0usize;
    // trees and their degree vectors, once per node count
    let trees_by_m: Vec<Vec<(Vec<(usize, usize)>, Vec<usize>)>> = (0..=max_nodes)
        .map(|m| {
            labeled_trees(m)
                .into_iter()
                .map(|tree| {
                    let mut degree = vec![0usize; m];
                    for &(a, b) in &tree {
                        degree[a] += 1;
                        degree[b] += 1;
                    }
                    (tree, degree)
                })
                .collect()
        })
        .collect();
    // set partitions by restricted growth strings
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = 1 + rgs.iter().copied().max().unwrap_or(0);
        if blocks <= max_nodes {
            let mut parts: Vec<VertexSet> = vec![VertexSet::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                parts[b].insert(ids[i].clone());
            }
            // a tree leaf's own part is one side of its adhesion set, so
            // only blocks with a small enough cut may sit at leaves
            let leaf_ok: Vec<bool> = parts
                .iter()
                .map(|p| g.edge_cut(p).map(|c| c.size <= alpha).unwrap_or(false))
                .collect();
            for extra_empty in 0..=(max_nodes - blocks) {
                let m = blocks + extra_empty;
                for (tree, degree) in &trees_by_m[m] {
                    if !normalized_tree_ok(tree, degree, blocks) {
                        continue;
                    }
                    if m > 1 && (0..blocks).any(|i| degree[i] == 1 && !leaf_ok[i]) {
                        continue;
                    }
                    let mut part_map = BTreeMap::new();
                    for (i, p) in parts.iter().enumerate() {
                        part_map.insert(NodeId::new(format!("t{i}")), p.clone());
                    }
                    for i in blocks..m {
                        part_map.insert(NodeId::new(format!("t{i}")), VertexSet::new());
                    }
                    let edges = tree
                        .iter()
                        .map(|&(a, b)| (NodeId::new(format!("t{a}")), NodeId::new(format!("t{b}"))));
                    let d = TreeCutDecomposition::new(edges, part_map)?;
                    candidates_checked += 1;
                    if let CertifyOutcome::Certified(certificate) =
                        certify_width(g, &d, alpha, mode, thin_cap)?
                    {
                        return Ok(CertificateSearch::Found {
                            decomposition: d,
                            certificate,
                        });
                    }
                }
            }
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(CertificateSearch::Absent { candidates_checked });
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for slot in rgs.iter_mut().skip(i + 1) {
                    *slot = 0;
                }
                break;
            }
            rgs[i] = 0;
        }
    }
}

/// All labeled trees on `m` nodes (Pruefer decoding); `m = 1` yields the
/// edgeless single node.
fn labeled_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    match m {
        0 => vec![],
        1 => vec![vec![]],
        2 => vec![vec![(0, 1)]],
        _ => {
            let mut out = Vec::new();
            let len = m - 2;
            let mut seq = vec![0usize; len];
            loop {
                out.push(decode_pruefer(&seq, m));
                let mut i = 0;
                loop {
                    if i == len {
                        return out;
                    }
                    seq[i] += 1;
                    if seq[i] == m {
                        seq[i] = 0;
                        i += 1;
                    } else {
                        break;
                    }
                }
            }
        }
    }
}

fn decode_pruefer(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; m];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    let mut leaves: BTreeSet<usize> = (0..m).filter(|&i| degree[i] == 1).collect();
    for &s in seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let mut it = leaves.iter();
    let (u, v) = (*it.next().unwrap(), *it.next().unwrap());
    edges.push((u.min(v), u.max(v)));
    edges
}

/// Normalization filter: nodes `blocks..` are the empty ones; they must
/// be internal and pairwise non-adjacent.
fn normalized_tree_ok(tree: &[(usize, usize)], degree: &[usize], blocks: usize) -> bool {
    for &(a, b) in tree {
        if a >= blocks && b >= blocks {
            return false; // adjacent empty parts
        }
    }
    degree[blocks..].iter().all(|&d| d >= 2)
}

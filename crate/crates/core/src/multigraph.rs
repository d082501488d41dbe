//! Loopless multigraph with multiplicity-aware edges.
//!
//! Every algorithm in this crate operates on [`Multigraph`]. Edges are not
//! individually named: an unordered vertex pair carries a positive integer
//! multiplicity, which is all that cuts, flows and immersions ever need.
//! Values are immutable after construction and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque, totally ordered vertex identifier. All tie-breaking in the crate
/// is by this order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Self {
        VertexId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{:?}", self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

/// A set of vertices, always interpreted relative to a host graph.
pub type VertexSet = BTreeSet<VertexId>;

/// Normalizes an unordered pair so the smaller id comes first.
pub fn ordered_pair(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Loopless multigraph: a finite vertex set plus a multiplicity for each
/// unordered pair. Absent pairs have multiplicity 0.
#[derive(Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<(VertexId, VertexId), usize>,
    adj: BTreeMap<VertexId, BTreeMap<VertexId, usize>>,
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Multigraph({} vertices, {} edges)",
            self.vertices.len(),
            self.size()
        )
    }
}

impl Multigraph {
    /// Builds a graph from explicit vertices and edge triples. Endpoints must
    /// be listed as vertices, loops are rejected, duplicate pairs have their
    /// multiplicities summed, and zero multiplicities are rejected.
    pub fn build<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId, usize)>,
    {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut map: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        for (u, v, m) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex {u}")));
            }
            if m == 0 {
                return Err(Error::InvalidInput(format!(
                    "zero multiplicity on edge {u}-{v}"
                )));
            }
            if !vertices.contains(&u) {
                return Err(Error::UnknownVertex(u));
            }
            if !vertices.contains(&v) {
                return Err(Error::UnknownVertex(v));
            }
            *map.entry(ordered_pair(u, v)).or_insert(0) += m;
        }
        let mut adj: BTreeMap<VertexId, BTreeMap<VertexId, usize>> = vertices
            .iter()
            .map(|v| (v.clone(), BTreeMap::new()))
            .collect();
        for ((u, v), m) in &map {
            adj.get_mut(u).unwrap().insert(v.clone(), *m);
            adj.get_mut(v).unwrap().insert(u.clone(), *m);
        }
        Ok(Multigraph {
            vertices,
            edges: map,
            adj,
        })
    }

    /// Convenience constructor from string labels with unit multiplicities.
    pub fn from_simple_edges<'a>(
        vertices: impl IntoIterator<Item = &'a str>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        Self::build(
            vertices.into_iter().map(VertexId::from),
            edges
                .into_iter()
                .map(|(u, v)| (VertexId::from(u), VertexId::from(v), 1)),
        )
    }

    pub fn empty() -> Self {
        Multigraph::build([], []).unwrap()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> + '_ {
        self.vertices.iter()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    /// Iterates over `(u, v, multiplicity)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, usize)> + '_ {
        self.edges.iter().map(|((u, v), m)| (u, v, *m))
    }

    /// Number of distinct adjacent pairs.
    pub fn edge_pair_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of edges counted with multiplicity.
    pub fn size(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, u: &VertexId, v: &VertexId) -> usize {
        if u == v {
            return 0;
        }
        self.edges
            .get(&ordered_pair(u.clone(), v.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// Neighbours of `v` with multiplicities.
    pub fn neighbours(&self, v: &VertexId) -> impl Iterator<Item = (&VertexId, usize)> + '_ {
        self.adj
            .get(v)
            .into_iter()
            .flat_map(|m| m.iter().map(|(u, mult)| (u, *mult)))
    }

    pub fn neighbour_count(&self, v: &VertexId) -> usize {
        self.adj.get(v).map_or(0, |m| m.len())
    }

    /// Multiplicity-weighted incidence count.
    pub fn degree(&self, v: &VertexId) -> Result<usize> {
        match self.adj.get(v) {
            Some(m) => Ok(m.values().sum()),
            None => Err(Error::UnknownVertex(v.clone())),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| self.degree(v).unwrap())
            .max()
            .unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.edges.values().all(|&m| m == 1)
    }

    /// The underlying simple graph: every multiplicity flattened to 1.
    pub fn flattened(&self) -> Multigraph {
        Multigraph::build(
            self.vertices.iter().cloned(),
            self.edges.keys().map(|(u, v)| (u.clone(), v.clone(), 1)),
        )
        .unwrap()
    }

    /// Subgraph induced on `set` (which must be a subset of the vertices).
    pub fn induced(&self, set: &VertexSet) -> Result<Multigraph> {
        for v in set {
            if !self.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        Multigraph::build(
            set.iter().cloned(),
            self.edges.iter().filter_map(|((u, v), m)| {
                (set.contains(u) && set.contains(v)).then(|| (u.clone(), v.clone(), *m))
            }),
        )
    }

    pub fn without_vertex(&self, v: &VertexId) -> Result<Multigraph> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        let mut set = self.vertices.clone();
        set.remove(v);
        self.induced(&set)
    }

    pub fn without_vertices(&self, drop: &VertexSet) -> Result<Multigraph> {
        let set: VertexSet = self.vertices.difference(drop).cloned().collect();
        self.induced(&set)
    }

    /// Connected components as vertex sets, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.vertices {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v.clone());
                for (u, _) in self.neighbours(v) {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// All edges with exactly one end in `a`, multiplicities preserved.
    pub fn edge_cut(&self, a: &VertexSet) -> Result<EdgeCut> {
        for v in a {
            if !self.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        let mut crossing = BTreeMap::new();
        let mut size = 0;
        for ((u, v), m) in &self.edges {
            if a.contains(u) != a.contains(v) {
                crossing.insert((u.clone(), v.clone()), *m);
                size += *m;
            }
        }
        Ok(EdgeCut {
            source_side: a.clone(),
            crossing,
            size,
        })
    }

    /// Contracts each part of a partition of the vertex set to a single
    /// vertex, summing cross-part multiplicities and dropping the edges that
    /// become loops. The representative of a part is its smallest member, so
    /// an all-singleton partition is the identity. Returns the contracted
    /// graph together with the vertex-to-representative mapping.
    pub fn contract(&self, parts: &[VertexSet]) -> Result<(Multigraph, BTreeMap<VertexId, VertexId>)> {
        let mut rep: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for part in parts {
            let r = part
                .iter()
                .next()
                .ok_or_else(|| Error::NotAPartition("empty part".into()))?
                .clone();
            for v in part {
                if !self.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
                if rep.insert(v.clone(), r.clone()).is_some() {
                    return Err(Error::NotAPartition(format!("vertex {v} in two parts")));
                }
            }
        }
        if rep.len() != self.vertex_count() {
            return Err(Error::NotAPartition(format!(
                "parts cover {} of {} vertices",
                rep.len(),
                self.vertex_count()
            )));
        }
        let graph = Multigraph::build(
            parts.iter().map(|p| p.iter().next().unwrap().clone()),
            self.edges.iter().filter_map(|((u, v), m)| {
                let (ru, rv) = (rep[u].clone(), rep[v].clone());
                (ru != rv).then_some((ru, rv, *m))
            }),
        )?;
        Ok((graph, rep))
    }

    /// Contracts one vertex set to a single vertex, keeping every other
    /// vertex as a singleton part.
    pub fn contract_set(&self, set: &VertexSet) -> Result<(Multigraph, VertexId)> {
        if set.is_empty() {
            return Err(Error::NotAPartition("empty part".into()));
        }
        let mut parts = vec![set.clone()];
        for v in &self.vertices {
            if !set.contains(v) {
                parts.push(VertexSet::from([v.clone()]));
            }
        }
        let (g, _) = self.contract(&parts)?;
        Ok((g, set.iter().next().unwrap().clone()))
    }

    /// Removes a degree-2 vertex, joining its two edge ends. If both edges
    /// lead to the same vertex the arising loop is deleted.
    pub fn suppress(&self, v: &VertexId) -> Result<Multigraph> {
        let deg = self.degree(v)?;
        if deg != 2 {
            return Err(Error::DegreeNotTwo(v.clone(), deg));
        }
        let ends: Vec<(VertexId, usize)> = self
            .neighbours(v)
            .map(|(u, m)| (u.clone(), m))
            .collect();
        let mut edges: Vec<(VertexId, VertexId, usize)> = self
            .edges
            .iter()
            .filter(|((a, b), _)| a != v && b != v)
            .map(|((a, b), m)| (a.clone(), b.clone(), *m))
            .collect();
        match ends.as_slice() {
            // two distinct neighbours, one edge each
            [(u, 1), (w, 1)] => edges.push((u.clone(), w.clone(), 1)),
            // both edges to the same neighbour: loop deleted, nothing added
            [(_, 2)] => {}
            _ => unreachable!("degree 2 with ends {ends:?}"),
        }
        Multigraph::build(
            self.vertices.iter().filter(|u| *u != v).cloned(),
            edges,
        )
    }

    /// A global minimum edge cut with both sides nonempty, multiplicity
    /// weighted (Stoer–Wagner). A disconnected graph yields a size-0 cut
    /// separating its first component.
    pub fn min_edge_cut(&self) -> Result<EdgeCut> {
        if self.vertex_count() < 2 {
            return Err(Error::TooFewVertices(self.vertex_count(), 2));
        }
        let comps = self.components();
        if comps.len() > 1 {
            return self.edge_cut(&comps[0]);
        }
        let ids: Vec<VertexId> = self.vertices.iter().cloned().collect();
        let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let n = ids.len();
        let mut w = vec![vec![0u64; n]; n];
        for ((u, v), m) in &self.edges {
            let (i, j) = (index[u], index[v]);
            w[i][j] = *m as u64;
            w[j][i] = *m as u64;
        }
        // merged[i] = set of original vertex indices currently fused into i
        let mut merged: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut active: Vec<usize> = (0..n).collect();
        let mut best_weight = u64::MAX;
        let mut best_side: Vec<usize> = Vec::new();
        while active.len() > 1 {
            // minimum cut phase: maximum-adjacency order from the first vertex
            let mut order = vec![active[0]];
            let mut weight_to: BTreeMap<usize, u64> =
                active.iter().map(|&v| (v, w[active[0]][v])).collect();
            weight_to.remove(&active[0]);
            while order.len() < active.len() {
                // most tightly connected next, ties by smallest vertex index
                let (&next, _) = weight_to
                    .iter()
                    .max_by(|(a, wa), (b, wb)| wa.cmp(wb).then(b.cmp(a)))
                    .unwrap();
                order.push(next);
                weight_to.remove(&next);
                for (&v, wv) in weight_to.iter_mut() {
                    *wv += w[next][v];
                }
            }
            let t = *order.last().unwrap();
            let s = order[order.len() - 2];
            let cut_of_phase: u64 = active.iter().filter(|&&v| v != t).map(|&v| w[t][v]).sum();
            if cut_of_phase < best_weight {
                best_weight = cut_of_phase;
                best_side = merged[t].clone();
            }
            // merge t into s
            let t_merged = std::mem::take(&mut merged[t]);
            merged[s].extend(t_merged);
            for &v in &active {
                if v != s && v != t {
                    w[s][v] += w[t][v];
                    w[v][s] = w[s][v];
                }
            }
            active.retain(|&v| v != t);
        }
        let side: VertexSet = best_side.iter().map(|&i| ids[i].clone()).collect();
        self.edge_cut(&side)
    }

    /// Bridges: single edges whose removal disconnects their ends. Pairs with
    /// multiplicity at least 2 are never bridges.
    pub fn bridges(&self) -> Vec<(VertexId, VertexId)> {
        let ids: Vec<VertexId> = self.vertices.iter().cloned().collect();
        let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let n = ids.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut time = 0usize;
        let mut out = Vec::new();
        // iterative DFS; the tree edge to the parent is only skipped once
        struct Frame {
            v: usize,
            parent: Option<usize>,
            skipped_parent_edge: bool,
            nbrs: Vec<usize>,
            i: usize,
        }
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut stack = vec![Frame {
                v: root,
                parent: None,
                skipped_parent_edge: false,
                nbrs: self.neighbours(&ids[root]).map(|(u, _)| index[u]).collect(),
                i: 0,
            }];
            while let Some(frame) = stack.last_mut() {
                if frame.i >= frame.nbrs.len() {
                    let frame = stack.pop().unwrap();
                    if let Some(p) = frame.parent {
                        low[p] = low[p].min(low[frame.v]);
                        if low[frame.v] > disc[p] {
                            out.push(ordered_pair(ids[p].clone(), ids[frame.v].clone()));
                        }
                    }
                    continue;
                }
                let u = frame.nbrs[frame.i];
                frame.i += 1;
                let v = frame.v;
                if disc[u] == usize::MAX {
                    disc[u] = time;
                    low[u] = time;
                    time += 1;
                    let unbrs: Vec<usize> =
                        self.neighbours(&ids[u]).map(|(x, _)| index[x]).collect();
                    stack.push(Frame {
                        v: u,
                        parent: Some(v),
                        skipped_parent_edge: false,
                        nbrs: unbrs,
                        i: 0,
                    });
                } else if Some(u) == frame.parent && !frame.skipped_parent_edge {
                    frame.skipped_parent_edge = true;
                    // parallel edges to the parent count as a back edge
                    if self.multiplicity(&ids[v], &ids[u]) >= 2 {
                        low[v] = low[v].min(disc[u]);
                    }
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            }
        }
        out.sort();
        out
    }

    /// Vertex sets of the 2-edge-connected pieces: components after all
    /// bridges are removed.
    pub fn two_edge_connected_components(&self) -> Vec<VertexSet> {
        let bridges: BTreeSet<(VertexId, VertexId)> = self.bridges().into_iter().collect();
        let pruned = Multigraph::build(
            self.vertices.iter().cloned(),
            self.edges.iter().filter_map(|((u, v), m)| {
                (!bridges.contains(&(u.clone(), v.clone()))).then(|| (u.clone(), v.clone(), *m))
            }),
        )
        .unwrap();
        pruned.components()
    }
}

/// An edge cut: the edges with exactly one end in `source_side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCut {
    pub source_side: VertexSet,
    pub crossing: BTreeMap<(VertexId, VertexId), usize>,
    pub size: usize,
}

/// A path as a vertex sequence; consecutive vertices must be adjacent in the
/// host graph and no vertex repeats. Parallel edges are handled by usage
/// accounting: a family of paths may traverse a pair as often as its
/// multiplicity allows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path(Vec<VertexId>);

impl Path {
    pub fn new(vertices: Vec<VertexId>, host: &Multigraph) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("empty path".into()));
        }
        let distinct: BTreeSet<&VertexId> = vertices.iter().collect();
        if distinct.len() != vertices.len() {
            return Err(Error::InvalidInput("path repeats a vertex".into()));
        }
        for v in &vertices {
            if !host.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        for pair in vertices.windows(2) {
            if host.multiplicity(&pair[0], &pair[1]) == 0 {
                return Err(Error::InvalidInput(format!(
                    "path uses missing edge {}-{}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Path(vertices))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn first(&self) -> &VertexId {
        self.0.first().unwrap()
    }

    pub fn last(&self) -> &VertexId {
        self.0.last().unwrap()
    }

    pub fn interior(&self) -> &[VertexId] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn edge_pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0
            .windows(2)
            .map(|w| ordered_pair(w[0].clone(), w[1].clone()))
    }

    pub fn len_edges(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

/// Sums per-pair usage over a family of paths and checks it never exceeds
/// the host multiplicity.
pub fn validate_edge_budget(host: &Multigraph, paths: &[Path]) -> Result<()> {
    let mut usage: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for p in paths {
        for pair in p.edge_pairs() {
            *usage.entry(pair).or_insert(0) += 1;
        }
    }
    for ((u, v), used) in usage {
        let have = host.multiplicity(&u, &v);
        if used > have {
            return Err(Error::InvalidInput(format!(
                "edge {u}-{v} used {used} times but has multiplicity {have}"
            )));
        }
    }
    Ok(())
}

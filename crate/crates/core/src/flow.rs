//! Path packing via augmenting-path max flow.
//!
//! One network builder covers the three Menger-style questions the crate
//! asks: edge-disjoint set-to-set paths, fully vertex-disjoint set-to-set
//! paths, and internally vertex-disjoint paths between two vertices. All
//! augmentation is breadth-first over adjacency lists built in sorted vertex
//! order, so witnesses are reproducible.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::multigraph::{EdgeCut, Multigraph, Path, VertexId, VertexSet};

pub(crate) struct Arc {
    to: usize,
    residual: u64,
    initial: u64,
}

pub(crate) struct Network {
    pub(crate) arcs: Vec<Arc>,
    pub(crate) adj: Vec<Vec<usize>>,
}

impl Network {
    pub(crate) fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Directed arc with a zero-capacity reverse partner.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, residual: cap, initial: cap });
        self.arcs.push(Arc { to: from, residual: 0, initial: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Undirected capacity: both directions start with the full residual and
    /// share the coupling, so net usage never exceeds `cap`.
    fn add_undirected(&mut self, a: usize, b: usize, cap: u64) {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: b, residual: cap, initial: cap });
        self.arcs.push(Arc { to: a, residual: cap, initial: cap });
        self.adj[a].push(id);
        self.adj[b].push(id + 1);
    }

    /// Edmonds–Karp, stopping once `limit` units have been pushed.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let mut total = 0;
        while total < limit {
            let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            parent[s] = Some(usize::MAX);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for &a in &self.adj[v] {
                    let arc = &self.arcs[a];
                    if arc.residual > 0 && parent[arc.to].is_none() {
                        parent[arc.to] = Some(a);
                        queue.push_back(arc.to);
                    }
                }
            }
            if parent[t].is_none() {
                break;
            }
            let mut bottleneck = limit - total;
            let mut v = t;
            while v != s {
                let a = parent[v].unwrap();
                bottleneck = bottleneck.min(self.arcs[a].residual);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = parent[v].unwrap();
                self.arcs[a].residual -= bottleneck;
                self.arcs[a ^ 1].residual += bottleneck;
                v = self.arcs[a ^ 1].to;
            }
            total += bottleneck;
        }
        total
    }

    /// Nodes reachable from `s` in the residual network.
    fn residual_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let arc = &self.arcs[a];
                if arc.residual > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }

    /// Splits the net flow into `value` unit walks from `s` to `t`,
    /// shortcutting any loops so each walk is a simple node sequence.
    /// Leftover circulations are ignored.
    pub(crate) fn unit_walks(&self, s: usize, t: usize, value: u64) -> Vec<Vec<usize>> {
        // net consumption per arc index (forward direction only)
        let mut used: Vec<i64> = self
            .arcs
            .iter()
            .map(|a| a.initial as i64 - a.residual as i64)
            .collect();
        // cancel antiparallel usage within each pair
        for a in (0..used.len()).step_by(2) {
            let cancel = used[a].min(used[a + 1]).max(0);
            used[a] -= cancel;
            used[a + 1] -= cancel;
        }
        let mut walks = Vec::new();
        for _ in 0..value {
            let mut walk = vec![s];
            let mut position: BTreeMap<usize, usize> = BTreeMap::from([(s, 0)]);
            let mut v = s;
            while v != t {
                let a = *self.adj[v]
                    .iter()
                    .find(|&&a| used[a] > 0)
                    .expect("flow conservation broken during decomposition");
                used[a] -= 1;
                v = self.arcs[a].to;
                if let Some(&at) = position.get(&v) {
                    // shortcut the loop we just closed
                    for dropped in walk.drain(at + 1..) {
                        position.remove(&dropped);
                    }
                } else {
                    walk.push(v);
                    position.insert(v, walk.len() - 1);
                }
            }
            walks.push(walk);
        }
        walks
    }
}

/// Outcome of an edge-disjoint linkage question: either the requested paths
/// or a cut of smaller size witnessing their absence.
#[derive(Clone, Debug)]
pub enum EdgeLinkage {
    Paths(Vec<Path>),
    Blocked(EdgeCut),
}

/// Outcome of a vertex-disjoint linkage question: either the paths or a
/// vertex set of smaller size meeting all candidate paths. When the two
/// terminal vertices of an internally-disjoint query are adjacent, the
/// blocking witness may also need direct edges; those are reported too.
#[derive(Clone, Debug)]
pub enum VertexLinkage {
    Paths(Vec<Path>),
    Blocked {
        separator: VertexSet,
        direct_edges: usize,
    },
}

fn check_disjoint_subsets(g: &Multigraph, a: &VertexSet, b: &VertexSet) -> Result<()> {
    for v in a.iter().chain(b.iter()) {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    if a.intersection(b).next().is_some() {
        return Err(Error::InvalidInput(
            "terminal sets must be disjoint".into(),
        ));
    }
    Ok(())
}

/// `k` pairwise edge-disjoint A–B paths (multiplicity respecting), or a cut
/// of size below `k` separating A from B.
pub fn edge_disjoint_paths(
    g: &Multigraph,
    a: &VertexSet,
    b: &VertexSet,
    k: usize,
) -> Result<EdgeLinkage> {
    check_disjoint_subsets(g, a, b)?;
    if k == 0 {
        return Ok(EdgeLinkage::Paths(Vec::new()));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(EdgeLinkage::Blocked(g.edge_cut(a)?));
    }
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = ids.len();
    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    let k64 = k as u64;
    for (u, v, m) in g.edges() {
        net.add_undirected(index[u], index[v], (m as u64).min(k64));
    }
    for v in a {
        net.add_arc(s, index[v], k64);
    }
    for v in b {
        net.add_arc(index[v], t, k64);
    }
    let flow = net.max_flow(s, t, k64);
    if flow < k64 {
        let side = net.residual_side(s);
        let cut_side: VertexSet = (0..n).filter(|&i| side[i]).map(|i| ids[i].clone()).collect();
        let cut = g.edge_cut(&cut_side)?;
        debug_assert!(cut.size < k);
        return Ok(EdgeLinkage::Blocked(cut));
    }
    let paths = net
        .unit_walks(s, t, flow)
        .into_iter()
        .map(|walk| {
            let vs: Vec<VertexId> = walk[1..walk.len() - 1]
                .iter()
                .map(|&i| ids[i].clone())
                .collect();
            Path::new(vs, g).expect("flow decomposition produced an invalid path")
        })
        .collect();
    Ok(EdgeLinkage::Paths(paths))
}

/// Shared machinery for the vertex-capacitated questions. `cap_one` marks
/// the vertices that may carry at most one path; everything else is
/// unconstrained. Sources enter at the split-in node, sinks leave at the
/// split-out node.
fn vertex_capacitated_paths(
    g: &Multigraph,
    sources: &VertexSet,
    sinks: &VertexSet,
    cap_one: impl Fn(&VertexId) -> bool,
    edge_cap_of: impl Fn(usize) -> u64,
    source_cap: u64,
    sink_cap: u64,
    k: usize,
) -> Result<VertexLinkage> {
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = ids.len();
    // node 2i = v_in, 2i+1 = v_out, then source and sink
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    let k64 = k as u64;
    let unbounded = k64 + 1;
    let mut split_arc = vec![0usize; n];
    for (i, v) in ids.iter().enumerate() {
        let cap = if cap_one(v) { 1 } else { unbounded };
        split_arc[i] = net.add_arc(2 * i, 2 * i + 1, cap);
    }
    for (u, v, m) in g.edges() {
        let (iu, iv) = (index[u], index[v]);
        let cap = edge_cap_of(m);
        net.add_arc(2 * iu + 1, 2 * iv, cap);
        net.add_arc(2 * iv + 1, 2 * iu, cap);
    }
    for v in sources {
        net.add_arc(s, 2 * index[v], source_cap);
    }
    for v in sinks {
        net.add_arc(2 * index[v] + 1, t, sink_cap);
    }
    let flow = net.max_flow(s, t, k64);
    if flow < k64 {
        let side = net.residual_side(s);
        let mut separator = VertexSet::new();
        for i in 0..n {
            if side[2 * i] && !side[2 * i + 1] {
                separator.insert(ids[i].clone());
            }
        }
        // source arcs crossing the cut mean the source vertex itself blocks
        for v in sources {
            if !side[2 * index[v]] {
                separator.insert(v.clone());
            }
        }
        let mut direct_edges = 0usize;
        for (u, v, m) in g.edges() {
            let (iu, iv) = (index[u], index[v]);
            let cap = edge_cap_of(m) as usize;
            if side[2 * iu + 1] && !side[2 * iv] {
                direct_edges += cap;
            }
            if side[2 * iv + 1] && !side[2 * iu] {
                direct_edges += cap;
            }
        }
        return Ok(VertexLinkage::Blocked {
            separator,
            direct_edges,
        });
    }
    let paths = net
        .unit_walks(s, t, flow)
        .into_iter()
        .map(|walk| {
            let mut vs: Vec<VertexId> = Vec::new();
            for &node in &walk[1..walk.len() - 1] {
                let v = ids[node / 2].clone();
                if vs.last() != Some(&v) {
                    vs.push(v);
                }
            }
            Path::new(vs, g).expect("flow decomposition produced an invalid path")
        })
        .collect();
    Ok(VertexLinkage::Paths(paths))
}

/// `k` pairwise vertex-disjoint A–B paths, or a vertex set of size below `k`
/// meeting all A–B paths.
pub fn vertex_disjoint_paths(
    g: &Multigraph,
    a: &VertexSet,
    b: &VertexSet,
    k: usize,
) -> Result<VertexLinkage> {
    check_disjoint_subsets(g, a, b)?;
    if k == 0 {
        return Ok(VertexLinkage::Paths(Vec::new()));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(VertexLinkage::Blocked {
            separator: VertexSet::new(),
            direct_edges: 0,
        });
    }
    // all vertices carry at most one path; edge capacities are irrelevant
    // because both endpoints of an edge are already capacitated
    vertex_capacitated_paths(g, a, b, |_| true, |_| (k + 1) as u64, 1, 1, k)
}

/// `k` internally vertex-disjoint u–v paths. Parallel u–v edges count as
/// distinct paths. The absence witness is a separator of internal vertices
/// plus the number of direct edges it cannot account for.
pub fn internally_disjoint_paths(
    g: &Multigraph,
    u: &VertexId,
    v: &VertexId,
    k: usize,
) -> Result<VertexLinkage> {
    if !g.has_vertex(u) {
        return Err(Error::UnknownVertex(u.clone()));
    }
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v.clone()));
    }
    if u == v {
        return Err(Error::InvalidInput("endpoints must differ".into()));
    }
    if k == 0 {
        return Ok(VertexLinkage::Paths(Vec::new()));
    }
    let a = VertexSet::from([u.clone()]);
    let b = VertexSet::from([v.clone()]);
    vertex_capacitated_paths(
        g,
        &a,
        &b,
        |x| x != u && x != v,
        |m| m as u64,
        k as u64,
        k as u64,
        k,
    )
    .map(|outcome| match outcome {
        VertexLinkage::Blocked { mut separator, direct_edges } => {
            separator.remove(u);
            separator.remove(v);
            VertexLinkage::Blocked { separator, direct_edges }
        }
        paths => paths,
    })
}

/// Replaces the single-unit terminal arcs: `k` edge-disjoint A–B paths that
/// collectively meet each vertex of `restricted` at most once.
pub fn edge_disjoint_paths_restricted(
    g: &Multigraph,
    a: &VertexSet,
    b: &VertexSet,
    restricted: &VertexSet,
    k: usize,
) -> Result<EdgeLinkage> {
    check_disjoint_subsets(g, a, b)?;
    if k == 0 {
        return Ok(EdgeLinkage::Paths(Vec::new()));
    }
    let outcome = vertex_capacitated_paths(
        g,
        a,
        b,
        |x| restricted.contains(x),
        |m| (m as u64).min(k as u64),
        1,
        1,
        k,
    )?;
    Ok(match outcome {
        VertexLinkage::Paths(paths) => EdgeLinkage::Paths(paths),
        VertexLinkage::Blocked { separator, .. } => {
            // report the blocked sets as a degenerate cut descriptor
            let mut side = a.clone();
            side.extend(separator.iter().cloned());
            EdgeLinkage::Blocked(g.edge_cut(&side)?)
        }
    })
}

/// Maximum number of internally-disjoint paths from `centre` to distinct
/// vertices of `targets`, pairwise vertex-disjoint away from the centre.
/// Used by the subdivided-star finder.
pub fn star_paths(
    g: &Multigraph,
    centre: &VertexId,
    targets: &VertexSet,
    want: usize,
) -> Result<Vec<Path>> {
    if !g.has_vertex(centre) {
        return Err(Error::UnknownVertex(centre.clone()));
    }
    let mut sinks = targets.clone();
    sinks.remove(centre);
    let a = VertexSet::from([centre.clone()]);
    let outcome = vertex_capacitated_paths(
        g,
        &a,
        &sinks,
        |x| x != centre,
        |m| m as u64,
        want as u64,
        1,
        want,
    )?;
    Ok(match outcome {
        VertexLinkage::Paths(paths) => paths,
        VertexLinkage::Blocked { .. } => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::validate_edge_budget;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn vset(items: &[&str]) -> VertexSet {
        items.iter().map(|s| vid(s)).collect()
    }

    #[test]
    fn parallel_edges_give_parallel_paths() {
        let g = Multigraph::build([vid("u"), vid("v")], [(vid("u"), vid("v"), 4)]).unwrap();
        match edge_disjoint_paths(&g, &vset(&["u"]), &vset(&["v"]), 4).unwrap() {
            EdgeLinkage::Paths(paths) => {
                assert_eq!(paths.len(), 4);
                validate_edge_budget(&g, &paths).unwrap();
            }
            EdgeLinkage::Blocked(_) => panic!("expected paths"),
        }
    }

    #[test]
    fn bridge_blocks_two_paths() {
        let g = Multigraph::from_simple_edges(
            ["a", "b", "c", "d", "e", "f"],
            [
                ("a", "b"),
                ("b", "c"),
                ("a", "c"),
                ("d", "e"),
                ("e", "f"),
                ("d", "f"),
                ("c", "d"),
            ],
        )
        .unwrap();
        match edge_disjoint_paths(&g, &vset(&["a"]), &vset(&["f"]), 2).unwrap() {
            EdgeLinkage::Blocked(cut) => assert_eq!(cut.size, 1),
            EdgeLinkage::Paths(_) => panic!("bridge graph cannot carry 2 paths"),
        }
    }

    #[test]
    fn star_centre_separates_leaves() {
        let g = Multigraph::from_simple_edges(
            ["c", "l1", "l2", "l3", "l4"],
            [("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")],
        )
        .unwrap();
        match vertex_disjoint_paths(&g, &vset(&["l1", "l2"]), &vset(&["l3", "l4"]), 2).unwrap() {
            VertexLinkage::Blocked { separator, .. } => {
                assert_eq!(separator, vset(&["c"]));
            }
            VertexLinkage::Paths(_) => panic!("all paths share the centre"),
        }
    }

    #[test]
    fn triple_edge_is_three_internally_disjoint_paths() {
        let g = Multigraph::build([vid("u"), vid("v")], [(vid("u"), vid("v"), 3)]).unwrap();
        match internally_disjoint_paths(&g, &vid("u"), &vid("v"), 3).unwrap() {
            VertexLinkage::Paths(paths) => assert_eq!(paths.len(), 3),
            VertexLinkage::Blocked { .. } => panic!("triple edge carries three paths"),
        }
    }

    #[test]
    fn menger_duality_on_random_graphs() {
        // oracle: paths for k exist iff no bipartition cut below k separates
        let mut rng = crate::generate::rng(77);
        for _ in 0..40 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 8, 2);
            let ids: Vec<VertexId> = g.vertices().cloned().collect();
            let a = vset(&[ids[0].as_str()]);
            let b = vset(&[ids[ids.len() - 1].as_str()]);
            for k in 1..=4usize {
                let got = edge_disjoint_paths(&g, &a, &b, k).unwrap();
                // exhaustive min cut between the two vertices
                let rest: Vec<&VertexId> =
                    ids[1..ids.len() - 1].iter().collect();
                let mut min_cut = usize::MAX;
                for mask in 0..(1usize << rest.len()) {
                    let mut side = a.clone();
                    for (i, v) in rest.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            side.insert((*v).clone());
                        }
                    }
                    min_cut = min_cut.min(g.edge_cut(&side).unwrap().size);
                }
                match got {
                    EdgeLinkage::Paths(paths) => {
                        assert!(min_cut >= k, "paths exist but cut {min_cut} < {k}");
                        assert_eq!(paths.len(), k);
                        validate_edge_budget(&g, &paths).unwrap();
                        for p in &paths {
                            assert!(a.contains(p.first()) && b.contains(p.last()));
                        }
                    }
                    EdgeLinkage::Blocked(cut) => {
                        assert!(cut.size < k);
                        assert_eq!(cut.size, min_cut, "blocked cut must be minimum");
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_disjoint_matches_bruteforce_on_random_graphs() {
        // oracle: exhaustive search over systems of vertex-disjoint paths
        let mut rng = crate::generate::rng(991);
        for _ in 0..25 {
            let g = crate::generate::random_connected_multigraph(&mut rng, 8, 1);
            let ids: Vec<VertexId> = g.vertices().cloned().collect();
            let a = vset(&[ids[0].as_str(), ids[1].as_str()]);
            let b = vset(&[ids[ids.len() - 2].as_str(), ids[ids.len() - 1].as_str()]);
            if a.intersection(&b).next().is_some() {
                continue;
            }
            let flow_says = matches!(
                vertex_disjoint_paths(&g, &a, &b, 2).unwrap(),
                VertexLinkage::Paths(_)
            );
            let brute = brute_force_two_disjoint_paths(&g, &a, &b);
            assert_eq!(flow_says, brute);
        }
    }

    /// Exhaustive check for two fully vertex-disjoint A–B paths.
    fn brute_force_two_disjoint_paths(g: &Multigraph, a: &VertexSet, b: &VertexSet) -> bool {
        let paths = all_simple_paths(g, a, b);
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                let pv: VertexSet = p.iter().cloned().collect();
                if q.iter().all(|v| !pv.contains(v)) {
                    return true;
                }
            }
        }
        false
    }

    fn all_simple_paths(g: &Multigraph, a: &VertexSet, b: &VertexSet) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        for start in a {
            let mut stack = vec![vec![start.clone()]];
            while let Some(path) = stack.pop() {
                let last = path.last().unwrap().clone();
                if b.contains(&last) {
                    out.push(path);
                    continue;
                }
                for (u, _) in g.neighbours(&last) {
                    if !path.contains(u) && !a.contains(u) {
                        let mut next = path.clone();
                        next.push(u.clone());
                        stack.push(next);
                    }
                }
            }
        }
        out
    }
}

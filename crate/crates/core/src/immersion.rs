//! Exact strong/weak immersion testing plus the constructive spider and
//! apex-path embeddings.
//!
//! The search enumerates injective branch maps interleaved with exhaustive
//! edge-disjoint path routing, so "absent" answers are definitive. Because
//! the search is exponential, results are three-valued: a query over the
//! size caps or out of budget is inconclusive, never silently wrong.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::flow::{edge_disjoint_paths, edge_disjoint_paths_restricted, EdgeLinkage};
use crate::multigraph::{ordered_pair, Multigraph, Path, VertexId, VertexSet};
use crate::treecut::{adhesion, NodeId, TreeCutDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strong,
    Weak,
}

/// A witness embedding: injective branch map plus one host path per edge
/// unit of the pattern, pairwise edge-disjoint. In strong mode no path may
/// pass through a branch vertex internally.
#[derive(Clone, Debug)]
pub struct ImmersionEmbedding {
    pub mode: Mode,
    pub branch: BTreeMap<VertexId, VertexId>,
    pub paths: BTreeMap<(VertexId, VertexId), Vec<Path>>,
}

/// Independent validity checker for embeddings. Everything any search or
/// construction returns is passed through here.
pub fn validate_embedding(
    pattern: &Multigraph,
    host: &Multigraph,
    emb: &ImmersionEmbedding,
) -> Result<()> {
    // branch map: total and injective
    if emb.branch.len() != pattern.vertex_count() {
        return Err(Error::InvalidInput("branch map is not total".into()));
    }
    let mut images = BTreeSet::new();
    for (u, img) in &emb.branch {
        if !pattern.has_vertex(u) {
            return Err(Error::UnknownVertex(u.clone()));
        }
        if !host.has_vertex(img) {
            return Err(Error::UnknownVertex(img.clone()));
        }
        if !images.insert(img.clone()) {
            return Err(Error::InvalidInput(format!(
                "branch map repeats host vertex {img}"
            )));
        }
    }
    // one path per edge unit, endpoints matching
    let mut expected: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for (u, v, m) in pattern.edges() {
        expected.insert((u.clone(), v.clone()), m);
    }
    if emb
        .paths
        .keys()
        .any(|pair| !expected.contains_key(pair))
        || expected
            .iter()
            .any(|(pair, m)| emb.paths.get(pair).map_or(0, |ps| ps.len()) != *m)
    {
        return Err(Error::InvalidInput(
            "path system does not match the pattern's edge multiplicities".into(),
        ));
    }
    let mut all_paths = Vec::new();
    for ((u, v), paths) in &emb.paths {
        let (bu, bv) = (&emb.branch[u], &emb.branch[v]);
        for p in paths {
            Path::new(p.vertices().to_vec(), host)?;
            let ok = (p.first() == bu && p.last() == bv) || (p.first() == bv && p.last() == bu);
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "path for {u}-{v} does not join the branch images"
                )));
            }
            if emb.mode == Mode::Strong {
                if let Some(x) = p.interior().iter().find(|x| images.contains(*x)) {
                    return Err(Error::InvalidInput(format!(
                        "strong mode: branch vertex {x} is interior to a path"
                    )));
                }
            }
            all_paths.push(p.clone());
        }
    }
    crate::multigraph::validate_edge_budget(host, &all_paths)
}

/// Caps and budget for the exact search.
#[derive(Clone, Debug)]
pub struct SearchLimits {
    pub max_pattern: usize,
    pub max_host: usize,
    /// Decremented on every assignment attempt and path-extension step.
    pub node_budget: u64,
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_pattern: 10,
            max_host: 40,
            node_budget: 50_000_000,
            deadline: None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Present(ImmersionEmbedding),
    Absent,
    Inconclusive(String),
}

/// Exact search for an immersion of `pattern` in `host`. "Absent" is
/// returned only after exhausting the full branch-assignment and routing
/// space; cap or budget overruns are reported as inconclusive.
pub fn find_immersion(
    pattern: &Multigraph,
    host: &Multigraph,
    mode: Mode,
    limits: &SearchLimits,
) -> Result<Outcome> {
    if pattern.vertex_count() > limits.max_pattern {
        return Ok(Outcome::Inconclusive(format!(
            "pattern has {} vertices, cap is {}",
            pattern.vertex_count(),
            limits.max_pattern
        )));
    }
    if host.vertex_count() > limits.max_host {
        return Ok(Outcome::Inconclusive(format!(
            "host has {} vertices, cap is {}",
            host.vertex_count(),
            limits.max_host
        )));
    }
    if pattern.vertex_count() == 0 {
        return Ok(Outcome::Present(ImmersionEmbedding {
            mode,
            branch: BTreeMap::new(),
            paths: BTreeMap::new(),
        }));
    }
    // a connected pattern without bridges embeds entirely inside a single
    // 2-edge-connected piece of the host: its image is a connected
    // bridgeless subgraph, and no path can leave such a piece and return
    let decompose = pattern.vertex_count() >= 2
        && pattern.is_connected()
        && pattern.bridges().is_empty();
    let mut budget = limits.node_budget;
    if decompose {
        let mut saw_inconclusive = None;
        for comp in host.two_edge_connected_components() {
            if comp.len() < pattern.vertex_count() {
                continue;
            }
            let sub = host.induced(&comp)?;
            match search_component(pattern, &sub, mode, limits, &mut budget)? {
                Outcome::Present(emb) => {
                    validate_embedding(pattern, host, &emb)?;
                    return Ok(Outcome::Present(emb));
                }
                Outcome::Absent => {}
                Outcome::Inconclusive(why) => saw_inconclusive = Some(why),
            }
        }
        return Ok(match saw_inconclusive {
            Some(why) => Outcome::Inconclusive(why),
            None => Outcome::Absent,
        });
    }
    let out = search_component(pattern, host, mode, limits, &mut budget)?;
    if let Outcome::Present(emb) = &out {
        validate_embedding(pattern, host, emb)?;
    }
    Ok(out)
}

/// Search state shared across the recursion.
struct Search<'a> {
    pattern: &'a Multigraph,
    host: &'a Multigraph,
    mode: Mode,
    /// pattern vertices in assignment order
    order: Vec<VertexId>,
    /// per assignment step, the edge slots to route once that vertex lands:
    /// (earlier vertex, this vertex) repeated per multiplicity
    slots_at: Vec<Vec<(VertexId, VertexId)>>,
    branch: BTreeMap<VertexId, VertexId>,
    images: BTreeSet<VertexId>,
    used: BTreeMap<(VertexId, VertexId), usize>,
    routed: BTreeMap<(VertexId, VertexId), Vec<Path>>,
    interior_load: BTreeMap<VertexId, usize>,
    budget: u64,
    deadline: Option<Instant>,
    exhausted: bool,
}

fn search_component(
    pattern: &Multigraph,
    host: &Multigraph,
    mode: Mode,
    limits: &SearchLimits,
    budget: &mut u64,
) -> Result<Outcome> {
    // necessary conditions: enough edges, dominating degree sequence
    if pattern.size() > host.size() {
        return Ok(Outcome::Absent);
    }
    let mut pat_degrees: Vec<usize> = pattern
        .vertices()
        .map(|v| pattern.degree(v).unwrap())
        .collect();
    let mut host_degrees: Vec<usize> =
        host.vertices().map(|v| host.degree(v).unwrap()).collect();
    pat_degrees.sort_unstable_by(|a, b| b.cmp(a));
    host_degrees.sort_unstable_by(|a, b| b.cmp(a));
    if pat_degrees.len() > host_degrees.len()
        || pat_degrees
            .iter()
            .zip(host_degrees.iter())
            .any(|(p, h)| p > h)
    {
        return Ok(Outcome::Absent);
    }
    // assignment order: highest degree first, then most-attached to the
    // already ordered prefix, ties by id
    let mut order: Vec<VertexId> = Vec::new();
    let mut remaining: Vec<VertexId> = pattern.vertices().cloned().collect();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                let attach = |v: &VertexId| {
                    order
                        .iter()
                        .map(|u| pattern.multiplicity(u, v))
                        .sum::<usize>()
                };
                (attach(a), pattern.degree(a).unwrap(), std::cmp::Reverse((*a).clone()))
                    .cmp(&(attach(b), pattern.degree(b).unwrap(), std::cmp::Reverse((*b).clone())))
            })
            .map(|(i, _)| i)
            .unwrap();
        order.push(remaining.swap_remove(pick));
    }
    let slots_at: Vec<Vec<(VertexId, VertexId)>> = (0..order.len())
        .map(|i| {
            let mut slots = Vec::new();
            for earlier in &order[..i] {
                let m = pattern.multiplicity(earlier, &order[i]);
                for _ in 0..m {
                    slots.push((earlier.clone(), order[i].clone()));
                }
            }
            slots
        })
        .collect();
    let mut search = Search {
        pattern,
        host,
        mode,
        order,
        slots_at,
        branch: BTreeMap::new(),
        images: BTreeSet::new(),
        used: BTreeMap::new(),
        routed: BTreeMap::new(),
        interior_load: BTreeMap::new(),
        budget: *budget,
        deadline: limits.deadline,
        exhausted: false,
    };
    let found = search.assign(0)?;
    *budget = search.budget;
    Ok(if let Some(emb) = found {
        Outcome::Present(emb)
    } else if search.exhausted {
        Outcome::Inconclusive("search budget exhausted".into())
    } else {
        Outcome::Absent
    })
}

impl<'a> Search<'a> {
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            self.exhausted = true;
            return false;
        }
        self.budget -= 1;
        if self.budget % 65536 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.exhausted = true;
                    self.budget = 0;
                    return false;
                }
            }
        }
        true
    }

    fn assign(&mut self, idx: usize) -> Result<Option<ImmersionEmbedding>> {
        if idx == self.order.len() {
            return Ok(Some(ImmersionEmbedding {
                mode: self.mode,
                branch: self.branch.clone(),
                paths: self.routed.clone(),
            }));
        }
        let hv = self.order[idx].clone();
        let need = self.pattern.degree(&hv).unwrap();
        // candidates: unused, enough degree, and in strong mode not
        // interior to an already routed path
        let mut candidates: Vec<VertexId> = self
            .host
            .vertices()
            .filter(|g| {
                !self.images.contains(*g)
                    && self.host.degree(g).unwrap() >= need
                    && (self.mode == Mode::Weak
                        || self.interior_load.get(*g).copied().unwrap_or(0) == 0)
            })
            .cloned()
            .collect();
        candidates.sort_by(|a, b| {
            self.host
                .degree(b)
                .unwrap()
                .cmp(&self.host.degree(a).unwrap())
                .then(a.cmp(b))
        });
        for cand in candidates {
            if !self.spend() {
                return Ok(None);
            }
            self.branch.insert(hv.clone(), cand.clone());
            self.images.insert(cand.clone());
            let found = self.route(idx, 0)?;
            if found.is_some() {
                return Ok(found);
            }
            self.branch.remove(&hv);
            self.images.remove(&cand);
            if self.exhausted {
                return Ok(None);
            }
        }
        Ok(None)
    }

    fn route(&mut self, idx: usize, slot: usize) -> Result<Option<ImmersionEmbedding>> {
        if slot == self.slots_at[idx].len() {
            return self.assign(idx + 1);
        }
        let (pu, pv) = self.slots_at[idx][slot].clone();
        let from = self.branch[&pu].clone();
        let to = self.branch[&pv].clone();
        let mut paths = Vec::new();
        self.enumerate_paths(&from, &to, &mut paths);
        // shortest first, then lexicographic, for reproducible witnesses
        paths.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.cmp(b))
        });
        for path in paths {
            if self.exhausted {
                return Ok(None);
            }
            self.apply_path(&pu, &pv, &path, 1);
            let found = self.route(idx, slot + 1)?;
            if found.is_some() {
                return Ok(found);
            }
            self.apply_path(&pu, &pv, &path, -1);
        }
        Ok(None)
    }

    fn apply_path(&mut self, pu: &VertexId, pv: &VertexId, path: &[VertexId], dir: isize) {
        for w in path.windows(2) {
            let pair = ordered_pair(w[0].clone(), w[1].clone());
            let slot = self.used.entry(pair).or_insert(0);
            *slot = (*slot as isize + dir) as usize;
        }
        for x in &path[1..path.len() - 1] {
            let slot = self.interior_load.entry(x.clone()).or_insert(0);
            *slot = (*slot as isize + dir) as usize;
        }
        let key = ordered_pair(pu.clone(), pv.clone());
        if dir > 0 {
            self.routed
                .entry(key)
                .or_default()
                .push(Path::new(path.to_vec(), self.host).unwrap());
        } else {
            let list = self.routed.get_mut(&key).unwrap();
            list.pop();
            if list.is_empty() {
                self.routed.remove(&key);
            }
        }
    }

    /// All simple paths from `from` to `to` respecting residual edge
    /// capacities and, in strong mode, avoiding branch images internally.
    fn enumerate_paths(&mut self, from: &VertexId, to: &VertexId, out: &mut Vec<Vec<VertexId>>) {
        let mut current = vec![from.clone()];
        let mut on_path: BTreeSet<VertexId> = BTreeSet::from([from.clone()]);
        self.extend_path(to, &mut current, &mut on_path, out);
    }

    fn extend_path(
        &mut self,
        to: &VertexId,
        current: &mut Vec<VertexId>,
        on_path: &mut BTreeSet<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if !self.spend() {
            return;
        }
        let last = current.last().unwrap().clone();
        if last == *to {
            out.push(current.clone());
            return;
        }
        let nbrs: Vec<VertexId> = self
            .host
            .neighbours(&last)
            .filter(|(u, m)| {
                let pair = ordered_pair(last.clone(), (*u).clone());
                let used = self.used.get(&pair).copied().unwrap_or(0);
                used < *m && !on_path.contains(*u)
            })
            .map(|(u, _)| u.clone())
            .collect();
        for u in nbrs {
            // in strong mode internal vertices must avoid branch images;
            // the target itself is a branch image and always allowed
            if self.mode == Mode::Strong && u != *to && self.images.contains(&u) {
                continue;
            }
            current.push(u.clone());
            on_path.insert(u.clone());
            self.extend_path(to, current, on_path, out);
            on_path.remove(&u);
            current.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// The hub-and-legs multigraph: a hub joined to each of `n` vertices by
/// `k` parallel edges.
#[derive(Clone, Debug)]
pub struct SpiderGraph {
    pub k: usize,
    pub n: usize,
    pub graph: Multigraph,
    pub hub: VertexId,
    pub legs: Vec<VertexId>,
}

pub fn spider(k: usize, n: usize) -> Result<SpiderGraph> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput("spider needs k, n >= 1".into()));
    }
    let hub = VertexId::new("x");
    let legs: Vec<VertexId> = (1..=n).map(|i| VertexId::new(format!("v{i:03}"))).collect();
    let graph = Multigraph::build(
        std::iter::once(hub.clone()).chain(legs.iter().cloned()),
        legs.iter().map(|l| (hub.clone(), l.clone(), k)),
    )?;
    Ok(SpiderGraph { k, n, graph, hub, legs })
}

/// Greedy strong embedding of any graph with at most `n` vertices and
/// maximum degree at most `k` into the `(k, n)` spider: vertices go to the
/// legs, each edge unit becomes a two-step path through the hub on fresh
/// parallel edges.
pub fn embed_in_spider(
    h: &Multigraph,
    k: usize,
    n: usize,
) -> Result<(SpiderGraph, ImmersionEmbedding)> {
    if h.vertex_count() > n {
        return Err(Error::InvalidInput(format!(
            "pattern has {} vertices, spider has {n} legs",
            h.vertex_count()
        )));
    }
    if h.max_degree() > k {
        return Err(Error::InvalidInput(format!(
            "pattern has maximum degree {}, spider provides {k}",
            h.max_degree()
        )));
    }
    let s = spider(k, n)?;
    let branch: BTreeMap<VertexId, VertexId> = h
        .vertices()
        .enumerate()
        .map(|(i, v)| (v.clone(), s.legs[i].clone()))
        .collect();
    let mut paths: BTreeMap<(VertexId, VertexId), Vec<Path>> = BTreeMap::new();
    for (u, v, m) in h.edges() {
        let route = vec![branch[u].clone(), s.hub.clone(), branch[v].clone()];
        let copies: Vec<Path> = (0..m)
            .map(|_| Path::new(route.clone(), &s.graph).unwrap())
            .collect();
        paths.insert((u.clone(), v.clone()), copies);
    }
    let emb = ImmersionEmbedding {
        mode: Mode::Strong,
        branch,
        paths,
    };
    validate_embedding(h, &s.graph, &emb)?;
    Ok((s, emb))
}

/// A path of length `n` plus an apex adjacent to every path vertex.
#[derive(Clone, Debug)]
pub struct ApexPath {
    pub n: usize,
    pub graph: Multigraph,
    pub apex: VertexId,
    pub path: Vec<VertexId>,
}

pub fn apex_path(n: usize) -> Result<ApexPath> {
    let apex = VertexId::new("apex");
    let path: Vec<VertexId> = (0..=n).map(|i| VertexId::new(format!("p{i:03}"))).collect();
    let graph = Multigraph::build(
        std::iter::once(apex.clone()).chain(path.iter().cloned()),
        path.windows(2)
            .map(|w| (w[0].clone(), w[1].clone(), 1))
            .chain(path.iter().map(|p| (apex.clone(), p.clone(), 1))),
    )?;
    Ok(ApexPath { n, graph, apex, path })
}

/// An explicit subdivision of the `(3, k)` spider inside the apexed path of
/// length `3k - 1`: the centre plus, per leg, three internally disjoint
/// centre-to-leaf paths.
#[derive(Clone, Debug)]
pub struct SubdivisionWitness {
    pub host: ApexPath,
    pub centre: VertexId,
    pub legs: Vec<(VertexId, [Path; 3])>,
}

/// Builds and verifies the subdivision witness: dropping every third path
/// edge splits the path into `k` three-vertex segments, each giving three
/// fan routes from the apex to the segment's middle vertex.
pub fn apex_to_spider_subdivision(k: usize) -> Result<SubdivisionWitness> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let host = apex_path(3 * k - 1)?;
    let g = &host.graph;
    let centre = host.apex.clone();
    let mut legs = Vec::new();
    for i in 0..k {
        let (a, b, c) = (
            host.path[3 * i].clone(),
            host.path[3 * i + 1].clone(),
            host.path[3 * i + 2].clone(),
        );
        let direct = Path::new(vec![centre.clone(), b.clone()], g)?;
        let left = Path::new(vec![centre.clone(), a, b.clone()], g)?;
        let right = Path::new(vec![centre.clone(), c, b.clone()], g)?;
        legs.push((b, [direct, left, right]));
    }
    let witness = SubdivisionWitness {
        host,
        centre,
        legs,
    };
    validate_subdivision(&witness)?;
    Ok(witness)
}

/// Structural checker: a subdivision is a subgraph, so all paths must be
/// pairwise edge-distinct and share vertices only at the centre (and, for
/// the three routes of one leg, the leaf).
pub fn validate_subdivision(w: &SubdivisionWitness) -> Result<()> {
    let g = &w.host.graph;
    let mut seen_edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut interior_owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut leaves = BTreeSet::new();
    for (leg_index, (leaf, routes)) in w.legs.iter().enumerate() {
        if !leaves.insert(leaf.clone()) {
            return Err(Error::InvalidInput("duplicate leaf".into()));
        }
        for p in routes {
            Path::new(p.vertices().to_vec(), g)?;
            if p.first() != &w.centre || p.last() != leaf {
                return Err(Error::InvalidInput(
                    "route does not join centre and leaf".into(),
                ));
            }
            for pair in p.edge_pairs() {
                if !seen_edges.insert(pair) {
                    return Err(Error::InvalidInput("subdivision reuses an edge".into()));
                }
            }
            for x in p.interior() {
                if x == &w.centre {
                    return Err(Error::InvalidInput("centre interior to a route".into()));
                }
                if let Some(owner) = interior_owner.insert(x.clone(), leg_index) {
                    let _ = owner;
                    return Err(Error::InvalidInput(format!(
                        "subdivision vertex {x} shared between routes"
                    )));
                }
            }
        }
    }
    // interior vertices must not collide with leaves either
    for leaf in &leaves {
        if interior_owner.contains_key(leaf) {
            return Err(Error::InvalidInput(
                "leaf appears inside another route".into(),
            ));
        }
    }
    Ok(())
}

impl SubdivisionWitness {
    /// The same witness as a strong immersion of the `(3, k)` spider.
    pub fn to_embedding(&self) -> Result<(SpiderGraph, ImmersionEmbedding)> {
        let k = 3;
        let s = spider(k, self.legs.len())?;
        let mut branch = BTreeMap::from([(s.hub.clone(), self.centre.clone())]);
        let mut paths = BTreeMap::new();
        for (i, (leaf, routes)) in self.legs.iter().enumerate() {
            branch.insert(s.legs[i].clone(), leaf.clone());
            paths.insert(
                (s.hub.clone().min(s.legs[i].clone()), s.hub.clone().max(s.legs[i].clone())),
                routes.to_vec(),
            );
        }
        let emb = ImmersionEmbedding {
            mode: Mode::Strong,
            branch,
            paths,
        };
        validate_embedding(&s.graph, &self.host.graph, &emb)?;
        Ok((s, emb))
    }
}

/// Composes two embeddings: a pattern in a middle graph and the middle
/// graph in a host. Middle edge units are consumed slot by slot; arising
/// walks are shortcut to simple paths. The composition of strong
/// embeddings is strong, which the final validation re-checks.
pub fn compose_embeddings(
    pattern: &Multigraph,
    middle: &Multigraph,
    inner: &ImmersionEmbedding,
    host: &Multigraph,
    outer: &ImmersionEmbedding,
) -> Result<ImmersionEmbedding> {
    validate_embedding(pattern, middle, inner)?;
    validate_embedding(middle, host, outer)?;
    let branch: BTreeMap<VertexId, VertexId> = inner
        .branch
        .iter()
        .map(|(u, m)| (u.clone(), outer.branch[m].clone()))
        .collect();
    let mut slot_cursor: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    let mut paths: BTreeMap<(VertexId, VertexId), Vec<Path>> = BTreeMap::new();
    for (pair, inner_paths) in &inner.paths {
        let mut out_paths = Vec::new();
        for ip in inner_paths {
            // walk through the host, expanding each middle edge step
            let mut walk: Vec<VertexId> = vec![outer.branch[ip.first()].clone()];
            for step in ip.vertices().windows(2) {
                let key = ordered_pair(step[0].clone(), step[1].clone());
                let cursor = slot_cursor.entry(key.clone()).or_insert(0);
                let host_path = &outer.paths[&key][*cursor];
                *cursor += 1;
                let from_img = &outer.branch[&step[0]];
                let mut segment: Vec<VertexId> = host_path.vertices().to_vec();
                if segment.first() != Some(from_img) {
                    segment.reverse();
                }
                walk.extend(segment.into_iter().skip(1));
            }
            out_paths.push(shortcut_walk(walk, host)?);
        }
        paths.insert(pair.clone(), out_paths);
    }
    let emb = ImmersionEmbedding {
        mode: inner.mode,
        branch,
        paths,
    };
    validate_embedding(pattern, host, &emb)?;
    Ok(emb)
}

/// Drops loops from a walk, producing a simple path on the same endpoints.
fn shortcut_walk(walk: Vec<VertexId>, host: &Multigraph) -> Result<Path> {
    let mut position: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut out: Vec<VertexId> = Vec::new();
    for v in walk {
        if let Some(&at) = position.get(&v) {
            for dropped in out.drain(at + 1..) {
                position.remove(&dropped);
            }
        } else {
            position.insert(v.clone(), out.len());
            out.push(v);
        }
    }
    Path::new(out, host)
}

/// Per-pair report of the terminal linkage property: for sampled (or, for
/// small sets, all) disjoint equal-size subsets of the terminals there are
/// that many edge-disjoint paths collectively meeting each vertex of the
/// protected set at most once.
#[derive(Clone, Debug)]
pub enum StarPropertyOutcome {
    Holds {
        pairs_checked: usize,
        exhaustive: bool,
    },
    Fails {
        a: VertexSet,
        b: VertexSet,
    },
}

pub fn verify_property_star(
    g: &Multigraph,
    terminals: &VertexSet,
    protected: &VertexSet,
    samples: usize,
    seed: u64,
) -> Result<StarPropertyOutcome> {
    if !terminals.is_subset(protected) {
        return Err(Error::InvalidInput(
            "terminals must lie inside the protected set".into(),
        ));
    }
    for v in protected {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    let members: Vec<VertexId> = terminals.iter().cloned().collect();
    let mut pairs_checked = 0usize;
    let mut check = |a: VertexSet, b: VertexSet| -> Result<Option<StarPropertyOutcome>> {
        let k = a.len();
        match edge_disjoint_paths_restricted(g, &a, &b, protected, k)? {
            EdgeLinkage::Paths(paths) => {
                debug_assert_eq!(paths.len(), k);
                let mut met: BTreeMap<&VertexId, usize> = BTreeMap::new();
                for p in &paths {
                    for v in p.vertices() {
                        if protected.contains(v) {
                            *met.entry(v).or_insert(0) += 1;
                        }
                    }
                }
                if met.values().any(|&c| c > 1) {
                    return Err(Error::ConstructionDefect(
                        "restricted routing met a protected vertex twice".into(),
                    ));
                }
                pairs_checked += 1;
                Ok(None)
            }
            EdgeLinkage::Blocked(_) => Ok(Some(StarPropertyOutcome::Fails { a, b })),
        }
    };
    if members.len() <= 6 {
        let n = members.len();
        let mut assignment = vec![0u8; n];
        'outer: loop {
            let a: VertexSet = (0..n)
                .filter(|&i| assignment[i] == 1)
                .map(|i| members[i].clone())
                .collect();
            let b: VertexSet = (0..n)
                .filter(|&i| assignment[i] == 2)
                .map(|i| members[i].clone())
                .collect();
            if !a.is_empty() && a.len() == b.len() && a.iter().next() < b.iter().next() {
                if let Some(failure) = check(a, b)? {
                    return Ok(failure);
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    break 'outer;
                }
                assignment[i] += 1;
                if assignment[i] == 3 {
                    assignment[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
        Ok(StarPropertyOutcome::Holds {
            pairs_checked,
            exhaustive: true,
        })
    } else {
        let mut rng = crate::generate::rng(seed);
        for _ in 0..samples {
            let k = rng.gen_range(1..=members.len() / 2);
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            let a: VertexSet = shuffled[..k].iter().cloned().collect();
            let b: VertexSet = shuffled[k..2 * k].iter().cloned().collect();
            if let Some(failure) = check(a, b)? {
                return Ok(failure);
            }
        }
        Ok(StarPropertyOutcome::Holds {
            pairs_checked,
            exhaustive: false,
        })
    }
}

/// Orientation of the decomposition tree toward terminal weight: each edge
/// points at the side holding at least `alpha + 1` terminals. Under the
/// checked hypotheses exactly one side qualifies per edge, every node has
/// at most one outgoing edge, and a unique sink exists.
#[derive(Clone, Debug)]
pub struct Orientation {
    /// tree edge (sorted) -> the endpoint it points at
    pub toward: BTreeMap<(NodeId, NodeId), NodeId>,
    pub sink: NodeId,
}

pub fn orient_by_terminals(
    g: &Multigraph,
    d: &TreeCutDecomposition,
    terminals: &VertexSet,
    alpha: usize,
) -> Result<Orientation> {
    for v in terminals {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    if terminals.len() < 2 * (alpha + 1) {
        return Err(Error::InvalidInput(format!(
            "need at least {} terminals, got {}",
            2 * (alpha + 1),
            terminals.len()
        )));
    }
    let report = adhesion(g, d)?;
    if report.max > alpha {
        return Err(Error::InvalidInput(format!(
            "adhesion {} exceeds {alpha}",
            report.max
        )));
    }
    // every terminal pair must be joined by three edge-disjoint paths
    let members: Vec<VertexId> = terminals.iter().cloned().collect();
    for (i, u) in members.iter().enumerate() {
        for v in &members[i + 1..] {
            let a = VertexSet::from([u.clone()]);
            let b = VertexSet::from([v.clone()]);
            if let EdgeLinkage::Blocked(cut) = edge_disjoint_paths(g, &a, &b, 3)? {
                return Err(Error::InvalidInput(format!(
                    "terminals {u}, {v} only joined through a cut of size {}",
                    cut.size
                )));
            }
        }
    }
    let mut toward = BTreeMap::new();
    let mut out_degree: BTreeMap<&NodeId, usize> = BTreeMap::new();
    for (a, b) in &d.tree {
        let (side_a, side_b) = d.edge_sides(a, b);
        let count = |side: &BTreeSet<NodeId>| {
            d.vertex_union(side)
                .intersection(terminals)
                .count()
        };
        let (ca, cb) = (count(&side_a), count(&side_b));
        let heavy_a = ca >= alpha + 1;
        let heavy_b = cb >= alpha + 1;
        match (heavy_a, heavy_b) {
            (true, false) => {
                toward.insert((a.clone(), b.clone()), a.clone());
                *out_degree.entry(b).or_insert(0) += 1;
            }
            (false, true) => {
                toward.insert((a.clone(), b.clone()), b.clone());
                *out_degree.entry(a).or_insert(0) += 1;
            }
            (true, true) => {
                return Err(Error::InvalidInput(format!(
                    "edge {a}-{b} has {ca} and {cb} terminals on its sides; \
                     both exceed {alpha}"
                )))
            }
            (false, false) => {
                return Err(Error::InvalidInput(format!(
                    "edge {a}-{b} has {ca} and {cb} terminals on its sides; \
                     neither exceeds {alpha}"
                )))
            }
        }
    }
    if let Some((t, deg)) = out_degree.iter().find(|(_, &deg)| deg > 1) {
        return Err(Error::ConstructionDefect(format!(
            "node {t} has {deg} outgoing edges"
        )));
    }
    let sinks: Vec<NodeId> = d
        .parts
        .keys()
        .filter(|t| out_degree.get(*t).copied().unwrap_or(0) == 0)
        .cloned()
        .collect();
    match sinks.as_slice() {
        [sink] => Ok(Orientation {
            toward,
            sink: sink.clone(),
        }),
        _ => Err(Error::ConstructionDefect(format!(
            "{} sinks found",
            sinks.len()
        ))),
    }
}

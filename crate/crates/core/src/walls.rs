//! Walls: construction, canonical path systems, and well-linkedness
//! certificates.
//!
//! The wall of size `ell` lives on the `ell x 2*ell` grid with alternating
//! vertical edges removed and the two arising degree-1 corners deleted. The
//! two corners are found by a degree scan rather than hard-coded, so the
//! construction is robust to the parity of the deletion pattern.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::flow::{internally_disjoint_paths, vertex_disjoint_paths, VertexLinkage};
use crate::multigraph::{Multigraph, Path, VertexId, VertexSet};

/// Grid coordinate of a wall vertex: `(column, row)`, both 1-based. Columns
/// run to `2*ell`, rows to `ell`.
pub type Coord = (u32, u32);

pub fn wall_vertex_id(col: u32, row: u32) -> VertexId {
    VertexId::new(format!("c{col:02}r{row:02}"))
}

/// Parses a vertex id of the form produced by [`wall_vertex_id`].
pub fn parse_wall_vertex(id: &VertexId) -> Option<Coord> {
    let s = id.as_str();
    let rest = s.strip_prefix('c')?;
    let (col, row) = rest.split_once('r')?;
    Some((col.parse().ok()?, row.parse().ok()?))
}

/// A wall together with its coordinate labelling.
#[derive(Clone, Debug)]
pub struct Wall {
    pub ell: u32,
    pub graph: Multigraph,
    pub coords: BTreeMap<VertexId, Coord>,
}

/// The canonical vertical and horizontal path families of a wall.
#[derive(Clone, Debug)]
pub struct WallPathSystem {
    pub vertical: Vec<Path>,
    pub horizontal: Vec<Path>,
}

/// The canonical well-linked vertex set of a wall: the degree-3 vertices of
/// the last row. It has exactly `ell - 2` members.
#[derive(Clone, Debug)]
pub struct WellLinkedSet {
    pub z: VertexSet,
}

/// Builds the wall of size `ell`. The result has `2*ell^2 - 2` vertices,
/// maximum degree 3 and no parallel edges; `ell = 1` degenerates to the
/// empty graph.
pub fn build_wall(ell: u32) -> Result<Wall> {
    if ell < 1 {
        return Err(Error::InvalidInput("wall size must be at least 1".into()));
    }
    let cols = 2 * ell;
    let rows = ell;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for c in 1..=cols {
        for r in 1..=rows {
            vertices.push(wall_vertex_id(c, r));
        }
    }
    for r in 1..=rows {
        for c in 1..cols {
            edges.push((wall_vertex_id(c, r), wall_vertex_id(c + 1, r), 1));
        }
    }
    // alternating vertical edges: keep the rung at column c between rows
    // r and r+1 exactly when c and r have the same parity
    for r in 1..rows {
        for c in 1..=cols {
            if c % 2 == r % 2 {
                edges.push((wall_vertex_id(c, r), wall_vertex_id(c, r + 1), 1));
            }
        }
    }
    let mut graph = Multigraph::build(vertices, edges)?;
    // the deletion pattern leaves exactly two degree-1 corners; drop them
    loop {
        let degree_one: Vec<VertexId> = graph
            .vertices()
            .filter(|v| graph.degree(v).unwrap() <= 1)
            .cloned()
            .collect();
        if degree_one.is_empty() {
            break;
        }
        for v in &degree_one {
            graph = graph.without_vertex(v)?;
        }
    }
    let expected = (2 * ell * ell).saturating_sub(2) as usize;
    if graph.vertex_count() != expected {
        return Err(Error::ConstructionDefect(format!(
            "wall of size {ell} has {} vertices, expected {expected}",
            graph.vertex_count()
        )));
    }
    let coords = graph
        .vertices()
        .map(|v| (v.clone(), parse_wall_vertex(v).unwrap()))
        .collect();
    Ok(Wall { ell, graph, coords })
}

/// Reconstructs a [`Wall`] from a graph whose vertices carry wall
/// coordinates, checking the counts.
pub fn wall_from_graph(graph: Multigraph) -> Result<Wall> {
    let mut coords = BTreeMap::new();
    let mut max_row = 0;
    for v in graph.vertices() {
        let c = parse_wall_vertex(v).ok_or_else(|| {
            Error::InvalidInput(format!("vertex {v} does not carry wall coordinates"))
        })?;
        max_row = max_row.max(c.1);
        coords.insert(v.clone(), c);
    }
    let ell = max_row;
    let expected = (2 * ell * ell).saturating_sub(2) as usize;
    if graph.vertex_count() != expected {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices, a wall of size {ell} has {expected}",
            graph.vertex_count()
        )));
    }
    Ok(Wall { ell, graph, coords })
}

fn induced_path(w: &Wall, members: Vec<VertexId>) -> Result<Path> {
    let set: VertexSet = members.iter().cloned().collect();
    let sub = w.graph.induced(&set)?;
    // walk from an endpoint; the induced subgraph must be a path
    let start = sub
        .vertices()
        .find(|v| sub.degree(v).unwrap() <= 1)
        .cloned()
        .ok_or_else(|| Error::ConstructionDefect("path family member is not a path".into()))?;
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
    if order.len() != set.len() {
        return Err(Error::ConstructionDefect(
            "path family member is not a path".into(),
        ));
    }
    Path::new(order, &w.graph)
}

/// The canonical path system: vertical path `j` is induced on columns
/// `2j-1` and `2j`, horizontal path `j` on row `j`.
pub fn path_system(w: &Wall) -> Result<WallPathSystem> {
    if w.ell < 2 {
        return Err(Error::WallTooSmall(w.ell, 2));
    }
    let mut vertical = Vec::new();
    for j in 1..=w.ell {
        let members: Vec<VertexId> = w
            .coords
            .iter()
            .filter(|(_, &(c, _))| c == 2 * j - 1 || c == 2 * j)
            .map(|(v, _)| v.clone())
            .collect();
        vertical.push(induced_path(w, members)?);
    }
    let mut horizontal = Vec::new();
    for j in 1..=w.ell {
        let members: Vec<VertexId> = w
            .coords
            .iter()
            .filter(|(_, &(_, r))| r == j)
            .map(|(v, _)| v.clone())
            .collect();
        horizontal.push(induced_path(w, members)?);
    }
    Ok(WallPathSystem { vertical, horizontal })
}

/// The canonical well-linked set: all degree-3 vertices of the last row.
pub fn well_linked_set(w: &Wall) -> Result<WellLinkedSet> {
    if w.ell < 3 {
        return Err(Error::WallTooSmall(w.ell, 3));
    }
    let z: VertexSet = w
        .coords
        .iter()
        .filter(|(v, &(_, r))| r == w.ell && w.graph.degree(v).unwrap() == 3)
        .map(|(v, _)| v.clone())
        .collect();
    if z.len() != (w.ell - 2) as usize {
        return Err(Error::ConstructionDefect(format!(
            "canonical set has {} members, expected {}",
            z.len(),
            w.ell - 2
        )));
    }
    Ok(WellLinkedSet { z })
}

/// How subset pairs are covered by [`certify_well_linked`].
#[derive(Clone, Copy, Debug)]
pub struct LinkageCheckConfig {
    /// Exhaustive enumeration is used while `|z|` is at most this.
    pub exhaustive_cap: usize,
    /// Number of sampled pairs beyond the cap.
    pub samples: usize,
    pub seed: u64,
}

impl Default for LinkageCheckConfig {
    fn default() -> Self {
        LinkageCheckConfig {
            exhaustive_cap: 8,
            samples: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum WellLinkedOutcome {
    Certified {
        pairs_checked: usize,
        exhaustive: bool,
    },
    Violated {
        a: VertexSet,
        b: VertexSet,
        separator: VertexSet,
    },
}

/// Checks that every two disjoint equal-size subsets of `z` are joined by
/// that many vertex-disjoint paths. Each found path system is validated
/// before it is counted. Beyond the exhaustive cap, pairs are sampled.
pub fn certify_well_linked(
    g: &Multigraph,
    z: &VertexSet,
    config: &LinkageCheckConfig,
) -> Result<WellLinkedOutcome> {
    for v in z {
        if !g.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    let members: Vec<VertexId> = z.iter().cloned().collect();
    let mut pairs_checked = 0usize;
    let mut check = |a: VertexSet, b: VertexSet| -> Result<Option<WellLinkedOutcome>> {
        let k = a.len();
        match vertex_disjoint_paths(g, &a, &b, k)? {
            VertexLinkage::Paths(paths) => {
                debug_assert_eq!(paths.len(), k);
                validate_disjoint_system(&paths, &a, &b)?;
                pairs_checked += 1;
                Ok(None)
            }
            VertexLinkage::Blocked { separator, .. } => Ok(Some(WellLinkedOutcome::Violated {
                a,
                b,
                separator,
            })),
        }
    };
    if members.len() <= config.exhaustive_cap {
        // every assignment of members to A, B or neither; symmetric pairs
        // are dropped by requiring min(A) < min(B)
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
                if let Some(violation) = check(a, b)? {
                    return Ok(violation);
                }
            }
            // advance base-3 counter
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
        Ok(WellLinkedOutcome::Certified {
            pairs_checked,
            exhaustive: true,
        })
    } else {
        let mut rng = crate::generate::rng(config.seed);
        for _ in 0..config.samples {
            let k = rng.gen_range(1..=members.len() / 2);
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            let a: VertexSet = shuffled[..k].iter().cloned().collect();
            let b: VertexSet = shuffled[k..2 * k].iter().cloned().collect();
            if let Some(violation) = check(a, b)? {
                return Ok(violation);
            }
        }
        Ok(WellLinkedOutcome::Certified {
            pairs_checked,
            exhaustive: false,
        })
    }
}

fn validate_disjoint_system(paths: &[Path], a: &VertexSet, b: &VertexSet) -> Result<()> {
    let mut seen = VertexSet::new();
    for p in paths {
        let (first, last) = (p.first(), p.last());
        let fine = (a.contains(first) && b.contains(last))
            || (b.contains(first) && a.contains(last));
        if !fine {
            return Err(Error::ConstructionDefect(
                "path endpoints do not match terminal sets".into(),
            ));
        }
        for v in p.vertices() {
            if !seen.insert(v.clone()) {
                return Err(Error::ConstructionDefect(format!(
                    "vertex {v} shared between paths"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum ThreeConnectedOutcome {
    Certified {
        pairs_checked: usize,
    },
    Violated {
        u: VertexId,
        v: VertexId,
        separator: VertexSet,
        direct_edges: usize,
    },
}

/// Checks that each pair of `z` is joined by three internally
/// vertex-disjoint paths.
pub fn certify_three_connected_pairs(
    g: &Multigraph,
    z: &VertexSet,
) -> Result<ThreeConnectedOutcome> {
    let members: Vec<VertexId> = z.iter().cloned().collect();
    let mut pairs_checked = 0usize;
    for (i, u) in members.iter().enumerate() {
        for v in &members[i + 1..] {
            match internally_disjoint_paths(g, u, v, 3)? {
                VertexLinkage::Paths(paths) => {
                    debug_assert_eq!(paths.len(), 3);
                    let mut interior_seen = VertexSet::new();
                    for p in &paths {
                        for x in p.interior() {
                            if !interior_seen.insert(x.clone()) {
                                return Err(Error::ConstructionDefect(format!(
                                    "internal vertex {x} shared between paths"
                                )));
                            }
                        }
                    }
                    pairs_checked += 1;
                }
                VertexLinkage::Blocked {
                    separator,
                    direct_edges,
                } => {
                    return Ok(ThreeConnectedOutcome::Violated {
                        u: u.clone(),
                        v: v.clone(),
                        separator,
                        direct_edges,
                    })
                }
            }
        }
    }
    Ok(ThreeConnectedOutcome::Certified { pairs_checked })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_counts_match_closed_forms() {
        // independent counting: 2l-1 horizontal edges per row, l kept rungs
        // per row gap, minus the two corner edges lost with the corners
        for ell in 2..=8u32 {
            let w = build_wall(ell).unwrap();
            let n = (2 * ell * ell - 2) as usize;
            let e = (3 * ell * ell - 2 * ell - 2) as usize;
            assert_eq!(w.graph.vertex_count(), n, "vertices of wall {ell}");
            assert_eq!(w.graph.size(), e, "edges of wall {ell}");
            // the hexagon (size 2) is all degree 2; from size 3 on the
            // maximum degree is exactly 3
            assert!(w.graph.max_degree() <= 3);
            if ell >= 3 {
                assert_eq!(w.graph.max_degree(), 3);
            }
            assert!(w.graph.is_simple());
            assert!(w.graph.is_connected());
        }
    }

    #[test]
    fn degenerate_wall_is_empty() {
        let w = build_wall(1).unwrap();
        assert_eq!(w.graph.vertex_count(), 0);
    }

    #[test]
    fn wall3_degree_census() {
        // frozen from the construction scan; 2*l*(l-2) vertices of degree 3
        let w = build_wall(3).unwrap();
        assert_eq!(w.graph.vertex_count(), 16);
        let deg3 = w
            .graph
            .vertices()
            .filter(|v| w.graph.degree(v).unwrap() == 3)
            .count();
        assert_eq!(deg3, 6);
        assert_eq!(w.graph.vertex_count() - deg3, 10);
    }

    #[test]
    fn degree_three_count_closed_form() {
        for ell in 2..=8u32 {
            let w = build_wall(ell).unwrap();
            let deg3 = w
                .graph
                .vertices()
                .filter(|v| w.graph.degree(v).unwrap() == 3)
                .count();
            assert_eq!(deg3, (2 * ell * ell.saturating_sub(2)) as usize);
        }
    }

    #[test]
    fn path_system_families_are_disjoint_and_crossing() {
        for ell in 2..=5u32 {
            let w = build_wall(ell).unwrap();
            let ps = path_system(&w).unwrap();
            assert_eq!(ps.vertical.len(), ell as usize);
            assert_eq!(ps.horizontal.len(), ell as usize);
            let mut seen = VertexSet::new();
            for p in &ps.vertical {
                for v in p.vertices() {
                    assert!(seen.insert(v.clone()), "vertical paths overlap");
                }
            }
            let mut seen = VertexSet::new();
            for p in &ps.horizontal {
                for v in p.vertices() {
                    assert!(seen.insert(v.clone()), "horizontal paths overlap");
                }
            }
            for h in &ps.horizontal {
                for v in &ps.vertical {
                    let hv: VertexSet = h.vertices().iter().cloned().collect();
                    assert!(
                        v.vertices().iter().any(|x| hv.contains(x)),
                        "a horizontal path misses a vertical path"
                    );
                }
            }
        }
    }

    #[test]
    fn vertical_paths_meet_canonical_set_at_most_once() {
        for ell in 3..=6u32 {
            let w = build_wall(ell).unwrap();
            let z = well_linked_set(&w).unwrap().z;
            let ps = path_system(&w).unwrap();
            for p in &ps.vertical {
                let hits = p.vertices().iter().filter(|v| z.contains(*v)).count();
                assert!(hits <= 1);
            }
            for v in &z {
                assert!(ps.vertical.iter().any(|p| p.vertices().contains(v)));
            }
        }
    }

    #[test]
    fn crossing_unions_are_connected() {
        let w = build_wall(3).unwrap();
        let ps = path_system(&w).unwrap();
        for va in &ps.vertical {
            for h in &ps.horizontal {
                for vb in &ps.vertical {
                    let mut set: VertexSet = va.vertices().iter().cloned().collect();
                    set.extend(h.vertices().iter().cloned());
                    set.extend(vb.vertices().iter().cloned());
                    assert!(w.graph.induced(&set).unwrap().is_connected());
                }
            }
        }
    }

    #[test]
    fn canonical_set_sizes() {
        assert_eq!(well_linked_set(&build_wall(3).unwrap()).unwrap().z.len(), 1);
        assert_eq!(well_linked_set(&build_wall(5).unwrap()).unwrap().z.len(), 3);
        assert!(matches!(
            well_linked_set(&build_wall(2).unwrap()),
            Err(Error::WallTooSmall(2, 3))
        ));
    }

    #[test]
    fn wall4_canonical_coordinates() {
        // frozen from the construction scan
        let w = build_wall(4).unwrap();
        let z = well_linked_set(&w).unwrap().z;
        let coords: Vec<Coord> = z.iter().map(|v| w.coords[v]).collect();
        assert_eq!(coords, vec![(3, 4), (5, 4)]);
    }

    #[test]
    fn empty_set_vacuously_linked() {
        let w = build_wall(3).unwrap();
        let out = certify_well_linked(&w.graph, &VertexSet::new(), &Default::default()).unwrap();
        match out {
            WellLinkedOutcome::Certified {
                pairs_checked,
                exhaustive,
            } => {
                assert_eq!(pairs_checked, 0);
                assert!(exhaustive);
            }
            _ => panic!("empty set must certify"),
        }
    }

    #[test]
    fn adjacent_degree_two_pair_still_checkable() {
        let w = build_wall(3).unwrap();
        let mut it = w
            .graph
            .vertices()
            .filter(|v| w.graph.degree(v).unwrap() == 2);
        let u = it.next().unwrap().clone();
        let v = w
            .graph
            .neighbours(&u)
            .map(|(x, _)| x.clone())
            .next()
            .unwrap();
        let z: VertexSet = [u, v].into_iter().collect();
        let out = certify_well_linked(&w.graph, &z, &Default::default()).unwrap();
        assert!(matches!(out, WellLinkedOutcome::Certified { .. }));
    }

    #[test]
    fn degree_two_vertex_fails_three_connectivity() {
        let w = build_wall(3).unwrap();
        let z = well_linked_set(&w).unwrap().z;
        let mut with_corner = z.clone();
        let corner = w
            .graph
            .vertices()
            .find(|v| w.graph.degree(v).unwrap() == 2)
            .unwrap()
            .clone();
        with_corner.insert(corner);
        match certify_three_connected_pairs(&w.graph, &with_corner).unwrap() {
            ThreeConnectedOutcome::Violated {
                separator,
                direct_edges,
                ..
            } => {
                assert!(separator.len() + direct_edges < 3);
            }
            ThreeConnectedOutcome::Certified { .. } => {
                panic!("degree-2 member cannot be 3-connected to the rest")
            }
        }
    }

    #[test]
    fn wall3_vertical_path_cut() {
        // oracle: direct scan over all edges with one end in the column
        // pair; frozen value 3 (the three horizontal edges leaving it)
        let w = build_wall(3).unwrap();
        let v1: VertexSet = w
            .coords
            .iter()
            .filter(|(_, &(c, _))| c <= 2)
            .map(|(v, _)| v.clone())
            .collect();
        let cut = w.graph.edge_cut(&v1).unwrap();
        let scan: usize = w
            .graph
            .edges()
            .filter(|(u, v, _)| v1.contains(u) != v1.contains(v))
            .map(|(_, _, m)| m)
            .sum();
        assert_eq!(cut.size, scan);
        assert_eq!(cut.size, 3);
    }

    #[test]
    fn wall3_min_cut_matches_bipartition_scan() {
        let w = build_wall(3).unwrap();
        let ids: Vec<VertexId> = w.graph.vertices().cloned().collect();
        let n = ids.len();
        let mut best = usize::MAX;
        for mask in 1..(1usize << (n - 1)) {
            let side: VertexSet = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| ids[i].clone())
                .collect();
            best = best.min(w.graph.edge_cut(&side).unwrap().size);
        }
        assert_eq!(w.graph.min_edge_cut().unwrap().size, best);
        assert_eq!(best, 2);
    }

    #[test]
    fn wall3_degree_three_vertices_are_three_linked() {
        use crate::flow::{edge_disjoint_paths, EdgeLinkage};
        let w = build_wall(3).unwrap();
        let degree3: Vec<VertexId> = w
            .graph
            .vertices()
            .filter(|v| w.graph.degree(v).unwrap() == 3)
            .cloned()
            .collect();
        for (i, u) in degree3.iter().enumerate() {
            for v in &degree3[i + 1..] {
                let a = VertexSet::from([u.clone()]);
                let b = VertexSet::from([v.clone()]);
                match edge_disjoint_paths(&w.graph, &a, &b, 3).unwrap() {
                    EdgeLinkage::Paths(paths) => assert_eq!(paths.len(), 3),
                    EdgeLinkage::Blocked(cut) => {
                        panic!("{u} and {v} separated by a cut of {}", cut.size)
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_certification_on_wall_six() {
        // force the sampled route by lowering the exhaustion cap
        let w = build_wall(6).unwrap();
        let z = well_linked_set(&w).unwrap().z;
        assert_eq!(z.len(), 4);
        let config = LinkageCheckConfig {
            exhaustive_cap: 3,
            samples: 200,
            seed: 0,
        };
        match certify_well_linked(&w.graph, &z, &config).unwrap() {
            WellLinkedOutcome::Certified {
                pairs_checked,
                exhaustive,
            } => {
                assert!(!exhaustive);
                assert_eq!(pairs_checked, 200);
            }
            WellLinkedOutcome::Violated { a, b, .. } => {
                panic!("sampled pair failed: {a:?} vs {b:?}")
            }
        }
    }

    #[test]
    fn singleton_three_connected_vacuous() {
        let w = build_wall(3).unwrap();
        let z = well_linked_set(&w).unwrap().z;
        match certify_three_connected_pairs(&w.graph, &z).unwrap() {
            ThreeConnectedOutcome::Certified { pairs_checked } => assert_eq!(pairs_checked, 0),
            _ => panic!(),
        }
    }
}

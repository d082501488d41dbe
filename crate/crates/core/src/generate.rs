//! Seeded random multigraph generators for property sweeps and fixtures.
//!
//! Everything here is deterministic given the seed, so every sweep in the
//! test suite and the CLI is reproducible from its command line.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::multigraph::{Multigraph, VertexId, VertexSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(n: usize) -> Vec<VertexId> {
    (0..n).map(|i| VertexId::new(format!("v{i:02}"))).collect()
}

/// Connected multigraph on `n` vertices: a random spanning tree plus a few
/// extra pairs, with multiplicities in `1..=max_mult`.
pub fn random_connected_multigraph(rng: &mut impl Rng, n: usize, max_mult: usize) -> Multigraph {
    let ids = names(n);
    let mut edges: Vec<(VertexId, VertexId, usize)> = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((ids[j].clone(), ids[i].clone(), rng.gen_range(1..=max_mult)));
    }
    let extra = if n >= 2 { rng.gen_range(0..=n) } else { 0 };
    for _ in 0..extra {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            edges.push((ids[i].clone(), ids[j].clone(), rng.gen_range(1..=max_mult)));
        }
    }
    Multigraph::build(ids, edges).unwrap()
}

/// Random multigraph that may be disconnected: each pair kept with the given
/// density, multiplicities in `1..=max_mult`.
pub fn random_multigraph(rng: &mut impl Rng, n: usize, density: f64, max_mult: usize) -> Multigraph {
    let ids = names(n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                edges.push((ids[i].clone(), ids[j].clone(), rng.gen_range(1..=max_mult)));
            }
        }
    }
    Multigraph::build(ids, edges).unwrap()
}

/// Connected multigraph in which every 2-edge-connected piece has at most
/// five vertices: small blobs (multi-edges, triangles, diamonds, short
/// cycles) joined by single bridge edges. Such graphs contain no cyclic
/// structure on six or more vertices, so they carry no large closed trails.
pub fn bridged_blob_graph(rng: &mut impl Rng, target_n: usize, max_mult: usize) -> Multigraph {
    let mut vertices: Vec<VertexId> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId, usize)> = Vec::new();
    let mut fresh = 0usize;
    let mut blob_anchors: Vec<VertexId> = Vec::new();
    while vertices.len() < target_n {
        let room = target_n - vertices.len();
        let size = rng.gen_range(1..=room.min(5));
        let blob: Vec<VertexId> = (0..size)
            .map(|_| {
                let v = VertexId::new(format!("v{fresh:02}"));
                fresh += 1;
                v
            })
            .collect();
        // wire the blob: spanning tree plus optional chords, mult allowed
        for i in 1..size {
            let j = rng.gen_range(0..i);
            edges.push((blob[j].clone(), blob[i].clone(), rng.gen_range(1..=max_mult)));
        }
        if size >= 3 {
            for _ in 0..rng.gen_range(0..=2) {
                let i = rng.gen_range(0..size);
                let j = rng.gen_range(0..size);
                if i != j {
                    edges.push((blob[i].clone(), blob[j].clone(), rng.gen_range(1..=max_mult)));
                }
            }
        }
        if let Some(anchor) = blob_anchors.choose(rng) {
            // single bridge into the existing graph
            edges.push((anchor.clone(), blob[0].clone(), 1));
        }
        blob_anchors.push(blob[rng.gen_range(0..size)].clone());
        vertices.extend(blob);
    }
    Multigraph::build(vertices, edges).unwrap()
}

/// Random nonempty subset of the vertices.
pub fn random_vertex_subset(rng: &mut impl Rng, g: &Multigraph) -> VertexSet {
    g.vertices()
        .filter(|_| rng.gen_bool(0.4))
        .cloned()
        .collect()
}

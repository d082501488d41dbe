//! Acceptance suite: one test per criterion, each printing its verdict and
//! enforcing its time budget. Expected values tagged as derived were
//! computed by the independent oracles embedded here before being frozen.

use std::time::{Duration, Instant};

use wallcut::generate;
use wallcut::immersion::{
    apex_to_spider_subdivision, find_immersion, spider, validate_embedding, Mode, Outcome,
    SearchLimits,
};
use wallcut::multigraph::{Multigraph, VertexId, VertexSet};
use wallcut::synthesis::{reduce_min_degree3, synthesize, Parameters, SynthesisCaps};
use wallcut::thinness::{
    check_suppression_preserves, double_star, is_almost_alpha_thin, min_thinness, star,
    DEFAULT_CAP,
};
use wallcut::treecut::{
    certify_width, reduce_with_picker, search_certificate, three_centre, validate,
    CertificateSearch, CertifyOutcome, ReductionMode,
};
use wallcut::walls::{
    build_wall, certify_three_connected_pairs, certify_well_linked, well_linked_set,
    LinkageCheckConfig, ThreeConnectedOutcome, WellLinkedOutcome,
};

struct Criterion {
    name: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget_secs: u64) -> Self {
        Criterion {
            name,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed();
        println!(
            "criterion {}: PASS ({:.2?} of {:.0?} budget)",
            self.name, elapsed, self.budget
        );
        assert!(
            elapsed < self.budget,
            "criterion {} blew its {:?} budget: {:?}",
            self.name,
            self.budget,
            elapsed
        );
    }
}

#[test]
fn criterion_01_wall_census() {
    let c = Criterion::new("1 (wall census)", 1);
    for ell in 2..=8u32 {
        let w = build_wall(ell).unwrap();
        assert_eq!(
            w.graph.vertex_count(),
            (2 * ell * ell - 2) as usize,
            "vertex count of wall {ell}"
        );
        assert!(w.graph.max_degree() <= 3);
        if ell >= 3 {
            assert_eq!(w.graph.max_degree(), 3);
        }
        assert!(w.graph.is_connected());
        assert!(w.graph.is_simple());
    }
    c.finish();
}

#[test]
fn criterion_02_well_linkedness() {
    let c = Criterion::new("2 (well-linkedness)", 30);
    for ell in 3..=5u32 {
        let w = build_wall(ell).unwrap();
        let z = well_linked_set(&w).unwrap().z;
        assert_eq!(z.len(), (ell - 2) as usize);
        let config = LinkageCheckConfig::default();
        match certify_well_linked(&w.graph, &z, &config).unwrap() {
            WellLinkedOutcome::Certified { exhaustive, .. } => assert!(exhaustive),
            WellLinkedOutcome::Violated { a, b, .. } => {
                panic!("wall {ell} failed well-linkedness at {a:?} vs {b:?}")
            }
        }
        match certify_three_connected_pairs(&w.graph, &z).unwrap() {
            ThreeConnectedOutcome::Certified { .. } => {}
            ThreeConnectedOutcome::Violated { u, v, .. } => {
                panic!("wall {ell} failed three-connectivity at {u}, {v}")
            }
        }
    }
    c.finish();
}

/// Independent oracle: branch over all orderings, pruning on the running
/// maximum; no subset table involved.
fn thinness_oracle(g: &Multigraph) -> usize {
    fn explore(
        g: &Multigraph,
        prefix: &mut Vec<VertexId>,
        rest: &mut Vec<VertexId>,
        current: usize,
        best: &mut usize,
    ) {
        if current >= *best {
            return;
        }
        if rest.is_empty() {
            *best = current;
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            let mut cost = 0;
            for u in prefix[..prefix.len() - 1].iter() {
                for w in rest.iter() {
                    cost += g.multiplicity(u, w);
                }
            }
            explore(g, prefix, rest, current.max(cost), best);
            let v = prefix.pop().unwrap();
            rest.insert(i, v);
        }
    }
    let mut rest: Vec<VertexId> = g.vertices().cloned().collect();
    if rest.is_empty() {
        return 0;
    }
    let mut best = usize::MAX;
    explore(g, &mut Vec::new(), &mut rest, 0, &mut best);
    best
}

#[test]
fn criterion_03_thinness_vs_oracle() {
    let c = Criterion::new("3 (thinness deciders vs oracle)", 300);
    let mut rng = generate::rng(0xacce97);
    let mut graphs_checked = 0usize;
    // every labeled connected simple graph on up to 6 vertices, once with
    // unit multiplicities and once with seeded multiplicities in 1..=3
    for n in 1..=6usize {
        let ids: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("v{i}"))).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        for mask in 0..(1u32 << pairs.len()) {
            let edges: Vec<(VertexId, VertexId, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &(i, j))| (ids[i].clone(), ids[j].clone(), 1))
                .collect();
            let g = Multigraph::build(ids.iter().cloned(), edges.clone()).unwrap();
            if !g.is_connected() {
                continue;
            }
            assert_eq!(
                min_thinness(&g, DEFAULT_CAP).unwrap().alpha,
                thinness_oracle(&g),
                "unit multiplicities, n = {n}, mask = {mask}"
            );
            use rand::Rng;
            let fat_edges: Vec<(VertexId, VertexId, usize)> = edges
                .iter()
                .map(|(u, v, _)| (u.clone(), v.clone(), rng.gen_range(1..=3)))
                .collect();
            let fat = Multigraph::build(ids.iter().cloned(), fat_edges).unwrap();
            assert_eq!(
                min_thinness(&fat, DEFAULT_CAP).unwrap().alpha,
                thinness_oracle(&fat),
                "seeded multiplicities, n = {n}, mask = {mask}"
            );
            graphs_checked += 2;
        }
    }
    assert!(graphs_checked >= 2 * 26704, "enumeration incomplete");
    for _ in 0..100 {
        let g = generate::random_connected_multigraph(&mut rng, 7, 3);
        assert_eq!(
            min_thinness(&g, DEFAULT_CAP).unwrap().alpha,
            thinness_oracle(&g)
        );
    }
    c.finish();
}

#[test]
fn criterion_04_star_threshold() {
    let c = Criterion::new("4 (star threshold)", 60);
    for alpha in 1..=2usize {
        let g = star(3 * alpha + 3);
        assert!(
            is_almost_alpha_thin(&g, alpha, DEFAULT_CAP).unwrap().is_none(),
            "star with {} leaves is almost-thin at {alpha}",
            3 * alpha + 3
        );
        // repeated low-degree deletion collapses the star to one vertex
        let mut h = g;
        while h.vertex_count() > 1 {
            let v = h
                .vertices()
                .find(|v| h.degree(v).unwrap() <= 1)
                .cloned()
                .expect("a star always has a low-degree vertex");
            h = h.without_vertex(&v).unwrap();
        }
        assert_eq!(h.vertex_count(), 1);
    }
    c.finish();
}

#[test]
fn criterion_05_double_star() {
    let c = Criterion::new("5 (double star)", 60);
    let g = double_star(6);
    assert!(is_almost_alpha_thin(&g, 1, DEFAULT_CAP).unwrap().is_none());
    let mut h = g;
    loop {
        let v = h.vertices().find(|v| h.degree(v).unwrap() == 2).cloned();
        match v {
            Some(v) => h = h.suppress(&v).unwrap(),
            None => break,
        }
    }
    assert_eq!(h.vertex_count(), 2);
    assert_eq!(h.size(), 6);
    assert_eq!(min_thinness(&h, DEFAULT_CAP).unwrap().alpha, 0);
    c.finish();
}

#[test]
fn criterion_06_suppression_sweep() {
    // NOTE: this criterion is expected to fail, and the failure is real.
    // The almost-thinness clause of the suppression-preservation claim is
    // false: when every optimal deletion witness contains the suppressed
    // vertex, the merged edge can be irreparable. The sweep runs on the
    // canonical seed 0 (the crate-wide default); about 0.25% of random
    // instances in this family exhibit the counterexample, so most seeds
    // fail within 500 draws. The plain-thinness clause holds everywhere.
    // The pinned regression test in the thinness module carries a
    // hand-verified minimal instance.
    let c = Criterion::new("6 (suppression sweep)", 600);
    let mut rng = generate::rng(0);
    let mut plain_violations = Vec::new();
    let mut almost_violations = Vec::new();
    let mut checked = 0usize;
    while checked < 500 {
        use rand::Rng;
        let n = rng.gen_range(4..=9);
        let g = generate::random_connected_multigraph(&mut rng, n, 3);
        let Some(v) = g.vertices().find(|v| g.degree(v).unwrap() == 2).cloned() else {
            continue;
        };
        let report = check_suppression_preserves(&g, &v, DEFAULT_CAP).unwrap();
        if report.thin_after > report.thin_before {
            plain_violations.push((checked, report.clone()));
        }
        if report.almost_after > report.almost_before {
            almost_violations.push((checked, report.clone()));
        }
        checked += 1;
    }
    assert!(
        plain_violations.is_empty(),
        "plain thinness rose under suppression: {plain_violations:?}"
    );
    assert!(
        almost_violations.is_empty(),
        "the almost-thinness clause of the suppression-preservation claim \
         fails on {} of 500 seeded instances (first: instance {} with \
         levels {:?}). The preservation argument breaks when every optimal \
         deletion witness contains the suppressed vertex; see the pinned \
         regression test suppression_can_raise_almost_level_when_witness_\
         deletes_the_vertex and the project notes. The plain clause held on \
         all 500 instances.",
        almost_violations.len(),
        almost_violations[0].0,
        almost_violations[0].1
    );
    c.finish();
}

#[test]
fn criterion_07_reduction_confluence() {
    let c = Criterion::new("7 (reduction confluence)", 120);
    let mut rng = generate::rng(0xc0ffee);
    for _ in 0..500 {
        use rand::Rng;
        let n = rng.gen_range(4..=9);
        let g = generate::random_multigraph(&mut rng, n, 0.35, 2);
        let protected = generate::random_vertex_subset(&mut rng, &g);
        let canonical = three_centre(&g, &protected).unwrap().graph;
        let mut seed: u64 = rng.gen();
        let shuffled = reduce_with_picker(&g, &protected, ReductionMode::ThreeCentre, |cands| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 33) as usize % cands.len()
        })
        .unwrap();
        assert_eq!(shuffled, canonical, "reduction order changed the result");
    }
    c.finish();
}

#[test]
fn criterion_08_immersion_sanity() {
    let c = Criterion::new("8 (immersion sanity)", 120);
    // complete graph on 5 vertices is absent from the wall of size 3
    let k5 = {
        let ids: Vec<VertexId> = (0..5).map(|i| VertexId::new(format!("k{i}"))).collect();
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((ids[i].clone(), ids[j].clone(), 1));
            }
        }
        Multigraph::build(ids, edges).unwrap()
    };
    let w3 = build_wall(3).unwrap();
    assert!(matches!(
        find_immersion(&k5, &w3.graph, Mode::Strong, &SearchLimits::default()).unwrap(),
        Outcome::Absent
    ));
    // the hexagon wall is present in the (3, 8) spider, witness validated
    let w2 = build_wall(2).unwrap();
    let host = spider(3, 8).unwrap();
    match find_immersion(&w2.graph, &host.graph, Mode::Strong, &SearchLimits::default()).unwrap()
    {
        Outcome::Present(emb) => validate_embedding(&w2.graph, &host.graph, &emb).unwrap(),
        other => panic!("expected presence, got {other:?}"),
    }
    // the apexed path of length 11 carries the (3, 4) spider subdivision
    let witness = apex_to_spider_subdivision(4).unwrap();
    assert_eq!(witness.legs.len(), 4);
    assert_eq!(witness.host.path.len(), 12);
    let (s, emb) = witness.to_embedding().unwrap();
    validate_embedding(&s.graph, &witness.host.graph, &emb).unwrap();
    c.finish();
}

#[test]
fn criterion_09_no_low_adhesion_cover_for_the_critical_star() {
    let c = Criterion::new("9 (critical star exhaustive search)", 600);
    let g = star(6);
    // raw torsos (no reduction), adhesion 1, at most 7 nodes: exhaustive
    match search_certificate(&g, 1, 7, ReductionMode::TorsoAsIs, DEFAULT_CAP).unwrap() {
        CertificateSearch::Absent { candidates_checked } => {
            assert!(candidates_checked > 0);
            println!("  exhausted {candidates_checked} candidate decompositions");
        }
        CertificateSearch::Found { decomposition, .. } => {
            panic!("unexpected certificate: {decomposition:?}")
        }
    }
    // and the hexagon wall is absent from the star
    let w2 = build_wall(2).unwrap();
    assert!(matches!(
        find_immersion(&w2.graph, &g, Mode::Strong, &SearchLimits::default()).unwrap(),
        Outcome::Absent
    ));
    c.finish();
}

#[test]
fn criterion_10_synthesis_end_to_end() {
    let c = Criterion::new("10 (synthesis end to end)", 1200);
    let mut rng = generate::rng(0xb10b);
    let params = Parameters::new(2);
    let caps = SynthesisCaps::default();
    let w2 = build_wall(2).unwrap();
    let mut produced = 0usize;
    while produced < 20 {
        use rand::Rng;
        let n = rng.gen_range(10..=20);
        let g = generate::bridged_blob_graph(&mut rng, n, 4);
        // wall-freedom verified by the exact search
        match find_immersion(&w2.graph, &g, Mode::Strong, &SearchLimits::default()).unwrap() {
            Outcome::Absent => {}
            other => panic!("fixture generator leaked a wall: {other:?}"),
        }
        match synthesize(&g, &params, &caps).unwrap() {
            wallcut::synthesis::SynthesisOutcome::Decomposed(report) => {
                assert!(validate(&g, &report.decomposition).is_empty());
                // the certificate re-checks through the public interface
                assert!(matches!(
                    certify_width(
                        &g,
                        &report.decomposition,
                        report.instance_alpha,
                        ReductionMode::ThreeCentre,
                        caps.thinness,
                    )
                    .unwrap(),
                    CertifyOutcome::Certified(_)
                ));
                // conversion bound lines appear whenever the core ran; a
                // firing assertion would have errored out instead
                assert!(report
                    .trace
                    .iter()
                    .all(|line| !line.contains("defect")));
                produced += 1;
            }
            other => panic!("wall-free fixture did not decompose: {other:?}"),
        }
    }
    c.finish();
}

#[test]
fn criterion_11_reduction_round_trips() {
    let c = Criterion::new("11 (reduction round trips)", 600);
    let mut rng = generate::rng(0x417417);
    let mut checked = 0usize;
    while checked < 200 {
        use rand::Rng;
        let n = rng.gen_range(5..=12);
        let g = generate::random_connected_multigraph(&mut rng, n, 2);
        // low-degree replay: reduce, decompose the remainder, lift
        let (reduced, log) = reduce_min_degree3(&g);
        let base = if reduced.vertex_count() >= 4 {
            let ids: Vec<VertexId> = reduced.vertices().cloned().collect();
            let first: VertexSet = ids[..ids.len() / 2].iter().cloned().collect();
            let rest: VertexSet = ids[ids.len() / 2..].iter().cloned().collect();
            wallcut::treecut::TreeCutDecomposition::new(
                [(
                    wallcut::treecut::NodeId::new("u0"),
                    wallcut::treecut::NodeId::new("u1"),
                )],
                std::collections::BTreeMap::from([
                    (wallcut::treecut::NodeId::new("u0"), first),
                    (wallcut::treecut::NodeId::new("u1"), rest),
                ]),
            )
            .unwrap()
        } else {
            wallcut::treecut::TreeCutDecomposition::single_node(
                wallcut::treecut::NodeId::new("u0"),
                reduced.vertex_set().clone(),
            )
        };
        let before = wallcut::treecut::adhesion(&reduced, &base).unwrap();
        let lifted = log.lift_decomposition(&base, "x").unwrap();
        assert!(validate(&g, &lifted).is_empty(), "lift broke validity");
        let after = wallcut::treecut::adhesion(&g, &lifted).unwrap();
        for (edge, size) in &before.per_edge {
            assert_eq!(after.per_edge[edge], *size, "old adhesion changed");
        }
        assert!(
            after.max <= before.max.max(2),
            "lift exceeded the adhesion bound: {} vs {}",
            after.max,
            before.max
        );
        // cut replay: split a min-degree-3 graph and glue trivial leaves
        if reduced.vertex_count() > 1 && reduced.vertices().all(|v| reduced.degree(v).unwrap() >= 3)
        {
            let tree = wallcut::synthesis::split_3ec(&reduced).unwrap();
            let mut i = 0usize;
            let d = tree
                .solve("g", &mut |piece, _| {
                    i += 1;
                    Ok(wallcut::treecut::TreeCutDecomposition::single_node(
                        wallcut::treecut::NodeId::new(format!("leaf{i}")),
                        piece.vertex_set().clone(),
                    ))
                })
                .unwrap();
            assert!(validate(&reduced, &d).is_empty(), "glue broke validity");
            let glued = wallcut::treecut::adhesion(&reduced, &d).unwrap();
            assert!(glued.max <= 2, "glued edge exceeded the cut bound");
        }
        checked += 1;
    }
    c.finish();
}

//! Exact deciders for thin vertex orderings.
//!
//! An ordering `v_1, ..., v_n` has jump value at most `alpha` when, for
//! every position `i`, at most `alpha` edges join the strict prefix
//! `{v_1..v_{i-1}}` to the strict suffix `{v_{i+1}..v_n}`. Edges incident
//! to `v_i` itself are deliberately excluded from the count at position
//! `i`; that exclusion is what separates this measure from cutwidth, and
//! it is why a path of arbitrarily fat parallel edges still has value 0.
//!
//! The optimization is solved exactly by dynamic programming over suffix
//! subsets, so everything here is capped (default 20 vertices).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, VertexId, VertexSet};

pub const DEFAULT_CAP: usize = 20;

/// A vertex ordering together with its jump profile and the maximum entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinOrdering {
    pub order: Vec<VertexId>,
    pub alpha: usize,
    pub jump_profile: Vec<usize>,
}

/// Witness for being thin after a bounded deletion: the deleted set (each
/// member with few distinct neighbours in the original graph) plus a thin
/// ordering of the remainder.
#[derive(Clone, Debug)]
pub struct AlmostThinWitness {
    pub deleted: VertexSet,
    pub ordering: ThinOrdering,
}

/// Per-position counts of edges joining the strict prefix to the strict
/// suffix, multiplicity weighted.
pub fn jump_profile(g: &Multigraph, order: &[VertexId]) -> Result<Vec<usize>> {
    let as_set: VertexSet = order.iter().cloned().collect();
    if as_set.len() != order.len() || as_set != *g.vertex_set() {
        return Err(Error::InvalidInput(
            "order is not a permutation of the vertex set".into(),
        ));
    }
    let position: BTreeMap<&VertexId, usize> =
        order.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut profile = vec![0usize; order.len()];
    for (u, v, m) in g.edges() {
        let (a, b) = (position[u].min(position[v]), position[u].max(position[v]));
        // the edge jumps over every position strictly between its ends
        for slot in &mut profile[a + 1..b] {
            *slot += m;
        }
    }
    Ok(profile)
}

/// Indexed view used by the subset DP.
struct Indexed {
    ids: Vec<VertexId>,
    mult: Vec<Vec<usize>>,
    deg: Vec<usize>,
}

impl Indexed {
    fn new(g: &Multigraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().cloned().collect();
        let n = ids.len();
        let mut mult = vec![vec![0usize; n]; n];
        for (i, u) in ids.iter().enumerate() {
            for (j, v) in ids.iter().enumerate() {
                if i != j {
                    mult[i][j] = g.multiplicity(u, v);
                }
            }
        }
        let deg = (0..n).map(|i| mult[i].iter().sum()).collect();
        Indexed { ids, mult, deg }
    }

    fn mult_into(&self, v: usize, set: u32) -> usize {
        let mut s = set & !(1 << v);
        let mut total = 0;
        while s != 0 {
            let u = s.trailing_zeros() as usize;
            total += self.mult[v][u];
            s &= s - 1;
        }
        total
    }
}

/// `best[S]` = the minimum over orderings of the suffix set `S` of the
/// maximum jump value over the suffix positions, given that `V \ S` fills
/// the prefix. `best[full]` is the exact optimum for the graph.
fn suffix_dp(ix: &Indexed) -> Vec<u32> {
    let n = ix.ids.len();
    let full: u32 = (1u32 << n) - 1;
    let mut best = vec![0u32; (full as usize) + 1];
    let mut into = vec![0u32; (full as usize) + 1]; // |E(V\S, S)|
    for s in 1..=(full as usize) {
        let s32 = s as u32;
        let v0 = s32.trailing_zeros() as usize;
        let rest = s32 & (s32 - 1);
        // moving v0 from the outside into the suffix set
        let inside = ix.mult_into(v0, rest);
        let outside = ix.deg[v0] - ix.mult_into(v0, s32);
        into[s] = into[rest as usize] - inside as u32 + outside as u32;
        let mut value = u32::MAX;
        let mut bits = s32;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            // picking v next: the edges into the rest of the suffix jump
            let to_prefix = (ix.deg[v] - ix.mult_into(v, s32)) as u32;
            let cost = into[s] - to_prefix;
            let rest_set = s32 & !(1 << v);
            value = value.min(cost.max(best[rest_set as usize]));
        }
        best[s] = value;
    }
    best
}

/// Greedy reconstruction of the lexicographically least ordering whose
/// maximum jump value stays within `threshold`.
fn reconstruct(ix: &Indexed, best: &[u32], threshold: u32) -> Option<Vec<VertexId>> {
    let n = ix.ids.len();
    let full: u32 = (1u32 << n) - 1;
    if best[full as usize] > threshold {
        return None;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let into_s: u32 = {
            let mut total = 0u32;
            let mut bits = s;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                total += (ix.deg[v] - ix.mult_into(v, s)) as u32;
            }
            total
        };
        let mut chosen = None;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let to_prefix = (ix.deg[v] - ix.mult_into(v, s)) as u32;
            let cost = into_s - to_prefix;
            let rest = s & !(1 << v);
            if cost <= threshold && best[rest as usize] <= threshold {
                chosen = Some(v);
                break; // ids are sorted, so the first feasible bit is least
            }
        }
        let v = chosen.expect("dp table promised a feasible ordering");
        order.push(ix.ids[v].clone());
        s &= !(1 << v);
    }
    Some(order)
}

fn check_cap(g: &Multigraph, cap: usize) -> Result<()> {
    let cap = cap.min(31); // subset masks are 32-bit
    if g.vertex_count() > cap {
        return Err(Error::SizeCap {
            what: "thinness search",
            size: g.vertex_count(),
            cap,
        });
    }
    Ok(())
}

fn ordering_with_profile(g: &Multigraph, order: Vec<VertexId>) -> ThinOrdering {
    let jump_profile = jump_profile(g, &order).unwrap();
    let alpha = jump_profile.iter().copied().max().unwrap_or(0);
    ThinOrdering {
        order,
        alpha,
        jump_profile,
    }
}

/// The minimum jump value over all orderings, with the lexicographically
/// least optimal witness.
pub fn min_thinness(g: &Multigraph, cap: usize) -> Result<ThinOrdering> {
    check_cap(g, cap)?;
    if g.vertex_count() == 0 {
        return Ok(ThinOrdering {
            order: vec![],
            alpha: 0,
            jump_profile: vec![],
        });
    }
    let ix = Indexed::new(g);
    let best = suffix_dp(&ix);
    let full = (1u32 << ix.ids.len()) - 1;
    let optimum = best[full as usize];
    let order = reconstruct(&ix, &best, optimum).unwrap();
    let out = ordering_with_profile(g, order);
    debug_assert_eq!(out.alpha as u32, optimum);
    Ok(out)
}

/// Witness ordering with maximum jump at most `alpha`, or a definitive
/// absence (the search is exact).
pub fn is_alpha_thin(g: &Multigraph, alpha: usize, cap: usize) -> Result<Option<ThinOrdering>> {
    check_cap(g, cap)?;
    if g.vertex_count() == 0 {
        return Ok(Some(ThinOrdering {
            order: vec![],
            alpha: 0,
            jump_profile: vec![],
        }));
    }
    let ix = Indexed::new(g);
    let best = suffix_dp(&ix);
    Ok(reconstruct(&ix, &best, alpha as u32).map(|order| ordering_with_profile(g, order)))
}

/// Vertices eligible for deletion at level `alpha`: at most `alpha`
/// distinct neighbours in `g`. Multiplicities do not count here, so a
/// vertex tied to a single neighbour by many parallel edges stays eligible.
fn eligible_for_deletion(g: &Multigraph, alpha: usize) -> Vec<VertexId> {
    g.vertices()
        .filter(|v| g.neighbour_count(v) <= alpha)
        .cloned()
        .collect()
}

fn subsets_up_to<T: Clone>(items: &[T], max_size: usize) -> impl Iterator<Item = Vec<T>> + '_ {
    // ascending size, then lexicographic over the (sorted) item list
    (0..=max_size.min(items.len())).flat_map(move |k| Combinations::new(items, k))
}

struct Combinations<'a, T> {
    items: &'a [T],
    indices: Vec<usize>,
    done: bool,
}

impl<'a, T: Clone> Combinations<'a, T> {
    fn new(items: &'a [T], k: usize) -> Self {
        Combinations {
            items,
            indices: (0..k).collect(),
            done: k > items.len(),
        }
    }
}

impl<'a, T: Clone> Iterator for Combinations<'a, T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out: Vec<T> = self.indices.iter().map(|&i| self.items[i].clone()).collect();
        let k = self.indices.len();
        if k == 0 {
            self.done = true;
            return Some(out);
        }
        // advance the combination
        let n = self.items.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] != i + n - k {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Witness that the graph becomes `alpha`-thin after deleting at most
/// `alpha` vertices, each with at most `alpha` distinct neighbours; or a
/// definitive absence. Deletion sets are tried in ascending size and
/// lexicographic order, so the returned witness is canonical.
pub fn is_almost_alpha_thin(
    g: &Multigraph,
    alpha: usize,
    cap: usize,
) -> Result<Option<AlmostThinWitness>> {
    check_cap(g, cap)?;
    let eligible = eligible_for_deletion(g, alpha);
    for subset in subsets_up_to(&eligible, alpha) {
        let deleted: VertexSet = subset.into_iter().collect();
        let reduced = g.without_vertices(&deleted)?;
        if let Some(ordering) = is_alpha_thin(&reduced, alpha, cap)? {
            return Ok(Some(AlmostThinWitness { deleted, ordering }));
        }
    }
    Ok(None)
}

/// The least `alpha` such that the graph is almost-`alpha`-thin, with its
/// witness. For a deletion set `X` the achieved level is
/// `max(|X|, max distinct neighbours over X, thinness of g - X)`, and the
/// optimum is the minimum over all `X`.
pub fn min_almost_thinness(g: &Multigraph, cap: usize) -> Result<(usize, AlmostThinWitness)> {
    check_cap(g, cap)?;
    let ids: Vec<VertexId> = g.vertices().cloned().collect();
    let mut best_alpha = min_thinness(g, cap)?.alpha;
    let mut best = AlmostThinWitness {
        deleted: VertexSet::new(),
        ordering: min_thinness(g, cap)?,
    };
    if best_alpha == 0 {
        return Ok((0, best));
    }
    // |X| is a lower bound for the achieved level, so sizes beyond the
    // current best cannot help
    for subset in subsets_up_to(&ids, best_alpha.saturating_sub(1)) {
        if subset.len() >= best_alpha {
            continue;
        }
        let deleted: VertexSet = subset.into_iter().collect();
        let max_nbrs = deleted
            .iter()
            .map(|v| g.neighbour_count(v))
            .max()
            .unwrap_or(0);
        if max_nbrs >= best_alpha {
            continue;
        }
        let reduced = g.without_vertices(&deleted)?;
        let ordering = min_thinness(&reduced, cap)?;
        let achieved = ordering.alpha.max(deleted.len()).max(max_nbrs);
        if achieved < best_alpha {
            best_alpha = achieved;
            best = AlmostThinWitness { deleted, ordering };
        }
    }
    Ok((best_alpha, best))
}

/// Report that suppressing a degree-2 vertex did not increase either the
/// plain or the almost thinness level.
#[derive(Clone, Debug)]
pub struct SuppressionReport {
    pub thin_before: usize,
    pub thin_after: usize,
    pub almost_before: usize,
    pub almost_after: usize,
}

impl SuppressionReport {
    pub fn holds(&self) -> bool {
        self.thin_after <= self.thin_before && self.almost_after <= self.almost_before
    }
}

/// Computes both thinness levels before and after suppressing `v`.
pub fn check_suppression_preserves(
    g: &Multigraph,
    v: &VertexId,
    cap: usize,
) -> Result<SuppressionReport> {
    let suppressed = g.suppress(v)?;
    let thin_before = min_thinness(g, cap)?.alpha;
    let thin_after = min_thinness(&suppressed, cap)?.alpha;
    let almost_before = min_almost_thinness(g, cap)?.0;
    let almost_after = min_almost_thinness(&suppressed, cap)?.0;
    Ok(SuppressionReport {
        thin_before,
        thin_after,
        almost_before,
        almost_after,
    })
}

/// The star with `leaves` leaves, centre `c`, leaves `l01..`.
pub fn star(leaves: usize) -> Multigraph {
    star_with_multiplicity(leaves, 1)
}

pub fn star_with_multiplicity(leaves: usize, mult: usize) -> Multigraph {
    let centre = VertexId::new("c");
    let leaf_ids: Vec<VertexId> = (1..=leaves)
        .map(|i| VertexId::new(format!("l{i:02}")))
        .collect();
    Multigraph::build(
        std::iter::once(centre.clone()).chain(leaf_ids.iter().cloned()),
        leaf_ids.iter().map(|l| (centre.clone(), l.clone(), mult)),
    )
    .unwrap()
}

/// Two stars with `n` leaves each, their leaves identified pairwise: two
/// centres joined to `n` shared middle vertices.
pub fn double_star(n: usize) -> Multigraph {
    let c1 = VertexId::new("a");
    let c2 = VertexId::new("b");
    let mids: Vec<VertexId> = (1..=n).map(|i| VertexId::new(format!("m{i:02}"))).collect();
    Multigraph::build(
        [c1.clone(), c2.clone()].into_iter().chain(mids.iter().cloned()),
        mids.iter()
            .flat_map(|m| [(c1.clone(), m.clone(), 1), (c2.clone(), m.clone(), 1)]),
    )
    .unwrap()
}

//! JSON and DOT interchange.
//!
//! The graph format is an object with sorted `"vertices"` (strings) and
//! `"edges"` (triples `[u, v, multiplicity]` with `u < v`, no duplicate
//! pairs, positive multiplicities). Decompositions carry `"tree"` (node id
//! pairs) and `"parts"` (node id to vertex list); the node set is the key
//! set of the parts. DOT output is derived and lossy: parallel edges are
//! rendered as a multiplicity label.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, VertexId, VertexSet};
use crate::treecut::{NodeId, TreeCutDecomposition};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, usize)>,
}

impl GraphJson {
    pub fn from_graph(g: &Multigraph) -> Self {
        GraphJson {
            vertices: g.vertices().map(|v| v.0.clone()).collect(),
            edges: g
                .edges()
                .map(|(u, v, m)| (u.0.clone(), v.0.clone(), m))
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<Multigraph> {
        for (u, v, m) in &self.edges {
            if u >= v {
                return Err(Error::InvalidInput(format!(
                    "edge [{u}, {v}] endpoints must be strictly increasing"
                )));
            }
            if *m == 0 {
                return Err(Error::InvalidInput(format!(
                    "edge [{u}, {v}] has zero multiplicity"
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (u, v, _) in &self.edges {
            if !seen.insert((u.clone(), v.clone())) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge [{u}, {v}]"
                )));
            }
        }
        Multigraph::build(
            self.vertices.into_iter().map(VertexId),
            self.edges
                .into_iter()
                .map(|(u, v, m)| (VertexId(u), VertexId(v), m)),
        )
    }
}

pub fn graph_to_json_string(g: &Multigraph) -> String {
    serde_json::to_string_pretty(&GraphJson::from_graph(g)).expect("graph serialization")
}

pub fn graph_from_json_str(s: &str) -> Result<Multigraph> {
    let parsed: GraphJson = serde_json::from_str(s)
        .map_err(|e| Error::InvalidInput(format!("graph json: {e}")))?;
    parsed.into_graph()
}

pub fn read_graph(path: &FsPath) -> Result<Multigraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    graph_from_json_str(&text)
}

pub fn write_graph(path: &FsPath, g: &Multigraph) -> Result<()> {
    std::fs::write(path, graph_to_json_string(g) + "\n")
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub tree: Vec<(String, String)>,
    pub parts: BTreeMap<String, Vec<String>>,
}

impl DecompositionJson {
    pub fn from_decomposition(d: &TreeCutDecomposition) -> Self {
        DecompositionJson {
            tree: d
                .tree
                .iter()
                .map(|(a, b)| (a.0.clone(), b.0.clone()))
                .collect(),
            parts: d
                .parts
                .iter()
                .map(|(t, part)| {
                    (
                        t.0.clone(),
                        part.iter().map(|v| v.0.clone()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn into_decomposition(self) -> Result<TreeCutDecomposition> {
        let parts: BTreeMap<NodeId, VertexSet> = self
            .parts
            .into_iter()
            .map(|(t, vs)| {
                (
                    NodeId(t),
                    vs.into_iter().map(VertexId).collect::<VertexSet>(),
                )
            })
            .collect();
        TreeCutDecomposition::new(
            self.tree
                .into_iter()
                .map(|(a, b)| (NodeId(a), NodeId(b))),
            parts,
        )
    }
}

pub fn decomposition_to_json_string(d: &TreeCutDecomposition) -> String {
    serde_json::to_string_pretty(&DecompositionJson::from_decomposition(d))
        .expect("decomposition serialization")
}

pub fn decomposition_from_json_str(s: &str) -> Result<TreeCutDecomposition> {
    let parsed: DecompositionJson = serde_json::from_str(s)
        .map_err(|e| Error::InvalidInput(format!("decomposition json: {e}")))?;
    parsed.into_decomposition()
}

pub fn read_decomposition(path: &FsPath) -> Result<TreeCutDecomposition> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    decomposition_from_json_str(&text)
}

pub fn write_decomposition(path: &FsPath, d: &TreeCutDecomposition) -> Result<()> {
    std::fs::write(path, decomposition_to_json_string(d) + "\n")
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// External-constant tables: `{"g": {"2": 40}, "w": {"2": 7},
/// "h": {"8,24": 12}}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ExternalsJson {
    #[serde(default)]
    pub g: BTreeMap<String, u128>,
    #[serde(default)]
    pub w: BTreeMap<String, u128>,
    #[serde(default)]
    pub h: BTreeMap<String, u128>,
}

impl ExternalsJson {
    pub fn into_constants(self) -> Result<crate::synthesis::ExternalConstants> {
        let mut out = crate::synthesis::ExternalConstants::default();
        for (k, v) in self.g {
            let ell: u64 = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad size key {k}")))?;
            out.neighbour_threshold.insert(ell, v);
        }
        for (k, v) in self.w {
            let ell: u64 = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad size key {k}")))?;
            out.treewidth_bound.insert(ell, v);
        }
        for (k, v) in self.h {
            let (s, t) = k
                .split_once(',')
                .ok_or_else(|| Error::InvalidInput(format!("bad pair key {k}")))?;
            let s: u64 = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad pair key {k}")))?;
            let t: u64 = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad pair key {k}")))?;
            out.star_comb_threshold.insert((s, t), v);
        }
        Ok(out)
    }
}

pub fn graph_to_dot(g: &Multigraph) -> String {
    let mut out = String::from("graph g {\n");
    for v in g.vertices() {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for (u, v, m) in g.edges() {
        if m > 1 {
            out.push_str(&format!("  \"{u}\" -- \"{v}\" [label=\"{m}\"];\n"));
        } else {
            out.push_str(&format!("  \"{u}\" -- \"{v}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}

pub fn decomposition_to_dot(d: &TreeCutDecomposition) -> String {
    let mut out = String::from("graph tcd {\n");
    for (t, part) in &d.parts {
        let label: Vec<String> = part.iter().map(|v| v.0.clone()).collect();
        out.push_str(&format!(
            "  \"{t}\" [label=\"{t}: {{{}}}\"];\n",
            label.join(",")
        ));
    }
    for (a, b) in &d.tree {
        out.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = Multigraph::build(
            ["a", "b", "c"].map(VertexId::from),
            [
                (VertexId::from("a"), VertexId::from("b"), 2),
                (VertexId::from("b"), VertexId::from("c"), 1),
            ],
        )
        .unwrap();
        let back = graph_from_json_str(&graph_to_json_string(&g)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn graph_json_shape_is_exact() {
        let g = Multigraph::build(
            ["b", "a"].map(VertexId::from),
            [(VertexId::from("a"), VertexId::from("b"), 2)],
        )
        .unwrap();
        let compact: serde_json::Value =
            serde_json::from_str(&graph_to_json_string(&g)).unwrap();
        assert_eq!(
            compact,
            serde_json::json!({"vertices": ["a", "b"], "edges": [["a", "b", 2]]})
        );
    }

    #[test]
    fn bad_edges_rejected() {
        assert!(graph_from_json_str(r#"{"vertices":["a","b"],"edges":[["b","a",1]]}"#).is_err());
        assert!(graph_from_json_str(r#"{"vertices":["a","b"],"edges":[["a","b",0]]}"#).is_err());
        assert!(graph_from_json_str(
            r#"{"vertices":["a","b"],"edges":[["a","b",1],["a","b",2]]}"#
        )
        .is_err());
        assert!(graph_from_json_str(r#"{"vertices":["a"],"edges":[["a","b",1]]}"#).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let d = TreeCutDecomposition::new(
            [(NodeId::from("t0"), NodeId::from("t1"))],
            BTreeMap::from([
                (NodeId::from("t0"), VertexSet::from([VertexId::from("a")])),
                (NodeId::from("t1"), VertexSet::new()),
            ]),
        )
        .unwrap();
        let back = decomposition_from_json_str(&decomposition_to_json_string(&d)).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn random_graphs_round_trip() {
        let mut rng = crate::generate::rng(7);
        for _ in 0..20 {
            let g = crate::generate::random_multigraph(&mut rng, 9, 0.4, 4);
            let back = graph_from_json_str(&graph_to_json_string(&g)).unwrap();
            assert_eq!(g, back);
        }
    }

    #[test]
    fn dot_renders_multiplicity_labels() {
        let g = Multigraph::build(
            ["a", "b"].map(VertexId::from),
            [(VertexId::from("a"), VertexId::from("b"), 3)],
        )
        .unwrap();
        let dot = graph_to_dot(&g);
        assert!(dot.contains("label=\"3\""));
    }

    #[test]
    fn externals_parse() {
        let parsed: ExternalsJson =
            serde_json::from_str(r#"{"g": {"2": 40}, "w": {"2": 7}, "h": {"8,24": 12}}"#).unwrap();
        let consts = parsed.into_constants().unwrap();
        assert_eq!(consts.neighbour_threshold[&2], 40);
        assert_eq!(consts.star_comb_threshold[&(8, 24)], 12);
    }
}

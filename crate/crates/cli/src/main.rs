//! Command-line front end: wall generation and certification, thinness
//! and immersion deciders, decomposition certification, the synthesis
//! pipeline, and the fixture corpus.
//!
//! Exit codes: 0 affirmative verdict, 1 negative verdict, 2 inconclusive
//! (cap or timeout), 3 malformed input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wallcut::error::Error;
use wallcut::immersion::{self, SearchLimits};
use wallcut::io;
use wallcut::multigraph::VertexId;
use wallcut::synthesis::{self, Parameters, SynthesisCaps};
use wallcut::thinness;
use wallcut::treecut::{self, ReductionMode};
use wallcut::walls;

#[derive(Parser)]
#[command(
    name = "wallcut",
    about = "exact deciders and constructive pipelines for walls, strong \
             immersions, and tree-cut decompositions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strong,
    Weak,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    /// delete degree <= 1 and suppress degree 2 outside the core
    ThreeCentre,
    /// only delete degree <= 1 outside the core
    DeleteLeaves,
    /// no reduction
    None,
}

impl From<ReductionArg> for ReductionMode {
    fn from(r: ReductionArg) -> Self {
        match r {
            ReductionArg::ThreeCentre => ReductionMode::ThreeCentre,
            ReductionArg::DeleteLeaves => ReductionMode::DeleteLeavesOnly,
            ReductionArg::None => ReductionMode::TorsoAsIs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the wall of a given size and write it as graph JSON.
    GenWall {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        out: PathBuf,
        /// also write a DOT rendering
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Certify the canonical well-linked set of a wall.
    CertifyWall {
        #[arg(long = "in")]
        input: PathBuf,
        /// sampled subset pairs once the set outgrows exhaustion
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide thinness at a level, with or without deletions.
    CheckThin {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alpha: usize,
        /// allow deleting up to alpha low-neighbour vertices first
        #[arg(long)]
        almost: bool,
        #[arg(long, default_value_t = thinness::DEFAULT_CAP)]
        cap: usize,
    },
    /// Exact immersion search: present, absent, or inconclusive.
    CheckImmersion {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strong)]
        mode: ModeArg,
        /// wall-clock limit in seconds
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long, default_value_t = 10)]
        max_pattern: usize,
        #[arg(long, default_value_t = 40)]
        max_host: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Certify a tree-cut decomposition at a level.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tcd: PathBuf,
        #[arg(long)]
        alpha: usize,
        #[arg(long, value_enum, default_value_t = ReductionArg::ThreeCentre)]
        reduction: ReductionArg,
        #[arg(long, default_value_t = thinness::DEFAULT_CAP)]
        cap: usize,
    },
    /// Run the full pipeline: decomposition certificate or wall witness.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        ell: u32,
        /// external-constant tables (JSON)
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the executable fixture corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    Run {
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::SizeCap { .. } => 2,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::GenWall { ell, out, dot } => {
            let wall = walls::build_wall(ell)?;
            io::write_graph(&out, &wall.graph)?;
            if let Some(dot_path) = dot {
                std::fs::write(&dot_path, io::graph_to_dot(&wall.graph))
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", dot_path.display())))?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "ell": ell,
                    "vertices": wall.graph.vertex_count(),
                    "edges": wall.graph.size(),
                })
            );
            Ok(0)
        }
        Command::CertifyWall {
            input,
            samples,
            seed,
        } => {
            let graph = io::read_graph(&input)?;
            let wall = walls::wall_from_graph(graph)?;
            let z = walls::well_linked_set(&wall)?.z;
            let config = walls::LinkageCheckConfig {
                samples,
                seed,
                ..Default::default()
            };
            let linked = walls::certify_well_linked(&wall.graph, &z, &config)?;
            let pairs = walls::certify_three_connected_pairs(&wall.graph, &z)?;
            let (linked_ok, linked_summary) = match &linked {
                walls::WellLinkedOutcome::Certified {
                    pairs_checked,
                    exhaustive,
                } => (
                    true,
                    serde_json::json!({
                        "certified": true,
                        "pairs_checked": pairs_checked,
                        "exhaustive": exhaustive,
                    }),
                ),
                walls::WellLinkedOutcome::Violated { a, b, separator } => (
                    false,
                    serde_json::json!({
                        "certified": false,
                        "a": vset_json(a),
                        "b": vset_json(b),
                        "separator": vset_json(separator),
                    }),
                ),
            };
            let (pairs_ok, pairs_summary) = match &pairs {
                walls::ThreeConnectedOutcome::Certified { pairs_checked } => (
                    true,
                    serde_json::json!({"certified": true, "pairs_checked": pairs_checked}),
                ),
                walls::ThreeConnectedOutcome::Violated {
                    u,
                    v,
                    separator,
                    direct_edges,
                } => (
                    false,
                    serde_json::json!({
                        "certified": false,
                        "pair": [u.0.clone(), v.0.clone()],
                        "separator": vset_json(separator),
                        "direct_edges": direct_edges,
                    }),
                ),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "ell": wall.ell,
                    "set_size": z.len(),
                    "well_linked": linked_summary,
                    "three_connected_pairs": pairs_summary,
                }))
                .unwrap()
            );
            Ok(if linked_ok && pairs_ok { 0 } else { 1 })
        }
        Command::CheckThin {
            input,
            alpha,
            almost,
            cap,
        } => {
            let g = io::read_graph(&input)?;
            if almost {
                match thinness::is_almost_alpha_thin(&g, alpha, cap)? {
                    Some(witness) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&serde_json::json!({
                                "verdict": "witness",
                                "alpha": alpha,
                                "deleted": vset_json(&witness.deleted),
                                "order": order_json(&witness.ordering.order),
                                "jump_profile": witness.ordering.jump_profile,
                            }))
                            .unwrap()
                        );
                        Ok(0)
                    }
                    None => {
                        let eligible = g
                            .vertices()
                            .filter(|v| g.neighbour_count(v) <= alpha)
                            .count();
                        println!(
                            "{}",
                            serde_json::json!({
                                "verdict": "absent",
                                "alpha": alpha,
                                "deletion_sets_tried": subsets_up_to_count(eligible, alpha),
                                "orderings_per_set": factorial_u128(g.vertex_count()).to_string(),
                            })
                        );
                        Ok(1)
                    }
                }
            } else {
                match thinness::is_alpha_thin(&g, alpha, cap)? {
                    Some(witness) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&serde_json::json!({
                                "verdict": "witness",
                                "alpha": alpha,
                                "order": order_json(&witness.order),
                                "jump_profile": witness.jump_profile,
                            }))
                            .unwrap()
                        );
                        Ok(0)
                    }
                    None => {
                        println!(
                            "{}",
                            serde_json::json!({
                                "verdict": "absent",
                                "alpha": alpha,
                                "orderings_exhausted": factorial_u128(g.vertex_count()).to_string(),
                            })
                        );
                        Ok(1)
                    }
                }
            }
        }
        Command::CheckImmersion {
            pattern,
            host,
            mode,
            timeout,
            max_pattern,
            max_host,
            budget,
        } => {
            let h = io::read_graph(&pattern)?;
            let g = io::read_graph(&host)?;
            let mode = match mode {
                ModeArg::Strong => immersion::Mode::Strong,
                ModeArg::Weak => immersion::Mode::Weak,
            };
            let limits = SearchLimits {
                max_pattern,
                max_host,
                node_budget: budget,
                deadline: timeout
                    .map(|s| std::time::Instant::now() + std::time::Duration::from_secs(s)),
            };
            match immersion::find_immersion(&h, &g, mode, &limits)? {
                immersion::Outcome::Present(emb) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&embedding_json(&emb)).unwrap()
                    );
                    Ok(0)
                }
                immersion::Outcome::Absent => {
                    println!("{}", serde_json::json!({"verdict": "absent"}));
                    Ok(1)
                }
                immersion::Outcome::Inconclusive(why) => {
                    println!(
                        "{}",
                        serde_json::json!({"verdict": "inconclusive", "reason": why})
                    );
                    Ok(2)
                }
            }
        }
        Command::Certify {
            graph,
            tcd,
            alpha,
            reduction,
            cap,
        } => {
            let g = io::read_graph(&graph)?;
            let d = io::read_decomposition(&tcd)?;
            match treecut::certify_width(&g, &d, alpha, reduction.into(), cap)? {
                treecut::CertifyOutcome::Certified(cert) => {
                    let adhesion: BTreeMap<String, usize> = cert
                        .per_edge_adhesion
                        .iter()
                        .map(|((a, b), s)| (format!("{a}--{b}"), *s))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "verdict": "certified",
                            "alpha": alpha,
                            "per_edge_adhesion": adhesion,
                        }))
                        .unwrap()
                    );
                    Ok(0)
                }
                treecut::CertifyOutcome::Violated(v) => {
                    let detail = match v {
                        treecut::WidthViolation::AdhesionExceeded { edge, size } => {
                            serde_json::json!({
                                "kind": "adhesion",
                                "edge": format!("{}--{}", edge.0, edge.1),
                                "size": size,
                            })
                        }
                        treecut::WidthViolation::NodeNotAlmostThin { node } => {
                            serde_json::json!({"kind": "node", "node": node.0})
                        }
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "verdict": "violated",
                            "alpha": alpha,
                            "violation": detail,
                        }))
                        .unwrap()
                    );
                    Ok(1)
                }
            }
        }
        Command::Decompose {
            input,
            ell,
            params,
            out,
            cert,
            dot,
        } => {
            let g = io::read_graph(&input)?;
            let mut parameters = Parameters::new(ell as u64);
            if let Some(path) = params {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                let parsed: io::ExternalsJson = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidInput(format!("params json: {e}")))?;
                parameters.externals = parsed.into_constants()?;
            }
            match synthesis::synthesize(&g, &parameters, &SynthesisCaps::default())? {
                synthesis::SynthesisOutcome::Decomposed(report) => {
                    if let Some(path) = out {
                        io::write_decomposition(&path, &report.decomposition)?;
                    }
                    if let Some(path) = dot {
                        std::fs::write(&path, io::decomposition_to_dot(&report.decomposition))
                            .map_err(|e| {
                                Error::InvalidInput(format!("{}: {e}", path.display()))
                            })?;
                    }
                    let summary = serde_json::json!({
                        "verdict": "decomposed",
                        "instance_alpha": report.instance_alpha,
                        "closed_form_alpha": report.closed_form_alpha.map(|v| v.to_string()),
                        "alpha_symbolic": report.alpha_symbolic,
                        "excluded_wall_size": report.excluded_wall_size.map(|v| v.to_string()),
                        "nodes": report.decomposition.node_count(),
                        "trace": report.trace,
                    });
                    if let Some(path) = cert {
                        std::fs::write(&path, serde_json::to_string_pretty(&summary).unwrap())
                            .map_err(|e| {
                                Error::InvalidInput(format!("{}: {e}", path.display()))
                            })?;
                    }
                    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
                    Ok(0)
                }
                synthesis::SynthesisOutcome::WallFound { embedding, trace } => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "verdict": "wall-found",
                            "ell": ell,
                            "witness": embedding_json(&embedding),
                            "trace": trace,
                        }))
                        .unwrap()
                    );
                    Ok(1)
                }
                synthesis::SynthesisOutcome::Aborted { reason, trace } => {
                    println!(
                        "{}",
                        serde_json::json!({
                            "verdict": "inconclusive",
                            "reason": reason,
                            "trace": trace,
                        })
                    );
                    Ok(2)
                }
            }
        }
        Command::Corpus { action } => match action {
            CorpusAction::Run { only } => {
                let report = wallcut::corpus::run_all(only.as_deref())?;
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
                Ok(if report.all_green { 0 } else { 1 })
            }
        },
    }
}

fn vset_json(set: &wallcut::multigraph::VertexSet) -> Vec<String> {
    set.iter().map(|v| v.0.clone()).collect()
}

fn order_json(order: &[VertexId]) -> Vec<String> {
    order.iter().map(|v| v.0.clone()).collect()
}

fn embedding_json(emb: &immersion::ImmersionEmbedding) -> serde_json::Value {
    let branch: BTreeMap<String, String> = emb
        .branch
        .iter()
        .map(|(u, v)| (u.0.clone(), v.0.clone()))
        .collect();
    let paths: BTreeMap<String, Vec<Vec<String>>> = emb
        .paths
        .iter()
        .map(|((u, v), list)| {
            (
                format!("{u}--{v}"),
                list.iter()
                    .map(|p| p.vertices().iter().map(|x| x.0.clone()).collect())
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({
        "verdict": "present",
        "mode": match emb.mode {
            immersion::Mode::Strong => "strong",
            immersion::Mode::Weak => "weak",
        },
        "branch": branch,
        "paths": paths,
    })
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

fn subsets_up_to_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=k.min(n) {
        if i > 0 {
            binom = binom * (n as u128 - i as u128 + 1) / i as u128;
        }
        total += binom;
    }
    total
}

//! Exact deciders and constructive pipelines for walls, strong immersions,
//! and tree-cut decompositions of loopless multigraphs.
//!
//! The crate is organised around one structural equivalence: a graph either
//! contains a large wall under the strong immersion order, or it decomposes
//! along small edge cuts into pieces whose reduced torsos are path-like.
//! Each module owns one side of that story:
//!
//! - [`multigraph`]: the multiplicity-aware graph core (cuts, contractions,
//!   suppression, Menger-style path packing),
//! - [`walls`]: wall construction and well-linkedness certification,
//! - [`thinness`]: exact deciders for thin vertex orderings,
//! - [`treecut`]: tree-cut decompositions, torsos, 3-centres and width
//!   certificates,
//! - [`immersion`]: exact strong/weak immersion search and the constructive
//!   spider/apex embeddings,
//! - [`synthesis`]: the end-to-end pipeline that either decomposes a graph
//!   or harvests a wall immersion from whichever bound fails,
//! - [`corpus`]: executable regression fixtures,
//! - [`io`]: JSON and DOT interchange.

pub mod corpus;
pub mod error;
pub mod flow;
pub mod generate;
pub mod immersion;
pub mod io;
pub mod multigraph;
pub mod synthesis;
pub mod thinness;
pub mod treecut;
pub mod walls;

pub use error::{Error, Result};
pub use multigraph::{Multigraph, VertexId, VertexSet};

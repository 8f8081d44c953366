//! Pullback of fields and densities along covering maps of flat tori, the
//! coarea identities they satisfy, and the combinatorial skeleton of the
//! covering construction (ball cover, incidence graph, spanning tree).

mod cover;
mod covering;

pub use cover::{
    ball_cover, incidence_graph, spanning_tree, BallCover, IncidenceGraph, Metric, PointCloud,
    SpanningTreeReport,
};
pub use covering::{
    coarea_check, lq_scaling, pullback_density, pullback_field, pullback_lq_check,
    pullback_mean_check, CoveringMapSpec,
};

//! Channel synthesis for the BS→RIS, RIS→user and direct links.

pub mod clusters;
pub mod link;
pub mod propagation;
pub mod scenario;

pub use clusters::{generate_clusters, ClusterSet, LinkGeometry, LosSpec, Path};
pub use link::{
    assemble_link, draw_realization, generate_realization, realize, ChannelRealization, LinkDraw,
    RealizationDraws,
};
pub use propagation::{los_probability, mean_path_loss_db, path_loss_db, shadowing_db};
pub use scenario::{
    validate_scenario, ClusterParams, Environment, EnvironmentConstants, LosMode, Mount, Node,
    NodeFrames, NodeLayout, PathLossParams, PropagationParams, ScenarioConfig, Violation,
};

//! Benchmark game builders. Each returns a fully validated
//! [`crate::game::StochasticGame`]; closed-form expectations for their
//! solutions live in the corresponding tests.

mod belief;
mod bifurcation;
mod boxes;
mod commitment;
mod confirmation;
mod gridworld;
mod menu;
mod norm;
mod resource;
mod safety;

pub use belief::build_belief_manipulation;
pub use bifurcation::{
    bifurcation_fixed_points, build_bifurcation, stay_residual, BifurcationScan,
};
pub use boxes::{build_boxes, modal_trace, BoxSpec};
pub use commitment::build_commitment;
pub use confirmation::{build_confirmation, confirmation_value};
pub use gridworld::{
    build_gridworld, detect_events, shaping_potential, GridEvent, GridworldConfig,
    GridworldMeta,
};
pub use menu::{build_menu, menu_x};
pub use norm::build_norm;
pub use resource::{build_resource, resource_reward, ResourceCurve};
pub use safety::{build_pause_destroy, build_self_harm};

/// All builders with default parameters, for format round-trip and
/// validation sweeps. Gridworld uses the small map to keep sweeps fast.
pub fn all_default_scenarios() -> Vec<crate::game::StochasticGame> {
    vec![
        build_commitment(),
        build_menu(10, 2.0, 2.0),
        build_confirmation(0.99, 0.1, 6),
        build_resource(ResourceCurve::SquareLog, 1.0, 0.005),
        build_self_harm(100.0, 0.5, 1e-6, 0.99),
        build_pause_destroy(1.0, 100.0, 0.1, 0.001, 0.99),
        build_norm(2, false),
        build_norm(1, true),
        build_belief_manipulation(1.0, 1.0, 1.0).0,
        build_boxes(&[BoxSpec { readable: 3, total: 3 }, BoxSpec { readable: 2, total: 4 }], true),
        build_gridworld(&GridworldConfig::small()).expect("small map is valid").0,
        build_bifurcation(0.95, 0.3),
    ]
}

//! The ant colony: alignment- and pheromone-biased walks with deposit and evaporation.

mod config;
mod engine;
mod field;

pub use config::{LaatConfig, Placement, RewardTerm, WalkMode};
pub use engine::{
    jump_probabilities_from, preference_row, run_laat, run_laat_multi_reward, run_on,
    select_start_points, walk_ant, CellGrid, Landscape,
};
pub use field::{AntRoute, PheromoneField};

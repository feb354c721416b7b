//! Dungeon generation in the style of the original Legend of Zelda: mission
//! graphs from a graph grammar, rooms from a generator network or a corpus
//! pool, grid layout with backtracking, A* beatability repair, a turn-based
//! rogue-like engine, and room novelty metrics.

pub mod engine;
pub mod gan;
pub mod grammar;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod repair;
pub mod vglc;

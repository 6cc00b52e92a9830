//! Decoupled body-action and footstep planning for quadrupeds on rough terrain.
//!
//! A terrain reward map rates every 4 cm cell for foot placement. An anytime
//! repairing A* searches a lattice of body poses whose edges are motion
//! primitives with action-conditioned footstep regions; a greedy planner then
//! picks one foothold per leg and action inside those regions.

pub mod config;
pub mod cost;
pub mod error;
pub mod footstep;
pub mod geometry;
pub mod grid;
pub mod lattice;
pub mod search;
pub mod sim;
pub mod terrain;

pub use config::PlannerConfig;
pub use cost::{CostModel, CostParams};
pub use error::{ConfigError, FootstepError, GridError, MapFileError, PlanError, TerrainError};
pub use footstep::{footstep_sequence, Footstep, FootstepPlan};
pub use geometry::{Point2, Point3, Pose2, Rect, RotRect};
pub use grid::{Grid, GridSpec};
pub use lattice::{BodyState, Lattice, Leg, MotionPrimitive, PrimitiveSet, StanceGeometry};
pub use search::{a_star, ara_star, AnytimeSchedule, BodyActionPlan, Budget, GoalRegion, HeuristicKind};
pub use terrain::{HeightMap, ObstacleMap, RewardMap, TerrainMaps, TerrainParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
    #[error("grid must have at least one cell, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("grid origin must be finite")]
    InvalidOrigin,
    #[error("expected {expected} cells, found {found}")]
    CellCount { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum MapFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}, cell {column}: {message}")]
    Cell { line: usize, column: usize, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TerrainError {
    /// Fewer than three usable cells or a rank-deficient fit.
    #[error("insufficient data for a plane fit")]
    InsufficientData,
    #[error("no known cells to estimate the ground plane")]
    NoGroundEstimate,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ConfigError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        ConfigError::Invalid(msg.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start state is outside the lattice or in collision")]
    StartInvalid,
    #[error("goal state is outside the lattice")]
    GoalOutOfBounds,
    #[error("goal state is in collision")]
    GoalColliding,
    #[error("no plan found after {expansions} expansions ({elapsed_s:.3} s)")]
    NoPlan { expansions: u64, elapsed_s: f64 },
}

#[derive(Debug, Error, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum FootstepError {
    #[error("footstep region for {leg} at action {action_index} has no known, steppable cell")]
    EmptyRegion { leg: crate::lattice::Leg, action_index: usize },
    #[error("foothold ({x:.3}, {y:.3}) lies outside the {leg} search region")]
    OutsideRegion { leg: crate::lattice::Leg, x: f64, y: f64 },
    #[error("footstep horizon must be at least 1")]
    ZeroHorizon,
    #[error("body action plan is empty")]
    EmptyPlan,
}

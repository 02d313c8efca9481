//! Constraint reasoning engine for spatial networks over 2D points.
//!
//! Constraints relate pairs of points either qualitatively (Frank-style
//! cone-shaped or projection-based cardinal directions) or quantitatively
//! (cyclic angular sectors with open/closed bounds). Consistency is decided
//! in three stages: per-calculus qualitative propagation, quantitative path
//! consistency, and backtracking scenario search with a simplex feasibility
//! check at the leaves.

pub mod algebra;
pub mod angle;
pub mod calculi;
pub mod config;
pub mod linearize;
pub mod lp;
pub mod network;
pub mod oracle;
pub mod search;

pub use algebra::{BasicRelation, GeneralRelation};
pub use angle::{Angle, Point, Sector};
pub use calculi::{Atom, AtomSet, Calculus, CompositionTable, Direction, QualitativeRelation};
pub use config::Config;
pub use linearize::{HalfPlane, LinearRow};
pub use lp::{LinearSystem, LpResult};
pub use network::{Network, PartitionedInput, PcOutcome, PreprocessOutcome};
pub use search::{PipelineResult, SearchConfig, SearchResult, Witness};

//! Day-ahead dispatch of a wind + electrolyzer + hydrogen storage plant.

pub mod bounds;
pub mod error;
pub mod expost;
pub mod models;
pub mod physics;
pub mod scenario;
pub mod segmentation;
pub mod study;
pub mod synth;

pub use error::{CoreError, Result};
pub use physics::{CellCoefficients, ElectrolyzerPhysics, FaradayParams, LogBase, OperatingPoint};
pub use segmentation::{approximation_gap, build_breakpoints, linearize, segment_set, Breakpoints, Segment, SegmentSet};
pub use scenario::{load_scenario, DemandBlock, PlantScenario, ScenarioConfig, TimeSeries};
pub use models::{build, build_oo, build_oos, build_os, decode_solution, DispatchModel, DispatchSchedule, ModelKind, State};
pub use bounds::{classify_hours, lower_bound, upper_bound, PriceClass, PriceRange};
pub use expost::{evaluate, ExPostReport};
pub use study::{run_compare, run_single, run_sweep, RunOutcome, RunSpec, SweepAxis};

//! Peak-spreading congestion pricing.
//!
//! Motorists pick an arrival minute that minimizes price plus a linear
//! schedule-delay penalty. This crate computes those choices exactly in
//! fixed-point money, synthesizes step tolls that realize a desired
//! threshold-to-slot map, calibrates the willingness-to-pay distribution from
//! observed flows, and simulates the resulting arrival profile.

mod csvfmt;

pub mod calibration;
pub mod error;
pub mod flow;
pub mod model;
pub mod money;
pub mod normal;
pub mod rng;
pub mod schedule;
pub mod simulation;
pub mod synthesis;
pub mod time;
pub mod wtp;

pub use calibration::{
    calibrate_from_ratio, curve_to_csv, equal_load_map, equal_load_thresholds,
    indifference_threshold,
};
pub use error::{CalibrationError, FormatError, ModelError, SimulationError, SynthesisError};
pub use flow::{ingest_flow_csv, peak_ratio, read_flow_csv, FlowObservation};
pub use model::{
    fast_path_applies, optimal_arrival, optimal_arrival_fast, travel_cost, CostParams, LatePenalty,
};
pub use money::{Money, Rate};
pub use schedule::PriceSchedule;
pub use simulation::{
    run_simulation, three_peak_scenario, EarlyPenalty, FlowHistogram, MotoristClass, Population,
    SimulationConfig, ThreePeakScenario,
};
pub use synthesis::{
    induced_map, synthesize_prices, uniform_b_grid, verify_realization, ArrivalMap, Defection,
    VerificationReport, DEFAULT_GRID_STEP,
};
pub use time::{Minutes, TimeOfDay};
pub use wtp::BDistribution;

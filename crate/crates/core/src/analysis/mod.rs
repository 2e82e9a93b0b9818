//! Sweeps, power-law fits, crossover location, random-sign error models and
//! the Magnus-expansion oracle.

mod crossover;
mod fit;
mod magnus;
pub mod rng;
mod sweep;

pub use crossover::{
    crossover_scan, local_slope, locate_crossover, CrossoverReport, BRACKET_RATIO, SLOPE_STEP,
    SLOPE_THRESHOLD,
};
pub use fit::{fit_slope, log_grid, log_log_least_squares, SlopeFit, INFIDELITY_FLOOR};
pub use magnus::{
    correction_block, leading_residual, magnus_m3, magnus_residual, magnus_residual_with, BlockForm,
};
pub use rng::random_sign_assignment;
pub use sweep::{
    grid_1d, grid_2d, sweep, Axis, ErrorModel, Experiment, GridPoint, SweepResult, SweepRow,
    CSV_HEADER,
};

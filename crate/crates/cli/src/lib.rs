//! Command-line harness: scenario files, end-to-end runs, golden fixture
//! replays and plot-data emission.

pub mod error;
pub mod figures;
pub mod fixtures;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use run::{run, RunReport};
pub use scenario::{load_scenario, Scenario};

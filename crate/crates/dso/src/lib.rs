//! File formats, result export, threaded sweeps and the `dso` command line
//! on top of [`dso_core`].

pub mod cli;
pub mod export;
pub mod file;
pub mod sweep;

pub use dso_core;
pub use dso_core::casestudy::bundled_case_study;
pub use export::{export_results, ResultBundle};
pub use file::{load_scenario, save_scenario, Loaded, LoadError, ScenarioFile};
pub use sweep::run_sweep_parallel;

//! End-to-end orchestration: stage, generate, simulate, analyze and plot,
//! with every random draw derived from the plan's master seed.
//!
//! Output layout under the plan's directory:
//!
//! ```text
//! plan.json
//! runs.json
//! net-<i>/config.json, net-<i>/manifest.json
//! net-<i>/sim-<j>/metrics.csv, goodput.csv, manifest.json
//! analysis/<metric>.csv
//! ```

mod analyze;
mod commands;
mod plan;
mod plot;
mod report;

pub use analyze::{cmd_analyze, metric_samples, AnalysisOptions, Metric};
pub use commands::{
    cmd_generate, cmd_simulate, cmd_stage, load_models, read_run_manifests, NetworkManifest, GOODPUT_FILE,
    METRICS_FILE, RUN_MANIFEST,
};
pub use plan::{read_plan, write_plan, ExperimentPlan, PLAN_FILE, PLAN_VERSION};
pub use plot::{plot_estimates, y_value, PlotFiles, PlotSeries, PlotStyle};
pub use report::{cmd_ci_width_study, cmd_plot};

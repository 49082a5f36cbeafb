//! Plot data from a finished run directory.

use std::fs;
use std::path::{Path, PathBuf};

use execlab_core::optimizer::{log_grid, objective_curve, FrontierBenchmark, ObjectivePoint};

use crate::error::CliError;
use crate::run::{frontier_csv, frontier_tables, SCENARIO_FILE};
use crate::scenario::{load_scenario, Scenario};

pub const OBJECTIVE_FILE: &str = "figure1_objective.csv";

pub fn figure2_file(b: FrontierBenchmark) -> String {
    format!("figure2_{}.csv", b.label())
}

/// `(α, MI, λR, objective)` over the scenario's rate grid.
pub fn objective_rows(scenario: &Scenario) -> Result<Vec<ObjectivePoint<f64>>, CliError> {
    let (Some(cost), Some(opt)) = (&scenario.cost_model, &scenario.optimizer) else {
        return Err(CliError::Validation("figures need [cost_model] and [optimizer] sections".into()));
    };
    let coeffs = cost.impact().rate_coefficients().map_err(CliError::runtime)?;
    let alphas = log_grid(opt.rate_min, opt.rate_max, opt.alpha_points);
    objective_curve(&alphas, opt.objective_lambda, &coeffs, &cost.risk()).map_err(CliError::runtime)
}

pub fn objective_csv(header: &str, rows: &[ObjectivePoint<f64>]) -> String {
    let mut out = format!("{header}\nalpha,impact,weighted_risk,objective\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.alpha, r.impact, r.weighted_risk, r.objective));
    }
    out
}

/// Read `run_dir/scenario.toml` and write the figure files into `out`.
pub fn emit_figures(run_dir: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = load_scenario(&run_dir.join(SCENARIO_FILE))?;
    let header = scenario.header();
    let rows = objective_rows(&scenario)?;
    let tables = frontier_tables(&scenario)?;
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut files = vec![(OBJECTIVE_FILE.to_string(), objective_csv(&header, &rows))];
    for (t, b) in tables.iter().zip([FrontierBenchmark::Arrival, FrontierBenchmark::PreviousClose]) {
        files.push((figure2_file(b), frontier_csv(&header, t)));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out.join(name);
        fs::write(&path, body).map_err(CliError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}

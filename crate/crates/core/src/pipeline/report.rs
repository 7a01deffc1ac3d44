use std::path::{Path, PathBuf};

use super::plot::{plot_estimates, PlotFiles, PlotSeries, PlotStyle};
use crate::error::{Error, Result};
use crate::stats::{ci_width_study, read_estimate_csv, WidthRow};

/// Plots estimate CSVs given as (label, path) pairs into one figure at
/// `prefix`.
pub fn cmd_plot(inputs: &[(String, PathBuf)], title: &str, tail_log: bool, prefix: &Path) -> Result<PlotFiles> {
    if inputs.is_empty() {
        return Err(Error::Usage("no estimate files to plot".into()));
    }
    let series = inputs
        .iter()
        .map(|(label, path)| {
            Ok(PlotSeries {
                label: label.clone(),
                rows: read_estimate_csv(path)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let style = PlotStyle {
        title: title.to_string(),
        x_label: title.to_string(),
        tail_log,
    };
    plot_estimates(&series, &style, prefix)
}

/// Runs the width study and writes `networks,q,median_width` rows to `out`.
pub fn cmd_ci_width_study(
    networks: &[usize],
    quantiles: &[f64],
    trials: usize,
    seed: u64,
    confidence: f64,
    out: &Path,
) -> Result<Vec<WidthRow>> {
    let rows = ci_width_study(networks, quantiles, trials, seed, confidence)?;
    if let Some(parent) = out.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = String::from("networks,q,median_width\n");
    for r in &rows {
        text.push_str(&format!("{},{},{}\n", r.networks, r.q, r.median_width));
    }
    std::fs::write(out, text).map_err(|e| Error::io(out, e))?;
    Ok(rows)
}

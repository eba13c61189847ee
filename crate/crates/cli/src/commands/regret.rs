//! `regret`: run the seeded misspecification sweep and emit regret tables
//! and curves.

use crate::report::{fmt_f64, Table};
use crate::svg;
use anyhow::{Context, Result};
use std::path::{Path, PathBuf};
use stylebandit::regret::{sweep_and_report, RegretSweepConfig, SweepCell};

pub struct RegretOutputs {
    pub cells: Vec<SweepCell>,
    pub files: Vec<PathBuf>,
}

pub fn load_sweep_config(path: Option<&Path>) -> Result<RegretSweepConfig> {
    match path {
        None => Ok(RegretSweepConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading grid config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

pub fn cmd_regret(cfg: &RegretSweepConfig, out_dir: &Path) -> Result<RegretOutputs> {
    let cells = sweep_and_report(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();

    let mut table = Table::new(&[
        "zeta",
        "alpha",
        "seeds",
        "failures",
        "mean_final_regret",
        "sd_final_regret",
        "mean_final_quartile_slope",
    ]);
    table.comment(format!(
        "misspecified linear bandit sweep: d={} K={} T={} noise={:?}",
        cfg.dim, cfg.arms, cfg.horizon, cfg.noise
    ));
    table.comment("alpha is the theoretical schedule evaluated at each cell's zeta");
    for cell in &cells {
        table.row(vec![
            fmt_f64(cell.zeta),
            fmt_f64(cell.alpha),
            cell.seeds.len().to_string(),
            cell.failures.len().to_string(),
            fmt_f64(cell.mean_final),
            fmt_f64(cell.sd_final),
            fmt_f64(cell.mean_final_quartile_slope),
        ]);
    }
    let path = out_dir.join("regret.tsv");
    table.write(&path)?;
    files.push(path);

    let mut curve_table = Table::new(&["zeta", "round", "mean_cumulative_regret", "sd"]);
    curve_table.comment("mean ± sd cumulative pseudo-regret across seeds");
    let mut series = Vec::new();
    for cell in &cells {
        for &(round, mean, sd) in &cell.curve {
            curve_table.row(vec![
                fmt_f64(cell.zeta),
                round.to_string(),
                fmt_f64(mean),
                fmt_f64(sd),
            ]);
        }
        series.push((
            format!("zeta={}", cell.zeta),
            cell.curve
                .iter()
                .map(|&(r, m, _)| (r as f64, m))
                .collect::<Vec<_>>(),
        ));
    }
    let path = out_dir.join("regret_curves.tsv");
    curve_table.write(&path)?;
    files.push(path);

    let path = out_dir.join("regret.svg");
    svg::line_chart(
        &path,
        "cumulative pseudo-regret under misspecification",
        "round",
        "cumulative regret",
        &series,
    )?;
    files.push(path);
    Ok(RegretOutputs { cells, files })
}

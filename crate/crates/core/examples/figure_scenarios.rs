//! Run every built-in scenario and write its report, CSV series and SVG
//! charts.
//!
//! cargo run --example figure_scenarios -- [out-dir]

use std::path::PathBuf;

use holospec::cli::write_experiment_outputs;
use holospec::harness::{named_scenario, run_scenario, SCENARIO_NAMES};

fn main() -> holospec::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    for name in SCENARIO_NAMES {
        let report = run_scenario(&named_scenario(name)?)?;
        let files = write_experiment_outputs(&report, &dir.join(name))?;
        println!("{name}: {} files", files.len());
        for v in &report.variants {
            let fmt = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.2e}"));
            println!(
                "  {:<16} rmse(0..N/2) {:>9}  rmse(N/2..N) {:>9}{}",
                v.name,
                fmt(v.low_band_rmse),
                fmt(v.upper_band_rmse),
                v.error.as_ref().map(|e| format!("  [{e}]")).unwrap_or_default()
            );
        }
    }
    println!("written to {}", dir.display());
    Ok(())
}

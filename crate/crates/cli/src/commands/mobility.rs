use std::path::Path;

use legkit_core::mobility::{format_table, rationality_report, worked_examples, write_csv, MechanismGraph, MobilityResult};
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, load};
use crate::{CliError, Output};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilityConfig {
    /// Schemes to assess; the four worked examples when omitted.
    pub mechanisms: Option<Vec<MechanismGraph>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilitySummary {
    pub mechanisms: Vec<MobilityResult>,
}

/// Writes `mobility.txt` and `mobility.csv` and prints the table.
pub fn run(config: &MobilityConfig, out: &Output) -> Result<MobilitySummary, CliError> {
    let graphs = config.mechanisms.clone().unwrap_or_else(worked_examples);
    if graphs.is_empty() {
        return Err(CliError::Config("mechanisms must not be empty".into()));
    }
    let results = rationality_report(&graphs).map_err(|e| CliError::Config(e.to_string()))?;
    let table = format_table(&results);
    out.text("mobility.txt", &table)?;
    out.csv("mobility.csv", |buf| write_csv(buf, &results))?;
    print!("{table}");
    Ok(MobilitySummary { mechanisms: results })
}

pub fn main(config_path: Option<&Path>, out_dir: &Path) -> Result<MobilitySummary, CliError> {
    let config: MobilityConfig = load(config_path)?;
    let out = Output::create(out_dir, "mobility", config_hash(&config))?;
    run(&config, &out)
}

use std::path::Path;

use serde_json::Value;

use crate::config::RunConfig;
use crate::error::Result;
use crate::manifest::Manifest;
use crate::run::{execute, persist, RunRecord};

pub struct SimulateOutcome {
    pub record: RunRecord,
    pub manifest: Manifest,
}

/// Runs `config` and writes the run directory `out`.
pub fn simulate(config: &RunConfig, out: &Path) -> Result<SimulateOutcome> {
    let resolved = config.resolve()?;
    let record = execute(&resolved, config.initial_kind())?;
    let manifest = persist(out, "simulate", config, &resolved, &record, Value::Null)?;
    Ok(SimulateOutcome { record, manifest })
}

use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::tables::*;
use super::Scenario;
use crate::error::ScenarioError;

/// Loads and validates the scenario stored in `dir`.
pub fn load_scenario(dir: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let dir = dir.as_ref();
    let tables = ScenarioTables {
        years: read_table(dir, YEARS_FILE, true)?,
        assets: read_table(dir, ASSETS_FILE, true)?,
        asset_year: read_table(dir, ASSET_YEAR_FILE, true)?,
        asset_vintage: read_table(dir, ASSET_VINTAGE_FILE, false)?,
        rep_periods: read_table(dir, REP_PERIODS_FILE, true)?,
        time_blocks: read_table(dir, TIME_BLOCKS_FILE, true)?,
        flows: read_table(dir, FLOWS_FILE, true)?,
        flow_year: read_table(dir, FLOW_YEAR_FILE, true)?,
        profiles: read_table(dir, PROFILES_FILE, true)?,
        demand: read_table(dir, DEMAND_FILE, true)?,
    };
    Scenario::from_tables(tables)
}

/// Writes the scenario's tables into `dir` (created if needed).
///
/// `asset_vintage.csv` is only written when the scenario has vintage records.
pub fn write_scenario(scenario: &Scenario, dir: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| ScenarioError::Io { file: dir.display().to_string(), message: e.to_string() })?;
    let t = scenario.tables();
    write_table(dir, YEARS_FILE, &t.years)?;
    write_table(dir, ASSETS_FILE, &t.assets)?;
    write_table(dir, ASSET_YEAR_FILE, &t.asset_year)?;
    if !t.asset_vintage.is_empty() {
        write_table(dir, ASSET_VINTAGE_FILE, &t.asset_vintage)?;
    }
    write_table(dir, REP_PERIODS_FILE, &t.rep_periods)?;
    write_table(dir, TIME_BLOCKS_FILE, &t.time_blocks)?;
    write_table(dir, FLOWS_FILE, &t.flows)?;
    write_table(dir, FLOW_YEAR_FILE, &t.flow_year)?;
    write_table(dir, PROFILES_FILE, &t.profiles)?;
    write_table(dir, DEMAND_FILE, &t.demand)?;
    Ok(())
}

fn read_table<T: DeserializeOwned>(dir: &Path, file: &str, required: bool) -> Result<Vec<T>, ScenarioError> {
    let path = dir.join(file);
    let handle = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return if required {
                Err(ScenarioError::MissingFile { file: file.to_string(), dir: dir.display().to_string() })
            } else {
                Ok(Vec::new())
            };
        }
        Err(e) => return Err(ScenarioError::Io { file: path.display().to_string(), message: e.to_string() }),
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(handle);
    let headers = reader.headers().map_err(|e| malformed(file, &e, None))?.clone();
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e| malformed(file, &e, Some(&headers)))?);
    }
    Ok(rows)
}

fn malformed(file: &str, err: &csv::Error, headers: Option<&csv::StringRecord>) -> ScenarioError {
    let line = err.position().map_or(1, |p| p.line());
    let (column, message) = match err.kind() {
        csv::ErrorKind::Deserialize { err: de, .. } => {
            let column = de
                .field()
                .and_then(|i| headers.and_then(|h| h.get(i as usize)))
                .map(str::to_string)
                .unwrap_or_else(|| missing_field(&de.to_string()).unwrap_or_else(|| "?".to_string()));
            (column, de.kind().to_string())
        }
        csv::ErrorKind::UnequalLengths { .. } => ("*".to_string(), "wrong number of fields".to_string()),
        _ => ("*".to_string(), err.to_string()),
    };
    ScenarioError::MalformedRow { file: file.to_string(), line, column, message }
}

/// serde's "missing field `x`" message names the column but carries no index.
fn missing_field(message: &str) -> Option<String> {
    let start = message.find("missing field `")? + "missing field `".len();
    let end = message[start..].find('`')?;
    Some(message[start..start + end].to_string())
}

fn write_table<T: Serialize>(dir: &Path, file: &str, rows: &[T]) -> Result<(), ScenarioError> {
    let path = dir.join(file);
    let io_err = |e: &dyn std::fmt::Display| ScenarioError::Io { file: path.display().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_err(&e))?;
    }
    w.flush().map_err(|e| io_err(&e))?;
    Ok(())
}

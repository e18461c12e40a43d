//! Config text in, files on disk out. All tables are computed and encoded
//! before the output directory is touched, so a failed run writes nothing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ExperimentConfig, Format};
use crate::experiments;
use crate::table::{write_atomic, Metadata, ResultTable, TableError};
use crate::{config_err, RunError};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub tables: Vec<ResultTable>,
    /// Rows whose `pass` column is false, over all tables.
    pub failures: usize,
}

pub fn run(config_text: &str, overrides: &Overrides) -> Result<Outcome, RunError> {
    let mut config = ExperimentConfig::parse(config_text).map_err(config_err)?;
    if let Some(dir) = &overrides.out_dir {
        config.output = dir.clone();
    }
    if let Some(format) = overrides.format {
        config.format = format;
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }

    let plan = experiments::prepare(&config)?;
    let start = Instant::now();
    let tables = plan.execute()?;
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let mut outputs: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    for table in &tables {
        let metadata = Metadata {
            experiment: table.experiment.clone(),
            stage: table.stage.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config_text.to_string(),
            seed: config.seed,
            format: config.format,
            wall_clock_seconds,
            columns: table.columns().to_vec(),
        };
        let stem = table.file_stem();
        match config.format {
            Format::Csv => {
                outputs.push((config.output.join(format!("{stem}.csv")), table.to_csv()?));
                let mut sidecar = serde_json::to_vec_pretty(&metadata).map_err(TableError::Json)?;
                sidecar.push(b'\n');
                outputs.push((config.output.join(format!("{stem}.meta.json")), sidecar));
            }
            Format::Json => outputs.push((config.output.join(format!("{stem}.json")), table.to_json(&metadata)?)),
        }
    }

    create_dir(&config.output)?;
    let mut files = Vec::with_capacity(outputs.len());
    for (path, bytes) in outputs {
        write_atomic(&path, &bytes)?;
        files.push(path);
    }
    let failures = tables.iter().map(ResultTable::failures).sum();
    Ok(Outcome { files, tables, failures })
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| TableError::Io { path: dir.to_path_buf(), source }.into())
}

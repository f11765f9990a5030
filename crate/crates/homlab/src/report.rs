//! Report files: a versioned JSON envelope and CSV tables with a comment line
//! documenting the columns.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Software {
    pub name: &'static str,
    pub version: &'static str,
}

pub const SOFTWARE: Software = Software {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub software: Software,
    pub command: &'static str,
    pub config: &'a ExperimentConfig,
    pub result: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(config: &'a ExperimentConfig, result: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            software: SOFTWARE,
            command: config.command.name(),
            config,
            result,
        }
    }
}

/// A CSV table: one documented column per header entry.
pub struct Table<'a> {
    pub columns: &'a [(&'a str, &'a str)],
}

impl Table<'_> {
    fn comment(&self) -> String {
        let parts: Vec<String> = self
            .columns
            .iter()
            .map(|(n, d)| format!("{n} = {d}"))
            .collect();
        format!("# columns: {}\n", parts.join("; "))
    }

    /// Writes the comment line, the header and one row per record; an empty
    /// record list yields a header-only file.
    pub fn write<R: Serialize>(&self, path: &Path, rows: &[R]) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(self.comment().as_bytes())
            .map_err(|e| CliError::io(path, e))?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.0))
            .map_err(|e| CliError::io(path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: f64,
        distance: f64,
    }

    const COLUMNS: &[(&str, &str)] = &[("n", "sequence index"), ("distance", "orbit distance")];

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        Table { columns: COLUMNS }.write::<Row>(&path, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "# columns: n = sequence index; distance = orbit distance\nn,distance\n"
        );
    }

    #[test]
    fn rows_follow_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        Table { columns: COLUMNS }
            .write(
                &path,
                &[Row {
                    n: 2.0,
                    distance: 0.5,
                }],
            )
            .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().nth(2), Some("2.0,0.5"));
    }

    #[test]
    fn unwritable_path_is_io() {
        let err = write_json(Path::new("/nonexistent-dir/x.json"), &1).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}

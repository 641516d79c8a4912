//! Output envelope shared by all subcommands: CSV or JSON, to standard
//! output or a file. Content is rendered to a buffer first so file writes
//! are all-or-nothing and repeated runs are byte-identical.

use crate::CliError;
use clap::{Args, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl OutputOpts {
    pub fn write(&self, content: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, content).map_err(|e| {
                CliError::Io(format!("failed to write {}: {e}", path.display()))
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(content.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("failed to serialize output: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Parse a comma-separated list of values for a flag.
pub fn parse_list<T: std::str::FromStr>(raw: &str, flag: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<T>()
                .map_err(|e| CliError::Usage(format!("invalid value '{item}' for {flag}: {e}")))
        })
        .collect()
}

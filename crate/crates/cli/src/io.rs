//! Instance and schedule file ingestion, plus the instance digest recorded
//! in report headers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use nightsched_core::ephemeris::Instant;
use nightsched_core::model::{ObservationEntry, Schedule};
use nightsched_core::ProblemInstance;

/// Errors surfaced to the command line, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: invalid instance: {message}")]
    Validation { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    ScheduleFile {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Runtime(#[from] nightsched_core::Error),
}

impl CliError {
    /// 2 usage (clap's own), 3 bad input, 4 runtime range error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::Validation { .. }
            | CliError::ScheduleFile { .. } => 3,
            CliError::Runtime(nightsched_core::Error::MoonRange { .. }) => 4,
            CliError::Runtime(_) => 3,
        }
    }
}

/// Loads and validates a problem instance from its JSON file.
pub fn load_instance(path: &Path) -> Result<ProblemInstance, CliError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: display.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|err| {
        if err.classify() == serde_json::error::Category::Data {
            CliError::Validation {
                path: display,
                message: err.to_string(),
            }
        } else {
            CliError::Parse {
                path: display,
                line: err.line(),
                column: err.column(),
                message: err.to_string(),
            }
        }
    })
}

/// First 8 digest bytes of the file, as `sha256=<hex>`, for report headers.
pub fn file_digest(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(digest_label(&bytes))
}

pub fn digest_label(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut label = String::from("sha256=");
    for byte in &hash[..8] {
        write!(label, "{byte:02x}").expect("writing to a String cannot fail");
    }
    label
}

/// Parses a schedule file: one `start ticket loops` row per entry, where
/// `start` is Unix seconds, `ticket` a ticket id of the instance and `loops`
/// a positive integer. Blank lines and `#` comments are skipped, and rows
/// copied verbatim from a report (`SCHED member start ticket loops`) are
/// accepted too.
pub fn load_schedule_file(
    path: &Path,
    instance: &ProblemInstance,
) -> Result<Schedule, CliError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: display.clone(),
        source,
    })?;
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let fail = |message: String| CliError::ScheduleFile {
            path: display.clone(),
            line,
            message,
        };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.first() == Some(&"SCHED") {
            if fields.len() != 5 {
                return Err(fail(format!(
                    "expected `SCHED member start ticket loops`, got {} fields",
                    fields.len()
                )));
            }
            fields.drain(..2);
        }
        if fields.len() != 3 {
            return Err(fail(format!(
                "expected `start ticket loops`, got {} fields",
                fields.len()
            )));
        }
        let start: f64 = fields[0]
            .parse()
            .map_err(|e| fail(format!("bad start `{}`: {e}", fields[0])))?;
        if !start.is_finite() {
            return Err(fail(format!("start `{}` is not finite", fields[0])));
        }
        let ticket = instance
            .ticket_index_by_id(fields[1])
            .ok_or_else(|| fail(format!("unknown ticket id `{}`", fields[1])))?;
        let loops: u32 = fields[2]
            .parse()
            .map_err(|e| fail(format!("bad loop count `{}`: {e}", fields[2])))?;
        entries.push(ObservationEntry {
            start: Instant::from_unix(start),
            ticket,
            loops,
        });
    }
    Ok(Schedule { entries })
}

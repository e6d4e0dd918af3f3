//! Exit codes, JSON error records and the summary table.

use mor_core::MorError;
use serde_json::{json, Value};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// A failed run: exit code plus the record printed on standard error.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl Failure {
    pub fn new(exit: u8, code: &'static str, message: String) -> Self {
        Failure {
            exit,
            code,
            message,
            details: Value::Null,
        }
    }

    pub fn usage(message: String) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }

    pub fn config(message: String) -> Self {
        Self::new(EXIT_USAGE, "config", message)
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn record(&self) -> Value {
        let mut error = json!({ "code": self.code, "exit": self.exit, "message": self.message });
        if !self.details.is_null() {
            error["details"] = self.details.clone();
        }
        json!({ "error": error })
    }

    /// Prints the JSON record as one line on standard error.
    pub fn emit(&self) {
        eprintln!("{}", self.record());
    }
}

impl From<MorError> for Failure {
    fn from(e: MorError) -> Self {
        let message = e.to_string();
        let (exit, code) = match &e {
            MorError::Unstable(_) | MorError::ProjectedUnstable { .. } => (EXIT_NUMERICAL, "unstable"),
            MorError::SingularPencil { .. } | MorError::Singular { .. } => (EXIT_NUMERICAL, "singular"),
            e if e.is_numerical() => (EXIT_NUMERICAL, "numerical"),
            MorError::InvalidArgument(_) => (EXIT_USAGE, "invalid-argument"),
            MorError::Io { .. } => (EXIT_INPUT, "io"),
            MorError::Syntax { .. }
            | MorError::DuplicateElement { .. }
            | MorError::UndeclaredInductor { .. }
            | MorError::InvalidValue { .. }
            | MorError::Format { .. } => (EXIT_INPUT, "parse"),
            _ => (EXIT_INPUT, "invalid-model"),
        };
        let failure = Failure::new(exit, code, message);
        match e {
            MorError::SingularCapacitance { nodes } => failure.with_details(json!({ "nodes": nodes })),
            MorError::Syntax { span, .. } | MorError::InvalidValue { span, .. } => {
                failure.with_details(json!({ "line": span.line, "column": span.column }))
            }
            _ => failure,
        }
    }
}

/// Peak resident set size in bytes from `/proc/self/status`, where the
/// kernel provides it.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Two-column table, labels left-aligned.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use jjbath::series::CorrelationSeries;
use serde::Serialize;

use crate::config::Settings;
use crate::CliError;

pub const UNITS: &str = "hbar = k_B = e = 1";

/// Destination directory plus the parameter echo stamped on each file.
pub struct Output {
    dir: PathBuf,
    echo: serde_json::Value,
    pub written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, settings: &Settings) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            echo: serde_json::to_value(settings).expect("settings serialize"),
            written: Vec::new(),
        })
    }

    /// Adds preset-specific values to the echo.
    pub fn echo_extra(&mut self, key: &str, value: impl Serialize) {
        self.echo[key] = serde_json::to_value(value).expect("echo value serializes");
    }

    fn header(&self) -> String {
        format!("# units: {UNITS}\n# params: {}\n", self.echo)
    }

    /// `body` should not carry its own units line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, self.header() + body)?;
        self.written.push(path);
        Ok(())
    }

    /// Writes a table from named columns of equal length.
    pub fn table(&mut self, name: &str, columns: &[(&str, &[f64])]) -> Result<(), CliError> {
        let n = columns.first().map_or(0, |c| c.1.len());
        debug_assert!(columns.iter().all(|c| c.1.len() == n));
        let mut s = columns.iter().map(|c| c.0).collect::<Vec<_>>().join(",");
        s.push('\n');
        for i in 0..n {
            let row: Vec<String> = columns.iter().map(|c| format!("{:.12e}", c.1[i])).collect();
            writeln!(s, "{}", row.join(",")).unwrap();
        }
        self.csv(name, &s)
    }

    pub fn series(&mut self, name: &str, g: &CorrelationSeries) -> Result<(), CliError> {
        self.csv(name, &g.to_csv())
    }

    /// JSON reports carry `unit_convention` and `params` fields in place of a comment header.
    /// Returns the pretty-printed document.
    pub fn json(&mut self, name: &str, report: impl Serialize) -> Result<String, CliError> {
        let mut v = serde_json::to_value(report)?;
        if let serde_json::Value::Object(m) = &mut v {
            m.insert("unit_convention".into(), UNITS.into());
            m.insert("params".into(), self.echo.clone());
        }
        let text = serde_json::to_string_pretty(&v)?;
        let path = self.dir.join(name);
        std::fs::write(&path, format!("{text}\n"))?;
        self.written.push(path);
        Ok(text)
    }
}

//! Report files. Every number is a decimal string; the report carries the
//! precision it was computed at and the resolved configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Format, RunConfig};

/// Rows for CSV and aligned-text output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_text(&self) -> String {
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                if i < width.len() {
                    width[i] = width[i].max(c.chars().count());
                }
            }
        }
        let line = |cells: &[String]| {
            let mut s = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
            s.push('\n');
            s
        };
        let mut out = line(&self.headers);
        out.push_str(&line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub precision_bits: usize,
    pub passed: bool,
    pub config: BTreeMap<String, String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub error: Option<String>,
    pub table: Table,
    #[serde(default)]
    pub body: Value,
}

impl Report {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Report {
            command: command.into(),
            precision_bits: cfg.precision_bits,
            passed: false,
            config: cfg.to_pairs(),
            warnings: Vec::new(),
            error: None,
            table: Table::default(),
            body: Value::Null,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading report {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing report {}", path.display()))
    }

    /// Writes `<command>.json` always, plus `<command>.csv` or
    /// `<command>.txt` for the other formats. Returns the paths written.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut out = Vec::new();
        let json = dir.join(format!("{}.json", self.command));
        fs::write(&json, serde_json::to_string_pretty(self)?).with_context(|| format!("writing {}", json.display()))?;
        out.push(json);
        let extra = match format {
            Format::Json => None,
            Format::Csv => Some(("csv", self.table.to_csv()?)),
            Format::Table => Some(("txt", self.render_text())),
        };
        if let Some((ext, text)) = extra {
            let p = dir.join(format!("{}.{ext}", self.command));
            fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            out.push(p);
        }
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)?,
            Format::Csv => self.table.to_csv()?,
            Format::Table => self.render_text(),
        })
    }

    fn render_text(&self) -> String {
        let mut s = format!(
            "{}: {} (precision {} bits)\n",
            self.command,
            if self.passed { "PASS" } else { "FAIL" },
            self.precision_bits
        );
        if let Some(e) = &self.error {
            s.push_str(&format!("error: {e}\n"));
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s.push_str(&self.table.to_text());
        s
    }
}

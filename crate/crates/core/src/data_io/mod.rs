//! File formats, bundled reference tables and report rendering.
//!
//! All delimited files are comma-separated with a mandatory header row and a
//! decimal point. Lines starting with `#` are comments; a `# format_version=N`
//! comment, when present, must name a supported version.

mod config;
mod market;
mod portfolio;
mod report;
mod tables;

use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};

pub use config::{load_synth_config, parse_synth_config, KeyValueFile};
pub use market::{load_spreads, load_yields, parse_spreads, parse_yields, render_yields, SpreadHistory};
pub use portfolio::{load_portfolio, load_sector_stats, parse_portfolio, parse_sector_stats, stats_from_tables};
pub use report::{
    aligned_series_report, correlation_report, cumulative_report, duration_report, factor_series_report,
    parse_delimited, reference_table_reports, render_report, render_report_with_width, render_reports, scenario_report,
    Cell, Format, Report,
};
pub use tables::{
    grid_columns, grid_row_label, reference_table, Calibration, ExtraFactor, ExtraGrid, ReferenceTables, SectorGrid,
    TreasuryFactor, Vintage,
};

/// Version stamped on every file this crate writes.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn check_version(value: &str, path: &Path, line: u64) -> Result<()> {
    match value.trim().parse::<u32>() {
        Ok(FORMAT_VERSION) => Ok(()),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("unsupported format_version '{}'", value.trim()),
        }),
    }
}

/// A parsed delimited file: header plus rows tagged with their line numbers.
pub(crate) struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    pub(crate) fn parse(text: &str, path: &Path) -> Result<Self> {
        for (i, line) in text.lines().enumerate() {
            if let Some(v) = line.trim_start().strip_prefix('#').and_then(|c| {
                c.trim()
                    .strip_prefix("format_version")
                    .map(|r| r.trim_start().trim_start_matches('='))
            }) {
                check_version(v, path, i as u64 + 1)?;
            }
        }
        let parse_err = |line: u64, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let fields: Vec<String> = rec.iter().map(str::to_string).collect();
            if fields.iter().all(|f| f.is_empty()) {
                continue;
            }
            match &header {
                None => header = Some(fields.iter().map(|h| h.to_ascii_lowercase()).collect()),
                Some(h) if h.len() != fields.len() => {
                    return Err(parse_err(
                        line,
                        format!("expected {} fields, found {}", h.len(), fields.len()),
                    ))
                }
                Some(_) => rows.push((line, fields)),
            }
        }
        let header = header.ok_or_else(|| parse_err(1, "missing header row".into()))?;
        Ok(Self {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    pub(crate) fn col(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: self.path.clone(),
                column: name.to_string(),
            })
    }

    pub(crate) fn rows(&self) -> &[(u64, Vec<String>)] {
        &self.rows
    }

    pub(crate) fn path(&self) -> &Path {
        &self.path
    }

    pub(crate) fn error(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn number(&self, line: u64, raw: &str, column: &str) -> Result<f64> {
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(line, format!("column '{column}': '{raw}' is not a finite number"))),
        }
    }

    pub(crate) fn date(&self, line: u64, raw: &str) -> Result<NaiveDate> {
        parse_iso_date(raw).ok_or_else(|| self.error(line, format!("'{raw}' is not a YYYY-MM-DD date")))
    }
}

pub(crate) fn parse_iso_date(raw: &str) -> Option<NaiveDate> {
    if raw.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()
}

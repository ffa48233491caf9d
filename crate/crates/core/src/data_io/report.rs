//! Tabular report rendering as comma-separated text or aligned columns.
//!
//! Delimited output starts with `# format_version=1` and `# title=...`
//! comment lines followed by a mandatory header row.

use crate::covariance::{AlignedSeries, CorrelationMatrix};
use crate::curve_factors::{CumulativeFactors, FactorSeries};
use crate::duration::DurationReport;
use crate::error::{invalid, Result};
use crate::scenario::ScenarioResult;
use crate::sector_model::Industry;

use super::tables::{grid_columns, grid_row_label, ExtraFactor, ReferenceTables, SectorGrid, TreasuryFactor};
use super::FORMAT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Delimited,
    Aligned,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// Correlation, rendered as a whole percent with its sign, e.g. `-33%`.
    Correlation(f64),
    /// Multiplier, rendered as a whole percent, e.g. `81%`.
    Multiplier(f64),
    /// Years, three decimals.
    Duration(f64),
    /// Basis points, one decimal.
    Bp(f64),
    /// Free-form number with a fixed number of decimals.
    Number(f64, usize),
}

fn whole_percent(v: f64) -> String {
    let p = (v * 100.0).round();
    // avoid "-0%"
    let p = if p == 0.0 { 0.0 } else { p };
    format!("{p:.0}%")
}

fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Correlation(v) | Cell::Multiplier(v) => whole_percent(*v),
            Cell::Duration(v) => fixed(*v, 3),
            Cell::Bp(v) => fixed(*v, 1),
            Cell::Number(v, d) => fixed(*v, *d),
        }
    }

    fn is_text(&self) -> bool {
        matches!(self, Cell::Text(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn delimited(report: &Report) -> String {
    let mut out = format!("# format_version={FORMAT_VERSION}\n# title={}\n", report.title);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(&report.columns).expect("in-memory write");
    for row in &report.rows {
        w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    out.push_str(&String::from_utf8(bytes).expect("utf-8 input"));
    out
}

fn aligned(report: &Report, min_width: usize) -> String {
    let rendered: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::render).collect())
        .collect();
    let widths: Vec<usize> = (0..report.columns.len())
        .map(|j| {
            rendered
                .iter()
                .map(|r| r[j].chars().count())
                .chain(std::iter::once(report.columns[j].chars().count()))
                .max()
                .unwrap_or(0)
                .max(min_width)
        })
        .collect();
    // text columns are left-aligned, numbers right-aligned
    let left: Vec<bool> = (0..report.columns.len())
        .map(|j| report.rows.iter().all(|r| r[j].is_text()))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if left[j] {
                    format!("{c:<w$}", w = widths[j])
                } else {
                    format!("{c:>w$}", w = widths[j])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = format!("{}\n", report.title);
    out.push_str(&line(&report.columns));
    out.push('\n');
    for r in &rendered {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub fn render_report(report: &Report, format: Format) -> String {
    render_report_with_width(report, format, 0)
}

/// As [`render_report`], padding aligned columns to at least `min_width`.
pub fn render_report_with_width(report: &Report, format: Format, min_width: usize) -> String {
    match format {
        Format::Delimited => delimited(report),
        Format::Aligned => aligned(report, min_width),
    }
}

/// Renders several reports separated by blank lines.
pub fn render_reports(reports: &[Report], format: Format, min_width: usize) -> String {
    reports
        .iter()
        .map(|r| render_report_with_width(r, format, min_width))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Reads delimited reports back; every cell comes back as text.
pub fn parse_delimited(text: &str) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    for block in text.split("\n\n").filter(|b| !b.trim().is_empty()) {
        let mut title = None;
        let mut body = String::new();
        for line in block.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                if let Some(v) = meta.strip_prefix("format_version=") {
                    if v.trim() != FORMAT_VERSION.to_string() {
                        return Err(invalid(format!("unsupported format_version {v}")));
                    }
                } else if let Some(t) = meta.strip_prefix("title=") {
                    title = Some(t.to_string());
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| invalid(format!("bad header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut report = Report::new(title.unwrap_or_default(), columns);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| invalid(format!("bad record: {e}")))?;
            report
                .rows
                .push(rec.iter().map(|c| Cell::Text(c.to_string())).collect());
        }
        reports.push(report);
    }
    Ok(reports)
}

fn sector_grid_report(title: String, grid: &SectorGrid, cell: fn(f64) -> Cell) -> Report {
    let mut columns = vec!["industry".to_string()];
    columns.extend(grid_columns().iter().map(|s| s.to_string()));
    let mut r = Report::new(title, columns);
    for ind in Industry::ALL {
        let mut row = vec![Cell::Text(grid_row_label(ind).to_string())];
        row.extend(grid[ind.index()].iter().map(|v| cell(f64::from(*v) / 100.0)));
        r.push(row);
    }
    r
}

/// The four grids of one bundled table set: shift correlations, twist
/// correlations, non-sector spread factor correlations, multipliers.
pub fn reference_table_reports(t: &ReferenceTables) -> Vec<Report> {
    let tag = format!("{}-term model, {}", t.calibration.name(), t.vintage);
    let mut extra = Report::new(
        format!("Additional spread factor correlations with Treasury curve changes ({tag})"),
        vec![
            "factor".to_string(),
            TreasuryFactor::Shift.name().to_string(),
            TreasuryFactor::Twist.name().to_string(),
        ],
    );
    for f in ExtraFactor::ALL {
        extra.push(vec![
            Cell::Text(f.name().to_string()),
            Cell::Correlation(t.extra_corr(f, TreasuryFactor::Shift)),
            Cell::Correlation(t.extra_corr(f, TreasuryFactor::Twist)),
        ]);
    }
    vec![
        sector_grid_report(
            format!("Industry portfolio spread correlations with Treasury curve shifts ({tag})"),
            &t.shift_corr,
            Cell::Correlation,
        ),
        sector_grid_report(
            format!("Industry portfolio spread correlations with Treasury curve twists ({tag})"),
            &t.twist_corr,
            Cell::Correlation,
        ),
        extra,
        sector_grid_report(
            format!("Effective duration multipliers for industry/rating sectors ({tag})"),
            &t.multipliers,
            Cell::Multiplier,
        ),
    ]
}

pub fn duration_report(d: &DurationReport) -> Report {
    let mut r = Report::new(
        "Effective duration",
        ["d_mod", "d_spread", "d_eff", "m_eff"].map(String::from).to_vec(),
    );
    r.push(vec![
        Cell::Duration(d.d_mod),
        Cell::Duration(d.d_spread),
        Cell::Duration(d.d_eff),
        Cell::Multiplier(d.m_eff),
    ]);
    r
}

pub fn scenario_report(s: &ScenarioResult) -> Report {
    let title = if s.twist_approximated {
        "Scenario P&L per 100 (twist yield move approximated at nearest key rate)"
    } else {
        "Scenario P&L per 100"
    };
    let mut r = Report::new(
        title,
        ["id", "delta_y_bp", "delta_s_bp", "pnl_per_100", "price_change"]
            .map(String::from)
            .to_vec(),
    );
    for p in &s.positions {
        r.push(vec![
            Cell::Text(p.id.clone()),
            Cell::Bp(p.delta_y),
            Cell::Bp(p.delta_s),
            Cell::Number(p.pnl, 4),
            Cell::Number(p.price_change, 4),
        ]);
    }
    r.push(vec![
        Cell::Text("TOTAL".into()),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
        Cell::Number(s.total, 4),
        Cell::Text(String::new()),
    ]);
    r
}

pub fn factor_series_report(s: &FactorSeries) -> Report {
    let mut r = Report::new(
        "Treasury shift and twist factor changes (bp)",
        ["date", "shift", "twist", "residual_norm"].map(String::from).to_vec(),
    );
    for i in 0..s.len() {
        r.push(vec![
            Cell::Text(s.timestamps[i].to_string()),
            Cell::Number(s.shift[i], 4),
            Cell::Number(s.twist[i], 4),
            Cell::Number(s.residual_norms[i], 4),
        ]);
    }
    r
}

pub fn cumulative_report(c: &CumulativeFactors) -> Report {
    let mut r = Report::new(
        "Cumulative Treasury shift and twist factors (bp, zero at start)",
        ["date", "shift", "twist"].map(String::from).to_vec(),
    );
    for i in 0..c.timestamps.len() {
        r.push(vec![
            Cell::Text(c.timestamps[i].to_string()),
            Cell::Number(c.shift[i], 4),
            Cell::Number(c.twist[i], 4),
        ]);
    }
    r
}

pub fn aligned_series_report(title: &str, s: &AlignedSeries) -> Report {
    let mut columns = vec!["date".to_string()];
    columns.extend(s.labels().iter().cloned());
    let mut r = Report::new(title, columns);
    for (i, d) in s.timestamps().iter().enumerate() {
        let mut row = vec![Cell::Text(d.to_string())];
        row.extend(s.values().row(i).iter().map(|v| Cell::Number(*v, 6)));
        r.push(row);
    }
    r
}

pub fn correlation_report(title: &str, c: &CorrelationMatrix) -> Report {
    let mut columns = vec!["factor".to_string(), "vol".to_string()];
    columns.extend(c.labels().iter().cloned());
    let mut r = Report::new(title, columns);
    for (i, l) in c.labels().iter().enumerate() {
        let mut row = vec![Cell::Text(l.clone()), Cell::Number(c.vols()[i], 3)];
        row.extend(c.matrix().row(i).iter().map(|v| Cell::Number(*v, 4)));
        r.push(row);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_rendering() {
        assert_eq!(Cell::Correlation(-0.33).render(), "-33%");
        assert_eq!(Cell::Correlation(0.13).render(), "13%");
        assert_eq!(Cell::Correlation(-0.001).render(), "0%");
        assert_eq!(Cell::Multiplier(0.8075).render(), "81%");
        assert_eq!(Cell::Multiplier(0.745).render(), "75%");
        assert_eq!(Cell::Duration(5.590123).render(), "5.590");
        assert_eq!(Cell::Bp(-2.5465).render(), "-2.5");
        assert_eq!(Cell::Number(-0.00001, 4).render(), "0.0000");
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("nothing", vec!["a".into(), "b".into()]);
        assert_eq!(
            render_report(&r, Format::Delimited),
            "# format_version=1\n# title=nothing\na,b\n"
        );
        assert_eq!(render_report(&r, Format::Aligned), "nothing\na  b\n");
    }

    #[test]
    fn delimited_quotes_commas() {
        let mut r = Report::new("t", vec!["name".into(), "v".into()]);
        r.push(vec![Cell::Text("Insurance, REITS".into()), Cell::Correlation(0.1)]);
        let text = render_report(&r, Format::Delimited);
        assert!(text.ends_with("\"Insurance, REITS\",10%\n"));
        let back = parse_delimited(&text).unwrap();
        assert_eq!(render_report(&back[0], Format::Delimited), text);
    }

    #[test]
    fn aligned_pads_columns() {
        let mut r = Report::new("t", vec!["name".into(), "value".into()]);
        r.push(vec![Cell::Text("x".into()), Cell::Duration(1.0)]);
        assert_eq!(render_report(&r, Format::Aligned), "t\nname  value\nx     1.000\n");
        assert_eq!(
            render_report_with_width(&r, Format::Aligned, 6),
            "t\nname     value\nx        1.000\n"
        );
    }

    #[test]
    fn rejects_future_format() {
        assert!(parse_delimited("# format_version=2\na\n1\n").is_err());
    }
}

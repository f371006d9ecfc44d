//! Result files: the run CSV, its companion config JSON and table output.

use std::fs;
use std::path::Path;

use super::aggregate::RelativeTable;
use super::config::ExperimentConfig;
use super::runner::RunRecord;
use crate::error::{Error, Result};

pub const HEADER: [&str; 15] = [
    "seed",
    "algorithm",
    "instance",
    "K",
    "T",
    "epsilon",
    "delta",
    "mode",
    "total_regret",
    "explore_pulls",
    "commit_pulls",
    "peak_retained",
    "committed_gap",
    "wall_time_ms",
    "error",
];

/// `%g` with six significant digits.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_owned(),
        line,
        message: e.to_string(),
    }
}

/// CSV text of `records`. With `canonical`, wall times are written as zero
/// so the output depends only on the config.
pub fn records_to_csv(records: &[RunRecord], canonical: bool) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in records {
        let wall = if canonical { 0.0 } else { r.wall_time_ms };
        w.write_record([
            r.seed.to_string(),
            r.algorithm.to_string(),
            r.instance.to_string(),
            r.num_arms.to_string(),
            r.horizon.to_string(),
            format_g6(r.epsilon),
            format_g6(r.delta),
            r.mode.to_string(),
            format_g6(r.total_regret),
            r.explore_pulls.to_string(),
            r.commit_pulls.to_string(),
            r.peak_retained.to_string(),
            format_g6(r.committed_gap),
            format_g6(wall),
            r.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_records(records: &[RunRecord], path: &Path, canonical: bool) -> Result<()> {
    fs::write(path, records_to_csv(records, canonical)).map_err(io_err(path))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, path: &Path) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let line = rec.position().map_or(0, |p| p.line());
    let raw = rec.get(idx).ok_or_else(|| Error::Parse {
        path: path.to_owned(),
        line,
        message: format!("missing column `{}`", HEADER[idx]),
    })?;
    raw.parse().map_err(|e| Error::Parse {
        path: path.to_owned(),
        line,
        message: format!("column `{}`: cannot parse `{raw}`: {e}", HEADER[idx]),
    })
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_records(&text, path)
}

/// Parses CSV text written by [`records_to_csv`]; `path` is only used in
/// error messages.
pub fn parse_records(text: &str, path: &Path) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(HEADER) {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: 1,
            message: format!("unexpected header, want {}", HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let error: String = field(&rec, 14, path)?;
        out.push(RunRecord {
            seed: field(&rec, 0, path)?,
            algorithm: field(&rec, 1, path)?,
            instance: field(&rec, 2, path)?,
            num_arms: field(&rec, 3, path)?,
            horizon: field(&rec, 4, path)?,
            epsilon: field(&rec, 5, path)?,
            delta: field(&rec, 6, path)?,
            mode: field(&rec, 7, path)?,
            total_regret: field(&rec, 8, path)?,
            explore_pulls: field(&rec, 9, path)?,
            commit_pulls: field(&rec, 10, path)?,
            peak_retained: field(&rec, 11, path)?,
            committed_gap: field(&rec, 12, path)?,
            wall_time_ms: field(&rec, 13, path)?,
            error: (!error.is_empty()).then_some(error),
        });
    }
    Ok(out)
}

/// Resolved config plus the aggregation convention, written next to the CSV.
pub fn write_config_json(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let doc = serde_json::json!({
        "config": cfg,
        "aggregation": "ratio of aggregates against uniform-exploration",
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    /// Picks the format from the file extension; `.md` means markdown.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("md") => TableFormat::Markdown,
            _ => TableFormat::Csv,
        }
    }
}

const TABLE_HEADER: [&str; 8] = [
    "instance",
    "K",
    "T",
    "algorithm",
    "runs",
    "mean_regret",
    "relative_mean",
    "relative_median",
];

fn table_rows(table: &RelativeTable) -> Vec<[String; 8]> {
    table
        .entries
        .iter()
        .map(|e| {
            [
                e.setting.kind.to_string(),
                e.setting.num_arms.to_string(),
                e.setting.horizon.to_string(),
                e.algorithm.to_string(),
                e.runs.to_string(),
                format_g6(e.mean_regret),
                format_g6(e.relative_mean),
                format_g6(e.relative_median),
            ]
        })
        .collect()
}

pub fn render_table(table: &RelativeTable, format: TableFormat) -> String {
    let rows = table_rows(table);
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(TABLE_HEADER).expect("in-memory write");
            for row in &rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        TableFormat::Markdown => {
            let mut out = format!("| {} |\n", TABLE_HEADER.join(" | "));
            out += &format!("|{}\n", "---|".repeat(TABLE_HEADER.len()));
            for row in &rows {
                out += &format!("| {} |\n", row.join(" | "));
            }
            out
        }
    }
}

pub fn write_table(table: &RelativeTable, path: &Path) -> Result<()> {
    fs::write(path, render_table(table, TableFormat::from_path(path))).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(0.0), "0");
        assert_eq!(format_g6(1.0), "1");
        assert_eq!(format_g6(0.1), "0.1");
        assert_eq!(format_g6(123456.7), "123457");
        assert_eq!(format_g6(999999.5), "1e+06");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(0.000123456789), "0.000123457");
        assert_eq!(format_g6(0.0000123456789), "1.23457e-05");
        assert_eq!(format_g6(-2.5), "-2.5");
        assert_eq!(format_g6(0.53125), "0.53125");
    }

    #[test]
    fn empty_records_give_header_only() {
        let csv = records_to_csv(&[], true);
        assert_eq!(csv, format!("{}\n", HEADER.join(",")));
        assert!(parse_records(&csv, Path::new("x.csv")).unwrap().is_empty());
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = format!(
            "{}\n0,bucket-log,uniform,notanumber,1,1,1,theory,1,1,1,1,1,1,\n",
            HEADER.join(",")
        );
        match parse_records(&text, Path::new("r.csv")) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("`K`"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}

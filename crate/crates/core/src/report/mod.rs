//! Reports, scenario files and the commands behind the `workfunc` binary.

mod commands;
mod published;
mod scenario;
mod tables;

pub use commands::{
    cmd_catalog, cmd_estimate, cmd_game, cmd_validate, CommandError, GameRun, ValidationRun, DEFAULT_VALIDATION_SEED,
};
pub use published::{PrintedTable3Row, SCAN_WAITS_PRINTED, TABLE1_PRINTED, TABLE2_PRINTED, TABLE3_FLEET, TABLE3_PRINTED};
pub use scenario::{load_scenario, CatalogChoice, FleetSpec, Scenario, ScenarioError, ScenarioKind, ScenarioSpec};
pub use tables::{cmd_table, rounds_to_printed, TableReport};

use std::fmt::Write as _;

use thiserror::Error;

use crate::time::sig3;

/// Process exit codes of the command-line front end.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const GAME_LOST: i32 = 3;
    pub const FAULT: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Recomputes a figure that appears in print.
    Published,
    /// Computed from the model with no printed counterpart.
    Derived,
    /// Measured by running an experiment.
    Simulation,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Published => "published",
            Provenance::Derived => "derived",
            Provenance::Simulation => "simulation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "published" => Some(Provenance::Published),
            "derived" => Some(Provenance::Derived),
            "simulation" => Some(Provenance::Simulation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(x) if x.fract() == 0.0 && x.abs() < 1e7 => format!("{x}"),
            Cell::Number(x) => sig3(*x),
            Cell::Empty => "-".into(),
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(x) => format!("{x:e}"),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub numeric: bool,
}

impl Column {
    pub fn text(name: &str) -> Self {
        Self {
            name: name.into(),
            numeric: false,
        }
    }

    pub fn number(name: &str) -> Self {
        Self {
            name: name.into(),
            numeric: true,
        }
    }

    fn header(&self) -> String {
        if self.numeric {
            format!("{}:num", self.name)
        } else {
            self.name.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub provenance: Provenance,
    /// Where a published row's figure appears, e.g. `table-1 ati-radeon-5870`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("row has {found} cells but the report has {expected} columns")]
    Width { expected: usize, found: usize },
    #[error("published row without a source locator")]
    MissingSource,
    #[error("column {column:?} is numeric but got a text cell")]
    TextInNumericColumn { column: String },
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: Vec<Column>) -> Self {
        Self {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    /// Empty text cells are stored as [`Cell::Empty`].
    pub fn push(&mut self, cells: Vec<Cell>, provenance: Provenance, source: &str) -> Result<(), ReportError> {
        let cells: Vec<Cell> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Text(s) if s.is_empty() => Cell::Empty,
                c => c,
            })
            .collect();
        if cells.len() != self.columns.len() {
            return Err(ReportError::Width {
                expected: self.columns.len(),
                found: cells.len(),
            });
        }
        if provenance == Provenance::Published && source.trim().is_empty() {
            return Err(ReportError::MissingSource);
        }
        for (c, col) in cells.iter().zip(&self.columns) {
            if col.numeric && matches!(c, Cell::Text(_)) {
                return Err(ReportError::TextInNumericColumn {
                    column: col.name.clone(),
                });
            }
        }
        self.rows.push(Row {
            cells,
            provenance,
            source: source.into(),
        });
        Ok(())
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let mut header: Vec<String> = self.columns.iter().map(|c| c.name.clone()).collect();
        header.push("provenance".into());
        header.push("source".into());
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v: Vec<String> = r.cells.iter().map(Cell::display).collect();
                v.push(r.provenance.as_str().into());
                v.push(if r.source.is_empty() { "-".into() } else { r.source.clone() });
                v
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let numeric: Vec<bool> = self.columns.iter().map(|c| c.numeric).chain([false, false]).collect();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .zip(&numeric)
                .map(|((c, &w), &num)| if num { format!("{c:>w$}") } else { format!("{c:<w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        line(&header, &mut out);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        let _ = writeln!(out, "{}", rule.join("  "));
        for row in &body {
            line(row, &mut out);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.columns.iter().map(Column::header).collect();
        header.push("provenance".into());
        header.push("source".into());
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec: Vec<String> = r.cells.iter().map(Cell::csv_field).collect();
            rec.push(r.provenance.as_str().into());
            rec.push(r.source.clone());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    /// Parses the output of [`Report::to_csv`]. The title is not stored in CSV.
    pub fn from_csv(text: &str) -> Result<Self, ReportError> {
        let err = |e: csv::Error| ReportError::Csv(e.to_string());
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(err)?.clone();
        let n = headers.len();
        if n < 2 || &headers[n - 2] != "provenance" || &headers[n - 1] != "source" {
            return Err(ReportError::Csv("missing provenance/source columns".into()));
        }
        let columns: Vec<Column> = headers
            .iter()
            .take(n - 2)
            .map(|h| match h.strip_suffix(":num") {
                Some(name) => Column::number(name),
                None => Column::text(h),
            })
            .collect();
        let mut report = Report::new("", columns);
        for rec in rdr.records() {
            let rec = rec.map_err(err)?;
            let mut cells = Vec::with_capacity(n - 2);
            for (field, col) in rec.iter().take(n - 2).zip(&report.columns) {
                cells.push(if field.is_empty() {
                    Cell::Empty
                } else if col.numeric {
                    Cell::Number(
                        field
                            .parse()
                            .map_err(|_| ReportError::Csv(format!("{field:?} in numeric column {}", col.name)))?,
                    )
                } else {
                    Cell::Text(field.into())
                });
            }
            let provenance = Provenance::parse(&rec[n - 2])
                .ok_or_else(|| ReportError::Csv(format!("unknown provenance {:?}", &rec[n - 2])))?;
            report.push(cells, provenance, &rec[n - 1])?;
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Report {
        let mut r = Report::new("t", vec![Column::text("item"), Column::number("value")]);
        r.push(vec![Cell::text("a, \"quoted\""), Cell::Number(1.8275e18)], Provenance::Published, "table-1 x")
            .unwrap();
        r.push(vec![Cell::text("56"), Cell::Empty], Provenance::Derived, "").unwrap();
        r
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let back = Report::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back.columns, r.columns);
        assert_eq!(back.rows, r.rows);
    }

    #[test]
    fn row_validation() {
        let mut r = sample();
        assert!(matches!(r.push(vec![Cell::Empty], Provenance::Derived, ""), Err(ReportError::Width { .. })));
        assert_eq!(
            r.push(vec![Cell::Empty, Cell::Empty], Provenance::Published, " "),
            Err(ReportError::MissingSource)
        );
        assert!(r.push(vec![Cell::Empty, Cell::text("x")], Provenance::Derived, "").is_err());
    }

    #[test]
    fn text_rendering_aligns() {
        let text = sample().render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t");
        assert!(lines[1].starts_with("item"));
        assert!(lines[3].contains("1.83e18"));
        assert!(lines[4].contains(" - "));
    }

    proptest! {
        #[test]
        fn any_numbers_round_trip(xs in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20),
                                  label in "[ -~]{0,12}") {
            let mut r = Report::new("", vec![Column::text("label"), Column::number("x")]);
            for x in &xs {
                r.push(vec![Cell::text(label.clone()), Cell::Number(*x)], Provenance::Simulation, "").unwrap();
            }
            let back = Report::from_csv(&r.to_csv()).unwrap();
            prop_assert_eq!(back.rows.len(), r.rows.len());
            for (a, b) in back.rows.iter().zip(&r.rows) {
                prop_assert_eq!(a.cells[1].as_number().map(f64::to_bits), b.cells[1].as_number().map(f64::to_bits));
                prop_assert_eq!(&a.cells[0], &b.cells[0]);
            }
        }
    }
}

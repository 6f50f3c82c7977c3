//! Rendering of command results as aligned text, CSV or JSON.

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&str]) -> Self {
        Table {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A command result: summary lines (key, value), then tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub summary: Vec<(&'static str, String)>,
    pub tables: Vec<Table>,
}

impl Document {
    pub fn summary(mut self, key: &'static str, value: impl ToString) -> Self {
        self.summary.push((key, value.to_string()));
        self
    }

    pub fn table(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let key_width = self.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            out.push_str(&format!("{k:<key_width$}  {v}\n"));
        }
        for table in &self.tables {
            if !out.is_empty() {
                out.push('\n');
            }
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.chars().count()).collect();
            for row in &table.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: Vec<&str>| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            out.push_str(&line(table.columns.iter().map(String::as_str).collect()));
            for row in &table.rows {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
            }
        }
        out
    }

    /// Summary as a two-column `key,value` block, each table after a blank
    /// line.
    fn render_csv(&self) -> String {
        let mut blocks = Vec::new();
        let write = |header: &[String], rows: &mut dyn Iterator<Item = Vec<String>>| -> String {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for row in rows {
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        };
        if !self.summary.is_empty() {
            blocks.push(write(
                &["key".to_string(), "value".to_string()],
                &mut self.summary.iter().map(|(k, v)| vec![k.to_string(), v.clone()]),
            ));
        }
        for table in &self.tables {
            blocks.push(write(&table.columns, &mut table.rows.iter().cloned()));
        }
        blocks.join("\n")
    }

    fn render_json(&self) -> String {
        let summary: serde_json::Map<String, Value> =
            self.summary.iter().map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| json!({"name": t.name, "columns": t.columns, "rows": t.rows}))
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({"summary": summary, "tables": tables})).expect("serializable");
        s.push('\n');
        s
    }
}

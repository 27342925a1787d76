use std::fmt::Write as _;

use qmotzkin::io::format_f64;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_f64(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // NaN and infinities become null
            Cell::Float(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Rows of one command's output, in a fixed column order.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// The table with the effective config echoed as `# key=value` lines
    /// (CSV) or a `config` object (JSON).
    pub fn render(&self, command: &str, cfg: &RunConfig) -> String {
        match cfg.format {
            Format::Csv => {
                let mut s = format!("# qmotzkin {command}\n");
                for (k, v) in cfg.entries() {
                    let _ = writeln!(s, "# {k}={v}");
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let config: Map<String, Value> =
                    cfg.entries().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({
                    "command": command,
                    "config": config,
                    "columns": self.columns,
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_text_with_commas() {
        assert_eq!(Cell::from("0,1,0").csv(), "\"0,1,0\"");
        assert_eq!(Cell::from("plain").csv(), "plain");
        assert_eq!(Cell::from(0.5).csv(), "5.0000000000000000e-1");
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(&["check", "pass"]);
        t.push(vec!["a".into(), true.into()]);
        let cfg = RunConfig {
            format: Format::Json,
            ..RunConfig::default()
        };
        let v: Value = serde_json::from_str(&t.render("verify", &cfg)).unwrap();
        assert_eq!(v["rows"][0]["pass"], Value::Bool(true));
        assert_eq!(v["command"], "verify");
        assert_eq!(v["config"]["q"], "0.5");
    }
}

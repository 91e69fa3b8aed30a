//! Rendering of command results as a table, CSV or JSON.

use heightnum::HeightValue;
use serde::Serialize;

use crate::config::Emit;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    /// exact form of a height, a rational, or free text
    pub symbolic: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), rows: Vec::new() }
    }

    pub fn height(&mut self, name: &str, h: &HeightValue) {
        self.rows.push(Row { name: name.into(), symbolic: h.to_string(), value: Some(h.evaluate()) });
    }

    pub fn number(&mut self, name: &str, x: f64) {
        self.rows.push(Row { name: name.into(), symbolic: String::new(), value: Some(x) });
    }

    pub fn exact(&mut self, name: &str, symbolic: String, x: f64) {
        self.rows.push(Row { name: name.into(), symbolic, value: Some(x) });
    }

    pub fn text(&mut self, name: &str, text: impl Into<String>) {
        self.rows.push(Row { name: name.into(), symbolic: text.into(), value: None });
    }

    pub fn get(&self, name: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn render(&self, emit: Emit) -> String {
        match emit {
            Emit::Table => self.table(),
            Emit::Csv => self.csv(),
            Emit::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
        }
    }

    fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            let pad = " ".repeat(w - r.name.chars().count());
            let line = match (r.symbolic.is_empty(), r.value) {
                (_, None) => format!("{}{pad}  {}", r.name, r.symbolic),
                (true, Some(v)) => format!("{}{pad}  {}", r.name, short(v)),
                (false, Some(v)) => format!("{}{pad}  {}  ≈ {}", r.name, r.symbolic, short(v)),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Rows as `name,symbolic,value` with a header; values in shortest round-trip form.
    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["name", "symbolic", "value"]).expect("in-memory csv");
        for r in &self.rows {
            let v = r.value.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([r.name.as_str(), r.symbolic.as_str(), v.as_str()]).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }
}

/// Tiny magnitudes in exponent form, everything else as the shortest round-trip decimal.
fn short(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

//! Tables, single values and JSON documents, rendered to text.

use serde_json::{Map, Value};

use crate::format::{round12, sig12};

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(usize),
    Real(f64),
}

impl Cell {
    fn text(self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => sig12(x),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(i) => Value::from(i),
            Cell::Real(x) => real(x),
        }
    }
}

/// `x` rounded to twelve digits; non-finite values become `null`.
pub fn real(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// Column names as they appear in CSV headers. JSON keys are the
/// lower-case forms.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Model parameters, echoed in JSON output.
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &'static [&'static str], meta: Map<String, Value>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            meta,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_lowercase(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("model".into(), Value::Object(self.meta.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        json_text(&Value::Object(doc))
    }
}

/// Rounds every float in a JSON tree to twelve significant digits.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => real(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// A gnuplot script that plots the CSV written to `data_path`.
pub fn plot_script(table: &Table, data_path: &str, title: &str) -> String {
    let quoted = data_path.replace('\\', "\\\\").replace('\'', "\\'");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "")));
    match table.columns {
        ["a", "L", "S_bits"] => {
            s.push_str("set xlabel 'a'\nset ylabel 'L'\nset zlabel 'S (bits)'\n");
            s.push_str(&format!(
                "splot '{quoted}' using 1:2:3 with points pt 7 ps 0.5\n"
            ));
        }
        ["rank", "probability"] => {
            s.push_str("set xlabel 'rank'\nset ylabel 'probability'\nset logscale y\n");
            s.push_str(&format!("plot '{quoted}' using 1:2 with impulses\n"));
        }
        [x, y] => {
            s.push_str(&format!("set xlabel '{x}'\nset ylabel '{y}'\n"));
            if *x == "L" && *y == "S_bits" {
                s.push_str("set logscale x 2\n");
            }
            s.push_str(&format!("plot '{quoted}' using 1:2 with linespoints\n"));
        }
        _ => {
            s.push_str(&format!("plot '{quoted}' using 1:2\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut meta = Map::new();
        meta.insert("h".into(), real(1.0));
        let mut t = Table::new(&["L", "S_bits"], meta);
        t.push(vec![Cell::Int(1), Cell::Real(0.5)]);
        t.push(vec![Cell::Int(2), Cell::Real(1.0 / 3.0)]);
        t
    }

    #[test]
    fn csv_has_header_and_lf() {
        let csv = table().to_csv().unwrap();
        assert_eq!(csv, "L,S_bits\n1,0.5\n2,0.333333333333\n");
    }

    #[test]
    fn json_rows_use_lowercase_keys() {
        let v: Value = serde_json::from_str(&table().to_json()).unwrap();
        assert_eq!(v["rows"][1]["s_bits"], Value::from(0.333333333333));
        assert_eq!(v["rows"][0]["l"], Value::from(1));
        assert_eq!(v["model"]["h"], Value::from(1.0));
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(real(f64::INFINITY), Value::Null);
        assert_eq!(
            rounded(serde_json::json!([0.1 + 0.2])),
            serde_json::json!([0.3])
        );
    }

    #[test]
    fn script_mentions_data_file() {
        let s = plot_script(&table(), "out.csv", "profile");
        assert!(s.contains("plot 'out.csv' using 1:2"));
        assert!(s.contains("logscale x 2"));
    }
}

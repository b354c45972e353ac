//! Output tables. JSON is the canonical, lossless form; CSV is the human
//! view with `# key=value` metadata lines and 17 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::Format;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    /// Sorted by key.
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A float cell; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    Value::from(x)
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(_) => csv_cell(v),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => "nan".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(x)) => format!("{x:.16e}"),
            _ => n.to_string(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["c", "y", "note"]);
        t.meta("seed", 7u64);
        t.meta("version", "0.1.0");
        t.push(vec![num(0.1), num(1.0 / 3.0), Value::from("a, b")]);
        t.push(vec![num(-2.0), num(f64::INFINITY), Value::from(true)]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed=7");
        assert_eq!(lines[1], "# version=0.1.0");
        assert_eq!(lines[2], "c,y,note");
        assert_eq!(lines[3], "1.0000000000000001e-1,3.3333333333333331e-1,\"a, b\"");
        assert_eq!(lines[4], "-2.0000000000000000e0,nan,true");
        // 17 significant digits recover the double exactly.
        assert_eq!("3.3333333333333331e-1".parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut t = sample();
        t.push_numbers(&[std::f64::consts::PI, 1e-300, 0.1 + 0.2]);
        let text = t.to_json();
        let back = Table::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.rows[2][2].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }
}

//! Tabular sweep output with fixed float formatting.

use serde_json::{json, Value};

/// Significant digits written for every float.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Num(x) => Some(x),
            Self::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Self::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Self::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

/// `{:.11e}` with negative zero folded into zero.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x + 0.0)
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n', '\r']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) if x.is_finite() => {
            let rounded: f64 = format_float(*x).parse().expect("formatted float parses");
            json!(rounded)
        }
        Cell::Num(_) | Cell::Empty => Value::Null,
        Cell::Int(i) => json!(i),
        Cell::Bool(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column; non-numeric cells become `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(self.column(name)?.into_iter().map(Cell::as_f64).collect())
    }

    /// Rows with a nonempty `error` cell.
    pub fn failed_rows(&self) -> usize {
        self.column("error")
            .map_or(0, |c| c.iter().filter(|e| matches!(e, Cell::Text(s) if !s.is_empty())).count())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with the same rounding as the CSV.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(json_value).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(1.0), "1.00000000000e0");
        assert_eq!(format_float(-0.0), "0.00000000000e0");
        assert_eq!(format_float(-1.234567890123456e-7), "-1.23456789012e-7");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut d = Dataset::new(vec!["x".into(), "label".into(), "n".into()]);
        d.rows.push(vec![Cell::Num(0.5), Cell::from("a,b"), Cell::Int(3)]);
        d.rows.push(vec![Cell::Empty, Cell::from("q\"t"), Cell::Bool(true)]);
        assert_eq!(
            d.to_csv(),
            "x,label,n\n5.00000000000e-1,\"a,b\",3\n,\"q\"\"t\",true\n"
        );
    }

    #[test]
    fn json_mirrors_rounding() {
        let mut d = Dataset::new(vec!["x".into(), "e".into()]);
        d.rows.push(vec![Cell::Num(0.1 + 0.2), Cell::Empty]);
        let v: Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["columns"][0], "x");
        assert_eq!(v["rows"][0][0].as_f64().unwrap(), 0.3);
        assert!(v["rows"][0][1].is_null());
    }

    #[test]
    fn column_access() {
        let mut d = Dataset::new(vec!["a".into(), "error".into()]);
        d.rows.push(vec![Cell::Num(1.0), Cell::from("")]);
        d.rows.push(vec![Cell::Empty, Cell::from("boom")]);
        assert_eq!(d.numbers("a").unwrap(), vec![Some(1.0), None]);
        assert_eq!(d.failed_rows(), 1);
        assert!(d.column("b").is_none());
    }
}

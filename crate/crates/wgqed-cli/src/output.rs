//! Tables written as CSV or JSON, and the reader for both.
//!
//! CSV: `# key: value` metadata lines, a header of `name[unit]` columns, then rows
//! with numbers printed to 17 significant digits. JSON: one object with `meta`
//! (ordered key/value pairs), `columns` and `data` (rows as arrays).

use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{}[{}]", self.name, self.unit)
        }
    }

    fn parse(h: &str) -> Self {
        match h.strip_suffix(']').and_then(|s| s.split_once('[')) {
            Some((name, unit)) => Column { name: name.into(), unit: unit.into() },
            None => Column { name: h.into(), unit: String::new() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|(n, u)| Column { name: (*n).into(), unit: (*u).into() }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn meta_num(&mut self, key: &str, value: f64) {
        self.meta(key, fmt_num(value));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> CliResult<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(Column::header))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => fmt_num(*v),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> CliResult<()> {
        let meta: Vec<Value> = self.meta.iter().map(|(k, v)| json!([k, v])).collect();
        let columns: Vec<Value> = self.columns.iter().map(|c| json!({"name": c.name, "unit": c.unit})).collect();
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(v) => json!(v),
                            Cell::Text(s) => json!(s),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({"meta": meta, "columns": columns, "data": data});
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Validation(format!("unreadable table: {}", msg.into()))
}

/// Parses either format back into a table.
pub fn read_table(text: &str) -> CliResult<Table> {
    if text.trim_start().starts_with('{') {
        read_json(text)
    } else {
        read_csv(text)
    }
}

fn read_csv(text: &str) -> CliResult<Table> {
    let mut meta = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix("# ") else { break };
        let (k, v) = rest.trim_end_matches(['\n', '\r']).split_once(": ").ok_or_else(|| bad(line))?;
        meta.push((k.to_string(), v.to_string()));
        body_start += line.len();
    }
    let mut r = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
    let columns = r.headers()?.iter().map(Column::parse).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|s| s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.to_string())))
                .collect(),
        );
    }
    Ok(Table { meta, columns, rows })
}

fn read_json(text: &str) -> CliResult<Table> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let arr = |key: &str| doc.get(key).and_then(Value::as_array).ok_or_else(|| bad(format!("missing {key}")));
    let meta = arr("meta")?
        .iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([Value::String(k), Value::String(v)]) => Ok((k.clone(), v.clone())),
            _ => Err(bad("meta entry")),
        })
        .collect::<CliResult<_>>()?;
    let columns = arr("columns")?
        .iter()
        .map(|c| {
            let s = |k: &str| c.get(k).and_then(Value::as_str).map(String::from).ok_or_else(|| bad("column"));
            Ok(Column { name: s("name")?, unit: s("unit")? })
        })
        .collect::<CliResult<_>>()?;
    let rows = arr("data")?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("row"))?
                .iter()
                .map(|c| match c {
                    Value::Number(n) => n.as_f64().map(Cell::Num).ok_or_else(|| bad("number")),
                    Value::String(s) => Ok(Cell::Text(s.clone())),
                    Value::Null => Ok(Cell::Num(f64::NAN)),
                    _ => Err(bad("cell")),
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    Ok(Table { meta, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(values: &[f64]) -> Table {
        let mut t = Table::new(&[("x", "1/gamma_bar"), ("label", ""), ("y", "gamma_bar")]);
        t.meta("command", "test");
        t.meta_num("omega_d", 2.0);
        for (j, v) in values.iter().enumerate() {
            t.push(vec![Cell::Num(j as f64), Cell::Text(format!("row{j}")), Cell::Num(*v)]);
        }
        t
    }

    fn round_trip(t: &Table, f: Format) -> Table {
        let mut buf = Vec::new();
        t.write(f, &mut buf).unwrap();
        read_table(std::str::from_utf8(&buf).unwrap()).unwrap()
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample(&[0.1]).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "# command: test\n# omega_d: 2.0000000000000000e0\nx[1/gamma_bar],label,y[gamma_bar]\n\
             0.0000000000000000e0,row0,1.0000000000000001e-1\n"
        );
    }

    proptest! {
        #[test]
        fn both_formats_reproduce_the_table(values in prop::collection::vec(-1e300f64..1e300, 0..20),
                                            tiny in prop::collection::vec(-1e-300f64..1e-300, 0..5)) {
            let mut v = values;
            v.extend(tiny);
            let t = sample(&v);
            prop_assert_eq!(&round_trip(&t, Format::Csv), &t);
            prop_assert_eq!(&round_trip(&t, Format::Json), &t);
        }
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(read_table("{\"meta\": 3}").is_err());
        assert!(read_table("# no separator\n").is_err());
    }
}

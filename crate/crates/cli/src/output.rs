use std::io::{self, Write};

use num_bigint::BigUint;
use serde_json::Value;

/// JSON number when it fits in `u64`, else a decimal string.
pub fn big(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(n.to_string()),
    }
}

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A command result: always JSON, optionally with a dedicated CSV table.
pub struct Output {
    json: Value,
    table: Option<Table>,
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(vec![prefix.to_string(), s.clone()]),
        other => out.push(vec![prefix.to_string(), other.to_string()]),
    }
}

impl Output {
    pub fn new(json: Value) -> Self {
        Output { json, table: None }
    }

    pub fn with_table(json: Value, table: Table) -> Self {
        Output {
            json,
            table: Some(table),
        }
    }

    pub fn emit(self, csv: bool) -> io::Result<()> {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        if !csv {
            serde_json::to_writer_pretty(&mut lock, &self.json)?;
            return writeln!(lock);
        }
        let table = self.table.unwrap_or_else(|| {
            let mut rows = Vec::new();
            flatten("", &self.json, &mut rows);
            Table {
                headers: vec!["key".into(), "value".into()],
                rows,
            }
        });
        let mut w = csv::Writer::from_writer(lock);
        w.write_record(&table.headers)?;
        for r in &table.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

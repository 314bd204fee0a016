use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Output;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub params: Value,
    /// Input file to hex SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub wall_time_ms: u64,
}

/// A tabular view of a report.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key=value` lines under the manifest.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// `key,value` rows for the scalar fields of a JSON object.
    fn from_scalars(value: &Value) -> Self {
        let mut t = Table::new(vec!["key", "value"]);
        if let Value::Object(map) = value {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => continue,
                    Value::String(s) => t.push(vec![k.clone(), s.clone()]),
                    other => t.push(vec![k.clone(), other.to_string()]),
                }
            }
        }
        t
    }
}

pub struct Report {
    pub data: Value,
    pub table: Option<Table>,
    pub svg: Option<(PathBuf, String)>,
}

impl Report {
    pub fn new(data: impl Serialize) -> Result<Self> {
        Ok(Report {
            data: serde_json::to_value(data)?,
            table: None,
            svg: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

pub struct Run {
    started: Instant,
    pub subcommand: String,
    pub params: Value,
    pub inputs: BTreeMap<String, String>,
}

impl Run {
    pub fn new(subcommand: String, params: Value) -> Self {
        Run {
            started: Instant::now(),
            subcommand,
            params,
            inputs: BTreeMap::new(),
        }
    }

    /// Records the digest of an input file and returns its bytes.
    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            tool: "gmoat",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand.clone(),
            params: self.params.clone(),
            inputs: self.inputs.clone(),
            wall_time_ms: self.started.elapsed().as_millis() as u64,
        }
    }

    pub fn emit(&self, report: Report, out: &Output) -> Result<()> {
        let manifest = self.manifest();
        let mut json = match report.data {
            Value::Object(map) => map,
            other => {
                let mut map = Map::new();
                map.insert("result".into(), other);
                map
            }
        };
        if let Some((path, svg)) = &report.svg {
            write_to(path, svg.as_bytes())?;
            json.insert("svg".into(), Value::String(path.display().to_string()));
        }
        let json = Value::Object(json);

        let json_dest = match (&out.json, &out.csv) {
            (None, None) => Some(PathBuf::from("-")),
            (j, _) => j.clone(),
        };
        if let Some(dest) = json_dest {
            let mut full = json.clone();
            full.as_object_mut()
                .unwrap()
                .insert("manifest".into(), serde_json::to_value(&manifest)?);
            let mut text = serde_json::to_string_pretty(&full)?;
            text.push('\n');
            write_to(&dest, text.as_bytes())?;
        }
        if let Some(dest) = &out.csv {
            let table = report.table.unwrap_or_else(|| Table::from_scalars(&json));
            write_to(dest, render_csv(&table, &manifest)?.as_bytes())?;
        }
        Ok(())
    }
}

pub fn render_csv(table: &Table, manifest: &Manifest) -> Result<String> {
    let mut s = format!("# manifest={}\n", serde_json::to_string(manifest)?);
    for (k, v) in &table.meta {
        s.push_str(&format!("# {k}={v}\n"));
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(s)
}

pub fn write_to(dest: &Path, bytes: &[u8]) -> Result<()> {
    if dest.as_os_str() == "-" {
        let mut stdout = io::stdout().lock();
        stdout.write_all(bytes)?;
        stdout.flush()?;
        return Ok(());
    }
    if let Some(dir) = dest.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(dest, bytes).with_context(|| format!("writing {}", dest.display()))
}

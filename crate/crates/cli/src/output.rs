//! JSONL and TSV writers. Output is buffered and written once at the end so a
//! failed run leaves no partial file behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    Jsonl,
    /// Tab-separated, same field order as JSONL.
    Tsv,
}

pub struct Sink {
    format: Format,
    path: Option<PathBuf>,
    buffer: Vec<u8>,
    header_written: bool,
}

impl Sink {
    pub fn new(format: Format, path: Option<&Path>) -> Self {
        Sink {
            format,
            path: path.map(Path::to_path_buf),
            buffer: Vec::new(),
            header_written: false,
        }
    }

    pub fn records<T: Serialize>(&mut self, rows: &[T]) -> Result<()> {
        for row in rows {
            let object = to_object(row)?;
            self.row(&object)?;
        }
        Ok(())
    }

    /// Trailing summary, tagged `"type": "summary"`.
    pub fn summary<T: Serialize>(&mut self, summary: &T) -> Result<()> {
        let mut object = Map::new();
        object.insert("type".into(), Value::from("summary"));
        object.extend(to_object(summary)?);
        if self.format == Format::Tsv {
            // the summary has its own columns
            writeln!(self.buffer)?;
            self.header_written = false;
        }
        self.row(&object)
    }

    fn row(&mut self, object: &Map<String, Value>) -> Result<()> {
        match self.format {
            Format::Jsonl => {
                serde_json::to_writer(&mut self.buffer, object)?;
                writeln!(self.buffer)?;
            }
            Format::Tsv => {
                if !self.header_written {
                    let header: Vec<&str> = object.keys().map(String::as_str).collect();
                    writeln!(self.buffer, "{}", header.join("\t"))?;
                    self.header_written = true;
                }
                let cells: Vec<String> = object.values().map(cell).collect();
                writeln!(self.buffer, "{}", cells.join("\t"))?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match &self.path {
            Some(path) => fs::write(path, &self.buffer)
                .with_context(|| format!("cannot write {}", path.display())),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(&self.buffer)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn to_object<T: Serialize>(value: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(value)? {
        Value::Object(map) => Ok(map),
        other => anyhow::bail!("expected an object, got {other}"),
    }
}

fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

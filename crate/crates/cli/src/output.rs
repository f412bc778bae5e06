//! JSON-lines records and the CSV export.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "ffprog";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One line of the ledger. The payload fields sit next to the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub kind: String,
    #[serde(flatten)]
    pub payload: Map<String, Value>,
}

/// Parses and validates one ledger line.
pub fn parse_record(line: &str) -> Result<Record> {
    let rec: Record = serde_json::from_str(line).context("record is not valid JSON")?;
    if rec.schema != SCHEMA {
        bail!("unsupported schema {} (expected {SCHEMA})", rec.schema);
    }
    if rec.tool != TOOL {
        bail!("record was not written by {TOOL}");
    }
    if !rec.config.is_object() {
        bail!("config echo must be an object");
    }
    Ok(rec)
}

pub struct Emitter {
    command: String,
    seed: u64,
    config: Value,
    out: Box<dyn Write + Send>,
    csv: Option<csv::Writer<File>>,
    no_timing: bool,
    pub failures: Vec<String>,
}

const RESERVED: [&str; 7] = ["schema", "tool", "version", "command", "seed", "config", "kind"];

/// Keys whose values are wall-clock measurements.
const TIMING_KEYS: [&str; 3] = ["ms", "wall_time_ms", "runtime_ms"];

fn zero_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, val) in m.iter_mut() {
                if TIMING_KEYS.contains(&k.as_str()) && val.is_number() {
                    *val = Value::from(0.0);
                } else {
                    zero_timings(val);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(zero_timings),
        _ => {}
    }
}

impl Emitter {
    pub fn new(command: &str, seed: u64, config: Value, out: Option<&Path>, csv_path: Option<&Path>, no_timing: bool) -> Result<Self> {
        let out: Box<dyn Write + Send> = match out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
            None => Box::new(io::stdout()),
        };
        let csv = csv_path
            .map(|p| csv::Writer::from_path(p).with_context(|| format!("cannot create {}", p.display())))
            .transpose()?;
        Ok(Emitter { command: command.to_string(), seed, config, out, csv, no_timing, failures: vec![] })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Writes one record; `payload` must serialize to a JSON object.
    pub fn emit<T: Serialize>(&mut self, kind: &str, payload: &T) -> Result<()> {
        let mut value = serde_json::to_value(payload)?;
        if self.no_timing {
            zero_timings(&mut value);
        }
        let Value::Object(payload) = value else { bail!("record payload for '{kind}' is not an object") };
        if let Some(k) = RESERVED.iter().find(|k| payload.contains_key(**k)) {
            bail!("record payload for '{kind}' uses the reserved key '{k}'");
        }
        let rec = Record {
            schema: SCHEMA,
            tool: TOOL.into(),
            version: VERSION.into(),
            command: self.command.clone(),
            seed: self.seed,
            config: self.config.clone(),
            kind: kind.into(),
            payload,
        };
        serde_json::to_writer(&mut self.out, &rec)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn csv_row<T: Serialize>(&mut self, row: &T) -> Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.serialize(row)?;
            w.flush()?;
        }
        Ok(())
    }

    /// Registers a failed check; the run will exit with status 2.
    pub fn fail(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::error!("check failed: {msg}");
        self.failures.push(msg);
    }

    /// Emits the failure list, if any, and returns the exit code.
    pub fn finish(mut self) -> Result<i32> {
        if self.failures.is_empty() {
            return Ok(0);
        }
        let failures = std::mem::take(&mut self.failures);
        self.emit("failures", &serde_json::json!({ "failures": failures }))?;
        Ok(crate::EXIT_FAILED_CHECK)
    }
}

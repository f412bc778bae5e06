//! `--config path.json` support.
//!
//! The file is a JSON object whose keys are flag names (kebab or snake case)
//! plus an optional `"command"`. Its entries are spliced into the argument
//! list right after the subcommand, so flags given on the command line win.

use anyhow::{bail, Context, Result};
use serde_json::Value;
use std::ffi::OsString;

/// Global flags that take a value, needed to locate the subcommand.
const VALUE_FLAGS: [&str; 5] = ["--config", "--jobs", "--seed", "--out", "--csv"];

fn flag_args(key: &str, value: &Value) -> Result<Vec<String>> {
    let flag = format!("--{}", key.replace('_', "-"));
    Ok(match value {
        Value::Bool(true) => vec![flag],
        Value::Bool(false) | Value::Null => vec![],
        Value::Number(n) => vec![flag, n.to_string()],
        Value::String(s) => vec![flag, s.clone()],
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    other => bail!("config key '{key}': unsupported list entry {other}"),
                })
                .collect::<Result<Vec<_>>>()?;
            vec![flag, parts.join(",")]
        }
        Value::Object(_) => bail!("config key '{key}' must not be an object"),
    })
}

/// Index of the subcommand token, skipping global flags and their values.
fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if VALUE_FLAGS.contains(&a.as_ref()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn config_path(args: &[OsString]) -> Option<(usize, usize, String)> {
    args.iter().enumerate().find_map(|(i, a)| {
        let a = a.to_string_lossy();
        if a == "--config" {
            args.get(i + 1).map(|p| (i, 2, p.to_string_lossy().into_owned()))
        } else {
            a.strip_prefix("--config=").map(|p| (i, 1, p.to_string()))
        }
    })
}

/// Expands `--config` into ordinary flags. Arguments without a config file
/// are returned unchanged.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some((at, width, path)) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read config {path}"))?;
    let Value::Object(entries) = serde_json::from_str(&text).with_context(|| format!("config {path} is not valid JSON"))? else {
        bail!("config {path} must be a JSON object");
    };
    let mut args = args;
    args.drain(at..at + width);
    let mut command = None;
    let mut extra = vec![];
    for (key, value) in &entries {
        if key == "command" {
            command = Some(value.as_str().context("config key 'command' must be a string")?.to_string());
        } else {
            extra.extend(flag_args(key, value)?);
        }
    }
    let insert_at = match subcommand_position(&args) {
        Some(i) => i + 1,
        None => {
            let cmd = command.context("no subcommand given on the command line or in the config")?;
            args.push(cmd.into());
            args.len()
        }
    };
    args.splice(insert_at..insert_at, extra.into_iter().map(OsString::from));
    Ok(args)
}

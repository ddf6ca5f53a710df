use std::fs;
use std::io::Read;

use serde_json::Value;
use wot1d::{Measure1D, QuantileFunction};

use crate::CliError;

/// The named measures accepted wherever a measure argument is expected.
pub fn builtin_measure(name: &str) -> Result<Measure1D, CliError> {
    let unknown = || CliError::UnknownBuiltin(name.to_string());
    let real = |s: &str| s.trim().parse::<f64>().map_err(|_| unknown());
    let m = match name {
        "uniform" => Measure1D::uniform(),
        "density2-left" => Measure1D::density(vec![0.0, 0.5, 1.0], vec![2.0, 0.0])?,
        _ => {
            if let Some(x) = name.strip_prefix("dirac:") {
                Measure1D::dirac(real(x)?)?
            } else if let Some(rest) = name.strip_prefix("two-atoms:") {
                let (a, b) = rest.split_once(',').ok_or_else(unknown)?;
                let (a, b) = (real(a)?, real(b)?);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if lo == hi {
                    Measure1D::dirac(lo)?
                } else {
                    Measure1D::atomic(&[(lo, 0.5), (hi, 0.5)])?
                }
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(m)
}

fn looks_builtin(spec: &str) -> bool {
    matches!(spec, "uniform" | "density2-left")
        || spec.starts_with("dirac:")
        || spec.starts_with("two-atoms:")
}

/// Reads a path, or stdin for `-`.
pub fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io {
                path: "<stdin>".into(),
                source: e,
            })?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.into(),
            source: e,
        })
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        origin: origin.into(),
        message: e.to_string(),
    })
}

/// A measure given as inline JSON, a builtin name, `-` or a file path.
pub fn load_measure(spec: &str) -> Result<Measure1D, CliError> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return parse_json(trimmed, "inline measure");
    }
    if looks_builtin(spec) {
        return builtin_measure(spec);
    }
    // A bare word that is not a file is taken as a misspelt builtin.
    let bare = !spec.contains(['/', '\\', '.']);
    if spec != "-" && bare && !std::path::Path::new(spec).exists() {
        return Err(CliError::UnknownBuiltin(spec.to_string()));
    }
    parse_json(&read_source(spec)?, spec)
}

/// A JSON array of quantile functions from `-` or a path.
pub fn load_quantiles(spec: &str) -> Result<Vec<QuantileFunction>, CliError> {
    parse_json(&read_source(spec)?, spec)
}

/// Flags encoded by a `--config` file, to be appended after the command
/// line so that they take precedence.
pub fn config_flags(path: &str) -> Result<Vec<String>, CliError> {
    let value: Value = parse_json(&read_source(path)?, path)?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!(
            "config {path} must hold a JSON object"
        )));
    };
    let mut flags = Vec::new();
    for (key, v) in map {
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => flags.extend([flag, n.to_string()]),
            Value::String(s) => flags.extend([flag, s]),
            Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|i| match i {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                flags.extend([flag, joined.join(",")]);
            }
            Value::Object(_) => {
                return Err(CliError::Usage(format!(
                    "config key {key} must not be an object"
                )))
            }
        }
    }
    Ok(flags)
}

/// Pulls the value of `--config` out of raw arguments, if present.
pub fn find_config(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

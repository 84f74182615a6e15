//! Scenario files: TOML in, TOML out, plus dotted-path overrides.

use std::path::{Path, PathBuf};

use engine::ScenarioSpec;

use crate::builtin;
use crate::error::CliError;

pub fn parse(text: &str, origin: &str) -> Result<ScenarioSpec, CliError> {
    toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
        CliError::Parse {
            origin: origin.to_string(),
            line,
            col,
            msg: e.message().trim().to_string(),
        }
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let head = &text[..offset.min(text.len())];
    let line = head.matches('\n').count() + 1;
    let col = head.len() - head.rfind('\n').map(|k| k + 1).unwrap_or(0) + 1;
    (line, col)
}

/// Floats go out in shortest round-trip form, so parse(serialize(s)) == s bit for bit.
pub fn serialize(spec: &ScenarioSpec) -> String {
    toml::to_string(spec).expect("scenario spec always serialises")
}

/// Applies `key.path=value` assignments. Values use TOML syntax; bare words become strings.
pub fn apply_overrides(spec: &ScenarioSpec, sets: &[String]) -> Result<ScenarioSpec, CliError> {
    if sets.is_empty() {
        return Ok(spec.clone());
    }
    let mut root = toml::Value::try_from(spec).expect("scenario spec always serialises");
    for arg in sets {
        let bad = |msg: String| CliError::Override {
            arg: arg.clone(),
            msg,
        };
        let (key, raw) = arg
            .split_once('=')
            .ok_or_else(|| bad("expected key=value".into()))?;
        set_path(&mut root, key.trim(), parse_value(raw.trim())).map_err(bad)?;
    }
    root.try_into::<ScenarioSpec>()
        .map_err(|e| CliError::Override {
            arg: sets.join(" "),
            msg: e.message().trim().to_string(),
        })
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<(), String> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("malformed key '{key}'"));
    }
    let mut cur = root;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        cur = match cur {
            toml::Value::Table(t) => {
                if last {
                    t.insert(part.to_string(), value);
                    return Ok(());
                }
                t.get_mut(*part)
                    .ok_or_else(|| format!("no key '{}'", parts[..=depth].join(".")))?
            }
            toml::Value::Array(a) => {
                let k: usize = part
                    .parse()
                    .map_err(|_| format!("'{part}' is not an array index"))?;
                let len = a.len();
                let slot = a
                    .get_mut(k)
                    .ok_or_else(|| format!("index {k} out of range (length {len})"))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(format!(
                    "'{}' is not a table or array",
                    parts[..depth].join(".")
                ))
            }
        };
    }
    unreachable!("loop returns on the last segment")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Builtin(String),
    File(PathBuf),
}

/// A path to an existing file (with or without `.toml`), else a built-in by its final component.
pub fn resolve(arg: &str) -> Result<Source, CliError> {
    let p = Path::new(arg);
    if p.is_file() {
        return Ok(Source::File(p.to_path_buf()));
    }
    let with_ext = PathBuf::from(format!("{arg}.toml"));
    if with_ext.is_file() {
        return Ok(Source::File(with_ext));
    }
    let stem = p.file_name().and_then(|s| s.to_str()).unwrap_or(arg);
    let stem = stem.strip_suffix(".toml").unwrap_or(stem);
    if builtin::NAMES.contains(&stem) {
        return Ok(Source::Builtin(stem.to_string()));
    }
    Err(CliError::NotFound(arg.to_string()))
}

/// Built-ins are redrawn from `seed`; for files the seed is only recorded.
pub fn load(arg: &str, seed: Option<u64>, sets: &[String]) -> Result<ScenarioSpec, CliError> {
    let mut spec = match resolve(arg)? {
        Source::Builtin(name) => builtin::builtin(&name, seed).expect("resolved built-in exists"),
        Source::File(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let mut s = parse(&text, &path.display().to_string())?;
            if let Some(seed) = seed {
                s.sim.seed = seed;
            }
            s
        }
    };
    spec = apply_overrides(&spec, sets)?;
    Ok(spec)
}

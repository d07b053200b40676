use std::ffi::OsString;
use std::path::Path;

use toml::{Table, Value};

use crate::Failure;

pub const COMMANDS: [&str; 5] = ["direct", "delta", "invert", "complete", "oracle"];

/// Splices config values in as flags right after the subcommand. Flags
/// given on the command line win: config values for them are dropped.
///
/// Top-level keys apply to every command, keys of the `[<command>]` table
/// only to that command. A key maps to `--key` with `_` read as `-`;
/// `true` becomes a bare switch, `false` is dropped and arrays are joined
/// with commas.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(pos) = args
        .iter()
        .position(|a| a.to_str().is_some_and(|s| COMMANDS.contains(&s)))
    else {
        return Ok(args);
    };
    let command = args[pos].to_string_lossy().into_owned();
    let table = load(Path::new(&path))?;
    let mut injected = Vec::new();
    for (key, value) in &table {
        if let Value::Table(section) = value {
            if !COMMANDS.contains(&key.as_str()) {
                return Err(Failure::validation(format!("unknown config section [{key}]")));
            }
            if *key == command {
                for (k, v) in section {
                    push_flag(&mut injected, k, v)?;
                }
            }
        } else {
            push_flag(&mut injected, key, value)?;
        }
    }
    let given = |flag: &OsString| {
        let flag = flag.to_string_lossy();
        args.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        })
    };
    let mut out = args[..=pos].to_vec();
    for (flag, values) in injected {
        if !given(&flag) {
            out.push(flag);
            out.extend(values);
        }
    }
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn load(path: &Path) -> Result<Table, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| Failure::validation(format!("invalid config {}: {e}", path.display())))
}

fn push_flag(out: &mut Vec<(OsString, Vec<OsString>)>, key: &str, value: &Value) -> Result<(), Failure> {
    let flag = format!("--{}", key.replace('_', "-"));
    if flag == "--config" {
        return Err(Failure::validation("config files cannot include other configs".into()));
    }
    match value {
        Value::Boolean(true) => out.push((flag.into(), vec![])),
        Value::Boolean(false) => {}
        Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            out.push((flag.into(), vec![parts.join(",").into()]));
        }
        v => out.push((flag.into(), vec![scalar(v)?.into()])),
    }
    Ok(())
}

fn scalar(v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(format!("{f:?}")),
        Value::Boolean(b) => Ok(b.to_string()),
        other => Err(Failure::validation(format!("unsupported config value {other}"))),
    }
}

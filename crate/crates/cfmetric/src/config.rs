//! Plain-text `key=value` experiment files.
//!
//! Each key names a long flag. Entries are appended to the command line
//! unless the flag is already given there, so flags win on conflict.

use std::ffi::OsString;

/// Parses `key=value` lines; `#` starts a comment line.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got {line:?}", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Long flag names present in `args`.
fn given(args: &[OsString]) -> Vec<String> {
    args.iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

/// Appends config entries not already set by a flag. `true` adds a bare
/// switch and `false` omits it.
pub fn merge(mut args: Vec<OsString>, entries: &[(String, String)]) -> Vec<OsString> {
    let present = given(&args);
    for (k, v) in entries {
        if k == "config" || present.iter().any(|p| p == k) {
            continue;
        }
        match v.as_str() {
            "true" => args.push(format!("--{k}").into()),
            "false" => {}
            _ => args.push(format!("--{k}={v}").into()),
        }
    }
    args
}

/// The value of `--config` in `args`, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_str()?;
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
        if s == "--config" {
            return it.next().cloned();
        }
    }
    None
}

//! `--config FILE` support: `key = value` lines become long flags inserted
//! right after the subcommand name, so anything on the real command line
//! (which comes later and overrides) wins.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Command};

use crate::error::{CliError, CliResult};

/// Locate `--config` and the subcommand in raw arguments. Only global flags
/// may precede the subcommand, and `--config` is the only one taking a value.
fn scan(args: &[OsString]) -> (Option<PathBuf>, Option<usize>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(v));
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    (config, sub)
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", n + 1))
        })?;
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Return `args` with config-file entries spliced in, plus the config path
/// (so its digest can be recorded).
pub fn expand(args: Vec<OsString>, cmd: &Command) -> CliResult<(Vec<OsString>, Option<PathBuf>)> {
    let (config, sub_at) = scan(&args);
    let (Some(path), Some(sub_at)) = (config, sub_at) else {
        return Ok((args, None));
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let entries = parse_config(&text)?;
    let sub_name = args[sub_at].to_string_lossy().into_owned();
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        // let clap report the unknown subcommand
        return Ok((args, Some(path)));
    };

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && !a.is_global_set())
            .ok_or_else(|| {
                CliError::Usage(format!("config key {key:?} is not a flag of `{sub_name}`"))
            })?;
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => injected.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config key {key:?}: expected a boolean, got {other:?}"
                    )))
                }
            },
            _ => {
                injected.push(format!("--{key}").into());
                injected.push(value.into());
            }
        }
    }
    let mut out = args[..=sub_at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_at + 1..]);
    Ok((out, Some(path)))
}

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::Path;

use crate::CliError;

/// Splices `key = value` pairs from the file given by `--config` into the
/// argument list, right after the innermost subcommand. Keys name long
/// flags (`_` and `-` both work). A key whose flag is already on the
/// command line is skipped, so explicit flags always win.
pub fn expand(argv: Vec<OsString>, cmd: &clap::Command) -> Result<Vec<OsString>, CliError> {
    let mut cur = cmd;
    let mut insert_at = 1.min(argv.len());
    let mut config: Option<OsString> = None;
    let mut present: HashSet<String> = HashSet::new();
    let mut i = 1;
    while i < argv.len() {
        let Some(tok) = argv[i].to_str() else {
            i += 1;
            continue;
        };
        if tok == "--" {
            break;
        }
        if let Some(flag) = tok.strip_prefix("--") {
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n, Some(OsString::from(v))),
                None => (flag, None),
            };
            present.insert(name.to_string());
            let takes_value = cur
                .get_arguments()
                .find(|a| a.get_long() == Some(name))
                .is_some_and(|a| a.get_action().takes_values());
            let mut value = inline.clone();
            if takes_value && inline.is_none() {
                i += 1;
                value = argv.get(i).cloned();
            }
            if name == "config" {
                config = value;
            }
        } else if let Some(sub) = cur.find_subcommand(tok) {
            cur = sub;
            insert_at = i + 1;
        }
        i += 1;
    }
    let Some(path) = config else { return Ok(argv) };
    let extra = config_args(Path::new(&path), &present)?;
    let mut out = argv;
    out.splice(insert_at..insert_at, extra);
    Ok(out)
}

fn config_args(path: &Path, present: &HashSet<String>) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = key.replace('_', "-");
        if flag == "config" {
            return Err(CliError::Usage(format!(
                "config {}: `config` cannot be nested",
                path.display()
            )));
        }
        if present.contains(&flag) {
            continue;
        }
        let values = match value {
            toml::Value::Array(items) => items,
            v => vec![v],
        };
        for v in values {
            let rendered = match v {
                toml::Value::Boolean(true) => None,
                toml::Value::Boolean(false) => continue,
                toml::Value::String(s) => Some(s),
                toml::Value::Integer(n) => Some(n.to_string()),
                toml::Value::Float(x) => Some(x.to_string()),
                other => {
                    return Err(CliError::Usage(format!(
                        "config {}: key {key:?} must be a string, number, boolean or list, got {}",
                        path.display(),
                        other.type_str()
                    )))
                }
            };
            out.push(OsString::from(format!("--{flag}")));
            if let Some(r) = rendered {
                out.push(OsString::from(r));
            }
        }
    }
    Ok(out)
}

use std::ffi::OsString;
use std::path::Path;

use crate::output::CliError;

/// Splices `key=value` lines from every `--config FILE` into the argument list
/// right after the subcommand, so flags given on the command line win.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut paths = Vec::new();
    let mut it = argv.iter().skip(2);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            if let Some(p) = it.next() {
                paths.push(p.clone());
            }
        } else if let Some(p) = s.strip_prefix("--config=") {
            paths.push(OsString::from(p));
        }
    }
    if paths.is_empty() || argv.len() < 2 {
        return Ok(argv);
    }
    let mut injected = Vec::new();
    for p in &paths {
        injected.extend(read_config(Path::new(p))?);
    }
    let mut out = argv[..2].to_vec();
    out.extend(injected);
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut flags = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key {:?}", n + 1, k.trim())));
        }
        flags.push(OsString::from(format!("--{key}={}", v.trim())));
    }
    Ok(flags)
}

fn read_config(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines_become_flags() {
        let f = parse_config("depth = 6\n# comment\nrank_tol=1e-7\n").unwrap();
        assert_eq!(f, vec![OsString::from("--depth=6"), OsString::from("--rank-tol=1e-7")]);
    }

    #[test]
    fn missing_equals_is_rejected() {
        assert!(parse_config("depth 6").is_err());
    }
}

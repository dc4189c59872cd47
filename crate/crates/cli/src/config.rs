//! Flat `key = value` config files.
//!
//! `# comments` and blank lines are skipped. A `[section]` header prefixes
//! the keys below it with `section.`. A key without a section may be given
//! by its last component alone when that is unambiguous (`horizon` for
//! `experiment.horizon`).

use rome_core::harness::ExperimentConfig;

use crate::error::CliError;

/// Maps a possibly shortened key to its full name.
pub fn resolve_key(key: &str) -> Result<&'static str, CliError> {
    let key = key.trim();
    if let Some(full) = ExperimentConfig::KEYS.iter().find(|k| **k == key) {
        return Ok(full);
    }
    let matches: Vec<&'static str> = ExperimentConfig::KEYS
        .iter()
        .copied()
        .filter(|k| k.rsplit('.').next() == Some(key))
        .collect();
    match matches.as_slice() {
        [one] => Ok(one),
        [] => Err(CliError::Usage(format!("unknown config key '{key}'"))),
        _ => Err(CliError::Usage(format!(
            "ambiguous config key '{key}': {}",
            matches.join(", ")
        ))),
    }
}

/// Parses config text into resolved `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(&'static str, String)>, CliError> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value", n + 1)))?;
        let k = k.trim();
        let key = if section.is_empty() || k.contains('.') {
            k.to_string()
        } else {
            format!("{section}.{k}")
        };
        let key = resolve_key(&key).map_err(|e| CliError::Usage(format!("line {}: {e}", n + 1)))?;
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Parses one `--override` argument.
pub fn parse_override(arg: &str) -> Result<(&'static str, String), CliError> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override '{arg}' is not key=value")))?;
    Ok((resolve_key(k)?, v.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_short_keys() {
        let text = "# demo\n[experiment]\nhorizon = 200  # short\n\n[env]\nkind = synthetic\npolicy.alpha = 0.5\n";
        let pairs = parse_config(text).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("experiment.horizon", "200".to_string()),
                ("env.kind", "synthetic".to_string()),
                ("policy.alpha", "0.5".to_string()),
            ]
        );
    }

    #[test]
    fn bare_short_keys_resolve() {
        assert_eq!(resolve_key("horizon").unwrap(), "experiment.horizon");
        assert_eq!(resolve_key("epsilon").unwrap(), "policy.epsilon");
        assert!(resolve_key("nope").is_err());
        assert_eq!(
            parse_override("seed=4").unwrap(),
            ("experiment.seed", "4".to_string())
        );
        assert!(parse_override("seed").is_err());
    }

    #[test]
    fn malformed_lines_name_the_line() {
        let err = parse_config("[env]\nkind synthetic\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}

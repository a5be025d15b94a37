//! Flag parsing helpers and the flat `key=value` config file.

use std::fs;

/// Expands `--config <path>` into `--key=value` flags inserted right after
/// the subcommand. Keys also given on the command line are dropped from the
/// file, so explicit flags take precedence.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let mut args = args;
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err("--config needs a path".into());
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let given = |flag: &str| {
        let key = flag.split('=').next().unwrap_or(flag);
        args.iter().any(|a| a == key || a.starts_with(&format!("{key}=")))
    };
    let flags: Vec<String> = parse_config(&text)?.into_iter().filter(|f| !given(f)).collect();
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .ok_or("config given without a subcommand")?;
    let tail = args.split_off(sub);
    args.extend(flags);
    args.extend(tail);
    Ok(args)
}

/// `key=value` lines to `--key=value` flags; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(format!("config line {}: bad key {k:?}", i + 1));
        }
        out.push(format!("--{k}={v}"));
    }
    Ok(out)
}

/// `a,b` to a pair of reals.
pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = parse_list(s)?;
    if v.len() != 2 {
        return Err(format!("expected two comma separated numbers, got {s:?}"));
    }
    Ok([v[0], v[1]])
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}

/// `kmin..kmax` (inclusive) or a single `k`.
pub fn parse_range(s: &str) -> Result<Vec<i32>, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), s.trim()),
    };
    let lo: i32 = lo.parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let hi: i32 = hi.parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if hi < lo {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo..=hi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_goes_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("horocycle-cfg-{}", std::process::id()));
        fs::write(&dir, "# comment\nxi = 0.1,0.2\ntol=1e-8\n").unwrap();
        let args = vec!["horocycle", "average", "--config", dir.to_str().unwrap(), "--tol", "1e-9"];
        let out = expand_config(args.into_iter().map(String::from).collect()).unwrap();
        assert_eq!(out, vec!["horocycle", "average", "--xi=0.1,0.2", "--tol", "1e-9"]);
        fs::remove_file(dir).unwrap();
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("5").unwrap(), vec![5]);
        assert!(parse_range("4..2").is_err());
        assert_eq!(parse_pair("1, -0.5").unwrap(), [1.0, -0.5]);
    }
}

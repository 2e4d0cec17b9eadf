//! Flat key=value config files merged with command-line flags; flags
//! win. Unknown keys are rejected so typos cannot silently fall back
//! to defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::Cli;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
}

/// Fully merged run parameters. Optional fields mean "derive from the
/// system defaults" and are filled in by the command runners.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub d: usize,
    pub m: usize,
    /// Increment matrix entries, row-major `d x m`.
    pub alpha: Option<Vec<f64>>,
    pub center: Option<Vec<f64>>,
    pub r_inner: Option<f64>,
    pub r_outer: Option<f64>,
    pub depth: Option<f64>,
    pub scale: Option<f64>,
    pub n: u64,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub r: f64,
    pub e_center: Option<Vec<f64>>,
    pub e_radius: Option<f64>,
    pub f_center: Option<Vec<f64>>,
    pub f_radius: Option<f64>,
    pub strict: bool,
    pub merge_groups: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "d",
    "m",
    "alpha",
    "center",
    "r_inner",
    "r_outer",
    "H",
    "s",
    "N",
    "epsilon",
    "seed",
    "samples",
    "out",
    "format",
    "r",
    "e_center",
    "e_radius",
    "f_center",
    "f_radius",
    "strict",
    "merge_groups",
];

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped, keys may appear once.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value, got {raw:?}", idx + 1));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key {key:?}", idx + 1));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(format!("line {}: duplicate key {key:?}", idx + 1));
        }
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("key {key:?}: cannot parse {s:?}"))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("key {key:?}: bad entry {p:?}")))
        .collect()
}

fn parse_bool(key: &str, s: &str) -> Result<bool, String> {
    match s {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(format!("key {key:?}: expected true/false, got {other:?}")),
    }
}

/// Merges the config file (if any) under the flags and validates the
/// combined parameters.
pub fn resolve(cli: &Cli) -> Result<Resolved, String> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let get = |key: &str| file.get(key).map(String::as_str);

    let d = match (cli.d, get("d")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("d", s)?,
        (None, None) => 1,
    };
    if !(1..=2).contains(&d) {
        return Err(format!("d must be 1 or 2, got {d}"));
    }
    let m = match (cli.m, get("m")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("m", s)?,
        (None, None) => d,
    };
    if !(1..=2).contains(&m) {
        return Err(format!("m must be 1 or 2, got {m}"));
    }

    let alpha = match (&cli.alpha, get("alpha")) {
        (Some(s), _) => Some(parse_list("alpha", s)?),
        (None, Some(s)) => Some(parse_list("alpha", s)?),
        (None, None) => None,
    };
    if let Some(a) = &alpha {
        if a.len() != d * m {
            return Err(format!("alpha needs {} entries (d*m), got {}", d * m, a.len()));
        }
    }

    let center = match (&cli.center, get("center")) {
        (Some(s), _) => Some(parse_list("center", s)?),
        (None, Some(s)) => Some(parse_list("center", s)?),
        (None, None) => None,
    };
    if let Some(c) = &center {
        if c.len() != m {
            return Err(format!("center needs {m} coordinates, got {}", c.len()));
        }
    }

    let float = |flag: Option<f64>, key: &str| -> Result<Option<f64>, String> {
        match (flag, get(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => Ok(Some(parse(key, s)?)),
            (None, None) => Ok(None),
        }
    };
    let list = |flag: &Option<String>, key: &str| -> Result<Option<Vec<f64>>, String> {
        match (flag, get(key)) {
            (Some(s), _) => Ok(Some(parse_list(key, s)?)),
            (None, Some(s)) => Ok(Some(parse_list(key, s)?)),
            (None, None) => Ok(None),
        }
    };

    let r_inner = float(cli.r_inner, "r_inner")?;
    let r_outer = float(cli.r_outer, "r_outer")?;
    let depth = float(cli.depth, "H")?;
    let scale = float(cli.scale, "s")?;
    let epsilon = float(cli.epsilon, "epsilon")?;
    let e_radius = float(cli.e_radius, "e_radius")?;
    let f_radius = float(cli.f_radius, "f_radius")?;
    let e_center = list(&cli.e_center, "e_center")?;
    let f_center = list(&cli.f_center, "f_center")?;
    for (name, c) in [("e_center", &e_center), ("f_center", &f_center)] {
        if let Some(c) = c {
            if c.len() != m {
                return Err(format!("{name} needs {m} coordinates, got {}", c.len()));
            }
        }
    }

    let n = match (cli.n, get("N")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("N", s)?,
        (None, None) => 2,
    };
    let seed = match (cli.seed, get("seed")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("seed", s)?,
        (None, None) => 0,
    };
    let samples = match (cli.samples, get("samples")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("samples", s)?,
        (None, None) => 1000,
    };
    if samples == 0 {
        return Err("samples must be positive".into());
    }
    let r = match (cli.r, get("r")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse("r", s)?,
        (None, None) => 1.0,
    };

    let out = match (&cli.out, get("out")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(s)) => Some(PathBuf::from(s)),
        (None, None) => None,
    };
    let format = match (cli.format.as_deref(), get("format")) {
        (Some(s), _) | (None, Some(s)) => match s {
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(format!("format must be json or svg, got {other:?}")),
        },
        (None, None) => Format::Json,
    };

    let strict = cli.strict || get("strict").map(|s| parse_bool("strict", s)).transpose()?.unwrap_or(false);
    let merge_groups = cli.merge_groups
        || get("merge_groups").map(|s| parse_bool("merge_groups", s)).transpose()?.unwrap_or(false);

    Ok(Resolved {
        d,
        m,
        alpha,
        center,
        r_inner,
        r_outer,
        depth,
        scale,
        n,
        epsilon,
        seed,
        samples,
        out,
        format,
        r,
        e_center,
        e_radius,
        f_center,
        f_radius,
        strict,
        merge_groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing_accepts_comments_and_rejects_unknown_keys() {
        let map = parse_config_file("# run\n d = 2 \nseed=7 # trailing\n\n").unwrap();
        assert_eq!(map.get("d").map(String::as_str), Some("2"));
        assert_eq!(map.get("seed").map(String::as_str), Some("7"));

        let err = parse_config_file("dd = 2\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
        let err = parse_config_file("d = 1\nd = 2\n").unwrap_err();
        assert!(err.contains("duplicate"), "{err}");
        let err = parse_config_file("just words\n").unwrap_err();
        assert!(err.contains("key=value"), "{err}");
    }
}

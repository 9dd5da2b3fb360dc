//! Experiment config files and the flat key/value echo.
//!
//! The file grammar is line-oriented `key = value` under `[section]`
//! headers, with `#`/`;` comments and blank lines ignored:
//!
//! ```text
//! [experiment]
//! kind = edge_tw          # esd_histogram | kolmogorov_curve | edge_tw
//!                         # | delocalization | identity_suite | local_law_scan
//! law = pareto            # gaussian | pareto
//! mu = 5.1                # required iff law = pareto
//! n = 100:1100:100        # single n, comma list, or a:b:step (b excluded)
//! trials = 20
//! seed = 42
//! truncate = 0.375        # optional clipping exponent; enables truncation
//! d_const = 1.0           # optional clipping prefactor (needs truncate)
//! bins = 70               # optional, default 70
//! workers = 1             # optional, default 1
//!
//! [output]
//! dir = out               # optional, default "."
//! ```
//!
//! Unknown sections, unknown keys, and duplicate keys are rejected with
//! their line number. The same flat key set (`kind`, `law`, `mu`, `n`,
//! `trials`, `seed`, `truncate`, `d_const`, `bins`, `workers`, `dir`) is
//! what the run manifest echoes, so a manifest can be replayed through
//! [`config_from_map`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::ensemble::{EntryLaw, TruncationSpec};
use crate::error::{Error, Result};

use super::{io_at, ExperimentConfig, ExperimentKind};

/// Expands an `n` specification: a single integer (`2000`), a comma list
/// (`8,16,32`), or a half-open range `a:b:step` that yields
/// `a, a+step, ...` strictly below `b`.
pub fn parse_n_spec(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::config("empty n specification"));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::config(format!(
                "range must be a:b:step, got '{spec}'"
            )));
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::config(format!("invalid integer '{p}' in range '{spec}'")))
            })
            .collect::<Result<_>>()?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if step == 0 {
            return Err(Error::config(format!("range step must be positive in '{spec}'")));
        }
        if a >= b {
            return Err(Error::config(format!("empty range '{spec}' (need a < b)")));
        }
        Ok((a..b).step_by(step).collect())
    } else {
        spec.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::config(format!("invalid integer '{p}' in n list")))
            })
            .collect()
    }
}

/// Flat echo of a config, with deterministic key order. `Display` of the
/// float fields round-trips the exact `f64`.
pub fn config_to_map(config: &ExperimentConfig) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    map.insert("kind".into(), config.experiment.name().to_string());
    match config.law {
        EntryLaw::Gaussian => {
            map.insert("law".into(), "gaussian".into());
        }
        EntryLaw::Pareto { mu } => {
            map.insert("law".into(), "pareto".into());
            map.insert("mu".into(), format!("{mu}"));
        }
    }
    let ns: Vec<String> = config.n_values.iter().map(|n| n.to_string()).collect();
    map.insert("n".into(), ns.join(","));
    map.insert("trials".into(), config.trials.to_string());
    map.insert("seed".into(), config.master_seed.to_string());
    if let Some(spec) = config.truncation {
        map.insert("truncate".into(), format!("{}", spec.exponent));
        map.insert("d_const".into(), format!("{}", spec.d_const));
    }
    map.insert("bins".into(), config.bins.to_string());
    map.insert("workers".into(), config.workers.to_string());
    map.insert("dir".into(), config.output_dir.to_string_lossy().into_owned());
    map
}

fn parse_num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .trim()
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::config(format!("invalid value '{raw}' for '{key}'"))),
    }
}

fn require<'m>(map: &'m BTreeMap<String, String>, key: &str) -> Result<&'m str> {
    map.get(key)
        .map(|s| s.trim())
        .ok_or_else(|| Error::config(format!("missing required key '{key}'")))
}

/// Rebuilds a config from the flat echo, rejecting unknown keys.
pub fn config_from_map(map: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    const KNOWN: [&str; 11] = [
        "kind", "law", "mu", "n", "trials", "seed", "truncate", "d_const", "bins", "workers",
        "dir",
    ];
    if let Some(unknown) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(Error::config(format!("unknown key '{unknown}'")));
    }

    let experiment: ExperimentKind = require(map, "kind")?.parse()?;
    let law = match require(map, "law")? {
        "gaussian" => {
            if map.contains_key("mu") {
                return Err(Error::config("'mu' only applies to the pareto law"));
            }
            EntryLaw::Gaussian
        }
        "pareto" => {
            let mu: f64 = parse_num(map, "mu")?
                .ok_or_else(|| Error::config("law = pareto requires 'mu'"))?;
            EntryLaw::pareto(mu).map_err(|e| Error::config(e.to_string()))?
        }
        other => {
            return Err(Error::config(format!(
                "unknown law '{other}', expected gaussian or pareto"
            )))
        }
    };
    let n_values = parse_n_spec(require(map, "n")?)?;
    let trials: usize = parse_num(map, "trials")?
        .ok_or_else(|| Error::config("missing required key 'trials'"))?;
    let master_seed: u64 =
        parse_num(map, "seed")?.ok_or_else(|| Error::config("missing required key 'seed'"))?;

    let truncation = match (parse_num::<f64>(map, "truncate")?, parse_num::<f64>(map, "d_const")?) {
        (Some(exponent), d) => {
            Some(TruncationSpec::new(exponent, d.unwrap_or(1.0))
                .map_err(|e| Error::config(e.to_string()))?)
        }
        (None, Some(_)) => {
            return Err(Error::config("'d_const' requires 'truncate'"));
        }
        (None, None) => None,
    };

    let mut config = ExperimentConfig::new(experiment, law, n_values, trials, master_seed);
    config.truncation = truncation;
    config.bins = parse_num(map, "bins")?.unwrap_or(70);
    config.workers = parse_num(map, "workers")?.unwrap_or(1);
    config.output_dir = PathBuf::from(map.get("dir").map(|s| s.trim()).unwrap_or("."));
    config.validate()?;
    Ok(config)
}

/// Maps a `[section] key` pair from the file onto its flat key.
fn flat_key(section: &str, key: &str, line: usize) -> Result<&'static str> {
    const EXPERIMENT_KEYS: [&str; 10] =
        ["kind", "law", "mu", "n", "trials", "seed", "truncate", "d_const", "bins", "workers"];
    match section {
        "experiment" => EXPERIMENT_KEYS
            .into_iter()
            .find(|&k| k == key)
            .ok_or_else(|| {
                Error::config(format!("line {line}: unknown key '{key}' in [experiment]"))
            }),
        "output" => {
            if key == "dir" {
                Ok("dir")
            } else {
                Err(Error::config(format!("line {line}: unknown key '{key}' in [output]")))
            }
        }
        other => Err(Error::config(format!("line {line}: unknown section [{other}]"))),
    }
}

/// Parses config-file text. See the module docs for the grammar.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find(['#', ';']) {
            Some(cut) => &raw[..cut],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {line_no}: unterminated section")))?
                .trim();
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {line_no}: expected 'key = value', got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let section = section.as_deref().ok_or_else(|| {
            Error::config(format!("line {line_no}: '{key}' appears before any [section]"))
        })?;
        let flat = flat_key(section, key, line_no)?;
        if map.insert(flat.to_string(), value.to_string()).is_some() {
            return Err(Error::config(format!("line {line_no}: duplicate key '{key}'")));
        }
    }
    config_from_map(&map)
}

/// Reads and parses a config file, naming the path in every failure.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
    parse_config(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

//! Settings merged from flags, environment and an optional `key = value` file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use gpkn_core::geodesy::SolveLimits;
use gpkn_core::theorems::{Caps, VerifyContext};

pub const DEFAULT_REPORT_DIR: &str = "gpkn-reports";
pub const DEFAULT_SEED: u64 = 42;

const KEYS: &[&str] = &[
    "cache_dir",
    "report_dir",
    "threads",
    "seed",
    "bfs_cap",
    "star_cap",
    "solver_cap",
    "counterexample_cap",
    "time_limit",
];

#[derive(Clone, Debug)]
pub struct CliConfig {
    pub cache_dir: Option<PathBuf>,
    pub report_dir: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
    pub caps: Caps,
    pub solver_cap: usize,
    pub time_limit: Option<Duration>,
}

/// Values given on the command line (or through the environment).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub report_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub bfs_cap: Option<u64>,
    pub star_cap: Option<u64>,
    pub solver_cap: Option<usize>,
    pub counterexample_cap: Option<u64>,
    pub time_limit: Option<u64>,
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", i + 1);
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            bail!("config line {}: unknown key '{key}'", i + 1);
        }
        let value = value.trim().trim_matches('"');
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| anyhow::anyhow!("config key {key}: bad value '{v}'"))
        })
        .transpose()
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(
    name: &str,
    v: Option<T>,
) -> Result<Option<T>> {
    if let Some(x) = &v {
        if *x <= T::default() {
            bail!("{name} must be positive, got {x}");
        }
    }
    Ok(v)
}

impl CliConfig {
    /// Flags and environment win over the file; the file wins over defaults.
    pub fn resolve(flags: Overrides, config_path: Option<&Path>) -> Result<Self> {
        let file = match config_path {
            Some(p) => parse_config_text(
                &fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?,
            )?,
            None => BTreeMap::new(),
        };
        let defaults = Caps::default();
        let caps = Caps {
            bfs: positive("bfs_cap", flags.bfs_cap.or(from_file(&file, "bfs_cap")?))?
                .unwrap_or(defaults.bfs),
            star: positive("star_cap", flags.star_cap.or(from_file(&file, "star_cap")?))?
                .unwrap_or(defaults.star),
            counterexample_bfs: positive(
                "counterexample_cap",
                flags
                    .counterexample_cap
                    .or(from_file(&file, "counterexample_cap")?),
            )?
            .unwrap_or(defaults.counterexample_bfs),
        };
        let time_limit = positive(
            "time_limit",
            flags.time_limit.or(from_file(&file, "time_limit")?),
        )?;
        Ok(CliConfig {
            cache_dir: flags.cache_dir.or(from_file(&file, "cache_dir")?),
            report_dir: flags
                .report_dir
                .or(from_file(&file, "report_dir")?)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT_DIR)),
            threads: positive("threads", flags.threads.or(from_file(&file, "threads")?))?,
            seed: flags
                .seed
                .or(from_file(&file, "seed")?)
                .unwrap_or(DEFAULT_SEED),
            caps,
            solver_cap: positive(
                "solver_cap",
                flags.solver_cap.or(from_file(&file, "solver_cap")?),
            )?
            .unwrap_or(SolveLimits::default().max_order),
            time_limit: time_limit.map(Duration::from_secs),
        })
    }

    pub fn verify_context(&self) -> VerifyContext {
        VerifyContext {
            caps: self.caps.clone(),
            cache_dir: self.cache_dir.clone(),
        }
    }

    pub fn solve_limits(&self) -> SolveLimits {
        SolveLimits {
            max_order: self.solver_cap,
            time_limit: self.time_limit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text() {
        let m =
            parse_config_text("# caps\nbfs_cap = 500\nreport_dir=\"out\" # inline\n\n").unwrap();
        assert_eq!(m["bfs_cap"], "500");
        assert_eq!(m["report_dir"], "out");
        assert!(parse_config_text("colour = red").is_err());
        assert!(parse_config_text("bfs_cap").is_err());
    }

    #[test]
    fn precedence_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gpkn.conf");
        fs::write(&path, "seed = 7\nstar_cap = 100\nthreads = 2\n").unwrap();
        let flags = Overrides {
            star_cap: Some(200),
            ..Default::default()
        };
        let c = CliConfig::resolve(flags, Some(&path)).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.caps.star, 200);
        assert_eq!(c.threads, Some(2));
        assert_eq!(c.report_dir, PathBuf::from(DEFAULT_REPORT_DIR));

        let zero = Overrides {
            bfs_cap: Some(0),
            ..Default::default()
        };
        assert!(CliConfig::resolve(zero, None).is_err());
    }
}

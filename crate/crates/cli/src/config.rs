//! Run configuration: command-line flags over a `key=value` file over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bethechain_core::{MpsConfig, Method};
use clap::Args;

use crate::exit::Failure;

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Number of sites.
    #[arg(long)]
    pub n: Option<usize>,

    /// Hopping amplitude.
    #[arg(long)]
    pub j: Option<f64>,

    /// Interaction strength.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,

    /// First U of a range.
    #[arg(long, allow_hyphen_values = true)]
    pub u_from: Option<f64>,

    /// Last U of a range (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub u_to: Option<f64>,

    /// Grid points of a range.
    #[arg(long)]
    pub points: Option<usize>,

    /// Entropy backend: mps or oracle.
    #[arg(long)]
    pub method: Option<String>,

    /// Absolute singular-value cutoff of MPS updates.
    #[arg(long)]
    pub tol_svd: Option<f64>,

    /// Bond-dimension cap; exceeding it is an error.
    #[arg(long)]
    pub chi_max: Option<usize>,

    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output file (directory for `decompose`).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// key=value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Worker threads for scans.
    #[arg(long)]
    pub threads: Option<usize>,

    /// error, warn, info, debug or trace.
    #[arg(long)]
    pub log_level: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub j: f64,
    pub u: Option<f64>,
    pub u_range: Option<(f64, f64, usize)>,
    pub method: Method,
    pub tol_svd: Option<f64>,
    pub chi_max: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub log_level: String,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, Failure> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => BTreeMap::new(),
        };
        let get = |key: &str| file.get(key).map(String::as_str);

        let n = pick(args.n, get("n"), "n")?;
        let j = pick(args.j, get("j"), "j")?.unwrap_or(1.0);
        let u = pick(args.u, get("u"), "u")?;
        let u_from = pick(args.u_from, get("u_from"), "u_from")?;
        let u_to = pick(args.u_to, get("u_to"), "u_to")?;
        let points = pick(args.points, get("points"), "points")?;
        let method = match args.method.as_deref().or(get("method")) {
            Some(m) => Method::from_str(m).map_err(Failure::from)?,
            None => Method::default(),
        };
        let u_range = match (u_from, u_to, points) {
            (None, None, None) => None,
            (Some(a), Some(b), Some(p)) => Some((a, b, p)),
            _ => return Err(Failure::usage("a range needs --u-from, --u-to and --points")),
        };
        let log_level = args
            .log_level
            .clone()
            .or_else(|| get("log_level").map(str::to_owned))
            .unwrap_or_else(|| "warn".to_owned());
        Ok(RunConfig {
            n,
            j,
            u,
            u_range,
            method,
            tol_svd: pick(args.tol_svd, get("tol_svd"), "tol_svd")?,
            chi_max: pick(args.chi_max, get("chi_max"), "chi_max")?,
            seed: pick(args.seed, get("seed"), "seed")?.unwrap_or(0),
            out: args.out.clone().or_else(|| get("out").map(PathBuf::from)),
            threads: pick(args.threads, get("threads"), "threads")?,
            log_level,
        })
    }

    pub fn sites(&self) -> Result<usize, Failure> {
        self.n.ok_or_else(|| Failure::usage("--n is required"))
    }

    pub fn coupling(&self) -> Result<f64, Failure> {
        self.u.ok_or_else(|| Failure::usage("--u is required"))
    }

    pub fn mps_config(&self, sites: usize) -> MpsConfig {
        let mut c = MpsConfig::for_sites(sites);
        if let Some(t) = self.tol_svd {
            c.trunc_tol = t;
        }
        if let Some(chi) = self.chi_max {
            c.chi_max = chi;
        }
        c
    }
}

fn pick<T: FromStr>(flag: Option<T>, file: Option<&str>, key: &str) -> Result<Option<T>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("config key {key}: cannot parse '{raw}'"))),
        None => Ok(None),
    }
}

const KEYS: &[&str] = &[
    "n", "j", "u", "u_from", "u_to", "points", "method", "tol_svd", "chi_max", "seed", "out", "threads",
    "log_level",
];

/// Blank lines and `#` comments are skipped. Keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Failure> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Failure::usage(format!("config line {}: unknown key '{key}'", i + 1)));
        }
        map.insert(key, value.trim().to_owned());
    }
    Ok(map)
}

fn read_file(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

//! Run configuration: a key=value file merged with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, ValueEnum};
use dipole_core::energy::{AnyMap, HParams, QuadSpec};
use dipole_core::patch::{BDeltaMap, PatchParams};
use dipole_core::verify::{DELTA_LADDER, EPS_LADDER};

/// A bad invocation: invalid parameters, empty ladders, unknown keys.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Identity,
    V,
    Ueps,
    Bdelta,
}

impl FromStr for MapKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        <MapKind as ValueEnum>::from_str(s, true).map_err(|e| anyhow!(e))
    }
}

const KEYS: &[&str] = &[
    "map", "alpha", "beta", "c", "gamma", "delta", "eps", "c0", "deltas", "eps_ladder", "order", "init_div",
    "grading", "rel_tol", "max_depth", "max_cells", "adaptive", "seed", "grid", "suite", "scale",
];

/// Parsed key=value file. `#` starts a comment; blank lines are ignored.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(usage(format!("config line {}: unknown key '{k}'", n + 1)));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key} = '{v}': {e}"))),
        }
    }
}

/// Comma-separated list; the empty string is the empty ladder.
pub fn parse_ladder(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| usage(format!("ladder value '{t}': {e}"))))
        .collect()
}

/// Flags shared by every command. Each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Opts {
    /// key=value file with defaults for any of the flags below
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub map: Option<MapKind>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// scale factor of H
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    /// delta ladder, comma-separated
    #[arg(long)]
    pub deltas: Option<String>,
    /// eps ladder, comma-separated
    #[arg(long)]
    pub eps_ladder: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub init_div: Option<usize>,
    #[arg(long)]
    pub grading: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<u32>,
    #[arg(long)]
    pub max_cells: Option<usize>,
    #[arg(long)]
    pub adaptive: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// grid points per direction
    #[arg(long)]
    pub grid: Option<usize>,
    /// verify: "all" or an id prefix such as "jump" or "interfaces/v"
    #[arg(long)]
    pub suite: Option<String>,
    /// verify: sample-count multiplier in (0, 1]
    #[arg(long)]
    pub scale: Option<f64>,
    /// output file; stdout when absent
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub map: MapKind,
    pub h: HParams,
    pub gamma: f64,
    pub delta: f64,
    pub eps: f64,
    pub c0: f64,
    pub deltas: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    pub quad: QuadSpec,
    pub seed: u64,
    pub grid: usize,
    pub suite: String,
    pub scale: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            map: MapKind::V,
            h: HParams::default(),
            gamma: PatchParams::DEFAULT_GAMMA,
            delta: 0.5,
            eps: 1e-2,
            c0: PatchParams::DEFAULT_C0,
            deltas: DELTA_LADDER.to_vec(),
            eps_ladder: EPS_LADDER.to_vec(),
            quad: QuadSpec::default(),
            seed: 7,
            grid: 200,
            suite: "all".into(),
            scale: 1.0,
            out: None,
        }
    }
}

fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

impl RunConfig {
    /// Flags over config file over defaults, then validated.
    pub fn resolve(opts: &Opts) -> Result<Self> {
        let file = match &opts.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Self::merge(opts, &file)
    }

    pub fn merge(o: &Opts, f: &ConfigFile) -> Result<Self> {
        let d = RunConfig::default();
        let q = &d.quad;
        let ladder = |flag: &Option<String>, key: &str, default: &[f64]| -> Result<Vec<f64>> {
            match flag.clone().or(f.get::<String>(key)?) {
                Some(s) => parse_ladder(&s),
                None => Ok(default.to_vec()),
            }
        };
        let cfg = RunConfig {
            map: pick(o.map, f, "map", d.map)?,
            h: HParams::unchecked(
                pick(o.c, f, "c", d.h.c)?,
                pick(o.alpha, f, "alpha", d.h.alpha)?,
                pick(o.beta, f, "beta", d.h.beta)?,
            ),
            gamma: pick(o.gamma, f, "gamma", d.gamma)?,
            delta: pick(o.delta, f, "delta", d.delta)?,
            eps: pick(o.eps, f, "eps", d.eps)?,
            c0: pick(o.c0, f, "c0", d.c0)?,
            deltas: ladder(&o.deltas, "deltas", &d.deltas)?,
            eps_ladder: ladder(&o.eps_ladder, "eps_ladder", &d.eps_ladder)?,
            quad: QuadSpec {
                order: pick(o.order, f, "order", q.order)?,
                init_div: pick(o.init_div, f, "init_div", q.init_div)?,
                grading: pick(o.grading, f, "grading", q.grading)?,
                rel_tol: pick(o.rel_tol, f, "rel_tol", q.rel_tol)?,
                max_depth: pick(o.max_depth, f, "max_depth", q.max_depth)?,
                max_cells: pick(o.max_cells, f, "max_cells", q.max_cells)?,
                adaptive: pick(o.adaptive, f, "adaptive", q.adaptive)?,
                anchor_scale: None,
            },
            seed: pick(o.seed, f, "seed", d.seed)?,
            grid: pick(o.grid, f, "grid", d.grid)?,
            suite: pick(o.suite.clone(), f, "suite", d.suite)?,
            scale: pick(o.scale, f, "scale", d.scale)?,
            out: o.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.h;
        if !(h.alpha > 0.0 && h.alpha < 1.0 / 3.0) {
            return Err(usage(format!("alpha = {} rejected: requires 0<α<1/3", h.alpha)));
        }
        if !(h.beta > 1.0 && h.beta < 1.5) {
            return Err(usage(format!("beta = {} rejected: requires 1<β<3/2", h.beta)));
        }
        if !(h.c > 0.0) {
            return Err(usage(format!("c = {} rejected: requires c>0", h.c)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0 / 3.0) {
            return Err(usage(format!("gamma = {} rejected: requires 0<γ≤1/3", self.gamma)));
        }
        if !(self.c0 > 14.0) {
            return Err(usage(format!("c0 = {} rejected: requires c₀>14", self.c0)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) || self.deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
            return Err(usage("delta values must lie in (0, 1]"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) || self.eps_ladder.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(usage("eps values must lie in (0, 1)"));
        }
        if !(self.quad.rel_tol > 0.0) || self.quad.order == 0 || self.quad.init_div == 0 {
            return Err(usage("quadrature needs rel_tol > 0, order >= 1, init_div >= 1"));
        }
        if self.grid == 0 {
            return Err(usage("grid must be at least 1"));
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(usage(format!("scale = {} not in (0, 1]", self.scale)));
        }
        Ok(())
    }

    pub fn build_map(&self) -> Result<AnyMap> {
        Ok(match self.map {
            MapKind::Identity => AnyMap::Identity,
            MapKind::V => AnyMap::V,
            MapKind::Ueps => AnyMap::ueps(self.eps, self.gamma).map_err(|e| usage(e.to_string()))?,
            MapKind::Bdelta => {
                let p = PatchParams::new(self.delta, self.gamma, self.c0).map_err(|e| usage(e.to_string()))?;
                AnyMap::Bdelta(BDeltaMap::new(p)?)
            }
        })
    }
}

//! Flat experiment configuration: one `key = value` per line, `#` starts a
//! comment. Simulation keys carry the `SimConfig` field names; topology and
//! experiment settings use the `topology.` and `experiment.` prefixes.
//! `strategy` and `load` take comma-separated lists and span the cells of
//! the experiment.
//!
//! ```text
//! topology.kind = geometric
//! topology.nodes = 50
//! topology.radius = 0.19
//! topology.seed = 7
//! strategy = ptc-m, qr, tpot-rl
//! load = 0.1, 0.6
//! setup_time = 50
//! total_ticks = 100000
//! experiment.seeds = 5
//! ```
//!
//! `load_schedule` replaces `load` for a dynamic run: either probabilities
//! changing at equal intervals (`0.1 0.6`) or explicit `tick:probability`
//! pairs (`0:0.1 50000:0.6`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use callroute_core::{DurationModel, LoadSchedule, SimConfig, StrategyKind, Tick, Topology};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::topofile::parse_topology;

const KEYS: &[&str] = &[
    "topology.kind",
    "topology.nodes",
    "topology.radius",
    "topology.seed",
    "topology.file",
    "strategy",
    "load",
    "load_schedule",
    "alpha",
    "tau",
    "q_init",
    "activity_window",
    "usage_threshold",
    "update_interval",
    "setup_time",
    "mean_duration",
    "duration_model",
    "capacity",
    "total_ticks",
    "seed",
    "metrics_window",
    "experiment.seeds",
    "experiment.burn_in_fraction",
    "experiment.baseline",
    "experiment.output",
];

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    Geometric { nodes: usize, radius: f64, seed: u64 },
    File(PathBuf),
}

impl TopologySpec {
    pub fn build(&self) -> Result<Topology> {
        match self {
            TopologySpec::Geometric { nodes, radius, seed } => Ok(Topology::random_geometric(*nodes, *radius, *seed)?),
            TopologySpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_topology(&text)
            }
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Geometric { nodes, radius, seed } => {
                write!(f, "geometric nodes={nodes} radius={radius} seed={seed}")
            }
            TopologySpec::File(p) => {
                let name = p.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
                write!(f, "file={name} radius=none")
            }
        }
    }
}

/// Origination probability of one cell.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadSpec {
    Constant(f64),
    /// Probabilities changing at equal intervals.
    Equal(Vec<f64>),
    Explicit(Vec<(Tick, f64)>),
}

impl LoadSpec {
    pub fn schedule(&self, total_ticks: Tick) -> Result<LoadSchedule> {
        Ok(match self {
            LoadSpec::Constant(p) => LoadSchedule::new(vec![(0, *p)])?,
            LoadSpec::Equal(ps) => LoadSchedule::equal_intervals(ps, total_ticks)?,
            LoadSpec::Explicit(levels) => LoadSchedule::new(levels.clone())?,
        })
    }

    /// Short label used in CSV rows and file names, e.g. `0.1` or `0.1>0.6`.
    pub fn label(&self) -> String {
        let join = |ps: Vec<f64>| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(">");
        match self {
            LoadSpec::Constant(p) => p.to_string(),
            LoadSpec::Equal(ps) => join(ps.clone()),
            LoadSpec::Explicit(levels) => join(levels.iter().map(|l| l.1).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub strategy: StrategyKind,
    pub load: LoadSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub topology: TopologySpec,
    pub cells: Vec<Cell>,
    /// Settings shared by every cell; strategy, schedule and seed are
    /// overwritten per run.
    pub base: SimConfig,
    pub seeds: u32,
    pub burn_in_fraction: f64,
    /// Reference strategy of the dynamism summary.
    pub baseline: Option<StrategyKind>,
    pub output: PathBuf,
    /// SHA-256 of the canonical key/value listing.
    pub digest: String,
}

impl ExperimentSpec {
    pub fn config_for(&self, cell: &Cell, seed: u64) -> Result<SimConfig> {
        let mut c = self.base.clone();
        c.strategy = cell.strategy;
        c.load_schedule = cell.load.schedule(c.total_ticks)?;
        c.seed = seed;
        c.validate()?;
        Ok(c)
    }

    /// Seeds of every cell, `seed, seed + 1, ...`.
    pub fn run_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..u64::from(self.seeds)).map(move |k| self.base.seed + k)
    }
}

/// Reads `path`; relative `topology.file` and `experiment.output` values
/// resolve against the file's directory.
pub fn load_experiment(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_experiment(&text, dir)
}

pub fn parse_experiment(text: &str, base_dir: &Path) -> Result<ExperimentSpec> {
    let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::parse(line_no, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::parse(line_no, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(CliError::parse(line_no, format!("`{key}` has no value")));
        }
        if kv.insert(key.to_string(), (line_no, value.to_string())).is_some() {
            return Err(CliError::parse(line_no, format!("`{key}` given twice")));
        }
    }
    let r = Reader { kv: &kv };

    let topology = match r.str("topology.kind").unwrap_or("geometric") {
        "geometric" => TopologySpec::Geometric {
            nodes: r.num("topology.nodes")?.unwrap_or(50),
            radius: r.num("topology.radius")?.unwrap_or(0.19),
            seed: r.num("topology.seed")?.unwrap_or(7),
        },
        "file" => {
            let f = r.str("topology.file").ok_or_else(|| CliError::Config("topology.kind = file needs topology.file".into()))?;
            TopologySpec::File(base_dir.join(f))
        }
        other => return Err(r.error("topology.kind", format!("unknown topology kind `{other}`"))),
    };

    let mut base = SimConfig::with_setup_time(StrategyKind::PtcM, 50, 0.1, 100_000);
    if let Some(v) = r.num("setup_time")? {
        base.setup_time = v;
    }
    base.mean_duration = r.num("mean_duration")?.unwrap_or(20.0 * base.setup_time as f64);
    base.duration_model = match r.str("duration_model").unwrap_or("geometric") {
        "geometric" => DurationModel::Geometric,
        "fixed" => DurationModel::Fixed,
        other => return Err(r.error("duration_model", format!("unknown duration model `{other}`"))),
    };
    macro_rules! set {
        ($($field:ident).+ = $key:literal) => {
            if let Some(v) = r.num($key)? {
                base.$($field).+ = v;
            }
        };
    }
    set!(params.alpha = "alpha");
    set!(params.tau = "tau");
    set!(params.q_init = "q_init");
    set!(params.activity_window = "activity_window");
    set!(params.usage_threshold = "usage_threshold");
    set!(params.update_interval = "update_interval");
    set!(capacity = "capacity");
    set!(total_ticks = "total_ticks");
    set!(seed = "seed");
    set!(metrics_window = "metrics_window");

    let mut strategies = Vec::new();
    for name in r.list("strategy").unwrap_or_else(|| vec!["ptc-m"]) {
        let s = name.parse::<StrategyKind>().map_err(|e| r.error("strategy", e.to_string()))?;
        if strategies.contains(&s) {
            return Err(r.error("strategy", format!("`{name}` listed twice")));
        }
        strategies.push(s);
    }

    let loads: Vec<LoadSpec> = match (r.list("load"), r.str("load_schedule")) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either `load` or `load_schedule`, not both".into())),
        (None, Some(s)) => vec![parse_schedule(s).map_err(|e| r.error("load_schedule", e))?],
        (list, None) => {
            let mut loads = Vec::new();
            for v in list.unwrap_or_else(|| vec!["0.1"]) {
                let p: f64 = v.parse().map_err(|_| r.error("load", format!("bad probability `{v}`")))?;
                if loads.contains(&LoadSpec::Constant(p)) {
                    return Err(r.error("load", format!("`{v}` listed twice")));
                }
                loads.push(LoadSpec::Constant(p));
            }
            loads
        }
    };

    let cells: Vec<Cell> = strategies
        .iter()
        .flat_map(|&strategy| loads.iter().map(move |load| Cell { strategy, load: load.clone() }))
        .collect();
    let spec = ExperimentSpec {
        topology,
        base,
        seeds: r.num("experiment.seeds")?.unwrap_or(10),
        burn_in_fraction: r.num("experiment.burn_in_fraction")?.unwrap_or(0.2),
        baseline: match r.str("experiment.baseline") {
            Some(name) => Some(name.parse::<StrategyKind>().map_err(|e| r.error("experiment.baseline", e.to_string()))?),
            None => None,
        },
        output: base_dir.join(r.str("experiment.output").unwrap_or("results")),
        digest: digest(&kv),
        cells,
    };
    if spec.seeds == 0 {
        return Err(r.error("experiment.seeds", "need at least one seed".into()));
    }
    if !(0.0..1.0).contains(&spec.burn_in_fraction) {
        return Err(r.error("experiment.burn_in_fraction", "must lie in [0, 1)".into()));
    }
    // Every cell must yield a valid configuration.
    for cell in &spec.cells {
        spec.config_for(cell, spec.base.seed)?;
    }
    Ok(spec)
}

fn parse_schedule(s: &str) -> Result<LoadSpec, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.iter().all(|p| p.contains(':')) {
        let mut levels = Vec::new();
        for p in parts {
            let (t, v) = p.split_once(':').expect("checked");
            let t: Tick = t.parse().map_err(|_| format!("bad tick `{t}`"))?;
            let v: f64 = v.parse().map_err(|_| format!("bad probability `{v}`"))?;
            levels.push((t, v));
        }
        Ok(LoadSpec::Explicit(levels))
    } else if parts.iter().any(|p| p.contains(':')) {
        Err("mix of `tick:probability` pairs and bare probabilities".into())
    } else {
        let ps: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
        Ok(LoadSpec::Equal(ps.map_err(|_| format!("bad probability list `{s}`"))?))
    }
}

fn digest(kv: &BTreeMap<String, (usize, String)>) -> String {
    let mut h = Sha256::new();
    for (k, (_, v)) in kv {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

struct Reader<'a> {
    kv: &'a BTreeMap<String, (usize, String)>,
}

impl Reader<'_> {
    fn str(&self, key: &str) -> Option<&str> {
        self.kv.get(key).map(|(_, v)| v.as_str())
    }

    fn list(&self, key: &str) -> Option<Vec<&str>> {
        self.str(key).map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.kv.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::parse(*line, format!("`{key}` has invalid value `{v}`"))),
        }
    }

    fn error(&self, key: &str, message: String) -> CliError {
        match self.kv.get(key) {
            Some((line, _)) => CliError::parse(*line, message),
            None => CliError::Config(message),
        }
    }
}

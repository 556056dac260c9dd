//! CSV outputs. Every file opens with `#` metadata lines and every float
//! carries six significant digits, so output bytes depend only on the
//! experiment and seeds.
//!
//! * `summary.csv`: one row per run.
//! * `series/<strategy>_load<label>_seed<seed>.csv`: windowed series of one run.
//! * `dynamism.csv`: percentage differences against a baseline strategy,
//!   for cells whose load changes during the run.

use std::path::{Path, PathBuf};

use callroute_core::metrics::{dynamism_summary, steady_state_average, DynamismSummary, MeanStdev};
use callroute_core::{RunReport, StrategyKind, Topology};

use crate::config::{ExperimentSpec, LoadSpec};
use crate::error::{CliError, Result};
use crate::fmt::sig6;
use crate::runner::RunRecord;

/// Steady-state view of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub x: f64,
    pub x_izds: f64,
    pub r: f64,
    /// Windowed success rate past burn-in.
    pub x_steady: MeanStdev,
    pub x_izds_steady: MeanStdev,
    /// Reward messages per tick past burn-in.
    pub r_steady: MeanStdev,
}

impl RunSummary {
    pub fn new(report: &RunReport, burn_in_fraction: f64) -> Result<Self> {
        let m = &report.metrics;
        Ok(RunSummary {
            x: report.x(),
            x_izds: report.x_izds(),
            r: report.r(),
            x_steady: steady_state_average(&m.success_series(), burn_in_fraction)?,
            x_izds_steady: steady_state_average(&m.izds_series(), burn_in_fraction)?,
            r_steady: steady_state_average(&m.message_series(), burn_in_fraction)?,
        })
    }
}

pub fn metadata(spec: &ExperimentSpec, topo: &Topology, kind: &str) -> Vec<String> {
    let b = &spec.base;
    let p = &b.params;
    vec![
        format!("callroute {kind}"),
        format!("config_sha256={}", spec.digest),
        format!(
            "topology={} nodes={} edges={} mean_degree={} diameter={}",
            spec.topology,
            topo.node_count(),
            topo.edges().len(),
            sig6(topo.mean_degree()),
            topo.min_hop_distances().diameter()
        ),
        format!(
            "q_init={} alpha={} tau={} activity_window={} usage_threshold={} update_interval={}",
            sig6(p.q_init),
            sig6(p.alpha),
            sig6(p.tau),
            p.activity_window,
            sig6(p.usage_threshold),
            p.update_interval
        ),
        format!(
            "setup_time={} mean_duration={} duration_model={:?} capacity={} total_ticks={} metrics_window={}",
            b.setup_time,
            sig6(b.mean_duration),
            b.duration_model,
            b.capacity,
            b.total_ticks,
            b.metrics_window
        ),
        format!("seeds={} first_seed={} burn_in_fraction={}", spec.seeds, b.seed, sig6(spec.burn_in_fraction)),
    ]
}

fn render(comments: &[String], header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut out = Vec::new();
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::Csv(e.into()))?;
    }
    Ok(String::from_utf8(out).expect("CSV output is UTF-8"))
}

pub fn summary_csv(spec: &ExperimentSpec, topo: &Topology, records: &[RunRecord]) -> Result<String> {
    let diameter = topo.min_hop_distances().diameter();
    let mut header: Vec<String> = [
        "strategy", "load", "seed", "status", "no", "nc", "nc_izds", "x", "x_izds", "r", "izds_deviation",
        "x_steady", "x_steady_stdev", "x_izds_steady", "r_steady", "loops", "drops_deadline", "drops_capacity",
        "drops_dead_end", "stale_messages", "loop_residue_drops",
    ]
    .map(String::from)
    .to_vec();
    for d in 1..=diameter {
        header.extend([format!("x_d{d}"), format!("no_d{d}"), format!("nc_d{d}")]);
    }
    let mut rows = Vec::new();
    for rec in records {
        let cell = &spec.cells[rec.cell];
        let mut row = vec![cell.strategy.name().to_string(), cell.load.label(), rec.seed.to_string()];
        let summary = rec.outcome.as_ref().map_err(Clone::clone).and_then(|r| {
            RunSummary::new(r, spec.burn_in_fraction).map(|s| (r, s)).map_err(|e| e.to_string())
        });
        match summary {
            Ok((report, s)) => {
                let m = &report.metrics;
                let dg = &report.diagnostics;
                row.push("ok".into());
                row.extend([m.no, m.nc, m.nc_izds].map(|v| v.to_string()));
                row.extend(
                    [s.x, s.x_izds, s.r, report.izds_deviation(), s.x_steady.mean, s.x_steady.stdev, s.x_izds_steady.mean, s.r_steady.mean]
                        .map(sig6),
                );
                row.extend(
                    [dg.loops_detected, dg.drops_deadline, dg.drops_capacity, dg.drops_dead_end, dg.stale_messages, dg.drop_leaks]
                        .map(|v| v.to_string()),
                );
                for d in 1..=diameter as usize {
                    let (no, nc) = (m.no_d.get(d).copied().unwrap_or(0), m.nc_d.get(d).copied().unwrap_or(0));
                    let x = if no == 0 { String::new() } else { sig6(nc as f64 / no as f64) };
                    row.extend([x, no.to_string(), nc.to_string()]);
                }
            }
            Err(e) => {
                row.push(format!("error: {e}"));
                row.resize(header.len(), String::new());
            }
        }
        rows.push(row);
    }
    render(&metadata(spec, topo, "summary"), &header, &rows)
}

pub fn series_csv(spec: &ExperimentSpec, topo: &Topology, report: &RunReport, load: &LoadSpec) -> Result<String> {
    let m = &report.metrics;
    let header = ["window_start", "load", "no", "nc", "nc_izds", "x", "x_izds", "messages", "r"].map(String::from);
    let schedule = load.schedule(report.total_ticks)?;
    let rows: Vec<Vec<String>> = m
        .windows()
        .iter()
        .map(|w| {
            vec![
                w.start.to_string(),
                sig6(schedule.probability_at(w.start)),
                w.no.to_string(),
                w.nc.to_string(),
                w.nc_izds.to_string(),
                sig6(w.x()),
                sig6(w.x_izds()),
                w.messages.to_string(),
                sig6(w.messages as f64 / m.window() as f64),
            ]
        })
        .collect();
    let mut meta = metadata(spec, topo, "series");
    meta.push(format!("strategy={} load={} seed={}", report.strategy.name(), load.label(), report.seed));
    render(&meta, &header, &rows)
}

/// Window-by-window mean over runs, skipping undefined windows.
pub fn mean_series(reports: &[&RunReport], pick: fn(&RunReport) -> Vec<f64>) -> Vec<f64> {
    let all: Vec<Vec<f64>> = reports.iter().map(|r| pick(r)).collect();
    let len = all.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|k| {
            let v: Vec<f64> = all.iter().map(|s| s[k]).filter(|x| x.is_finite()).collect();
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        })
        .collect()
}

/// Dynamism summaries of each strategy against the baseline, per dynamic
/// load. The baseline is the configured one, else TPOT-RL when present,
/// else the last strategy.
pub fn dynamism_rows(spec: &ExperimentSpec, records: &[RunRecord]) -> Result<Vec<(StrategyKind, StrategyKind, LoadSpec, DynamismSummary)>> {
    let strategies: Vec<StrategyKind> = spec.cells.iter().fold(Vec::new(), |mut acc, c| {
        if !acc.contains(&c.strategy) {
            acc.push(c.strategy);
        }
        acc
    });
    let baseline = spec
        .baseline
        .or_else(|| strategies.contains(&StrategyKind::TpotRl).then_some(StrategyKind::TpotRl))
        .or_else(|| strategies.last().copied());
    let Some(baseline) = baseline else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    let loads: Vec<&LoadSpec> = spec.cells.iter().map(|c| &c.load).fold(Vec::new(), |mut acc, l| {
        if !acc.contains(&l) {
            acc.push(l);
        }
        acc
    });
    for load in loads {
        let schedule = load.schedule(spec.base.total_ticks)?;
        if schedule.degree_of_dynamism() < 2 {
            continue;
        }
        let series_of = |s: StrategyKind| -> Vec<f64> {
            let reports: Vec<&RunReport> = records
                .iter()
                .filter(|r| spec.cells[r.cell].strategy == s && &spec.cells[r.cell].load == load)
                .filter_map(|r| r.outcome.as_ref().ok())
                .collect();
            mean_series(&reports, |r| r.metrics.success_series())
        };
        let b = series_of(baseline);
        if b.is_empty() {
            continue;
        }
        for &s in strategies.iter().filter(|&&s| s != baseline) {
            let a = series_of(s);
            if a.is_empty() {
                continue;
            }
            let summary = dynamism_summary(&a, &b, spec.base.metrics_window, &schedule, spec.base.total_ticks, spec.burn_in_fraction)?;
            out.push((s, baseline, load.clone(), summary));
        }
    }
    Ok(out)
}

pub fn dynamism_csv(spec: &ExperimentSpec, topo: &Topology, records: &[RunRecord]) -> Result<Option<String>> {
    let summaries = dynamism_rows(spec, records)?;
    if summaries.is_empty() {
        return Ok(None);
    }
    let header =
        ["strategy", "baseline", "load", "degree_of_dynamism", "row", "start", "end", "min", "mean", "max"].map(String::from);
    let mut rows = Vec::new();
    for (s, b, load, d) in &summaries {
        let lead = || vec![s.name().to_string(), b.name().to_string(), load.label(), d.intervals.len().to_string()];
        for (k, iv) in d.intervals.iter().enumerate() {
            let mut row = lead();
            row.extend([format!("interval{k}"), iv.start.to_string(), iv.end.to_string()]);
            row.extend([iv.min, iv.mean, iv.max].map(sig6));
            rows.push(row);
        }
        let columns: [(&str, fn(&MeanStdev) -> f64); 2] = [("mean", |m| m.mean), ("stdev", |m| m.stdev)];
        for (name, pick) in columns {
            let mut row = lead();
            row.extend([name.to_string(), String::new(), String::new()]);
            row.extend([pick(&d.min), pick(&d.mean), pick(&d.max)].map(sig6));
            rows.push(row);
        }
    }
    Ok(Some(render(&metadata(spec, topo, "dynamism"), &header, &rows)?))
}

fn file_label(label: &str) -> String {
    label.replace('>', "-")
}

/// Writes every output under `dir` and returns the paths written.
pub fn write_outputs(spec: &ExperimentSpec, topo: &Topology, records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let series_dir = dir.join("series");
    std::fs::create_dir_all(&series_dir).map_err(|e| CliError::io(&series_dir, e))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, text: String| -> Result<()> {
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put(dir.join("summary.csv"), summary_csv(spec, topo, records)?)?;
    for rec in records {
        if let Ok(report) = &rec.outcome {
            let cell = &spec.cells[rec.cell];
            let name = format!("{}_load{}_seed{}.csv", cell.strategy.name(), file_label(&cell.load.label()), rec.seed);
            put(series_dir.join(name), series_csv(spec, topo, report, &cell.load)?)?;
        }
    }
    if let Some(text) = dynamism_csv(spec, topo, records)? {
        put(dir.join("dynamism.csv"), text)?;
    }
    Ok(written)
}

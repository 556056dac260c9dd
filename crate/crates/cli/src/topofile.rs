//! Line-oriented topology files:
//!
//! ```text
//! # comment
//! nodes 3
//! edge 0 1
//! edge 1 2
//! pos 0 0.1 0.5
//! ```
//!
//! `nodes` comes first. `pos` lines are optional, but if any is present
//! every node needs exactly one.

use std::fmt::Write as _;

use callroute_core::Topology;

use crate::error::{CliError, Result};

pub fn parse_topology(text: &str) -> Result<Topology> {
    let mut node_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut positions: Vec<Option<(f64, f64)>> = Vec::new();
    let mut any_pos = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().expect("non-empty line");
        let args: Vec<&str> = words.collect();
        match (keyword, node_count) {
            ("nodes", None) => {
                let [n] = args[..] else { return Err(CliError::parse(line_no, "expected `nodes N`")) };
                let n: usize = n.parse().map_err(|_| CliError::parse(line_no, format!("bad node count `{n}`")))?;
                node_count = Some(n);
                positions = vec![None; n];
            }
            ("nodes", Some(_)) => return Err(CliError::parse(line_no, "`nodes` given twice")),
            (_, None) => return Err(CliError::parse(line_no, "the first entry must be `nodes N`")),
            ("edge", Some(_)) => {
                let [a, b] = args[..] else { return Err(CliError::parse(line_no, "expected `edge i j`")) };
                edges.push((node_index(a, line_no)?, node_index(b, line_no)?));
            }
            ("pos", Some(n)) => {
                let [i, x, y] = args[..] else { return Err(CliError::parse(line_no, "expected `pos i x y`")) };
                let i = node_index(i, line_no)? as usize;
                if i >= n {
                    return Err(CliError::parse(line_no, format!("position for node {i} of {n}")));
                }
                if positions[i].is_some() {
                    return Err(CliError::parse(line_no, format!("node {i} positioned twice")));
                }
                positions[i] = Some((coordinate(x, line_no)?, coordinate(y, line_no)?));
                any_pos = true;
            }
            (other, Some(_)) => return Err(CliError::parse(line_no, format!("unknown keyword `{other}`"))),
        }
    }
    let n = node_count.ok_or_else(|| CliError::parse(last_line.max(1), "missing `nodes N`"))?;
    let positions = if any_pos {
        let all: Option<Vec<(f64, f64)>> = positions.into_iter().collect();
        Some(all.ok_or_else(|| CliError::parse(last_line, "some nodes have no position"))?)
    } else {
        None
    };
    Ok(Topology::new(n, &edges, positions, None)?)
}

fn node_index(s: &str, line: usize) -> Result<u32> {
    s.parse().map_err(|_| CliError::parse(line, format!("bad node id `{s}`")))
}

fn coordinate(s: &str, line: usize) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::parse(line, format!("bad coordinate `{s}`"))),
    }
}

/// Renders `topo` in the file format, preceded by `comments`.
pub fn write_topology(topo: &Topology, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "nodes {}", topo.node_count());
    for &(a, b) in topo.edges() {
        let _ = writeln!(out, "edge {a} {b}");
    }
    if let Some(pos) = topo.positions() {
        for (i, (x, y)) in pos.iter().enumerate() {
            // Round-trip exact.
            let _ = writeln!(out, "pos {i} {x:?} {y:?}");
        }
    }
    out
}

//! Text formats: hyperedge lists, label files, result tables and CSV reports.
//!
//! Hyperedge list: one hyperedge per line, whitespace-separated members
//! written as `name` or `name:weight` (weight defaults to 1). Everything from
//! `#` to the end of a line is a comment. A member token is split at its last
//! `:` only when the suffix parses as a number, so names may contain colons.
//!
//! Label file: `name<TAB>label` per line. A node may appear on several lines,
//! which builds up its tag set.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::error::Error;
use crate::hitting::HittingTimeResult;
use crate::hypergraph::{Hypergraph, Incidence};
use crate::ranking::RankedNeighbors;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: Error },
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}

impl From<std::io::Error> for IoError {
    fn from(source: std::io::Error) -> Self {
        IoError::Io { path: "<stream>".into(), source }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

/// A hypergraph together with the external node names behind its dense ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub hypergraph: Hypergraph,
    pub names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Dataset {
    /// Wraps a hypergraph whose nodes are named by their ids.
    pub fn unnamed(hypergraph: Hypergraph) -> Self {
        let names: Vec<String> = (0..hypergraph.node_count()).map(|i| i.to_string()).collect();
        Self::with_names(hypergraph, names)
    }

    fn with_names(hypergraph: Hypergraph, names: Vec<String>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Self { hypergraph, names, index }
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<usize, IoError> {
        self.id(name).ok_or_else(|| IoError::UnknownNode(name.to_string()))
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    /// The dataset restricted to `nodes` (sorted), keeping their names.
    pub fn induced(&self, nodes: &[usize]) -> Result<Dataset, IoError> {
        let h = self.hypergraph.induced(nodes)?;
        Ok(Self::with_names(h, nodes.iter().map(|&n| self.names[n].clone()).collect()))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

fn split_member(token: &str) -> (&str, Option<&str>) {
    if let Some((name, weight)) = token.rsplit_once(':') {
        if !name.is_empty() && weight.parse::<f64>().is_ok() {
            return (name, Some(weight));
        }
    }
    (token, None)
}

pub fn parse_hyperedge_list<R: BufRead>(reader: R) -> Result<Dataset, IoError> {
    let mut names = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Vec<Incidence>> = Vec::new();
    let mut lines_of_edges = Vec::new();

    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let body = strip_comment(&line);
        let mut members = Vec::new();
        for token in body.split_whitespace() {
            let (name, weight) = split_member(token);
            let weight = match weight {
                Some(w) => w.parse::<f64>().map_err(|e| IoError::Parse { line: k + 1, message: e.to_string() })?,
                None => 1.0,
            };
            let next = names.len();
            let id = *index.entry(name.to_string()).or_insert(next);
            if id == next {
                names.push(name.to_string());
            }
            members.push((id, weight));
        }
        if !members.is_empty() {
            edges.push(members);
            lines_of_edges.push(k + 1);
        }
    }
    let hypergraph = Hypergraph::with_nodes(names.len(), &edges).map_err(|e| {
        let line = match &e {
            Error::NonPositiveWeight { hyperedge, .. } | Error::DuplicateMembership { hyperedge, .. } => {
                lines_of_edges[*hyperedge]
            }
            _ => 0,
        };
        IoError::Model { line, source: e }
    })?;
    Ok(Dataset { hypergraph, names, index })
}

pub fn read_hyperedge_list(path: &Path) -> Result<Dataset, IoError> {
    parse_hyperedge_list(open(path)?)
}

/// Writes the dataset back in hyperedge-list form; unit weights are omitted.
pub fn write_hyperedge_list<W: Write>(ds: &Dataset, mut out: W) -> Result<(), IoError> {
    for members in ds.hypergraph.hyperedges() {
        let line: Vec<String> = members
            .iter()
            .map(|&(n, w)| if w == 1.0 { ds.names[n].clone() } else { format!("{}:{}", ds.names[n], w) })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// `id<TAB>name` for every node.
pub fn write_dictionary<W: Write>(ds: &Dataset, mut out: W) -> Result<(), IoError> {
    for (id, name) in ds.names.iter().enumerate() {
        writeln!(out, "{id}\t{name}")?;
    }
    Ok(())
}

/// Tag sets keyed by node id. Names absent from the dataset are skipped.
pub fn parse_tags<R: BufRead>(reader: R, ds: &Dataset) -> Result<HashMap<usize, HashSet<String>>, IoError> {
    let mut tags: HashMap<usize, HashSet<String>> = HashMap::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let body = strip_comment(&line).trim_end_matches(['\r', '\n']);
        if body.trim().is_empty() {
            continue;
        }
        let (name, label) = body
            .split_once('\t')
            .ok_or_else(|| IoError::Parse { line: k + 1, message: "expected node<TAB>label".into() })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(IoError::Parse { line: k + 1, message: "empty label".into() });
        }
        if let Some(id) = ds.id(name.trim()) {
            tags.entry(id).or_default().insert(label.to_string());
        }
    }
    Ok(tags)
}

pub fn read_tags(path: &Path, ds: &Dataset) -> Result<HashMap<usize, HashSet<String>>, IoError> {
    parse_tags(open(path)?, ds)
}

/// Single label per node: the first label listed for it.
pub fn parse_labels<R: BufRead>(reader: R, ds: &Dataset) -> Result<HashMap<usize, String>, IoError> {
    let mut labels = HashMap::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let body = strip_comment(&line);
        if body.trim().is_empty() {
            continue;
        }
        let (name, label) = body
            .split_once('\t')
            .ok_or_else(|| IoError::Parse { line: k + 1, message: "expected node<TAB>label".into() })?;
        if let Some(id) = ds.id(name.trim()) {
            labels.entry(id).or_insert_with(|| label.trim().to_string());
        }
    }
    Ok(labels)
}

pub fn read_labels(path: &Path, ds: &Dataset) -> Result<HashMap<usize, String>, IoError> {
    parse_labels(open(path)?, ds)
}

/// Rounds to 12 significant digits. Solver output carries noise around the
/// 1e-10 tolerance; trimming it keeps tables stable across platforms.
pub fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let k = 11 - x.abs().log10().floor() as i32;
    if k >= 0 {
        let p = 10f64.powi(k);
        (x * p).round() / p
    } else {
        let p = 10f64.powi(-k);
        (x / p).round() * p
    }
}

/// Hitting-time table: `# key: value` header lines, then
/// `source_node<TAB>expected_hitting_time` rows in node order.
pub fn write_hitting_times<W: Write>(r: &HittingTimeResult, ds: &Dataset, mut out: W) -> Result<(), IoError> {
    writeln!(out, "# target: {}", ds.name(r.target))?;
    writeln!(out, "# scenario: {}", r.scenario)?;
    writeln!(out, "# method: {}", r.report.method)?;
    writeln!(out, "# iterations: {}", r.report.iterations)?;
    writeln!(out, "# relative_residual: {:e}", r.report.relative_residual)?;
    writeln!(out, "source_node\texpected_hitting_time")?;
    for (s, e) in r.iter() {
        writeln!(out, "{}\t{:?}", ds.name(s), tidy(e))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingTable {
    pub header: BTreeMap<String, String>,
    pub rows: Vec<(String, f64)>,
}

pub fn parse_hitting_times<R: BufRead>(reader: R) -> Result<HittingTable, IoError> {
    let mut header = BTreeMap::new();
    let mut rows = Vec::new();
    let mut seen_columns = false;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once(':') {
                header.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_columns {
            seen_columns = true;
            continue;
        }
        let (name, value) = line
            .split_once('\t')
            .ok_or_else(|| IoError::Parse { line: k + 1, message: "expected node<TAB>time".into() })?;
        let value = value.parse().map_err(|e: std::num::ParseFloatError| IoError::Parse { line: k + 1, message: e.to_string() })?;
        rows.push((name.to_string(), value));
    }
    Ok(HittingTable { header, rows })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `rank,node,distance` with 1-based ranks.
pub fn write_ranking_csv<W: Write>(r: &RankedNeighbors, ds: &Dataset, mut out: W) -> Result<(), IoError> {
    writeln!(out, "rank,node,distance")?;
    for (k, &(node, d)) in r.entries.iter().enumerate() {
        writeln!(out, "{},{},{:?}", k + 1, csv_field(ds.name(node)), tidy(d))?;
    }
    Ok(())
}

/// `value,count`.
pub fn write_histogram_csv<W: Write>(hist: &[(f64, usize)], mut out: W) -> Result<(), IoError> {
    writeln!(out, "value,count")?;
    for (v, c) in hist {
        writeln!(out, "{v},{c}")?;
    }
    Ok(())
}

/// `metric,value`.
pub fn write_metrics_csv<W: Write>(metrics: &[(String, f64)], mut out: W) -> Result<(), IoError> {
    writeln!(out, "metric,value")?;
    for (m, v) in metrics {
        writeln!(out, "{},{v}", csv_field(m))?;
    }
    Ok(())
}

/// One whitespace-separated node-name sequence per line.
pub fn write_paths<W: Write>(paths: &[Vec<usize>], ds: &Dataset, mut out: W) -> Result<(), IoError> {
    for path in paths {
        let mut first = true;
        for &n in path {
            if !first {
                out.write_all(b" ")?;
            }
            out.write_all(ds.name(n).as_bytes())?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use hyperwalk::io::{self, Dataset};
use hyperwalk::ranking::{degree_histogram, jaccard_topk, label_agreement, HistogramKind};
use hyperwalk::{
    hitting_times_for_targets, rank_neighbors, sample_paths, simulate_hitting_time, spearman, Affinities, Error, Execution,
    HittingTimeResult, RankedNeighbors, Scenario, SolveOptions, TransitionKernel, WalkConfig,
};
use log::{info, warn};

use crate::config::{RunConfig, Selection};

/// Disconnected input without `--per-component`.
#[derive(Debug, thiserror::Error)]
#[error("input has {components} connected components; rerun with --per-component")]
pub struct DisconnectedInput {
    pub components: usize,
}

/// A connected piece of the input with the map from its local ids back to
/// the ids of the full dataset.
struct Part {
    ds: Dataset,
    global: Vec<usize>,
}

impl Part {
    fn local(&self, global: usize) -> Option<usize> {
        self.global.binary_search(&global).ok()
    }

    fn localize<T: Clone>(&self, map: &HashMap<usize, T>) -> HashMap<usize, T> {
        self.global.iter().enumerate().filter_map(|(l, g)| map.get(g).map(|v| (l, v.clone()))).collect()
    }

    fn kernels(&self, scenarios: &[Scenario], exec: Execution) -> Result<Vec<TransitionKernel>> {
        let aff = Arc::new(Affinities::compute_with(&self.ds.hypergraph, exec));
        Ok(scenarios.iter().map(|&s| TransitionKernel::from_affinities(aff.clone(), s, exec)).collect::<Result<_, _>>()?)
    }
}

struct Run {
    cfg: RunConfig,
    ds: Dataset,
    exec: Execution,
}

impl Run {
    fn new(cfg: RunConfig) -> Result<Self> {
        let exec = setup_workers(cfg.workers);
        let ds = io::read_hyperedge_list(&cfg.input)?;
        info!(
            "loaded {}: {} nodes, {} hyperedges, {} incidences",
            cfg.input.display(),
            ds.hypergraph.node_count(),
            ds.hypergraph.hyperedge_count(),
            ds.hypergraph.incidence_count()
        );
        fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
        Ok(Self { cfg, ds, exec })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.output.join(name)
    }

    fn parts(&self) -> Result<Vec<Part>> {
        let comps = self.ds.hypergraph.connected_components();
        if comps.len() <= 1 {
            return Ok(vec![Part { ds: self.ds.clone(), global: (0..self.ds.hypergraph.node_count()).collect() }]);
        }
        if !self.cfg.per_component {
            return Err(DisconnectedInput { components: comps.len() }.into());
        }
        let mut parts = Vec::new();
        for nodes in comps {
            if nodes.len() < 2 {
                warn!("skipping isolated node {}", self.ds.name(nodes[0]));
                continue;
            }
            parts.push(Part { ds: self.ds.induced(&nodes)?, global: nodes });
        }
        info!("processing {} components separately", parts.len());
        Ok(parts)
    }

    fn select(&self, sel: Option<&Selection>, what: &str) -> Result<Vec<usize>> {
        match sel {
            None => bail!("no {what} given"),
            Some(Selection::All) => Ok((0..self.ds.hypergraph.node_count()).collect()),
            Some(Selection::Names(names)) => Ok(names.iter().map(|n| self.ds.resolve(n)).collect::<Result<_, _>>()?),
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol: self.cfg.tol, max_iter: self.cfg.max_iter, jacobi: self.cfg.jacobi, exec: Execution::Sequential }
    }

    /// Hitting times for every requested target, grouped by part. Targets
    /// outside every processed part (isolated nodes) are skipped.
    fn hitting_times(&self, mut each: impl FnMut(&Part, usize, HittingTimeResult) -> Result<()>) -> Result<()> {
        let targets = self.select(self.cfg.targets.as_ref(), "target (use --target)")?;
        let parts = self.parts()?;
        let opts = self.solve_options();
        for (p, part) in parts.iter().enumerate() {
            let local: Vec<usize> = targets.iter().filter_map(|&t| part.local(t)).collect();
            let kernels = part.kernels(&self.cfg.scenarios, self.exec)?;
            for kernel in &kernels {
                if self.cfg.dump_kernel {
                    let name = if parts.len() == 1 {
                        format!("kernel_{}.mtx", kernel.scenario())
                    } else {
                        format!("kernel_{}_c{p}.mtx", kernel.scenario())
                    };
                    let mut w = io::create(&self.out(&name))?;
                    kernel.matrix().write_matrix_market(&mut w)?;
                    w.flush()?;
                }
                for result in hitting_times_for_targets(kernel, &local, &opts, self.exec) {
                    let r = result?;
                    info!(
                        "{} target {}: {} {} iterations, relative residual {:.2e}",
                        r.scenario,
                        part.ds.name(r.target),
                        r.report.method,
                        r.report.iterations,
                        r.report.relative_residual
                    );
                    each(part, part.global[r.target], r)?;
                }
            }
        }
        for &t in &targets {
            if !parts.iter().any(|p| p.local(t).is_some()) {
                warn!("target {} is isolated; no distances written", self.ds.name(t));
            }
        }
        Ok(())
    }
}

fn setup_workers(workers: usize) -> Execution {
    #[cfg(feature = "parallel")]
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            warn!("could not size the worker pool: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if workers > 1 {
        warn!("built without the parallel feature; running on one thread");
    }
    if workers > 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

pub fn distances(cfg: RunConfig) -> Result<()> {
    let run = Run::new(cfg)?;
    let mut written = 0;
    run.hitting_times(|part, global_target, r| {
        let path = run.out(&format!("distances_{}_{global_target}.tsv", r.scenario));
        let mut w = io::create(&path)?;
        io::write_hitting_times(&r, &part.ds, &mut w)?;
        w.flush()?;
        written += 1;
        Ok(())
    })?;
    write_dictionary(&run)?;
    info!("wrote {written} distance tables to {}", run.cfg.output.display());
    Ok(())
}

fn write_dictionary(run: &Run) -> Result<()> {
    let mut w = io::create(&run.out("nodes.tsv"))?;
    io::write_dictionary(&run.ds, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn neighbors(cfg: RunConfig) -> Result<()> {
    let run = Run::new(cfg)?;
    let labels = run.cfg.labels.as_deref().map(|p| io::read_labels(p, &run.ds)).transpose()?;
    let subjects = run.cfg.subjects.as_deref().map(|p| io::read_tags(p, &run.ds)).transpose()?;
    let k = run.cfg.k;
    let mut metrics: Vec<(String, f64)> = Vec::new();
    let mut full: HashMap<(usize, Scenario), RankedNeighbors> = HashMap::new();
    let mut sums: HashMap<String, (f64, usize)> = HashMap::new();

    run.hitting_times(|part, global_target, r| {
        let scenario = r.scenario;
        let ranked = rank_neighbors(&r, None);
        let mut shown = ranked.clone();
        if let Some(n) = run.cfg.top_n {
            shown.entries.truncate(n);
        }
        let mut w = io::create(&run.out(&format!("neighbors_{scenario}_{global_target}.csv")))?;
        io::write_ranking_csv(&shown, &part.ds, &mut w)?;
        w.flush()?;

        let mut record = |metric: &str, value: std::result::Result<f64, Error>| match value {
            Ok(v) => {
                metrics.push((format!("{metric}@{k}_{scenario}_{global_target}"), v));
                let e = sums.entry(format!("{metric}@{k}_{scenario}_mean")).or_default();
                e.0 += v;
                e.1 += 1;
            }
            Err(e) => warn!("{metric} skipped for target {}: {e}", run.ds.name(global_target)),
        };
        if let Some(labels) = &labels {
            record("label_agreement", label_agreement(&ranked, &part.localize(labels), k));
        }
        if let Some(subjects) = &subjects {
            record("jaccard", jaccard_topk(&ranked, &part.localize(subjects), k));
        }
        full.insert((global_target, scenario), ranked);
        Ok(())
    })?;

    let mut targets: Vec<usize> = full.keys().map(|&(t, _)| t).collect();
    targets.sort_unstable();
    targets.dedup();
    for t in targets {
        if let (Some(a), Some(b)) = (full.get(&(t, Scenario::Simple)), full.get(&(t, Scenario::Frustrated))) {
            match spearman(a, b) {
                Ok(rho) => {
                    metrics.push((format!("spearman_simple_frustrated_{t}"), rho));
                    let e = sums.entry("spearman_simple_frustrated_mean".into()).or_default();
                    e.0 += rho;
                    e.1 += 1;
                }
                Err(e) => warn!("spearman skipped for target {}: {e}", run.ds.name(t)),
            }
        }
    }
    let mut means: Vec<(String, f64)> = sums.into_iter().map(|(m, (s, n))| (m, s / n as f64)).collect();
    means.sort_by(|a, b| a.0.cmp(&b.0));
    metrics.extend(means);
    if !metrics.is_empty() {
        let mut w = io::create(&run.out("metrics.csv"))?;
        io::write_metrics_csv(&metrics, &mut w)?;
        w.flush()?;
    }
    write_dictionary(&run)?;
    Ok(())
}

pub fn simulate(cfg: RunConfig) -> Result<()> {
    let run = Run::new(cfg)?;
    let sources = run.select(run.cfg.sources.as_ref(), "source (use --source)")?;
    let targets = run.select(run.cfg.targets.as_ref(), "target (use --target)")?;
    let parts = run.parts()?;
    let mut w = io::create(&run.out("simulate.csv"))?;
    writeln!(w, "scenario,source,target,mean,std_error,completed,censored")?;
    for part in &parts {
        let pairs: Vec<(usize, usize)> = sources
            .iter()
            .flat_map(|&s| targets.iter().map(move |&t| (s, t)))
            .filter(|&(s, t)| s != t)
            .filter_map(|(s, t)| Some((part.local(s)?, part.local(t)?)))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        for kernel in part.kernels(&run.cfg.scenarios, run.exec)? {
            let walk = WalkConfig {
                max_steps: run.cfg.max_steps,
                exec: run.exec,
                ..WalkConfig::new(kernel.scenario(), run.cfg.runs, run.cfg.seed)
            };
            for &(s, t) in &pairs {
                let est = simulate_hitting_time(&kernel, s, t, &walk)?;
                let se = est.std_error.map(|v| v.to_string()).unwrap_or_default();
                let (sn, tn) = (part.ds.name(s), part.ds.name(t));
                writeln!(w, "{},{sn},{tn},{},{se},{},{}", kernel.scenario(), est.mean, est.completed, est.censored)?;
                match est.std_error {
                    Some(se) => println!("{} {sn} -> {tn}: {:.5} ± {se:.5} ({} censored)", kernel.scenario(), est.mean, est.censored),
                    None => println!("{} {sn} -> {tn}: {:.5} (single sample, {} censored)", kernel.scenario(), est.mean, est.censored),
                }
            }
        }
    }
    for &s in &sources {
        for &t in &targets {
            if s != t && !parts.iter().any(|p| p.local(s).is_some() && p.local(t).is_some()) {
                return Err(Error::Disconnected { target: t, node: s }).with_context(|| {
                    format!("{} and {} lie in different components", run.ds.name(s), run.ds.name(t))
                });
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn stats(cfg: RunConfig) -> Result<()> {
    let run = Run::new(cfg)?;
    let h = &run.ds.hypergraph;
    for (kind, name) in [
        (HistogramKind::NodeDegree, "node_degree_histogram.csv"),
        (HistogramKind::HyperedgeDegree, "hyperedge_degree_histogram.csv"),
        (HistogramKind::ExpandedEdgeWeight, "edge_weight_histogram.csv"),
    ] {
        let mut w = io::create(&run.out(name))?;
        io::write_histogram_csv(&degree_histogram(h, kind), &mut w)?;
        w.flush()?;
    }
    let comps = h.connected_components();
    let summary = vec![
        ("nodes".to_string(), h.node_count() as f64),
        ("hyperedges".into(), h.hyperedge_count() as f64),
        ("incidences".into(), h.incidence_count() as f64),
        ("expanded_edges".into(), h.expand_to_graph().len() as f64),
        ("components".into(), comps.len() as f64),
        ("largest_component".into(), comps.iter().map(Vec::len).max().unwrap_or(0) as f64),
    ];
    let mut w = io::create(&run.out("stats.csv"))?;
    io::write_metrics_csv(&summary, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn paths(cfg: RunConfig) -> Result<()> {
    let run = Run::new(cfg)?;
    let aff = Arc::new(Affinities::compute_with(&run.ds.hypergraph, run.exec));
    for &scenario in &run.cfg.scenarios {
        let kernel = TransitionKernel::from_affinities(aff.clone(), scenario, run.exec)?;
        let paths = sample_paths(&kernel, run.cfg.steps, run.cfg.seed, run.exec)?;
        let mut w = io::create(&run.out(&format!("paths_{scenario}.txt")))?;
        io::write_paths(&paths, &run.ds, &mut w)?;
        w.flush()?;
        info!("{scenario}: {} walks of {} steps", paths.len(), run.cfg.steps);
    }
    Ok(())
}

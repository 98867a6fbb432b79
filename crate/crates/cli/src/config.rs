//! Command-line flags, the optional TOML config file, and their merge into a
//! [`RunConfig`]. Precedence: flags, then the config file, then defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperwalk::Scenario;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "hyperwalk", version, about = "Hitting-time distances on weighted hypergraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected hitting times to each target, one TSV per (scenario, target).
    Distances(TargetArgs),
    /// Nearest-neighbor rankings per target, with optional label/tag metrics.
    Neighbors(NeighborArgs),
    /// Monte Carlo estimates of hitting times for source/target pairs.
    Simulate(SimulateArgs),
    /// Degree and expanded-edge-weight histograms.
    Stats(CommonArgs),
    /// Random-walk path corpus with a fixed number of steps from every node.
    Paths(PathArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioChoice {
    Simple,
    Frustrated,
    Both,
}

impl ScenarioChoice {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            ScenarioChoice::Simple => vec![Scenario::Simple],
            ScenarioChoice::Frustrated => vec![Scenario::Frustrated],
            ScenarioChoice::Both => Scenario::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Hyperedge-list file.
    pub input: PathBuf,
    /// TOML file with defaults for any of the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Walk variant [default: frustrated].
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioChoice>,
    /// Worker threads [default: available cores].
    #[arg(long, env = "HYPERWALK_WORKERS")]
    pub workers: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing [default: .].
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Process each connected component on its own instead of failing on disconnected input.
    #[arg(long)]
    pub per_component: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Comma-separated target node names, or `all`.
    #[arg(long, short)]
    pub target: Option<String>,
    /// Relative residual tolerance [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap [default: max(1000, 2n)].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Jacobi-precondition the iterative solver.
    #[arg(long)]
    pub jacobi: bool,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write each transition kernel as a Matrix Market file.
    #[arg(long)]
    pub dump_kernel: bool,
}

#[derive(Debug, Args)]
pub struct NeighborArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Neighbors kept per ranking [default: all].
    #[arg(long)]
    pub top_n: Option<usize>,
    /// `node<TAB>label` file; enables label agreement.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// `node<TAB>tag` file, several lines per node allowed; enables Jaccard.
    #[arg(long)]
    pub subjects: Option<PathBuf>,
    /// Neighborhood size for the metrics [default: 20].
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated source node names.
    #[arg(long, short)]
    pub source: Option<String>,
    /// Comma-separated target node names.
    #[arg(long, short)]
    pub target: Option<String>,
    /// Walks per pair [default: 100000].
    #[arg(long)]
    pub runs: Option<u64>,
    /// Steps before a walk is censored [default: 10000000].
    #[arg(long)]
    pub max_steps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Steps per walk [default: 3200].
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Keys accepted in the config file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<ScenarioChoice>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub per_component: Option<bool>,
    pub target: Option<NodeList>,
    pub source: Option<NodeList>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub jacobi: Option<bool>,
    pub dump_kernel: Option<bool>,
    pub top_n: Option<usize>,
    pub labels: Option<PathBuf>,
    pub subjects: Option<PathBuf>,
    pub k: Option<usize>,
    pub runs: Option<u64>,
    pub max_steps: Option<u64>,
    pub steps: Option<usize>,
}

/// A node list in the config file: `"a,b"` or `["a", "b"]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NodeList {
    Joined(String),
    List(Vec<String>),
}

impl NodeList {
    fn into_selection(self) -> Result<Selection> {
        match self {
            NodeList::Joined(s) => Selection::parse(&s),
            NodeList::List(v) if v.is_empty() => bail!("empty node list"),
            NodeList::List(v) => Ok(Selection::Names(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    All,
    Names(Vec<String>),
}

impl Selection {
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(Selection::All);
        }
        let names: Vec<String> = s.split(',').map(str::trim).filter(|n| !n.is_empty()).map(String::from).collect();
        if names.is_empty() {
            bail!("empty node list '{s}'");
        }
        Ok(Selection::Names(names))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub scenarios: Vec<Scenario>,
    pub workers: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub per_component: bool,
    pub targets: Option<Selection>,
    pub sources: Option<Selection>,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub jacobi: bool,
    pub dump_kernel: bool,
    pub top_n: Option<usize>,
    pub labels: Option<PathBuf>,
    pub subjects: Option<PathBuf>,
    pub k: usize,
    pub runs: u64,
    pub max_steps: u64,
    pub steps: usize,
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl RunConfig {
    fn from_common(c: &CommonArgs, file: &FileConfig) -> Self {
        RunConfig {
            input: c.input.clone(),
            scenarios: c.scenario.or(file.scenario).unwrap_or(ScenarioChoice::Frustrated).scenarios(),
            workers: c.workers.or(file.workers).unwrap_or_else(default_workers),
            seed: c.seed.or(file.seed).unwrap_or(0),
            output: c.output.clone().or_else(|| file.output.clone()).unwrap_or_else(|| PathBuf::from(".")),
            per_component: c.per_component || file.per_component.unwrap_or(false),
            targets: None,
            sources: None,
            tol: file.tol.unwrap_or(1e-10),
            max_iter: file.max_iter,
            jacobi: file.jacobi.unwrap_or(false),
            dump_kernel: file.dump_kernel.unwrap_or(false),
            top_n: file.top_n,
            labels: file.labels.clone(),
            subjects: file.subjects.clone(),
            k: file.k.unwrap_or(20),
            runs: file.runs.unwrap_or(100_000),
            max_steps: file.max_steps.unwrap_or(10_000_000),
            steps: file.steps.unwrap_or(3200),
        }
    }

    fn apply_solver(&mut self, s: &SolverArgs, file: &FileConfig) -> Result<()> {
        self.targets = pick_selection(s.target.as_deref(), file.target.clone())?;
        self.tol = s.tol.unwrap_or(self.tol);
        self.max_iter = s.max_iter.or(self.max_iter);
        self.jacobi |= s.jacobi;
        Ok(())
    }

    pub fn resolve(command: &Command) -> Result<RunConfig> {
        let common = match command {
            Command::Distances(a) => &a.common,
            Command::Neighbors(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Stats(a) => a,
            Command::Paths(a) => &a.common,
        };
        let file = match &common.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let mut cfg = RunConfig::from_common(common, &file);
        match command {
            Command::Distances(a) => {
                cfg.apply_solver(&a.solver, &file)?;
                cfg.dump_kernel |= a.dump_kernel;
            }
            Command::Neighbors(a) => {
                cfg.apply_solver(&a.solver, &file)?;
                cfg.top_n = a.top_n.or(cfg.top_n);
                cfg.labels = a.labels.clone().or(cfg.labels);
                cfg.subjects = a.subjects.clone().or(cfg.subjects);
                cfg.k = a.k.unwrap_or(cfg.k);
            }
            Command::Simulate(a) => {
                cfg.targets = pick_selection(a.target.as_deref(), file.target.clone())?;
                cfg.sources = pick_selection(a.source.as_deref(), file.source.clone())?;
                cfg.runs = a.runs.unwrap_or(cfg.runs);
                cfg.max_steps = a.max_steps.unwrap_or(cfg.max_steps);
            }
            Command::Paths(a) => cfg.steps = a.steps.unwrap_or(cfg.steps),
            Command::Stats(_) => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if self.k == 0 {
            bail!("k must be at least 1");
        }
        if self.runs == 0 || self.max_steps == 0 {
            bail!("runs and max_steps must be at least 1");
        }
        if self.steps == 0 {
            bail!("steps must be at least 1");
        }
        if !self.input.is_file() {
            bail!("input {} does not exist", self.input.display());
        }
        for path in [&self.labels, &self.subjects].into_iter().flatten() {
            if !path.is_file() {
                bail!("{} does not exist", path.display());
            }
        }
        Ok(())
    }
}

fn pick_selection(flag: Option<&str>, file: Option<NodeList>) -> Result<Option<Selection>> {
    match (flag, file) {
        (Some(s), _) => Selection::parse(s).map(Some),
        (None, Some(list)) => list.into_selection().map(Some),
        (None, None) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("hyperwalk").chain(args.iter().copied())).unwrap().command
    }

    #[test]
    fn selections() {
        assert_eq!(Selection::parse("all").unwrap(), Selection::All);
        assert_eq!(Selection::parse("a, b").unwrap(), Selection::Names(vec!["a".into(), "b".into()]));
        assert!(Selection::parse(" , ").is_err());
    }

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("h.txt");
        std::fs::write(&input, "0 1\n").unwrap();
        let conf = dir.path().join("c.toml");
        std::fs::write(&conf, "scenario = \"both\"\ntol = 1e-6\ntarget = [\"0\"]\nseed = 4\n").unwrap();
        let input = input.to_str().unwrap();
        let conf = conf.to_str().unwrap();

        let cfg = RunConfig::resolve(&parse(&["distances", input, "--config", conf, "--tol", "1e-8"])).unwrap();
        assert_eq!(cfg.scenarios.len(), 2);
        assert_eq!(cfg.tol, 1e-8);
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.targets, Some(Selection::Names(vec!["0".into()])));

        let cfg = RunConfig::resolve(&parse(&["distances", input, "--scenario", "simple", "--target", "all"])).unwrap();
        assert_eq!(cfg.scenarios, vec![Scenario::Simple]);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.targets, Some(Selection::All));
    }

    #[test]
    fn rejects_bad_settings() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("h.txt");
        std::fs::write(&input, "0 1\n").unwrap();
        let input = input.to_str().unwrap();
        assert!(RunConfig::resolve(&parse(&["paths", input, "--steps", "0"])).is_err());
        assert!(RunConfig::resolve(&parse(&["distances", input, "--tol", "0"])).is_err());
        assert!(RunConfig::resolve(&parse(&["stats", input, "--workers", "0"])).is_err());
        assert!(RunConfig::resolve(&parse(&["stats", "/no/such/file"])).is_err());
        let conf = dir.path().join("c.toml");
        std::fs::write(&conf, "colour = 3\n").unwrap();
        assert!(RunConfig::resolve(&parse(&["stats", input, "--config", conf.to_str().unwrap()])).is_err());
    }
}

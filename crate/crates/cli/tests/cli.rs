use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const WORKED: &str = "0 1 2\n2 3\n3 4\n";

fn setup(hypergraph: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h.txt");
    fs::write(&input, hypergraph).unwrap();
    (dir, input)
}

fn hyperwalk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperwalk"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .env_remove("HYPERWALK_WORKERS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn distances_reproduce_worked_example() {
    let (dir, _) = setup(WORKED);
    let out = hyperwalk(&["distances", "h.txt", "--target", "3", "--scenario", "frustrated", "-o", "out"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("out"), "distances_frustrated_3.tsv");
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["source_node\texpected_hitting_time", "0\t35.0", "1\t35.0", "2\t30.0", "4\t2.0"]);
    assert!(table.contains("# method: cg"));
}

#[test]
fn all_targets_write_one_file_each() {
    let (dir, _) = setup(WORKED);
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--target", "all", "-o", "out"], dir.path())), 0);
    let mut tables: Vec<String> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("distances_"))
        .collect();
    tables.sort();
    assert_eq!(tables.len(), 5);
    assert_eq!(tables[0], "distances_frustrated_0.tsv");
}

#[test]
fn missing_input_is_exit_one() {
    let (dir, _) = setup(WORKED);
    let out = hyperwalk(&["distances", "nope.txt", "--target", "3"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--target", "ghost"], dir.path())), 1);
}

#[test]
fn non_convergence_is_exit_two() {
    let (dir, _) = setup(WORKED);
    let out = hyperwalk(&["distances", "h.txt", "--target", "3", "--max-iter", "1"], dir.path());
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn disconnected_input_needs_per_component() {
    let (dir, _) = setup("a b\nc d e\nlonely\n");
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--target", "a"], dir.path())), 3);
    let out = hyperwalk(&["distances", "h.txt", "--target", "all", "--per-component", "-o", "out"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out_dir = dir.path().join("out");
    let a = read(&out_dir, "distances_frustrated_0.tsv");
    assert!(a.contains("# target: a") && a.contains("b\t"));
    assert!(!out_dir.join("distances_frustrated_5.tsv").exists());
    assert_eq!(code(&hyperwalk(&["simulate", "h.txt", "-s", "a", "-t", "c", "--per-component"], dir.path())), 3);
}

#[test]
fn neighbors_rank_and_truncate() {
    let (dir, _) = setup(WORKED);
    let out = hyperwalk(&["neighbors", "h.txt", "--target", "3", "--top-n", "2", "-o", "top"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(read(&dir.path().join("top"), "neighbors_frustrated_3.csv"), "rank,node,distance\n1,4,2.0\n2,2,30.0\n");

    assert_eq!(code(&hyperwalk(&["neighbors", "h.txt", "--target", "3", "--top-n", "99", "-o", "all"], dir.path())), 0);
    let full = read(&dir.path().join("all"), "neighbors_frustrated_3.csv");
    assert_eq!(full.lines().count(), 5);
    assert!(full.ends_with("3,0,35.0\n4,1,35.0\n"));
}

#[test]
fn neighbors_metrics() {
    let (dir, _) = setup(WORKED);
    fs::write(dir.path().join("labels.tsv"), "0\tx\n1\tx\n2\tx\n3\ty\n4\ty\n").unwrap();
    fs::write(dir.path().join("tags.tsv"), "3\ta\n3\tb\n4\tb\n4\tc\n").unwrap();
    let out = hyperwalk(
        &[
            "neighbors", "h.txt", "--target", "3", "--scenario", "both", "--labels", "labels.tsv", "--subjects", "tags.tsv",
            "--k", "1", "-o", "out",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = read(&dir.path().join("out"), "metrics.csv");
    assert!(metrics.starts_with("metric,value\n"));
    assert!(metrics.contains("label_agreement@1_frustrated_3,1\n"), "{metrics}");
    assert!(metrics.contains("jaccard@1_simple_3,0.3333333333333333\n"), "{metrics}");
    assert!(metrics.contains("spearman_simple_frustrated_mean,"));
}

#[test]
fn simulate_matches_analytic_value() {
    let (dir, _) = setup(WORKED);
    let out = hyperwalk(&["simulate", "h.txt", "-s", "2", "-t", "3", "--runs", "100000", "--seed", "5", "-o", "out"], dir.path());
    assert_eq!(code(&out), 0);
    let csv = read(&dir.path().join("out"), "simulate.csv");
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], ["frustrated", "2", "3"]);
    let (mean, se): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert!((mean - 30.0).abs() <= 4.0 * se, "{mean} ± {se}");
    assert_eq!(row[6], "0");
}

#[test]
fn simulate_edge_cases() {
    let (dir, _) = setup(WORKED);
    assert_eq!(code(&hyperwalk(&["simulate", "h.txt", "-s", "0", "-t", "3", "--runs", "1", "-o", "one"], dir.path())), 0);
    let row = read(&dir.path().join("one"), "simulate.csv").lines().nth(1).unwrap().to_string();
    assert_eq!(row.split(',').nth(4), Some(""));
    let out = hyperwalk(&["simulate", "h.txt", "-s", "0", "-t", "3", "--max-steps", "1"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn stats_histograms() {
    let (dir, _) = setup(WORKED);
    assert_eq!(code(&hyperwalk(&["stats", "h.txt", "-o", "out"], dir.path())), 0);
    let out = dir.path().join("out");
    assert_eq!(read(&out, "node_degree_histogram.csv"), "value,count\n1,3\n2,2\n");
    assert_eq!(read(&out, "hyperedge_degree_histogram.csv"), "value,count\n2,2\n3,1\n");
    assert_eq!(read(&out, "edge_weight_histogram.csv"), "value,count\n1,5\n");
    assert!(read(&out, "stats.csv").contains("components,1\n"));
}

#[test]
fn paths_corpus_is_deterministic() {
    let (dir, _) = setup(WORKED);
    for o in ["a", "b"] {
        assert_eq!(code(&hyperwalk(&["paths", "h.txt", "--steps", "3200", "--seed", "9", "--workers", "2", "-o", o], dir.path())), 0);
    }
    let a = read(&dir.path().join("a"), "paths_frustrated.txt");
    assert_eq!(a, read(&dir.path().join("b"), "paths_frustrated.txt"));
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().all(|l| l.split(' ').count() == 3201));
    assert_eq!(code(&hyperwalk(&["paths", "h.txt", "--steps", "0"], dir.path())), 1);
}

#[test]
fn config_file_and_flag_precedence() {
    let (dir, _) = setup(WORKED);
    fs::write(dir.path().join("run.toml"), "scenario = \"simple\"\ntarget = \"3\"\noutput = \"from_file\"\n").unwrap();
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--config", "run.toml"], dir.path())), 0);
    assert!(dir.path().join("from_file/distances_simple_3.tsv").exists());
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--config", "run.toml", "--scenario", "frustrated", "-o", "flag"], dir.path())), 0);
    assert!(dir.path().join("flag/distances_frustrated_3.tsv").exists());
    fs::write(dir.path().join("bad.toml"), "tol = -1.0\n").unwrap();
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--config", "bad.toml", "--target", "3"], dir.path())), 1);
}

#[test]
fn kernel_dump() {
    let (dir, _) = setup(WORKED);
    assert_eq!(code(&hyperwalk(&["distances", "h.txt", "--target", "3", "--dump-kernel", "-o", "out"], dir.path())), 0);
    let mtx = read(&dir.path().join("out"), "kernel_frustrated.mtx");
    let mut lines = mtx.lines();
    assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
    assert_eq!(lines.next(), Some("5 5 15"));
}

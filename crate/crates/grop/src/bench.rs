//! Benchmark harness: every method on every task for a number of seeded
//! trials, with per-task and overall summaries.

use std::collections::BTreeMap;
use std::path::Path;

use grop_core::grid::{rasterize, DEFAULT_RESOLUTION};
use grop_core::oracle::LanguageModel;
use grop_core::pipeline::{arrange, Arrangement, PipelineConfig, PipelineError};
use grop_core::seed::{derive, stream};
use grop_core::sim::{execute, plan_method, relocate_dynamic_obstacles, summarize, FailureModel, Method, Summary};
use grop_core::Scene;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{self, IoError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub tasks: Vec<u32>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub failure: FailureModel,
    pub pipeline: PipelineConfig,
    /// Move dynamic obstacles to a random side of the table every trial.
    pub relocate_obstacles: bool,
    pub resolution: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            tasks: crate::fixtures::TASK_IDS.to_vec(),
            methods: Method::ALL.to_vec(),
            trials: 20,
            seed: 0,
            failure: FailureModel::default(),
            pipeline: PipelineConfig::default(),
            relocate_obstacles: true,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// One method on one task for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub task: u32,
    pub method: Method,
    pub trial: usize,
    pub seed: u64,
    pub semantic_score: f64,
    pub all_present: bool,
    /// Seconds; absent when planning failed.
    pub exec_time: Option<f64>,
    pub plan_cost: Option<f64>,
    pub utility: Option<f64>,
    pub nav_failures: u32,
    pub manip_failures: u32,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// `None` for the all-task summary.
    pub task: Option<u32>,
    pub method: Method,
    pub trials: usize,
    pub planning_failures: usize,
    pub semantic_score: Summary,
    pub all_present_rate: f64,
    /// Over trials whose planning succeeded.
    pub exec_time: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: BenchConfig,
    pub rows: Vec<TrialRow>,
    pub per_task: Vec<Aggregate>,
    pub overall: Vec<Aggregate>,
}

/// Language-model stages for every task, run once per task.
pub fn arrange_tasks<M: LanguageModel + ?Sized>(
    scenes: &[(u32, Scene)],
    model: &mut M,
    max_retry: u32,
) -> Result<BTreeMap<u32, Arrangement>, (u32, PipelineError)> {
    scenes.iter().map(|(id, s)| arrange(s, model, max_retry).map(|a| (*id, a)).map_err(|e| (*id, e))).collect()
}

pub fn trial_seed(root: u64, task: u32, trial: usize) -> u64 {
    derive(root, &[stream::TRIAL, task as u64, trial as u64])
}

fn run_trial(config: &BenchConfig, task: u32, base: &Scene, arrangement: &Arrangement, trial: usize) -> Vec<TrialRow> {
    let seed = trial_seed(config.seed, task, trial);
    let row = |method, error: String| TrialRow {
        task,
        method,
        trial,
        seed,
        semantic_score: 0.0,
        all_present: false,
        exec_time: None,
        plan_cost: None,
        utility: None,
        nav_failures: 0,
        manip_failures: 0,
        error: Some(error),
    };
    let scene = if config.relocate_obstacles {
        match relocate_dynamic_obstacles(base, derive(seed, &[stream::OBSTACLES])) {
            Ok(s) => s,
            Err(e) => return config.methods.iter().map(|&m| row(m, e.to_string())).collect(),
        }
    } else {
        base.clone()
    };
    let grid = rasterize(&scene, config.resolution);
    // every method sees the same execution noise in a trial
    let failure = config.failure.clone().with_seed(derive(seed, &[stream::EXECUTION]));
    config
        .methods
        .iter()
        .map(|&method| match plan_method(method, &scene, &grid, arrangement, &config.pipeline, seed) {
            Ok(plan) => {
                let o = execute(&plan, &scene, &arrangement.relations, &failure);
                TrialRow {
                    task,
                    method,
                    trial,
                    seed,
                    semantic_score: o.semantic_score,
                    all_present: o.all_present,
                    exec_time: Some(o.exec_time),
                    plan_cost: Some(plan.cost),
                    utility: Some(plan.utility),
                    nav_failures: o.nav_failures,
                    manip_failures: o.manip_failures,
                    error: None,
                }
            }
            Err(e) => row(method, e.to_string()),
        })
        .collect()
}

fn aggregate(task: Option<u32>, method: Method, rows: &[&TrialRow]) -> Aggregate {
    let scores: Vec<f64> = rows.iter().map(|r| r.semantic_score).collect();
    let times: Vec<f64> = rows.iter().filter_map(|r| r.exec_time).collect();
    let present = rows.iter().filter(|r| r.all_present).count();
    Aggregate {
        task,
        method,
        trials: rows.len(),
        planning_failures: rows.iter().filter(|r| r.error.is_some()).count(),
        semantic_score: summarize(&scores),
        all_present_rate: if rows.is_empty() { 0.0 } else { present as f64 / rows.len() as f64 },
        exec_time: summarize(&times),
    }
}

/// Per-task and overall summaries; independent of row order.
pub fn aggregate_rows(rows: &[TrialRow], methods: &[Method]) -> (Vec<Aggregate>, Vec<Aggregate>) {
    let mut tasks: Vec<u32> = rows.iter().map(|r| r.task).collect();
    tasks.sort_unstable();
    tasks.dedup();
    let mut per_task = Vec::new();
    for &t in &tasks {
        for &m in methods {
            let sel: Vec<&TrialRow> = rows.iter().filter(|r| r.task == t && r.method == m).collect();
            if !sel.is_empty() {
                per_task.push(aggregate(Some(t), m, &sel));
            }
        }
    }
    let overall = methods
        .iter()
        .map(|&m| aggregate(None, m, &rows.iter().filter(|r| r.method == m).collect::<Vec<_>>()))
        .filter(|a| a.trials > 0)
        .collect();
    (per_task, overall)
}

/// Runs every (task, trial) pair in parallel. Tasks without an arrangement
/// or scene are skipped.
pub fn run_benchmark(
    config: &BenchConfig,
    scenes: &[(u32, Scene)],
    arrangements: &BTreeMap<u32, Arrangement>,
) -> Report {
    let jobs: Vec<(u32, &Scene, &Arrangement, usize)> = scenes
        .iter()
        .filter(|(id, _)| config.tasks.contains(id))
        .filter_map(|(id, s)| arrangements.get(id).map(|a| (*id, s, a)))
        .flat_map(|(id, s, a)| (0..config.trials).map(move |t| (id, s, a, t)))
        .collect();
    let mut rows: Vec<TrialRow> =
        jobs.par_iter().flat_map_iter(|&(id, s, a, t)| run_trial(config, id, s, a, t)).collect();
    rows.sort_by_key(|r| (r.task, r.method, r.trial));
    let (per_task, overall) = aggregate_rows(&rows, &config.methods);
    Report { config: config.clone(), rows, per_task, overall }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    task: String,
    method: &'a str,
    trials: usize,
    semantic_mean: f64,
    semantic_stderr: f64,
    exec_time_mean: f64,
    exec_time_stderr: f64,
    all_present_rate: f64,
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("flat rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Score-versus-time table, one line per (task, method) plus the overall
/// lines with task `all`.
pub fn summary_csv(report: &Report) -> String {
    csv_string(report.per_task.iter().chain(&report.overall).map(|a| SummaryRow {
        task: a.task.map_or_else(|| "all".into(), |t| t.to_string()),
        method: a.method.name(),
        trials: a.trials,
        semantic_mean: a.semantic_score.mean,
        semantic_stderr: a.semantic_score.stderr,
        exec_time_mean: a.exec_time.mean,
        exec_time_stderr: a.exec_time.stderr,
        all_present_rate: a.all_present_rate,
    }))
}

/// Writes `report.json`, `report.csv` (one line per trial) and
/// `summary.csv` into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> Result<(), IoError> {
    io::write_json(&dir.join("report.json"), report)?;
    io::write_text(&dir.join("report.csv"), &csv_string(&report.rows))?;
    io::write_text(&dir.join("summary.csv"), &summary_csv(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(task: u32, method: Method, trial: usize, score: f64, time: f64) -> TrialRow {
        TrialRow {
            task,
            method,
            trial,
            seed: trial as u64,
            semantic_score: score,
            all_present: true,
            exec_time: Some(time),
            plan_cost: Some(time),
            utility: Some(0.0),
            nav_failures: 0,
            manip_failures: 0,
            error: None,
        }
    }

    #[test]
    fn aggregates_ignore_row_order() {
        let mut rows = vec![
            row(1, Method::Tpra, 0, 0.2, 50.0),
            row(1, Method::Tpra, 1, 0.4, 70.0),
            row(2, Method::Tpra, 0, 1.0, 60.0),
            row(1, Method::LlmGrop, 0, 1.0, 40.0),
        ];
        let a = aggregate_rows(&rows, &Method::ALL);
        rows.reverse();
        assert_eq!(a, aggregate_rows(&rows, &Method::ALL));
        let (per_task, overall) = a;
        assert_eq!(per_task.len(), 3);
        let tpra1 = per_task.iter().find(|x| x.task == Some(1) && x.method == Method::Tpra).unwrap();
        assert!((tpra1.semantic_score.mean - 0.3).abs() < 1e-12);
        assert_eq!(tpra1.exec_time.mean, 60.0);
        assert_eq!(overall.len(), 2);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = [row(1, Method::Latp, 0, 0.5, 1.0)];
        let text = csv_string(&rows);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("task,method,trial,seed,semantic_score"));
        assert!(lines.next().unwrap().starts_with("1,latp,0,0,0.5"));
    }
}

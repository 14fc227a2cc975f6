//! Stochastic execution, layout scoring and baseline planners.
//!
//! Navigation to a goal fails with a base probability, multiplied when the
//! goal is close to an obstacle; each failure costs a replanning delay and
//! the leg is retried a bounded number of times. Placement fails with a
//! probability growing linearly with the reach distance; a failed placement
//! drops the object near its target.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{footprints_overlap, Point2, Shape};
use crate::grid::OccupancyGrid;
use crate::grounding::{Configuration, Placement};
use crate::pipeline::{candidates, Arrangement, PipelineConfig, PipelineError};
use crate::relations::{default_band, satisfied, RelationSet};
use crate::scene::{ObjectSpec, Scene, SceneError, Table};
use crate::seed::{derive, stream};
use crate::tamp::{Planner, PoseChoice, TampError, TaskMotionPlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureModel {
    pub nav_fail_base: f64,
    /// Multiplier applied when the goal is within `clearance` of an obstacle.
    pub nav_fail_near_obstacle: f64,
    /// Gap between the robot base edge and an obstacle, metres.
    pub clearance: f64,
    /// Failure probability per metre of reach beyond the base radius.
    pub manip_fail_slope: f64,
    pub drop_sigma: f64,
    pub max_retries: u32,
    /// Seconds lost per failed navigation attempt.
    pub replan_time: f64,
    pub seed: u64,
}

impl Default for FailureModel {
    fn default() -> Self {
        Self {
            nav_fail_base: 0.02,
            nav_fail_near_obstacle: 5.0,
            clearance: 0.3,
            manip_fail_slope: 0.5,
            drop_sigma: 0.05,
            max_retries: 3,
            replan_time: 5.0,
            seed: 0,
        }
    }
}

impl FailureModel {
    pub fn noiseless() -> Self {
        Self { nav_fail_base: 0.0, manip_fail_slope: 0.0, drop_sigma: 0.0, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// True when the base at `goal` comes within `clearance` of an obstacle.
    pub fn near_obstacle(&self, goal: Point2, scene: &Scene) -> bool {
        scene
            .obstacles
            .iter()
            .any(|o| o.world_footprint().distance_to_point(goal) - scene.robot.base_radius < self.clearance)
    }

    pub fn nav_failure_probability(&self, goal: Point2, scene: &Scene) -> f64 {
        let mult = if self.near_obstacle(goal, scene) { self.nav_fail_near_obstacle } else { 1.0 };
        (self.nav_fail_base * mult).clamp(0.0, 1.0)
    }

    pub fn manip_failure_probability(&self, reach: f64, base_radius: f64) -> f64 {
        (self.manip_fail_slope * (reach - base_radius)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Reached its place pose and was put down at the planned position.
    pub success_per_object: BTreeMap<String, bool>,
    /// World positions of every object that reached the table.
    pub final_placements: BTreeMap<String, Point2>,
    pub exec_time: f64,
    pub semantic_score: f64,
    pub all_present: bool,
    pub nav_failures: u32,
    pub manip_failures: u32,
}

/// Fraction of `reference` relations that hold for `placements` (table
/// frame). Relations touching a missing object count as unsatisfied; an
/// empty reference scores 1.
pub fn semantic_score(reference: &RelationSet, placements: &BTreeMap<String, Point2>, objects: &[ObjectSpec]) -> f64 {
    if reference.relations.is_empty() {
        return 1.0;
    }
    let shape = |n: &str| objects.iter().find(|o| o.name == n).map(|o| &o.footprint);
    let ok = reference
        .relations
        .iter()
        .filter(|r| {
            let Some(&s) = placements.get(&r.subject) else { return false };
            let (a, ashape) = match r.anchor() {
                None => (Point2::ORIGIN, None),
                Some(a) => match placements.get(a) {
                    Some(&p) => (p, shape(a)),
                    None => return false,
                },
            };
            match shape(&r.subject) {
                Some(ss) => satisfied(r, s, a, default_band(ss, ashape)),
                None => false,
            }
        })
        .count();
    ok as f64 / reference.relations.len() as f64
}

fn navigate(rng: &mut ChaCha8Rng, p: f64, model: &FailureModel) -> (bool, u32) {
    for attempt in 0..=model.max_retries {
        if rng.random::<f64>() >= p {
            return (true, attempt);
        }
    }
    (false, model.max_retries + 1)
}

/// Runs `plan` once. Every leg's travel time and every pick and place are
/// always paid; failures only add time.
pub fn execute(plan: &TaskMotionPlan, scene: &Scene, reference: &RelationSet, model: &FailureModel) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let robot = &scene.robot;
    let table = scene.target_table().ok();
    let noise = Normal::new(0.0, model.drop_sigma.max(0.0)).ok();
    let mut exec_time = 0.0;
    let mut success = BTreeMap::new();
    let mut world = BTreeMap::new();
    let (mut nav_failures, mut manip_failures) = (0, 0);

    for step in &plan.steps {
        exec_time += step.fetch_cost + step.place_cost + 2.0 * robot.manip_time;
        let (fetched, f1) = navigate(&mut rng, model.nav_failure_probability(step.fetch.position(), scene), model);
        let (arrived, f2) = if fetched {
            navigate(&mut rng, model.nav_failure_probability(step.place.position(), scene), model)
        } else {
            (false, 0)
        };
        nav_failures += f1 + f2;
        exec_time += (f1 + f2) as f64 * model.replan_time;
        if !arrived {
            success.insert(step.object.clone(), false);
            continue;
        }
        let reach = step.place.position().distance(step.target_world);
        let p = model.manip_failure_probability(reach, robot.base_radius);
        let mut at = step.target_world;
        let placed = rng.random::<f64>() >= p;
        if !placed {
            manip_failures += 1;
            if let Some(n) = noise {
                at = Point2::new(at.x + n.sample(&mut rng), at.y + n.sample(&mut rng));
            }
        }
        success.insert(step.object.clone(), placed);
        world.insert(step.object.clone(), at);
    }

    let local: BTreeMap<String, Point2> = match table {
        Some(t) => world.iter().map(|(k, &p)| (k.clone(), t.to_table(p))).collect(),
        None => BTreeMap::new(),
    };
    let all_present = scene.objects.iter().all(|o| world.contains_key(&o.name));
    Outcome {
        success_per_object: success,
        final_placements: world,
        exec_time,
        semantic_score: semantic_score(reference, &local, &scene.objects),
        all_present,
        nav_failures,
        manip_failures,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("could not place {0:?} without collision")]
    NoRoom(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Tamp(#[from] TampError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Uniform collision-free table-frame placements, all on the table surface.
pub fn random_configuration(
    objects: &[ObjectSpec],
    table: &Table,
    seed: u64,
    max_tries: usize,
) -> Result<Configuration, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (hx, hy) = table.shape.half_extents();
    let mut placed: Vec<(Placement, &Shape)> = Vec::with_capacity(objects.len());
    for o in objects {
        let mut found = None;
        for _ in 0..max_tries {
            let p = Point2::new(rng.random_range(-hx..=hx), rng.random_range(-hy..=hy));
            if o.footprint.contained_in(p, &table.shape)
                && !placed.iter().any(|(q, s)| footprints_overlap(&o.footprint, p, s, q.position()))
            {
                found = Some(p);
                break;
            }
        }
        let p = found.ok_or_else(|| SimError::NoRoom(o.name.clone()))?;
        placed.push((Placement { object: o.name.clone(), x: p.x, y: p.y, stack_level: 0 }, &o.footprint));
    }
    Ok(Configuration { placements: placed.into_iter().map(|(p, _)| p).collect(), seed, anchor: String::new() })
}

const RANDOM_TRIES: usize = 1000;

/// Gap between a relocated obstacle and the target table edge.
const OBSTACLE_GAP: f64 = 0.1;

/// Copy of `scene` with every dynamic obstacle moved to a random spot just
/// beside a random side of the target table.
pub fn relocate_dynamic_obstacles(scene: &Scene, seed: u64) -> Result<Scene, SimError> {
    let table = scene.target_table()?;
    let (hx, hy) = table.shape.half_extents();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = scene.clone();
    for o in out.obstacles.iter_mut().filter(|o| o.kind == crate::scene::ObstacleKind::Dynamic) {
        let (ox, oy) = o.footprint.half_extents();
        let side: u8 = rng.random_range(0..4);
        let along: f64 = rng.random_range(-1.0..=1.0);
        let local = match side {
            0 => Point2::new(along * hx, -(hy + OBSTACLE_GAP + oy)),
            1 => Point2::new(hx + OBSTACLE_GAP + ox, along * hy),
            2 => Point2::new(along * hx, hy + OBSTACLE_GAP + oy),
            _ => Point2::new(-(hx + OBSTACLE_GAP + ox), along * hy),
        };
        o.pose = table.to_world(local);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "llm-grop")]
    LlmGrop,
    #[serde(rename = "tpra")]
    Tpra,
    #[serde(rename = "latp")]
    Latp,
    #[serde(rename = "grop")]
    GropRandom,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::LlmGrop, Method::Tpra, Method::Latp, Method::GropRandom];

    pub fn name(self) -> &'static str {
        match self {
            Method::LlmGrop => "llm-grop",
            Method::Tpra => "tpra",
            Method::Latp => "latp",
            Method::GropRandom => "grop",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SimError::UnknownMethod(s.into()))
    }
}

/// Random arrangement, random standing poses.
pub fn plan_tpra(
    scene: &Scene,
    grid: &OccupancyGrid,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, SimError> {
    let table = scene.target_table()?;
    let cfg = random_configuration(&scene.objects, table, derive(seed, &[stream::RANDOM_LAYOUT]), RANDOM_TRIES)?;
    let planner = Planner::new(scene, grid, config.planner.clone())?;
    Ok(planner.plan(&cfg, PoseChoice::Uniform(derive(seed, &[stream::POSES])))?)
}

/// Language-model arrangement, first sampled configuration, random standing
/// poses.
pub fn plan_latp(
    scene: &Scene,
    grid: &OccupancyGrid,
    arrangement: &Arrangement,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, SimError> {
    let mut sampler = config.sampler.clone();
    sampler.candidates = 1;
    let cfg = candidates(scene, arrangement, &sampler, seed)?.remove(0);
    let planner = Planner::new(scene, grid, config.planner.clone())?;
    Ok(planner.plan(&cfg, PoseChoice::Uniform(derive(seed, &[stream::POSES])))?)
}

/// M random arrangements, utility-optimized standing poses.
pub fn plan_grop_random(
    scene: &Scene,
    grid: &OccupancyGrid,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, SimError> {
    let table = scene.target_table()?;
    let base = derive(seed, &[stream::RANDOM_LAYOUT]);
    let cands = (0..config.sampler.candidates.max(1) as u64)
        .map(|k| random_configuration(&scene.objects, table, base.wrapping_add(k), RANDOM_TRIES))
        .collect::<Result<Vec<_>, _>>()?;
    let planner = Planner::new(scene, grid, config.planner.clone())?;
    Ok(planner.optimize(&cands)?)
}

/// Full method: language-model arrangement, M candidates, optimized poses.
pub fn plan_llm_grop(
    scene: &Scene,
    grid: &OccupancyGrid,
    arrangement: &Arrangement,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, SimError> {
    Ok(crate::pipeline::plan_arrangement(scene, grid, arrangement, config, seed)?)
}

pub fn plan_method(
    method: Method,
    scene: &Scene,
    grid: &OccupancyGrid,
    arrangement: &Arrangement,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, SimError> {
    match method {
        Method::LlmGrop => plan_llm_grop(scene, grid, arrangement, config, seed),
        Method::Tpra => plan_tpra(scene, grid, config, seed),
        Method::Latp => plan_latp(scene, grid, arrangement, config, seed),
        Method::GropRandom => plan_grop_random(scene, grid, config, seed),
    }
}

/// Per-group summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Standard error of the mean (0 for a single sample).
    pub stderr: f64,
}

/// Mean and standard error; the input order does not affect the result.
pub fn summarize(values: &[f64]) -> Summary {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return Summary { n, mean: f64::NAN, stderr: f64::NAN };
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Summary { n, mean, stderr }
}

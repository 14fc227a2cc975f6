//! Task and motion planning over candidate configurations.
//!
//! For each object, in placement order, the robot drives to the object's
//! source, picks it, then drives to a standing pose (`loc`) beside the target
//! table and places it. Standing poses are chosen greedily per step by the
//! utility `u = f - lambda * cost / c_norm`; a plan scores
//! `U = prod(f) - lambda * total_cost / c_norm`.

pub mod nav;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Shape};
use crate::grid::OccupancyGrid;
use crate::grounding::{Configuration, Placement};
use crate::scene::{RobotSpec, Scene, SceneError, Table};
use nav::{astar, path_points, DistanceField, NavError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TampError {
    #[error("every standing pose around the table is blocked")]
    NoFreePose,
    #[error("no free pose to pick up {0:?}")]
    NoFetchPose(String),
    #[error("no reachable standing pose can place {0:?}")]
    Infeasible(String),
    #[error("every candidate configuration is infeasible")]
    AllInfeasible,
    #[error("no candidate configurations")]
    NoCandidates,
    #[error("invalid planner parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Nav(#[from] NavError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Table side a standing pose faces, in the table frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    South,
    East,
    North,
    West,
}

/// Robot base pose for a navigation goal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavGoal {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
}

impl NavGoal {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    fn facing(p: Point2, target: Point2, side: Option<Side>) -> Self {
        let theta = (target.y - p.y).atan2(target.x - p.x);
        Self { x: p.x, y: p.y, theta, side }
    }
}

fn side_of(table: &Table, world: Point2) -> Side {
    let p = table.to_table(world);
    match table.shape {
        Shape::Rect { w, h } => {
            if p.y < -h / 2.0 {
                Side::South
            } else if p.y > h / 2.0 {
                Side::North
            } else if p.x > w / 2.0 {
                Side::East
            } else {
                Side::West
            }
        }
        Shape::Circle { .. } => {
            let a = p.y.atan2(p.x);
            if (-3.0 * PI / 4.0..-PI / 4.0).contains(&a) {
                Side::South
            } else if (-PI / 4.0..PI / 4.0).contains(&a) {
                Side::East
            } else if (PI / 4.0..3.0 * PI / 4.0).contains(&a) {
                Side::North
            } else {
                Side::West
            }
        }
    }
}

fn evenly(len: f64, spacing: f64) -> impl Iterator<Item = f64> {
    let n = (len / spacing + 1e-9).floor() as usize + 1;
    let start = -((n - 1) as f64) * spacing / 2.0;
    (0..n).map(move |i| start + i as f64 * spacing)
}

/// Standing poses spaced along the table perimeter at `standoff` from the
/// table edge, facing the table centre; poses on occupied cells are dropped.
pub fn candidate_standing_poses(
    table: &Table,
    grid: &OccupancyGrid,
    spacing: f64,
    standoff: f64,
) -> Result<Vec<NavGoal>, TampError> {
    if !(spacing > 0.0) {
        return Err(TampError::InvalidParams("spacing must be positive"));
    }
    let mut local = Vec::new();
    match table.shape {
        Shape::Rect { w, h } => {
            let (ox, oy) = (w / 2.0 + standoff, h / 2.0 + standoff);
            local.extend(evenly(w, spacing).map(|x| Point2::new(x, -oy)));
            local.extend(evenly(h, spacing).map(|y| Point2::new(ox, y)));
            local.extend(evenly(w, spacing).map(|x| Point2::new(-x, oy)));
            local.extend(evenly(h, spacing).map(|y| Point2::new(-ox, -y)));
        }
        Shape::Circle { r } => {
            let rr = r + standoff;
            let n = ((2.0 * PI * rr / spacing).ceil() as usize).max(4);
            local.extend((0..n).map(|i| {
                let a = -PI / 2.0 + 2.0 * PI * i as f64 / n as f64;
                Point2::new(rr * a.cos(), rr * a.sin())
            }));
        }
    }
    let centre = table.pose.position();
    let poses: Vec<NavGoal> = local
        .into_iter()
        .map(|p| table.to_world(p))
        .filter(|&p| grid.is_free_at(p))
        .map(|p| NavGoal::facing(p, centre, Some(side_of(table, p))))
        .collect();
    if poses.is_empty() {
        return Err(TampError::NoFreePose);
    }
    Ok(poses)
}

/// Linear reach model: 1 at the base edge, 0 at `reach_max` and beyond.
pub fn feasibility(goal: &NavGoal, placement: Point2, robot: &RobotSpec) -> f64 {
    let d = goal.position().distance(placement);
    if d > robot.reach_max {
        return 0.0;
    }
    (1.0 - (d - robot.base_radius) / (robot.reach_max - robot.base_radius)).clamp(0.0, 1.0)
}

/// Index of the option with the best `f - lambda * c / c_norm`, ties broken
/// by lower cost then lower index. Options with `f <= 0` or infinite cost
/// are ignored.
pub fn best_option(options: &[(f64, f64)], lambda: f64, c_norm: f64) -> Option<usize> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &(f, c)) in options.iter().enumerate() {
        if !(f > 0.0) || !c.is_finite() {
            continue;
        }
        let u = f - lambda * c / c_norm;
        let better = match best {
            None => true,
            Some((_, bu, bc)) => u > bu || (u == bu && c < bc),
        };
        if better {
            best = Some((i, u, c));
        }
    }
    best.map(|(i, _, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub lambda: f64,
    /// Spacing of standing poses along the table perimeter, metres.
    pub spacing: f64,
    /// Gap between the robot base and the table edge.
    pub standoff_margin: f64,
    /// Number of poses tried around an object source that is not on a table.
    pub fetch_ring: usize,
    /// Cost normaliser in seconds; `None` uses the time to drive once around
    /// the table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_norm: Option<f64>,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self { lambda: 0.3, spacing: 0.2, standoff_margin: 0.05, fetch_ring: 16, c_norm: None }
    }
}

/// How the place pose is picked at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoseChoice {
    MaxUtility,
    /// Uniformly among poses that can reach the placement.
    Uniform(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub object: String,
    pub fetch: NavGoal,
    /// Seconds from the previous pose to `fetch`.
    pub fetch_cost: f64,
    pub place: NavGoal,
    /// Seconds from `fetch` to `place`.
    pub place_cost: f64,
    /// Table-frame target.
    pub target: Placement,
    pub target_world: Point2,
    pub feasibility: f64,
    /// Feasibility minus normalized cost of the legs into and out of `place`.
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMotionPlan {
    pub steps: Vec<PlanStep>,
    pub configuration: Configuration,
    pub utility: f64,
    /// Seconds: navigation plus one pick and one place per object.
    pub cost: f64,
    pub feasibility: f64,
    pub lambda: f64,
    pub c_norm: f64,
    /// World polylines, two per step (fetch leg, place leg), once attached.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<Vec<[f64; 2]>>,
}

/// Pick-up pose for an object resting at `source`: the free standing pose of
/// the supporting table nearest to it, or, for objects not on a table, the
/// free pose on a ring around it nearest to `toward`.
fn fetch_pose(
    scene: &Scene,
    grid: &OccupancyGrid,
    params: &PlannerParams,
    source: Point2,
    toward: Point2,
) -> Option<NavGoal> {
    let robot = &scene.robot;
    let standoff = robot.base_radius + params.standoff_margin;
    if let Some(t) = scene.tables.iter().find(|t| t.contains_point(source)) {
        let poses = candidate_standing_poses(t, grid, params.spacing, standoff).ok()?;
        let mut best: Option<(NavGoal, f64)> = None;
        for g in poses {
            let d = g.position().distance(source);
            if d <= robot.reach_max && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((g, d));
            }
        }
        return best.map(|(g, _)| NavGoal::facing(g.position(), source, g.side));
    }
    let n = params.fetch_ring.max(1);
    let mut best: Option<(Point2, f64)> = None;
    for i in 0..n {
        let a = 2.0 * PI * i as f64 / n as f64;
        let p = Point2::new(source.x + standoff * a.cos(), source.y + standoff * a.sin());
        if grid.is_free_at(p) && best.is_none_or(|(_, bd)| p.distance(toward) < bd) {
            best = Some((p, p.distance(toward)));
        }
    }
    best.map(|(p, _)| NavGoal::facing(p, source, None))
}

/// (feasibility, seconds in from the fetch pose, seconds out to the next
/// fetch pose).
type PoseOption = (f64, f64, f64);

/// Precomputed standing poses and distance fields for one scene.
#[derive(Debug, Clone)]
pub struct Planner<'a> {
    scene: &'a Scene,
    grid: &'a OccupancyGrid,
    table: &'a Table,
    params: PlannerParams,
    poses: Vec<NavGoal>,
    c_norm: f64,
    fetch: BTreeMap<String, (NavGoal, DistanceField)>,
}

impl<'a> Planner<'a> {
    pub fn new(scene: &'a Scene, grid: &'a OccupancyGrid, params: PlannerParams) -> Result<Self, TampError> {
        if !(params.lambda >= 0.0) || !params.lambda.is_finite() {
            return Err(TampError::InvalidParams("lambda must be finite and non-negative"));
        }
        if params.c_norm.is_some_and(|c| !(c > 0.0)) {
            return Err(TampError::InvalidParams("c_norm must be positive"));
        }
        let table = scene.target_table()?;
        let robot = &scene.robot;
        let standoff = robot.base_radius + params.standoff_margin;
        let poses = candidate_standing_poses(table, grid, params.spacing, standoff)?;
        let c_norm = params.c_norm.unwrap_or(table.shape.perimeter() / robot.nav_speed);

        let mut fetch = BTreeMap::new();
        let centre = table.pose.position();
        for o in &scene.objects {
            let goal = fetch_pose(scene, grid, &params, o.source, centre)
                .ok_or_else(|| TampError::NoFetchPose(o.name.clone()))?;
            let cell = grid.cell_of(goal.position()).ok_or_else(|| TampError::NoFetchPose(o.name.clone()))?;
            let field = DistanceField::build(grid, cell)?;
            fetch.insert(o.name.clone(), (goal, field));
        }
        Ok(Self { scene, grid, table, params, poses, c_norm, fetch })
    }

    pub fn poses(&self) -> &[NavGoal] {
        &self.poses
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    pub fn table(&self) -> &Table {
        self.table
    }

    pub fn grid(&self) -> &OccupancyGrid {
        self.grid
    }

    fn seconds(&self, field: &DistanceField, p: Point2) -> Option<f64> {
        let c = self.grid.cell_of(p)?;
        field.meters_to(self.grid, c).map(|m| m / self.scene.robot.nav_speed)
    }

    /// (feasibility, seconds from the fetch pose) for every standing pose.
    pub fn place_options(&self, object: &str, world: Point2) -> Result<Vec<(f64, f64)>, TampError> {
        let (_, field) = self.fetch.get(object).ok_or_else(|| SceneError::UnknownObject(object.into()))?;
        Ok(self
            .poses
            .iter()
            .map(|g| {
                let f = feasibility(g, world, &self.scene.robot);
                (f, self.seconds(field, g.position()).unwrap_or(f64::INFINITY))
            })
            .collect())
    }

    /// Options for every standing pose at every step.
    fn step_options(&self, cfg: &Configuration) -> Result<Vec<Vec<PoseOption>>, TampError> {
        let mut out = Vec::with_capacity(cfg.placements.len());
        for (k, target) in cfg.placements.iter().enumerate() {
            let world = self.table.to_world(target.position());
            let options = self.place_options(&target.object, world)?;
            let exits: Vec<f64> = match cfg.placements.get(k + 1) {
                None => vec![0.0; options.len()],
                Some(next) => {
                    let (_, field) =
                        self.fetch.get(&next.object).ok_or_else(|| SceneError::UnknownObject(next.object.clone()))?;
                    self.poses.iter().map(|g| self.seconds(field, g.position()).unwrap_or(f64::INFINITY)).collect()
                }
            };
            out.push(options.iter().zip(exits).map(|(&(f, c), e)| (f, c, e)).collect());
        }
        Ok(out)
    }

    /// Pose indices maximizing `prod f - lambda * sum(in + out) / c_norm`.
    /// A pose only affects the legs into and out of it, so partial plans are
    /// reduced to their Pareto front over (feasibility product, seconds).
    fn best_assignment(&self, cfg: &Configuration, options: &[Vec<PoseOption>]) -> Result<Vec<usize>, TampError> {
        struct Node {
            p: f64,
            g: f64,
            parent: usize,
            option: usize,
        }
        let mut layers: Vec<Vec<Node>> = Vec::with_capacity(options.len());
        for (k, opts) in options.iter().enumerate() {
            let mut next = Vec::new();
            let parents: &[Node] = layers.last().map_or(&[], |l| l.as_slice());
            let roots = [Node { p: 1.0, g: 0.0, parent: usize::MAX, option: usize::MAX }];
            let parents = if k == 0 { &roots[..] } else { parents };
            for (si, s) in parents.iter().enumerate() {
                for (oi, &(f, cin, cout)) in opts.iter().enumerate() {
                    let g = cin + cout;
                    if f > 0.0 && g.is_finite() {
                        next.push(Node { p: s.p * f, g: s.g + g, parent: si, option: oi });
                    }
                }
            }
            next.sort_by(|a, b| a.g.total_cmp(&b.g).then(b.p.total_cmp(&a.p)));
            let mut front: Vec<Node> = Vec::new();
            for n in next {
                if front.last().is_none_or(|l| n.p > l.p) {
                    front.push(n);
                }
            }
            if front.is_empty() {
                return Err(TampError::Infeasible(cfg.placements[k].object.clone()));
            }
            layers.push(front);
        }
        let Some(last) = layers.last() else { return Ok(Vec::new()) };
        let lambda = self.params.lambda;
        let mut best = 0;
        for (i, n) in last.iter().enumerate() {
            // sorted by seconds, so strict improvement keeps the cheaper tie
            if n.p - lambda * n.g / self.c_norm > last[best].p - lambda * last[best].g / self.c_norm {
                best = i;
            }
        }
        let mut picks = vec![0; layers.len()];
        let mut at = best;
        for k in (0..layers.len()).rev() {
            picks[k] = layers[k][at].option;
            at = layers[k][at].parent;
        }
        Ok(picks)
    }

    /// Builds a plan for one configuration. `MaxUtility` picks the place poses
    /// that maximize the plan utility; `Uniform` picks each one at random.
    pub fn plan(&self, cfg: &Configuration, choice: PoseChoice) -> Result<TaskMotionPlan, TampError> {
        let robot = &self.scene.robot;
        let lambda = self.params.lambda;
        let options = self.step_options(cfg)?;
        let picks = match choice {
            PoseChoice::MaxUtility => self.best_assignment(cfg, &options)?,
            PoseChoice::Uniform(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picks = Vec::with_capacity(options.len());
                for (k, opts) in options.iter().enumerate() {
                    let ok: Vec<usize> =
                        (0..opts.len()).filter(|&i| opts[i].0 > 0.0 && (opts[i].1 + opts[i].2).is_finite()).collect();
                    if ok.is_empty() {
                        return Err(TampError::Infeasible(cfg.placements[k].object.clone()));
                    }
                    picks.push(ok[rng.random_range(0..ok.len())]);
                }
                picks
            }
        };

        let mut current = robot.start.position();
        let mut steps = Vec::with_capacity(cfg.placements.len());
        let mut nav_total = 0.0;
        let mut feas = 1.0;
        for ((target, opts), &i) in cfg.placements.iter().zip(&options).zip(&picks) {
            let name = &target.object;
            let (fetch_goal, field) = self.fetch.get(name).ok_or_else(|| SceneError::UnknownObject(name.clone()))?;
            let fetch_cost = self.seconds(field, current).ok_or_else(|| TampError::Infeasible(name.clone()))?;
            let (f, c, exit) = opts[i];
            nav_total += fetch_cost + c;
            feas *= f;
            steps.push(PlanStep {
                object: name.clone(),
                fetch: *fetch_goal,
                fetch_cost,
                place: self.poses[i],
                place_cost: c,
                target: target.clone(),
                target_world: self.table.to_world(target.position()),
                feasibility: f,
                utility: f - lambda * (c + exit) / self.c_norm,
            });
            current = self.poses[i].position();
        }
        let cost = nav_total + 2.0 * robot.manip_time * steps.len() as f64;
        Ok(TaskMotionPlan {
            steps,
            configuration: cfg.clone(),
            utility: feas - lambda * cost / self.c_norm,
            cost,
            feasibility: feas,
            lambda,
            c_norm: self.c_norm,
            paths: Vec::new(),
        })
    }

    /// Plans every candidate independently.
    pub fn evaluate(&self, candidates: &[Configuration], choice: PoseChoice) -> Vec<Result<TaskMotionPlan, TampError>> {
        candidates.iter().map(|c| self.plan(c, choice)).collect()
    }

    /// Fills `plan.paths` with the grid paths of every leg.
    pub fn attach_paths(&self, plan: &mut TaskMotionPlan) -> Result<(), TampError> {
        let mut paths = Vec::with_capacity(plan.steps.len() * 2);
        let mut current = self.scene.robot.start.position();
        for s in &plan.steps {
            for goal in [s.fetch.position(), s.place.position()] {
                let a = self.grid.cell_of(current).ok_or(NavError::StartBlocked)?;
                let b = self.grid.cell_of(goal).ok_or(NavError::GoalBlocked)?;
                let p = astar(self.grid, a, b)?;
                paths.push(path_points(self.grid, &p).iter().map(|q| [q.x, q.y]).collect());
                current = goal;
            }
        }
        plan.paths = paths;
        Ok(())
    }

    /// Best plan over all candidates, with paths attached.
    pub fn optimize(&self, candidates: &[Configuration]) -> Result<TaskMotionPlan, TampError> {
        let mut plan = select(self.evaluate(candidates, PoseChoice::MaxUtility))?;
        self.attach_paths(&mut plan)?;
        Ok(plan)
    }
}

/// Highest utility, then lowest cost, then earliest candidate.
pub fn select(results: Vec<Result<TaskMotionPlan, TampError>>) -> Result<TaskMotionPlan, TampError> {
    if results.is_empty() {
        return Err(TampError::NoCandidates);
    }
    let mut best: Option<TaskMotionPlan> = None;
    for plan in results.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some(b) => plan.utility > b.utility || (plan.utility == b.utility && plan.cost < b.cost),
        };
        if better {
            best = Some(plan);
        }
    }
    best.ok_or(TampError::AllInfeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose2;
    use crate::grid::rasterize;
    use crate::scene::{ObjectSpec, Obstacle, ObstacleKind};
    use nav::nav_cost;

    fn robot() -> RobotSpec {
        RobotSpec {
            base_radius: 0.25,
            reach_max: 0.95,
            nav_speed: 0.5,
            manip_time: 5.0,
            start: Pose2::new(-2.0, -1.5, 0.0),
        }
    }

    fn table() -> Table {
        Table { id: "t".into(), shape: Shape::Rect { w: 1.2, h: 0.8 }, pose: Pose2::default() }
    }

    fn scene(obstacles: Vec<Obstacle>) -> Scene {
        Scene {
            name: "s".into(),
            target_table: None,
            tables: vec![table()],
            objects: vec![ObjectSpec {
                name: "plate".into(),
                footprint: Shape::Circle { r: 0.1 },
                height: 0.02,
                stack_base: true,
                source: Point2::new(2.2, 0.0),
            }],
            obstacles,
            robot: robot(),
        }
    }

    fn chair(x: f64, y: f64) -> Obstacle {
        Obstacle {
            id: alloc::format!("chair{x}"),
            footprint: Shape::Rect { w: 0.45, h: 0.45 },
            pose: Point2::new(x, y),
            kind: ObstacleKind::Dynamic,
        }
    }

    fn cfg(x: f64, y: f64) -> Configuration {
        Configuration {
            placements: vec![Placement { object: "plate".into(), x, y, stack_level: 0 }],
            seed: 0,
            anchor: "plate".into(),
        }
    }

    #[test]
    fn poses_on_all_four_sides() {
        let s = scene(vec![]);
        let g = rasterize(&s, 0.05);
        let poses = candidate_standing_poses(&s.tables[0], &g, 0.2, 0.3).unwrap();
        for side in [Side::South, Side::East, Side::North, Side::West] {
            assert!(poses.iter().any(|p| p.side == Some(side)), "{side:?}");
        }
        assert_eq!(poses.len(), 2 * 7 + 2 * 5);
        let p = poses[0];
        assert!((p.theta - (0.0 - p.y).atan2(0.0 - p.x)).abs() < 1e-12);
        assert!(candidate_standing_poses(&s.tables[0], &g, 0.0, 0.3).is_err());
    }

    #[test]
    fn chairs_remove_south_side() {
        let s = scene(vec![chair(-0.35, -0.7), chair(0.35, -0.7)]);
        let g = rasterize(&s, 0.05);
        let poses = candidate_standing_poses(&s.tables[0], &g, 0.2, 0.3).unwrap();
        assert!(poses.iter().all(|p| p.side != Some(Side::South)));
        assert!(poses.iter().any(|p| p.side == Some(Side::East)));
    }

    #[test]
    fn feasibility_linear_model() {
        let r = robot();
        let g = NavGoal { x: 0.0, y: 0.0, theta: 0.0, side: None };
        assert_eq!(feasibility(&g, Point2::new(r.reach_max + 0.01, 0.0), &r), 0.0);
        assert_eq!(feasibility(&g, Point2::new(r.base_radius, 0.0), &r), 1.0);
        let mid = (r.base_radius + r.reach_max) / 2.0;
        assert!((feasibility(&g, Point2::new(0.0, mid), &r) - 0.5).abs() < 1e-12);
        assert_eq!(feasibility(&g, Point2::new(0.1, 0.0), &r), 1.0);
    }

    #[test]
    fn near_pose_beats_far_pose() {
        // lambda / c_norm = 0.01 per second
        assert_eq!(best_option(&[(0.9, 30.0), (0.9, 10.0)], 0.3, 30.0), Some(1));
        assert_eq!(best_option(&[(0.9, 10.0), (0.9, 10.0)], 0.3, 30.0), Some(0));
        assert_eq!(best_option(&[(0.0, 1.0), (0.5, f64::INFINITY)], 0.3, 30.0), None);
    }

    #[test]
    fn plan_costs_add_up() {
        let s = scene(vec![]);
        let g = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &g, PlannerParams::default()).unwrap();
        let plan = planner.optimize(&[cfg(0.3, 0.0)]).unwrap();
        let st = &plan.steps[0];
        assert_eq!(plan.cost, st.fetch_cost + st.place_cost + 10.0);
        assert_eq!(plan.feasibility, st.feasibility);
        assert!((plan.utility - (st.feasibility - 0.3 * plan.cost / planner.c_norm())).abs() < 1e-12);
        assert_eq!(st.place.side, Some(Side::East));
        assert!(st.place.position().distance(st.target_world) <= s.robot.reach_max);
        assert_eq!(plan.paths.len(), 2);
        let opts = planner.place_options("plate", st.target_world).unwrap();
        for (f, c) in opts {
            if f > 0.0 && c.is_finite() {
                assert!(st.utility >= f - 0.3 * c / planner.c_norm());
            }
        }
    }

    #[test]
    fn max_utility_matches_exhaustive_search() {
        let mut s = scene(vec![chair(0.35, -0.7)]);
        let mut cup = s.objects[0].clone();
        cup.name = "cup".into();
        cup.source = Point2::new(-2.0, 1.2);
        let mut fork = s.objects[0].clone();
        fork.name = "fork".into();
        fork.source = Point2::new(2.2, 0.9);
        s.objects.push(cup);
        s.objects.push(fork);
        let g = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &g, PlannerParams { spacing: 0.3, ..PlannerParams::default() }).unwrap();
        let cfg = Configuration {
            placements: vec![
                Placement { object: "plate".into(), x: 0.1, y: -0.2, stack_level: 0 },
                Placement { object: "cup".into(), x: -0.45, y: 0.25, stack_level: 0 },
                Placement { object: "fork".into(), x: 0.5, y: 0.3, stack_level: 0 },
            ],
            seed: 0,
            anchor: "plate".into(),
        };
        let plan = planner.plan(&cfg, PoseChoice::MaxUtility).unwrap();

        // every assignment, costed with fields rooted at the place poses
        let speed = s.robot.nav_speed;
        let fields: Vec<Option<DistanceField>> =
            planner.poses().iter().map(|p| DistanceField::build(&g, g.cell_of(p.position())?).ok()).collect();
        let secs = |field: &DistanceField, p: Point2| field.meters_to(&g, g.cell_of(p).unwrap()).map(|m| m / speed);
        let fetch: Vec<Point2> = plan.steps.iter().map(|st| st.fetch.position()).collect();
        let first = nav_cost(s.robot.start.position(), fetch[0], &g, speed).unwrap();
        let n = planner.poses().len();
        let mut best = f64::NEG_INFINITY;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let picks = [a, b, c];
                    let (mut feas, mut nav) = (1.0, first);
                    for (k, &i) in picks.iter().enumerate() {
                        let world = planner.table().to_world(cfg.placements[k].position());
                        feas *= feasibility(&planner.poses()[i], world, &s.robot);
                        let Some(field) = &fields[i] else {
                            feas = 0.0;
                            break;
                        };
                        nav += secs(field, fetch[k]).unwrap_or(f64::INFINITY);
                        if k + 1 < picks.len() {
                            nav += secs(field, fetch[k + 1]).unwrap_or(f64::INFINITY);
                        }
                    }
                    if feas > 0.0 && nav.is_finite() {
                        best = best.max(feas - 0.3 * (nav + 30.0) / planner.c_norm());
                    }
                }
            }
        }
        assert!((plan.utility - best).abs() < 1e-9, "{} vs {best}", plan.utility);
    }

    #[test]
    fn unreachable_placement_is_infeasible() {
        let s = scene(vec![]);
        let g = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &g, PlannerParams { c_norm: None, ..PlannerParams::default() }).unwrap();
        let far = cfg(5.0, 5.0);
        assert_eq!(planner.plan(&far, PoseChoice::MaxUtility), Err(TampError::Infeasible("plate".into())));
        assert_eq!(planner.optimize(&[far]), Err(TampError::AllInfeasible));
        assert_eq!(planner.optimize(&[]), Err(TampError::NoCandidates));
    }

    #[test]
    fn identical_candidates_keep_first_seed() {
        let s = scene(vec![]);
        let g = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &g, PlannerParams::default()).unwrap();
        let a = cfg(0.0, 0.0);
        let mut b = a.clone();
        b.seed = 1;
        assert_eq!(planner.optimize(&[a, b]).unwrap().configuration.seed, 0);
    }

    #[test]
    fn uniform_choice_is_seeded() {
        let s = scene(vec![]);
        let g = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &g, PlannerParams::default()).unwrap();
        let c = cfg(0.0, 0.0);
        assert_eq!(planner.plan(&c, PoseChoice::Uniform(4)), planner.plan(&c, PoseChoice::Uniform(4)));
    }
}

//! World model: tables, tableware, obstacles and the robot.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Footprint, Point2, Pose2, Shape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: String,
    pub footprint: Shape,
    #[serde(default)]
    pub height: f64,
    /// Whether other objects may be stacked on this one.
    #[serde(default)]
    pub stack_base: bool,
    /// World position where the object rests before the task starts.
    pub source: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    pub shape: Shape,
    pub pose: Pose2,
}

impl Table {
    pub fn to_world(&self, p: Point2) -> Point2 {
        self.pose.transform(p)
    }

    pub fn to_table(&self, p: Point2) -> Point2 {
        self.pose.inverse_transform(p)
    }

    pub fn footprint(&self) -> Footprint {
        self.shape.placed(self.pose)
    }

    pub fn contains_point(&self, world: Point2) -> bool {
        let p = self.to_table(world);
        match self.shape {
            Shape::Rect { w, h } => p.x.abs() <= w / 2.0 && p.y.abs() <= h / 2.0,
            Shape::Circle { r } => p.norm() <= r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstacleKind {
    /// Part of the prior map.
    Static,
    /// Only sensed at planning time (chairs, people).
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: String,
    pub footprint: Shape,
    pub pose: Point2,
    pub kind: ObstacleKind,
}

impl Obstacle {
    pub fn world_footprint(&self) -> Footprint {
        self.footprint.placed(Pose2::new(self.pose.x, self.pose.y, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub base_radius: f64,
    /// Largest horizontal distance from the base centre at which a
    /// placement is possible.
    pub reach_max: f64,
    /// m/s
    pub nav_speed: f64,
    /// Seconds per pick or place.
    pub manip_time: f64,
    #[serde(default)]
    pub start: Pose2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default)]
    pub name: String,
    /// Table that receives the arrangement; defaults to the first table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_table: Option<String>,
    pub tables: Vec<Table>,
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub robot: RobotSpec,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("{entity}: {field} must be strictly positive and finite")]
    NonPositive { entity: String, field: &'static str },
    #[error("tables {0:?} and {1:?} overlap")]
    TableOverlap(String, String),
    #[error("robot: {0}")]
    InvalidRobot(&'static str),
    #[error("unknown target table {0:?}")]
    UnknownTable(String),
    #[error("scene has no tables")]
    NoTables,
    #[error("unknown object {0:?}")]
    UnknownObject(String),
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl Scene {
    /// Checks every scene invariant, naming the offending entity.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut names = BTreeSet::new();
        for o in &self.objects {
            if !names.insert(o.name.as_str()) {
                return Err(SceneError::DuplicateName(o.name.clone()));
            }
            if !o.footprint.is_valid() {
                return Err(SceneError::NonPositive { entity: o.name.clone(), field: "footprint" });
            }
            if o.height < 0.0 || !o.height.is_finite() {
                return Err(SceneError::NonPositive { entity: o.name.clone(), field: "height" });
            }
        }
        let mut ids = BTreeSet::new();
        for t in &self.tables {
            if !ids.insert(t.id.as_str()) {
                return Err(SceneError::DuplicateName(t.id.clone()));
            }
            if !t.shape.is_valid() {
                return Err(SceneError::NonPositive { entity: t.id.clone(), field: "shape" });
            }
        }
        for (i, a) in self.tables.iter().enumerate() {
            for b in &self.tables[i + 1..] {
                if a.footprint().overlaps(&b.footprint()) {
                    return Err(SceneError::TableOverlap(a.id.clone(), b.id.clone()));
                }
            }
        }
        let mut obstacle_ids = BTreeSet::new();
        for o in &self.obstacles {
            if !obstacle_ids.insert(o.id.as_str()) {
                return Err(SceneError::DuplicateName(o.id.clone()));
            }
            if !o.footprint.is_valid() {
                return Err(SceneError::NonPositive { entity: o.id.clone(), field: "footprint" });
            }
        }
        let r = &self.robot;
        for (field, v) in [
            ("base_radius", r.base_radius),
            ("reach_max", r.reach_max),
            ("nav_speed", r.nav_speed),
            ("manip_time", r.manip_time),
        ] {
            if !positive(v) {
                return Err(SceneError::NonPositive { entity: "robot".into(), field });
            }
        }
        if r.reach_max <= r.base_radius {
            return Err(SceneError::InvalidRobot("reach_max must exceed base_radius"));
        }
        if let Some(id) = &self.target_table {
            if !self.tables.iter().any(|t| &t.id == id) {
                return Err(SceneError::UnknownTable(id.clone()));
            }
        }
        Ok(())
    }

    pub fn target_table(&self) -> Result<&Table, SceneError> {
        match &self.target_table {
            Some(id) => self.tables.iter().find(|t| &t.id == id).ok_or_else(|| SceneError::UnknownTable(id.clone())),
            None => self.tables.first().ok_or(SceneError::NoTables),
        }
    }

    pub fn object(&self, name: &str) -> Result<&ObjectSpec, SceneError> {
        self.objects.iter().find(|o| o.name == name).ok_or_else(|| SceneError::UnknownObject(name.into()))
    }

    pub fn object_names(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.name.clone()).collect()
    }

    /// Footprint of every navigation blocker; `include_dynamic` adds the
    /// obstacles that are only known at planning time.
    pub fn blockers(&self, include_dynamic: bool) -> Vec<Footprint> {
        self.tables
            .iter()
            .map(Table::footprint)
            .chain(
                self.obstacles
                    .iter()
                    .filter(|o| include_dynamic || o.kind == ObstacleKind::Static)
                    .map(Obstacle::world_footprint),
            )
            .collect()
    }

    /// World bounding box of everything in the scene, robot start and object
    /// sources included.
    pub fn extent(&self) -> (Point2, Point2) {
        let start = self.robot.start.position();
        let mut lo = start;
        let mut hi = start;
        let mut grow = |a: Point2, b: Point2| {
            lo.x = lo.x.min(a.x);
            lo.y = lo.y.min(a.y);
            hi.x = hi.x.max(b.x);
            hi.y = hi.y.max(b.y);
        };
        for f in self.blockers(true) {
            let (a, b) = f.bounds();
            grow(a, b);
        }
        for o in &self.objects {
            grow(o.source, o.source);
        }
        (lo, hi)
    }
}

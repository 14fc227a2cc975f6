//! Geometric grounding of symbolic relations.
//!
//! An anchor object sits at the table origin; the others are offset from
//! already-positioned neighbours by the recommended distances, giving a
//! nominal layout. Candidate configurations are then drawn object by object
//! from a 2D Gaussian around the nominal position and rejected when they
//! break a relation, overlap another object, or leave the table.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{footprints_overlap, Point2, Shape};
use crate::oracle::RelationKey;
use crate::relations::{
    default_band, placement_order, satisfied, stack_levels, RelationError, RelationKind, RelationSet,
};
use crate::scene::{ObjectSpec, Table};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundingError {
    #[error("relation set is empty")]
    EmptyRelationSet,
    #[error("{0:?} is not connected to the anchor")]
    Disconnected(String),
    #[error("no distance for {} {} {}", .0.0, .0.1, .0.2)]
    MissingDistance(RelationKey),
    #[error("no footprint for {0:?}")]
    UnknownObject(String),
    #[error("{object:?} rejected after {tries} draws")]
    Rejected { object: String, tries: usize },
    #[error("no valid configuration within {0} sampling rounds")]
    NoValidConfiguration(usize),
    #[error("invalid sampler parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// LLM-guided positions in the table frame, metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalLayout {
    pub anchor: String,
    pub positions: BTreeMap<String, Point2>,
    pub stack_levels: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub object: String,
    pub x: f64,
    pub y: f64,
    pub stack_level: u32,
}

impl Placement {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// One complete set of table-frame placements, in placement order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub placements: Vec<Placement>,
    pub seed: u64,
    /// Anchor of the nominal layout this was sampled around.
    pub anchor: String,
}

impl Configuration {
    pub fn get(&self, object: &str) -> Option<&Placement> {
        self.placements.iter().find(|p| p.object == object)
    }

    pub fn order(&self) -> impl Iterator<Item = &str> {
        self.placements.iter().map(|p| p.object.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    /// Symmetric positive-definite, m².
    pub covariance: [[f64; 2]; 2],
    pub max_tries_per_object: usize,
    /// Number of configurations wanted (M).
    pub candidates: usize,
    /// Ceiling on sampling rounds per `generate_candidates` call.
    pub max_rounds: usize,
    /// Fixed equality band; `None` uses half the larger footprint of each pair.
    pub band: Option<f64>,
}

impl Default for SamplerParams {
    fn default() -> Self {
        let var = 0.02 * 0.02;
        Self {
            covariance: [[var, 0.0], [0.0, var]],
            max_tries_per_object: 100,
            candidates: 10,
            max_rounds: 50,
            band: None,
        }
    }
}

impl SamplerParams {
    pub fn isotropic(sigma: f64) -> Self {
        let var = sigma * sigma;
        Self { covariance: [[var, 0.0], [0.0, var]], ..Self::default() }
    }

    /// Lower Cholesky factor of the covariance.
    pub fn cholesky(&self) -> Result<[[f64; 2]; 2], GroundingError> {
        let [[a, b], [c, d]] = self.covariance;
        if (b - c).abs() > 1e-15 * a.abs().max(d.abs()).max(1.0) {
            return Err(GroundingError::InvalidParams("covariance must be symmetric"));
        }
        if !(a > 0.0) || !(a * d - b * c > 0.0) {
            return Err(GroundingError::InvalidParams("covariance must be positive definite"));
        }
        let l00 = a.sqrt();
        let l10 = b / l00;
        let l11 = (d - l10 * l10).sqrt();
        Ok([[l00, 0.0], [l10, l11]])
    }

    pub fn validate(&self) -> Result<(), GroundingError> {
        self.cholesky()?;
        if self.candidates < 1 {
            return Err(GroundingError::InvalidParams("M must be at least 1"));
        }
        if self.max_tries_per_object < 1 {
            return Err(GroundingError::InvalidParams("max_tries_per_object must be at least 1"));
        }
        Ok(())
    }
}

/// The object named by a centre relation, else the one with the most
/// relations (subject or anchor), ties broken by name.
pub fn select_anchor(rs: &RelationSet) -> Result<String, GroundingError> {
    if rs.relations.is_empty() {
        return Err(GroundingError::EmptyRelationSet);
    }
    if let Some(r) = rs.relations.iter().find(|r| r.kind == RelationKind::CenterOfTable) {
        return Ok(r.subject.clone());
    }
    let mut degree: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &rs.relations {
        *degree.entry(&r.subject).or_default() += 1;
        if let Some(a) = r.anchor() {
            *degree.entry(a).or_default() += 1;
        }
    }
    // BTreeMap iterates by name, so the first maximum wins ties.
    let mut best: Option<(&str, usize)> = None;
    for (&name, &d) in &degree {
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((name, d));
        }
    }
    Ok(best.map(|(n, _)| n.into()).unwrap_or_default())
}

fn offset(kind: RelationKind, meters: f64) -> Point2 {
    match kind.direction() {
        Some((dx, dy)) => Point2::new(dx * meters, dy * meters),
        None => Point2::ORIGIN,
    }
}

/// Breadth-first propagation of positions from the anchor. Each object is
/// positioned once, by the first relation that reaches it; later relations
/// are only checked at sampling time. Distances are in centimetres.
pub fn nominal_positions(
    rs: &RelationSet,
    distances: &BTreeMap<RelationKey, f64>,
    anchor: &str,
) -> Result<NominalLayout, GroundingError> {
    let levels = stack_levels(rs)?;
    let mut positions: BTreeMap<String, Point2> = BTreeMap::new();
    let mut queue = VecDeque::new();
    positions.insert(anchor.into(), Point2::ORIGIN);
    queue.push_back(String::from(anchor));
    for r in rs.relations.iter().filter(|r| r.kind == RelationKind::CenterOfTable) {
        if !positions.contains_key(&r.subject) {
            positions.insert(r.subject.clone(), Point2::ORIGIN);
            queue.push_back(r.subject.clone());
        }
    }

    let distance_m = |r: &crate::relations::Relation| -> Result<f64, GroundingError> {
        if r.kind.direction().is_none() {
            return Ok(0.0);
        }
        let key: RelationKey = (r.subject.clone(), r.kind, r.anchor.clone().unwrap_or_default());
        distances.get(&key).map(|cm| cm / 100.0).ok_or(GroundingError::MissingDistance(key))
    };

    while let Some(current) = queue.pop_front() {
        let here = positions[&current];
        for r in &rs.relations {
            let Some(a) = r.anchor() else { continue };
            let (other, pos) = if a == current && !positions.contains_key(&r.subject) {
                (r.subject.clone(), here + offset(r.kind, distance_m(r)?))
            } else if r.subject == current && !positions.contains_key(a) {
                (String::from(a), here - offset(r.kind, distance_m(r)?))
            } else {
                continue;
            };
            positions.insert(other.clone(), pos);
            queue.push_back(other);
        }
    }

    if let Some(missing) = rs.objects.iter().find(|o| !positions.contains_key(*o)) {
        return Err(GroundingError::Disconnected(missing.clone()));
    }
    Ok(NominalLayout { anchor: anchor.into(), positions, stack_levels: levels })
}

fn footprint_of<'a>(objects: &'a [ObjectSpec], name: &str) -> Result<&'a Shape, GroundingError> {
    objects
        .iter()
        .find(|o| o.name == name)
        .map(|o| &o.footprint)
        .ok_or_else(|| GroundingError::UnknownObject(name.into()))
}

/// Band used to test `r` geometrically.
pub fn relation_band(
    r: &crate::relations::Relation,
    objects: &[ObjectSpec],
    fixed: Option<f64>,
) -> Result<f64, GroundingError> {
    if let Some(b) = fixed {
        return Ok(b);
    }
    let s = footprint_of(objects, &r.subject)?;
    let a = r.anchor().map(|a| footprint_of(objects, a)).transpose()?;
    Ok(default_band(s, a))
}

/// Draws one configuration. Objects are sampled in placement order; stacked
/// objects copy their base's accepted position.
pub fn sample_configuration(
    nominal: &NominalLayout,
    rs: &RelationSet,
    table: &Table,
    objects: &[ObjectSpec],
    params: &SamplerParams,
    seed: u64,
) -> Result<Configuration, GroundingError> {
    let chol = params.cholesky()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = placement_order(rs)?;
    let mut placed: Vec<Placement> = Vec::with_capacity(order.len());

    for name in &order {
        let shape = footprint_of(objects, name)?;
        let mean = *nominal.positions.get(name).ok_or_else(|| GroundingError::Disconnected(name.clone()))?;
        let level = nominal.stack_levels.get(name).copied().unwrap_or(0);
        let base = rs
            .relations
            .iter()
            .find(|r| r.kind == RelationKind::OnTopOf && &r.subject == name)
            .and_then(|r| r.anchor());

        let accept = |p: Point2, placed: &[Placement]| -> Result<bool, GroundingError> {
            if !shape.contained_in(p, &table.shape) {
                return Ok(false);
            }
            for other in placed.iter().filter(|o| o.stack_level == level) {
                if footprints_overlap(shape, p, footprint_of(objects, &other.object)?, other.position()) {
                    return Ok(false);
                }
            }
            for r in &rs.relations {
                let anchor_pos = match r.anchor() {
                    None if &r.subject == name => Point2::ORIGIN,
                    None => continue,
                    Some(a) if &r.subject == name => match placed.iter().find(|o| o.object == a) {
                        Some(o) => o.position(),
                        None => continue,
                    },
                    Some(a) if a == name => match placed.iter().find(|o| o.object == r.subject) {
                        Some(o) => {
                            let band = relation_band(r, objects, params.band)?;
                            if !satisfied(r, o.position(), p, band) {
                                return Ok(false);
                            }
                            continue;
                        }
                        None => continue,
                    },
                    Some(_) => continue,
                };
                let band = relation_band(r, objects, params.band)?;
                if !satisfied(r, p, anchor_pos, band) {
                    return Ok(false);
                }
            }
            Ok(true)
        };

        let (pos, tries) = if let Some(base) = base {
            let p = placed
                .iter()
                .find(|o| o.object == base)
                .map(Placement::position)
                .ok_or_else(|| GroundingError::Disconnected(name.clone()))?;
            (accept(p, &placed)?.then_some(p), 1)
        } else {
            let mut found = None;
            for _ in 0..params.max_tries_per_object {
                let z0: f64 = StandardNormal.sample(&mut rng);
                let z1: f64 = StandardNormal.sample(&mut rng);
                let p = Point2::new(mean.x + chol[0][0] * z0, mean.y + chol[1][0] * z0 + chol[1][1] * z1);
                if accept(p, &placed)? {
                    found = Some(p);
                    break;
                }
            }
            (found, params.max_tries_per_object)
        };
        let Some(pos) = pos else {
            return Err(GroundingError::Rejected { object: name.clone(), tries });
        };
        placed.push(Placement { object: name.clone(), x: pos.x, y: pos.y, stack_level: level });
    }
    Ok(Configuration { placements: placed, seed, anchor: nominal.anchor.clone() })
}

/// Up to `params.candidates` configurations from seeds `base_seed`,
/// `base_seed + 1`, ..., stopping after `params.max_rounds` rounds.
pub fn generate_candidates(
    nominal: &NominalLayout,
    rs: &RelationSet,
    table: &Table,
    objects: &[ObjectSpec],
    params: &SamplerParams,
    base_seed: u64,
) -> Result<Vec<Configuration>, GroundingError> {
    params.validate()?;
    let mut out = Vec::new();
    let rounds = params.max_rounds.max(params.candidates);
    for k in 0..rounds {
        if out.len() == params.candidates {
            break;
        }
        match sample_configuration(nominal, rs, table, objects, params, base_seed.wrapping_add(k as u64)) {
            Ok(c) => out.push(c),
            Err(GroundingError::Rejected { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(GroundingError::NoValidConfiguration(rounds));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{0:?} has no placement")]
    Missing(String),
    #[error("{0:?} leaves the table")]
    OutOfBounds(String),
    #[error("{0:?} overlaps {1:?}")]
    Overlap(String, String),
    #[error("relation not satisfied: {0}")]
    Unsatisfied(String),
    #[error("{0:?} is not on its base")]
    StackMisaligned(String),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

fn within_table(shape: &Shape, at: Point2, table: &Shape) -> bool {
    let corners: Vec<Point2> = match *shape {
        Shape::Rect { w, h } => [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(sx, sy)| Point2::new(at.x + sx * w / 2.0, at.y + sy * h / 2.0))
            .collect(),
        Shape::Circle { r } => {
            // extreme points along the axes and, for round tables, the radial one
            let mut pts: Vec<Point2> = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
                .iter()
                .map(|&(dx, dy)| Point2::new(at.x + dx * r, at.y + dy * r))
                .collect();
            let n = at.norm();
            if n > 0.0 {
                pts.push(Point2::new(at.x * (1.0 + r / n), at.y * (1.0 + r / n)));
            }
            pts
        }
    };
    match *table {
        Shape::Rect { w, h } => corners.iter().all(|c| c.x.abs() <= w / 2.0 && c.y.abs() <= h / 2.0),
        Shape::Circle { r } => corners.iter().all(|c| c.norm() <= r * (1.0 + 1e-12)),
    }
}

/// Checks a configuration from scratch: every relation holds, no two
/// same-level objects overlap, every footprint is on the table, and stacked
/// objects sit exactly on their base.
pub fn validate_configuration(
    cfg: &Configuration,
    rs: &RelationSet,
    table: &Table,
    objects: &[ObjectSpec],
    band: Option<f64>,
) -> Result<(), ValidationError> {
    for name in &rs.objects {
        if cfg.get(name).is_none() {
            return Err(ValidationError::Missing(name.clone()));
        }
    }
    for p in &cfg.placements {
        let shape = footprint_of(objects, &p.object)?;
        if !within_table(shape, p.position(), &table.shape) {
            return Err(ValidationError::OutOfBounds(p.object.clone()));
        }
    }
    for (i, a) in cfg.placements.iter().enumerate() {
        for b in &cfg.placements[i + 1..] {
            if a.stack_level == b.stack_level
                && footprints_overlap(
                    footprint_of(objects, &a.object)?,
                    a.position(),
                    footprint_of(objects, &b.object)?,
                    b.position(),
                )
            {
                return Err(ValidationError::Overlap(a.object.clone(), b.object.clone()));
            }
        }
    }
    for r in &rs.relations {
        let s = cfg.get(&r.subject).ok_or_else(|| ValidationError::Missing(r.subject.clone()))?;
        let a = match r.anchor() {
            Some(a) => cfg.get(a).ok_or_else(|| ValidationError::Missing(a.into()))?.position(),
            None => Point2::ORIGIN,
        };
        if r.kind == RelationKind::OnTopOf && (s.x != a.x || s.y != a.y) {
            return Err(ValidationError::StackMisaligned(r.subject.clone()));
        }
        if !satisfied(r, s.position(), a, relation_band(r, objects, band)?) {
            return Err(ValidationError::Unsatisfied(alloc::format!("{r}")));
        }
    }
    Ok(())
}

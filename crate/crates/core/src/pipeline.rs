//! End-to-end planning: oracle, grounding, then task-motion optimization.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::OccupancyGrid;
use crate::grounding::{
    generate_candidates, nominal_positions, select_anchor, Configuration, GroundingError, NominalLayout, SamplerParams,
};
use crate::oracle::{generate_consistent_relations, query_distances, Attempt, LanguageModel, OracleError, RelationKey};
use crate::relations::{check_consistency, RelationKind, RelationSet};
use crate::scene::{Scene, SceneError};
use crate::seed::{derive, stream};
use crate::tamp::{Planner, PlannerParams, TampError, TaskMotionPlan};

/// Error tagged with the stage that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("scene: {0}")]
    Scene(#[from] SceneError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("grounding: {0}")]
    Grounding(#[from] GroundingError),
    #[error("planning: {0}")]
    Tamp(#[from] TampError),
}

/// A distance answer, centimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedDistance {
    pub subject: String,
    pub kind: RelationKind,
    pub anchor: String,
    pub low: f64,
    pub high: f64,
}

impl RecommendedDistance {
    pub fn midpoint(&self) -> f64 {
        (self.low + self.high) / 2.0
    }
}

/// Symbolic and nominal output of the language-model stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub relations: RelationSet,
    pub distances: Vec<RecommendedDistance>,
    pub nominal: NominalLayout,
    #[serde(default)]
    pub attempts: Vec<Attempt>,
}

impl Arrangement {
    /// Range midpoints keyed by relation.
    pub fn distance_map(&self) -> BTreeMap<RelationKey, f64> {
        self.distances.iter().map(|d| ((d.subject.clone(), d.kind, d.anchor.clone()), d.midpoint())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub max_retry: u32,
    pub sampler: SamplerParams,
    pub planner: PlannerParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { max_retry: 5, sampler: SamplerParams::default(), planner: PlannerParams::default() }
    }
}

/// Relations, distances and nominal layout for the scene's objects.
pub fn arrange<M: LanguageModel + ?Sized>(
    scene: &Scene,
    model: &mut M,
    max_retry: u32,
) -> Result<Arrangement, PipelineError> {
    scene.validate()?;
    let objects: Vec<String> = scene.object_names();
    let generated = generate_consistent_relations(&objects, max_retry, model, check_consistency)?;
    let answers = query_distances(&generated.relations, max_retry, model)?;
    let midpoints: BTreeMap<RelationKey, f64> = answers.iter().map(|(k, a)| (k.clone(), a.midpoint())).collect();
    let distances = answers
        .into_iter()
        .map(|((subject, kind, anchor), a)| RecommendedDistance { subject, kind, anchor, low: a.low, high: a.high })
        .collect();
    let anchor = select_anchor(&generated.relations)?;
    let nominal = nominal_positions(&generated.relations, &midpoints, &anchor)?;
    Ok(Arrangement { relations: generated.relations, distances, nominal, attempts: generated.attempts })
}

/// Candidate configurations for an arrangement; sampling seeds descend from
/// `seed`.
pub fn candidates(
    scene: &Scene,
    arrangement: &Arrangement,
    sampler: &SamplerParams,
    seed: u64,
) -> Result<Vec<Configuration>, PipelineError> {
    let table = scene.target_table()?;
    Ok(generate_candidates(
        &arrangement.nominal,
        &arrangement.relations,
        table,
        &scene.objects,
        sampler,
        derive(seed, &[stream::SAMPLING]),
    )?)
}

/// Best plan over the sampled candidates.
pub fn plan_arrangement(
    scene: &Scene,
    grid: &OccupancyGrid,
    arrangement: &Arrangement,
    config: &PipelineConfig,
    seed: u64,
) -> Result<TaskMotionPlan, PipelineError> {
    let cands = candidates(scene, arrangement, &config.sampler, seed)?;
    let planner = Planner::new(scene, grid, config.planner.clone())?;
    Ok(planner.optimize(&cands)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub arrangement: Arrangement,
    pub plan: TaskMotionPlan,
}

pub fn run<M: LanguageModel + ?Sized>(
    scene: &Scene,
    grid: &OccupancyGrid,
    model: &mut M,
    config: &PipelineConfig,
    seed: u64,
) -> Result<PipelineOutput, PipelineError> {
    let arrangement = arrange(scene, model, config.max_retry)?;
    let plan = plan_arrangement(scene, grid, &arrangement, config, seed)?;
    Ok(PipelineOutput { arrangement, plan })
}

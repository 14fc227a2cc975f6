use std::collections::BTreeMap;

use grop_core::geometry::{Pose2, Shape};
use grop_core::grid::rasterize;
use grop_core::grounding::{
    generate_candidates, nominal_positions, sample_configuration, select_anchor, validate_configuration, SamplerParams,
};
use grop_core::oracle::{relation_key, RelationKey};
use grop_core::scene::{ObjectSpec, RobotSpec, Table};
use grop_core::sim::{execute, semantic_score, FailureModel};
use grop_core::tamp::{Planner, PlannerParams, PoseChoice};
use grop_core::{Point2, Relation, RelationKind, RelationSet, Scene};
use proptest::prelude::*;

fn object(name: &str, footprint: Shape, stack_base: bool, source: (f64, f64)) -> ObjectSpec {
    ObjectSpec { name: name.into(), footprint, height: 0.02, stack_base, source: Point2::new(source.0, source.1) }
}

fn scene() -> Scene {
    Scene {
        name: "breakfast".into(),
        target_table: None,
        tables: vec![
            Table { id: "dining".into(), shape: Shape::Rect { w: 1.2, h: 0.8 }, pose: Pose2::default() },
            Table { id: "counter".into(), shape: Shape::Rect { w: 0.6, h: 2.8 }, pose: Pose2::new(2.6, 0.0, 0.0) },
        ],
        objects: vec![
            object("plate", Shape::Circle { r: 0.135 }, false, (2.6, 1.0)),
            object("fork", Shape::Rect { w: 0.03, h: 0.2 }, false, (2.6, 0.5)),
            object("mug", Shape::Circle { r: 0.045 }, true, (2.6, 0.0)),
            object("lid", Shape::Circle { r: 0.045 }, false, (2.6, -0.5)),
        ],
        obstacles: vec![],
        robot: RobotSpec {
            base_radius: 0.25,
            reach_max: 0.95,
            nav_speed: 0.5,
            manip_time: 5.0,
            start: Pose2::new(-2.2, -1.4, 0.0),
        },
    }
}

fn relations() -> RelationSet {
    RelationSet::from_relations(vec![
        Relation::center("plate"),
        Relation::new("fork", RelationKind::LeftOf, "plate"),
        Relation::new("mug", RelationKind::AboveRight, "plate"),
        Relation::new("lid", RelationKind::OnTopOf, "mug"),
    ])
    .unwrap()
}

fn distances(rs: &RelationSet) -> BTreeMap<RelationKey, f64> {
    let cm = |r: &Relation| match r.kind {
        RelationKind::LeftOf => 20.0,
        _ => 28.0,
    };
    rs.relations.iter().filter_map(|r| relation_key(r).map(|k| (k, cm(r)))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accepted_samples_validate(seed in any::<u64>(), sigma in 0.005f64..0.05) {
        let s = scene();
        let rs = relations();
        let nominal = nominal_positions(&rs, &distances(&rs), &select_anchor(&rs).unwrap()).unwrap();
        let params = SamplerParams::isotropic(sigma);
        let table = s.target_table().unwrap();
        if let Ok(cfg) = sample_configuration(&nominal, &rs, table, &s.objects, &params, seed) {
            prop_assert!(validate_configuration(&cfg, &rs, table, &s.objects, None).is_ok());
            prop_assert_eq!(cfg.get("lid").unwrap().position(), cfg.get("mug").unwrap().position());
            prop_assert_eq!(cfg.get("lid").unwrap().stack_level, 1);
            let again = sample_configuration(&nominal, &rs, table, &s.objects, &params, seed).unwrap();
            prop_assert_eq!(cfg, again);
        }
    }

    #[test]
    fn execution_never_beats_the_plan(seed in any::<u64>()) {
        let s = scene();
        let rs = relations();
        let nominal = nominal_positions(&rs, &distances(&rs), "plate").unwrap();
        let table = s.target_table().unwrap();
        let cands = generate_candidates(&nominal, &rs, table, &s.objects, &SamplerParams::default(), seed).unwrap();
        let grid = rasterize(&s, 0.05);
        let planner = Planner::new(&s, &grid, PlannerParams::default()).unwrap();
        let plan = planner.optimize(&cands).unwrap();
        let out = execute(&plan, &s, &rs, &FailureModel::default().with_seed(seed));
        prop_assert!(out.exec_time >= plan.cost - 1e-9);
        prop_assert!((0.0..=1.0).contains(&out.semantic_score));
        for c in &cands {
            let uniform = planner.plan(c, PoseChoice::Uniform(seed)).unwrap();
            prop_assert!(plan.utility >= planner.plan(c, PoseChoice::MaxUtility).unwrap().utility);
            prop_assert!(plan.utility >= uniform.utility);
        }
    }
}

#[test]
fn noiseless_execution_reproduces_the_plan() {
    let s = scene();
    let rs = relations();
    let nominal = nominal_positions(&rs, &distances(&rs), "plate").unwrap();
    let table = s.target_table().unwrap();
    let cands = generate_candidates(&nominal, &rs, table, &s.objects, &SamplerParams::default(), 3).unwrap();
    let grid = rasterize(&s, 0.05);
    let plan = Planner::new(&s, &grid, PlannerParams::default()).unwrap().optimize(&cands).unwrap();
    let out = execute(&plan, &s, &rs, &FailureModel::noiseless());
    assert_eq!(out.exec_time, plan.cost);
    assert_eq!(out.semantic_score, 1.0);
    assert!(out.all_present);
    assert!(out.success_per_object.values().all(|&ok| ok));
    let order: Vec<&str> = plan.steps.iter().map(|st| st.object.as_str()).collect();
    let at = |n: &str| order.iter().position(|&o| o == n).unwrap();
    assert!(at("mug") < at("lid"));
}

#[test]
fn scrambled_layout_scores_below_one() {
    let s = scene();
    let rs = relations();
    let at = |x, y| Point2::new(x, y);
    let good: BTreeMap<String, Point2> =
        [("plate", at(0.0, 0.0)), ("fork", at(-0.2, 0.0)), ("mug", at(0.2, 0.2)), ("lid", at(0.2, 0.2))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
    assert_eq!(semantic_score(&rs, &good, &s.objects), 1.0);
    let mut bad = good.clone();
    bad.insert("fork".into(), at(0.3, -0.3));
    assert_eq!(semantic_score(&rs, &bad, &s.objects), 0.75);
    bad.remove("lid");
    assert_eq!(semantic_score(&rs, &bad, &s.objects), 0.5);
}

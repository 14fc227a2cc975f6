use std::collections::BTreeMap;

use grop_core::relations::{check_consistency, placement_order, satisfied, stack_levels};
use grop_core::{Point2, Relation, RelationKind, RelationSet};
use proptest::prelude::*;

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

/// The kind that holds for `s` relative to `a` on integer coordinates, or
/// `None` when they coincide.
fn kind_between(s: (i32, i32), a: (i32, i32)) -> Option<RelationKind> {
    use RelationKind::*;
    Some(match ((s.0 - a.0).signum(), (s.1 - a.1).signum()) {
        (-1, 0) => LeftOf,
        (1, 0) => RightOf,
        (0, 1) => Above,
        (0, -1) => Below,
        (-1, 1) => AboveLeft,
        (1, 1) => AboveRight,
        (-1, -1) => BelowLeft,
        (1, -1) => BelowRight,
        _ => return None,
    })
}

type Layout = (Vec<(i32, i32)>, Vec<(usize, usize)>);

/// Relations read off a concrete layout, so consistent by construction.
fn witnessed() -> impl Strategy<Value = Layout> {
    (2usize..=5).prop_flat_map(|n| {
        (prop::collection::vec((-3i32..=3, -3i32..=3), n), prop::collection::vec((0..n, 0..n), 1..8))
    })
}

proptest! {
    #[test]
    fn relations_read_off_a_layout_are_consistent((pts, pairs) in witnessed()) {
        let mut rels = Vec::new();
        for (s, a) in pairs {
            if s == a {
                continue;
            }
            if let Some(k) = kind_between(pts[s], pts[a]) {
                rels.push(Relation::new(NAMES[s], k, NAMES[a]));
            }
        }
        if pts[0] == (0, 0) {
            rels.push(Relation::center(NAMES[0]));
        }
        prop_assume!(!rels.is_empty());
        let rs = RelationSet::from_relations(rels).unwrap();
        prop_assert!(check_consistency(&rs).unwrap().is_consistent());

        // and the layout itself satisfies every relation geometrically
        for r in &rs.relations {
            let at = |n: &str| {
                let i = NAMES.iter().position(|&x| x == n).unwrap();
                Point2::new(pts[i].0 as f64, pts[i].1 as f64)
            };
            let anchor = r.anchor().map_or(Point2::ORIGIN, at);
            prop_assert!(satisfied(r, at(&r.subject), anchor, 0.1));
        }
    }

    #[test]
    fn verdict_ignores_relation_order(
        (pts, pairs) in witnessed(),
        flip in 0usize..8,
        seed in any::<u64>(),
    ) {
        let mut rels: Vec<Relation> = pairs
            .iter()
            .filter(|(s, a)| s != a)
            .filter_map(|&(s, a)| kind_between(pts[s], pts[a]).map(|k| Relation::new(NAMES[s], k, NAMES[a])))
            .collect();
        prop_assume!(!rels.is_empty());
        // the same kind in the opposite direction always closes a strict cycle
        let i = flip % rels.len();
        let r = rels[i].clone();
        rels.push(Relation::new(r.anchor().unwrap(), r.kind, &r.subject));
        let forward = RelationSet::from_relations(rels.clone()).unwrap();
        let mut shuffled = rels;
        let len = shuffled.len();
        for k in 0..len {
            let j = (seed.rotate_left(k as u32) as usize) % len;
            shuffled.swap(k, j);
        }
        let backward = RelationSet::from_relations(shuffled).unwrap();
        let a = check_consistency(&forward).unwrap();
        let b = check_consistency(&backward).unwrap();
        prop_assert!(!a.is_consistent());
        prop_assert_eq!(a.is_consistent(), b.is_consistent());
    }

    #[test]
    fn stacking_chains_order_bases_first(perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(), len in 2usize..=5) {
        let chain: Vec<&str> = perm[..len].iter().map(|&i| NAMES[i]).collect();
        let rels = chain.windows(2).map(|w| Relation::new(w[1], RelationKind::OnTopOf, w[0])).collect();
        let rs = RelationSet::from_relations(rels).unwrap();
        prop_assert!(check_consistency(&rs).unwrap().is_consistent());
        let order = placement_order(&rs).unwrap();
        let pos: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        let levels = stack_levels(&rs).unwrap();
        for w in chain.windows(2) {
            prop_assert!(pos[w[0]] < pos[w[1]]);
            prop_assert!(levels[w[1]] > levels[w[0]]);
        }
    }
}

#[test]
fn closing_a_stack_cycle_is_inconsistent() {
    let rs = RelationSet::from_relations(vec![
        Relation::new("lid", RelationKind::OnTopOf, "mug"),
        Relation::new("mug", RelationKind::OnTopOf, "mat"),
        Relation::new("mat", RelationKind::OnTopOf, "lid"),
    ])
    .unwrap();
    let v = check_consistency(&rs).unwrap();
    assert!(!v.is_consistent());
    assert!(placement_order(&rs).is_err());
}

#[test]
fn two_objects_in_the_centre_must_coincide() {
    let rs = RelationSet::from_relations(vec![
        Relation::center("plate"),
        Relation::center("bowl"),
        Relation::new("bowl", RelationKind::LeftOf, "plate"),
    ])
    .unwrap();
    assert!(!check_consistency(&rs).unwrap().is_consistent());
}

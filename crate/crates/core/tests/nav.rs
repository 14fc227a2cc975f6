use grop_core::tamp::nav::{astar, neighbours, octile, DistanceField};
use grop_core::{Cell, OccupancyGrid, Point2};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn grid_strategy() -> impl Strategy<Value = OccupancyGrid> {
    (4usize..16, 4usize..16)
        .prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(prop::bool::weighted(0.25), w * h)))
        .prop_map(|(w, h, occ)| {
            let mut g = OccupancyGrid::new(w, h, 0.1, Point2::new(0.0, 0.0));
            for (i, o) in occ.into_iter().enumerate() {
                g.set(g.cell_at(i), o);
            }
            g
        })
}

fn free_cells(g: &OccupancyGrid) -> Vec<Cell> {
    (0..g.len()).map(|i| g.cell_at(i)).filter(|&c| g.is_free(c)).collect()
}

fn pick(cells: &[Cell], k: usize) -> Cell {
    cells[k % cells.len()]
}

proptest! {
    #[test]
    fn costs_are_symmetric_and_obey_the_triangle_inequality(g in grid_strategy(), i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let free = free_cells(&g);
        prop_assume!(!free.is_empty());
        let (a, b, c) = (pick(&free, i), pick(&free, j), pick(&free, k));
        let d = |x, y| astar(&g, x, y).ok().map(|p| p.steps.cells());
        prop_assert_eq!(d(a, b), d(b, a));
        if let (Some(ab), Some(bc)) = (d(a, b), d(b, c)) {
            let ac = d(a, c).expect("a reaches c through b");
            prop_assert!(ac <= ab + bc + TOL);
        }
        if let Some(ab) = d(a, b) {
            prop_assert!(octile(a, b) <= ab + TOL);
        }
    }

    #[test]
    fn paths_are_valid_moves(g in grid_strategy(), i in any::<usize>(), j in any::<usize>()) {
        let free = free_cells(&g);
        prop_assume!(!free.is_empty());
        let (a, b) = (pick(&free, i), pick(&free, j));
        if let Ok(p) = astar(&g, a, b) {
            prop_assert_eq!(p.cells.first(), Some(&a));
            prop_assert_eq!(p.cells.last(), Some(&b));
            let (mut straight, mut diagonal) = (0, 0);
            for w in p.cells.windows(2) {
                let step = neighbours(&g, w[0]).find(|&(n, _)| n == w[1]);
                prop_assert!(step.is_some(), "illegal move {:?} -> {:?}", w[0], w[1]);
                if step.unwrap().1 { diagonal += 1 } else { straight += 1 }
            }
            prop_assert_eq!((p.steps.straight, p.steps.diagonal), (straight, diagonal));
        }
    }

    #[test]
    fn distance_field_matches_astar(g in grid_strategy(), i in any::<usize>()) {
        let free = free_cells(&g);
        prop_assume!(!free.is_empty());
        let src = pick(&free, i);
        let field = DistanceField::build(&g, src).unwrap();
        for &c in &free {
            let via_field = field.steps_to(&g, c);
            let via_astar = astar(&g, src, c).ok().map(|p| p.steps);
            prop_assert_eq!(via_field, via_astar);
        }
    }
}

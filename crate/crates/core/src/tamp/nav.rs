//! 8-connected grid search.
//!
//! Path lengths are kept as an exact pair of step counts (straight,
//! diagonal) so that every search that finds a shortest path reports the
//! same floating-point length.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::SQRT_2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;
use crate::grid::{Cell, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NavError {
    #[error("start is outside the grid or on an occupied cell")]
    StartBlocked,
    #[error("goal is outside the grid or on an occupied cell")]
    GoalBlocked,
    #[error("goal is unreachable from start")]
    Unreachable,
    #[error("speed must be positive")]
    InvalidSpeed,
}

/// Number of straight and diagonal moves on a path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Steps {
    pub straight: u32,
    pub diagonal: u32,
}

impl Steps {
    pub fn cells(self) -> f64 {
        self.straight as f64 + self.diagonal as f64 * SQRT_2
    }

    pub fn meters(self, resolution: f64) -> f64 {
        self.cells() * resolution
    }

    fn add(self, diagonal: bool) -> Self {
        if diagonal {
            Self { straight: self.straight, diagonal: self.diagonal + 1 }
        } else {
            Self { straight: self.straight + 1, diagonal: self.diagonal }
        }
    }
}

/// Octile distance between two cells, in cells.
pub fn octile(a: Cell, b: Cell) -> f64 {
    let dx = a.x.abs_diff(b.x) as f64;
    let dy = a.y.abs_diff(b.y) as f64;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    (hi - lo) + lo * SQRT_2
}

const MOVES: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Free neighbours of `c`. Diagonal moves need both adjacent orthogonal
/// cells free.
pub fn neighbours(grid: &OccupancyGrid, c: Cell) -> impl Iterator<Item = (Cell, bool)> + '_ {
    MOVES.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (c.x as isize + dx, c.y as isize + dy);
        if !grid.in_bounds(nx, ny) {
            return None;
        }
        let n = Cell::new(nx as usize, ny as usize);
        if grid.is_occupied(n) {
            return None;
        }
        let diagonal = dx != 0 && dy != 0;
        if diagonal && (grid.is_occupied(Cell::new(nx as usize, c.y)) || grid.is_occupied(Cell::new(c.x, ny as usize)))
        {
            return None;
        }
        Some((n, diagonal))
    })
}

#[derive(Clone, Copy)]
struct Entry {
    key: f64,
    g: f64,
    index: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // min-heap on key, then prefer deeper nodes, then index
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(self.g.total_cmp(&other.g)).then(other.index.cmp(&self.index))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    pub steps: Steps,
}

impl GridPath {
    pub fn length(&self, resolution: f64) -> f64 {
        self.steps.meters(resolution)
    }
}

/// Shortest path between two free cells.
pub fn astar(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Result<GridPath, NavError> {
    if grid.is_occupied(start) {
        return Err(NavError::StartBlocked);
    }
    if grid.is_occupied(goal) {
        return Err(NavError::GoalBlocked);
    }
    let n = grid.len();
    let mut best: Vec<Option<Steps>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let s = grid.index(start);
    best[s] = Some(Steps::default());
    open.push(Entry { key: octile(start, goal), g: 0.0, index: s });
    let g_idx = grid.index(goal);

    while let Some(Entry { index, .. }) = open.pop() {
        if closed[index] {
            continue;
        }
        closed[index] = true;
        if index == g_idx {
            let mut cells = vec![goal];
            let mut i = index;
            while i != s {
                i = parent[i];
                cells.push(grid.cell_at(i));
            }
            cells.reverse();
            return Ok(GridPath { cells, steps: best[index].unwrap_or_default() });
        }
        let here = best[index].unwrap_or_default();
        let c = grid.cell_at(index);
        for (nb, diagonal) in neighbours(grid, c) {
            let ni = grid.index(nb);
            if closed[ni] {
                continue;
            }
            let cand = here.add(diagonal);
            if best[ni].is_none_or(|b| cand.cells() < b.cells()) {
                best[ni] = Some(cand);
                parent[ni] = index;
                let g = cand.cells();
                open.push(Entry { key: g + octile(nb, goal), g, index: ni });
            }
        }
    }
    Err(NavError::Unreachable)
}

/// Shortest-path lengths from one cell to every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    source: Cell,
    steps: Vec<Option<Steps>>,
    resolution: f64,
}

impl DistanceField {
    pub fn build(grid: &OccupancyGrid, source: Cell) -> Result<Self, NavError> {
        if grid.is_occupied(source) {
            return Err(NavError::StartBlocked);
        }
        let mut steps: Vec<Option<Steps>> = vec![None; grid.len()];
        let mut closed = vec![false; grid.len()];
        let mut open = BinaryHeap::new();
        let s = grid.index(source);
        steps[s] = Some(Steps::default());
        open.push(Entry { key: 0.0, g: 0.0, index: s });
        while let Some(Entry { index, .. }) = open.pop() {
            if closed[index] {
                continue;
            }
            closed[index] = true;
            let here = steps[index].unwrap_or_default();
            for (nb, diagonal) in neighbours(grid, grid.cell_at(index)) {
                let ni = grid.index(nb);
                let cand = here.add(diagonal);
                if !closed[ni] && steps[ni].is_none_or(|b| cand.cells() < b.cells()) {
                    steps[ni] = Some(cand);
                    open.push(Entry { key: cand.cells(), g: 0.0, index: ni });
                }
            }
        }
        Ok(Self { source, steps, resolution: grid.resolution() })
    }

    pub fn source(&self) -> Cell {
        self.source
    }

    /// Path length in metres; `None` if unreachable or off-grid.
    pub fn meters_to(&self, grid: &OccupancyGrid, c: Cell) -> Option<f64> {
        if c.x >= grid.width() || c.y >= grid.height() {
            return None;
        }
        self.steps[grid.index(c)].map(|s| s.meters(self.resolution))
    }

    pub fn steps_to(&self, grid: &OccupancyGrid, c: Cell) -> Option<Steps> {
        if c.x >= grid.width() || c.y >= grid.height() {
            return None;
        }
        self.steps[grid.index(c)]
    }
}

/// Travel time in seconds between two world points along the shortest
/// free grid path.
pub fn nav_cost(from: Point2, to: Point2, grid: &OccupancyGrid, speed: f64) -> Result<f64, NavError> {
    if !(speed > 0.0) {
        return Err(NavError::InvalidSpeed);
    }
    let a = grid.cell_of(from).filter(|&c| grid.is_free(c)).ok_or(NavError::StartBlocked)?;
    let b = grid.cell_of(to).filter(|&c| grid.is_free(c)).ok_or(NavError::GoalBlocked)?;
    Ok(astar(grid, a, b)?.length(grid.resolution()) / speed)
}

/// Cell centres of a path as a world polyline.
pub fn path_points(grid: &OccupancyGrid, path: &GridPath) -> Vec<Point2> {
    path.cells.iter().map(|&c| grid.cell_center(c)).collect()
}

//! Occupancy grids and scene rasterization.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{Footprint, Point2};
use crate::scene::Scene;

/// Default cell size in metres.
pub const DEFAULT_RESOLUTION: f64 = 0.05;

/// Clearance added around the scene extent, on top of the base radius.
const EXTENT_MARGIN: f64 = 1.0;

/// Distances within this of the inflation radius count as boundary contact.
const CONTACT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    resolution: f64,
    /// World coordinates of the lower-left corner of cell (0, 0).
    origin: Point2,
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// All-free grid.
    pub fn new(width: usize, height: usize, resolution: f64, origin: Point2) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        Self { resolution, origin, width, height, cells: vec![false; width * height] }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn in_bounds(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Out-of-bounds cells count as occupied.
    pub fn is_occupied(&self, c: Cell) -> bool {
        c.x >= self.width || c.y >= self.height || self.cells[self.index(c)]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.is_occupied(c)
    }

    pub fn set(&mut self, c: Cell, occupied: bool) {
        let i = self.index(c);
        self.cells[i] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn cell_of(&self, p: Point2) -> Option<Cell> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (x, y) = (fx as usize, fy as usize);
        (x < self.width && y < self.height).then_some(Cell::new(x, y))
    }

    pub fn is_free_at(&self, p: Point2) -> bool {
        self.cell_of(p).is_some_and(|c| self.is_free(c))
    }

    pub fn cell_center(&self, c: Cell) -> Point2 {
        Point2::new(
            self.origin.x + (c.x as f64 + 0.5) * self.resolution,
            self.origin.y + (c.y as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cell_bounds(&self, c: Cell) -> (Point2, Point2) {
        let lo =
            Point2::new(self.origin.x + c.x as f64 * self.resolution, self.origin.y + c.y as f64 * self.resolution);
        (lo, Point2::new(lo.x + self.resolution, lo.y + self.resolution))
    }

    /// Marks every cell whose square comes strictly closer than `inflation`
    /// to `footprint`.
    pub fn mark_inflated(&mut self, footprint: &Footprint, inflation: f64) {
        let (lo, hi) = footprint.bounds();
        let r = self.resolution;
        let x0 = (((lo.x - inflation - self.origin.x) / r).floor() as isize).max(0);
        let y0 = (((lo.y - inflation - self.origin.y) / r).floor() as isize).max(0);
        let x1 = (((hi.x + inflation - self.origin.x) / r).ceil() as isize).min(self.width as isize - 1);
        let y1 = (((hi.y + inflation - self.origin.y) / r).ceil() as isize).min(self.height as isize - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let c = Cell::new(x as usize, y as usize);
                let (a, b) = self.cell_bounds(c);
                if footprint.distance(&Footprint::aabb(a, b)) < inflation - CONTACT_EPS {
                    self.set(c, true);
                }
            }
        }
    }

    /// Occupied cells as a row-major bitmap (used by tests and rendering).
    pub fn occupied_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().enumerate().filter(|(_, &o)| o).map(|(i, _)| self.cell_at(i))
    }
}

fn empty_grid_for(scene: &Scene, resolution: f64) -> OccupancyGrid {
    let (lo, hi) = scene.extent();
    let margin = EXTENT_MARGIN + scene.robot.base_radius;
    let origin = Point2::new(
        ((lo.x - margin) / resolution).floor() * resolution,
        ((lo.y - margin) / resolution).floor() * resolution,
    );
    let width = (((hi.x + margin - origin.x) / resolution).ceil() as usize).max(1);
    let height = (((hi.y + margin - origin.y) / resolution).ceil() as usize).max(1);
    OccupancyGrid::new(width, height, resolution, origin)
}

fn rasterize_with(scene: &Scene, resolution: f64, include_dynamic: bool) -> OccupancyGrid {
    let mut grid = empty_grid_for(scene, resolution);
    for f in scene.blockers(include_dynamic) {
        grid.mark_inflated(&f, scene.robot.base_radius);
    }
    grid
}

/// Planning-time grid: tables and every obstacle, inflated by the robot base
/// radius so the planner can treat the robot as a point.
pub fn rasterize(scene: &Scene, resolution: f64) -> OccupancyGrid {
    rasterize_with(scene, resolution, true)
}

/// Prior-map grid: dynamic obstacles left out.
pub fn rasterize_prior(scene: &Scene, resolution: f64) -> OccupancyGrid {
    rasterize_with(scene, resolution, false)
}

//! Planar geometry: points, poses, footprints and the distance and overlap
//! tests used by rasterization, placement sampling and validation.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl core::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl core::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Planar pose; `theta` in radians, counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta: f64,
}

impl Pose2 {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Maps a point expressed in this pose's frame into the parent frame.
    pub fn transform(&self, p: Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }

    /// Inverse of [`Pose2::transform`].
    pub fn inverse_transform(&self, p: Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        Point2::new(c * dx + s * dy, -s * dx + c * dy)
    }
}

/// Top-down footprint. Rectangles are axis-aligned in their own frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Shape {
    Rect { w: f64, h: f64 },
    Circle { r: f64 },
}

impl Shape {
    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Rect { w, h } => w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite(),
            Shape::Circle { r } => r > 0.0 && r.is_finite(),
        }
    }

    /// Half sizes of the axis-aligned bounding box.
    pub fn half_extents(&self) -> (f64, f64) {
        match *self {
            Shape::Rect { w, h } => (w / 2.0, h / 2.0),
            Shape::Circle { r } => (r, r),
        }
    }

    /// Largest side (or diameter).
    pub fn max_extent(&self) -> f64 {
        match *self {
            Shape::Rect { w, h } => w.max(h),
            Shape::Circle { r } => 2.0 * r,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            Shape::Rect { w, h } => 2.0 * (w + h),
            Shape::Circle { r } => 2.0 * core::f64::consts::PI * r,
        }
    }

    /// Places the shape in a parent frame.
    pub fn placed(&self, pose: Pose2) -> Footprint {
        match *self {
            Shape::Rect { w, h } => {
                let (hx, hy) = (w / 2.0, h / 2.0);
                let corners = [Point2::new(-hx, -hy), Point2::new(hx, -hy), Point2::new(hx, hy), Point2::new(-hx, hy)];
                Footprint::Polygon(corners.map(|c| pose.transform(c)))
            }
            Shape::Circle { r } => Footprint::Circle { center: pose.position(), r },
        }
    }

    /// True when the footprint centred at `at` lies inside `container`
    /// centred at the origin (boundary contact allowed).
    pub fn contained_in(&self, at: Point2, container: &Shape) -> bool {
        match *container {
            Shape::Rect { w, h } => {
                let (hx, hy) = self.half_extents();
                at.x.abs() + hx <= w / 2.0 && at.y.abs() + hy <= h / 2.0
            }
            Shape::Circle { r: big } => match *self {
                Shape::Circle { r } => at.norm() + r <= big,
                Shape::Rect { w, h } => {
                    let fx = at.x.abs() + w / 2.0;
                    let fy = at.y.abs() + h / 2.0;
                    fx.hypot(fy) <= big
                }
            },
        }
    }
}

/// True iff the interiors of two axis-aligned footprints intersect.
/// Edge or point contact is not overlap.
pub fn footprints_overlap(a: &Shape, pa: Point2, b: &Shape, pb: Point2) -> bool {
    let dx = (pa.x - pb.x).abs();
    let dy = (pa.y - pb.y).abs();
    match (*a, *b) {
        (Shape::Rect { w: w1, h: h1 }, Shape::Rect { w: w2, h: h2 }) => dx < (w1 + w2) / 2.0 && dy < (h1 + h2) / 2.0,
        (Shape::Circle { r: r1 }, Shape::Circle { r: r2 }) => dx.hypot(dy) < r1 + r2,
        (Shape::Rect { w, h }, Shape::Circle { r }) | (Shape::Circle { r }, Shape::Rect { w, h }) => {
            let ex = (dx - w / 2.0).max(0.0);
            let ey = (dy - h / 2.0).max(0.0);
            ex.hypot(ey) < r
        }
    }
}

/// A footprint placed in the world: a convex quadrilateral or a disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Footprint {
    Polygon([Point2; 4]),
    Circle { center: Point2, r: f64 },
}

impl Footprint {
    pub fn aabb(min: Point2, max: Point2) -> Footprint {
        Footprint::Polygon([
            Point2::new(min.x, min.y),
            Point2::new(max.x, min.y),
            Point2::new(max.x, max.y),
            Point2::new(min.x, max.y),
        ])
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        match self {
            Footprint::Polygon(v) => {
                let mut lo = v[0];
                let mut hi = v[0];
                for p in &v[1..] {
                    lo.x = lo.x.min(p.x);
                    lo.y = lo.y.min(p.y);
                    hi.x = hi.x.max(p.x);
                    hi.y = hi.y.max(p.y);
                }
                (lo, hi)
            }
            Footprint::Circle { center, r } => {
                (Point2::new(center.x - r, center.y - r), Point2::new(center.x + r, center.y + r))
            }
        }
    }

    /// Euclidean distance between the closed sets; zero when they touch or
    /// intersect.
    pub fn distance(&self, other: &Footprint) -> f64 {
        match (self, other) {
            (Footprint::Polygon(a), Footprint::Polygon(b)) => polygon_distance(a, b),
            (Footprint::Polygon(p), Footprint::Circle { center, r })
            | (Footprint::Circle { center, r }, Footprint::Polygon(p)) => {
                (point_polygon_distance(*center, p) - r).max(0.0)
            }
            (Footprint::Circle { center: c1, r: r1 }, Footprint::Circle { center: c2, r: r2 }) => {
                (c1.distance(*c2) - r1 - r2).max(0.0)
            }
        }
    }

    /// Distance from a point to the closed set (zero inside).
    pub fn distance_to_point(&self, p: Point2) -> f64 {
        match self {
            Footprint::Polygon(v) => point_polygon_distance(p, v),
            Footprint::Circle { center, r } => (center.distance(p) - r).max(0.0),
        }
    }

    /// True iff the interiors intersect.
    pub fn overlaps(&self, other: &Footprint) -> bool {
        match (self, other) {
            (Footprint::Polygon(a), Footprint::Polygon(b)) => !separated(a, b, true),
            (Footprint::Polygon(p), Footprint::Circle { center, r })
            | (Footprint::Circle { center, r }, Footprint::Polygon(p)) => point_polygon_distance(*center, p) < *r,
            (Footprint::Circle { center: c1, r: r1 }, Footprint::Circle { center: c2, r: r2 }) => {
                c1.distance(*c2) < r1 + r2
            }
        }
    }
}

fn project(poly: &[Point2], axis: Point2) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in poly {
        let d = p.x * axis.x + p.y * axis.y;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

/// Separating-axis test over both polygons' edge normals. With `touching_separates`,
/// projections that merely meet count as separated.
fn separated(a: &[Point2], b: &[Point2], touching_separates: bool) -> bool {
    for poly in [a, b] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let axis = Point2::new(-(q.y - p.y), q.x - p.x);
            let (alo, ahi) = project(a, axis);
            let (blo, bhi) = project(b, axis);
            let apart = if touching_separates { ahi <= blo || bhi <= alo } else { ahi < blo || bhi < alo };
            if apart {
                return true;
            }
        }
    }
    false
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.distance(Point2::new(a.x + t * ab.x, a.y + t * ab.y))
}

fn point_in_convex(p: Point2, poly: &[Point2]) -> bool {
    let mut sign = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if cross != 0.0 {
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
    }
    true
}

fn point_polygon_distance(p: Point2, poly: &[Point2]) -> f64 {
    if point_in_convex(p, poly) {
        return 0.0;
    }
    edges(poly).map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
}

fn edges(poly: &[Point2]) -> impl Iterator<Item = (Point2, Point2)> + '_ {
    (0..poly.len()).map(move |i| (poly[i], poly[(i + 1) % poly.len()]))
}

fn polygon_distance(a: &[Point2], b: &[Point2]) -> f64 {
    if !separated(a, b, false) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (x, y) in [(a, b), (b, a)] {
        for &v in x {
            for (p, q) in edges(y) {
                best = best.min(point_segment_distance(v, p, q));
            }
        }
    }
    best
}

/// Polyline helper for serialized paths.
pub fn polyline(points: &[Point2]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Shape {
        Shape::Rect { w: 1.0, h: 1.0 }
    }

    #[test]
    fn distant_squares_do_not_overlap() {
        assert!(!footprints_overlap(&unit(), Point2::ORIGIN, &unit(), Point2::new(2.0, 0.0)));
    }

    #[test]
    fn close_circles_overlap() {
        let c = Shape::Circle { r: 0.05 };
        // 0.06 < 0.05 + 0.05
        assert!(footprints_overlap(&c, Point2::ORIGIN, &c, Point2::new(0.06, 0.0)));
        assert!(!footprints_overlap(&c, Point2::ORIGIN, &c, Point2::new(0.11, 0.0)));
    }

    #[test]
    fn edge_contact_is_not_overlap() {
        assert!(!footprints_overlap(&unit(), Point2::ORIGIN, &unit(), Point2::new(1.0, 0.0)));
        assert!(!footprints_overlap(&unit(), Point2::ORIGIN, &unit(), Point2::new(1.0, 1.0)));
        assert!(footprints_overlap(&unit(), Point2::ORIGIN, &unit(), Point2::new(0.999, 0.5)));
        let c = Shape::Circle { r: 0.5 };
        assert!(!footprints_overlap(&unit(), Point2::ORIGIN, &c, Point2::new(1.0, 0.0)));
    }

    #[test]
    fn placed_rotated_rect_distance() {
        let square = unit().placed(Pose2::new(0.0, 0.0, core::f64::consts::FRAC_PI_4));
        let far = Footprint::aabb(Point2::new(2.0, -0.1), Point2::new(2.2, 0.1));
        // rotated corner reaches x = sqrt(0.5)
        let d = square.distance(&far);
        assert!((d - (2.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert_eq!(square.distance(&Footprint::aabb(Point2::ORIGIN, Point2::new(0.1, 0.1))), 0.0);
    }

    #[test]
    fn containment() {
        let table = Shape::Rect { w: 1.0, h: 0.5 };
        let cup = Shape::Circle { r: 0.05 };
        assert!(cup.contained_in(Point2::new(0.45, 0.2), &table));
        assert!(!cup.contained_in(Point2::new(0.46, 0.0), &table));
        let round = Shape::Circle { r: 0.5 };
        assert!(Shape::Rect { w: 0.2, h: 0.2 }.contained_in(Point2::new(0.2, 0.2), &round));
        assert!(!Shape::Rect { w: 0.2, h: 0.2 }.contained_in(Point2::new(0.31, 0.2), &round));
    }

    #[test]
    fn pose_roundtrip() {
        let pose = Pose2::new(1.0, -2.0, 0.7);
        let p = Point2::new(0.3, 0.4);
        let back = pose.inverse_transform(pose.transform(p));
        assert!((back.x - p.x).abs() < 1e-12 && (back.y - p.y).abs() < 1e-12);
    }
}

//! Planar geometry shared by the maps, the lattice and the cost terms.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Rotates the vector counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn xy(self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Continuous planar pose.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose2 { x, y, theta }
    }

    pub fn position(self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Maps a body-frame point into the world frame.
    pub fn transform(self, local: Point2) -> Point2 {
        self.position() + local.rotated(self.theta)
    }

    /// Maps a world point into the body frame.
    pub fn inverse_transform(self, world: Point2) -> Point2 {
        (world - self.position()).rotated(-self.theta)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::TAU);
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

/// Axis-aligned world rectangle, closed on all sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        Rect {
            min: Point2::new(min.x.min(max.x), min.y.min(max.y)),
            max: Point2::new(min.x.max(max.x), min.y.max(max.y)),
        }
    }

    pub fn from_center(center: Point2, half_x: f64, half_y: f64) -> Self {
        Rect::new(Point2::new(center.x - half_x, center.y - half_y), Point2::new(center.x + half_x, center.y + half_y))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn dilate(&self, margin: f64) -> Rect {
        Rect::new(
            Point2::new(self.min.x - margin, self.min.y - margin),
            Point2::new(self.max.x + margin, self.max.y + margin),
        )
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let min = Point2::new(self.min.x.max(other.min.x), self.min.y.max(other.min.y));
        let max = Point2::new(self.max.x.min(other.max.x), self.max.y.min(other.max.y));
        (min.x <= max.x && min.y <= max.y).then_some(Rect { min, max })
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min: Point2::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point2::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }
}

/// Oriented rectangle: center, half extents along its own axes, and yaw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotRect {
    pub center: Point2,
    pub half_x: f64,
    pub half_y: f64,
    pub yaw: f64,
}

impl RotRect {
    pub fn new(center: Point2, half_x: f64, half_y: f64, yaw: f64) -> Self {
        RotRect { center, half_x, half_y, yaw }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_x * self.half_y
    }

    /// Point in the rectangle's own frame.
    pub fn to_local(&self, p: Point2) -> Point2 {
        (p - self.center).rotated(-self.yaw)
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point2) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= self.half_x && l.y.abs() <= self.half_y
    }

    /// Corners in counter-clockwise order starting at (-hx, -hy).
    pub fn corners(&self) -> [Point2; 4] {
        let (hx, hy) = (self.half_x, self.half_y);
        [Point2::new(-hx, -hy), Point2::new(hx, -hy), Point2::new(hx, hy), Point2::new(-hx, hy)]
            .map(|c| self.center + c.rotated(self.yaw))
    }

    pub fn bounding_box(&self) -> Rect {
        let cs = self.corners();
        let mut r = Rect { min: cs[0], max: cs[0] };
        for c in &cs[1..] {
            r = r.union(&Rect { min: *c, max: *c });
        }
        r
    }

    /// Open-interior overlap with an axis-aligned cell (separating axis test).
    /// Rectangles that only touch along an edge, or penetrate by less than
    /// [`OVERLAP_EPS`], do not overlap.
    pub fn overlaps_cell(&self, cell: &Rect) -> bool {
        let corners = self.corners();
        let cell_c = [cell.min, Point2::new(cell.max.x, cell.min.y), cell.max, Point2::new(cell.min.x, cell.max.y)];
        let (s, c) = self.yaw.sin_cos();
        let axes = [Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(c, s), Point2::new(-s, c)];
        for axis in axes {
            let (a_min, a_max) = project(&corners, axis);
            let (b_min, b_max) = project(&cell_c, axis);
            if a_max <= b_min + OVERLAP_EPS || b_max <= a_min + OVERLAP_EPS {
                return false;
            }
        }
        true
    }
}

pub const OVERLAP_EPS: f64 = 1e-9;

fn project(points: &[Point2], axis: Point2) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

/// Triangle area (unsigned).
pub fn triangle_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a).abs()
}

/// Inscribed-circle radius, `area / semiperimeter`. Zero for degenerate triangles.
pub fn inradius(a: Point2, b: Point2, c: Point2) -> f64 {
    let s = 0.5 * (a.distance(b) + b.distance(c) + c.distance(a));
    if s <= 0.0 {
        return 0.0;
    }
    triangle_area(a, b, c) / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn inradius_of_3_4_5() {
        let r = inradius(Point2::new(0.0, 0.0), Point2::new(0.3, 0.0), Point2::new(0.0, 0.4));
        assert!((r - 0.1).abs() < 1e-12);
    }

    #[test]
    fn collinear_triangle_has_zero_inradius() {
        let r = inradius(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0));
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn pose_transform_round_trip() {
        let pose = Pose2::new(1.0, -2.0, 0.7);
        let p = Point2::new(0.3, 0.9);
        let back = pose.inverse_transform(pose.transform(p));
        assert!((back - p).norm() < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-FRAC_PI_2) - 1.5 * PI).abs() < 1e-12);
        assert!((wrap_angle(5.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn rotated_rect_overlap_touching_edge_is_free() {
        let r = RotRect::new(Point2::new(0.0, 0.0), 0.5, 0.3, 0.0);
        let touching = Rect::new(Point2::new(0.5, 0.0), Point2::new(0.58, 0.08));
        assert!(!r.overlaps_cell(&touching));
        let inside = Rect::new(Point2::new(0.4, 0.0), Point2::new(0.48, 0.08));
        assert!(r.overlaps_cell(&inside));
    }
}

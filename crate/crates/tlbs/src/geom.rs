//! Small 2D helpers shared by the grid model, the hull filter and the oracle.
//! Coordinates are meters; y grows with grid rows (row 0 at the top edge).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Point at arc length `s` along the segment from `self` towards `to`.
    /// `s` is clamped to the segment.
    pub fn along(self, to: Point, s: f64) -> Point {
        let d = self.dist(to);
        if d == 0.0 {
            return self;
        }
        let t = (s / d).clamp(0.0, 1.0);
        Point::new(self.x + (to.x - self.x) * t, self.y + (to.y - self.y) * t)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for (f64, f64) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

/// Cross product of (b - a) x (c - a); positive when c lies counter-clockwise
/// of the a->b direction (in the y-down frame this is a clockwise turn on
/// screen, which is irrelevant for hull correctness).
pub fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Distance from point `p` to the segment `a`-`b`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = a.dist(b);
    if d == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (d * d)).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
}

/// Total length of a polyline given as a point sequence.
pub fn polyline_len(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

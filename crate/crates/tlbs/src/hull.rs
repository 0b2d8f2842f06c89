//! Convex-hull search-space reduction: charging-station candidates are
//! restricted to cells whose centers lie inside (or on) the convex hull of
//! the ROI centers. Any station outside the hull can be replaced by one on
//! the hull without lengthening the connecting legs, so the restriction does
//! not cost solution quality while it shrinks the candidate scan.

use crate::error::{Error, Result};
use crate::geom::{cross, point_segment_dist, Point};
use crate::scenario::{CellIndex, Grid, Scenario};

const EPS_M: f64 = 1e-6;

/// Convex hull of a point set plus the precomputed set of grid cells whose
/// centers fall inside it.
#[derive(Debug, Clone)]
pub struct HullFilter {
    vertices: Vec<Point>,
    member_cells: Vec<CellIndex>,
    member_mask: Vec<bool>,
    cols: u32,
}

impl HullFilter {
    /// Build the filter from arbitrary points, classifying the cells of
    /// `grid`. Handles degenerate hulls (single point, collinear segment).
    pub fn new(points: &[Point], grid: &Grid) -> Result<Self> {
        let vertices = convex_hull(points)?;
        let mut member_cells = Vec::new();
        let mut member_mask = vec![false; grid.num_cells()];
        for cell in grid.iter_cells() {
            if hull_contains(&vertices, grid.center(cell)) {
                member_cells.push(cell);
                member_mask[(cell.row * grid.cols + cell.col) as usize] = true;
            }
        }
        Ok(HullFilter { vertices, member_cells, member_mask, cols: grid.cols })
    }

    pub fn from_rois(scenario: &Scenario) -> Result<Self> {
        Self::new(&scenario.roi_points(), &scenario.grid)
    }

    /// Hull vertices in counter-clockwise order (y-up convention).
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Cells whose centers lie inside or on the hull, row-major order.
    pub fn member_cells(&self) -> &[CellIndex] {
        &self.member_cells
    }

    pub fn contains_cell(&self, cell: CellIndex) -> bool {
        self.member_mask
            .get((cell.row * self.cols + cell.col) as usize)
            .copied()
            .unwrap_or(false)
    }

    pub fn contains_point(&self, p: Point) -> bool {
        hull_contains(&self.vertices, p)
    }
}

/// Andrew's monotone chain. Returns the hull vertices in counter-clockwise
/// order without repeating the first point; collinear inputs collapse to the
/// two extreme points and a single input to one point.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Err(Error::InvalidParam("convex hull of an empty point set".into()));
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).expect("finite coordinates"));
    pts.dedup_by(|a, b| a.dist(*b) < EPS_M);
    if pts.len() == 1 {
        return Ok(pts);
    }

    let build = |iter: &mut dyn Iterator<Item = Point>| {
        let mut chain: Vec<Point> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain.pop();
        chain
    };
    let lower = build(&mut pts.iter().copied());
    let upper = build(&mut pts.iter().rev().copied());

    let mut hull = lower;
    hull.extend(upper);
    if hull.is_empty() {
        // All points collinear: keep the two extremes.
        hull = vec![pts[0], pts[pts.len() - 1]];
    }
    Ok(hull)
}

/// True when `p` lies inside or on the boundary of the hull polygon
/// (vertices in counter-clockwise order). Degenerate hulls test distance to
/// the point or segment.
pub fn hull_contains(vertices: &[Point], p: Point) -> bool {
    match vertices.len() {
        0 => false,
        1 => vertices[0].dist(p) <= EPS_M,
        2 => point_segment_dist(p, vertices[0], vertices[1]) <= EPS_M,
        n => (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n], p) >= -EPS_M),
    }
}

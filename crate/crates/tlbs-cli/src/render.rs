//! SVG rendering of a scenario and (optionally) a solution: grid, ROI cells,
//! per-UAV trajectories, charging stations and the ROI convex hull.

use tlbs::energy::WaypointKind;
use tlbs::geom::Point;
use tlbs::hull::HullFilter;
use tlbs::{Scenario, Solution};

#[derive(Debug, Clone, Copy)]
pub struct RenderSpec {
    pub width_px: u32,
    pub height_px: u32,
    pub show_hull: bool,
    pub show_stations: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { width_px: 800, height_px: 800, show_hull: true, show_stations: true }
    }
}

/// Per-UAV trajectory colors, cycled when the fleet outgrows the palette.
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn render_svg(scenario: &Scenario, solution: Option<&Solution>, spec: &RenderSpec) -> String {
    let grid = &scenario.grid;
    let field_w = grid.cols as f64 * grid.cell_size_m;
    let field_h = grid.rows as f64 * grid.cell_size_m;
    let sx = spec.width_px as f64 / field_w;
    let sy = spec.height_px as f64 / field_h;
    let px = |p: Point| (p.x * sx, p.y * sy);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <!-- Field coordinates in meters map linearly to pixels; origin at the\n\
              top-left corner, y grows downward (grid row 0 is the top row). -->\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
          viewBox=\"0 0 {w} {h}\">\n",
        w = spec.width_px,
        h = spec.height_px
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#fbfbf8\"/>\n",
        spec.width_px, spec.height_px
    ));

    // Grid lines.
    svg.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
    for r in 0..=grid.rows {
        let y = r as f64 * grid.cell_size_m * sy;
        svg.push_str(&format!("<line x1=\"0\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\"/>\n", spec.width_px));
    }
    for c in 0..=grid.cols {
        let x = c as f64 * grid.cell_size_m * sx;
        svg.push_str(&format!("<line x1=\"{x:.1}\" y1=\"0\" x2=\"{x:.1}\" y2=\"{}\"/>\n", spec.height_px));
    }
    svg.push_str("</g>\n");

    // ROI cells.
    svg.push_str("<g fill=\"#ffd966\" stroke=\"#b8860b\" stroke-width=\"1\">\n");
    for roi in &scenario.rois {
        let x = roi.col as f64 * grid.cell_size_m * sx;
        let y = roi.row as f64 * grid.cell_size_m * sy;
        svg.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{:.1}\"/>\n",
            grid.cell_size_m * sx,
            grid.cell_size_m * sy
        ));
    }
    svg.push_str("</g>\n");

    if spec.show_hull {
        if let Ok(hull) = HullFilter::from_rois(scenario) {
            if hull.vertices().len() >= 2 {
                let pts: Vec<String> = hull
                    .vertices()
                    .iter()
                    .map(|&v| {
                        let (x, y) = px(v);
                        format!("{x:.1},{y:.1}")
                    })
                    .collect();
                svg.push_str(&format!(
                    "<polygon points=\"{}\" fill=\"none\" stroke=\"#888888\" \
                     stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n",
                    pts.join(" ")
                ));
            }
        }
    }

    if let Some(solution) = solution {
        // Trajectories, one polyline per UAV.
        for (u, path) in solution.paths.iter().enumerate() {
            let color = PALETTE[u % PALETTE.len()];
            let pts: Vec<String> = path
                .iter()
                .map(|wp| {
                    let (x, y) = px(grid.center(wp.cell));
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                 stroke-width=\"2\" stroke-linejoin=\"round\"/>\n",
                pts.join(" ")
            ));
            // Swap stops along this trajectory.
            for wp in path.iter().filter(|wp| wp.kind == WaypointKind::Recharge) {
                let (x, y) = px(grid.center(wp.cell));
                svg.push_str(&format!(
                    "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"4\" fill=\"none\" \
                     stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
                ));
            }
        }
        if spec.show_stations {
            svg.push_str("<g fill=\"#222222\">\n");
            for st in &solution.stations {
                let (x, y) = px(grid.center(*st));
                svg.push_str(&format!(
                    "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"7\" height=\"7\"/>\n",
                    x - 3.5,
                    y - 3.5
                ));
            }
            svg.push_str("</g>\n");
        }
    }

    // Start markers.
    for u in 0..scenario.num_uavs as usize {
        let (x, y) = px(grid.center(scenario.start_of(u)));
        svg.push_str(&format!(
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"5\" fill=\"#000000\"/>\n"
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

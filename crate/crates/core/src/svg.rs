//! Deterministic SVG rendering of planar cross-section tilings.
//!
//! Cells are drawn in lexicographic label order with a fixed palette
//! and fixed-precision coordinates, so identical inputs produce
//! byte-identical documents.

use std::fmt::Write as _;

use crate::dynsys::{RotationAction, TorusPoint};
use crate::geometry::ConvexRegion;
use crate::marker::MarkerFunction;
use crate::tiling::{cells_in_window, CenterField, TilingConfig};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Half-width of the rendered window around the origin, in tiling units.
    pub viewport: f64,
    pub stroke_width: f64,
    pub show_labels: bool,
    /// Optional circle overlay of this radius around each cell center
    /// (e.g. the separation half-scale).
    pub ball_radius: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { viewport: 12.0, stroke_width: 0.06, show_labels: true, ball_radius: None }
    }
}

const CANVAS: f64 = 800.0;
const PALETTE: [&str; 6] = ["#dbeafe", "#fde68a", "#d1fae5", "#fecaca", "#e9d5ff", "#fed7aa"];

/// Renders the cross-section tiling at `depth` around the origin of
/// `R^2`. Only planar tilings are drawable.
pub fn render_tiling(
    action: &RotationAction,
    marker: &MarkerFunction,
    config: &TilingConfig,
    x: &TorusPoint,
    depth: f64,
    opts: &RenderOptions,
) -> Result<String> {
    let d = action.dim_lattice();
    if d != 2 {
        return Err(Error::RenderUnsupported { d });
    }
    if !(opts.viewport.is_finite() && opts.viewport > 0.0) {
        return Err(Error::InvalidParameter(format!("viewport must be positive, got {}", opts.viewport)));
    }
    let reach = marker.covering as f64 + (d as f64).sqrt();
    let label_radius = opts.viewport + reach;
    let field = CenterField::gather(action, marker, x, label_radius + config.truncation + 1.0)?;
    let cells = cells_in_window(&field, label_radius, depth, config.truncation)?;

    let v = opts.viewport;
    let to_px = |p: &[f64]| -> (f64, f64) {
        (
            (p[0] + v) / (2.0 * v) * CANVAS,
            // SVG y grows downward.
            (v - p[1]) / (2.0 * v) * CANVAS,
        )
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {CANVAS:.6} {CANVAS:.6}\" width=\"{CANVAS:.6}\" height=\"{CANVAS:.6}\">"
    );
    let _ = writeln!(out, "<rect width=\"{CANVAS:.6}\" height=\"{CANVAS:.6}\" fill=\"#ffffff\"/>");
    let stroke_px = opts.stroke_width / (2.0 * v) * CANVAS;
    for cell in &cells {
        let ConvexRegion::Polygon { vertices } = &cell.region else { continue };
        let comps = cell.label.components();
        let idx = (comps[0].rem_euclid(2) + 2 * comps[1].rem_euclid(3)) as usize % PALETTE.len();
        let mut points = String::new();
        for vtx in vertices {
            let (px, py) = to_px(vtx);
            let _ = write!(points, "{px:.6},{py:.6} ");
        }
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"#1f2937\" stroke-width=\"{stroke_px:.6}\"/>",
            points.trim_end(),
            PALETTE[idx]
        );
    }
    if let Some(r) = opts.ball_radius {
        let rpx = r / (2.0 * v) * CANVAS;
        for cell in &cells {
            let (cx, cy) = to_px(&cell.label.as_f64());
            let _ = writeln!(
                out,
                "<circle cx=\"{cx:.6}\" cy=\"{cy:.6}\" r=\"{rpx:.6}\" fill=\"none\" stroke=\"#2563eb\" stroke-width=\"{:.6}\" stroke-dasharray=\"4 3\"/>",
                stroke_px * 0.8
            );
        }
    }
    if opts.show_labels {
        let font = (CANVAS / (2.0 * v) * 0.45).min(18.0);
        for cell in &cells {
            let (cx, cy) = to_px(&cell.label.as_f64());
            let _ = writeln!(
                out,
                "<text x=\"{cx:.6}\" y=\"{cy:.6}\" font-size=\"{font:.6}\" font-family=\"monospace\" text-anchor=\"middle\" fill=\"#111827\">{}</text>",
                cell.label
            );
        }
    }
    // Origin crosshair on top of everything.
    let (ox, oy) = to_px(&[0.0, 0.0]);
    let arm = CANVAS / (2.0 * v) * 0.35;
    let _ = writeln!(
        out,
        "<path d=\"M {x0:.6} {oy:.6} L {x1:.6} {oy:.6} M {ox:.6} {y0:.6} L {ox:.6} {y1:.6}\" stroke=\"#dc2626\" stroke-width=\"{w:.6}\"/>",
        x0 = ox - arm,
        x1 = ox + arm,
        y0 = oy - arm,
        y1 = oy + arm,
        w = stroke_px * 1.5
    );
    out.push_str("</svg>\n");
    Ok(out)
}

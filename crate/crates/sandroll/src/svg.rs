//! Deterministic SVG rendering of the two standard result views: the
//! rolling-direction map over the shape space, and the per-step
//! length-versus-pitch scatter with the tipping limit marked.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::shape_space::ClassificationMap;
use crate::stability::RollDirection;

const FORWARD_COLOR: &str = "#d62728";
const BACKWARD_COLOR: &str = "#1f77b4";
const NONE_COLOR: &str = "#000000";
const IDEAL_MARKER_COLOR: &str = "#2ca02c";
const FAILURE_FILL: &str = "#f6e3e0";

/// Angle pair of the analytically ideal level-ground roller, marked on maps.
pub const IDEAL_ALPHA_RAD: f64 = PI / 3.0;
pub const IDEAL_ZETA_RAD: f64 = 5.0 * PI / 6.0;

fn svg_open(out: &mut String, width: u32, height: u32) {
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(out, "<!-- sandroll {} -->", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )
    .unwrap();
    writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>"
    )
    .unwrap();
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, size: u32, body: &str) {
    writeln!(
        out,
        "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"{size}\" fill=\"#222222\">{body}</text>"
    )
    .unwrap();
}

/// Scatter map of rolling direction over the (alpha, zeta) grid.
///
/// Forward cells are red, backward blue, unrollable black; cells without a
/// convex realization are left blank. A green cross marks the analytically
/// ideal level-ground roller.
pub fn shape_space_svg(map: &ClassificationMap) -> String {
    let width = 720u32;
    let height = 720u32;
    let margin = 80.0;
    let plot = f64::from(width) - 2.0 * margin;
    let to_px_x = |alpha: f64| margin + alpha / PI * plot;
    let to_px_y = |zeta: f64| f64::from(height) - margin - zeta / PI * plot;

    let mut out = String::new();
    svg_open(&mut out, width, height);
    text(
        &mut out,
        f64::from(width) / 2.0,
        34.0,
        "middle",
        18,
        &format!(
            "rolling direction on a {:.1} deg incline ({}x{} grid)",
            map.theta_deg, map.grid_n, map.grid_n
        ),
    );

    writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{plot:.2}\" height=\"{plot:.2}\" fill=\"none\" stroke=\"#555555\"/>",
        margin,
        f64::from(height) - margin - plot
    )
    .unwrap();
    for quarter in 1..=4 {
        let value = quarter as f64 * PI / 4.0;
        let label = match quarter {
            1 => "pi/4",
            2 => "pi/2",
            3 => "3pi/4",
            _ => "pi",
        };
        text(
            &mut out,
            to_px_x(value),
            f64::from(height) - margin + 24.0,
            "middle",
            13,
            label,
        );
        text(&mut out, margin - 12.0, to_px_y(value) + 4.0, "end", 13, label);
    }
    text(
        &mut out,
        f64::from(width) / 2.0,
        f64::from(height) - 24.0,
        "middle",
        15,
        "alpha (rad)",
    );
    writeln!(
        out,
        "<text x=\"24\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" fill=\"#222222\" transform=\"rotate(-90 24 {:.2})\">zeta (rad)</text>",
        f64::from(height) / 2.0,
        f64::from(height) / 2.0
    )
    .unwrap();

    let radius = (plot / map.grid_n as f64 * 0.42).max(0.8);
    for cell in &map.cells {
        let Some(outcome) = cell.outcome else {
            continue;
        };
        let color = match outcome.direction {
            RollDirection::Forward => FORWARD_COLOR,
            RollDirection::Backward => BACKWARD_COLOR,
            RollDirection::None => NONE_COLOR,
        };
        writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius:.2}\" fill=\"{color}\"/>",
            to_px_x(cell.alpha),
            to_px_y(cell.zeta)
        )
        .unwrap();
    }

    let cx = to_px_x(IDEAL_ALPHA_RAD);
    let cy = to_px_y(IDEAL_ZETA_RAD);
    let arm = 9.0;
    for (dx0, dy0, dx1, dy1) in [(-arm, -arm, arm, arm), (-arm, arm, arm, -arm)] {
        writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{IDEAL_MARKER_COLOR}\" stroke-width=\"3\"/>",
            cx + dx0,
            cy + dy0,
            cx + dx1,
            cy + dy1
        )
        .unwrap();
    }

    let legend_y = 54.0;
    for (i, (color, label)) in [
        (FORWARD_COLOR, "forward"),
        (BACKWARD_COLOR, "backward"),
        (NONE_COLOR, "none"),
    ]
    .iter()
    .enumerate()
    {
        let x = margin + i as f64 * 130.0;
        writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{legend_y:.2}\" r=\"5\" fill=\"{color}\"/>"
        )
        .unwrap();
        text(&mut out, x + 12.0, legend_y + 4.0, "start", 13, label);
    }

    out.push_str("</svg>\n");
    out
}

/// Scatter of step length against touchdown pitch, with the critical pitch
/// drawn as a dashed line and the no-transfer region shaded behind it.
pub fn step_pitch_svg(points: &[(f64, f64)], beta_m_deg: f64) -> String {
    let width = 720u32;
    let height = 540u32;
    let margin = 80.0;
    let plot_w = f64::from(width) - 2.0 * margin;
    let plot_h = f64::from(height) - 2.0 * margin;
    let pitch_max = 90.0;
    let len_max = points
        .iter()
        .map(|&(_, l)| l)
        .fold(0.05, f64::max)
        * 1.15;
    let to_px_x = |pitch: f64| margin + pitch / pitch_max * plot_w;
    let to_px_y = |len: f64| f64::from(height) - margin - (len / len_max) * plot_h;

    let mut out = String::new();
    svg_open(&mut out, width, height);
    text(
        &mut out,
        f64::from(width) / 2.0,
        34.0,
        "middle",
        18,
        "step length against touchdown pitch",
    );

    let beta_px = to_px_x(beta_m_deg.clamp(0.0, pitch_max));
    writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{plot_h:.2}\" fill=\"{FAILURE_FILL}\"/>",
        beta_px,
        margin,
        (margin + plot_w - beta_px).max(0.0)
    )
    .unwrap();
    writeln!(
        out,
        "<line x1=\"{beta_px:.2}\" y1=\"{:.2}\" x2=\"{beta_px:.2}\" y2=\"{:.2}\" stroke=\"#333333\" stroke-width=\"2\" stroke-dasharray=\"7 5\"/>",
        margin,
        margin + plot_h
    )
    .unwrap();
    text(
        &mut out,
        beta_px + 8.0,
        margin + 18.0,
        "start",
        13,
        &format!("critical pitch {beta_m_deg:.1} deg"),
    );
    text(
        &mut out,
        (beta_px + margin + plot_w) / 2.0,
        margin + plot_h / 2.0,
        "middle",
        13,
        "no forward transfer",
    );

    writeln!(
        out,
        "<rect x=\"{margin:.2}\" y=\"{margin:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" fill=\"none\" stroke=\"#555555\"/>"
    )
    .unwrap();
    for tick in (0..=6).map(|i| i as f64 * 15.0) {
        text(
            &mut out,
            to_px_x(tick),
            f64::from(height) - margin + 24.0,
            "middle",
            13,
            &format!("{tick}"),
        );
    }
    for i in 0..=4 {
        let value = len_max * i as f64 / 4.0;
        text(
            &mut out,
            margin - 10.0,
            to_px_y(value) + 4.0,
            "end",
            13,
            &format!("{value:.3}"),
        );
    }
    text(
        &mut out,
        f64::from(width) / 2.0,
        f64::from(height) - 24.0,
        "middle",
        15,
        "touchdown pitch (deg)",
    );
    writeln!(
        out,
        "<text x=\"24\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" fill=\"#222222\" transform=\"rotate(-90 24 {:.2})\">step length (m)</text>",
        f64::from(height) / 2.0,
        f64::from(height) / 2.0
    )
    .unwrap();

    for &(pitch, length) in points {
        writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{BACKWARD_COLOR}\" fill-opacity=\"0.75\"/>",
            to_px_x(pitch.clamp(0.0, pitch_max)),
            to_px_y(length.clamp(0.0, len_max))
        )
        .unwrap();
    }

    out.push_str("</svg>\n");
    out
}

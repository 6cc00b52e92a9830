//! Deterministic SVG rendering of maps, body paths and footholds.

use std::fmt::Write as _;
use std::path::Path;

use crate::footstep::Footstep;
use crate::geometry::Pose2;
use crate::lattice::Leg;
use crate::terrain::TerrainMaps;

/// Pixels per meter.
const SCALE: f64 = 100.0;

/// Foothold color of each leg.
pub fn leg_color(leg: Leg) -> &'static str {
    match leg {
        Leg::LF => "#8b4513",
        Leg::RF => "#f2c200",
        Leg::LH => "#2e8b57",
        Leg::RH => "#1e64c8",
    }
}

/// What to draw on top of the maps.
#[derive(Clone, Copy, Debug, Default)]
pub struct Scene<'a> {
    pub path: &'a [Pose2],
    pub footsteps: &'a [Footstep],
    pub start: Option<Pose2>,
    pub goal: Option<Pose2>,
}

/// SVG document of `maps` with `scene` overlaid. Output depends only on the inputs.
pub fn scene_svg(maps: &TerrainMaps, scene: &Scene<'_>) -> String {
    let ext = maps.height.spec().extent();
    let (w, h) = (ext.width() * SCALE, ext.height() * SCALE);
    let px = |x: f64| (x - ext.min.x) * SCALE;
    let py = |y: f64| (ext.max.y - y) * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<line x1="0" y1="0" x2="0" y2="6" stroke="#c0392b" stroke-width="2"/></pattern></defs>"##,
        "\n"
    ));

    // Reward map, one rectangle per run of equal shade in a row.
    let rspec = *maps.reward.spec();
    s.push_str("<g id=\"reward\" shape-rendering=\"crispEdges\">\n");
    for iy in 0..rspec.height {
        let mut ix = 0;
        while ix < rspec.width {
            let fill = reward_fill(maps.reward.reward(ix, iy));
            let mut end = ix + 1;
            while end < rspec.width && reward_fill(maps.reward.reward(end, iy)) == fill {
                end += 1;
            }
            let r = rspec.cell_rect(ix, iy).union(&rspec.cell_rect(end - 1, iy));
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                px(r.min.x),
                py(r.max.y),
                r.width() * SCALE,
                r.height() * SCALE
            );
            ix = end;
        }
    }
    s.push_str("</g>\n");

    let ospec = *maps.obstacle.spec();
    s.push_str("<g id=\"obstacles\" fill=\"url(#hatch)\" stroke=\"#c0392b\" stroke-width=\"0.5\">\n");
    for iy in 0..ospec.height {
        let mut ix = 0;
        while ix < ospec.width {
            if !maps.obstacle.cell(ix, iy).is_occupied() {
                ix += 1;
                continue;
            }
            let mut end = ix + 1;
            while end < ospec.width && maps.obstacle.cell(end, iy).is_occupied() {
                end += 1;
            }
            let r = ospec.cell_rect(ix, iy).union(&ospec.cell_rect(end - 1, iy));
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                px(r.min.x),
                py(r.max.y),
                r.width() * SCALE,
                r.height() * SCALE
            );
            ix = end;
        }
    }
    s.push_str("</g>\n");

    if scene.path.len() >= 2 {
        let pts: Vec<String> = scene.path.iter().map(|p| format!("{:.2},{:.2}", px(p.x), py(p.y))).collect();
        let _ = writeln!(
            s,
            r##"<polyline id="body-path" points="{}" fill="none" stroke="#1a9a3a" stroke-width="3"/>"##,
            pts.join(" ")
        );
    }
    for (id, pose) in [("start", scene.start), ("goal", scene.goal)] {
        if let Some(p) = pose {
            let (x, y) = (px(p.x), py(p.y));
            let (dx, dy) = (15.0 * p.theta.cos(), -15.0 * p.theta.sin());
            let _ = writeln!(
                s,
                r##"<g id="{id}"><circle cx="{x:.2}" cy="{y:.2}" r="6" fill="none" stroke="#000" stroke-width="2"/><line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-width="2"/></g>"##,
                x + dx,
                y + dy
            );
        }
    }
    s.push_str("<g id=\"footholds\" stroke=\"#000\" stroke-width=\"0.5\">\n");
    for f in scene.footsteps {
        let _ = writeln!(
            s,
            r#"<circle class="{}" cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            f.leg,
            px(f.position.x),
            py(f.position.y),
            leg_color(f.leg)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn reward_fill(r: Option<f64>) -> String {
    match r {
        Some(r) => {
            let v = (255.0 * (1.0 + r.clamp(-1.0, 0.0))).round() as u8;
            format!("#{v:02x}{v:02x}{v:02x}")
        }
        None => "#cfe0f0".to_string(),
    }
}

/// Writes [`scene_svg`] to `path`.
pub fn render_scene(maps: &TerrainMaps, scene: &Scene<'_>, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, scene_svg(maps, scene))
}

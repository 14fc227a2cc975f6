//! Top-down SVG rendering of a scene and, optionally, a plan.

use std::fmt::Write;

use grop_core::geometry::{Footprint, Point2, Shape};
use grop_core::scene::ObstacleKind;
use grop_core::tamp::TaskMotionPlan;
use grop_core::Scene;

/// Pixels per metre.
const SCALE: f64 = 100.0;
const MARGIN: f64 = 0.3;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// World to SVG coordinates (y up becomes y down).
fn px(p: Point2) -> (f64, f64) {
    (p.x * SCALE, -p.y * SCALE)
}

fn footprint(out: &mut String, f: &Footprint, attrs: &str) {
    match f {
        Footprint::Polygon(corners) => {
            let pts: Vec<String> = corners
                .iter()
                .map(|&c| {
                    let (x, y) = px(c);
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            let _ = writeln!(out, r#"  <polygon points="{}" {attrs}/>"#, pts.join(" "));
        }
        Footprint::Circle { center, r } => {
            let (x, y) = px(*center);
            let _ = writeln!(out, r#"  <circle cx="{x:.1}" cy="{y:.1}" r="{:.1}" {attrs}/>"#, r * SCALE);
        }
    }
}

/// Renders tables, obstacles and object sources; with a plan, also the
/// placed objects (one `class="object"` element each), standing poses and
/// navigation paths.
pub fn render(scene: &Scene, plan: Option<&TaskMotionPlan>) -> String {
    let (lo, hi) = scene.extent();
    let (x0, y0) = (lo.x - MARGIN, hi.y + MARGIN);
    let (w, h) = ((hi.x - lo.x + 2.0 * MARGIN) * SCALE, (hi.y - lo.y + 2.0 * MARGIN) * SCALE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.1} {:.1} {w:.1} {h:.1}" width="{w:.0}" height="{h:.0}">"#,
        x0 * SCALE,
        -y0 * SCALE
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&scene.name));
    for t in &scene.tables {
        footprint(
            &mut out,
            &t.footprint(),
            &format!(r##"class="table" data-id="{}" fill="#d9c7a7" stroke="#7a6040""##, escape(&t.id)),
        );
    }
    for o in &scene.obstacles {
        let fill = match o.kind {
            ObstacleKind::Static => "#888888",
            ObstacleKind::Dynamic => "#c0392b",
        };
        footprint(
            &mut out,
            &o.world_footprint(),
            &format!(r#"class="obstacle" data-id="{}" fill="{fill}""#, escape(&o.id)),
        );
    }
    for o in &scene.objects {
        let (x, y) = px(o.source);
        let _ = writeln!(out, r##"  <circle class="source" cx="{x:.1}" cy="{y:.1}" r="3" fill="#555555"/>"##);
    }
    if let Some(plan) = plan {
        for path in &plan.paths {
            let pts: Vec<String> = path.iter().map(|&[x, y]| format!("{:.1},{:.1}", x * SCALE, -y * SCALE)).collect();
            let _ = writeln!(
                out,
                r##"  <polyline class="path" points="{}" fill="none" stroke="#2e86de" stroke-dasharray="6 4"/>"##,
                pts.join(" ")
            );
        }
        let table = scene.target_table().ok();
        for step in &plan.steps {
            let (x, y) = px(step.place.position());
            let (dx, dy) = (step.place.theta.cos() * 20.0, -step.place.theta.sin() * 20.0);
            let _ = writeln!(
                out,
                r##"  <g class="pose"><circle cx="{x:.1}" cy="{y:.1}" r="{:.1}" fill="none" stroke="#27ae60"/><line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{:.1}" stroke="#27ae60"/></g>"##,
                scene.robot.base_radius * SCALE,
                x + dx,
                y + dy
            );
            let shape = scene.object(&step.object).map(|o| o.footprint).unwrap_or(Shape::Circle { r: 0.03 });
            let theta = table.map_or(0.0, |t| t.pose.theta);
            let f = shape.placed(grop_core::Pose2::new(step.target_world.x, step.target_world.y, theta));
            footprint(
                &mut out,
                &f,
                &format!(
                    r##"class="object" data-name="{}" data-level="{}" fill="#ffffff" fill-opacity="0.8" stroke="#222222""##,
                    escape(&step.object),
                    step.target.stack_level
                ),
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

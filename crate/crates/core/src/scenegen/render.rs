use std::fmt::Write;

use super::{Scene, CANVAS};

/// Renders a scene as a standalone SVG (documentation only; the models never
/// see pixels).
pub fn scene_svg(scene: &Scene) -> String {
    const FILLS: [&str; 4] = ["#4a7ab0", "#d08a3c", "#5a9a5a", "#a05a9a"];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {c} {c}" width="256" height="256">"#,
        c = CANVAS
    );
    let _ = writeln!(s, r##"<rect width="{c}" height="{c}" fill="#ffffff" stroke="#222222"/>"##, c = CANVAS);
    for (i, obj) in scene.objects.iter().enumerate() {
        let points: Vec<String> = obj
            .outline()
            .iter()
            // flip y so the canvas origin is bottom-left
            .map(|p| format!("{:.3},{:.3}", p.x, CANVAS - p.y))
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="{}" fill-opacity="0.6" stroke="#222222" stroke-width="0.5"/>"##,
            points.join(" "),
            FILLS[i % FILLS.len()]
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="2" y="8" font-size="6" font-family="sans-serif">{} · {}</text>"##,
        scene.problem_id, scene.label
    );
    s.push_str("</svg>\n");
    s
}

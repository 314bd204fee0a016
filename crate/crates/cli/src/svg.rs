//! Static scatter/polyline plots in the first quadrant.

use std::fmt::Write;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub enum Layer {
    Dots { points: Vec<(u64, u64)>, color: &'static str, radius: f64 },
    Line { points: Vec<(u64, u64)>, color: &'static str },
}

pub fn palette(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub fn render(title: &str, layers: &[Layer]) -> String {
    let extent = layers
        .iter()
        .flat_map(|l| match l {
            Layer::Dots { points, .. } | Layer::Line { points, .. } => points.iter(),
        })
        .map(|&(a, b)| a.max(b))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let scale = (SIZE - 2.0 * MARGIN) / extent;
    let x = |a: u64| MARGIN + a as f64 * scale;
    let y = |b: u64| SIZE - MARGIN - b as f64 * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="#888" fill="none"/>"##,
        m = MARGIN,
        b = SIZE - MARGIN,
        r = SIZE - MARGIN
    );
    for layer in layers {
        match layer {
            Layer::Dots { points, color, radius } => {
                let _ = writeln!(s, r#"<g fill="{color}">"#);
                for &(a, b) in points {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}"/>"#, x(a), y(b));
                }
                s.push_str("</g>\n");
            }
            Layer::Line { points, color } => {
                let pts: Vec<String> = points.iter().map(|&(a, b)| format!("{:.2},{:.2}", x(a), y(b))).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" stroke="{color}" stroke-width="1" fill="none"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Barcode plots: one row per bar, action on the x-axis, an arrow for bars running to +∞.

use std::fmt::Write;

use rfc_core::barcode::Barcode;

const ROW: f64 = 16.0;
const LEFT: f64 = 60.0;
const WIDTH: f64 = 560.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn barcode_svg(bc: &Barcode, title: &str) -> String {
    let bars = bc.bars();
    let mut xs: Vec<f64> = bars.iter().flat_map(|b| std::iter::once(b.start.to_f64()).chain(b.end.as_ref().map(|e| e.to_f64()))).collect();
    xs.extend(bc.window.lo.iter().chain(&bc.window.hi).map(|a| a.to_f64()));
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo {
        (lo, hi)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (0.0, 1.0)
    };
    let span = hi - lo;
    let x = |v: f64| LEFT + (v - lo) / span * (WIDTH - 40.0);
    let height = 50.0 + ROW * bars.len() as f64 + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height:.0}" viewBox="0 0 {w} {height:.0}" font-family="monospace" font-size="11">"#,
        w = LEFT + WIDTH
    );
    s.push_str(r#"<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="6" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>"#);
    s.push('\n');
    let _ = writeln!(s, r#"<text x="{LEFT}" y="20">{}</text>"#, esc(title));
    for (r, b) in bars.iter().enumerate() {
        let y = 40.0 + ROW * r as f64;
        let x0 = x(b.start.to_f64());
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">deg {}</text>"#, y + 4.0, b.degree);
        match &b.end {
            Some(e) => {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x0:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="black" stroke-width="3"/>"#,
                    x(e.to_f64())
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x0:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="black" stroke-width="3" marker-end="url(#arrow)"/>"#,
                    LEFT + WIDTH - 10.0
                );
            }
        }
        let _ = writeln!(s, r#"<circle cx="{x0:.2}" cy="{y:.1}" r="3"/>"#);
    }
    let axis = 40.0 + ROW * bars.len() as f64 + 4.0;
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{axis:.1}" x2="{:.1}" y2="{axis:.1}" stroke="gray"/>"#, LEFT + WIDTH - 10.0);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="{:.1}">{lo:.3}</text>"#, axis + 14.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{hi:.3}</text>"#, x(hi), axis + 14.0);
    s.push_str("</svg>\n");
    s
}

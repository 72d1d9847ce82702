//! Static SVG figures of critical configurations.

use crate::record::{CriticalRecord, ResultFile};
use std::fmt::Write;

pub struct RenderOptions {
    pub size: u32,
    pub circle: bool,
}

/// Fixed three-decimal output; `-0.000` is printed as `0.000`.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn sign_label(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

pub fn file_name(index: usize, r: &CriticalRecord) -> String {
    format!("cp{index:03}_w{}_{}.svg", r.winding, sign_label(&r.signs).replace('+', "p").replace('-', "m"))
}

/// Draws one configuration: the polygon path, vertex labels `p1..pn`, the
/// fixed beads in a contrasting colour and the circumscribed circle.
pub fn render_record(file: &ResultFile, r: &CriticalRecord, opts: &RenderOptions) -> String {
    let size = opts.size as f64;
    let margin = 0.12 * size;
    let reach = r
        .vertices
        .iter()
        .map(|v| v[0].hypot(v[1]))
        .fold(if opts.circle { r.radius } else { 0.0 }, f64::max);
    let scale = if reach > 0.0 { (0.5 * size - margin) / reach } else { 1.0 };
    let mid = 0.5 * size;
    let at = |v: [f64; 2]| (mid + scale * v[0], mid - scale * v[1]);

    let mut fixed = vec![false; r.vertices.len()];
    let mut start = 0;
    for p in &file.necklace.pieces {
        if let Some(f) = fixed.get_mut(start) {
            *f = true;
        }
        start += p.beads;
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if opts.circle {
        let _ = writeln!(
            s,
            r##"<circle cx="{0}" cy="{0}" r="{1}" fill="none" stroke="#999999" stroke-dasharray="4 3"/>"##,
            num(mid),
            num(scale * r.radius)
        );
        let _ = writeln!(s, r##"<circle cx="{0}" cy="{0}" r="2.500" fill="#999999"/>"##, num(mid));
    }

    let mut d = String::new();
    for (i, v) in r.vertices.iter().enumerate() {
        let (x, y) = at(*v);
        let _ = write!(d, "{}{} {} ", if i == 0 { 'M' } else { 'L' }, num(x), num(y));
    }
    d.push('Z');
    let _ = writeln!(
        s,
        r##"<path d="{d}" fill="none" stroke="#1f4e79" stroke-width="1.500" stroke-linejoin="round"/>"##
    );

    for (i, v) in r.vertices.iter().enumerate() {
        let (x, y) = at(*v);
        let (fill, rad) = if fixed[i] { ("#c0392b", "4.500") } else { ("#1f4e79", "3.000") };
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{rad}" fill="{fill}"/>"#, num(x), num(y));
        let norm = v[0].hypot(v[1]);
        let (ux, uy) = if norm > 0.0 { (v[0] / norm, v[1] / norm) } else { (0.0, 1.0) };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">p{}</text>"#,
            num(x + 14.0 * ux),
            num(y - 14.0 * uy),
            i + 1
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="8" y="18" font-family="sans-serif" font-size="13">w = {}, E = ({}), area = {}</text>"#,
        r.winding,
        sign_label(&r.signs),
        num(r.area)
    );
    s.push_str("</svg>\n");
    s
}
